#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathrel/vocab.hpp"

namespace pathrel {

struct ParsedToken {
    std::int64_t index = 0;  // 1-based
    std::string lemma;       // lowercased at ingest
    std::string upos;
    std::int64_t head = 0;  // 0 = root
    std::string deprel;

    bool operator==(const ParsedToken&) const = default;
};

struct ParsedSentence {
    std::vector<ParsedToken> tokens;

    const ParsedToken& token(std::int64_t index_1based) const;
    bool operator==(const ParsedSentence&) const = default;
};

// True iff head links form a single tree: exactly one root, heads in range,
// head != index, every token reaches the root (no cycles).
bool is_single_tree(const ParsedSentence& s);

struct ConlluStats {
    std::int64_t sentences = 0;
    std::int64_t malformed_skipped = 0;
};

// Streams sentences from 10-column CoNLL-U text. Multiword-token (1-2) and
// empty-node (1.1) lines are skipped; comment lines start with '#'. Sentences
// with a non-integer HEAD, multiple roots, cycles, or out-of-range heads are
// skipped and counted in stats.malformed_skipped.
ConlluStats parse_conllu(std::istream& in,
                         const std::function<void(ParsedSentence&&)>& sink);

std::vector<ParsedSentence> parse_conllu_all(std::istream& in,
                                             ConlluStats* stats = nullptr);

// Inverse of parse_conllu for round-trip checks and corpus generation. The
// unused columns are written as '_' (FORM repeats the lemma).
void write_conllu(std::ostream& os, const ParsedSentence& s);

// Lemma vocabulary over sentences with frequency >= min_count. noun_only
// keeps UPOS == NOUN, plus PROPN when include_propn is set.
Vocabulary build_vocab(const std::vector<ParsedSentence>& sentences,
                       std::int64_t min_count, bool noun_only,
                       bool include_propn = false);

}  // namespace pathrel
