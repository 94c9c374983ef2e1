#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pathrel/conllu.hpp"

namespace pathrel {

// One node on a rendered dependency path: `lemma/POS/deprel/dir`. Endpoint
// slots carry the literal lemmas "X" and "Y". dir is ">" while ascending from
// X, "-" on the walk's root node, "<" while descending to Y.
struct PathEdge {
    std::string lemma;
    std::string pos;
    std::string deprel;
    std::string dir;

    bool operator==(const PathEdge&) const = default;
    std::string render() const;
};

// The empty-path placeholder used when a word pair has no corpus paths.
inline const std::string kEmptyPathToken = "UNK-lemma/UNK-POS/UNK-dep/UNK-dir";

struct DepPath {
    std::vector<PathEdge> edges;

    bool operator==(const DepPath&) const = default;
    std::string render() const;  // space-joined edges

    // First edge is the X slot, last is the Y slot, exactly one "-" edge.
    bool is_canonical() const;
};

// Splits a canonical string back into edges. Tolerates arbitrary component
// strings (the UNK path parses too); extraction-side invariants are checked
// separately via DepPath::is_canonical.
DepPath parse_path(const std::string& canonical);

// Orientation swap: edge order reversed, ">" <-> "<" flipped ("-" fixed), and
// the X/Y slot lemmas swapped so the result reads X-first again. Involution.
DepPath mirror(const DepPath& p);
std::string mirror_string(const std::string& canonical);

// Path between tokens i and j (1-based) in the sentence tree, walking
// i -> lowest common ancestor -> j. Nodes on the i-side ascent render with
// ">", the LCA with "-" and its own deprel, the j-side descent with "<";
// endpoint lemmas become "X" and "Y". Returns nothing when the walk visits
// more than max_nodes nodes. Out-of-range indices or i == j throw.
std::optional<DepPath> extract_path(const ParsedSentence& s, std::int64_t i,
                                    std::int64_t j, std::int64_t max_nodes);

}  // namespace pathrel
