#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pathrel/conllu.hpp"
#include "pathrel/deppath.hpp"
#include "pathrel/vocab.hpp"

namespace pathrel {

// Multiset of (w1, w2, path) co-occurrences. Both orientations of every
// extracted co-occurrence are stored: count(w1,w2,p) == count(w2,w1,mirror(p)).
class TripleStore {
public:
    struct Key {
        std::string w1, w2, path;
        auto operator<=>(const Key&) const = default;
    };

    void add(const std::string& w1, const std::string& w2, const std::string& path,
             std::int64_t count = 1);
    std::int64_t count(const std::string& w1, const std::string& w2,
                       const std::string& path) const;
    std::int64_t size() const { return static_cast<std::int64_t>(counts_.size()); }
    bool empty() const { return counts_.empty(); }

    const std::map<Key, std::int64_t>& entries() const { return counts_; }

    // Total corpus count per canonical path string.
    std::map<std::string, std::int64_t> path_totals() const;

    // All (path, count) for the ordered pair; empty if the pair never co-occurs.
    std::vector<std::pair<std::string, std::int64_t>> lookup_pair(
        const std::string& w1, const std::string& w2) const;

    // TSV `w1<TAB>w2<TAB>path<TAB>count`, sorted by key.
    void save_tsv(std::ostream& os) const;
    static TripleStore load_tsv(std::istream& is);

    bool operator==(const TripleStore& o) const { return counts_ == o.counts_; }

private:
    std::map<Key, std::int64_t> counts_;
};

// Vocabulary over canonical path strings; id 0 is the empty-path token.
class PathLexicon {
public:
    PathLexicon() : vocab_(kEmptyPathToken) {}

    std::int64_t add(const std::string& path, std::int64_t total_count);
    std::int64_t lookup(const std::string& path) const { return vocab_.lookup(path); }
    bool contains(const std::string& path) const { return vocab_.contains(path); }
    const std::string& path(std::int64_t id) const { return vocab_.token(id); }
    std::int64_t size() const { return vocab_.size(); }
    std::int64_t total_count(std::int64_t id) const {
        return counts_[static_cast<std::size_t>(id)];
    }
    const Vocabulary& vocab() const { return vocab_; }

    // TSV `path<TAB>id<TAB>count` in id order (id 0 = empty path, count 0).
    void save_tsv(std::ostream& os) const;
    static PathLexicon load_tsv(std::istream& is);

    bool operator==(const PathLexicon& o) const {
        return vocab_ == o.vocab_ && counts_ == o.counts_;
    }

private:
    Vocabulary vocab_;
    std::vector<std::int64_t> counts_{0};
};

// For every ordered in-vocab noun pair co-occurring in a sentence with a path
// of at most max_nodes nodes, counts (lemma_i, lemma_j, path); the mirrored
// orientation is stored explicitly.
TripleStore extract_triples(const std::vector<ParsedSentence>& corpus,
                            const Vocabulary& vocab, std::int64_t max_nodes,
                            bool include_propn = false);

struct PruneResult {
    TripleStore store;    // triples whose path total >= min_path_count
    PathLexicon lexicon;  // top lexicon_cap surviving paths by total count
};

// Drops triples whose path's total corpus count is below min_path_count, then
// keeps the lexicon_cap most frequent surviving paths (ties broken
// lexicographically). Out-of-lexicon triples stay in the store for classifier
// path lookup; the unsupervised training view filters on the lexicon.
PruneResult prune(const TripleStore& store, std::int64_t min_path_count = 5,
                  std::int64_t lexicon_cap = 30000);

// Weighted path set for the ordered pair, falling back to {(empty path, 1)}.
std::vector<std::pair<std::string, std::int64_t>> paths_for_pair(
    const TripleStore& store, const std::string& w1, const std::string& w2);

}  // namespace pathrel
