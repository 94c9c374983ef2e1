#include "pathrel/triples.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "pathrel/tensor.hpp"

namespace pathrel {

void TripleStore::add(const std::string& w1, const std::string& w2,
                      const std::string& path, std::int64_t count) {
    if (count < 1) throw std::invalid_argument("TripleStore::add: count must be >= 1");
    counts_[Key{w1, w2, path}] += count;
}

std::int64_t TripleStore::count(const std::string& w1, const std::string& w2,
                                const std::string& path) const {
    auto it = counts_.find(Key{w1, w2, path});
    return it == counts_.end() ? 0 : it->second;
}

std::map<std::string, std::int64_t> TripleStore::path_totals() const {
    std::map<std::string, std::int64_t> totals;
    for (const auto& [key, count] : counts_) totals[key.path] += count;
    return totals;
}

std::vector<std::pair<std::string, std::int64_t>> TripleStore::lookup_pair(
    const std::string& w1, const std::string& w2) const {
    std::vector<std::pair<std::string, std::int64_t>> out;
    // keys are ordered (w1, w2, path): scan the contiguous pair range
    auto it = counts_.lower_bound(Key{w1, w2, ""});
    for (; it != counts_.end() && it->first.w1 == w1 && it->first.w2 == w2; ++it) {
        out.emplace_back(it->first.path, it->second);
    }
    return out;
}

void TripleStore::save_tsv(std::ostream& os) const {
    for (const auto& [key, count] : counts_) {
        os << key.w1 << '\t' << key.w2 << '\t' << key.path << '\t' << count << '\n';
    }
}

TripleStore TripleStore::load_tsv(std::istream& is) {
    TripleStore store;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t t1 = line.find('\t');
        const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        const std::size_t t3 = t2 == std::string::npos ? std::string::npos : line.find('\t', t2 + 1);
        if (t3 == std::string::npos) {
            throw DataError("triples line " + std::to_string(line_no) + ": expected 4 columns");
        }
        const std::int64_t count = std::stoll(line.substr(t3 + 1));
        store.add(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                  line.substr(t2 + 1, t3 - t2 - 1), count);
    }
    if (is.bad()) throw DataError("I/O failure while reading triples");
    return store;
}

std::int64_t PathLexicon::add(const std::string& path, std::int64_t total_count) {
    const std::int64_t id = vocab_.add(path);
    if (id == static_cast<std::int64_t>(counts_.size())) {
        counts_.push_back(total_count);
    }
    return id;
}

void PathLexicon::save_tsv(std::ostream& os) const {
    for (std::int64_t id = 0; id < size(); ++id) {
        os << vocab_.token(id) << '\t' << id << '\t' << counts_[static_cast<std::size_t>(id)]
           << '\n';
    }
}

PathLexicon PathLexicon::load_tsv(std::istream& is) {
    PathLexicon lex;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t t1 = line.find('\t');
        const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            throw DataError("lexicon line " + std::to_string(line_no) + ": expected 3 columns");
        }
        const std::string path = line.substr(0, t1);
        const std::int64_t id = std::stoll(line.substr(t1 + 1, t2 - t1 - 1));
        const std::int64_t count = std::stoll(line.substr(t2 + 1));
        if (id == 0) {
            if (path != kEmptyPathToken) {
                throw DataError("lexicon line " + std::to_string(line_no) +
                                ": id 0 must be the empty-path token");
            }
            continue;
        }
        if (lex.add(path, count) != id) {
            throw DataError("lexicon line " + std::to_string(line_no) + ": ids not dense");
        }
    }
    if (is.bad()) throw DataError("I/O failure while reading lexicon");
    return lex;
}

TripleStore extract_triples(const std::vector<ParsedSentence>& corpus,
                            const Vocabulary& vocab, std::int64_t max_nodes,
                            bool include_propn) {
    TripleStore store;
    for (const ParsedSentence& s : corpus) {
        std::vector<std::int64_t> nouns;
        for (const ParsedToken& t : s.tokens) {
            const bool is_noun = t.upos == "NOUN" || (include_propn && t.upos == "PROPN");
            if (is_noun && vocab.contains(t.lemma)) nouns.push_back(t.index);
        }
        for (std::size_t a = 0; a < nouns.size(); ++a) {
            for (std::size_t b = a + 1; b < nouns.size(); ++b) {
                auto p = extract_path(s, nouns[a], nouns[b], max_nodes);
                if (!p) continue;
                const std::string& w1 = s.token(nouns[a]).lemma;
                const std::string& w2 = s.token(nouns[b]).lemma;
                store.add(w1, w2, p->render());
                store.add(w2, w1, mirror(*p).render());
            }
        }
    }
    return store;
}

PruneResult prune(const TripleStore& store, std::int64_t min_path_count,
                  std::int64_t lexicon_cap) {
    const auto totals = store.path_totals();

    PruneResult out;
    for (const auto& [key, count] : store.entries()) {
        if (totals.at(key.path) >= min_path_count) {
            out.store.add(key.w1, key.w2, key.path, count);
        }
    }

    // surviving paths ranked by total count, ties lexicographic
    std::vector<std::pair<std::string, std::int64_t>> ranked;
    for (const auto& [path, total] : totals) {
        if (total >= min_path_count) ranked.emplace_back(path, total);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    const std::size_t keep = std::min<std::size_t>(ranked.size(),
                                                   static_cast<std::size_t>(lexicon_cap));
    for (std::size_t i = 0; i < keep; ++i) {
        out.lexicon.add(ranked[i].first, ranked[i].second);
    }
    return out;
}

std::vector<std::pair<std::string, std::int64_t>> paths_for_pair(
    const TripleStore& store, const std::string& w1, const std::string& w2) {
    auto found = store.lookup_pair(w1, w2);
    if (found.empty()) found.emplace_back(kEmptyPathToken, 1);
    return found;
}

}  // namespace pathrel
