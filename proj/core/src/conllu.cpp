#include "pathrel/conllu.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "pathrel/tensor.hpp"

namespace pathrel {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

bool parse_int(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    std::int64_t value = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

}  // namespace

const ParsedToken& ParsedSentence::token(std::int64_t index_1based) const {
    if (index_1based < 1 || index_1based > static_cast<std::int64_t>(tokens.size())) {
        throw std::out_of_range("token index " + std::to_string(index_1based) +
                                " out of range for sentence of " +
                                std::to_string(tokens.size()));
    }
    return tokens[static_cast<std::size_t>(index_1based - 1)];
}

bool is_single_tree(const ParsedSentence& s) {
    const std::int64_t n = static_cast<std::int64_t>(s.tokens.size());
    if (n == 0) return false;
    std::int64_t roots = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const ParsedToken& t = s.tokens[static_cast<std::size_t>(i)];
        if (t.index != i + 1) return false;
        if (t.head == t.index) return false;
        if (t.head < 0 || t.head > n) return false;
        if (t.head == 0) ++roots;
    }
    if (roots != 1) return false;
    for (std::int64_t i = 1; i <= n; ++i) {
        std::int64_t cur = i, hops = 0;
        while (cur != 0) {
            cur = s.tokens[static_cast<std::size_t>(cur - 1)].head;
            if (++hops > n) return false;  // cycle
        }
    }
    return true;
}

ConlluStats parse_conllu(std::istream& in,
                         const std::function<void(ParsedSentence&&)>& sink) {
    ConlluStats stats;
    ParsedSentence cur;
    bool cur_bad = false;

    auto flush = [&]() {
        if (!cur.tokens.empty() || cur_bad) {
            if (!cur_bad && is_single_tree(cur)) {
                ++stats.sentences;
                sink(std::move(cur));
            } else {
                ++stats.malformed_skipped;
            }
        }
        cur = ParsedSentence();
        cur_bad = false;
    };

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') continue;
        std::vector<std::string> cols = split_tabs(line);
        if (cols.size() != 10) {
            cur_bad = true;
            continue;
        }
        // multiword ranges (1-2) and empty nodes (1.1) carry no tree structure
        if (cols[0].find('-') != std::string::npos || cols[0].find('.') != std::string::npos) {
            continue;
        }
        ParsedToken tok;
        std::int64_t id = 0, head = 0;
        if (!parse_int(cols[0], id) || !parse_int(cols[6], head)) {
            cur_bad = true;
            continue;
        }
        tok.index = id;
        tok.lemma = lowercase(cols[2]);
        tok.upos = cols[3];
        tok.head = head;
        tok.deprel = cols[7];
        cur.tokens.push_back(std::move(tok));
    }
    if (in.bad()) throw DataError("I/O failure while reading CoNLL-U input");
    flush();
    return stats;
}

std::vector<ParsedSentence> parse_conllu_all(std::istream& in, ConlluStats* stats) {
    std::vector<ParsedSentence> out;
    ConlluStats st = parse_conllu(in, [&](ParsedSentence&& s) { out.push_back(std::move(s)); });
    if (stats) *stats = st;
    return out;
}

void write_conllu(std::ostream& os, const ParsedSentence& s) {
    for (const ParsedToken& t : s.tokens) {
        os << t.index << '\t' << t.lemma << '\t' << t.lemma << '\t' << t.upos << "\t_\t_\t"
           << t.head << '\t' << t.deprel << "\t_\t_\n";
    }
    os << '\n';
}

Vocabulary build_vocab(const std::vector<ParsedSentence>& sentences,
                       std::int64_t min_count, bool noun_only, bool include_propn) {
    if (min_count < 1) throw std::invalid_argument("build_vocab: min_count must be >= 1");
    std::map<std::string, std::int64_t> counts;
    for (const ParsedSentence& s : sentences) {
        for (const ParsedToken& t : s.tokens) {
            if (noun_only) {
                const bool is_noun = t.upos == "NOUN" || (include_propn && t.upos == "PROPN");
                if (!is_noun) continue;
            }
            ++counts[t.lemma];
        }
    }
    Vocabulary v;
    for (const auto& [lemma, count] : counts) {
        if (count >= min_count) v.add(lemma);
    }
    return v;
}

}  // namespace pathrel
