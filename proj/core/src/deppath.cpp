#include "pathrel/deppath.hpp"

#include <algorithm>
#include <stdexcept>

#include "pathrel/tensor.hpp"

namespace pathrel {

std::string PathEdge::render() const {
    return lemma + "/" + pos + "/" + deprel + "/" + dir;
}

std::string DepPath::render() const {
    std::string out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (i) out += ' ';
        out += edges[i].render();
    }
    return out;
}

bool DepPath::is_canonical() const {
    if (edges.empty()) return false;
    if (edges.front().lemma != "X" || edges.back().lemma != "Y") return false;
    std::int64_t dashes = 0;
    for (const PathEdge& e : edges) {
        if (e.dir == "-") {
            ++dashes;
        } else if (e.dir != ">" && e.dir != "<") {
            return false;
        }
    }
    return dashes == 1;
}

DepPath parse_path(const std::string& canonical) {
    DepPath p;
    std::size_t start = 0;
    while (start <= canonical.size()) {
        std::size_t space = canonical.find(' ', start);
        if (space == std::string::npos) space = canonical.size();
        const std::string piece = canonical.substr(start, space - start);
        if (!piece.empty()) {
            // split from the right: a lemma may itself contain '/'
            const std::size_t s3 = piece.rfind('/');
            const std::size_t s2 = s3 == std::string::npos ? std::string::npos
                                                           : piece.rfind('/', s3 - 1);
            const std::size_t s1 = s2 == std::string::npos || s2 == 0
                                       ? std::string::npos
                                       : piece.rfind('/', s2 - 1);
            if (s1 == std::string::npos || s2 == std::string::npos || s3 == std::string::npos) {
                throw DataError("malformed path edge: '" + piece + "'");
            }
            PathEdge e;
            e.lemma = piece.substr(0, s1);
            e.pos = piece.substr(s1 + 1, s2 - s1 - 1);
            e.deprel = piece.substr(s2 + 1, s3 - s2 - 1);
            e.dir = piece.substr(s3 + 1);
            p.edges.push_back(std::move(e));
        }
        if (space == canonical.size()) break;
        start = space + 1;
    }
    if (p.edges.empty()) throw DataError("empty path string");
    return p;
}

DepPath mirror(const DepPath& p) {
    DepPath m;
    m.edges.assign(p.edges.rbegin(), p.edges.rend());
    for (PathEdge& e : m.edges) {
        if (e.dir == ">") {
            e.dir = "<";
        } else if (e.dir == "<") {
            e.dir = ">";
        }
        if (e.lemma == "X") {
            e.lemma = "Y";
        } else if (e.lemma == "Y") {
            e.lemma = "X";
        }
    }
    return m;
}

std::string mirror_string(const std::string& canonical) {
    return mirror(parse_path(canonical)).render();
}

std::optional<DepPath> extract_path(const ParsedSentence& s, std::int64_t i,
                                    std::int64_t j, std::int64_t max_nodes) {
    const std::int64_t n = static_cast<std::int64_t>(s.tokens.size());
    if (i < 1 || i > n || j < 1 || j > n) {
        throw std::out_of_range("extract_path: token index out of range");
    }
    if (i == j) throw std::invalid_argument("extract_path: i == j");

    // ancestor chains up to the root, inclusive of the endpoints
    auto chain = [&](std::int64_t start) {
        std::vector<std::int64_t> out;
        std::int64_t cur = start;
        while (cur != 0) {
            out.push_back(cur);
            cur = s.token(cur).head;
        }
        return out;
    };
    const std::vector<std::int64_t> up_i = chain(i);
    const std::vector<std::int64_t> up_j = chain(j);

    // deepest common node: strip the shared chain suffix; what remains at
    // up_i[ai] == up_j[aj] is the LCA (ai == 0 when i is an ancestor of j)
    std::size_t ai = up_i.size(), aj = up_j.size();
    while (ai > 0 && aj > 0 && up_i[ai - 1] == up_j[aj - 1]) {
        --ai;
        --aj;
    }
    if (ai == up_i.size() || aj == up_j.size()) {
        throw std::invalid_argument("extract_path: tokens share no ancestor (not a tree)");
    }

    std::vector<std::pair<std::int64_t, std::string>> walk;  // (token index, dir)
    for (std::size_t k = 0; k < ai; ++k) walk.emplace_back(up_i[k], ">");
    walk.emplace_back(up_i[ai], "-");
    for (std::size_t k = aj; k-- > 0;) walk.emplace_back(up_j[k], "<");

    if (static_cast<std::int64_t>(walk.size()) > max_nodes) return std::nullopt;

    DepPath path;
    for (const auto& [tok_idx, dir] : walk) {
        const ParsedToken& t = s.token(tok_idx);
        PathEdge e;
        e.lemma = tok_idx == i ? "X" : (tok_idx == j ? "Y" : t.lemma);
        e.pos = t.upos;
        e.deprel = t.deprel;
        e.dir = dir;
        path.edges.push_back(std::move(e));
    }
    return path;
}

}  // namespace pathrel
