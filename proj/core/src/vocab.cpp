#include "pathrel/vocab.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "pathrel/tensor.hpp"

namespace pathrel {

Vocabulary::Vocabulary(std::string unk_token) {
    id_to_token_.push_back(unk_token);
    token_to_id_.emplace(std::move(unk_token), kUnkId);
}

std::int64_t Vocabulary::add(const std::string& token) {
    auto it = token_to_id_.find(token);
    if (it != token_to_id_.end()) return it->second;
    const std::int64_t id = size();
    id_to_token_.push_back(token);
    token_to_id_.emplace(token, id);
    return id;
}

std::int64_t Vocabulary::lookup(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
    return token_to_id_.find(token) != token_to_id_.end();
}

const std::string& Vocabulary::token(std::int64_t id) const {
    if (id < 0 || id >= size()) {
        throw std::out_of_range("Vocabulary: id " + std::to_string(id) + " out of [0," +
                                std::to_string(size()) + ")");
    }
    return id_to_token_[static_cast<std::size_t>(id)];
}

void Vocabulary::save_tsv(std::ostream& os) const {
    for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
        os << id_to_token_[i] << '\t' << i << '\n';
    }
}

Vocabulary Vocabulary::load_tsv(std::istream& is) {
    std::string line;
    std::vector<std::string> tokens;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError("vocabulary line " + std::to_string(line_no) + ": missing tab");
        }
        const std::string tok = line.substr(0, tab);
        const std::int64_t id = std::stoll(line.substr(tab + 1));
        if (id != static_cast<std::int64_t>(tokens.size())) {
            throw DataError("vocabulary line " + std::to_string(line_no) +
                            ": ids not dense (got " + std::to_string(id) + ")");
        }
        tokens.push_back(tok);
    }
    if (tokens.empty()) throw DataError("vocabulary file is empty");
    Vocabulary v(tokens.front());
    for (std::size_t i = 1; i < tokens.size(); ++i) v.add(tokens[i]);
    return v;
}

}  // namespace pathrel
