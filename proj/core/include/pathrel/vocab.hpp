#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace pathrel {

// Dense bidirectional string<->id map. Id 0 is reserved for the UNK token;
// lookups of unknown strings return 0.
class Vocabulary {
public:
    static constexpr std::int64_t kUnkId = 0;

    explicit Vocabulary(std::string unk_token = "<unk>");

    // Returns the existing id or inserts the token at the next dense id.
    std::int64_t add(const std::string& token);
    std::int64_t lookup(const std::string& token) const;
    bool contains(const std::string& token) const;
    const std::string& token(std::int64_t id) const;
    std::int64_t size() const { return static_cast<std::int64_t>(id_to_token_.size()); }
    const std::string& unk_token() const { return id_to_token_.front(); }

    // TSV: token<TAB>id, one line per entry including UNK, in id order.
    void save_tsv(std::ostream& os) const;
    static Vocabulary load_tsv(std::istream& is);

    bool operator==(const Vocabulary& o) const { return id_to_token_ == o.id_to_token_; }

private:
    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, std::int64_t> token_to_id_;
};

}  // namespace pathrel
