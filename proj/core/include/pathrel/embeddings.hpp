#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "pathrel/tensor.hpp"
#include "pathrel/vocab.hpp"

namespace pathrel {

// Word-vector table keyed by a Vocabulary. Row 0 is the UNK row. Trainable
// tables carry live gradient/Adam state in `rows`; frozen tables never touch
// it.
struct EmbeddingTable {
    Vocabulary vocab;
    std::int64_t dim = 0;
    Parameter rows;  // value shape [vocab.size(), dim]
    bool trainable = false;

    EmbeddingTable() = default;
    EmbeddingTable(Vocabulary vocab, Tensor matrix, bool trainable);

    const Tensor& matrix() const { return rows.value; }
    std::int64_t size() const { return vocab.size(); }

    // Row for the token, UNK row when absent.
    Tensor lookup(const std::string& token) const;
    Tensor lookup_id(std::int64_t id) const;
    void copy_row_into(std::int64_t id, Tensor& dst, std::int64_t offset) const;
};

struct EmbeddingLoadStats {
    std::int64_t loaded = 0;
    std::int64_t duplicates_skipped = 0;
};

// Text format: one line per word, `token v1 v2 ... v_dim` space-separated.
// Builds a table of size loaded+1; row 0 (UNK) is the componentwise mean of
// all loaded vectors. Duplicate words keep the first occurrence. A line whose
// float count differs from expected_dim is fatal, naming the line number.
EmbeddingTable load_embeddings(std::istream& in, std::int64_t expected_dim,
                               EmbeddingLoadStats* stats = nullptr);
EmbeddingTable load_embeddings_file(const std::string& path, std::int64_t expected_dim,
                                    EmbeddingLoadStats* stats = nullptr);

}  // namespace pathrel
