#include "pathrel/embeddings.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

namespace pathrel {

EmbeddingTable::EmbeddingTable(Vocabulary vocab_in, Tensor matrix, bool trainable_in) {
    if (matrix.shape.size() != 2 || matrix.rows() != vocab_in.size()) {
        throw std::invalid_argument("EmbeddingTable: matrix " + matrix.shape_str() +
                                    " does not match vocab size " +
                                    std::to_string(vocab_in.size()));
    }
    vocab = std::move(vocab_in);
    dim = matrix.cols();
    rows = Parameter(std::move(matrix));
    trainable = trainable_in;
}

Tensor EmbeddingTable::lookup(const std::string& token) const {
    return lookup_id(vocab.lookup(token));
}

Tensor EmbeddingTable::lookup_id(std::int64_t id) const {
    Tensor out = Tensor::zeros({dim});
    copy_row_into(id, out, 0);
    return out;
}

void EmbeddingTable::copy_row_into(std::int64_t id, Tensor& dst, std::int64_t offset) const {
    if (id < 0 || id >= size()) {
        throw std::out_of_range("EmbeddingTable: row " + std::to_string(id));
    }
    const Real* src = &rows.value.v[static_cast<std::size_t>(id * dim)];
    for (std::int64_t k = 0; k < dim; ++k) dst.at(offset + k) = src[k];
}

EmbeddingTable load_embeddings(std::istream& in, std::int64_t expected_dim,
                               EmbeddingLoadStats* stats) {
    if (expected_dim <= 0) throw std::invalid_argument("load_embeddings: dim must be > 0");
    std::vector<std::string> words;
    std::vector<Real> values;
    EmbeddingLoadStats st;
    Vocabulary vocab;

    std::string line;
    std::int64_t line_no = 0;
    std::vector<Real> row(static_cast<std::size_t>(expected_dim));
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        std::int64_t got = 0;
        double x = 0;
        while (ls >> x) {
            if (got < expected_dim) row[static_cast<std::size_t>(got)] = static_cast<Real>(x);
            ++got;
        }
        if (got != expected_dim) {
            throw DataError("embeddings line " + std::to_string(line_no) + ": expected " +
                            std::to_string(expected_dim) + " floats, got " +
                            std::to_string(got));
        }
        if (vocab.contains(word)) {
            ++st.duplicates_skipped;
            continue;
        }
        vocab.add(word);
        words.push_back(word);
        values.insert(values.end(), row.begin(), row.end());
        ++st.loaded;
    }
    if (in.bad()) throw DataError("I/O failure while reading embeddings");
    if (st.loaded == 0) throw DataError("embeddings file contains no vectors");

    Tensor matrix = Tensor::zeros({st.loaded + 1, expected_dim});
    // row 0 = UNK = mean of loaded rows
    for (std::int64_t i = 0; i < st.loaded; ++i) {
        for (std::int64_t k = 0; k < expected_dim; ++k) {
            const Real x = values[static_cast<std::size_t>(i * expected_dim + k)];
            matrix.at(i + 1, k) = x;
            matrix.at(0, k) += x;
        }
    }
    for (std::int64_t k = 0; k < expected_dim; ++k) {
        matrix.at(0, k) /= static_cast<Real>(st.loaded);
    }
    check_finite(matrix, "embeddings matrix");
    if (stats) *stats = st;
    return EmbeddingTable(std::move(vocab), std::move(matrix), /*trainable=*/false);
}

EmbeddingTable load_embeddings_file(const std::string& path, std::int64_t expected_dim,
                                    EmbeddingLoadStats* stats) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open embeddings file: " + path);
    return load_embeddings(f, expected_dim, stats);
}

}  // namespace pathrel
