#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pathrel/embeddings.hpp"
#include "pathrel/nn.hpp"
#include "pathrel/rng.hpp"
#include "pathrel/tensor.hpp"
#include "pathrel/triples.hpp"

namespace pathrel {

// Draws lexicon path ids with probability proportional to count^0.75, id 0
// (the empty path) excluded.
class NegativeSampler {
public:
    NegativeSampler(const PathLexicon& lexicon, std::int64_t n);

    std::int64_t sample_count() const { return n_; }
    // cumulative distribution over ids 1..L-1; back() == 1 within 1e-12
    const std::vector<double>& cumulative() const { return cdf_; }
    double probability(std::int64_t id) const;

    std::int64_t draw(Rng& rng) const;
    // Fresh negative avoiding `positive`; re-drawn on collision up to 10
    // times, then kept.
    std::int64_t draw_avoiding(Rng& rng, std::int64_t positive) const;

private:
    std::vector<double> cdf_;
    std::int64_t n_ = 0;
};

struct PairPathConfig {
    std::int64_t hidden_dim = 100;  // width of h, h~, and v_path
    std::int64_t word_dim = 50;
    std::uint64_t seed = 0;
    std::int64_t trained_epochs = 0;       // training metadata, kept in the model file
    double final_objective_estimate = 0.0;
};

struct TrainingRunConfig {
    std::int64_t epochs = 5;
    std::int64_t minibatch = 100;
    double lr = 0.001;
    std::int64_t negatives = 5;
    std::uint64_t seed = 0;
};

struct EpochLogEntry {
    std::int64_t epoch = 0;            // 0 = before any update
    double objective_estimate = 0.0;   // mean per-triple objective on a fixed subsample
};

// Word-pair encoder with a path-embedding table: two tanh layers over the
// concatenated (frozen) word vectors give the pair representation, and the
// dot product with a path embedding scores the co-occurrence.
struct PairPathModel {
    PairPathConfig config;
    EmbeddingTable word_table;  // frozen
    Parameter w1;               // [hidden, 2*word_dim]
    Parameter b1;               // [hidden]
    Parameter w2;               // [hidden, hidden]
    Parameter b2;               // [hidden]
    EmbeddingTable path_table;  // trainable, rows follow the lexicon ids
    PathLexicon lexicon;

    static PairPathModel init(EmbeddingTable word_table, PathLexicon lexicon,
                              std::int64_t hidden_dim, std::uint64_t seed);

    // h~ = tanh(W2 tanh(W1 [v_w1; v_w2] + b1) + b2); out-of-table words use
    // the UNK row.
    Tensor pair_repr(const std::string& word1, const std::string& word2) const;
    Tensor pair_repr_ids(std::int64_t id1, std::int64_t id2) const;

    // sigmoid(v_path . h~), in (0,1). Unknown path is an error.
    double score(const std::string& word1, const std::string& word2,
                 const std::string& path) const;
    double score_id(const Tensor& pair_rep, std::int64_t path_id) const;

    // [h~(w1,w2); h~(w2,w1)], dimension 2*hidden.
    Tensor pseudo_path_features(const std::string& word1, const std::string& word2) const;

    struct ScoredPath {
        std::string path;
        double score = 0.0;
    };
    // Top-k lexicon paths (empty path excluded) for (X=w1, Y=w2), then top-k
    // for (X=w2, Y=w1) with each path mirror-transformed back to w1-first
    // orientation. Scores descend within each half; ties break by lexicon id.
    std::vector<ScoredPath> predict_top_paths(const std::string& word1,
                                              const std::string& word2,
                                              std::int64_t k) const;

    void save(const std::string& path) const;
    static PairPathModel load(const std::string& path);

    // Embeds this model into an existing container under a tensor-name /
    // header-key prefix (used by classifier files that freeze a copy).
    void embed_into(struct ModelFile& file, const std::string& prefix) const;
    static PairPathModel extract_from(const struct ModelFile& file, const std::string& prefix);
};

// Maximizes the negative-sampling log likelihood over in-lexicon triples whose
// words are both in the word table, by minibatch Adam. A triple with count c
// contributes c positive instances per epoch, each drawing `negatives` fresh
// samples. Returns the per-epoch objective log (entry 0 = before training).
std::vector<EpochLogEntry> train_unsupervised(PairPathModel& model,
                                              const TripleStore& store,
                                              const TrainingRunConfig& cfg);

// Per-triple loss and parameter gradients for one (w1, w2, path, negatives)
// instance; exposed for gradient checking. Accumulates into parameter grads
// scaled by `grad_scale` and returns the loss.
double pairpath_instance_backward(PairPathModel& model, std::int64_t word1_id,
                                  std::int64_t word2_id, std::int64_t path_id,
                                  const std::vector<std::int64_t>& negative_ids,
                                  double grad_scale);

}  // namespace pathrel
