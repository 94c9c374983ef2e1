#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathrel/dataset.hpp"
#include "pathrel/embeddings.hpp"
#include "pathrel/lstm.hpp"
#include "pathrel/metrics.hpp"
#include "pathrel/pairpath.hpp"
#include "pathrel/triples.hpp"

namespace pathrel {

enum class Arch { Npb, LexNet, LexNetH };

std::string arch_name(Arch a);
Arch parse_arch(const std::string& name);

struct EdgeEmbedderConfig {
    std::int64_t lemma_dim = 50;
    std::int64_t pos_dim = 4;
    std::int64_t deprel_dim = 5;
    std::int64_t dir_dim = 1;
    std::int64_t edge_dim() const { return lemma_dim + pos_dim + deprel_dim + dir_dim; }
};

// Component ids of one path edge in the embedder's vocabularies.
struct EdgeIds {
    std::int64_t lemma = 0, pos = 0, deprel = 0, dir = 0;
};
using PathIds = std::vector<EdgeIds>;

// Per-component embedding tables for path edges. Every table has its own UNK
// row 0; unknown component strings (including the UNK-* placeholders of the
// empty path) resolve there.
struct EdgeEmbedder {
    EdgeEmbedderConfig config;
    EmbeddingTable lemma, pos, deprel, dir;
    double dropout_rate = 0.0;

    // Vocabularies come from the store's path inventory; lemma rows present in
    // `pretrained` copy those vectors, others draw uniform in [-0.01, 0.01].
    static EdgeEmbedder build(const TripleStore& store, const EmbeddingTable* pretrained,
                              const EdgeEmbedderConfig& cfg, Rng& rng);

    PathIds path_ids(const std::string& canonical) const;

    std::vector<Parameter*> parameters();
};

struct PathEncoder {
    EdgeEmbedder embedder;
    LstmStack lstm;  // input edge_dim, hidden 60

    std::vector<Parameter*> parameters();
};

// Forward tape for one encoded path (training mode keeps dropout masks and
// the LSTM trace for backward).
struct PathForward {
    const PathIds* ids = nullptr;
    double weight = 1.0;
    std::vector<Tensor> component_masks;  // per edge, shape {4}, inverted dropout
    std::vector<Tensor> inputs;           // per edge, assembled vectors
    LstmTrace trace;
    Tensor output;  // o_p
};

// Encodes one path from the zero LSTM state; in train mode each component
// embedding is dropped as a unit with probability dropout_rate (inverted
// scaling), drawing one mask of shape {4} per edge from rng.
Tensor encode_path(const PathEncoder& enc, const PathIds& ids, bool train_mode,
                   Rng* rng = nullptr, PathForward* tape = nullptr);

// Frequency-weighted mean of the encoded path vectors.
Tensor aggregate_paths(const PathEncoder& enc,
                       const std::vector<std::pair<std::string, std::int64_t>>& paths,
                       bool train_mode = false, Rng* rng = nullptr);

struct ClassifierConfig {
    Arch arch = Arch::Npb;
    bool use_aug = false;
    std::int64_t aug_k = 0;
    bool use_rep = false;
    std::int64_t rep_feature_dim = 0;  // 2 * pairpath hidden, set when use_rep
    EdgeEmbedderConfig edge;
    std::int64_t hidden_dim = 60;  // LSTM width and the LexNET_h hidden size
    std::int64_t word_dim = 50;
    std::int64_t num_classes = 0;
    double dropout_rate = 0.0;
    std::vector<std::string> labels;

    std::int64_t rep_dim() const { return use_rep ? rep_feature_dim : 0; }
    std::int64_t concat_dim() const;  // width before the optional hidden layer
    std::int64_t head_input_dim() const;
};

struct RelationClassifier {
    ClassifierConfig config;
    PathEncoder encoder;
    EmbeddingTable word_table;     // LexNET variants; empty for NPB
    Parameter hidden_w, hidden_b;  // LexNET_h only
    Parameter head_w, head_b;
    // frozen pair-path model backing +Aug predictions and +Rep features
    std::shared_ptr<const PairPathModel> pairpath;

    static RelationClassifier init(const ClassifierConfig& cfg, const TripleStore& store,
                                   const EmbeddingTable* pretrained,
                                   const std::vector<std::string>& dataset_words, Rng& rng,
                                   std::shared_ptr<const PairPathModel> pairpath = nullptr);

    std::vector<std::pair<std::string, Parameter*>> named_parameters();
    std::vector<Tensor> snapshot() const;
    void restore(const std::vector<Tensor>& snap);

    void save(const std::string& path) const;
    static RelationClassifier load(const std::string& path);
};

// Class distribution for a pair given its weighted path set (already
// augmented when the classifier uses +Aug). Output sums to 1.
Tensor classifier_forward(const RelationClassifier& clf, const std::string& w1,
                          const std::string& w2,
                          const std::vector<std::pair<std::string, std::int64_t>>& paths,
                          bool train_mode = false, Rng* rng = nullptr);

// paths_for_pair plus the 2k predicted paths at weight 1; the empty-path
// indicator, when present, is retained.
std::vector<std::pair<std::string, std::int64_t>> augmented_paths_for_pair(
    const TripleStore& store, const PairPathModel& model, const std::string& w1,
    const std::string& w2, std::int64_t k);

// Dataset instance with its resolved path set and frozen +Rep features.
struct PreparedExample {
    std::int64_t w1_id = 0, w2_id = 0;  // word_table ids
    std::string w1, w2;
    std::vector<std::pair<std::string, std::int64_t>> paths;
    std::vector<PathIds> path_ids;
    Tensor rep_features;  // [2*pairpath hidden] when use_rep
    std::int64_t label = 0;
    bool has_corpus_paths = false;
};

std::vector<PreparedExample> prepare_examples(const RelationClassifier& clf,
                                              const RelationDataset& split,
                                              const TripleStore& store);

// Forward tape for one example: path tapes plus the aggregation and head
// intermediates needed by the backward pass. Dropout masks are drawn during
// the forward, so one tape serves exactly one gradient step.
struct ExampleTape {
    std::vector<PathForward> paths;
    double weight_total = 0.0;
    Tensor v_paths;        // [H]
    Tensor concat;         // [1, concat_dim] (LexNET variants)
    Tensor hidden_out;     // [1, hidden] post-tanh (LexNET_h)
    Tensor hidden_mask;    // {hidden} dropout mask (LexNET_h, train mode)
    Tensor penultimate;    // [1, head_input]
    Tensor logits;         // [1, C]
};

ExampleTape forward_example(const RelationClassifier& clf, const PreparedExample& ex,
                            bool train_mode, Rng* rng);

// Backward through a tape produced by forward_example(train_mode=true);
// dlogits is this example's [1, C] slice of the batch softmax gradient.
void backward_example(RelationClassifier& clf, const PreparedExample& ex,
                      const ExampleTape& tape, const Tensor& dlogits);

std::int64_t predict_label(const RelationClassifier& clf, const PreparedExample& ex);

EvalReport evaluate_split(const RelationClassifier& clf,
                          const std::vector<PreparedExample>& examples,
                          const std::vector<std::string>& labels);

struct SupervisedTrainConfig {
    double lr = 0.001;
    std::int64_t minibatch = 100;
    std::vector<double> dropout_grid = {0.0, 0.2, 0.4};
    std::int64_t patience = 7;
    std::vector<std::int64_t> aug_k_grid = {1, 3, 5};
    std::int64_t max_epochs = 100;
    std::uint64_t seed = 0;
};

// Tracks the best validation score; signals a stop once `patience` epochs
// pass without strict improvement.
class EarlyStopper {
public:
    explicit EarlyStopper(std::int64_t patience) : patience_(patience) {}
    // returns true when this epoch is a new best
    bool observe(std::int64_t epoch, double score);
    bool should_stop(std::int64_t epoch) const { return epoch - best_epoch_ >= patience_; }
    std::int64_t best_epoch() const { return best_epoch_; }
    double best_score() const { return best_score_; }

private:
    std::int64_t patience_;
    std::int64_t best_epoch_ = 0;
    double best_score_ = -1.0;
};

struct EpochRecord {
    std::int64_t epoch = 0;
    double train_loss = 0.0;
    double val_f1 = 0.0;
    bool is_best = false;
};

struct TuningRow {
    std::string setting;
    double val_f1 = 0.0;
    bool selected = false;
};

struct TrainResult {
    RelationClassifier model;  // best checkpoint of the selected setting
    std::vector<TuningRow> report;
    std::vector<EpochRecord> history;  // of the selected setting
    double best_val_f1 = 0.0;
};

// Grid search over the dropout grid (and the k grid when +Aug) with Adam,
// early stopping on validation weighted-F1 at the configured patience, and
// best-epoch checkpointing. The per-setting rng stream derives from
// (seed, setting index).
TrainResult train_supervised(const ClassifierConfig& base, const DatasetSplits& splits,
                             const TripleStore& store, const EmbeddingTable* pretrained,
                             std::shared_ptr<const PairPathModel> pairpath,
                             const SupervisedTrainConfig& cfg);

// Tuning report TSV `setting<TAB>val_f1<TAB>selected`.
std::string format_tuning_report(const std::vector<TuningRow>& rows);

}  // namespace pathrel
