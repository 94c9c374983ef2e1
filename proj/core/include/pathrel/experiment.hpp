#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathrel/classifier.hpp"
#include "pathrel/dataset.hpp"
#include "pathrel/metrics.hpp"
#include "pathrel/pairpath.hpp"

namespace pathrel {

struct ClassifierSpec {
    Arch arch = Arch::Npb;
    bool aug = false;
    bool rep = false;

    std::string display_name() const;  // NPB, LexNET+Aug, ...
    std::string file_stem() const;     // npb, lexnet_aug, ...
};

struct ExperimentConfig {
    std::string conllu_path;  // .conllu file or a directory of them
    std::string embeddings_path;
    std::int64_t embedding_dim = 50;
    std::string dataset_dir;
    std::string dataset_name = "dataset";
    std::string out_dir;
    std::uint64_t seed = 0;

    std::int64_t min_path_count = 5;
    std::int64_t max_nodes = 5;
    std::int64_t lexicon_cap = 30000;
    bool include_propn = false;

    std::int64_t pairpath_dim = 100;
    std::int64_t pairpath_epochs = 5;
    std::int64_t pairpath_batch = 100;
    double pairpath_lr = 0.001;
    std::int64_t pairpath_negatives = 5;

    std::vector<ClassifierSpec> classifiers;
    SupervisedTrainConfig supervised;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_json_file(const std::string& path);
};

struct ExperimentResult {
    std::vector<std::pair<std::string, EvalReport>> rows;  // display name -> test report
    std::string report_text;  // deterministic; also written to out_dir/report.txt
};

// Full pipeline: parse corpus, build the triple store and lexicon, train the
// unsupervised model when any classifier needs it, then train and evaluate
// each requested classifier. Artifacts (triples.tsv, lexicon.tsv, models,
// tuning reports, report.txt) land in out_dir, which must exist.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

enum class ExportKind { PseudoPath, WordConcat };

// One row per pair: w1<TAB>w2<TAB>label<TAB>v_1..v_D. pseudo_path emits the
// two-orientation pair encoding; word_concat emits the two raw word vectors.
void export_pair_vectors(const PairPathModel& model,
                         const std::vector<std::array<std::string, 3>>& pairs,
                         ExportKind kind, std::ostream& os);

// Raw 3-column pair TSV (w1, w2, label), lowercased, no label validation.
std::vector<std::array<std::string, 3>> load_pair_file(const std::string& path);

// Parses a .conllu file, or every *.conllu under a directory in name order.
std::vector<ParsedSentence> load_conllu_path(const std::string& path, ConlluStats* stats);

}  // namespace pathrel
