// pathrel: corpus-to-classifier pipeline for path-based lexical relation
// detection. Subcommands cover triple extraction, lexicon construction,
// unsupervised pair-path training, path prediction, supervised classifier
// training, evaluation, vector export, and whole-experiment orchestration.
// Exit codes: 0 success, 1 usage error, 2 data error.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "pathrel/classifier.hpp"
#include "pathrel/conllu.hpp"
#include "pathrel/embeddings.hpp"
#include "pathrel/experiment.hpp"
#include "pathrel/pairpath.hpp"
#include "pathrel/triples.hpp"

namespace fs = std::filesystem;
using namespace pathrel;

namespace {

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path);
    os << text;
    if (!os) throw DataError("I/O failure writing " + path);
}

TripleStore load_triples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open triples file: " + path);
    return TripleStore::load_tsv(in);
}

PathLexicon load_lexicon_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon file: " + path);
    return PathLexicon::load_tsv(in);
}

int run_extract_triples(const std::string& conllu, const std::string& out,
                        std::int64_t min_count, std::int64_t max_nodes, bool include_propn) {
    ConlluStats stats;
    std::vector<ParsedSentence> corpus = load_conllu_path(conllu, &stats);
    Vocabulary vocab = build_vocab(corpus, 1, /*noun_only=*/true, include_propn);
    TripleStore raw = extract_triples(corpus, vocab, max_nodes, include_propn);
    PruneResult pruned = prune(raw, min_count, std::numeric_limits<std::int64_t>::max());
    std::ostringstream os;
    pruned.store.save_tsv(os);
    write_text_file(out, os.str());
    std::cerr << "sentences " << stats.sentences << ", malformed skipped "
              << stats.malformed_skipped << ", triples " << pruned.store.size() << "\n";
    return 0;
}

int run_build_lexicon(const std::string& triples, std::int64_t cap, const std::string& out) {
    TripleStore store = load_triples_file(triples);
    PruneResult pruned = prune(store, 1, cap);
    std::ostringstream os;
    pruned.lexicon.save_tsv(os);
    write_text_file(out, os.str());
    std::cerr << "lexicon size " << pruned.lexicon.size() << " (incl. empty path)\n";
    return 0;
}

int run_train_pairpath(const std::string& triples, const std::string& lexicon,
                       const std::string& embeddings, std::int64_t emb_dim, std::int64_t dim,
                       std::int64_t neg, std::int64_t epochs, std::int64_t batch, double lr,
                       std::uint64_t seed, const std::string& out) {
    TripleStore store = load_triples_file(triples);
    PathLexicon lex = load_lexicon_file(lexicon);
    EmbeddingTable words = load_embeddings_file(embeddings, emb_dim);
    PairPathModel model = PairPathModel::init(std::move(words), std::move(lex), dim, seed);
    TrainingRunConfig cfg;
    cfg.epochs = epochs;
    cfg.minibatch = batch;
    cfg.lr = lr;
    cfg.negatives = neg;
    cfg.seed = seed;
    auto log = train_unsupervised(model, store, cfg);
    for (const auto& e : log) {
        std::fprintf(stderr, "epoch %lld objective %.6f\n", static_cast<long long>(e.epoch),
                     e.objective_estimate);
    }
    model.save(out);
    return 0;
}

int run_predict_paths(const std::string& model_path, const std::string& w1,
                      const std::string& w2, std::int64_t k) {
    PairPathModel model = PairPathModel::load(model_path);
    auto scored = model.predict_top_paths(w1, w2, k);
    for (std::size_t rank = 0; rank < scored.size(); ++rank) {
        std::printf("%zu\t%s\t%.6f\n", rank + 1, scored[rank].path.c_str(),
                    scored[rank].score);
    }
    return 0;
}

int run_train_classifier(const std::string& arch, bool aug, bool rep,
                         const std::string& dataset_dir, const std::string& triples,
                         const std::string& embeddings, std::int64_t emb_dim,
                         const std::string& pairpath_path, std::uint64_t seed,
                         const std::string& out, const std::string& report_out,
                         std::vector<double> dropout_grid, std::vector<std::int64_t> k_grid,
                         std::int64_t patience, std::int64_t max_epochs,
                         std::int64_t minibatch, double lr) {
    TripleStore store = load_triples_file(triples);
    EmbeddingTable pretrained = load_embeddings_file(embeddings, emb_dim);
    DatasetSplits splits = load_dataset_dir(dataset_dir);

    std::shared_ptr<const PairPathModel> pairpath;
    if (aug || rep) {
        if (pairpath_path.empty()) {
            throw CLI::ValidationError("--pairpath", "required with --aug/--rep");
        }
        pairpath = std::make_shared<const PairPathModel>(PairPathModel::load(pairpath_path));
    }

    ClassifierConfig base;
    base.arch = parse_arch(arch);
    base.use_aug = aug;
    base.use_rep = rep;
    base.edge.lemma_dim = emb_dim;
    base.word_dim = emb_dim;

    SupervisedTrainConfig cfg;
    cfg.seed = seed;
    cfg.lr = lr;
    cfg.minibatch = minibatch;
    cfg.patience = patience;
    cfg.max_epochs = max_epochs;
    if (!dropout_grid.empty()) cfg.dropout_grid = std::move(dropout_grid);
    if (!k_grid.empty()) cfg.aug_k_grid = std::move(k_grid);

    TrainResult result = train_supervised(base, splits, store, &pretrained, pairpath, cfg);
    result.model.save(out);
    const std::string tsv = format_tuning_report(result.report);
    if (!report_out.empty()) write_text_file(report_out, tsv);
    std::cerr << tsv;
    std::fprintf(stderr, "best validation weighted F1: %.4f\n", result.best_val_f1);
    return 0;
}

int run_evaluate(const std::string& model_path, const std::string& split,
                 const std::string& dataset_dir, const std::string& triples,
                 const std::string& out) {
    RelationClassifier clf = RelationClassifier::load(model_path);
    TripleStore store = load_triples_file(triples);
    DatasetSplits splits = load_dataset_dir(dataset_dir);
    const RelationDataset* ds = nullptr;
    if (split == "train") {
        ds = &splits.train;
    } else if (split == "val") {
        ds = &splits.val;
    } else if (split == "test") {
        ds = &splits.test;
    } else {
        throw CLI::ValidationError("--split", "must be train, val, or test");
    }
    auto examples = prepare_examples(clf, *ds, store);
    EvalReport report = evaluate_split(clf, examples, splits.labels);
    const std::string text = report.format();
    std::cout << text;
    if (!out.empty()) write_text_file(out, text);
    return 0;
}

int run_export_pairs(const std::string& model_path, const std::string& pairs_path,
                     const std::string& kind, const std::string& out) {
    PairPathModel model = PairPathModel::load(model_path);
    auto pairs = load_pair_file(pairs_path);
    ExportKind ek;
    if (kind == "pseudo_path") {
        ek = ExportKind::PseudoPath;
    } else if (kind == "word_concat") {
        ek = ExportKind::WordConcat;
    } else {
        throw CLI::ValidationError("--kind", "must be pseudo_path or word_concat");
    }
    if (out.empty()) {
        export_pair_vectors(model, pairs, ek, std::cout);
    } else {
        std::ofstream os(out, std::ios::binary);
        if (!os) throw DataError("cannot write " + out);
        export_pair_vectors(model, pairs, ek, os);
    }
    return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_dir) {
    ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    fs::create_directories(cfg.out_dir);
    ExperimentResult result = run_experiment(cfg);
    std::cout << result.report_text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"path-based lexical relation toolkit"};
    app.require_subcommand(1);

    // extract-triples
    std::string conllu, out_triples;
    std::int64_t min_count = 5, max_nodes = 5;
    bool include_propn = false;
    auto* extract = app.add_subcommand("extract-triples",
                                       "extract (w1, w2, path) triples from CoNLL-U input");
    extract->add_option("--conllu", conllu, "CoNLL-U file or directory")->required();
    extract->add_option("--out", out_triples, "output triples TSV")->required();
    extract->add_option("--min-count", min_count, "minimum total path count");
    extract->add_option("--max-nodes", max_nodes, "maximum nodes on a path");
    extract->add_flag("--include-propn", include_propn, "treat PROPN as nouns");

    // build-lexicon
    std::string lex_triples, lex_out = "lexicon.tsv";
    std::int64_t cap = 30000;
    auto* lexicon = app.add_subcommand("build-lexicon",
                                       "rank paths by frequency and build the path lexicon");
    lexicon->add_option("--triples", lex_triples, "triples TSV")->required();
    lexicon->add_option("--cap", cap, "maximum lexicon size");
    lexicon->add_option("--out", lex_out, "output lexicon TSV");

    // train-pairpath
    std::string pp_triples, pp_lexicon, pp_embeddings, pp_out = "pairpath.model";
    std::int64_t pp_dim = 100, pp_neg = 5, pp_epochs = 5, pp_batch = 100, pp_emb_dim = 50;
    double pp_lr = 0.001;
    std::uint64_t pp_seed = 0;
    auto* trainpp = app.add_subcommand("train-pairpath",
                                       "train the unsupervised path-plausibility model");
    trainpp->add_option("--triples", pp_triples, "triples TSV")->required();
    trainpp->add_option("--lexicon", pp_lexicon, "lexicon TSV")->required();
    trainpp->add_option("--embeddings", pp_embeddings, "pretrained word vectors")->required();
    trainpp->add_option("--emb-dim", pp_emb_dim, "word vector width");
    trainpp->add_option("--dim", pp_dim, "pair/path representation width");
    trainpp->add_option("--neg", pp_neg, "negative samples per positive");
    trainpp->add_option("--epochs", pp_epochs, "training epochs");
    trainpp->add_option("--batch", pp_batch, "minibatch size");
    trainpp->add_option("--lr", pp_lr, "Adam learning rate");
    trainpp->add_option("--seed", pp_seed, "random seed");
    trainpp->add_option("--out", pp_out, "output model file");

    // predict-paths
    std::string pr_model, pr_w1, pr_w2;
    std::int64_t pr_k = 3;
    auto* predict = app.add_subcommand("predict-paths",
                                       "print the 2k most plausible paths for a word pair");
    predict->add_option("--model", pr_model, "pair-path model file")->required();
    predict->add_option("--w1", pr_w1, "first word")->required();
    predict->add_option("--w2", pr_w2, "second word")->required();
    predict->add_option("--k", pr_k, "paths per orientation");

    // train-classifier
    std::string tc_arch, tc_dataset, tc_triples, tc_embeddings, tc_pairpath;
    std::string tc_out = "classifier.model", tc_report;
    bool tc_aug = false, tc_rep = false;
    std::uint64_t tc_seed = 0;
    std::int64_t tc_emb_dim = 50, tc_patience = 7, tc_max_epochs = 100, tc_minibatch = 100;
    double tc_lr = 0.001;
    std::vector<double> tc_dropout_grid;
    std::vector<std::int64_t> tc_k_grid;
    auto* trainclf = app.add_subcommand("train-classifier",
                                        "train a supervised relation classifier");
    trainclf->add_option("--arch", tc_arch, "npb | lexnet | lexnet_h")
        ->required()
        ->check(CLI::IsMember({"npb", "lexnet", "lexnet_h"}));
    trainclf->add_flag("--aug", tc_aug, "augment path sets with predicted paths");
    trainclf->add_flag("--rep", tc_rep, "append frozen pseudo-path features");
    trainclf->add_option("--dataset-dir", tc_dataset, "dataset directory")->required();
    trainclf->add_option("--triples", tc_triples, "triples TSV")->required();
    trainclf->add_option("--embeddings", tc_embeddings, "pretrained word vectors")->required();
    trainclf->add_option("--emb-dim", tc_emb_dim, "word vector width");
    trainclf->add_option("--pairpath", tc_pairpath, "pair-path model (for --aug/--rep)");
    trainclf->add_option("--seed", tc_seed, "random seed");
    trainclf->add_option("--out", tc_out, "output model file");
    trainclf->add_option("--tuning-report", tc_report, "tuning report TSV path");
    trainclf->add_option("--dropout-grid", tc_dropout_grid, "dropout rates to tune over");
    trainclf->add_option("--k-grid", tc_k_grid, "augmentation k values to tune over");
    trainclf->add_option("--patience", tc_patience, "early-stopping patience");
    trainclf->add_option("--max-epochs", tc_max_epochs, "epoch cap");
    trainclf->add_option("--minibatch", tc_minibatch, "minibatch size");
    trainclf->add_option("--lr", tc_lr, "Adam learning rate");

    // evaluate
    std::string ev_model, ev_split = "test", ev_dataset, ev_triples, ev_out;
    auto* evaluate = app.add_subcommand("evaluate", "evaluate a trained classifier on a split");
    evaluate->add_option("--model", ev_model, "classifier model file")->required();
    evaluate->add_option("--split", ev_split, "train | val | test");
    evaluate->add_option("--dataset-dir", ev_dataset, "dataset directory")->required();
    evaluate->add_option("--triples", ev_triples, "triples TSV")->required();
    evaluate->add_option("--out", ev_out, "also write the report here");

    // export-pairs
    std::string ex_model, ex_pairs, ex_kind = "pseudo_path", ex_out;
    auto* exportp = app.add_subcommand("export-pairs", "export word-pair vectors as TSV");
    exportp->add_option("--model", ex_model, "pair-path model file")->required();
    exportp->add_option("--pairs", ex_pairs, "pair TSV (w1, w2, label)")->required();
    exportp->add_option("--kind", ex_kind, "pseudo_path | word_concat");
    exportp->add_option("--out", ex_out, "output TSV (stdout when omitted)");

    // run-experiment
    std::string rx_config, rx_out_dir;
    auto* runex = app.add_subcommand("run-experiment",
                                     "run the full extract/train/evaluate pipeline");
    runex->add_option("--config", rx_config, "experiment config JSON")->required();
    runex->add_option("--out-dir", rx_out_dir, "override the config's output directory");

    try {
        app.parse(argc, argv);
        if (extract->parsed()) {
            return run_extract_triples(conllu, out_triples, min_count, max_nodes, include_propn);
        }
        if (lexicon->parsed()) return run_build_lexicon(lex_triples, cap, lex_out);
        if (trainpp->parsed()) {
            return run_train_pairpath(pp_triples, pp_lexicon, pp_embeddings, pp_emb_dim, pp_dim,
                                      pp_neg, pp_epochs, pp_batch, pp_lr, pp_seed, pp_out);
        }
        if (predict->parsed()) return run_predict_paths(pr_model, pr_w1, pr_w2, pr_k);
        if (trainclf->parsed()) {
            return run_train_classifier(tc_arch, tc_aug, tc_rep, tc_dataset, tc_triples,
                                        tc_embeddings, tc_emb_dim, tc_pairpath, tc_seed, tc_out,
                                        tc_report, tc_dropout_grid, tc_k_grid, tc_patience,
                                        tc_max_epochs, tc_minibatch, tc_lr);
        }
        if (evaluate->parsed()) {
            return run_evaluate(ev_model, ev_split, ev_dataset, ev_triples, ev_out);
        }
        if (exportp->parsed()) return run_export_pairs(ex_model, ex_pairs, ex_kind, ex_out);
        if (runex->parsed()) return run_experiment_cmd(rx_config, rx_out_dir);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
