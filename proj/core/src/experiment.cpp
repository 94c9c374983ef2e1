#include "pathrel/experiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pathrel/conllu.hpp"
#include "pathrel/embeddings.hpp"
#include "pathrel/triples.hpp"

namespace fs = std::filesystem;

namespace pathrel {

std::string ClassifierSpec::display_name() const {
    std::string n;
    switch (arch) {
        case Arch::Npb: n = "NPB"; break;
        case Arch::LexNet: n = "LexNET"; break;
        case Arch::LexNetH: n = "LexNET_h"; break;
    }
    if (aug) n += "+Aug";
    if (rep) n += "+Rep";
    // pseudo-path features on the path-only model go beyond the usual setup
    if (arch == Arch::Npb && rep) n += " (extension)";
    return n;
}

std::string ClassifierSpec::file_stem() const {
    std::string n = arch_name(arch);
    if (aug) n += "_aug";
    if (rep) n += "_rep";
    return n;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.conllu_path = j.at("conllu").get<std::string>();
    cfg.embeddings_path = j.at("embeddings").get<std::string>();
    cfg.embedding_dim = j.value("embedding_dim", std::int64_t{50});
    cfg.dataset_dir = j.at("dataset_dir").get<std::string>();
    cfg.dataset_name = j.value("dataset_name", std::string("dataset"));
    cfg.out_dir = j.at("out_dir").get<std::string>();
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.min_path_count = j.value("min_path_count", std::int64_t{5});
    cfg.max_nodes = j.value("max_nodes", std::int64_t{5});
    cfg.lexicon_cap = j.value("lexicon_cap", std::int64_t{30000});
    cfg.include_propn = j.value("include_propn", false);
    if (j.contains("pairpath")) {
        const auto& p = j.at("pairpath");
        cfg.pairpath_dim = p.value("dim", std::int64_t{100});
        cfg.pairpath_epochs = p.value("epochs", std::int64_t{5});
        cfg.pairpath_batch = p.value("batch", std::int64_t{100});
        cfg.pairpath_lr = p.value("lr", 0.001);
        cfg.pairpath_negatives = p.value("neg", std::int64_t{5});
    }
    for (const auto& c : j.at("classifiers")) {
        ClassifierSpec spec;
        spec.arch = parse_arch(c.at("arch").get<std::string>());
        spec.aug = c.value("aug", false);
        spec.rep = c.value("rep", false);
        cfg.classifiers.push_back(spec);
    }
    if (j.contains("supervised")) {
        const auto& s = j.at("supervised");
        cfg.supervised.lr = s.value("lr", 0.001);
        cfg.supervised.minibatch = s.value("minibatch", std::int64_t{100});
        cfg.supervised.patience = s.value("patience", std::int64_t{7});
        cfg.supervised.max_epochs = s.value("max_epochs", std::int64_t{100});
        if (s.contains("dropout_grid")) {
            cfg.supervised.dropout_grid = s.at("dropout_grid").get<std::vector<double>>();
        }
        if (s.contains("k_grid")) {
            cfg.supervised.aug_k_grid = s.at("k_grid").get<std::vector<std::int64_t>>();
        }
    }
    cfg.supervised.seed = cfg.seed;
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open experiment config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed experiment config " + path + ": " + e.what());
    }
    return from_json(j);
}

std::vector<ParsedSentence> load_conllu_path(const std::string& path, ConlluStats* stats) {
    std::vector<std::string> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.path().extension() == ".conllu") files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw DataError("no .conllu files under " + path);
    } else if (fs::exists(path)) {
        files.push_back(path);
    } else {
        throw DataError("missing corpus input: " + path);
    }
    std::vector<ParsedSentence> sentences;
    ConlluStats total;
    for (const std::string& f : files) {
        std::ifstream in(f);
        if (!in) throw DataError("cannot open " + f);
        ConlluStats st;
        auto part = parse_conllu_all(in, &st);
        total.sentences += st.sentences;
        total.malformed_skipped += st.malformed_skipped;
        sentences.insert(sentences.end(), std::make_move_iterator(part.begin()),
                         std::make_move_iterator(part.end()));
    }
    if (stats) *stats = total;
    return sentences;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path);
    os << text;
}

std::int64_t coverage_with_paths(const TripleStore& store, const DatasetSplits& splits) {
    std::int64_t with = 0;
    for (const RelationDataset* split : {&splits.train, &splits.val, &splits.test}) {
        for (const RelationInstance& inst : split->instances) {
            if (!store.lookup_pair(inst.w1, inst.w2).empty()) ++with;
        }
    }
    return with;
}

std::int64_t total_instances(const DatasetSplits& splits) {
    return static_cast<std::int64_t>(splits.train.instances.size() +
                                     splits.val.instances.size() +
                                     splits.test.instances.size());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (!fs::exists(cfg.out_dir)) {
        throw DataError("missing output directory: " + cfg.out_dir);
    }
    for (const std::string& in : {cfg.conllu_path, cfg.embeddings_path, cfg.dataset_dir}) {
        if (!fs::exists(in)) throw DataError("missing input: " + in);
    }

    ConlluStats parse_stats;
    std::vector<ParsedSentence> corpus = load_conllu_path(cfg.conllu_path, &parse_stats);
    Vocabulary noun_vocab = build_vocab(corpus, 1, /*noun_only=*/true, cfg.include_propn);
    TripleStore raw = extract_triples(corpus, noun_vocab, cfg.max_nodes, cfg.include_propn);
    PruneResult pruned = prune(raw, cfg.min_path_count, cfg.lexicon_cap);
    {
        std::ostringstream os;
        pruned.store.save_tsv(os);
        write_text(cfg.out_dir + "/triples.tsv", os.str());
    }
    {
        std::ostringstream os;
        pruned.lexicon.save_tsv(os);
        write_text(cfg.out_dir + "/lexicon.tsv", os.str());
    }

    EmbeddingTable pretrained = load_embeddings_file(cfg.embeddings_path, cfg.embedding_dim);
    DatasetSplits splits = load_dataset_dir(cfg.dataset_dir, cfg.dataset_name);

    const bool needs_pairpath =
        std::any_of(cfg.classifiers.begin(), cfg.classifiers.end(),
                    [](const ClassifierSpec& s) { return s.aug || s.rep; });
    std::shared_ptr<const PairPathModel> pairpath;
    std::string pairpath_log_text;
    if (needs_pairpath) {
        PairPathModel model =
            PairPathModel::init(pretrained, pruned.lexicon, cfg.pairpath_dim, cfg.seed);
        TrainingRunConfig tc;
        tc.epochs = cfg.pairpath_epochs;
        tc.minibatch = cfg.pairpath_batch;
        tc.lr = cfg.pairpath_lr;
        tc.negatives = cfg.pairpath_negatives;
        tc.seed = cfg.seed;
        auto log = train_unsupervised(model, pruned.store, tc);
        std::ostringstream os;
        char buf[96];
        for (const auto& entry : log) {
            std::snprintf(buf, sizeof buf, "epoch\t%lld\tobjective\t%.6f\n",
                          static_cast<long long>(entry.epoch), entry.objective_estimate);
            os << buf;
        }
        pairpath_log_text = os.str();
        write_text(cfg.out_dir + "/pairpath.log", pairpath_log_text);
        model.save(cfg.out_dir + "/pairpath.model");
        pairpath = std::make_shared<const PairPathModel>(std::move(model));
    }

    ExperimentResult result;
    std::ostringstream report;
    report << "dataset\t" << cfg.dataset_name << "\n";
    report << "sentences\t" << parse_stats.sentences << "\tmalformed_skipped\t"
           << parse_stats.malformed_skipped << "\n";
    const std::int64_t instances = total_instances(splits);
    const std::int64_t with_paths = coverage_with_paths(pruned.store, splits);
    report << "coverage\t" << format_coverage(instances, with_paths) << "\n\n";
    report << "model\t" << cfg.dataset_name << "\n";

    std::ostringstream details;
    for (const ClassifierSpec& spec : cfg.classifiers) {
        ClassifierConfig base;
        base.arch = spec.arch;
        base.use_aug = spec.aug;
        base.use_rep = spec.rep;
        base.edge.lemma_dim = cfg.embedding_dim;
        base.word_dim = cfg.embedding_dim;

        SupervisedTrainConfig sup = cfg.supervised;
        TrainResult trained = train_supervised(base, splits, pruned.store, &pretrained,
                                               (spec.aug || spec.rep) ? pairpath : nullptr, sup);
        trained.model.save(cfg.out_dir + "/" + spec.file_stem() + ".model");
        write_text(cfg.out_dir + "/" + spec.file_stem() + ".tuning.tsv",
                   format_tuning_report(trained.report));

        auto test_ex = prepare_examples(trained.model, splits.test, pruned.store);
        EvalReport eval = evaluate_split(trained.model, test_ex, splits.labels);

        char buf[96];
        std::snprintf(buf, sizeof buf, "%s\t%.4f\n", spec.display_name().c_str(),
                      eval.weighted_f1);
        report << buf;
        details << "== " << spec.display_name() << " (test) ==\n" << eval.format() << "\n";
        result.rows.emplace_back(spec.display_name(), std::move(eval));
    }

    report << "\n" << details.str();
    result.report_text = report.str();
    write_text(cfg.out_dir + "/report.txt", result.report_text);
    return result;
}

std::vector<std::array<std::string, 3>> load_pair_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open pair file: " + path);
    std::vector<std::array<std::string, 3>> out;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t t1 = line.find('\t');
        const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            throw DataError(path + " line " + std::to_string(line_no) + ": expected 3 columns");
        }
        std::array<std::string, 3> row = {line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                                          line.substr(t2 + 1)};
        for (int i = 0; i < 2; ++i) {
            std::transform(row[static_cast<std::size_t>(i)].begin(),
                           row[static_cast<std::size_t>(i)].end(),
                           row[static_cast<std::size_t>(i)].begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        }
        out.push_back(std::move(row));
    }
    if (out.empty()) throw DataError("pair file is empty: " + path);
    return out;
}

void export_pair_vectors(const PairPathModel& model,
                         const std::vector<std::array<std::string, 3>>& pairs,
                         ExportKind kind, std::ostream& os) {
    char buf[32];
    for (const auto& [w1, w2, label] : pairs) {
        os << w1 << '\t' << w2 << '\t' << label;
        Tensor v;
        if (kind == ExportKind::PseudoPath) {
            v = model.pseudo_path_features(w1, w2);
        } else {
            v = Tensor::zeros({2 * model.config.word_dim});
            model.word_table.copy_row_into(model.word_table.vocab.lookup(w1), v, 0);
            model.word_table.copy_row_into(model.word_table.vocab.lookup(w2), v,
                                           model.config.word_dim);
        }
        for (std::int64_t k = 0; k < v.numel(); ++k) {
            std::snprintf(buf, sizeof buf, "%.6f", v.at(k));
            os << '\t' << buf;
        }
        os << '\n';
    }
}

}  // namespace pathrel
