#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pathrel/dataset.hpp"
#include "pathrel/experiment.hpp"
#include "pathrel/metrics.hpp"
#include "pathrel/model_io.hpp"
#include "support/synthetic.hpp"

using namespace pathrel;
namespace fs = std::filesystem;

namespace {

// independent oracle: full confusion matrix, per-class scores from row/column
// sums rather than running tp/fp/fn counters
double oracle_weighted_f1(const std::vector<std::int64_t>& gold,
                          const std::vector<std::int64_t>& pred, std::int64_t classes) {
    std::vector<std::vector<std::int64_t>> m(static_cast<std::size_t>(classes),
                                             std::vector<std::int64_t>(
                                                 static_cast<std::size_t>(classes), 0));
    for (std::size_t i = 0; i < gold.size(); ++i) {
        m[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(pred[i])] += 1;
    }
    double weighted = 0.0;
    for (std::int64_t c = 0; c < classes; ++c) {
        std::int64_t row = 0, col = 0;
        for (std::int64_t k = 0; k < classes; ++k) {
            row += m[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
            col += m[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
        }
        const std::int64_t diag = m[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        const double p = col == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(col);
        const double r = row == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(row);
        const double f1 = (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
        weighted += static_cast<double>(row) * f1;
    }
    return weighted / static_cast<double>(gold.size());
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / name;
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

}  // namespace

TEST_CASE("weighted f1 hand cases") {
    // perfect predictions
    EvalReport perfect = weighted_f1({0, 1, 2, 1}, {0, 1, 2, 1}, {"a", "b", "c"});
    CHECK(perfect.weighted_f1 == doctest::Approx(1.0).epsilon(1e-15));

    // supports (3,1), per-class F1 (1.0, 0.0) -> 0.75; the miss lands on a
    // zero-support third class so class a keeps precision 1
    EvalReport hand = weighted_f1({0, 0, 0, 1}, {0, 0, 0, 2}, {"a", "b", "c"});
    CHECK(hand.per_class[0].f1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hand.per_class[1].f1 == 0.0);
    CHECK(hand.per_class[0].support == 3);
    CHECK(hand.per_class[1].support == 1);
    CHECK(hand.per_class[2].support == 0);
    CHECK(hand.weighted_f1 == doctest::Approx(0.75).epsilon(1e-15));

    // all-one-class on balanced 2-class gold -> (2/3 + 0) weighted = 1/3
    EvalReport one = weighted_f1({0, 0, 1, 1}, {0, 0, 0, 0}, {"a", "b"});
    CHECK(one.weighted_f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    CHECK_THROWS_AS(weighted_f1({0, 1}, {0}, {"a", "b"}), std::invalid_argument);
    CHECK_THROWS_AS(weighted_f1({}, {}, {"a"}), std::invalid_argument);
}

TEST_CASE("weighted f1 matches the confusion-matrix oracle on random cases") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::int64_t classes = 2 + static_cast<std::int64_t>(rng.below(5));
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng.below(200));
        std::vector<std::int64_t> gold, pred;
        std::vector<std::string> labels;
        for (std::int64_t c = 0; c < classes; ++c) labels.push_back("c" + std::to_string(c));
        for (std::int64_t i = 0; i < n; ++i) {
            gold.push_back(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(classes))));
            pred.push_back(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(classes))));
        }
        EvalReport rep = weighted_f1(gold, pred, labels);
        const double oracle = oracle_weighted_f1(gold, pred, classes);
        CHECK(std::abs(rep.weighted_f1 - oracle) < 1e-12);
        std::int64_t support_sum = 0;
        for (const auto& m : rep.per_class) support_sum += m.support;
        CHECK(support_sum == n);
    }
}

TEST_CASE("coverage formatting reproduces the reference arithmetic") {
    CHECK(format_coverage(57509, 8866) == "57509 / 8866 / 15.4%");
    CHECK(format_coverage(14558, 8775) == "14558 / 8775 / 60.3%");
    CHECK(format_coverage(8602, 6582) == "8602 / 6582 / 76.5%");
    CHECK(format_coverage(3240, 3199) == "3240 / 3199 / 98.7%");
}

TEST_CASE("dataset loading validates labels and duplicates") {
    TempDir dir("pathrel_ds_test");
    write_file(dir.path / "relations.txt", "hypernym\nmeronym\nco-hyponym\nrandom\n");
    write_file(dir.path / "train.tsv",
               "Dog\tmammal\thypernym\nwheel\tcar\tmeronym\ncat\tdog\tco-hyponym\n");
    write_file(dir.path / "val.tsv", "apple\tfruit\thypernym\n");
    write_file(dir.path / "test.tsv", "tree\tforest\trandom\n");

    DatasetSplits splits = load_dataset_dir(dir.str(), "fixture");
    CHECK(splits.labels.size() == 4);
    CHECK(splits.train.instances.size() == 3);
    CHECK(splits.train.instances[0].w1 == "dog");  // lowercased
    CHECK(splits.train.instances[0].label == 0);
    CHECK(splits.test.instances[0].label == 3);

    write_file(dir.path / "test.tsv", "tree\tforest\tsynonym\n");
    CHECK_THROWS_WITH_AS(load_dataset_dir(dir.str()), doctest::Contains("line 1"), DataError);

    write_file(dir.path / "test.tsv", "a\tb\trandom\na\tb\thypernym\n");
    CHECK_THROWS_WITH_AS(load_dataset_dir(dir.str()), doctest::Contains("line 2"), DataError);

    write_file(dir.path / "test.tsv", "");
    CHECK_THROWS_AS(load_dataset_dir(dir.str()), DataError);
}

TEST_CASE("evalution-shaped label set loads") {
    TempDir dir("pathrel_ds_eval");
    write_file(dir.path / "relations.txt",
               "hypernym\nmeronym\nattribute\nsynonym\nantonym\nholonym\nsubstance_meronym\n");
    write_file(dir.path / "train.tsv", "hot\tcold\tantonym\nwood\ttable\tsubstance_meronym\n");
    write_file(dir.path / "val.tsv", "big\tlarge\tsynonym\n");
    write_file(dir.path / "test.tsv", "fast\tspeed\tattribute\n");
    DatasetSplits splits = load_dataset_dir(dir.str(), "evalution-shaped");
    CHECK(splits.labels.size() == 7);
    CHECK(splits.train.instances[1].label == 6);
}

TEST_CASE("model container round-trips bit-exactly and rejects bad magic") {
    TempDir dir("pathrel_modelio");
    ModelFile mf;
    mf.header["kind"] = "pairpath";
    mf.header["note"] = "roundtrip";
    Rng rng(5);
    Tensor a = init_uniform({3, 4}, 2.0, rng);
    Tensor b = init_uniform({7}, 0.5, rng);
    mf.add_tensor("a", a);
    mf.add_tensor("b", b);
    const std::string file = (dir.path / "x.model").string();
    mf.save(file);

    ModelFile loaded = ModelFile::load(file);
    CHECK(loaded.header.at("note") == "roundtrip");
    CHECK(loaded.tensor("a").v == a.v);
    CHECK(loaded.tensor("b").v == b.v);
    CHECK_THROWS_AS(loaded.tensor("missing"), DataError);

    write_file(dir.path / "junk.model", "NOTAMODELFILE____________");
    CHECK_THROWS_AS(ModelFile::load((dir.path / "junk.model").string()), DataError);
}

TEST_CASE("export_pair_vectors emits the right column counts") {
    std::istringstream emb("dog 0.1 0.2\ncat -0.1 0.3\nmammal 0.5 0.5\n");
    EmbeddingTable words = load_embeddings(emb, 2);
    PathLexicon lex;
    lex.add("X/NOUN/nsubj/> be/VERB/ROOT/- Y/NOUN/attr/<", 6);
    PairPathModel model = PairPathModel::init(words, lex, 7, 3);

    std::vector<std::array<std::string, 3>> pairs = {{"dog", "mammal", "hypernym"},
                                                     {"cat", "dog", "co-hyponym"}};
    std::ostringstream ps;
    export_pair_vectors(model, pairs, ExportKind::PseudoPath, ps);
    std::istringstream lines(ps.str());
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), '\t') == 2 + 14);  // w2,label + 2*7 dims
    }
    CHECK(rows == 2);

    std::ostringstream ws;
    export_pair_vectors(model, pairs, ExportKind::WordConcat, ws);
    std::istringstream wlines(ws.str());
    rows = 0;
    while (std::getline(wlines, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), '\t') == 2 + 4);  // 2*2 dims
    }
    CHECK(rows == 2);
}

TEST_CASE("mini experiment runs end to end and is byte-deterministic") {
    synthetic::SynthConfig scfg = synthetic::small_config();
    scfg.nouns = 60;
    scfg.background_sentences = 700;
    scfg.noise_sentences = 150;
    scfg.train_pairs = 45;
    scfg.val_pairs = 12;
    scfg.test_pairs = 21;
    scfg.evidence_per_dataset_pair = 5;
    scfg.word_dim = 10;
    synthetic::SynthData data = synthetic::make_synthetic(scfg);

    TempDir dir("pathrel_experiment");
    fs::create_directories(dir.path / "dataset");
    data.write_corpus((dir.path / "corpus.conllu").string());
    data.write_embeddings((dir.path / "embeddings.txt").string());
    data.write_dataset((dir.path / "dataset").string());

    auto run_into = [&](const std::string& out_name) {
        fs::create_directories(dir.path / out_name);
        ExperimentConfig cfg;
        cfg.conllu_path = (dir.path / "corpus.conllu").string();
        cfg.embeddings_path = (dir.path / "embeddings.txt").string();
        cfg.embedding_dim = scfg.word_dim;
        cfg.dataset_dir = (dir.path / "dataset").string();
        cfg.dataset_name = "synthetic";
        cfg.out_dir = (dir.path / out_name).string();
        cfg.seed = 99;
        cfg.pairpath_dim = 16;
        cfg.pairpath_epochs = 2;
        cfg.classifiers = {{Arch::Npb, false, false}, {Arch::Npb, true, false}};
        cfg.supervised.dropout_grid = {0.0};
        cfg.supervised.aug_k_grid = {2};
        cfg.supervised.max_epochs = 6;
        cfg.supervised.minibatch = 32;
        return run_experiment(cfg);
    };

    ExperimentResult r1 = run_into("out1");
    REQUIRE(r1.rows.size() == 2);
    CHECK(r1.rows[0].first == "NPB");
    CHECK(r1.rows[1].first == "NPB+Aug");
    CHECK(r1.report_text.find("coverage\t") != std::string::npos);
    for (const char* artifact :
         {"triples.tsv", "lexicon.tsv", "pairpath.model", "pairpath.log", "npb.model",
          "npb_aug.model", "npb.tuning.tsv", "npb_aug.tuning.tsv", "report.txt"}) {
        CHECK(fs::exists(dir.path / "out1" / artifact));
    }

    ExperimentResult r2 = run_into("out2");
    CHECK(r1.report_text == r2.report_text);
    for (const char* artifact : {"triples.tsv", "lexicon.tsv", "pairpath.model", "npb.model",
                                 "npb_aug.model", "report.txt"}) {
        std::ifstream f1(dir.path / "out1" / artifact, std::ios::binary);
        std::ifstream f2(dir.path / "out2" / artifact, std::ios::binary);
        std::stringstream s1, s2;
        s1 << f1.rdbuf();
        s2 << f2.rdbuf();
        CHECK(s1.str() == s2.str());
        CHECK(!s1.str().empty());
    }
}

TEST_CASE("classifier specs render display names and file stems") {
    CHECK(ClassifierSpec{Arch::Npb, false, false}.display_name() == "NPB");
    CHECK(ClassifierSpec{Arch::Npb, true, false}.display_name() == "NPB+Aug");
    CHECK(ClassifierSpec{Arch::LexNet, false, true}.display_name() == "LexNET+Rep");
    CHECK(ClassifierSpec{Arch::LexNet, true, true}.display_name() == "LexNET+Aug+Rep");
    CHECK(ClassifierSpec{Arch::LexNetH, false, false}.display_name() == "LexNET_h");
    // pseudo-path features on the path-only model are marked as an extension
    CHECK(ClassifierSpec{Arch::Npb, false, true}.display_name() == "NPB+Rep (extension)");
    CHECK(ClassifierSpec{Arch::LexNet, true, true}.file_stem() == "lexnet_aug_rep");
}

TEST_CASE("run_experiment names missing inputs") {
    ExperimentConfig cfg;
    cfg.conllu_path = "/nonexistent/corpus.conllu";
    cfg.embeddings_path = "/nonexistent/emb.txt";
    cfg.dataset_dir = "/nonexistent/ds";
    cfg.out_dir = fs::temp_directory_path().string();
    CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("/nonexistent/corpus.conllu"),
                         DataError);
}
