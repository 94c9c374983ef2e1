#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pathrel/classifier.hpp"
#include "pathrel/deppath.hpp"
#include "support/gradcheck.hpp"

using namespace pathrel;

namespace {

const std::string kPathA = "X/NOUN/nsubj/> va/VERB/ROOT/- Y/NOUN/dobj/<";
const std::string kPathB = "X/NOUN/nsubj/> vb/VERB/ROOT/- Y/NOUN/attr/<";
const std::string kPathC = "X/NOUN/nsubjpass/> vc/VERB/ROOT/- by/ADP/agent/< Y/NOUN/pobj/<";

// words wR_I belong to class R; class-R pairs co-occur with path R only
TripleStore class_coded_store(int pairs_per_class) {
    TripleStore store;
    const std::string paths[3] = {kPathA, kPathB, kPathC};
    for (int r = 0; r < 3; ++r) {
        for (int i = 0; i < pairs_per_class; ++i) {
            const std::string w1 = "w" + std::to_string(r) + "l" + std::to_string(i);
            const std::string w2 = "w" + std::to_string(r) + "r" + std::to_string(i);
            store.add(w1, w2, paths[r]);
            store.add(w2, w1, mirror_string(paths[r]));
        }
    }
    return store;
}

DatasetSplits class_coded_splits(int train_per_class, int val_per_class, int test_per_class,
                                 int pairs_per_class) {
    DatasetSplits s;
    s.labels = {"rel0", "rel1", "rel2"};
    auto fill = [&](RelationDataset& ds, const char* tag, int begin, int count) {
        ds.labels = s.labels;
        ds.split = tag;
        for (int r = 0; r < 3; ++r) {
            for (int i = begin; i < begin + count; ++i) {
                REQUIRE(i < pairs_per_class);
                RelationInstance inst;
                inst.w1 = "w" + std::to_string(r) + "l" + std::to_string(i);
                inst.w2 = "w" + std::to_string(r) + "r" + std::to_string(i);
                inst.label = r;
                ds.instances.push_back(std::move(inst));
            }
        }
    };
    fill(s.train, "train", 0, train_per_class);
    fill(s.val, "val", train_per_class, val_per_class);
    fill(s.test, "test", train_per_class + val_per_class, test_per_class);
    return s;
}

ClassifierConfig micro_config(Arch arch) {
    ClassifierConfig cfg;
    cfg.arch = arch;
    cfg.edge = EdgeEmbedderConfig{4, 2, 2, 1};
    cfg.hidden_dim = 5;
    cfg.word_dim = 3;
    cfg.num_classes = 3;
    cfg.labels = {"rel0", "rel1", "rel2"};
    return cfg;
}

RelationClassifier micro_classifier(Arch arch, std::uint64_t seed) {
    Rng rng(seed);
    TripleStore store = class_coded_store(4);
    return RelationClassifier::init(micro_config(arch), store, nullptr,
                                    {"w0l0", "w0r0", "w1l0", "w1r0"}, rng);
}

}  // namespace

TEST_CASE("empty path encodes to a deterministic vector") {
    RelationClassifier clf = micro_classifier(Arch::Npb, 1);
    PathIds unk = clf.encoder.embedder.path_ids(kEmptyPathToken);
    REQUIRE(unk.size() == 1);
    CHECK(unk[0].lemma == 0);
    CHECK(unk[0].pos == 0);
    CHECK(unk[0].deprel == 0);
    CHECK(unk[0].dir == 0);
    Tensor a = encode_path(clf.encoder, unk, false);
    Tensor b = encode_path(clf.encoder, unk, false);
    CHECK(a.v == b.v);
    CHECK(a.numel() == 5);
}

TEST_CASE("zero-weight encoder maps every path to zero") {
    RelationClassifier clf = micro_classifier(Arch::Npb, 2);
    for (Parameter* p : clf.encoder.parameters()) p->value.fill(0);
    Tensor o = encode_path(clf.encoder, clf.encoder.embedder.path_ids(kPathA), false);
    for (Real e : o.v) CHECK(e == 0.0);
}

TEST_CASE("encoding is order-sensitive for generic weights") {
    RelationClassifier clf = micro_classifier(Arch::Npb, 3);
    Tensor fwd = encode_path(clf.encoder, clf.encoder.embedder.path_ids(kPathC), false);
    Tensor rev =
        encode_path(clf.encoder, clf.encoder.embedder.path_ids(mirror_string(kPathC)), false);
    double diff = 0;
    for (std::int64_t k = 0; k < fwd.numel(); ++k) diff += std::abs(fwd.at(k) - rev.at(k));
    CHECK(diff > 1e-6);
}

TEST_CASE("aggregate_paths is the weighted mean") {
    RelationClassifier clf = micro_classifier(Arch::Npb, 4);
    Tensor oa = encode_path(clf.encoder, clf.encoder.embedder.path_ids(kPathA), false);
    Tensor ob = encode_path(clf.encoder, clf.encoder.embedder.path_ids(kPathB), false);

    Tensor single = aggregate_paths(clf.encoder, {{kPathA, 7}});
    CHECK(single.v == oa.v);

    Tensor two = aggregate_paths(clf.encoder, {{kPathA, 1}, {kPathB, 3}});
    for (std::int64_t k = 0; k < 5; ++k) {
        CHECK(two.at(k) == doctest::Approx((oa.at(k) + 3 * ob.at(k)) / 4.0).epsilon(1e-12));
    }

    Tensor scaled = aggregate_paths(clf.encoder, {{kPathA, 10}, {kPathB, 30}});
    CHECK(scaled.v == two.v);  // scale invariance, bit-identical

    // and through the whole forward pass
    Tensor y1 = classifier_forward(clf, "w0l0", "w0r0", {{kPathA, 1}, {kPathB, 3}});
    Tensor y2 = classifier_forward(clf, "w0l0", "w0r0", {{kPathA, 100}, {kPathB, 300}});
    CHECK(y1.v == y2.v);
}

TEST_CASE("forward output sums to one and head widths follow the architecture") {
    TripleStore store = class_coded_store(4);
    for (Arch arch : {Arch::Npb, Arch::LexNet, Arch::LexNetH}) {
        ClassifierConfig cfg;
        cfg.arch = arch;
        cfg.num_classes = 4;
        cfg.labels = {"a", "b", "c", "d"};
        Rng rng(9);
        RelationClassifier clf =
            RelationClassifier::init(cfg, store, nullptr, {"w0l0", "w0r0"}, rng);
        Tensor y = classifier_forward(clf, "w0l0", "w0r0", {{kPathA, 1}});
        double sum = 0;
        for (Real e : y.v) sum += e;
        CHECK(std::abs(sum - 1.0) < 1e-12);
        switch (arch) {
            case Arch::Npb: CHECK(clf.head_w.value.cols() == 60); break;
            case Arch::LexNet: CHECK(clf.head_w.value.cols() == 160); break;
            case Arch::LexNetH: CHECK(clf.head_w.value.cols() == 60); break;
        }
    }
}

TEST_CASE("+Rep widens the head by the frozen feature width") {
    TripleStore store = class_coded_store(4);
    std::istringstream emb("w0l0 0.1 0.2\nw0r0 -0.1 0.3\n");
    EmbeddingTable words = load_embeddings(emb, 2);
    PathLexicon lex;
    lex.add(kPathA, 10);
    lex.add(kPathB, 8);
    auto pp = std::make_shared<const PairPathModel>(
        PairPathModel::init(words, lex, 100, 77));

    ClassifierConfig cfg;
    cfg.arch = Arch::LexNet;
    cfg.use_rep = true;
    cfg.num_classes = 3;
    cfg.labels = {"a", "b", "c"};
    Rng rng(10);
    RelationClassifier clf = RelationClassifier::init(cfg, store, nullptr, {"w0l0"}, rng, pp);
    CHECK(clf.head_w.value.cols() == 360);  // 160 + 200
}

TEST_CASE("augment adds 2k predicted paths and keeps the empty-path indicator") {
    std::istringstream emb("w0 0.1 0.2\nw1 -0.1 0.3\nw2 0.4 0.4\n");
    EmbeddingTable words = load_embeddings(emb, 2);
    PathLexicon lex;
    lex.add(kPathA, 10);
    lex.add(kPathB, 8);
    lex.add(kPathC, 6);
    lex.add("X/NOUN/pobj/> of/ADP/ROOT/- Y/NOUN/conj/<", 5);
    PairPathModel model = PairPathModel::init(words, lex, 6, 123);

    TripleStore store;  // (w0, w1) has no paths
    auto augmented = augmented_paths_for_pair(store, model, "w0", "w1", 1);
    REQUIRE(augmented.size() == 3);
    CHECK(augmented[0].first == kEmptyPathToken);
    CHECK(augmented[0].second == 1);
    CHECK(augmented[1].second == 1);
    CHECK(augmented[2].second == 1);

    auto again = augmented_paths_for_pair(store, model, "w0", "w1", 1);
    CHECK(again == augmented);  // deterministic given the model

    TripleStore four;
    four.add("w0", "w1", kPathA, 1);
    four.add("w0", "w1", kPathB, 1);
    four.add("w0", "w1", kPathC, 1);
    four.add("w0", "w1", "X/NOUN/pobj/> of/ADP/ROOT/- Y/NOUN/conj/<", 1);
    auto big = augmented_paths_for_pair(four, model, "w0", "w1", 3);
    std::int64_t total_weight = 0;
    for (const auto& [p, w] : big) total_weight += w;
    // 4 corpus paths + 2k = 6 predictions; weight total is collision-proof
    CHECK(total_weight == 10);
}

TEST_CASE("end-to-end gradients match finite differences") {
    for (Arch arch : {Arch::Npb, Arch::LexNet, Arch::LexNetH}) {
        CAPTURE(arch_name(arch));
        RelationClassifier clf = micro_classifier(arch, 21);
        PreparedExample ex;
        ex.w1 = "w0l0";
        ex.w2 = "w0r0";
        if (arch != Arch::Npb) {
            ex.w1_id = clf.word_table.vocab.lookup("w0l0");
            ex.w2_id = clf.word_table.vocab.lookup("w0r0");
        }
        ex.paths = {{kPathA, 1}, {kPathC, 2}};
        ex.path_ids = {clf.encoder.embedder.path_ids(kPathA),
                       clf.encoder.embedder.path_ids(kPathC)};
        ex.label = 1;

        auto loss = [&]() {
            ExampleTape tape = forward_example(clf, ex, false, nullptr);
            return softmax_cross_entropy(tape.logits, {ex.label}).loss;
        };
        for (auto& [name, p] : clf.named_parameters()) p->zero_grad();
        ExampleTape tape = forward_example(clf, ex, true, nullptr);  // dr=0: no rng needed
        auto xent = softmax_cross_entropy(tape.logits, {ex.label});
        backward_example(clf, ex, tape, xent.dlogits);

        gradcheck::Report rep;
        for (auto& [name, p] : clf.named_parameters()) {
            rep = gradcheck::worst(rep, gradcheck::check_tensor(p->value, p->grad, loss, name));
        }
        INFO(rep.where);
        CHECK(rep.max_rel_err < 1e-4);
    }
}

TEST_CASE("NPB overfits a linearly learnable fixture") {
    TripleStore store = class_coded_store(20);
    DatasetSplits splits = class_coded_splits(17, 2, 1, 20);
    REQUIRE(splits.train.instances.size() == 51);

    ClassifierConfig base;
    base.arch = Arch::Npb;
    base.edge = EdgeEmbedderConfig{8, 2, 2, 1};
    base.hidden_dim = 10;

    SupervisedTrainConfig cfg;
    cfg.dropout_grid = {0.0};
    cfg.max_epochs = 200;
    cfg.patience = 200;  // no early exit: measure pure overfitting capacity
    cfg.minibatch = 16;
    cfg.seed = 5;

    TrainResult result = train_supervised(base, splits, store, nullptr, nullptr, cfg);
    auto train_ex = prepare_examples(result.model, splits.train, store);
    std::int64_t correct = 0;
    for (const auto& ex : train_ex) {
        if (predict_label(result.model, ex) == ex.label) ++correct;
    }
    CHECK(correct == static_cast<std::int64_t>(train_ex.size()));
    CHECK(result.history.size() <= 200);
}

TEST_CASE("early stopping halts exactly patience epochs after the best") {
    EarlyStopper stopper(7);
    // constructed plateau: best at epoch 3, flat afterwards
    const double scores[] = {0.2, 0.5, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9};
    std::int64_t halted_at = -1;
    for (std::int64_t e = 1; e <= 12; ++e) {
        stopper.observe(e, scores[e - 1]);
        if (stopper.should_stop(e)) {
            halted_at = e;
            break;
        }
    }
    CHECK(stopper.best_epoch() == 3);
    CHECK(halted_at == 10);  // 3 + 7

    TripleStore store = class_coded_store(8);
    DatasetSplits splits = class_coded_splits(5, 2, 1, 8);
    ClassifierConfig base;
    base.arch = Arch::Npb;
    base.edge = EdgeEmbedderConfig{4, 2, 2, 1};
    base.hidden_dim = 6;
    SupervisedTrainConfig cfg;
    cfg.dropout_grid = {0.0};
    cfg.max_epochs = 100;
    cfg.minibatch = 8;
    cfg.seed = 6;
    TrainResult result = train_supervised(base, splits, store, nullptr, nullptr, cfg);
    std::int64_t best_epoch = -1, last_epoch = 0;
    for (const auto& rec : result.history) {
        if (rec.is_best) best_epoch = rec.epoch;
        last_epoch = rec.epoch;
    }
    CHECK(last_epoch == best_epoch + 7);
}

TEST_CASE("tuning report enumerates the dropout grid with one selection") {
    TripleStore store = class_coded_store(8);
    DatasetSplits splits = class_coded_splits(5, 2, 1, 8);
    ClassifierConfig base;
    base.arch = Arch::Npb;
    base.edge = EdgeEmbedderConfig{4, 2, 2, 1};
    base.hidden_dim = 6;
    SupervisedTrainConfig cfg;
    cfg.dropout_grid = {0.0, 0.2, 0.4};
    cfg.max_epochs = 12;
    cfg.minibatch = 8;
    cfg.seed = 7;
    TrainResult result = train_supervised(base, splits, store, nullptr, nullptr, cfg);
    REQUIRE(result.report.size() == 3);
    CHECK(result.report[0].setting == "dr=0.0");
    CHECK(result.report[1].setting == "dr=0.2");
    CHECK(result.report[2].setting == "dr=0.4");
    int selected = 0;
    for (const auto& row : result.report) selected += row.selected ? 1 : 0;
    CHECK(selected == 1);
    std::string tsv = format_tuning_report(result.report);
    CHECK(tsv.find("selected") != std::string::npos);
}

TEST_CASE("+Rep training leaves the pair-path model bit-identical") {
    TripleStore store = class_coded_store(8);
    DatasetSplits splits = class_coded_splits(5, 2, 1, 8);

    std::ostringstream embos;
    for (const auto& inst : splits.train.instances) {
        embos << inst.w1 << " 0.1 0.2\n" << inst.w2 << " -0.2 0.1\n";
    }
    std::istringstream emb(embos.str());
    EmbeddingTable words = load_embeddings(emb, 2);
    PathLexicon lex;
    lex.add(kPathA, 10);
    lex.add(kPathB, 8);
    lex.add(kPathC, 6);
    auto pp = std::make_shared<const PairPathModel>(PairPathModel::init(words, lex, 8, 99));
    const std::vector<Real> before_w1 = pp->w1.value.v;
    const std::vector<Real> before_paths = pp->path_table.rows.value.v;

    ClassifierConfig base;
    base.arch = Arch::LexNet;
    base.use_rep = true;
    base.edge = EdgeEmbedderConfig{2, 2, 2, 1};
    base.hidden_dim = 6;
    base.word_dim = 2;
    SupervisedTrainConfig cfg;
    cfg.dropout_grid = {0.2};
    cfg.max_epochs = 5;
    cfg.minibatch = 8;
    cfg.seed = 8;
    TrainResult result = train_supervised(base, splits, store, &words, pp, cfg);

    CHECK(pp->w1.value.v == before_w1);
    CHECK(pp->path_table.rows.value.v == before_paths);
    CHECK(result.model.config.use_rep);
}

TEST_CASE("eval-mode inference is deterministic under dropout config") {
    RelationClassifier clf = micro_classifier(Arch::Npb, 31);
    clf.encoder.embedder.dropout_rate = 0.4;
    clf.config.dropout_rate = 0.4;
    Tensor y1 = classifier_forward(clf, "w0l0", "w0r0", {{kPathA, 1}, {kPathB, 2}});
    Tensor y2 = classifier_forward(clf, "w0l0", "w0r0", {{kPathA, 1}, {kPathB, 2}});
    CHECK(y1.v == y2.v);
}

TEST_CASE("classifier save/load round-trips predictions") {
    TripleStore store = class_coded_store(8);
    DatasetSplits splits = class_coded_splits(5, 2, 1, 8);
    ClassifierConfig base;
    base.arch = Arch::LexNetH;
    base.edge = EdgeEmbedderConfig{4, 2, 2, 1};
    base.hidden_dim = 6;
    base.word_dim = 3;
    SupervisedTrainConfig cfg;
    cfg.dropout_grid = {0.0};
    cfg.max_epochs = 3;
    cfg.minibatch = 8;
    cfg.seed = 11;
    TrainResult result = train_supervised(base, splits, store, nullptr, nullptr, cfg);

    const std::string file = "classifier_roundtrip.model";
    result.model.save(file);
    RelationClassifier loaded = RelationClassifier::load(file);
    auto test_ex = prepare_examples(result.model, splits.test, store);
    auto test_ex2 = prepare_examples(loaded, splits.test, store);
    for (std::size_t i = 0; i < test_ex.size(); ++i) {
        CHECK(predict_label(result.model, test_ex[i]) == predict_label(loaded, test_ex2[i]));
        Tensor a = forward_example(result.model, test_ex[i], false, nullptr).logits;
        Tensor b = forward_example(loaded, test_ex2[i], false, nullptr).logits;
        CHECK(a.v == b.v);
    }
    std::remove(file.c_str());
}
