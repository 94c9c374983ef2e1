#include "pathrel/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "pathrel/deppath.hpp"
#include "pathrel/model_io.hpp"
#include "pathrel/nn.hpp"

namespace pathrel {

std::string arch_name(Arch a) {
    switch (a) {
        case Arch::Npb: return "npb";
        case Arch::LexNet: return "lexnet";
        default: return "lexnet_h";
    }
}

Arch parse_arch(const std::string& name) {
    if (name == "npb") return Arch::Npb;
    if (name == "lexnet") return Arch::LexNet;
    if (name == "lexnet_h") return Arch::LexNetH;
    throw DataError("unknown architecture: " + name);
}

std::int64_t ClassifierConfig::concat_dim() const {
    return arch == Arch::Npb ? hidden_dim : 2 * word_dim + hidden_dim;
}

std::int64_t ClassifierConfig::head_input_dim() const {
    std::int64_t base = 0;
    switch (arch) {
        case Arch::Npb: base = hidden_dim; break;
        case Arch::LexNet: base = 2 * word_dim + hidden_dim; break;
        case Arch::LexNetH: base = hidden_dim; break;
    }
    return base + rep_dim();
}

EdgeEmbedder EdgeEmbedder::build(const TripleStore& store, const EmbeddingTable* pretrained,
                                 const EdgeEmbedderConfig& cfg, Rng& rng) {
    Vocabulary lemmas("<unk>"), poses("<unk>"), deprels("<unk>"), dirs("<unk>");
    for (const auto& [path, total] : store.path_totals()) {
        for (const PathEdge& e : parse_path(path).edges) {
            lemmas.add(e.lemma);
            poses.add(e.pos);
            deprels.add(e.deprel);
            dirs.add(e.dir);
        }
    }
    // slot lemmas and directions always exist even on a path-free store
    lemmas.add("X");
    lemmas.add("Y");
    for (const char* d : {">", "<", "-"}) dirs.add(d);

    EdgeEmbedder emb;
    emb.config = cfg;

    // lemma rows: pretrained vector when available, else uniform [-0.01, 0.01]
    Tensor lemma_rows = Tensor::zeros({lemmas.size(), cfg.lemma_dim});
    if (pretrained && pretrained->dim != cfg.lemma_dim) {
        throw std::invalid_argument("EdgeEmbedder: pretrained dim " +
                                    std::to_string(pretrained->dim) + " != lemma dim " +
                                    std::to_string(cfg.lemma_dim));
    }
    for (std::int64_t id = 0; id < lemmas.size(); ++id) {
        const std::string& tok = lemmas.token(id);
        if (pretrained && (id == 0 || pretrained->vocab.contains(tok))) {
            Tensor row = pretrained->lookup(tok);  // id 0 gets the UNK (mean) row
            for (std::int64_t k = 0; k < cfg.lemma_dim; ++k) lemma_rows.at(id, k) = row.at(k);
        } else {
            for (std::int64_t k = 0; k < cfg.lemma_dim; ++k) {
                lemma_rows.at(id, k) = static_cast<Real>(rng.uniform(-0.01, 0.01));
            }
        }
    }
    emb.lemma = EmbeddingTable(lemmas, std::move(lemma_rows), /*trainable=*/true);
    emb.pos = EmbeddingTable(poses, init_embedding(poses.size(), cfg.pos_dim, rng), true);
    emb.deprel =
        EmbeddingTable(deprels, init_embedding(deprels.size(), cfg.deprel_dim, rng), true);
    emb.dir = EmbeddingTable(dirs, init_embedding(dirs.size(), cfg.dir_dim, rng), true);
    return emb;
}

PathIds EdgeEmbedder::path_ids(const std::string& canonical) const {
    PathIds ids;
    for (const PathEdge& e : parse_path(canonical).edges) {
        ids.push_back(EdgeIds{lemma.vocab.lookup(e.lemma), pos.vocab.lookup(e.pos),
                              deprel.vocab.lookup(e.deprel), dir.vocab.lookup(e.dir)});
    }
    return ids;
}

std::vector<Parameter*> EdgeEmbedder::parameters() {
    return {&lemma.rows, &pos.rows, &deprel.rows, &dir.rows};
}

std::vector<Parameter*> PathEncoder::parameters() {
    std::vector<Parameter*> ps = embedder.parameters();
    for (Parameter* p : lstm.parameters()) ps.push_back(p);
    return ps;
}

namespace {

// edge vector assembly: each component row scaled by its mask entry
Tensor assemble_edge(const EdgeEmbedder& emb, const EdgeIds& ids, const Tensor& mask) {
    const auto& c = emb.config;
    Tensor e = Tensor::zeros({c.edge_dim()});
    std::int64_t off = 0;
    auto put = [&](const EmbeddingTable& table, std::int64_t id, std::int64_t dim, int slot) {
        const Real scale = mask.at(slot);
        if (scale != Real(0)) {
            const Real* row = &table.rows.value.v[static_cast<std::size_t>(id * dim)];
            for (std::int64_t k = 0; k < dim; ++k) e.at(off + k) = scale * row[k];
        }
        off += dim;
    };
    put(emb.lemma, ids.lemma, c.lemma_dim, 0);
    put(emb.pos, ids.pos, c.pos_dim, 1);
    put(emb.deprel, ids.deprel, c.deprel_dim, 2);
    put(emb.dir, ids.dir, c.dir_dim, 3);
    return e;
}

Tensor ones_mask(std::int64_t n) {
    Tensor m = Tensor::zeros({n});
    m.fill(Real(1));
    return m;
}

}  // namespace

Tensor encode_path(const PathEncoder& enc, const PathIds& ids, bool train_mode, Rng* rng,
                   PathForward* tape) {
    if (ids.empty()) throw std::invalid_argument("encode_path: empty path");
    const double dr = enc.embedder.dropout_rate;
    std::vector<Tensor> inputs;
    std::vector<Tensor> masks;
    for (const EdgeIds& edge : ids) {
        Tensor mask;
        if (train_mode && dr > 0.0) {
            if (!rng) throw std::invalid_argument("encode_path: dropout needs an rng");
            mask = dropout_mask({4}, dr, *rng);
        } else {
            mask = ones_mask(4);
        }
        inputs.push_back(assemble_edge(enc.embedder, edge, mask));
        masks.push_back(std::move(mask));
    }
    LstmTrace trace;
    Tensor out = lstm_forward(enc.lstm, inputs, tape ? &trace : nullptr);
    if (tape) {
        tape->ids = &ids;
        tape->component_masks = std::move(masks);
        tape->inputs = std::move(inputs);
        tape->trace = std::move(trace);
        tape->output = out;
    }
    return out;
}

Tensor aggregate_paths(const PathEncoder& enc,
                       const std::vector<std::pair<std::string, std::int64_t>>& paths,
                       bool train_mode, Rng* rng) {
    if (paths.empty()) throw std::invalid_argument("aggregate_paths: empty path set");
    double total = 0.0;
    for (const auto& [canonical, weight] : paths) total += static_cast<double>(weight);
    // normalized fractions keep the mean bit-identical under frequency scaling
    Tensor sum = Tensor::zeros({enc.lstm.hidden_dim});
    for (const auto& [canonical, weight] : paths) {
        const PathIds ids = enc.embedder.path_ids(canonical);
        Tensor o = encode_path(enc, ids, train_mode, rng);
        sum.add_scaled(o, static_cast<Real>(static_cast<double>(weight) / total));
    }
    return sum;
}

RelationClassifier RelationClassifier::init(const ClassifierConfig& cfg,
                                            const TripleStore& store,
                                            const EmbeddingTable* pretrained,
                                            const std::vector<std::string>& dataset_words,
                                            Rng& rng,
                                            std::shared_ptr<const PairPathModel> pairpath) {
    if (cfg.num_classes < 2) throw std::invalid_argument("classifier needs >= 2 classes");
    if ((cfg.use_rep || cfg.use_aug) && !pairpath) {
        throw std::invalid_argument("+Aug/+Rep need a pair-path model");
    }
    RelationClassifier clf;
    clf.config = cfg;
    if (cfg.use_rep) {
        clf.config.rep_feature_dim = 2 * pairpath->config.hidden_dim;
    }
    clf.pairpath = std::move(pairpath);

    clf.encoder.embedder = EdgeEmbedder::build(store, pretrained, cfg.edge, rng);
    clf.encoder.embedder.dropout_rate = cfg.dropout_rate;
    clf.encoder.lstm = LstmStack::make(2, cfg.edge.edge_dim(), cfg.hidden_dim, rng);

    if (cfg.arch != Arch::Npb) {
        Vocabulary words("<unk>");
        std::set<std::string> sorted(dataset_words.begin(), dataset_words.end());
        for (const std::string& w : sorted) words.add(w);
        Tensor rows = Tensor::zeros({words.size(), cfg.word_dim});
        if (pretrained && pretrained->dim != cfg.word_dim) {
            throw std::invalid_argument("word table dim mismatch with pretrained vectors");
        }
        for (std::int64_t id = 0; id < words.size(); ++id) {
            const std::string& tok = words.token(id);
            if (pretrained && (id == 0 || pretrained->vocab.contains(tok))) {
                Tensor row = pretrained->lookup(tok);
                for (std::int64_t k = 0; k < cfg.word_dim; ++k) rows.at(id, k) = row.at(k);
            } else {
                for (std::int64_t k = 0; k < cfg.word_dim; ++k) {
                    rows.at(id, k) = static_cast<Real>(rng.uniform(-0.01, 0.01));
                }
            }
        }
        clf.word_table = EmbeddingTable(words, std::move(rows), /*trainable=*/true);
    }

    if (cfg.arch == Arch::LexNetH) {
        clf.hidden_w = Parameter(init_glorot(cfg.hidden_dim, clf.config.concat_dim(), rng));
        clf.hidden_b = Parameter(Tensor::zeros({cfg.hidden_dim}));
    }
    clf.head_w = Parameter(init_glorot(cfg.num_classes, clf.config.head_input_dim(), rng));
    clf.head_b = Parameter(Tensor::zeros({cfg.num_classes}));
    return clf;
}

std::vector<std::pair<std::string, Parameter*>> RelationClassifier::named_parameters() {
    std::vector<std::pair<std::string, Parameter*>> out;
    out.emplace_back("edge.lemma", &encoder.embedder.lemma.rows);
    out.emplace_back("edge.pos", &encoder.embedder.pos.rows);
    out.emplace_back("edge.deprel", &encoder.embedder.deprel.rows);
    out.emplace_back("edge.dir", &encoder.embedder.dir.rows);
    for (std::size_t l = 0; l < encoder.lstm.layers.size(); ++l) {
        const std::string p = "lstm." + std::to_string(l) + ".";
        out.emplace_back(p + "wx", &encoder.lstm.layers[l].wx);
        out.emplace_back(p + "wh", &encoder.lstm.layers[l].wh);
        out.emplace_back(p + "b", &encoder.lstm.layers[l].b);
    }
    if (config.arch != Arch::Npb) out.emplace_back("word_table", &word_table.rows);
    if (config.arch == Arch::LexNetH) {
        out.emplace_back("hidden.w", &hidden_w);
        out.emplace_back("hidden.b", &hidden_b);
    }
    out.emplace_back("head.w", &head_w);
    out.emplace_back("head.b", &head_b);
    return out;
}

std::vector<Tensor> RelationClassifier::snapshot() const {
    std::vector<Tensor> snap;
    auto& self = const_cast<RelationClassifier&>(*this);
    for (auto& [name, p] : self.named_parameters()) snap.push_back(p->value);
    return snap;
}

void RelationClassifier::restore(const std::vector<Tensor>& snap) {
    auto params = named_parameters();
    if (snap.size() != params.size()) {
        throw std::invalid_argument("restore: snapshot size mismatch");
    }
    for (std::size_t i = 0; i < params.size(); ++i) params[i].second->value = snap[i];
}

std::vector<std::pair<std::string, std::int64_t>> augmented_paths_for_pair(
    const TripleStore& store, const PairPathModel& model, const std::string& w1,
    const std::string& w2, std::int64_t k) {
    auto paths = paths_for_pair(store, w1, w2);
    for (const auto& scored : model.predict_top_paths(w1, w2, k)) {
        bool merged = false;
        for (auto& [p, weight] : paths) {
            if (p == scored.path) {
                weight += 1;
                merged = true;
                break;
            }
        }
        if (!merged) paths.emplace_back(scored.path, 1);
    }
    return paths;
}

std::vector<PreparedExample> prepare_examples(const RelationClassifier& clf,
                                              const RelationDataset& split,
                                              const TripleStore& store) {
    std::vector<PreparedExample> out;
    out.reserve(split.instances.size());
    for (const RelationInstance& inst : split.instances) {
        PreparedExample ex;
        ex.w1 = inst.w1;
        ex.w2 = inst.w2;
        ex.label = inst.label;
        ex.has_corpus_paths = !store.lookup_pair(inst.w1, inst.w2).empty();
        if (clf.config.arch != Arch::Npb) {
            ex.w1_id = clf.word_table.vocab.lookup(inst.w1);
            ex.w2_id = clf.word_table.vocab.lookup(inst.w2);
        }
        ex.paths = clf.config.use_aug
                       ? augmented_paths_for_pair(store, *clf.pairpath, inst.w1, inst.w2,
                                                  clf.config.aug_k)
                       : paths_for_pair(store, inst.w1, inst.w2);
        for (const auto& [canonical, weight] : ex.paths) {
            ex.path_ids.push_back(clf.encoder.embedder.path_ids(canonical));
        }
        if (clf.config.use_rep) {
            ex.rep_features = clf.pairpath->pseudo_path_features(inst.w1, inst.w2);
        }
        out.push_back(std::move(ex));
    }
    return out;
}

ExampleTape forward_example(const RelationClassifier& clf, const PreparedExample& ex,
                            bool train_mode, Rng* rng) {
    const auto& cfg = clf.config;
    ExampleTape tape;

    tape.weight_total = 0.0;
    for (const auto& [canonical, weight] : ex.paths) {
        tape.weight_total += static_cast<double>(weight);
    }
    tape.v_paths = Tensor::zeros({cfg.hidden_dim});
    for (std::size_t p = 0; p < ex.path_ids.size(); ++p) {
        PathForward pf;
        pf.weight = static_cast<double>(ex.paths[p].second);
        encode_path(clf.encoder, ex.path_ids[p], train_mode, rng, &pf);
        tape.v_paths.add_scaled(pf.output,
                                static_cast<Real>(pf.weight / tape.weight_total));
        tape.paths.push_back(std::move(pf));
    }

    Tensor pre;  // [1, d] vector entering the head (before +Rep concat)
    if (cfg.arch == Arch::Npb) {
        pre = tape.v_paths;
        pre.shape = {1, cfg.hidden_dim};
    } else {
        tape.concat = Tensor::zeros({1, cfg.concat_dim()});
        clf.word_table.copy_row_into(ex.w1_id, tape.concat, 0);
        for (std::int64_t k = 0; k < cfg.hidden_dim; ++k) {
            tape.concat.at(cfg.word_dim + k) = tape.v_paths.at(k);
        }
        clf.word_table.copy_row_into(ex.w2_id, tape.concat, cfg.word_dim + cfg.hidden_dim);
        if (cfg.arch == Arch::LexNet) {
            pre = tape.concat;
        } else {
            tape.hidden_out = tanh_forward(affine(tape.concat, clf.hidden_w, clf.hidden_b));
            if (train_mode && cfg.dropout_rate > 0.0) {
                if (!rng) throw std::invalid_argument("forward: dropout needs an rng");
                tape.hidden_mask = dropout_mask({cfg.hidden_dim}, cfg.dropout_rate, *rng);
            } else {
                tape.hidden_mask = ones_mask(cfg.hidden_dim);
            }
            pre = tape.hidden_out;
            for (std::int64_t k = 0; k < cfg.hidden_dim; ++k) {
                pre.at(0, k) *= tape.hidden_mask.at(k);
            }
        }
    }

    if (cfg.use_rep) {
        const std::int64_t base = pre.cols();
        Tensor full = Tensor::zeros({1, base + cfg.rep_feature_dim});
        for (std::int64_t k = 0; k < base; ++k) full.at(0, k) = pre.at(0, k);
        for (std::int64_t k = 0; k < cfg.rep_feature_dim; ++k) {
            full.at(0, base + k) = ex.rep_features.at(k);
        }
        pre = std::move(full);
    }
    tape.penultimate = pre;
    tape.logits = affine(tape.penultimate, clf.head_w, clf.head_b);
    return tape;
}

void backward_example(RelationClassifier& clf, const PreparedExample& ex,
                      const ExampleTape& tape, const Tensor& dlogits) {
    const auto& cfg = clf.config;
    Tensor dpen = affine_backward(tape.penultimate, clf.head_w, clf.head_b, dlogits);

    // +Rep features are frozen: drop their gradient slice
    Tensor dpre = dpen;
    if (cfg.use_rep) {
        const std::int64_t base = dpen.cols() - cfg.rep_feature_dim;
        dpre = Tensor::zeros({1, base});
        for (std::int64_t k = 0; k < base; ++k) dpre.at(0, k) = dpen.at(0, k);
    }

    Tensor dv_paths = Tensor::zeros({cfg.hidden_dim});
    if (cfg.arch == Arch::Npb) {
        for (std::int64_t k = 0; k < cfg.hidden_dim; ++k) dv_paths.at(k) = dpre.at(0, k);
    } else {
        Tensor dconcat;
        if (cfg.arch == Arch::LexNet) {
            dconcat = dpre;
        } else {
            Tensor dhidden = dpre;  // through the dropout mask
            for (std::int64_t k = 0; k < cfg.hidden_dim; ++k) {
                dhidden.at(0, k) *= tape.hidden_mask.at(k);
            }
            Tensor dpre_h = tanh_backward(tape.hidden_out, dhidden);
            dconcat = affine_backward(tape.concat, clf.hidden_w, clf.hidden_b, dpre_h);
        }
        // word embedding rows
        Tensor& wg = clf.word_table.rows.grad;
        for (std::int64_t k = 0; k < cfg.word_dim; ++k) {
            wg.at(ex.w1_id, k) += dconcat.at(0, k);
            wg.at(ex.w2_id, k) += dconcat.at(0, cfg.word_dim + cfg.hidden_dim + k);
        }
        for (std::int64_t k = 0; k < cfg.hidden_dim; ++k) {
            dv_paths.at(k) = dconcat.at(0, cfg.word_dim + k);
        }
    }

    // Eq-3 aggregation: each path gets weight/total of the upstream gradient
    for (const PathForward& pf : tape.paths) {
        Tensor d_out = dv_paths;
        const Real scale = static_cast<Real>(pf.weight / tape.weight_total);
        for (Real& e : d_out.v) e *= scale;
        std::vector<Tensor> dinputs;
        lstm_backward(clf.encoder.lstm, pf.trace, d_out, &dinputs);
        // split per-edge input gradients back into the component tables
        const auto& ec = clf.encoder.embedder.config;
        for (std::size_t t = 0; t < dinputs.size(); ++t) {
            const EdgeIds& ids = (*pf.ids)[t];
            const Tensor& mask = pf.component_masks[t];
            const Tensor& dx = dinputs[t];
            std::int64_t off = 0;
            auto scatter = [&](EmbeddingTable& table, std::int64_t id, std::int64_t dim,
                               int slot) {
                const Real m = mask.at(slot);
                if (m != Real(0)) {
                    Real* grow = &table.rows.grad.v[static_cast<std::size_t>(id * dim)];
                    for (std::int64_t k = 0; k < dim; ++k) grow[k] += m * dx.at(off + k);
                }
                off += dim;
            };
            scatter(clf.encoder.embedder.lemma, ids.lemma, ec.lemma_dim, 0);
            scatter(clf.encoder.embedder.pos, ids.pos, ec.pos_dim, 1);
            scatter(clf.encoder.embedder.deprel, ids.deprel, ec.deprel_dim, 2);
            scatter(clf.encoder.embedder.dir, ids.dir, ec.dir_dim, 3);
        }
    }
}

Tensor classifier_forward(const RelationClassifier& clf, const std::string& w1,
                          const std::string& w2,
                          const std::vector<std::pair<std::string, std::int64_t>>& paths,
                          bool train_mode, Rng* rng) {
    PreparedExample ex;
    ex.w1 = w1;
    ex.w2 = w2;
    ex.paths = paths;
    for (const auto& [canonical, weight] : paths) {
        ex.path_ids.push_back(clf.encoder.embedder.path_ids(canonical));
    }
    if (clf.config.arch != Arch::Npb) {
        ex.w1_id = clf.word_table.vocab.lookup(w1);
        ex.w2_id = clf.word_table.vocab.lookup(w2);
    }
    if (clf.config.use_rep) ex.rep_features = clf.pairpath->pseudo_path_features(w1, w2);
    ExampleTape tape = forward_example(clf, ex, train_mode, rng);
    Tensor y = softmax_rows(tape.logits);
    y.shape = {clf.config.num_classes};
    return y;
}

std::int64_t predict_label(const RelationClassifier& clf, const PreparedExample& ex) {
    ExampleTape tape = forward_example(clf, ex, /*train_mode=*/false, nullptr);
    std::int64_t best = 0;
    for (std::int64_t c = 1; c < clf.config.num_classes; ++c) {
        if (tape.logits.at(0, c) > tape.logits.at(0, best)) best = c;  // ties keep lowest
    }
    return best;
}

EvalReport evaluate_split(const RelationClassifier& clf,
                          const std::vector<PreparedExample>& examples,
                          const std::vector<std::string>& labels) {
    std::vector<std::int64_t> gold, pred;
    std::int64_t with_paths = 0;
    for (const PreparedExample& ex : examples) {
        gold.push_back(ex.label);
        pred.push_back(predict_label(clf, ex));
        if (ex.has_corpus_paths) ++with_paths;
    }
    EvalReport report = weighted_f1(gold, pred, labels);
    report.instances = static_cast<std::int64_t>(examples.size());
    report.instances_with_paths = with_paths;
    return report;
}

bool EarlyStopper::observe(std::int64_t epoch, double score) {
    if (score > best_score_) {
        best_score_ = score;
        best_epoch_ = epoch;
        return true;
    }
    return false;
}

namespace {

struct GridSetting {
    double dropout = 0.0;
    std::int64_t k = 0;

    std::string describe(bool with_k) const {
        char buf[64];
        if (with_k) {
            std::snprintf(buf, sizeof buf, "dr=%.1f,k=%lld", dropout,
                          static_cast<long long>(k));
        } else {
            std::snprintf(buf, sizeof buf, "dr=%.1f", dropout);
        }
        return buf;
    }
};

}  // namespace

TrainResult train_supervised(const ClassifierConfig& base, const DatasetSplits& splits,
                             const TripleStore& store, const EmbeddingTable* pretrained,
                             std::shared_ptr<const PairPathModel> pairpath,
                             const SupervisedTrainConfig& cfg) {
    if (splits.train.instances.empty() || splits.val.instances.empty()) {
        throw std::invalid_argument("train_supervised: empty train or val split");
    }
    if (cfg.dropout_grid.empty() || (base.use_aug && cfg.aug_k_grid.empty())) {
        throw std::invalid_argument("train_supervised: empty hyperparameter grid");
    }

    std::vector<std::string> dataset_words;
    for (const RelationDataset* split : {&splits.train, &splits.val, &splits.test}) {
        for (const RelationInstance& inst : split->instances) {
            dataset_words.push_back(inst.w1);
            dataset_words.push_back(inst.w2);
        }
    }

    std::vector<GridSetting> grid;
    for (double dr : cfg.dropout_grid) {
        if (base.use_aug) {
            for (std::int64_t k : cfg.aug_k_grid) grid.push_back({dr, k});
        } else {
            grid.push_back({dr, 0});
        }
    }

    TrainResult result;
    std::int64_t best_setting = -1;

    for (std::size_t si = 0; si < grid.size(); ++si) {
        const GridSetting& setting = grid[si];
        ClassifierConfig cc = base;
        cc.dropout_rate = setting.dropout;
        cc.aug_k = setting.k;
        cc.labels = splits.labels;
        cc.num_classes = static_cast<std::int64_t>(splits.labels.size());

        Rng rng(Rng::derive(cfg.seed, si));
        RelationClassifier clf =
            RelationClassifier::init(cc, store, pretrained, dataset_words, rng, pairpath);
        std::vector<PreparedExample> train_ex = prepare_examples(clf, splits.train, store);
        std::vector<PreparedExample> val_ex = prepare_examples(clf, splits.val, store);

        auto params = clf.named_parameters();
        AdamConfig adam;
        adam.lr = cfg.lr;

        EarlyStopper stopper(cfg.patience);
        std::vector<EpochRecord> history;
        std::vector<Tensor> best_snap = clf.snapshot();

        std::vector<std::size_t> order(train_ex.size());
        std::iota(order.begin(), order.end(), std::size_t{0});

        for (std::int64_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
            rng.shuffle(order);
            double loss_sum = 0.0;
            std::int64_t batches = 0;
            std::size_t pos = 0;
            while (pos < order.size()) {
                const std::size_t bsz = std::min<std::size_t>(
                    static_cast<std::size_t>(cfg.minibatch), order.size() - pos);
                std::vector<ExampleTape> tapes;
                Tensor logits = Tensor::zeros({static_cast<std::int64_t>(bsz), cc.num_classes});
                std::vector<std::int64_t> labels(bsz);
                for (std::size_t b = 0; b < bsz; ++b) {
                    const PreparedExample& ex = train_ex[order[pos + b]];
                    tapes.push_back(forward_example(clf, ex, /*train_mode=*/true, &rng));
                    for (std::int64_t c = 0; c < cc.num_classes; ++c) {
                        logits.at(static_cast<std::int64_t>(b), c) = tapes.back().logits.at(0, c);
                    }
                    labels[b] = ex.label;
                }
                auto xent = softmax_cross_entropy(logits, labels);
                loss_sum += xent.loss;
                ++batches;
                for (std::size_t b = 0; b < bsz; ++b) {
                    Tensor drow = Tensor::zeros({1, cc.num_classes});
                    for (std::int64_t c = 0; c < cc.num_classes; ++c) {
                        drow.at(0, c) = xent.dlogits.at(static_cast<std::int64_t>(b), c);
                    }
                    backward_example(clf, train_ex[order[pos + b]], tapes[b], drow);
                }
                for (auto& [name, p] : params) adam_update(*p, adam);
                pos += bsz;
            }

            const double val_f1 = evaluate_split(clf, val_ex, splits.labels).weighted_f1;
            const bool is_best = stopper.observe(epoch, val_f1);
            if (is_best) best_snap = clf.snapshot();
            history.push_back({epoch, loss_sum / static_cast<double>(batches), val_f1, is_best});
            if (stopper.should_stop(epoch)) break;
        }

        clf.restore(best_snap);
        result.report.push_back(
            {setting.describe(base.use_aug), stopper.best_score(), false});
        if (best_setting < 0 || stopper.best_score() > result.best_val_f1) {
            best_setting = static_cast<std::int64_t>(si);
            result.best_val_f1 = stopper.best_score();
            result.model = std::move(clf);
            result.history = std::move(history);
        }
    }
    result.report[static_cast<std::size_t>(best_setting)].selected = true;
    return result;
}

std::string format_tuning_report(const std::vector<TuningRow>& rows) {
    std::ostringstream os;
    char buf[160];
    for (const TuningRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%s\t%.4f\t%s\n", r.setting.c_str(), r.val_f1,
                      r.selected ? "selected" : "-");
        os << buf;
    }
    return os.str();
}

namespace {

nlohmann::json vocab_to_json(const Vocabulary& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::int64_t id = 0; id < v.size(); ++id) arr.push_back(v.token(id));
    return arr;
}

Vocabulary vocab_from_json(const nlohmann::json& arr) {
    Vocabulary v(arr.at(0).get<std::string>());
    for (std::size_t i = 1; i < arr.size(); ++i) v.add(arr[i].get<std::string>());
    return v;
}

}  // namespace

void RelationClassifier::save(const std::string& path) const {
    ModelFile mf;
    mf.header["kind"] = "classifier";
    mf.header["config"] = {{"arch", arch_name(config.arch)},
                           {"use_aug", config.use_aug},
                           {"aug_k", config.aug_k},
                           {"use_rep", config.use_rep},
                           {"rep_feature_dim", config.rep_feature_dim},
                           {"hidden_dim", config.hidden_dim},
                           {"word_dim", config.word_dim},
                           {"num_classes", config.num_classes},
                           {"dropout_rate", config.dropout_rate},
                           {"lemma_dim", config.edge.lemma_dim},
                           {"pos_dim", config.edge.pos_dim},
                           {"deprel_dim", config.edge.deprel_dim},
                           {"dir_dim", config.edge.dir_dim},
                           {"labels", config.labels}};
    mf.header["vocab"] = {{"lemma", vocab_to_json(encoder.embedder.lemma.vocab)},
                          {"pos", vocab_to_json(encoder.embedder.pos.vocab)},
                          {"deprel", vocab_to_json(encoder.embedder.deprel.vocab)},
                          {"dir", vocab_to_json(encoder.embedder.dir.vocab)}};
    if (config.arch != Arch::Npb) {
        mf.header["vocab"]["word"] = vocab_to_json(word_table.vocab);
    }
    auto& self = const_cast<RelationClassifier&>(*this);
    for (auto& [name, p] : self.named_parameters()) mf.add_tensor(name, p->value);
    if (pairpath) pairpath->embed_into(mf, "pp");
    mf.save(path);
}

RelationClassifier RelationClassifier::load(const std::string& path) {
    ModelFile mf = ModelFile::load(path);
    if (mf.header.value("kind", "") != "classifier") {
        throw DataError("not a classifier model: " + path);
    }
    const auto& jc = mf.header.at("config");
    RelationClassifier clf;
    clf.config.arch = parse_arch(jc.at("arch").get<std::string>());
    clf.config.use_aug = jc.at("use_aug").get<bool>();
    clf.config.aug_k = jc.at("aug_k").get<std::int64_t>();
    clf.config.use_rep = jc.at("use_rep").get<bool>();
    clf.config.rep_feature_dim = jc.at("rep_feature_dim").get<std::int64_t>();
    clf.config.hidden_dim = jc.at("hidden_dim").get<std::int64_t>();
    clf.config.word_dim = jc.at("word_dim").get<std::int64_t>();
    clf.config.num_classes = jc.at("num_classes").get<std::int64_t>();
    clf.config.dropout_rate = jc.at("dropout_rate").get<double>();
    clf.config.edge.lemma_dim = jc.at("lemma_dim").get<std::int64_t>();
    clf.config.edge.pos_dim = jc.at("pos_dim").get<std::int64_t>();
    clf.config.edge.deprel_dim = jc.at("deprel_dim").get<std::int64_t>();
    clf.config.edge.dir_dim = jc.at("dir_dim").get<std::int64_t>();
    clf.config.labels = jc.at("labels").get<std::vector<std::string>>();

    const auto& jv = mf.header.at("vocab");
    clf.encoder.embedder.config = clf.config.edge;
    clf.encoder.embedder.dropout_rate = clf.config.dropout_rate;
    clf.encoder.embedder.lemma =
        EmbeddingTable(vocab_from_json(jv.at("lemma")), mf.tensor("edge.lemma"), true);
    clf.encoder.embedder.pos =
        EmbeddingTable(vocab_from_json(jv.at("pos")), mf.tensor("edge.pos"), true);
    clf.encoder.embedder.deprel =
        EmbeddingTable(vocab_from_json(jv.at("deprel")), mf.tensor("edge.deprel"), true);
    clf.encoder.embedder.dir =
        EmbeddingTable(vocab_from_json(jv.at("dir")), mf.tensor("edge.dir"), true);

    clf.encoder.lstm.num_layers = 2;
    clf.encoder.lstm.input_dim = clf.config.edge.edge_dim();
    clf.encoder.lstm.hidden_dim = clf.config.hidden_dim;
    for (int l = 0; l < 2; ++l) {
        const std::string p = "lstm." + std::to_string(l) + ".";
        LstmLayerParams lp;
        lp.wx = Parameter(mf.tensor(p + "wx"));
        lp.wh = Parameter(mf.tensor(p + "wh"));
        lp.b = Parameter(mf.tensor(p + "b"));
        clf.encoder.lstm.layers.push_back(std::move(lp));
    }

    if (clf.config.arch != Arch::Npb) {
        clf.word_table =
            EmbeddingTable(vocab_from_json(jv.at("word")), mf.tensor("word_table"), true);
    }
    if (clf.config.arch == Arch::LexNetH) {
        clf.hidden_w = Parameter(mf.tensor("hidden.w"));
        clf.hidden_b = Parameter(mf.tensor("hidden.b"));
    }
    clf.head_w = Parameter(mf.tensor("head.w"));
    clf.head_b = Parameter(mf.tensor("head.b"));

    if (mf.header.contains("pp")) {
        clf.pairpath =
            std::make_shared<const PairPathModel>(PairPathModel::extract_from(mf, "pp"));
    }
    return clf;
}

}  // namespace pathrel
