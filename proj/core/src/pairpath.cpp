#include "pathrel/pairpath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pathrel/deppath.hpp"
#include "pathrel/model_io.hpp"

namespace pathrel {

NegativeSampler::NegativeSampler(const PathLexicon& lexicon, std::int64_t n) : n_(n) {
    if (n < 1) throw std::invalid_argument("NegativeSampler: n must be >= 1");
    const std::int64_t size = lexicon.size();
    if (size < 2) throw std::invalid_argument("NegativeSampler: empty lexicon");
    cdf_.resize(static_cast<std::size_t>(size - 1));
    double total = 0.0;
    for (std::int64_t id = 1; id < size; ++id) {
        total += std::pow(static_cast<double>(lexicon.total_count(id)), 0.75);
        cdf_[static_cast<std::size_t>(id - 1)] = total;
    }
    if (total <= 0.0) throw std::invalid_argument("NegativeSampler: zero path counts");
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
}

double NegativeSampler::probability(std::int64_t id) const {
    if (id < 1 || id > static_cast<std::int64_t>(cdf_.size())) return 0.0;
    const double hi = cdf_[static_cast<std::size_t>(id - 1)];
    const double lo = id == 1 ? 0.0 : cdf_[static_cast<std::size_t>(id - 2)];
    return hi - lo;
}

std::int64_t NegativeSampler::draw(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t idx = static_cast<std::size_t>(it - cdf_.begin());
    return static_cast<std::int64_t>(std::min(idx, cdf_.size() - 1)) + 1;
}

std::int64_t NegativeSampler::draw_avoiding(Rng& rng, std::int64_t positive) const {
    std::int64_t id = draw(rng);
    for (int attempt = 0; attempt < 10 && id == positive; ++attempt) id = draw(rng);
    return id;
}

PairPathModel PairPathModel::init(EmbeddingTable word_table, PathLexicon lexicon,
                                  std::int64_t hidden_dim, std::uint64_t seed) {
    if (word_table.trainable) {
        throw std::invalid_argument("PairPathModel: word table must be frozen");
    }
    PairPathModel m;
    m.config.hidden_dim = hidden_dim;
    m.config.word_dim = word_table.dim;
    m.config.seed = seed;
    m.word_table = std::move(word_table);
    m.lexicon = std::move(lexicon);

    Rng rng(seed);
    // draw order: W1, b1, W2, b2, then the path table
    m.w1 = Parameter(init_glorot(hidden_dim, 2 * m.config.word_dim, rng));
    m.b1 = Parameter(Tensor::zeros({hidden_dim}));
    m.w2 = Parameter(init_glorot(hidden_dim, hidden_dim, rng));
    m.b2 = Parameter(Tensor::zeros({hidden_dim}));
    Tensor path_rows = init_embedding(m.lexicon.size(), hidden_dim, rng);
    m.path_table = EmbeddingTable(m.lexicon.vocab(), std::move(path_rows), /*trainable=*/true);
    return m;
}

Tensor PairPathModel::pair_repr_ids(std::int64_t id1, std::int64_t id2) const {
    const std::int64_t dw = config.word_dim;
    Tensor x = Tensor::zeros({1, 2 * dw});
    word_table.copy_row_into(id1, x, 0);
    word_table.copy_row_into(id2, x, dw);
    Tensor h = tanh_forward(affine(x, w1, b1));
    Tensor ht = tanh_forward(affine(h, w2, b2));
    ht.shape = {config.hidden_dim};
    return ht;
}

Tensor PairPathModel::pair_repr(const std::string& word1, const std::string& word2) const {
    return pair_repr_ids(word_table.vocab.lookup(word1), word_table.vocab.lookup(word2));
}

double PairPathModel::score_id(const Tensor& pair_rep, std::int64_t path_id) const {
    if (path_id < 0 || path_id >= lexicon.size()) {
        throw std::out_of_range("score: path id " + std::to_string(path_id));
    }
    double dot = 0.0;
    const Real* row = &path_table.rows.value.v[static_cast<std::size_t>(path_id * config.hidden_dim)];
    for (std::int64_t k = 0; k < config.hidden_dim; ++k) dot += row[k] * pair_rep.at(k);
    return sigmoid(dot);
}

double PairPathModel::score(const std::string& word1, const std::string& word2,
                            const std::string& path) const {
    if (!lexicon.contains(path)) throw DataError("score: path not in lexicon: " + path);
    return score_id(pair_repr(word1, word2), lexicon.lookup(path));
}

Tensor PairPathModel::pseudo_path_features(const std::string& word1,
                                           const std::string& word2) const {
    const std::int64_t hd = config.hidden_dim;
    Tensor fwd = pair_repr(word1, word2);
    Tensor rev = pair_repr(word2, word1);
    Tensor out = Tensor::zeros({2 * hd});
    for (std::int64_t k = 0; k < hd; ++k) {
        out.at(k) = fwd.at(k);
        out.at(hd + k) = rev.at(k);
    }
    return out;
}

std::vector<PairPathModel::ScoredPath> PairPathModel::predict_top_paths(
    const std::string& word1, const std::string& word2, std::int64_t k) const {
    if (k < 1) throw std::invalid_argument("predict_top_paths: k must be >= 1");
    const std::int64_t candidates = lexicon.size() - 1;
    if (k > candidates) {
        throw std::invalid_argument("predict_top_paths: k exceeds lexicon size");
    }

    auto top_half = [&](const std::string& xw, const std::string& yw, bool mirrored) {
        Tensor rep = pair_repr(xw, yw);
        std::vector<std::int64_t> ids(static_cast<std::size_t>(candidates));
        std::iota(ids.begin(), ids.end(), std::int64_t{1});
        std::vector<double> scores(static_cast<std::size_t>(lexicon.size()), 0.0);
        for (std::int64_t id = 1; id < lexicon.size(); ++id) {
            scores[static_cast<std::size_t>(id)] = score_id(rep, id);
        }
        std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(),
                          [&](std::int64_t a, std::int64_t b) {
                              const double sa = scores[static_cast<std::size_t>(a)];
                              const double sb = scores[static_cast<std::size_t>(b)];
                              if (sa != sb) return sa > sb;
                              return a < b;
                          });
        std::vector<ScoredPath> out;
        for (std::int64_t r = 0; r < k; ++r) {
            const std::int64_t id = ids[static_cast<std::size_t>(r)];
            std::string path = lexicon.path(id);
            if (mirrored) path = mirror_string(path);
            out.push_back({std::move(path), scores[static_cast<std::size_t>(id)]});
        }
        return out;
    };

    std::vector<ScoredPath> result = top_half(word1, word2, false);
    std::vector<ScoredPath> rev = top_half(word2, word1, true);
    result.insert(result.end(), std::make_move_iterator(rev.begin()),
                  std::make_move_iterator(rev.end()));
    return result;
}

double pairpath_instance_backward(PairPathModel& model, std::int64_t word1_id,
                                  std::int64_t word2_id, std::int64_t path_id,
                                  const std::vector<std::int64_t>& negative_ids,
                                  double grad_scale) {
    const std::int64_t dw = model.config.word_dim;
    const std::int64_t hd = model.config.hidden_dim;

    Tensor x = Tensor::zeros({1, 2 * dw});
    model.word_table.copy_row_into(word1_id, x, 0);
    model.word_table.copy_row_into(word2_id, x, dw);
    Tensor h = tanh_forward(affine(x, model.w1, model.b1));
    Tensor ht = tanh_forward(affine(h, model.w2, model.b2));

    Tensor& path_rows = model.path_table.rows.value;
    Tensor& path_grad = model.path_table.rows.grad;
    auto row = [&](std::int64_t id) {
        return &path_rows.v[static_cast<std::size_t>(id * hd)];
    };
    auto grow = [&](std::int64_t id) {
        return &path_grad.v[static_cast<std::size_t>(id * hd)];
    };

    auto dot_ht = [&](const Real* r) {
        double d = 0.0;
        for (std::int64_t k = 0; k < hd; ++k) d += r[k] * ht.at(0, k);
        return d;
    };

    Tensor dht = Tensor::zeros({1, hd});
    const double s_pos = dot_ht(row(path_id));
    double loss = -log_sigmoid(s_pos);
    {
        const double coeff = (sigmoid(s_pos) - 1.0) * grad_scale;
        Real* g = grow(path_id);
        const Real* r = row(path_id);
        for (std::int64_t k = 0; k < hd; ++k) {
            g[k] += static_cast<Real>(coeff * ht.at(0, k));
            dht.at(0, k) += static_cast<Real>(coeff * r[k]);
        }
    }
    for (std::int64_t neg : negative_ids) {
        const double s_neg = dot_ht(row(neg));
        loss -= log_sigmoid(-s_neg);
        const double coeff = sigmoid(s_neg) * grad_scale;
        Real* g = grow(neg);
        const Real* r = row(neg);
        for (std::int64_t k = 0; k < hd; ++k) {
            g[k] += static_cast<Real>(coeff * ht.at(0, k));
            dht.at(0, k) += static_cast<Real>(coeff * r[k]);
        }
    }

    Tensor da2 = tanh_backward(ht, dht);
    Tensor dh = affine_backward(h, model.w2, model.b2, da2);
    Tensor da1 = tanh_backward(h, dh);
    affine_backward(x, model.w1, model.b1, da1);  // dx discarded: word rows stay frozen
    return loss;
}

namespace {

struct TripleInstance {
    std::int64_t w1 = 0, w2 = 0, path = 0;
};

std::vector<TripleInstance> training_instances(const PairPathModel& model,
                                               const TripleStore& store) {
    std::vector<TripleInstance> out;
    for (const auto& [key, count] : store.entries()) {
        if (!model.word_table.vocab.contains(key.w1) ||
            !model.word_table.vocab.contains(key.w2)) {
            continue;
        }
        const std::int64_t pid = model.lexicon.lookup(key.path);
        if (pid == 0) continue;  // out-of-lexicon paths are not training data
        TripleInstance inst{model.word_table.vocab.lookup(key.w1),
                            model.word_table.vocab.lookup(key.w2), pid};
        for (std::int64_t c = 0; c < count; ++c) out.push_back(inst);
    }
    return out;
}

}  // namespace

std::vector<EpochLogEntry> train_unsupervised(PairPathModel& model,
                                              const TripleStore& store,
                                              const TrainingRunConfig& cfg) {
    if (store.empty()) throw std::invalid_argument("train_unsupervised: empty store");
    if (cfg.epochs < 1 || cfg.minibatch < 1 || cfg.lr <= 0 || cfg.negatives < 1) {
        throw std::invalid_argument("train_unsupervised: config values must be positive");
    }
    std::vector<TripleInstance> instances = training_instances(model, store);
    if (instances.empty()) {
        throw std::invalid_argument(
            "train_unsupervised: no in-vocabulary, in-lexicon triples to train on");
    }

    NegativeSampler sampler(model.lexicon, cfg.negatives);

    // fixed validation subsample with fixed negatives, for the objective log
    const std::size_t eval_n = std::min<std::size_t>(instances.size(), 2000);
    Rng eval_rng(Rng::derive(cfg.seed, 0x9a1));
    std::vector<TripleInstance> eval_set;
    std::vector<std::vector<std::int64_t>> eval_negs;
    for (std::size_t s = 0; s < eval_n; ++s) {
        const auto& inst = instances[instances.size() * s / eval_n];
        eval_set.push_back(inst);
        std::vector<std::int64_t> negs;
        for (std::int64_t d = 0; d < cfg.negatives; ++d) {
            negs.push_back(sampler.draw_avoiding(eval_rng, inst.path));
        }
        eval_negs.push_back(std::move(negs));
    }
    auto objective_estimate = [&]() {
        double total = 0.0;
        for (std::size_t s = 0; s < eval_set.size(); ++s) {
            const auto& inst = eval_set[s];
            Tensor rep = model.pair_repr_ids(inst.w1, inst.w2);
            auto dot = [&](std::int64_t id) {
                double d = 0.0;
                const Real* r =
                    &model.path_table.rows.value.v[static_cast<std::size_t>(id * model.config.hidden_dim)];
                for (std::int64_t k = 0; k < model.config.hidden_dim; ++k) d += r[k] * rep.at(k);
                return d;
            };
            double obj = log_sigmoid(dot(inst.path));
            for (std::int64_t neg : eval_negs[s]) obj += log_sigmoid(-dot(neg));
            total += obj;
        }
        return total / static_cast<double>(eval_set.size());
    };

    std::vector<EpochLogEntry> log;
    log.push_back({0, objective_estimate()});

    Rng rng(cfg.seed);
    AdamConfig adam;
    adam.lr = cfg.lr;
    std::vector<Parameter*> params = {&model.w1, &model.b1, &model.w2, &model.b2,
                                      &model.path_table.rows};
    std::vector<std::size_t> order(instances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::int64_t> negs(static_cast<std::size_t>(cfg.negatives));

    for (std::int64_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        std::size_t pos = 0;
        while (pos < order.size()) {
            const std::size_t batch = std::min<std::size_t>(
                static_cast<std::size_t>(cfg.minibatch), order.size() - pos);
            const double scale = 1.0 / static_cast<double>(batch);
            for (std::size_t b = 0; b < batch; ++b) {
                const TripleInstance& inst = instances[order[pos + b]];
                for (std::int64_t d = 0; d < cfg.negatives; ++d) {
                    negs[static_cast<std::size_t>(d)] = sampler.draw_avoiding(rng, inst.path);
                }
                pairpath_instance_backward(model, inst.w1, inst.w2, inst.path, negs, scale);
            }
            for (Parameter* p : params) adam_update(*p, adam);
            pos += batch;
        }
        log.push_back({epoch, objective_estimate()});
    }
    model.config.trained_epochs += cfg.epochs;
    model.config.final_objective_estimate = log.back().objective_estimate;
    return log;
}

void PairPathModel::embed_into(ModelFile& mf, const std::string& prefix) const {
    nlohmann::json block;
    block["config"] = {{"hidden_dim", config.hidden_dim},
                       {"word_dim", config.word_dim},
                       {"seed", config.seed},
                       {"trained_epochs", config.trained_epochs},
                       {"final_objective_estimate", config.final_objective_estimate},
                       {"init", "glorot-uniform weights, zero biases, uniform(+-0.5/dim) embeddings"}};
    nlohmann::json words = nlohmann::json::array();
    for (std::int64_t id = 0; id < word_table.vocab.size(); ++id) {
        words.push_back(word_table.vocab.token(id));
    }
    block["word_vocab"] = std::move(words);
    nlohmann::json paths = nlohmann::json::array();
    nlohmann::json counts = nlohmann::json::array();
    for (std::int64_t id = 0; id < lexicon.size(); ++id) {
        paths.push_back(lexicon.path(id));
        counts.push_back(lexicon.total_count(id));
    }
    block["lexicon_paths"] = std::move(paths);
    block["lexicon_counts"] = std::move(counts);
    mf.header[prefix.empty() ? "pairpath" : prefix] = std::move(block);

    const std::string tp = prefix.empty() ? "" : prefix + ".";
    mf.add_tensor(tp + "word_table", word_table.rows.value);
    mf.add_tensor(tp + "W1", w1.value);
    mf.add_tensor(tp + "b1", b1.value);
    mf.add_tensor(tp + "W2", w2.value);
    mf.add_tensor(tp + "b2", b2.value);
    mf.add_tensor(tp + "path_table", path_table.rows.value);
}

PairPathModel PairPathModel::extract_from(const ModelFile& mf, const std::string& prefix) {
    const auto& block = mf.header.at(prefix.empty() ? "pairpath" : prefix);
    const auto& cfg = block.at("config");

    const auto& words = block.at("word_vocab");
    Vocabulary wv(words.at(0).get<std::string>());
    for (std::size_t i = 1; i < words.size(); ++i) wv.add(words[i].get<std::string>());

    PathLexicon lex;
    const auto& paths = block.at("lexicon_paths");
    const auto& counts = block.at("lexicon_counts");
    for (std::size_t i = 1; i < paths.size(); ++i) {
        lex.add(paths[i].get<std::string>(), counts[i].get<std::int64_t>());
    }

    const std::string tp = prefix.empty() ? "" : prefix + ".";
    PairPathModel m;
    m.config.hidden_dim = cfg.at("hidden_dim").get<std::int64_t>();
    m.config.word_dim = cfg.at("word_dim").get<std::int64_t>();
    m.config.seed = cfg.at("seed").get<std::uint64_t>();
    m.config.trained_epochs = cfg.value("trained_epochs", std::int64_t{0});
    m.config.final_objective_estimate = cfg.value("final_objective_estimate", 0.0);
    m.word_table =
        EmbeddingTable(std::move(wv), mf.tensor(tp + "word_table"), /*trainable=*/false);
    m.w1 = Parameter(mf.tensor(tp + "W1"));
    m.b1 = Parameter(mf.tensor(tp + "b1"));
    m.w2 = Parameter(mf.tensor(tp + "W2"));
    m.b2 = Parameter(mf.tensor(tp + "b2"));
    m.path_table = EmbeddingTable(lex.vocab(), mf.tensor(tp + "path_table"), /*trainable=*/true);
    m.lexicon = std::move(lex);
    return m;
}

void PairPathModel::save(const std::string& path) const {
    ModelFile mf;
    mf.header["kind"] = "pairpath";
    embed_into(mf, "");
    mf.save(path);
}

PairPathModel PairPathModel::load(const std::string& path) {
    ModelFile mf = ModelFile::load(path);
    if (mf.header.value("kind", "") != "pairpath") {
        throw DataError("not a pairpath model: " + path);
    }
    return extract_from(mf, "");
}

}  // namespace pathrel
