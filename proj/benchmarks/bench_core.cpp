#include <benchmark/benchmark.h>

#include <sstream>

#include "pathrel/classifier.hpp"
#include "pathrel/deppath.hpp"
#include "pathrel/embeddings.hpp"
#include "pathrel/lstm.hpp"
#include "pathrel/nn.hpp"
#include "pathrel/pairpath.hpp"

using namespace pathrel;

namespace {

EmbeddingTable bench_words() {
    std::ostringstream os;
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        os << "w" << i;
        for (int d = 0; d < 50; ++d) os << ' ' << rng.uniform(-1.0, 1.0);
        os << '\n';
    }
    std::istringstream is(os.str());
    return load_embeddings(is, 50);
}

PathLexicon bench_lexicon(std::int64_t n) {
    PathLexicon lex;
    for (std::int64_t i = 0; i < n; ++i) {
        lex.add("X/NOUN/r" + std::to_string(i) + "/> v/VERB/ROOT/- Y/NOUN/dobj/<", 5 + i % 13);
    }
    return lex;
}

}  // namespace

static void BM_AffineForward(benchmark::State& state) {
    Rng rng(2);
    const std::int64_t n = state.range(0);
    Tensor x = init_uniform({n, 100}, 1.0, rng);
    Tensor w = init_uniform({100, 100}, 1.0, rng);
    Tensor b = init_uniform({100}, 1.0, rng);
    for (auto _ : state) {
        Tensor y = affine(x, w, b);
        benchmark::DoNotOptimize(y.v.data());
    }
}
BENCHMARK(BM_AffineForward)->Arg(1)->Arg(16)->Arg(100);

static void BM_LstmEncodePath(benchmark::State& state) {
    Rng rng(3);
    LstmStack stack = LstmStack::make(2, 60, 60, rng);
    std::vector<Tensor> seq;
    for (int t = 0; t < 4; ++t) seq.push_back(init_uniform({60}, 1.0, rng));
    for (auto _ : state) {
        Tensor h = lstm_forward(stack, seq);
        benchmark::DoNotOptimize(h.v.data());
    }
}
BENCHMARK(BM_LstmEncodePath);

static void BM_LstmBackward(benchmark::State& state) {
    Rng rng(4);
    LstmStack stack = LstmStack::make(2, 60, 60, rng);
    std::vector<Tensor> seq;
    for (int t = 0; t < 4; ++t) seq.push_back(init_uniform({60}, 1.0, rng));
    Tensor d_top = init_uniform({60}, 1.0, rng);
    for (auto _ : state) {
        LstmTrace trace;
        lstm_forward(stack, seq, &trace);
        lstm_backward(stack, trace, d_top);
        benchmark::DoNotOptimize(stack.layers[0].wx.grad.v.data());
    }
}
BENCHMARK(BM_LstmBackward);

static void BM_AdamStep(benchmark::State& state) {
    Rng rng(5);
    Parameter p(init_uniform({state.range(0)}, 1.0, rng));
    for (auto _ : state) {
        for (std::size_t i = 0; i < p.grad.v.size(); ++i) p.grad.v[i] = Real(1e-3);
        adam_update(p, AdamConfig{});
        benchmark::DoNotOptimize(p.value.v.data());
    }
}
BENCHMARK(BM_AdamStep)->Arg(1000)->Arg(100000);

static void BM_ExtractPath(benchmark::State& state) {
    ParsedSentence s;
    const int n = static_cast<int>(state.range(0));
    for (int i = 1; i <= n; ++i) {
        s.tokens.push_back({i, "t" + std::to_string(i), "NOUN", i == 1 ? 0 : i - 1,
                            i == 1 ? "ROOT" : "dep"});
    }
    for (auto _ : state) {
        auto p = extract_path(s, 1, n, n + 1);
        benchmark::DoNotOptimize(p->edges.size());
    }
}
BENCHMARK(BM_ExtractPath)->Arg(5)->Arg(12);

static void BM_NegativeSamplerDraw(benchmark::State& state) {
    PathLexicon lex = bench_lexicon(state.range(0));
    NegativeSampler sampler(lex, 5);
    Rng rng(6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sampler.draw(rng));
    }
}
BENCHMARK(BM_NegativeSamplerDraw)->Arg(100)->Arg(30000);

static void BM_PairRepr(benchmark::State& state) {
    PairPathModel model = PairPathModel::init(bench_words(), bench_lexicon(500), 100, 7);
    for (auto _ : state) {
        Tensor rep = model.pair_repr("w3", "w17");
        benchmark::DoNotOptimize(rep.v.data());
    }
}
BENCHMARK(BM_PairRepr);

static void BM_PredictTopPaths(benchmark::State& state) {
    PairPathModel model = PairPathModel::init(bench_words(), bench_lexicon(state.range(0)), 100, 8);
    for (auto _ : state) {
        auto out = model.predict_top_paths("w3", "w17", 5);
        benchmark::DoNotOptimize(out.size());
    }
}
BENCHMARK(BM_PredictTopPaths)->Arg(1000)->Arg(30000);

static void BM_TrainingInstanceBackward(benchmark::State& state) {
    PairPathModel model = PairPathModel::init(bench_words(), bench_lexicon(500), 100, 9);
    const std::vector<std::int64_t> negs = {2, 7, 19, 44, 101};
    for (auto _ : state) {
        benchmark::DoNotOptimize(pairpath_instance_backward(model, 3, 17, 12, negs, 0.01));
    }
}
BENCHMARK(BM_TrainingInstanceBackward);

BENCHMARK_MAIN();
