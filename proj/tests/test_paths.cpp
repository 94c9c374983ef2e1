#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "pathrel/deppath.hpp"
#include "pathrel/triples.hpp"
#include "support/fixtures.hpp"
#include "support/treegen.hpp"

using namespace pathrel;

TEST_CASE("worked example: dog/mammal path") {
    ParsedSentence s = fixtures::dog_mammal_sentence();
    auto p = extract_path(s, 2, 5, 5);
    REQUIRE(p.has_value());
    CHECK(p->render() == "X/NOUN/nsubj/> be/VERB/ROOT/- Y/NOUN/attr/<");
    CHECK(p->is_canonical());
}

TEST_CASE("endpoint-as-LCA renders the dash on the endpoint") {
    ParsedSentence s;
    s.tokens.push_back({1, "guard", "NOUN", 2, "compound"});
    s.tokens.push_back({2, "dog", "NOUN", 0, "ROOT"});
    auto p = extract_path(s, 1, 2, 5);
    REQUIRE(p.has_value());
    CHECK(p->render() == "X/NOUN/compound/> Y/NOUN/ROOT/-");

    auto q = extract_path(s, 2, 1, 5);
    REQUIRE(q.has_value());
    CHECK(q->render() == "X/NOUN/ROOT/- Y/NOUN/compound/<");
}

TEST_CASE("max_nodes filters long paths") {
    ParsedSentence s = fixtures::dog_mammal_sentence();
    CHECK(!extract_path(s, 2, 5, 2).has_value());
    CHECK(extract_path(s, 2, 5, 3).has_value());
}

TEST_CASE("extract_path index errors") {
    ParsedSentence s = fixtures::dog_mammal_sentence();
    CHECK_THROWS_AS(extract_path(s, 0, 5, 5), std::out_of_range);
    CHECK_THROWS_AS(extract_path(s, 2, 6, 5), std::out_of_range);
    CHECK_THROWS_AS(extract_path(s, 2, 2, 5), std::invalid_argument);
}

TEST_CASE("mirror of the worked example") {
    DepPath p = parse_path("X/NOUN/nsubj/> be/VERB/ROOT/- Y/NOUN/attr/<");
    CHECK(mirror(p).render() == "X/NOUN/attr/> be/VERB/ROOT/- Y/NOUN/nsubj/<");
    CHECK(mirror(mirror(p)) == p);
}

TEST_CASE("mirror is an involution preserving the dash count") {
    Rng rng(401);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        ParsedSentence s = treegen::random_tree(2 + static_cast<std::int64_t>(rng.below(9)), rng);
        const std::int64_t n = static_cast<std::int64_t>(s.tokens.size());
        const std::int64_t i = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
        std::int64_t j = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
        if (i == j) continue;
        auto p = extract_path(s, i, j, 12);
        REQUIRE(p.has_value());
        DepPath m = mirror(*p);
        CHECK(mirror(m) == *p);
        auto dashes = [](const DepPath& d) {
            int c = 0;
            for (const auto& e : d.edges) c += e.dir == "-";
            return c;
        };
        CHECK(dashes(*p) == 1);
        CHECK(dashes(m) == 1);
        CHECK(m.is_canonical());
        ++checked;
    }
    CHECK(checked > 200);
}

TEST_CASE("canonical string codec round-trips") {
    Rng rng(402);
    for (int trial = 0; trial < 200; ++trial) {
        ParsedSentence s = treegen::random_tree(2 + static_cast<std::int64_t>(rng.below(9)), rng);
        const std::int64_t n = static_cast<std::int64_t>(s.tokens.size());
        const std::int64_t i = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
        std::int64_t j = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
        if (i == j) continue;
        auto p = extract_path(s, i, j, 12);
        REQUIRE(p.has_value());
        CHECK(parse_path(p->render()) == *p);
    }
    // the empty-path token parses too
    DepPath unk = parse_path(kEmptyPathToken);
    REQUIRE(unk.edges.size() == 1);
    CHECK(unk.edges[0].lemma == "UNK-lemma");
    CHECK(unk.edges[0].dir == "UNK-dir");
}

TEST_CASE("extract_path agrees with the brute-force oracle on random trees") {
    Rng rng(403);
    int agreements = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::int64_t n = 2 + static_cast<std::int64_t>(rng.below(11));
        ParsedSentence s = treegen::random_tree(n, rng);
        const std::int64_t i = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
        std::int64_t j = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
        if (i == j) j = (j % n) + 1;
        if (i == j) continue;
        const std::int64_t max_nodes = 3 + static_cast<std::int64_t>(rng.below(10));
        auto got = extract_path(s, i, j, max_nodes);
        auto expected = treegen::brute_force_path(s, i, j, max_nodes);
        CHECK(got.has_value() == expected.has_value());
        if (got && expected) {
            CHECK(got->render() == expected->render());
            ++agreements;
        }
    }
    CHECK(agreements > 100);
}

TEST_CASE("extract_triples on the fixture emits both orientations") {
    ParsedSentence s = fixtures::dog_mammal_sentence();
    Vocabulary vocab;
    vocab.add("dog");
    vocab.add("mammal");
    TripleStore store = extract_triples({s}, vocab, 5);
    CHECK(store.size() == 2);
    CHECK(store.count("dog", "mammal", "X/NOUN/nsubj/> be/VERB/ROOT/- Y/NOUN/attr/<") == 1);
    CHECK(store.count("mammal", "dog", "X/NOUN/attr/> be/VERB/ROOT/- Y/NOUN/nsubj/<") == 1);

    TripleStore twice = extract_triples({s, s}, vocab, 5);
    CHECK(twice.count("dog", "mammal", "X/NOUN/nsubj/> be/VERB/ROOT/- Y/NOUN/attr/<") == 2);
}

TEST_CASE("three nouns in range give six ordered triples") {
    ParsedSentence s;
    s.tokens.push_back({1, "cat", "NOUN", 2, "nsubj"});
    s.tokens.push_back({2, "be", "VERB", 0, "ROOT"});
    s.tokens.push_back({3, "pet", "NOUN", 2, "attr"});
    s.tokens.push_back({4, "fur", "NOUN", 3, "conj"});
    Vocabulary vocab;
    for (const char* w : {"cat", "pet", "fur"}) vocab.add(w);
    TripleStore store = extract_triples({s}, vocab, 5);
    CHECK(store.size() == 6);
}

TEST_CASE("store satisfies mirror symmetry") {
    Rng rng(404);
    std::vector<ParsedSentence> corpus;
    for (int k = 0; k < 50; ++k) {
        corpus.push_back(treegen::random_tree(3 + static_cast<std::int64_t>(rng.below(8)), rng));
    }
    Vocabulary vocab;
    for (const auto& w : treegen::kLemmas) vocab.add(w);
    TripleStore store = extract_triples(corpus, vocab, 5);
    for (const auto& [key, count] : store.entries()) {
        CHECK(store.count(key.w2, key.w1, mirror_string(key.path)) == count);
    }
}

TEST_CASE("prune drops rare paths and caps the lexicon with lexicographic ties") {
    TripleStore store;
    for (int k = 0; k < 5; ++k) store.add("a", "b", "X/N/r/> Y/N/s/-", 1);
    for (int k = 0; k < 4; ++k) store.add("c", "d", "X/N/q/> Y/N/t/-", 1);
    auto pr = prune(store, 5, 30000);
    CHECK(pr.store.count("a", "b", "X/N/r/> Y/N/s/-") == 5);
    CHECK(pr.store.count("c", "d", "X/N/q/> Y/N/t/-") == 0);
    CHECK(pr.lexicon.contains("X/N/r/> Y/N/s/-"));
    CHECK(!pr.lexicon.contains("X/N/q/> Y/N/t/-"));

    TripleStore tied;
    tied.add("a", "b", "pB/N/r/> Y/N/s/-", 9);
    tied.add("a", "b", "pA/N/r/> Y/N/s/-", 9);
    tied.add("a", "b", "pC/N/r/> Y/N/s/-", 1);
    auto pr2 = prune(tied, 1, 2);
    CHECK(pr2.lexicon.size() == 3);  // UNK + 2
    CHECK(pr2.lexicon.path(1) == "pA/N/r/> Y/N/s/-");
    CHECK(pr2.lexicon.path(2) == "pB/N/r/> Y/N/s/-");
    CHECK(!pr2.lexicon.contains("pC/N/r/> Y/N/s/-"));
    // below-cap path still present in the store view for classifier lookup
    CHECK(pr2.store.count("a", "b", "pC/N/r/> Y/N/s/-") == 1);
}

TEST_CASE("paths_for_pair falls back to the empty path") {
    ParsedSentence s = fixtures::dog_mammal_sentence();
    Vocabulary vocab;
    vocab.add("dog");
    vocab.add("mammal");
    TripleStore store = extract_triples({s}, vocab, 5);

    auto unseen = paths_for_pair(store, "cat", "dog");
    REQUIRE(unseen.size() == 1);
    CHECK(unseen[0].first == kEmptyPathToken);
    CHECK(unseen[0].second == 1);

    auto seen = paths_for_pair(store, "dog", "mammal");
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].first == "X/NOUN/nsubj/> be/VERB/ROOT/- Y/NOUN/attr/<");

    auto reversed = paths_for_pair(store, "mammal", "dog");
    REQUIRE(reversed.size() == 1);
    CHECK(reversed[0].first == mirror_string(seen[0].first));
}

TEST_CASE("triple store TSV round-trips sorted") {
    TripleStore store;
    store.add("b", "a", "X/N/r/> Y/N/s/-", 2);
    store.add("a", "b", "X/N/s/> Y/N/r/-", 7);
    std::ostringstream os;
    store.save_tsv(os);
    CHECK(os.str() ==
          "a\tb\tX/N/s/> Y/N/r/-\t7\n"
          "b\ta\tX/N/r/> Y/N/s/-\t2\n");
    std::istringstream is(os.str());
    CHECK(TripleStore::load_tsv(is) == store);
}

TEST_CASE("lexicon TSV round-trips") {
    PathLexicon lex;
    lex.add("X/N/a/> Y/N/b/-", 12);
    lex.add("X/N/c/> Y/N/d/-", 5);
    std::ostringstream os;
    lex.save_tsv(os);
    std::istringstream is(os.str());
    PathLexicon lex2 = PathLexicon::load_tsv(is);
    CHECK(lex == lex2);
    CHECK(lex2.path(0) == kEmptyPathToken);
    CHECK(lex2.total_count(1) == 12);
}
