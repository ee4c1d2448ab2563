#include "doctest.h"

#include <cmath>
#include <sstream>

#include "cloze/embeddings.hpp"
#include "cloze/error.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace cloze;

TEST_CASE("parses a two-token three-dim table") {
    std::istringstream in("2 3\na 1 0 0\nb 0 1 0\n");
    const EmbeddingTable t = parse_embeddings(in, "mem");
    CHECK(t.dim() == 3);
    CHECK(t.size() == 2);
    REQUIRE(t.find("a") != nullptr);
    CHECK((*t.find("a"))[0] == 1.0);
    CHECK((*t.find("b"))[1] == 1.0);
    CHECK(t.find("c") == nullptr);
}

TEST_CASE("wrong component count names the line") {
    std::istringstream in("2 3\na 1 0 0\nb 0 1\n");
    CHECK_THROWS_WITH_AS(parse_embeddings(in, "mem"), doctest::Contains("mem:3"), DataError);
}

TEST_CASE("vocab size disagreeing with the body is an error") {
    std::istringstream in("3 2\na 1 0\nb 0 1\n");
    CHECK_THROWS_AS(parse_embeddings(in, "mem"), DataError);
}

TEST_CASE("duplicate token is an error") {
    std::istringstream in("2 2\na 1 0\na 0 1\n");
    CHECK_THROWS_AS(parse_embeddings(in, "mem"), DataError);
}

TEST_CASE("save then load reproduces the table exactly") {
    EmbeddingTable t(4);
    Rng rng(5);
    for (int i = 0; i < 40; ++i) {
        Vec v(4);
        for (double& x : v) x = rng.gaussian(0.0, 1.0) * std::pow(10.0, static_cast<double>(i % 7) - 3);
        t.insert("tok" + synth::num3(i), std::move(v));
    }
    std::ostringstream out;
    dump_embeddings(t, out);
    std::istringstream in(out.str());
    const EmbeddingTable back = parse_embeddings(in, "mem");
    CHECK(back == t);
}

TEST_CASE("insert rejects dimension mismatches") {
    EmbeddingTable t(3);
    CHECK_THROWS_AS(t.insert("a", Vec{1.0, 2.0}), DataError);
}

TEST_CASE("mean of two present words") {
    EmbeddingTable t(2);
    t.insert("a", Vec{1.0, 0.0});
    t.insert("b", Vec{0.0, 1.0});
    const Vec m = mean_of_words({"a", "b"}, t);
    CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mean skips missing words and counts them") {
    EmbeddingTable t(2);
    t.insert("a", Vec{2.0, 4.0});
    long misses = 0;
    const Vec m = mean_of_words({"a", "zzz", "qqq"}, t, &misses);
    CHECK(misses == 2);
    CHECK(m[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("mean with no word present fails") {
    EmbeddingTable t(2);
    t.insert("a", Vec{1.0, 1.0});
    CHECK_THROWS_WITH_AS(mean_of_words({"xx", "yy"}, t), doctest::Contains("none of the 2 words"),
                         DataError);
}

TEST_CASE("mean matches a naive summation oracle") {
    EmbeddingTable t(8);
    Rng rng(11);
    std::vector<std::string> vocab;
    for (int i = 0; i < 30; ++i) {
        vocab.push_back("w" + synth::num3(i));
        Vec v(8);
        for (double& x : v) x = rng.gaussian();
        t.insert(vocab.back(), std::move(v));
    }
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> words;
        const int n = 1 + static_cast<int>(rng.uniform_below(6));
        for (int i = 0; i < n; ++i) words.push_back(vocab[rng.uniform_below(vocab.size())]);
        const Vec got = mean_of_words(words, t);
        for (int d = 0; d < 8; ++d) {
            double sum = 0.0;
            for (const auto& w : words) sum += (*t.find(w))[static_cast<std::size_t>(d)];
            CHECK(got[static_cast<std::size_t>(d)] ==
                  doctest::Approx(sum / n).epsilon(1e-12));
        }
    }
}

TEST_CASE("random rep is reproducible per (seed, id) and small") {
    const Vec a = random_rep(16, 42, 3);
    const Vec b = random_rep(16, 42, 3);
    const Vec c = random_rep(16, 42, 4);
    const Vec d = random_rep(16, 43, 3);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a != d);
    REQUIRE(a.size() == 16u);
    // Gaussian(0, 0.02): all draws comfortably inside 6 sigma.
    for (double x : a) CHECK(std::abs(x) < 0.12);
}

TEST_CASE("random rep distribution has roughly the right scale") {
    double sum = 0.0;
    double sumsq = 0.0;
    const int n = 400;
    for (int id = 0; id < n; ++id) {
        const Vec v = random_rep(32, 9, id);
        for (double x : v) {
            sum += x;
            sumsq += x * x;
        }
    }
    const double count = static_cast<double>(n) * 32.0;
    const double mean = sum / count;
    const double stddev = std::sqrt(sumsq / count - mean * mean);
    CHECK(std::abs(mean) < 0.002);
    CHECK(stddev == doctest::Approx(0.02).epsilon(0.1));
}

namespace {

EmbeddingTable table_for(const Lexicon& lex) {
    EmbeddingTable t(4);
    Rng rng(77);
    auto add = [&](const std::string& w) {
        if (t.contains(w)) return;
        Vec v(4);
        for (double& x : v) x = rng.gaussian();
        t.insert(w, std::move(v));
    };
    for (const Phrase& p : lex.phrases()) {
        for (const auto& w : p.words) add(w);
        for (const auto& w : p.definition_words) add(w);
    }
    return t;
}

}  // namespace

TEST_CASE("def rep is the mean of definition word vectors") {
    const Lexicon lex = synth::make_lexicon(2, 0);
    const EmbeddingTable t = table_for(lex);
    const Phrase& p = lex.phrases()[0];
    const Vec got = build_static_rep(p, {RepMode::Def, 1, false}, t);
    const Vec want = mean_of_words(p.definition_words, t);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("lit rep is the mean of constituent word vectors") {
    const Lexicon lex = synth::make_lexicon(0, 2);
    const EmbeddingTable t = table_for(lex);
    const Phrase& p = lex.phrases()[1];
    const Vec got = build_static_rep(p, {RepMode::Lit, 1, false}, t);
    const Vec want = mean_of_words(p.words, t);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("def and lit reps ignore the seed") {
    const Lexicon lex = synth::make_lexicon(1, 1);
    const EmbeddingTable t = table_for(lex);
    CHECK(build_static_rep(lex.at(0), {RepMode::Def, 1, false}, t) ==
          build_static_rep(lex.at(0), {RepMode::Def, 999, false}, t));
    CHECK(build_static_rep(lex.at(1), {RepMode::Lit, 1, false}, t) ==
          build_static_rep(lex.at(1), {RepMode::Lit, 999, false}, t));
}

TEST_CASE("def plus random sums the two parts") {
    const Lexicon lex = synth::make_lexicon(1, 0);
    const EmbeddingTable t = table_for(lex);
    const Phrase& p = lex.at(0);
    const Vec def = build_static_rep(p, {RepMode::Def, 7, false}, t);
    const Vec rnd = random_rep(t.dim(), 7, p.id);
    const Vec sum = build_static_rep(p, {RepMode::DefPlusRandom, 7, false}, t);
    REQUIRE(sum.size() == def.size());
    for (std::size_t i = 0; i < sum.size(); ++i)
        CHECK(sum[i] == doctest::Approx(def[i] + rnd[i]).epsilon(1e-12));
}

TEST_CASE("concat mode doubles the dimension and keeps both halves") {
    const Lexicon lex = synth::make_lexicon(1, 0);
    const EmbeddingTable t = table_for(lex);
    const Phrase& p = lex.at(0);
    const Vec def = build_static_rep(p, {RepMode::Def, 7, false}, t);
    const Vec rnd = random_rep(t.dim(), 7, p.id);
    const Vec cat = build_static_rep(p, {RepMode::DefPlusRandom, 7, true}, t);
    REQUIRE(cat.size() == 2 * def.size());
    for (std::size_t i = 0; i < def.size(); ++i) {
        CHECK(cat[i] == doctest::Approx(def[i]).epsilon(1e-12));
        CHECK(cat[def.size() + i] == doctest::Approx(rnd[i]).epsilon(1e-12));
    }
}

TEST_CASE("rep parts split frozen and trainable summands by mode") {
    const Lexicon lex = synth::make_lexicon(1, 1);
    const EmbeddingTable t = table_for(lex);
    const Phrase& p = lex.at(0);

    const RepParts random_only = build_static_rep_parts(p, {RepMode::Random, 3, false}, t);
    CHECK(random_only.frozen.empty());
    CHECK(random_only.trainable_init == random_rep(t.dim(), 3, p.id));

    const RepParts def_only = build_static_rep_parts(p, {RepMode::Def, 3, false}, t);
    CHECK(def_only.trainable_init.empty());
    CHECK(def_only.frozen == build_static_rep(p, {RepMode::Def, 3, false}, t));

    const RepParts both = build_static_rep_parts(p, {RepMode::DefPlusRandom, 3, false}, t);
    CHECK(both.frozen == def_only.frozen);
    CHECK(both.trainable_init == random_only.trainable_init);
}

TEST_CASE("rep mode names round-trip") {
    for (RepMode m : {RepMode::Random, RepMode::Def, RepMode::Lit, RepMode::DefPlusRandom,
                      RepMode::LitPlusRandom}) {
        CHECK(parse_rep_mode(rep_mode_name(m)) == m);
    }
    CHECK_THROWS_AS(parse_rep_mode("bogus"), ConfigError);
}
