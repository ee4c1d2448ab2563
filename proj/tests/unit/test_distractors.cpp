#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "cloze/distractors.hpp"
#include "cloze/error.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace cloze;

TEST_CASE("edit distance basics") {
    CHECK(levenshtein("ada ekor", "ada ekor") == 0);
    CHECK(levenshtein("abc", "") == 3);
    CHECK(levenshtein("", "abcd") == 4);
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("adu domba", "adu nasib") == 5);
}

TEST_CASE("edit distance covers the space between phrase words") {
    // Differs from "abcdef" only by the separator.
    CHECK(levenshtein("abc def", "abcdef") == 1);
}

TEST_CASE("edit distance agrees with the naive recursion on 1000 random pairs") {
    Rng rng(123);
    const std::string alphabet = "abc ";
    auto random_string = [&](std::size_t max_len) {
        std::string s;
        const std::size_t n = rng.uniform_below(max_len + 1);
        for (std::size_t i = 0; i < n; ++i)
            s.push_back(alphabet[rng.uniform_below(alphabet.size())]);
        return s;
    };
    for (int i = 0; i < 1000; ++i) {
        const std::string a = random_string(8);
        const std::string b = random_string(8);
        CHECK(levenshtein(a, b) == oracle::levenshtein_naive(a, b));
    }
}

TEST_CASE("edit distance is a metric on sampled triples") {
    Rng rng(321);
    const std::string alphabet = "abcd";
    auto random_string = [&] {
        std::string s;
        const std::size_t n = rng.uniform_below(9);
        for (std::size_t i = 0; i < n; ++i)
            s.push_back(alphabet[rng.uniform_below(alphabet.size())]);
        return s;
    };
    for (int i = 0; i < 10000; ++i) {
        const std::string a = random_string();
        const std::string b = random_string();
        const std::string c = random_string();
        const int ab = levenshtein(a, b);
        const int bc = levenshtein(b, c);
        const int ac = levenshtein(a, c);
        CHECK(ab == levenshtein(b, a));
        CHECK((ab == 0) == (a == b));
        CHECK(ac <= ab + bc);
    }
}

namespace {

std::vector<Phrase> phrases_from(const Lexicon& lex) { return lex.phrases(); }

Lexicon toy_pool() {
    // Distances from "adu domba": hand-distinct by construction.
    return Lexicon::from_entries({
        {"adu domba", "idiom", "memecah belah"},
        {"adu dombu", "idiom", "satu huruf beda"},
        {"adu tomba", "idiom", "satu huruf lain"},
        {"adu nasib", "idiom", "lima huruf beda"},
        {"panjang tangan", "idiom", "jauh sekali"},
        {"besar kepala", "idiom", "jauh juga"},
    });
}

}  // namespace

TEST_CASE("homonymy picks the closest surfaces") {
    const Lexicon lex = toy_pool();
    const auto pool = phrases_from(lex);
    const Phrase& key = *lex.find("adu domba");
    const auto picks = homonymy_distractors(key, pool, 3);
    REQUIRE(picks.size() == 3);

    // Brute-force check against the oracle ranking.
    std::vector<std::pair<std::string, int>> scored;
    for (const Phrase& p : pool) {
        if (p.id == key.id) continue;
        scored.emplace_back(p.surface, levenshtein(key.surface, p.surface));
    }
    const auto want = oracle::top_k_by(scored, 3, /*ascending=*/true);
    for (int i = 0; i < 3; ++i) CHECK(lex.at(picks[static_cast<std::size_t>(i)]).surface == want[static_cast<std::size_t>(i)]);
}

TEST_CASE("homonymy breaks distance ties by ascending surface") {
    const Lexicon lex = Lexicon::from_entries({
        {"aa bb", "idiom", "kunci utama"},
        {"aa bz", "idiom", "jarak satu"},
        {"za bb", "idiom", "jarak satu juga"},
        {"aa zz", "idiom", "jarak dua"},
    });
    const auto pool = phrases_from(lex);
    const Phrase& key = *lex.find("aa bb");
    const auto picks = homonymy_distractors(key, pool, 2);
    REQUIRE(picks.size() == 2);
    // Both candidates sit at distance 1; "aa bz" < "za bb".
    CHECK(lex.at(picks[0]).surface == "aa bz");
    CHECK(lex.at(picks[1]).surface == "za bb");
}

TEST_CASE("homonymy never returns the key") {
    const Lexicon lex = toy_pool();
    const auto pool = phrases_from(lex);
    for (const Phrase& key : pool) {
        for (PhraseId id : homonymy_distractors(key, pool, 3)) CHECK(id != key.id);
    }
}

TEST_CASE("homonymy with too small a pool names the required count") {
    const Lexicon lex = Lexicon::from_entries({
        {"aa bb", "idiom", "kunci"},
        {"aa bz", "idiom", "satu"},
    });
    const auto pool = phrases_from(lex);
    CHECK_THROWS_WITH_AS(homonymy_distractors(*lex.find("aa bb"), pool, 3),
                         doctest::Contains("3"), DataError);
}

TEST_CASE("semantic ranks a clone of the key vector first") {
    const Lexicon lex = toy_pool();
    const auto pool = phrases_from(lex);
    const Phrase& key = *lex.find("adu domba");
    RepMap reps;
    for (const Phrase& p : pool) reps[p.id] = Vec{1.0, 0.0, 0.0};
    reps[key.id] = Vec{1.0, 2.0, 3.0};
    reps[lex.find("besar kepala")->id] = Vec{2.0, 4.0, 6.0};  // cosine 1 with key
    reps[lex.find("adu nasib")->id] = Vec{-1.0, -2.0, -3.0};  // cosine -1
    const auto picks = semantic_distractors(key, pool, reps, 3);
    REQUIRE(picks.size() == 3);
    CHECK(lex.at(picks[0]).surface == "besar kepala");
    CHECK(std::find(picks.begin(), picks.end(), lex.find("adu nasib")->id) == picks.end());
}

TEST_CASE("orthogonal one-hot vectors fall back to the lexicographic tie rule") {
    const Lexicon lex = Lexicon::from_entries({
        {"cc dd", "idiom", "kunci"},
        {"bb aa", "idiom", "satu"},
        {"aa bb", "idiom", "dua"},
        {"dd cc", "idiom", "tiga"},
        {"ee ff", "idiom", "empat"},
    });
    const auto pool = phrases_from(lex);
    RepMap reps;
    for (const Phrase& p : pool) {
        Vec v(pool.size(), 0.0);
        v[static_cast<std::size_t>(p.id)] = 1.0;
        reps[p.id] = v;
    }
    const auto picks = semantic_distractors(*lex.find("cc dd"), pool, reps, 3);
    REQUIRE(picks.size() == 3);
    CHECK(lex.at(picks[0]).surface == "aa bb");
    CHECK(lex.at(picks[1]).surface == "bb aa");
    CHECK(lex.at(picks[2]).surface == "dd cc");
}

TEST_CASE("semantic top-3 equals a brute-force scan on 20 random vectors") {
    const Lexicon lex = synth::make_lexicon(20, 0);
    const auto pool = phrases_from(lex);
    Rng rng(888);
    RepMap reps;
    for (const Phrase& p : pool) {
        Vec v(6);
        for (double& x : v) x = rng.gaussian();
        reps[p.id] = v;
    }
    for (const Phrase& key : pool) {
        const auto picks = semantic_distractors(key, pool, reps, 3);
        std::vector<std::pair<std::string, double>> scored;
        for (const Phrase& p : pool) {
            if (p.id == key.id) continue;
            scored.emplace_back(p.surface, oracle::cosine_naive(reps.at(key.id), reps.at(p.id)));
        }
        const auto want = oracle::top_k_by(scored, 3, /*ascending=*/false);
        REQUIRE(picks.size() == 3);
        for (int i = 0; i < 3; ++i)
            CHECK(lex.at(picks[static_cast<std::size_t>(i)]).surface == want[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("semantic requires the key vector") {
    const Lexicon lex = toy_pool();
    const auto pool = phrases_from(lex);
    RepMap reps;
    for (const Phrase& p : pool)
        if (p.id != 0) reps[p.id] = Vec{1.0, 0.0};
    CHECK_THROWS_AS(semantic_distractors(lex.at(0), pool, reps, 3), DataError);
}

TEST_CASE("semantic skips zero vectors and counts them") {
    const Lexicon lex = toy_pool();
    const auto pool = phrases_from(lex);
    RepMap reps;
    for (const Phrase& p : pool) reps[p.id] = Vec{1.0, static_cast<double>(p.id)};
    reps[lex.find("adu nasib")->id] = Vec{0.0, 0.0};
    long skipped = 0;
    const auto picks = semantic_distractors(lex.at(0), pool, reps, 3, &skipped);
    CHECK(skipped == 1);
    CHECK(std::find(picks.begin(), picks.end(), lex.find("adu nasib")->id) == picks.end());
}

TEST_CASE("random sample from a pool of four is forced") {
    const Lexicon lex = Lexicon::from_entries({
        {"aa bb", "idiom", "satu"},
        {"cc dd", "idiom", "dua"},
        {"ee ff", "idiom", "tiga"},
        {"gg hh", "idiom", "empat"},
    });
    const auto pool = phrases_from(lex);
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        auto picks = random_distractors(lex.at(0), pool, 3, seed);
        std::sort(picks.begin(), picks.end());
        CHECK(picks == std::vector<PhraseId>{1, 2, 3});
    }
}

TEST_CASE("random sampling is reproducible per (seed, key)") {
    const Lexicon lex = synth::make_lexicon(12, 0);
    const auto pool = phrases_from(lex);
    CHECK(random_distractors(lex.at(2), pool, 3, 7) == random_distractors(lex.at(2), pool, 3, 7));
    CHECK(random_distractors(lex.at(2), pool, 3, 7) != random_distractors(lex.at(2), pool, 3, 8));
}

TEST_CASE("random sampling is close to uniform over many seeds") {
    // Key plus 10 other phrases; each non-key phrase should be drawn with
    // frequency 3/10 over 10000 seeds.
    const Lexicon lex = synth::make_lexicon(11, 0);
    const auto pool = phrases_from(lex);
    const Phrase& key = lex.at(0);
    std::map<PhraseId, int> counts;
    const int trials = 10000;
    for (int seed = 0; seed < trials; ++seed) {
        for (PhraseId id : random_distractors(key, pool, 3, static_cast<std::uint64_t>(seed))) {
            CHECK(id != key.id);
            counts[id]++;
        }
    }
    REQUIRE(counts.size() == 10u);
    for (const auto& [id, n] : counts) {
        const double freq = static_cast<double>(n) / trials;
        CHECK(freq == doctest::Approx(0.3).epsilon(0.067));  // 0.3 +- 0.02
    }
}

TEST_CASE("composition respects the declared mix") {
    const Lexicon lex = synth::make_lexicon(10, 0);
    const auto pool = phrases_from(lex);
    Rng rng(4);
    RepMap reps;
    for (const Phrase& p : pool) {
        Vec v(5);
        for (double& x : v) x = rng.gaussian();
        reps[p.id] = v;
    }
    const Phrase& key = lex.at(0);
    const auto hom = homonymy_distractors(key, pool, 3);
    const auto sem = semantic_distractors(key, pool, reps, 3);

    const CandidateSet h1s2 = compose_candidate_set(key, SetType::H1S2, pool, PoolKind::Idioms, reps, 9);
    CHECK(h1s2.key_id == key.id);
    CHECK(h1s2.distractor_ids[0] == hom[0]);
    // Remaining two come from the semantic ranking, in order.
    std::vector<PhraseId> rest{h1s2.distractor_ids[1], h1s2.distractor_ids[2]};
    std::vector<PhraseId> expect;
    for (PhraseId id : semantic_distractors(key, pool, reps, 4)) {
        if (id == hom[0]) continue;
        expect.push_back(id);
        if (expect.size() == 2) break;
    }
    CHECK(rest == expect);

    const CandidateSet s1h2 = compose_candidate_set(key, SetType::S1H2, pool, PoolKind::Idioms, reps, 9);
    CHECK(s1h2.distractor_ids[0] == sem[0]);

    const CandidateSet h3 = compose_candidate_set(key, SetType::H3, pool, PoolKind::Idioms, reps, 9);
    CHECK(std::vector<PhraseId>(h3.distractor_ids.begin(), h3.distractor_ids.end()) == hom);

    const CandidateSet s3 = compose_candidate_set(key, SetType::S3, pool, PoolKind::Idioms, reps, 9);
    CHECK(std::vector<PhraseId>(s3.distractor_ids.begin(), s3.distractor_ids.end()) == sem);
}

TEST_CASE("cross-strategy duplicate advances the later ranking") {
    // Surfaces arranged so the homonymy #1 is also the semantic #1.
    const Lexicon lex = Lexicon::from_entries({
        {"aa bb", "idiom", "kunci"},
        {"aa bc", "idiom", "dekat sekali"},
        {"zz yy", "idiom", "jauh"},
        {"zz yx", "idiom", "jauh juga"},
        {"qq ww", "idiom", "netral"},
    });
    const auto pool = phrases_from(lex);
    const Phrase& key = *lex.find("aa bb");
    RepMap reps;
    reps[key.id] = Vec{1.0, 0.0};
    reps[lex.find("aa bc")->id] = Vec{2.0, 0.0};   // cosine 1: semantic #1, also homonymy #1
    reps[lex.find("zz yy")->id] = Vec{1.0, 0.2};
    reps[lex.find("zz yx")->id] = Vec{1.0, 0.5};
    reps[lex.find("qq ww")->id] = Vec{0.0, 1.0};

    const auto hom = homonymy_distractors(key, pool, 1);
    const auto sem = semantic_distractors(key, pool, reps, 2);
    REQUIRE(hom[0] == sem[0]);  // the constructed collision

    const CandidateSet set = compose_candidate_set(key, SetType::H1S2, pool, PoolKind::Idioms, reps, 1);
    std::set<PhraseId> distinct(set.distractor_ids.begin(), set.distractor_ids.end());
    CHECK(distinct.size() == 3u);
    CHECK(set.distractor_ids[0] == hom[0]);
    // Semantic slot skipped its #1 and took #2 and #3.
    CHECK(set.distractor_ids[1] == lex.find("zz yy")->id);
}

TEST_CASE("candidate sets always satisfy distinctness and pool membership") {
    const Lexicon lex = synth::make_lexicon(8, 8);
    const auto [idioms, fixed] = partition_by_kind(lex);
    Rng rng(31);
    RepMap reps;
    for (const Phrase& p : lex.phrases()) {
        Vec v(4);
        for (double& x : v) x = rng.gaussian();
        reps[p.id] = v;
    }
    auto check_pool = [&](const std::vector<Phrase>& pool, PoolKind tag) {
        std::set<PhraseId> members;
        for (const Phrase& p : pool) members.insert(p.id);
        for (const Phrase& key : pool) {
            for (SetType st : kAllSetTypes) {
                const CandidateSet cs = compose_candidate_set(key, st, pool, tag, reps, 77);
                CHECK(cs.set_type == st);
                CHECK(cs.pool == tag);
                std::set<PhraseId> ids(cs.distractor_ids.begin(), cs.distractor_ids.end());
                CHECK(ids.size() == 3u);
                CHECK(ids.count(cs.key_id) == 0);
                for (PhraseId id : ids) CHECK(members.count(id) == 1);
            }
        }
    };
    check_pool(idioms, PoolKind::Idioms);
    check_pool(fixed, PoolKind::Fixed);
    check_pool(lex.phrases(), PoolKind::Combined);
}

TEST_CASE("combined pool can mix kinds while the key stays an idiom") {
    const Lexicon lex = synth::make_lexicon(2, 8);
    const auto pool = phrases_from(lex);
    const Phrase& key = lex.at(0);
    REQUIRE(key.kind == PhraseKind::Idiom);
    const CandidateSet cs = compose_candidate_set(key, SetType::R3, pool, PoolKind::Combined, {}, 5);
    int fixed_count = 0;
    for (PhraseId id : cs.distractor_ids)
        if (lex.at(id).kind == PhraseKind::FixedExpression) ++fixed_count;
    // 8 of the 9 non-key phrases are fixed expressions; a draw with none
    // would be a (9 choose 3) long shot, and this seed produces some.
    CHECK(fixed_count > 0);
}

TEST_CASE("phrase reps average constituent words or use the phrase token") {
    const Lexicon lex = Lexicon::from_entries({{"aa bb", "idiom", "x y"}});
    EmbeddingTable t(2);
    t.insert("aa", Vec{1.0, 0.0});
    t.insert("bb", Vec{0.0, 1.0});
    t.insert("aa_bb", Vec{5.0, 5.0});
    const RepMap by_words = phrase_reps(lex.phrases(), t, false);
    REQUIRE(by_words.count(0) == 1);
    CHECK(by_words.at(0)[0] == doctest::Approx(0.5));
    const RepMap by_token = phrase_reps(lex.phrases(), t, true);
    CHECK(by_token.at(0)[0] == doctest::Approx(5.0));
}

TEST_CASE("phrase reps leave uncovered phrases out") {
    const Lexicon lex = Lexicon::from_entries({
        {"aa bb", "idiom", "x y"},
        {"cc dd", "idiom", "x y"},
    });
    EmbeddingTable t(2);
    t.insert("aa", Vec{1.0, 0.0});
    const RepMap reps = phrase_reps(lex.phrases(), t, false);
    CHECK(reps.count(0) == 1);
    CHECK(reps.count(1) == 0);
}

TEST_CASE("matrix dumps label rows and columns by surface") {
    const Lexicon lex = Lexicon::from_entries({
        {"aa bb", "idiom", "x y"},
        {"aa bc", "idiom", "x y"},
    });
    std::ostringstream dist;
    dump_distance_matrix(lex.phrases(), dist);
    CHECK(dist.str().find("aa bb") != std::string::npos);
    CHECK(dist.str().find("1") != std::string::npos);  // d("aa bb","aa bc") = 1

    RepMap reps;
    reps[0] = Vec{1.0, 0.0};
    reps[1] = Vec{1.0, 0.0};
    std::ostringstream sim;
    dump_similarity_matrix(lex.phrases(), reps, sim);
    CHECK(sim.str().find("aa bc") != std::string::npos);
}

TEST_CASE("set type and pool names round-trip") {
    CHECK(set_type_name(SetType::R3) == "3RD");
    CHECK(set_type_name(SetType::H3) == "3HD");
    CHECK(set_type_name(SetType::S3) == "3SD");
    CHECK(set_type_name(SetType::H1S2) == "1H2S");
    CHECK(set_type_name(SetType::S1H2) == "1S2H");
    for (SetType t : kAllSetTypes) CHECK(parse_set_type(set_type_name(t)) == t);
    CHECK_THROWS_AS(parse_set_type("3XD"), ConfigError);

    for (PoolKind p : kAllPools) CHECK(parse_pool(pool_name(p)) == p);
    CHECK_THROWS_AS(parse_pool("nope"), ConfigError);
}
