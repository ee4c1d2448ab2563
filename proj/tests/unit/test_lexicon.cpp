#include "doctest.h"

#include <sstream>

#include "cloze/error.hpp"
#include "cloze/lexicon.hpp"
#include "support/synth.hpp"

using namespace cloze;

TEST_CASE("single well-formed record") {
    std::istringstream in(
        R"({"surface":"ada ekor","kind":"Idiom","definition":"tracking down sb. or sth. by following clues"})"
        "\n");
    const Lexicon lex = Lexicon::parse(in, "mem");
    REQUIRE(lex.size() == 1);
    const Phrase& p = lex.phrases()[0];
    CHECK(p.surface == "ada ekor");
    CHECK(p.words == std::vector<std::string>{"ada", "ekor"});
    CHECK(p.kind == PhraseKind::Idiom);
    CHECK(p.id == 0);
    CHECK(p.definition_words.front() == "tracking");
}

TEST_CASE("empty file gives an empty lexicon") {
    std::istringstream in("");
    CHECK(Lexicon::parse(in, "mem").empty());
}

TEST_CASE("duplicate surface names both lines") {
    std::istringstream in(
        R"({"surface":"padang pasir","kind":"fixed","definition":"gurun"})"
        "\n"
        R"({"surface":"padang pasir","kind":"fixed","definition":"gurun lagi"})"
        "\n");
    try {
        Lexicon::parse(in, "mem");
        FAIL("duplicate surface was accepted");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 1") != std::string::npos);
        CHECK(msg.find("2") != std::string::npos);
    }
}

TEST_CASE("malformed line names the line number") {
    std::istringstream in("{not json\n");
    CHECK_THROWS_WITH_AS(Lexicon::parse(in, "mem"), doctest::Contains("mem:1"), DataError);
}

TEST_CASE("single-word phrase is rejected") {
    std::istringstream in(R"({"surface":"ekor","kind":"idiom","definition":"x"})"
                          "\n");
    CHECK_THROWS_AS(Lexicon::parse(in, "mem"), DataError);
}

TEST_CASE("missing definition is rejected") {
    std::istringstream in(R"({"surface":"ada ekor","kind":"idiom","definition":""})"
                          "\n");
    CHECK_THROWS_AS(Lexicon::parse(in, "mem"), DataError);
}

TEST_CASE("unknown keys are ignored") {
    std::istringstream in(
        R"({"surface":"ada ekor","kind":"idiom","definition":"d e f","note":"extra","n":3})"
        "\n");
    CHECK(Lexicon::parse(in, "mem").size() == 1);
}

TEST_CASE("surfaces are normalized to lowercase single-space form") {
    std::istringstream in(R"({"surface":"  Ada   EKOR ","kind":"idiom","definition":"x y"})"
                          "\n");
    const Lexicon lex = Lexicon::parse(in, "mem");
    CHECK(lex.phrases()[0].surface == "ada ekor");
    CHECK(lex.find("ada ekor") != nullptr);
    CHECK(lex.find("Ada Ekor") == nullptr);  // lookups use the normalized form
}

TEST_CASE("partition_by_kind splits disjointly and preserves order") {
    const Lexicon lex = synth::make_lexicon(3, 3);
    const auto [idioms, fixed] = partition_by_kind(lex);
    REQUIRE(idioms.size() == 3);
    REQUIRE(fixed.size() == 3);
    CHECK(idioms.size() + fixed.size() == lex.size());
    for (const Phrase& p : idioms) CHECK(p.kind == PhraseKind::Idiom);
    for (const Phrase& p : fixed) CHECK(p.kind == PhraseKind::FixedExpression);
    CHECK(idioms[0].id < idioms[1].id);
    CHECK(fixed[0].id < fixed[1].id);
}

TEST_CASE("all-idiom lexicon partitions into (all, empty)") {
    const Lexicon lex = synth::make_lexicon(4, 0);
    const auto [idioms, fixed] = partition_by_kind(lex);
    CHECK(idioms.size() == 4);
    CHECK(fixed.empty());
}

TEST_CASE("a 289-phrase lexicon labeled 42/247 partitions accordingly") {
    const Lexicon lex = synth::make_lexicon(42, 247);
    REQUIRE(lex.size() == 289);
    const auto [idioms, fixed] = partition_by_kind(lex);
    CHECK(idioms.size() == 42);
    CHECK(fixed.size() == 247);
}

TEST_CASE("save then load round-trips") {
    const Lexicon lex = synth::make_lexicon(5, 7);
    std::ostringstream out;
    lex.dump(out);
    std::istringstream in(out.str());
    const Lexicon again = Lexicon::parse(in, "mem");
    REQUIRE(again.size() == lex.size());
    for (std::size_t i = 0; i < lex.size(); ++i) {
        CHECK(again.phrases()[i].surface == lex.phrases()[i].surface);
        CHECK(again.phrases()[i].kind == lex.phrases()[i].kind);
        CHECK(again.phrases()[i].definition_words == lex.phrases()[i].definition_words);
        CHECK(again.phrases()[i].id == lex.phrases()[i].id);
    }
}

TEST_CASE("at() checks bounds") {
    const Lexicon lex = synth::make_lexicon(1, 0);
    CHECK(lex.at(0).id == 0);
    CHECK_THROWS_AS(lex.at(5), DataError);
}
