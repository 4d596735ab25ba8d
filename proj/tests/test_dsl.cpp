#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "cattice/checkpoint.hpp"
#include "cattice/dsl.hpp"

using namespace cattice;
using dsl::ParseError;

namespace {

std::string fixture(const std::string& name) {
    return checkpoint::read_file(std::string(CATTICE_FIXTURE_DIR) + "/" + name);
}

} // namespace

TEST_CASE("a minimal category block parses") {
    auto doc = dsl::parse_spec("category C\n  object A\nend\n");
    REQUIRE(doc.categories.count("C") == 1);
    CHECK(doc.categories.at("C").objects == std::vector<std::string>{"A"});
    CHECK(fincat::validate_category(doc.categories.at("C")).valid());
    CHECK(doc.block_order.front() == std::pair<std::string, std::string>{"category", "C"});
}

TEST_CASE("comments and blank lines are ignored") {
    auto doc = dsl::parse_spec("# header\n\ncategory C # trailing\n  object A # why not\nend\n");
    CHECK(doc.categories.count("C") == 1);
}

TEST_CASE("a dangling object reference names the culprit and its line") {
    try {
        dsl::parse_spec("category C\n  object A\n  morphism f A Z\nend\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("'Z'") != std::string::npos);
    }
}

TEST_CASE("unknown block kinds are rejected with a location") {
    try {
        dsl::parse_spec("categoryy C\nend\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(std::string(e.what()).find("categoryy") != std::string::npos);
    }
}

TEST_CASE("duplicate identifiers per kind are rejected") {
    CHECK_THROWS_AS(dsl::parse_spec("category C\nend\ncategory C\nend\n"), ParseError);
    // same name for different kinds is fine
    CHECK_NOTHROW(dsl::parse_spec("category C\n object A\nend\nscope C\n objects x\nend\n"));
}

TEST_CASE("unknown body keys are rejected") {
    try {
        dsl::parse_spec("category C\n  object A\n  morph f A A\nend\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("morph") != std::string::npos);
    }
}

TEST_CASE("malformed composition entries are rejected") {
    try {
        dsl::parse_spec("category C\n  object A\n  morphism e A A\n  compose e e e\nend\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("unterminated blocks are rejected") {
    CHECK_THROWS_AS(dsl::parse_spec("category C\n  object A\n"), ParseError);
}

TEST_CASE("the chicken-rabbit fixture parses into one abstract block") {
    auto doc = dsl::parse_spec(fixture("chicken_rabbit.cat"));
    REQUIRE(doc.abstracts.size() == 1);
    const auto& a = doc.abstracts.at("chicken_rabbit");
    CHECK(a.variables == std::vector<std::string>{"rabbits", "chickens"});
    CHECK(a.lhs.size() == 2);
    CHECK(a.rhs.size() == 4);
}

TEST_CASE("nonlinear terms are rejected") {
    std::string text =
        "abstract bad\n  var a b\n  basis X\n  lhs 2 X\n  rhs a b X\nend\n";
    try {
        dsl::parse_spec(text);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("linear") != std::string::npos);
    }
}

TEST_CASE("expression terms support signs and rational coefficients") {
    auto doc = dsl::parse_spec(
        "abstract a\n  var v\n  basis X\n  lhs - 3/2 X + 2 v X\n  rhs 1 X\nend\n");
    const auto& a = doc.abstracts.at("a");
    REQUIRE(a.lhs.size() == 2);
    CHECK(a.lhs[0].coeff == Rational(-3, 2));
    CHECK(a.lhs[1].var == "v");
}

TEST_CASE("presheaf blocks fill identity actions implicitly") {
    auto doc = dsl::parse_spec(fixture("three_chain.cat"));
    const auto& p = doc.presheaves.at("P");
    CHECK(fincat::validate_set_functor(p).valid());
    CHECK(p.apply("id_A", "p") == "p");
}

TEST_CASE("functor and diagram blocks resolve against earlier categories") {
    auto doc = dsl::parse_spec(fixture("three_chain.cat"));
    CHECK(fincat::check_functor(doc.functors.at("incl")).valid());
    CHECK(fincat::check_functor(doc.cat_diagrams.at("incl_diagram")).valid());
}

TEST_CASE("presheaf diagram blocks assemble valid diagrams") {
    auto doc = dsl::parse_spec(fixture("exchange.cat"));
    const auto& d = doc.presheaf_diagrams.at("span");
    CHECK(limits::validate_presheaf_diagram(d).valid());
}

TEST_CASE("world blocks materialize deterministic worlds with overrides") {
    std::string text =
        "world w\n  dim 2\n  seed 9\n  tau 0.6\n  objects I a\n  labels likes\n"
        "  vector a 0.25 -0.5\n  matrix likes 1 0 0 1\nend\n";
    auto doc = dsl::parse_spec(text);
    const auto& w = doc.worlds.at("w");
    CHECK(w.dim == 2);
    CHECK(w.tau == 0.6);
    CHECK(w.table.at("a") == std::vector<double>{0.25, -0.5});
    CHECK(w.label_matrices.at("likes") == std::vector<double>{1, 0, 0, 1});

    auto again = dsl::parse_spec(text);
    CHECK(again.worlds.at("w") == w);
}

TEST_CASE("world vector lines must match the declared dimension") {
    CHECK_THROWS_AS(
        dsl::parse_spec("world w\n  dim 3\n  objects a\n  vector a 1 2\nend\n"),
        ParseError);
}

TEST_CASE("tasks blocks build every built-in task kind") {
    auto doc = dsl::parse_spec(fixture("awareness.cat"));
    const auto& spec = doc.task_sets.at("selfcheck");
    CHECK(spec.world == "synthetic");
    CHECK(spec.set.tests.size() == 6);
    for (const auto& t : spec.set.tests) CHECK(t.kind == world::TaskKind::Representable);

    auto doc2 = dsl::parse_spec(
        "world w\n  dim 2\n  objects I\nend\n"
        "tasks t world w\n  sampling exhaustive\n  task a coord 0 scale 2\n"
        "  task b norm 0.5 scale 1\n  task c vector 1 0\nend\n");
    CHECK(doc2.task_sets.at("t").set.tests.size() == 3);
    CHECK(doc2.task_sets.at("t").set.sampling == world::Sampling::Exhaustive);
}

TEST_CASE("scenario objects must live in the declared world") {
    CHECK_THROWS_AS(dsl::parse_spec("world w\n  dim 2\n  objects I\nend\n"
                                    "scenario s world w\n  objects ghost\nend\n"),
                    ParseError);
}

TEST_CASE("scope blocks collect decompositions and cross edges") {
    auto doc = dsl::parse_spec(
        "scope child\n  objects p q\nend\n"
        "scope root\n  objects a b\n  edge a rel b\n  decompose a -> child\n"
        "  cross a rel p\nend\n");
    scenario::Scope s;
    s.nodes = doc.scope_nodes;
    s.root = "root";
    auto m = scenario::scope_breadth_depth(s);
    CHECK(m.breadth == 2);
    CHECK(m.depth == 2);
    CHECK(doc.scope_nodes.at("root").cross_edges.size() == 1);
}

TEST_CASE("suite blocks resolve their parts") {
    auto doc = dsl::parse_spec(fixture("consistency.cat"));
    const auto& suite = doc.suites.at("toy_suite");
    CHECK(suite.composition_categories == std::vector<std::string>{"toy"});
    CHECK(suite.reconstructions.size() == 6);
    auto tests = dsl::build_suite_tests(doc, suite, doc.worlds.at(suite.world));
    CHECK(tests.size() == 8);
}

TEST_CASE("checkpoints round-trip byte for byte") {
    auto doc = dsl::parse_spec(fixture("awareness.cat"));
    const auto& w = doc.worlds.at("synthetic");
    std::string text = checkpoint::save_checkpoint(w);
    world::EmbeddingWorld loaded = checkpoint::load_checkpoint(text);
    CHECK(loaded == w);
    CHECK(checkpoint::save_checkpoint(loaded) == text);
}

TEST_CASE("truncated checkpoints are rejected") {
    auto doc = dsl::parse_spec(fixture("awareness.cat"));
    std::string text = checkpoint::save_checkpoint(doc.worlds.at("synthetic"));
    CHECK_THROWS_AS(checkpoint::load_checkpoint(text.substr(0, text.size() / 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(checkpoint::load_checkpoint("format=2\n"), std::invalid_argument);
}
