#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <string>
#include <vector>

#include "cattice/fincat.hpp"
#include "cattice/generators.hpp"
#include "cattice/rng.hpp"

using namespace cattice;
using fincat::CategoryBuilder;
using fincat::FiniteCategory;
using fincat::SetFunctor;
using fincat::Variance;

namespace {

// Independent oracle: the full product of component-function spaces filtered
// through check_natural, with no pruning. Exponential, for tiny inputs only.
std::vector<fincat::NaturalTransformation> brute_force_nats(const SetFunctor& F,
                                                            const SetFunctor& G) {
    const auto& objects = F.base.objects;
    std::vector<std::vector<std::string>> f_sets, g_sets;
    for (const auto& x : objects) {
        f_sets.push_back(F.set_at(x));
        g_sets.push_back(G.set_at(x));
    }

    // mixed-radix counter over all component choices
    std::vector<std::size_t> radix;
    for (std::size_t i = 0; i < objects.size(); ++i)
        for (std::size_t j = 0; j < f_sets[i].size(); ++j) radix.push_back(g_sets[i].size());

    std::vector<fincat::NaturalTransformation> found;
    std::vector<std::size_t> digits(radix.size(), 0);
    for (auto& r : radix)
        if (r == 0) return found; // a nonempty set must map somewhere

    bool done = radix.empty();
    bool first = true;
    while (first || !done) {
        first = false;
        fincat::NaturalTransformation t;
        t.source_functor = F;
        t.target_functor = G;
        std::size_t v = 0;
        for (std::size_t i = 0; i < objects.size(); ++i) {
            t.components[objects[i]];
            for (std::size_t j = 0; j < f_sets[i].size(); ++j)
                t.components[objects[i]][f_sets[i][j]] = g_sets[i][digits[v++]];
        }
        if (check_natural(t).valid()) found.push_back(t);

        // increment
        done = true;
        for (std::size_t k = 0; k < digits.size(); ++k) {
            if (++digits[k] < radix[k]) {
                done = false;
                break;
            }
            digits[k] = 0;
        }
        if (radix.empty()) break;
    }
    return found;
}

FiniteCategory chain3() {
    return CategoryBuilder()
        .objects({"A", "B", "C"})
        .morphism("f", "A", "B")
        .morphism("g", "B", "C")
        .morphism("gf", "A", "C")
        .compose("g", "f", "gf")
        .build();
}

FiniteCategory arrow_cat() {
    return CategoryBuilder().objects({"X", "Y"}).morphism("f", "X", "Y").build();
}

} // namespace

TEST_CASE("validate_category accepts the identity-only category") {
    FiniteCategory c = CategoryBuilder().object("A").build();
    CHECK(fincat::validate_category(c).valid());
}

TEST_CASE("validate_category flags a missing closure entry") {
    FiniteCategory c = arrow_cat();
    REQUIRE(c.composition.erase({"f", "id_X"}) == 1);
    auto rep = fincat::validate_category(c);
    REQUIRE_FALSE(rep.valid());
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.kind == fincat::IssueKind::MissingComposite &&
            v.detail.find("(f, id_X)") != std::string::npos)
            found = true;
    CHECK(found);
}

TEST_CASE("validate_category reports structural errors separately") {
    FiniteCategory c = arrow_cat();
    c.morphisms.push_back({"bad", "X", "Zmissing", ""});
    auto rep = fincat::validate_category(c);
    REQUIRE_FALSE(rep.structural.empty());
    CHECK(rep.violations.empty()); // axiom pass suppressed
}

TEST_CASE("3-chain is a category; oracle enumerates all composable triples") {
    FiniteCategory c = chain3();
    CHECK(fincat::validate_category(c).valid());

    // independent associativity scan straight off the table
    for (const auto& h : c.morphisms)
        for (const auto& g : c.morphisms)
            for (const auto& f : c.morphisms) {
                if (f.target != g.source || g.target != h.source) continue;
                const auto& left = c.compose(h.id, c.compose(g.id, f.id));
                const auto& right = c.compose(c.compose(h.id, g.id), f.id);
                CHECK(left == right);
            }
}

TEST_CASE("validate_category rejects a broken identity law") {
    // e . id collapses to the wrong morphism
    FiniteCategory c = CategoryBuilder()
                           .object("A")
                           .morphism("e", "A", "A")
                           .compose("e", "e", "e")
                           .build();
    c.composition[{"e", "id_A"}] = "id_A";
    auto rep = fincat::validate_category(c);
    REQUIRE_FALSE(rep.valid());
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.kind == fincat::IssueKind::IdentityLaw) found = true;
    CHECK(found);
}

TEST_CASE("opposite of the identity-only category is itself") {
    FiniteCategory c = CategoryBuilder().objects({"A", "B"}).build();
    CHECK(fincat::opposite(c) == c);
}

TEST_CASE("opposite reverses the arrow category") {
    FiniteCategory op = fincat::opposite(arrow_cat());
    CHECK(fincat::validate_category(op).valid());
    const fincat::Morphism& f = op.morphism("f");
    CHECK(f.source == "Y");
    CHECK(f.target == "X");
}

TEST_CASE("opposite is an involution on the whole catalogue") {
    for (const auto& [name, c] : generators::standard_zoo()) {
        INFO(name);
        CHECK(fincat::opposite(fincat::opposite(c)) == c);
        CHECK(fincat::validate_category(fincat::opposite(c)).valid());
    }
}

TEST_CASE("opposite rejects an invalid category") {
    FiniteCategory c = arrow_cat();
    c.composition.erase({"f", "id_X"});
    CHECK_THROWS_AS(fincat::opposite(c), std::invalid_argument);
}

TEST_CASE("identity functor is valid on every catalogue category") {
    for (const auto& [name, c] : generators::standard_zoo()) {
        INFO(name);
        fincat::Functor id;
        id.source = c;
        id.target = c;
        for (const auto& o : c.objects) id.object_map[o] = o;
        for (const auto& m : c.morphisms) id.morphism_map[m.id] = m.id;
        CHECK(fincat::check_functor(id).valid());
    }
}

TEST_CASE("constant functor collapsing the arrow category is valid") {
    fincat::Functor k;
    k.source = arrow_cat();
    k.target = CategoryBuilder().object("P").build();
    for (const auto& o : k.source.objects) k.object_map[o] = "P";
    for (const auto& m : k.source.morphisms) k.morphism_map[m.id] = "id_P";
    CHECK(fincat::check_functor(k).valid());
}

TEST_CASE("functor sending a composite to an identity breaks composition") {
    FiniteCategory c = chain3();
    fincat::Functor bad;
    bad.source = c;
    bad.target = c;
    for (const auto& o : c.objects) bad.object_map[o] = o;
    for (const auto& m : c.morphisms) bad.morphism_map[m.id] = m.id;
    bad.morphism_map["gf"] = "id_A"; // f, g still map to non-identities
    auto rep = fincat::check_functor(bad);
    REQUIRE_FALSE(rep.valid());
    bool witnessed = false;
    for (const auto& v : rep.violations)
        if (v.kind == fincat::IssueKind::PreservationComposition &&
            v.detail.find("(g, f)") != std::string::npos)
            witnessed = true;
    CHECK(witnessed);
}

TEST_CASE("identity transformation is natural") {
    SetFunctor h = fincat::yoneda_embed(chain3(), "C", Variance::Contravariant);
    CHECK(fincat::check_natural(fincat::identity_nat(h)).valid());
}

TEST_CASE("over a one-object identity base any component is natural") {
    FiniteCategory pt = CategoryBuilder().object("A").build();
    SetFunctor F, G;
    F.base = G.base = pt;
    F.variance = G.variance = Variance::Contravariant;
    F.object_sets["A"] = {"a", "b"};
    G.object_sets["A"] = {"c", "d"};
    F.morphism_fns["id_A"] = {{"a", "a"}, {"b", "b"}};
    G.morphism_fns["id_A"] = {{"c", "c"}, {"d", "d"}};
    fincat::NaturalTransformation t;
    t.source_functor = F;
    t.target_functor = G;
    t.components["A"] = {{"a", "d"}, {"b", "d"}};
    CHECK(fincat::check_natural(t).valid());
}

TEST_CASE("broken square is reported with its morphism witness") {
    FiniteCategory c = arrow_cat();
    SetFunctor F = fincat::yoneda_embed(c, "Y", Variance::Contravariant); // F(X)={f}, F(Y)={id_Y}
    SetFunctor A;
    A.base = c;
    A.variance = Variance::Contravariant;
    A.object_sets["X"] = {"a", "b"};
    A.object_sets["Y"] = {"c"};
    A.morphism_fns["id_X"] = {{"a", "a"}, {"b", "b"}};
    A.morphism_fns["id_Y"] = {{"c", "c"}};
    A.morphism_fns["f"] = {{"c", "a"}};
    REQUIRE(fincat::validate_set_functor(A).valid());

    fincat::NaturalTransformation t;
    t.source_functor = F;
    t.target_functor = A;
    t.components["Y"] = {{"id_Y", "c"}};
    t.components["X"] = {{"f", "b"}}; // should be a to commute
    auto rep = fincat::check_natural(t);
    REQUIRE_FALSE(rep.valid());
    CHECK(rep.violations.front().detail.find("'f'") != std::string::npos);
}

TEST_CASE("check_natural reports a missing component as structural") {
    SetFunctor h = fincat::yoneda_embed(arrow_cat(), "Y", Variance::Contravariant);
    fincat::NaturalTransformation t;
    t.source_functor = h;
    t.target_functor = h;
    t.components["Y"] = {{"id_Y", "id_Y"}};
    auto rep = fincat::check_natural(t);
    REQUIRE_FALSE(rep.structural.empty());
}

TEST_CASE("yoneda_embed on the identity-only category gives a singleton") {
    FiniteCategory pt = CategoryBuilder().object("X").build();
    SetFunctor h = fincat::yoneda_embed(pt, "X", Variance::Contravariant);
    CHECK(h.set_at("X") == std::vector<std::string>{"id_X"});
}

TEST_CASE("yoneda_embed reads hom-sets off the arrow category") {
    SetFunctor h = fincat::yoneda_embed(arrow_cat(), "Y", Variance::Contravariant);
    CHECK(h.set_at("X") == std::vector<std::string>{"f"});
    CHECK(h.set_at("Y") == std::vector<std::string>{"id_Y"});
}

TEST_CASE("covariant embedding of the chain bottom is singleton everywhere") {
    SetFunctor k = fincat::yoneda_embed(chain3(), "A", Variance::Covariant);
    for (const auto& obj : k.base.objects) CHECK(k.set_at(obj).size() == 1);
}

TEST_CASE("yoneda_embed rejects an unknown object") {
    CHECK_THROWS_AS(fincat::yoneda_embed(arrow_cat(), "Z", Variance::Covariant),
                    std::invalid_argument);
}

TEST_CASE("every embedded functor passes SetFunctor validation") {
    for (const auto& [name, c] : generators::standard_zoo())
        for (const auto& obj : c.objects)
            for (auto variance : {Variance::Contravariant, Variance::Covariant}) {
                INFO(name << " at " << obj);
                CHECK(fincat::validate_set_functor(fincat::yoneda_embed(c, obj, variance)).valid());
            }
}

TEST_CASE("enumerate_nat over the terminal base counts all functions") {
    FiniteCategory pt = CategoryBuilder().object("A").build();
    SetFunctor F;
    F.base = pt;
    F.variance = Variance::Contravariant;
    F.object_sets["A"] = {"x", "y"};
    F.morphism_fns["id_A"] = {{"x", "x"}, {"y", "y"}};
    auto nats = fincat::enumerate_nat(F, F);
    CHECK(nats.size() == 4);
    for (const auto& t : nats) CHECK(fincat::check_natural(t).valid());
}

TEST_CASE("empty component sets contribute empty functions") {
    FiniteCategory d2 = CategoryBuilder().objects({"A", "B"}).build();
    SetFunctor F, G;
    F.base = G.base = d2;
    F.variance = G.variance = Variance::Contravariant;
    F.object_sets["A"] = {};
    F.object_sets["B"] = {"x"};
    G.object_sets["A"] = {"a", "b"};
    G.object_sets["B"] = {"c"};
    F.morphism_fns["id_A"] = {};
    F.morphism_fns["id_B"] = {{"x", "x"}};
    G.morphism_fns["id_A"] = {{"a", "a"}, {"b", "b"}};
    G.morphism_fns["id_B"] = {{"c", "c"}};
    auto nats = fincat::enumerate_nat(F, G);
    // product formula: |G(A)|^0 * |G(B)|^1
    CHECK(nats.size() == 1);
}

TEST_CASE("enumerate_nat from a representable matches the element count") {
    FiniteCategory c = arrow_cat();
    SetFunctor h = fincat::yoneda_embed(c, "X", Variance::Contravariant);
    SetFunctor A;
    A.base = c;
    A.variance = Variance::Contravariant;
    A.object_sets["X"] = {"a", "b"};
    A.object_sets["Y"] = {"c"};
    A.morphism_fns["id_X"] = {{"a", "a"}, {"b", "b"}};
    A.morphism_fns["id_Y"] = {{"c", "c"}};
    A.morphism_fns["f"] = {{"c", "a"}};
    auto nats = fincat::enumerate_nat(h, A);
    CHECK(nats.size() == 2);
}

TEST_CASE("enumerate_nat rejects mismatched bases and variances") {
    SetFunctor F = fincat::yoneda_embed(arrow_cat(), "X", Variance::Contravariant);
    SetFunctor G = fincat::yoneda_embed(arrow_cat(), "X", Variance::Covariant);
    CHECK_THROWS_AS(fincat::enumerate_nat(F, G), std::invalid_argument);
    SetFunctor H = fincat::yoneda_embed(chain3(), "A", Variance::Contravariant);
    CHECK_THROWS_AS(fincat::enumerate_nat(F, H), std::invalid_argument);
}

TEST_CASE("enumerate_nat agrees with the unpruned product-filter oracle") {
    Rng rng(901);
    FiniteCategory iso_pair = CategoryBuilder()
                                  .objects({"A", "B"})
                                  .morphism("f", "A", "B")
                                  .morphism("g", "B", "A")
                                  .compose("g", "f", "id_A")
                                  .compose("f", "g", "id_B")
                                  .build();
    std::vector<FiniteCategory> bases = {arrow_cat(), chain3(), iso_pair};
    for (const auto& c : bases) {
        for (int round = 0; round < 12; ++round) {
            auto variance = round % 2 == 0 ? Variance::Contravariant : Variance::Covariant;
            SetFunctor F = generators::random_presheaf(c, variance, rng, 2);
            SetFunctor G = generators::random_presheaf(c, variance, rng, 2);
            // keep the oracle's exponent small
            std::size_t work = 1;
            bool skip = false;
            for (const auto& x : c.objects) {
                for (std::size_t k = 0; k < F.set_at(x).size(); ++k) {
                    work *= std::max<std::size_t>(G.set_at(x).size(), 1);
                    if (work > 200000) skip = true;
                }
            }
            if (skip) continue;
            auto fast = fincat::enumerate_nat(F, G);
            auto slow = brute_force_nats(F, G);
            INFO("round " << round);
            CHECK(fast.size() == slow.size());
        }
    }
}

TEST_CASE("enumerate_nat output is canonically ordered and duplicate-free") {
    FiniteCategory c = chain3();
    SetFunctor F = fincat::yoneda_embed(c, "C", Variance::Contravariant);
    Rng rng(77);
    SetFunctor G = generators::random_presheaf(c, Variance::Contravariant, rng, 3);
    auto nats = fincat::enumerate_nat(F, G);
    std::vector<std::string> keys;
    for (const auto& t : nats) keys.push_back(fincat::nat_key(t));
    for (std::size_t i = 1; i < keys.size(); ++i) CHECK(keys[i - 1] < keys[i]);
}

TEST_CASE("verify_yoneda: hom into another representable") {
    auto rep = fincat::verify_yoneda(arrow_cat(), "X",
                                     fincat::yoneda_embed(arrow_cat(), "Y", Variance::Contravariant));
    // |Nat(h(X), h(Y))| = |hom(X, Y)| = 1
    CHECK(rep.nat_count == 1);
    CHECK(rep.bijection());
}

TEST_CASE("verify_yoneda: terminal presheaf") {
    FiniteCategory c = chain3();
    auto rep = fincat::verify_yoneda(c, "B", fincat::constant_singleton(c, Variance::Contravariant));
    CHECK(rep.nat_count == 1);
    CHECK(rep.element_count == 1);
    CHECK(rep.bijection());
}

TEST_CASE("verify_yoneda on the arrow presheaf example") {
    FiniteCategory c = arrow_cat();
    SetFunctor A;
    A.base = c;
    A.variance = Variance::Contravariant;
    A.object_sets["X"] = {"a", "b"};
    A.object_sets["Y"] = {"c"};
    A.morphism_fns["id_X"] = {{"a", "a"}, {"b", "b"}};
    A.morphism_fns["id_Y"] = {{"c", "c"}};
    A.morphism_fns["f"] = {{"c", "a"}};
    auto rep = fincat::verify_yoneda(c, "X", A);
    CHECK(rep.nat_count == 2);
    CHECK(rep.element_count == 2);
    CHECK(rep.bijection());
}

TEST_CASE("verify_yoneda covers both variances across the catalogue") {
    Rng rng(31337);
    for (const auto& [name, c] : generators::standard_zoo()) {
        for (int round = 0; round < 4; ++round) {
            auto variance = round % 2 == 0 ? Variance::Contravariant : Variance::Covariant;
            SetFunctor A = generators::random_presheaf(c, variance, rng, 3);
            for (const auto& obj : c.objects) {
                INFO(name << " object " << obj << " round " << round);
                CHECK(fincat::verify_yoneda(c, obj, A).bijection());
            }
        }
    }
}
