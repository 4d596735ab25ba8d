// Bundled generators: a catalogue of small categories covering groups,
// monoids, posets and split idempotents up to 3 objects / 6 morphisms, free
// categories on acyclic multigraphs, and seeded random presheaves, Set
// diagrams and presheaf diagrams. The random constructions are functorial by
// construction (or validated), so they feed property suites directly.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cattice/fincat.hpp"
#include "cattice/limits.hpp"
#include "cattice/rng.hpp"

namespace cattice::generators {

using fincat::CategoryBuilder;
using fincat::FiniteCategory;
using fincat::SetFunctor;
using fincat::Variance;

struct NamedCategory {
    std::string name;
    FiniteCategory cat;
};

namespace detail {

// The symmetric group on three letters as a one-object category, with the
// composition table computed from actual permutations.
inline FiniteCategory symmetric_group_3() {
    using Perm = std::array<int, 3>;
    std::vector<std::pair<std::string, Perm>> elems = {
        {"r", {1, 2, 0}}, {"rr", {2, 0, 1}}, {"s0", {0, 2, 1}}, {"s1", {2, 1, 0}}, {"s2", {1, 0, 2}},
    };
    Perm identity = {0, 1, 2};
    auto mul = [](const Perm& g, const Perm& f) { // g after f
        return Perm{g[f[0]], g[f[1]], g[f[2]]};
    };
    auto name_of = [&](const Perm& p) -> std::string {
        if (p == identity) return "id_G";
        for (const auto& [n, q] : elems)
            if (q == p) return n;
        throw std::logic_error("permutation lookup failed");
    };

    CategoryBuilder b;
    b.object("G");
    for (const auto& [n, p] : elems) b.morphism(n, "G", "G");
    for (const auto& [gn, gp] : elems)
        for (const auto& [fn, fp] : elems) b.compose(gn, fn, name_of(mul(gp, fp)));
    return b.build();
}

} // namespace detail

// Fixed catalogue of hand-built categories, each within 3 objects and 6
// morphisms: discrete shapes, arrows and parallel pairs, (co)spans, a chain,
// an isomorphism pair, idempotents, and the cyclic and symmetric groups.
inline std::vector<NamedCategory> standard_zoo() {
    std::vector<NamedCategory> zoo;
    auto add = [&](std::string name, FiniteCategory c) { zoo.push_back({std::move(name), std::move(c)}); };

    add("terminal", CategoryBuilder().object("A").build());
    add("discrete2", CategoryBuilder().objects({"A", "B"}).build());
    add("discrete3", CategoryBuilder().objects({"A", "B", "C"}).build());
    add("arrow", CategoryBuilder().objects({"A", "B"}).morphism("f", "A", "B").build());
    add("parallel_pair", CategoryBuilder()
                             .objects({"A", "B"})
                             .morphism("f", "A", "B")
                             .morphism("g", "A", "B")
                             .build());
    add("triple_parallel", CategoryBuilder()
                               .objects({"A", "B"})
                               .morphism("f", "A", "B")
                               .morphism("g", "A", "B")
                               .morphism("h", "A", "B")
                               .build());
    add("span", CategoryBuilder()
                    .objects({"A", "B", "C"})
                    .morphism("f", "A", "B")
                    .morphism("g", "A", "C")
                    .build());
    add("cospan", CategoryBuilder()
                      .objects({"A", "B", "C"})
                      .morphism("f", "A", "C")
                      .morphism("g", "B", "C")
                      .build());
    add("chain3", CategoryBuilder()
                      .objects({"A", "B", "C"})
                      .morphism("f", "A", "B")
                      .morphism("g", "B", "C")
                      .morphism("gf", "A", "C")
                      .compose("g", "f", "gf")
                      .build());
    add("iso_pair", CategoryBuilder()
                        .objects({"A", "B"})
                        .morphism("f", "A", "B")
                        .morphism("g", "B", "A")
                        .compose("g", "f", "id_A")
                        .compose("f", "g", "id_B")
                        .build());
    add("idempotent", CategoryBuilder().object("A").morphism("e", "A", "A").compose("e", "e", "e").build());
    add("z2", CategoryBuilder().object("A").morphism("s", "A", "A").compose("s", "s", "id_A").build());
    add("z3", CategoryBuilder()
                  .object("A")
                  .morphism("r", "A", "A")
                  .morphism("rr", "A", "A")
                  .compose("r", "r", "rr")
                  .compose("r", "rr", "id_A")
                  .compose("rr", "r", "id_A")
                  .compose("rr", "rr", "r")
                  .build());
    add("z4", CategoryBuilder()
                  .object("A")
                  .morphism("r", "A", "A")
                  .morphism("r2", "A", "A")
                  .morphism("r3", "A", "A")
                  .compose("r", "r", "r2")
                  .compose("r", "r2", "r3")
                  .compose("r2", "r", "r3")
                  .compose("r", "r3", "id_A")
                  .compose("r3", "r", "id_A")
                  .compose("r2", "r2", "id_A")
                  .compose("r2", "r3", "r")
                  .compose("r3", "r2", "r")
                  .compose("r3", "r3", "r2")
                  .build());
    add("s3", detail::symmetric_group_3());
    add("cyclic_aperiodic", CategoryBuilder()
                                .object("A")
                                .morphism("x", "A", "A")
                                .morphism("xx", "A", "A")
                                .compose("x", "x", "xx")
                                .compose("x", "xx", "xx")
                                .compose("xx", "x", "xx")
                                .compose("xx", "xx", "xx")
                                .build());
    add("left_zero", CategoryBuilder()
                         .object("A")
                         .morphism("a", "A", "A")
                         .morphism("b", "A", "A")
                         .compose("a", "a", "a")
                         .compose("a", "b", "a")
                         .compose("b", "a", "b")
                         .compose("b", "b", "b")
                         .build());
    add("split_idempotent", CategoryBuilder()
                                .objects({"X", "Y"})
                                .morphism("s", "X", "Y")
                                .morphism("r", "Y", "X")
                                .morphism("e", "Y", "Y")
                                .compose("r", "s", "id_X")
                                .compose("s", "r", "e")
                                .compose("e", "e", "e")
                                .compose("e", "s", "s")
                                .compose("r", "e", "r")
                                .build());
    add("arrow_plus_point", CategoryBuilder()
                                .objects({"A", "B", "C"})
                                .morphism("f", "A", "B")
                                .build());
    return zoo;
}

// A random thin category: a random partial order on up to `max_objects`
// objects, one morphism per related pair, composition forced by uniqueness.
inline FiniteCategory random_thin_category(Rng& rng, std::size_t max_objects = 3,
                                           std::size_t max_morphisms = 6) {
    while (true) {
        std::size_t n = 1 + rng.below(max_objects);
        std::vector<std::string> objs;
        for (std::size_t i = 0; i < n; ++i) objs.push_back("O" + std::to_string(i));

        // random relation among index-increasing pairs, then transitive closure
        std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
        for (std::size_t i = 0; i < n; ++i) le[i][i] = true;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng.below(2) == 0) le[i][j] = true;
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (le[i][k] && le[k][j]) le[i][j] = true;

        std::size_t total = n;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && le[i][j]) ++total;
        if (total > max_morphisms) continue;

        CategoryBuilder b;
        for (const auto& o : objs) b.object(o);
        auto arrow_name = [&](std::size_t i, std::size_t j) {
            return "m" + std::to_string(i) + std::to_string(j);
        };
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && le[i][j]) b.morphism(arrow_name(i, j), objs[i], objs[j]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    if (i != j && j != k && le[i][j] && le[j][k]) {
                        std::string composite = i == k ? "id_" + objs[i] : arrow_name(i, k);
                        b.compose(arrow_name(j, k), arrow_name(i, j), composite);
                    }
        return b.build();
    }
}

// The catalogue plus seeded random thin categories: the generator set the
// property suites sweep over.
inline std::vector<NamedCategory> generator_set(std::uint64_t seed, std::size_t random_count) {
    std::vector<NamedCategory> out = standard_zoo();
    Rng rng(seed);
    for (std::size_t i = 0; i < random_count; ++i)
        out.push_back({"thin" + std::to_string(i), random_thin_category(rng)});
    return out;
}

// Free category on an acyclic multigraph: morphisms are the identities plus
// every path, named by the edge sequence, composition by concatenation.
struct GraphEdge {
    std::string id;
    std::size_t source, target; // indices into the object list, source < target
};

inline FiniteCategory free_category(const std::vector<std::string>& objects,
                                    const std::vector<GraphEdge>& edges) {
    struct Path {
        std::vector<std::size_t> edge_indices;
        std::size_t source, target;
        std::string name;
    };
    std::vector<Path> paths;
    // grow paths by length; the index-increasing edge convention keeps the
    // graph acyclic so this terminates
    for (std::size_t ei = 0; ei < edges.size(); ++ei)
        paths.push_back({{ei}, edges[ei].source, edges[ei].target, edges[ei].id});
    for (std::size_t at = 0; at < paths.size(); ++at) {
        Path base = paths[at];
        for (std::size_t ei = 0; ei < edges.size(); ++ei) {
            if (edges[ei].source != base.target) continue;
            Path longer = base;
            longer.edge_indices.push_back(ei);
            longer.target = edges[ei].target;
            longer.name += "." + edges[ei].id;
            paths.push_back(std::move(longer));
        }
    }

    CategoryBuilder b;
    for (const auto& o : objects) b.object(o);
    for (const auto& p : paths) b.morphism(p.name, objects[p.source], objects[p.target]);
    for (const auto& g : paths)
        for (const auto& f : paths) {
            if (f.target != g.source) continue;
            std::string joined = f.name + "." + g.name;
            b.compose(g.name, f.name, joined);
        }
    return b.build();
}

inline FiniteCategory random_free_dag_category(Rng& rng, std::size_t max_objects,
                                               std::size_t max_morphisms) {
    while (true) {
        std::size_t n = 1 + rng.below(max_objects);
        std::vector<std::string> objs;
        for (std::size_t i = 0; i < n; ++i) objs.push_back("N" + std::to_string(i));
        std::vector<GraphEdge> edges;
        std::size_t attempts = rng.below(2 * max_objects);
        for (std::size_t a = 0; a < attempts && n > 1; ++a) {
            std::size_t i = rng.below(n - 1);
            std::size_t j = i + 1 + rng.below(n - i - 1);
            edges.push_back({"e" + std::to_string(edges.size()), i, j});
        }
        FiniteCategory c = free_category(objs, edges);
        if (c.morphisms.size() <= max_morphisms) return c;
    }
}

// ---------------------------------------------------------------------------
// Presheaf constructions.

inline SetFunctor presheaf_coproduct(const std::vector<SetFunctor>& parts) {
    if (parts.empty()) throw std::invalid_argument("presheaf_coproduct: no summands");
    SetFunctor out;
    out.base = parts.front().base;
    out.variance = parts.front().variance;
    for (const auto& x : out.base.objects) out.object_sets[x] = {};
    for (const auto& m : out.base.morphisms) out.morphism_fns[m.id] = {};
    for (std::size_t i = 0; i < parts.size(); ++i) {
        std::string tag = "r" + std::to_string(i) + ":";
        for (const auto& [x, elems] : parts[i].object_sets) {
            auto& target = out.object_sets.at(x);
            for (const auto& e : elems) target.push_back(tag + e);
        }
        for (const auto& [mid, fn] : parts[i].morphism_fns) {
            auto& target = out.morphism_fns.at(mid);
            for (const auto& [e, img] : fn) target[tag + e] = tag + img;
        }
    }
    return out;
}

inline SetFunctor presheaf_product(const SetFunctor& f, const SetFunctor& g) {
    SetFunctor out;
    out.base = f.base;
    out.variance = f.variance;
    for (const auto& x : out.base.objects) {
        auto& elems = out.object_sets[x];
        for (const auto& a : f.set_at(x))
            for (const auto& b : g.set_at(x)) elems.push_back("(" + a + "," + b + ")");
    }
    for (const auto& m : out.base.morphisms) {
        auto& fn = out.morphism_fns[m.id];
        const std::string& dom = out.fn_domain(m);
        for (const auto& a : f.set_at(dom))
            for (const auto& b : g.set_at(dom))
                fn["(" + a + "," + b + ")"] =
                    "(" + f.apply(m.id, a) + "," + g.apply(m.id, b) + ")";
    }
    return out;
}

// Seeded random presheaf. First tries rejection sampling of arbitrary
// object sets and morphism functions (identities forced); when the category
// has enough relations to make that hopeless, falls back to coproducts and
// products of representables, which are functorial for free.
inline SetFunctor random_presheaf(const FiniteCategory& c, Variance variance, Rng& rng,
                                  std::size_t max_elems = 3) {
    auto random_representable = [&]() {
        return fincat::yoneda_embed(c, c.objects[rng.below(c.objects.size())], variance);
    };

    std::size_t strategy = rng.below(4);
    if (strategy == 3) return fincat::constant_singleton(c, variance);
    if (strategy == 1 && !c.objects.empty()) {
        std::vector<SetFunctor> parts;
        std::size_t count = 1 + rng.below(3);
        for (std::size_t i = 0; i < count; ++i) parts.push_back(random_representable());
        return presheaf_coproduct(parts);
    }
    if (strategy == 2 && !c.objects.empty()) {
        SetFunctor p = presheaf_product(random_representable(), random_representable());
        bool small = true;
        for (const auto& [x, elems] : p.object_sets)
            if (elems.size() > 2 * max_elems) small = false;
        if (small) return p;
        return random_representable();
    }

    for (int attempt = 0; attempt < 40; ++attempt) {
        SetFunctor p;
        p.base = c;
        p.variance = variance;
        for (const auto& x : c.objects) {
            std::size_t size = rng.below(8) == 0 ? 0 : 1 + rng.below(max_elems);
            auto& elems = p.object_sets[x];
            for (std::size_t i = 0; i < size; ++i) elems.push_back("e" + std::to_string(i));
        }
        bool feasible = true;
        for (const auto& m : c.morphisms) {
            auto& fn = p.morphism_fns[m.id];
            const auto& dom = p.object_sets.at(p.fn_domain(m));
            const auto& cod = p.object_sets.at(p.fn_codomain(m));
            if (c.is_identity(m.id)) {
                for (const auto& e : dom) fn[e] = e;
                continue;
            }
            if (!dom.empty() && cod.empty()) {
                feasible = false;
                break;
            }
            for (const auto& e : dom) fn[e] = cod[rng.below(cod.size())];
        }
        if (feasible && fincat::validate_set_functor(p).valid()) return p;
    }

    if (c.objects.empty()) return fincat::constant_singleton(c, variance);
    std::vector<SetFunctor> parts;
    std::size_t count = 1 + rng.below(2);
    for (std::size_t i = 0; i < count; ++i) parts.push_back(random_representable());
    return presheaf_coproduct(parts);
}

// Seeded random Set-valued diagram over a random free DAG shape: functions
// are chosen freely on the generating edges and extended along paths, so the
// result is functorial by construction.
inline SetFunctor random_set_diagram(Rng& rng, std::size_t max_objects = 4,
                                     std::size_t max_morphisms = 8, std::size_t max_elems = 5) {
    std::size_t n = 1 + rng.below(max_objects);
    std::vector<std::string> objs;
    for (std::size_t i = 0; i < n; ++i) objs.push_back("N" + std::to_string(i));

    std::vector<GraphEdge> edges;
    FiniteCategory shape = free_category(objs, edges);
    std::size_t attempts = rng.below(2 * max_objects);
    for (std::size_t a = 0; a < attempts && n > 1; ++a) {
        std::size_t i = rng.below(n - 1);
        std::size_t j = i + 1 + rng.below(n - i - 1);
        std::vector<GraphEdge> trial = edges;
        trial.push_back({"e" + std::to_string(edges.size()), i, j});
        FiniteCategory grown = free_category(objs, trial);
        if (grown.morphisms.size() > max_morphisms) continue;
        edges = std::move(trial);
        shape = std::move(grown);
    }

    SetFunctor d;
    d.base = shape;
    d.variance = rng.below(2) == 0 ? Variance::Covariant : Variance::Contravariant;
    for (const auto& x : shape.objects) {
        std::size_t size = rng.below(10) == 0 ? 0 : 1 + rng.below(max_elems);
        auto& elems = d.object_sets[x];
        for (std::size_t i = 0; i < size; ++i) elems.push_back("e" + std::to_string(i));
    }

    // An empty codomain forces an empty domain; propagate to a fixpoint
    // before drawing any function so they all stay total.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : edges) {
            std::size_t dom_idx = d.variance == Variance::Covariant ? e.source : e.target;
            std::size_t cod_idx = d.variance == Variance::Covariant ? e.target : e.source;
            if (d.object_sets.at(objs[cod_idx]).empty() &&
                !d.object_sets.at(objs[dom_idx]).empty()) {
                d.object_sets.at(objs[dom_idx]).clear();
                changed = true;
            }
        }
    }

    // per-edge functions, drawn freely
    std::map<std::string, std::map<std::string, std::string>> edge_fn;
    for (const auto& e : edges) {
        std::size_t dom_idx = d.variance == Variance::Covariant ? e.source : e.target;
        std::size_t cod_idx = d.variance == Variance::Covariant ? e.target : e.source;
        const auto& cod = d.object_sets.at(objs[cod_idx]);
        auto& fn = edge_fn[e.id];
        for (const auto& el : d.object_sets.at(objs[dom_idx]))
            fn[el] = cod[rng.below(cod.size())];
    }

    for (const auto& m : shape.morphisms) {
        auto& fn = d.morphism_fns[m.id];
        if (shape.is_identity(m.id)) {
            for (const auto& e : d.object_sets.at(m.source)) fn[e] = e;
            continue;
        }
        // decompose the path name back into its edges
        std::vector<std::string> seq;
        std::string cur;
        for (char ch : m.id + std::string(".")) {
            if (ch == '.') {
                seq.push_back(cur);
                cur.clear();
            } else
                cur += ch;
        }
        if (d.variance == Variance::Contravariant) std::reverse(seq.begin(), seq.end());
        const auto& dom = d.object_sets.at(d.fn_domain(m));
        for (const auto& el : dom) {
            std::string y = el;
            for (const auto& eid : seq) y = edge_fn.at(eid).at(y);
            fn[el] = y;
        }
    }
    return d;
}

// Seeded random diagram of presheaves over `base`: a free DAG shape, random
// presheaf nodes, arrows picked uniformly from the enumerated hom-sets and
// extended along composite paths. Falls back to all-singleton nodes when a
// draw produces an empty hom-set too often.
inline limits::PresheafDiagram random_presheaf_diagram(const FiniteCategory& base, Variance variance,
                                                       Rng& rng, std::size_t max_shape_objects = 3,
                                                       std::size_t max_elems = 3) {
    for (int attempt = 0; attempt < 50; ++attempt) {
        limits::PresheafDiagram d;
        d.shape = random_free_dag_category(rng, max_shape_objects, 6);
        bool ok = true;
        for (const auto& i : d.shape.objects)
            d.nodes[i] = attempt >= 40 ? fincat::constant_singleton(base, variance)
                                       : random_presheaf(base, variance, rng, max_elems);
        std::map<std::string, fincat::NaturalTransformation> edge_arrows;
        for (const auto& m : d.shape.morphisms) {
            if (d.shape.is_identity(m.id) || m.id.find('.') != std::string::npos) continue;
            auto nats = fincat::enumerate_nat(d.nodes.at(m.source), d.nodes.at(m.target));
            if (nats.empty()) {
                ok = false;
                break;
            }
            edge_arrows[m.id] = nats[rng.below(nats.size())];
        }
        if (!ok) continue;
        for (const auto& m : d.shape.morphisms) {
            if (d.shape.is_identity(m.id)) continue;
            std::vector<std::string> seq;
            std::string cur;
            for (char ch : m.id + std::string(".")) {
                if (ch == '.') {
                    seq.push_back(cur);
                    cur.clear();
                } else
                    cur += ch;
            }
            fincat::NaturalTransformation t = edge_arrows.at(seq.front());
            for (std::size_t k = 1; k < seq.size(); ++k)
                t = fincat::compose_nat(edge_arrows.at(seq[k]), t);
            d.arrows[m.id] = std::move(t);
        }
        return d;
    }
    throw std::logic_error("random_presheaf_diagram: could not build a diagram");
}

} // namespace cattice::generators
