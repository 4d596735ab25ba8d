// Limits and colimits of finite Set-valued diagrams, presheaf-valued limits
// of diagrams in a finite category, and the exchange laws between hom-sets
// and (co)limits, all computed by exhaustive enumeration.
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cattice/fincat.hpp"

namespace cattice::limits {

using fincat::FiniteCategory;
using fincat::Functor;
using fincat::NaturalTransformation;
using fincat::SetFunctor;
using fincat::Variance;

// One compatible family: a choice of element per shape object.
struct Family {
    std::map<std::string, std::string> members;

    friend bool operator==(const Family&, const Family&) = default;
};

inline std::string family_name(const std::vector<std::string>& shape_objects, const Family& fam) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape_objects.size(); ++i) {
        if (i) s += ',';
        s += fam.members.at(shape_objects[i]);
    }
    s += ')';
    return s;
}

struct LimitResult {
    std::vector<std::string> shape_objects; // canonical tuple order
    std::vector<Family> apex;               // sorted by tuple

    std::string name_of(const Family& fam) const { return family_name(shape_objects, fam); }

    // Projection to one shape object, in apex order.
    std::vector<std::string> project(const std::string& obj) const {
        std::vector<std::string> out;
        out.reserve(apex.size());
        for (const auto& fam : apex) out.push_back(fam.members.at(obj));
        return out;
    }
};

// Projective limit of a finite Set-valued diagram: scan the product of the
// object sets, keep the families compatible with every morphism function.
// Assignment order is by ascending set size so dead branches die early; the
// result is re-sorted into the canonical shape-object tuple order.
inline LimitResult limit_set_diagram(const SetFunctor& diagram) {
    const FiniteCategory& shape = diagram.base;
    LimitResult result;
    result.shape_objects = shape.objects;

    std::map<std::string, std::size_t> obj_index;
    for (std::size_t i = 0; i < shape.objects.size(); ++i) obj_index[shape.objects[i]] = i;

    std::vector<std::size_t> order(shape.objects.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return diagram.set_at(shape.objects[a]).size() < diagram.set_at(shape.objects[b]).size();
    });
    std::vector<std::size_t> rank(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

    struct Edge {
        std::string morphism;
        std::size_t dom, cod; // object indices
    };
    std::vector<std::vector<Edge>> checks_at(order.size()); // keyed by assignment rank
    for (const auto& m : shape.morphisms) {
        if (shape.is_identity(m.id)) continue;
        std::size_t dom = obj_index.at(diagram.fn_domain(m));
        std::size_t cod = obj_index.at(diagram.fn_codomain(m));
        checks_at[std::max(rank[dom], rank[cod])].push_back({m.id, dom, cod});
    }

    std::vector<std::string> chosen(shape.objects.size());
    auto search = [&](auto&& self, std::size_t depth) -> void {
        if (depth == order.size()) {
            Family fam;
            for (std::size_t i = 0; i < shape.objects.size(); ++i)
                fam.members[shape.objects[i]] = chosen[i];
            result.apex.push_back(std::move(fam));
            return;
        }
        std::size_t oi = order[depth];
        for (const auto& e : diagram.set_at(shape.objects[oi])) {
            chosen[oi] = e;
            bool ok = true;
            for (const auto& edge : checks_at[depth])
                if (diagram.apply(edge.morphism, chosen[edge.dom]) != chosen[edge.cod]) {
                    ok = false;
                    break;
                }
            if (ok) self(self, depth + 1);
        }
    };
    search(search, 0);

    std::sort(result.apex.begin(), result.apex.end(), [&](const Family& a, const Family& b) {
        for (const auto& obj : shape.objects) {
            const auto& x = a.members.at(obj);
            const auto& y = b.members.at(obj);
            if (x != y) return x < y;
        }
        return false;
    });
    return result;
}

// Inductive limit: the disjoint union of the object sets modulo the
// equivalence generated by x ~ F(f)(x), computed with union-find.
struct ColimitResult {
    // Each class lists its (object, element) members sorted; classes are
    // sorted by their first member.
    std::vector<std::vector<std::pair<std::string, std::string>>> classes;
    std::map<std::pair<std::string, std::string>, std::size_t> injection;

    std::size_t class_of(const std::string& obj, const std::string& elem) const {
        auto it = injection.find({obj, elem});
        if (it == injection.end())
            throw std::out_of_range("no element '" + elem + "' at object '" + obj + "'");
        return it->second;
    }
};

inline ColimitResult colimit_set_diagram(const SetFunctor& diagram) {
    const FiniteCategory& shape = diagram.base;
    std::vector<std::pair<std::string, std::string>> tagged;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (const auto& obj : shape.objects)
        for (const auto& e : diagram.set_at(obj)) {
            index[{obj, e}] = tagged.size();
            tagged.emplace_back(obj, e);
        }

    std::vector<std::size_t> parent(tagged.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

    for (const auto& m : shape.morphisms) {
        if (shape.is_identity(m.id)) continue;
        const std::string& dom = diagram.fn_domain(m);
        const std::string& cod = diagram.fn_codomain(m);
        for (const auto& e : diagram.set_at(dom))
            unite(index.at({dom, e}), index.at({cod, diagram.apply(m.id, e)}));
    }

    std::map<std::size_t, std::vector<std::pair<std::string, std::string>>> grouped;
    for (std::size_t i = 0; i < tagged.size(); ++i) grouped[find(i)].push_back(tagged[i]);

    ColimitResult result;
    for (auto& [root, members] : grouped) {
        std::sort(members.begin(), members.end());
        result.classes.push_back(std::move(members));
    }
    std::sort(result.classes.begin(), result.classes.end());
    for (std::size_t k = 0; k < result.classes.size(); ++k)
        for (const auto& member : result.classes[k]) result.injection[member] = k;
    return result;
}

enum class Direction { Projective, Inductive };

namespace detail {

// Families of morphisms of C indexed by the shape objects, one leg per
// object, satisfying leg-compatibility along every shape morphism. Covers
// both cones (legs out of X) and cocones (legs into X).
inline std::vector<std::map<std::string, std::string>>
enumerate_leg_families(const Functor& alpha, const std::string& x, Direction dir) {
    const FiniteCategory& shape = alpha.source;
    const FiniteCategory& c = alpha.target;

    std::vector<std::vector<std::string>> choices(shape.objects.size());
    for (std::size_t i = 0; i < shape.objects.size(); ++i) {
        const std::string& ai = alpha.on_object(shape.objects[i]);
        choices[i] = dir == Direction::Inductive ? c.hom(ai, x) : c.hom(x, ai);
    }

    std::map<std::string, std::size_t> obj_index;
    for (std::size_t i = 0; i < shape.objects.size(); ++i) obj_index[shape.objects[i]] = i;

    std::vector<std::map<std::string, std::string>> out;
    std::vector<std::string> legs(shape.objects.size());
    auto compatible_so_far = [&](std::size_t assigned) {
        for (const auto& m : shape.morphisms) {
            if (shape.is_identity(m.id)) continue;
            std::size_t si = obj_index.at(m.source), ti = obj_index.at(m.target);
            if (si >= assigned || ti >= assigned) continue;
            const std::string& am = alpha.on_morphism(m.id);
            if (dir == Direction::Inductive) {
                // cocones: leg_target . alpha(m) == leg_source
                if (c.compose(legs[ti], am) != legs[si]) return false;
            } else {
                // cones: alpha(m) . leg_source == leg_target
                if (c.compose(am, legs[si]) != legs[ti]) return false;
            }
        }
        return true;
    };
    auto search = [&](auto&& self, std::size_t depth) -> void {
        if (depth == shape.objects.size()) {
            std::map<std::string, std::string> fam;
            for (std::size_t i = 0; i < shape.objects.size(); ++i) fam[shape.objects[i]] = legs[i];
            out.push_back(std::move(fam));
            return;
        }
        for (const auto& leg : choices[depth]) {
            legs[depth] = leg;
            if (compatible_so_far(depth + 1)) self(self, depth + 1);
        }
    };
    search(search, 0);
    return out;
}

inline std::string leg_family_name(const std::vector<std::string>& shape_objects,
                                   const std::map<std::string, std::string>& fam) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape_objects.size(); ++i) {
        if (i) s += ',';
        s += fam.at(shape_objects[i]);
    }
    s += ')';
    return s;
}

} // namespace detail

// The limit presheaf of a diagram alpha: A -> C. The inductive direction
// sends X to the set of cocones under alpha with nadir X (covariant, acting
// by post-composition); the projective direction sends X to the cones over
// alpha with apex X (contravariant, acting by pre-composition). Elements are
// named by their leg tuple in shape-object order.
inline SetFunctor presheaf_limit(const Functor& alpha, Direction dir) {
    fincat::require_valid(alpha.source, "presheaf_limit shape");
    fincat::require_valid(alpha.target, "presheaf_limit target");
    {
        fincat::ValidationReport rep = fincat::check_functor(alpha);
        if (!rep.valid())
            throw std::invalid_argument("presheaf_limit: diagram functor invalid:\n" + rep.summary());
    }

    const FiniteCategory& c = alpha.target;
    SetFunctor out;
    out.base = c;
    out.variance = dir == Direction::Inductive ? Variance::Covariant : Variance::Contravariant;

    std::map<std::string, std::vector<std::map<std::string, std::string>>> families;
    for (const auto& x : c.objects) {
        families[x] = detail::enumerate_leg_families(alpha, x, dir);
        auto& names = out.object_sets[x];
        for (const auto& fam : families[x])
            names.push_back(detail::leg_family_name(alpha.source.objects, fam));
    }

    for (const auto& m : c.morphisms) {
        auto& fn = out.morphism_fns[m.id];
        const std::string& dom = out.fn_domain(m);
        for (const auto& fam : families[dom]) {
            std::map<std::string, std::string> image;
            for (const auto& [shape_obj, leg] : fam)
                image[shape_obj] = dir == Direction::Inductive ? c.compose(m.id, leg)
                                                               : c.compose(leg, m.id);
            fn[detail::leg_family_name(alpha.source.objects, fam)] =
                detail::leg_family_name(alpha.source.objects, image);
        }
    }
    return out;
}

// A diagram valued in presheaves over a common base: one SetFunctor per
// shape object and one natural transformation per non-identity shape
// morphism, functorial over the shape's composition table.
struct PresheafDiagram {
    FiniteCategory shape;
    std::map<std::string, SetFunctor> nodes;
    std::map<std::string, NaturalTransformation> arrows;

    const SetFunctor& node(const std::string& i) const {
        auto it = nodes.find(i);
        if (it == nodes.end()) throw std::out_of_range("no node at shape object '" + i + "'");
        return it->second;
    }

    NaturalTransformation arrow(const std::string& f) const {
        if (shape.is_identity(f)) return fincat::identity_nat(node(shape.morphism(f).source));
        auto it = arrows.find(f);
        if (it == arrows.end()) throw std::out_of_range("no arrow for shape morphism '" + f + "'");
        return it->second;
    }
};

inline fincat::ValidationReport validate_presheaf_diagram(const PresheafDiagram& d) {
    fincat::ValidationReport rep = fincat::validate_category(d.shape);
    if (!rep.valid()) return rep;

    const SetFunctor* first = nullptr;
    for (const auto& i : d.shape.objects) {
        auto it = d.nodes.find(i);
        if (it == d.nodes.end()) {
            rep.structural.push_back({fincat::IssueKind::NotTotal, "no node at shape object '" + i + "'"});
            continue;
        }
        if (!first) first = &it->second;
        if (!(it->second.base == first->base) || it->second.variance != first->variance)
            rep.structural.push_back({fincat::IssueKind::EndpointMismatch,
                                      "node at '" + i + "' disagrees on base or variance"});
    }
    if (!rep.structural.empty()) return rep;

    for (const auto& m : d.shape.morphisms) {
        if (d.shape.is_identity(m.id)) continue;
        auto it = d.arrows.find(m.id);
        if (it == d.arrows.end()) {
            rep.structural.push_back({fincat::IssueKind::NotTotal,
                                      "no arrow for shape morphism '" + m.id + "'"});
            continue;
        }
        if (!(it->second.source_functor == d.node(m.source)) ||
            !(it->second.target_functor == d.node(m.target)))
            rep.structural.push_back({fincat::IssueKind::EndpointMismatch,
                                      "arrow '" + m.id + "' does not match its endpoint nodes"});
        fincat::ValidationReport nat = fincat::check_natural(it->second);
        for (auto& i : nat.structural) rep.structural.push_back(std::move(i));
        for (auto& i : nat.violations) rep.violations.push_back(std::move(i));
    }
    if (!rep.structural.empty() || !rep.violations.empty()) return rep;

    for (const auto& [key, value] : d.shape.composition) {
        if (d.shape.is_identity(key.first) || d.shape.is_identity(key.second)) continue;
        NaturalTransformation expected = fincat::compose_nat(d.arrow(key.first), d.arrow(key.second));
        if (expected.components != d.arrow(value).components)
            rep.violations.push_back({fincat::IssueKind::PreservationComposition,
                                      "diagram arrows not functorial on (" + key.first + ", " + key.second + ")"});
    }
    return rep;
}

namespace detail {

// The Set-diagram over the shape obtained by evaluating every node and arrow
// at a single base object.
inline SetFunctor evaluate_at(const PresheafDiagram& d, const std::string& x) {
    SetFunctor s;
    s.base = d.shape;
    s.variance = Variance::Covariant;
    for (const auto& i : d.shape.objects) s.object_sets[i] = d.node(i).set_at(x);
    for (const auto& m : d.shape.morphisms) {
        auto& fn = s.morphism_fns[m.id];
        if (d.shape.is_identity(m.id)) {
            for (const auto& e : s.object_sets.at(m.source)) fn[e] = e;
        } else {
            fn = d.arrow(m.id).components.at(x);
        }
    }
    return s;
}

} // namespace detail

struct PointwiseColimit {
    SetFunctor functor;
    std::map<std::string, NaturalTransformation> injections; // shape object -> node => colimit
};

struct PointwiseLimit {
    SetFunctor functor;
    std::map<std::string, NaturalTransformation> projections; // shape object -> limit => node
};

// Colimit of a presheaf diagram, computed pointwise. Class names are the
// "node:element" tag of the smallest member, which is unique per class.
inline PointwiseColimit pointwise_colimit(const PresheafDiagram& d) {
    if (d.shape.objects.empty())
        throw std::invalid_argument("pointwise_colimit: empty shape");
    const SetFunctor& first = d.node(d.shape.objects.front());
    const FiniteCategory& base = first.base;

    PointwiseColimit out;
    out.functor.base = base;
    out.functor.variance = first.variance;

    std::map<std::string, ColimitResult> columns;
    std::map<std::string, std::vector<std::string>> class_names;
    for (const auto& x : base.objects) {
        columns[x] = colimit_set_diagram(detail::evaluate_at(d, x));
        auto& names = class_names[x];
        for (const auto& cls : columns[x].classes)
            names.push_back(cls.front().first + ":" + cls.front().second);
        out.functor.object_sets[x] = names;
    }

    for (const auto& m : base.morphisms) {
        auto& fn = out.functor.morphism_fns[m.id];
        const std::string& dom = out.functor.fn_domain(m);
        const std::string& cod = out.functor.fn_codomain(m);
        const ColimitResult& dom_col = columns.at(dom);
        const ColimitResult& cod_col = columns.at(cod);
        for (std::size_t k = 0; k < dom_col.classes.size(); ++k) {
            const auto& [node_name, elem] = dom_col.classes[k].front();
            const std::string& image = d.node(node_name).apply(m.id, elem);
            fn[class_names.at(dom)[k]] = class_names.at(cod)[cod_col.class_of(node_name, image)];
        }
    }

    for (const auto& i : d.shape.objects) {
        NaturalTransformation ins;
        ins.source_functor = d.node(i);
        ins.target_functor = out.functor;
        for (const auto& x : base.objects) {
            auto& comp = ins.components[x];
            for (const auto& e : d.node(i).set_at(x))
                comp[e] = class_names.at(x)[columns.at(x).class_of(i, e)];
        }
        out.injections[i] = std::move(ins);
    }
    return out;
}

// Limit of a presheaf diagram, computed pointwise; elements are compatible
// families named by their tuple in shape-object order.
inline PointwiseLimit pointwise_limit(const PresheafDiagram& d) {
    if (d.shape.objects.empty())
        throw std::invalid_argument("pointwise_limit: empty shape");
    const SetFunctor& first = d.node(d.shape.objects.front());
    const FiniteCategory& base = first.base;

    PointwiseLimit out;
    out.functor.base = base;
    out.functor.variance = first.variance;

    std::map<std::string, LimitResult> columns;
    for (const auto& x : base.objects) {
        columns[x] = limit_set_diagram(detail::evaluate_at(d, x));
        auto& names = out.functor.object_sets[x];
        for (const auto& fam : columns[x].apex) names.push_back(columns[x].name_of(fam));
    }

    for (const auto& m : base.morphisms) {
        auto& fn = out.functor.morphism_fns[m.id];
        const std::string& dom = out.functor.fn_domain(m);
        const std::string& cod = out.functor.fn_codomain(m);
        for (const auto& fam : columns.at(dom).apex) {
            Family image;
            for (const auto& [node_name, elem] : fam.members)
                image.members[node_name] = d.node(node_name).apply(m.id, elem);
            fn[columns.at(dom).name_of(fam)] = columns.at(cod).name_of(image);
        }
    }

    for (const auto& i : d.shape.objects) {
        NaturalTransformation proj;
        proj.source_functor = out.functor;
        proj.target_functor = d.node(i);
        for (const auto& x : base.objects) {
            auto& comp = proj.components[x];
            for (const auto& fam : columns.at(x).apex)
                comp[columns.at(x).name_of(fam)] = fam.members.at(i);
        }
        out.projections[i] = std::move(proj);
    }
    return out;
}

struct ExchangeReport {
    std::size_t hom_side = 0;   // transformations against the (co)limit
    std::size_t limit_side = 0; // compatible families of per-node hom-sets
    bool injective = false;
    bool surjective = false;

    bool bijection() const { return injective && surjective && hom_side == limit_side; }
};

namespace detail {

// The Set-diagram i |-> Nat(node_i, A) (contravariant over the shape) or
// i |-> Nat(B, node_i) (covariant), with actions by whiskering along the
// diagram arrows. Elements are the canonical transformation keys.
inline SetFunctor hom_diagram(const PresheafDiagram& d, const SetFunctor& other, bool other_is_target,
                              std::map<std::string, std::vector<NaturalTransformation>>& nats_by_node) {
    SetFunctor h;
    h.base = d.shape;
    h.variance = other_is_target ? Variance::Contravariant : Variance::Covariant;
    for (const auto& i : d.shape.objects) {
        nats_by_node[i] = other_is_target ? fincat::enumerate_nat(d.node(i), other)
                                          : fincat::enumerate_nat(other, d.node(i));
        auto& names = h.object_sets[i];
        for (const auto& t : nats_by_node[i]) names.push_back(fincat::nat_key(t));
    }
    for (const auto& m : d.shape.morphisms) {
        auto& fn = h.morphism_fns[m.id];
        if (d.shape.is_identity(m.id)) {
            for (const auto& e : h.object_sets.at(m.source)) fn[e] = e;
            continue;
        }
        const std::string& dom = h.fn_domain(m); // m.target when contravariant
        NaturalTransformation along = d.arrow(m.id);
        for (const auto& t : nats_by_node.at(dom)) {
            NaturalTransformation moved = other_is_target ? fincat::compose_nat(t, along)
                                                          : fincat::compose_nat(along, t);
            fn[fincat::nat_key(t)] = fincat::nat_key(moved);
        }
    }
    return h;
}

inline ExchangeReport compare_to_apex(const std::vector<Family>& image_families,
                                      const LimitResult& apex_side) {
    ExchangeReport rep;
    rep.hom_side = image_families.size();
    rep.limit_side = apex_side.apex.size();

    std::set<std::string> apex_names;
    for (const auto& fam : apex_side.apex) apex_names.insert(apex_side.name_of(fam));
    std::set<std::string> image_names;
    bool all_land = true;
    for (const auto& fam : image_families) {
        std::string name = apex_side.name_of(fam);
        if (!apex_names.count(name)) all_land = false;
        image_names.insert(name);
    }
    rep.injective = image_names.size() == image_families.size();
    rep.surjective = all_land && image_names.size() == apex_names.size();
    return rep;
}

} // namespace detail

// hom(colim d, A) vs lim_i hom(node_i, A): enumerates both sides and checks
// that restricting along the colimit injections is a bijection.
inline ExchangeReport verify_hom_limit_exchange(const PresheafDiagram& d, const SetFunctor& a) {
    PointwiseColimit colim = pointwise_colimit(d);
    if (!(a.base == colim.functor.base) || a.variance != colim.functor.variance)
        throw std::invalid_argument("verify_hom_limit_exchange: presheaf over a different base");

    std::vector<NaturalTransformation> lhs = fincat::enumerate_nat(colim.functor, a);

    std::map<std::string, std::vector<NaturalTransformation>> nats_by_node;
    SetFunctor h = detail::hom_diagram(d, a, /*other_is_target=*/true, nats_by_node);
    LimitResult rhs = limit_set_diagram(h);

    std::vector<Family> images;
    images.reserve(lhs.size());
    for (const auto& eta : lhs) {
        Family fam;
        for (const auto& i : d.shape.objects)
            fam.members[i] = fincat::nat_key(fincat::compose_nat(eta, colim.injections.at(i)));
        images.push_back(std::move(fam));
    }
    return detail::compare_to_apex(images, rhs);
}

// hom(B, lim d) vs lim_i hom(B, node_i): the dual orientation, used for the
// whole-vs-factored scenario comparison.
inline ExchangeReport verify_hom_into_limit_exchange(const SetFunctor& b, const PresheafDiagram& d) {
    PointwiseLimit lim = pointwise_limit(d);
    if (!(b.base == lim.functor.base) || b.variance != lim.functor.variance)
        throw std::invalid_argument("verify_hom_into_limit_exchange: presheaf over a different base");

    std::vector<NaturalTransformation> lhs = fincat::enumerate_nat(b, lim.functor);

    std::map<std::string, std::vector<NaturalTransformation>> nats_by_node;
    SetFunctor h = detail::hom_diagram(d, b, /*other_is_target=*/false, nats_by_node);
    LimitResult rhs = limit_set_diagram(h);

    std::vector<Family> images;
    images.reserve(lhs.size());
    for (const auto& eta : lhs) {
        Family fam;
        for (const auto& i : d.shape.objects)
            fam.members[i] = fincat::nat_key(fincat::compose_nat(lim.projections.at(i), eta));
        images.push_back(std::move(fam));
    }
    return detail::compare_to_apex(images, rhs);
}

} // namespace cattice::limits
