// Exact finite categories: objects, named morphisms, an explicit composition
// table, functors, Set-valued functors, natural transformations, and the
// Yoneda embeddings. Everything is enumerable and validated against the
// axioms directly, so this module doubles as the brute-force oracle for the
// rest of the library.
//
// All values are plain immutable-after-construction data with value
// semantics; they can be shared freely across threads.
#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cattice::fincat {

struct Morphism {
    std::string id;
    std::string source;
    std::string target;
    std::string label; // defaults to id when unset

    friend bool operator==(const Morphism&, const Morphism&) = default;
};

// Composition is stored as a total table keyed by (g, f) for g after f.
// Hom-sets are derived views; the table is the single source of truth.
struct FiniteCategory {
    std::vector<std::string> objects;
    std::vector<Morphism> morphisms;
    std::map<std::string, std::string> identity; // object -> morphism id
    std::map<std::pair<std::string, std::string>, std::string> composition;

    friend bool operator==(const FiniteCategory&, const FiniteCategory&) = default;

    bool has_object(const std::string& x) const {
        return std::find(objects.begin(), objects.end(), x) != objects.end();
    }

    const Morphism* find_morphism(const std::string& id) const {
        for (const auto& m : morphisms)
            if (m.id == id) return &m;
        return nullptr;
    }

    const Morphism& morphism(const std::string& id) const {
        const Morphism* m = find_morphism(id);
        if (!m) throw std::out_of_range("unknown morphism id: " + id);
        return *m;
    }

    bool is_identity(const std::string& id) const {
        for (const auto& [obj, mid] : identity)
            if (mid == id) return true;
        return false;
    }

    // Morphism ids X -> Y in declaration order.
    std::vector<std::string> hom(const std::string& x, const std::string& y) const {
        std::vector<std::string> out;
        for (const auto& m : morphisms)
            if (m.source == x && m.target == y) out.push_back(m.id);
        return out;
    }

    const std::string& compose(const std::string& g, const std::string& f) const {
        auto it = composition.find({g, f});
        if (it == composition.end())
            throw std::out_of_range("no composition entry for (" + g + ", " + f + ")");
        return it->second;
    }
};

enum class IssueKind {
    UnresolvedObject,
    UnresolvedMorphism,
    DuplicateIdentifier,
    MissingIdentity,
    IdentityEndpoints,
    IdentityLaw,
    Associativity,
    MissingComposite,
    ForbiddenComposite,
    CompositeEndpoints,
    NotTotal,
    PreservationIdentity,
    PreservationComposition,
    EndpointMismatch,
    NaturalitySquare,
};

struct Issue {
    IssueKind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<Issue> structural; // unresolved identifiers, totality failures
    std::vector<Issue> violations; // broken axioms, with witnesses

    bool valid() const { return structural.empty() && violations.empty(); }

    std::string summary() const {
        if (valid()) return "0 violations";
        std::string s;
        for (const auto& i : structural) s += "structural: " + i.detail + "\n";
        for (const auto& i : violations) s += "violation: " + i.detail + "\n";
        return s;
    }
};

// Checks every category axiom by enumeration and reports an exhaustive
// witness list. Structural problems (dangling identifiers) suppress the
// axiom pass since the table cannot be interpreted.
inline ValidationReport validate_category(const FiniteCategory& c) {
    ValidationReport rep;
    auto structural = [&](IssueKind k, std::string d) {
        rep.structural.push_back({k, std::move(d)});
    };
    auto violation = [&](IssueKind k, std::string d) {
        rep.violations.push_back({k, std::move(d)});
    };

    std::set<std::string> object_set;
    for (const auto& o : c.objects)
        if (!object_set.insert(o).second)
            structural(IssueKind::DuplicateIdentifier, "duplicate object '" + o + "'");

    std::set<std::string> morphism_ids;
    for (const auto& m : c.morphisms) {
        if (!morphism_ids.insert(m.id).second)
            structural(IssueKind::DuplicateIdentifier, "duplicate morphism '" + m.id + "'");
        if (!object_set.count(m.source))
            structural(IssueKind::UnresolvedObject,
                       "morphism '" + m.id + "' has unknown source '" + m.source + "'");
        if (!object_set.count(m.target))
            structural(IssueKind::UnresolvedObject,
                       "morphism '" + m.id + "' has unknown target '" + m.target + "'");
    }

    for (const auto& [obj, mid] : c.identity) {
        if (!object_set.count(obj))
            structural(IssueKind::UnresolvedObject, "identity entry for unknown object '" + obj + "'");
        if (!morphism_ids.count(mid))
            structural(IssueKind::UnresolvedMorphism,
                       "identity of '" + obj + "' is unknown morphism '" + mid + "'");
    }

    for (const auto& [key, value] : c.composition) {
        if (!morphism_ids.count(key.first))
            structural(IssueKind::UnresolvedMorphism, "composition key references unknown morphism '" + key.first + "'");
        if (!morphism_ids.count(key.second))
            structural(IssueKind::UnresolvedMorphism, "composition key references unknown morphism '" + key.second + "'");
        if (!morphism_ids.count(value))
            structural(IssueKind::UnresolvedMorphism, "composition value references unknown morphism '" + value + "'");
    }

    if (!rep.structural.empty()) return rep;

    for (const auto& o : c.objects) {
        auto it = c.identity.find(o);
        if (it == c.identity.end()) {
            violation(IssueKind::MissingIdentity, "object '" + o + "' has no identity morphism");
            continue;
        }
        const Morphism& id = c.morphism(it->second);
        if (id.source != o || id.target != o)
            violation(IssueKind::IdentityEndpoints,
                      "identity '" + id.id + "' of '" + o + "' is not an endomorphism of '" + o + "'");
    }

    // Closure both ways: an entry for every composable pair, no entry for a
    // non-composable one, and every recorded composite has the right endpoints.
    for (const auto& g : c.morphisms) {
        for (const auto& f : c.morphisms) {
            bool composable = (f.target == g.source);
            auto it = c.composition.find({g.id, f.id});
            if (composable && it == c.composition.end())
                violation(IssueKind::MissingComposite,
                          "missing composition entry (" + g.id + ", " + f.id + ")");
            if (!composable && it != c.composition.end())
                violation(IssueKind::ForbiddenComposite,
                          "entry (" + g.id + ", " + f.id + ") composes non-composable morphisms");
            if (composable && it != c.composition.end()) {
                const Morphism& gf = c.morphism(it->second);
                if (gf.source != f.source || gf.target != g.target)
                    violation(IssueKind::CompositeEndpoints,
                              "composite '" + gf.id + "' of (" + g.id + ", " + f.id + ") has wrong endpoints");
            }
        }
    }

    auto lookup = [&](const std::string& g, const std::string& f) -> const std::string* {
        auto it = c.composition.find({g, f});
        return it == c.composition.end() ? nullptr : &it->second;
    };

    for (const auto& f : c.morphisms) {
        auto idx = c.identity.find(f.source);
        auto idy = c.identity.find(f.target);
        if (idx != c.identity.end()) {
            if (const std::string* r = lookup(f.id, idx->second); r && *r != f.id)
                violation(IssueKind::IdentityLaw,
                          "compose(" + f.id + ", " + idx->second + ") = " + *r + " but should be " + f.id);
        }
        if (idy != c.identity.end()) {
            if (const std::string* r = lookup(idy->second, f.id); r && *r != f.id)
                violation(IssueKind::IdentityLaw,
                          "compose(" + idy->second + ", " + f.id + ") = " + *r + " but should be " + f.id);
        }
    }

    for (const auto& h : c.morphisms) {
        for (const auto& g : c.morphisms) {
            if (g.target != h.source) continue;
            for (const auto& f : c.morphisms) {
                if (f.target != g.source) continue;
                const std::string* gf = lookup(g.id, f.id);
                const std::string* hg = lookup(h.id, g.id);
                if (!gf || !hg) continue; // closure violation already reported
                const std::string* left = lookup(h.id, *gf);
                const std::string* right = lookup(*hg, f.id);
                if (left && right && *left != *right)
                    violation(IssueKind::Associativity,
                              "associativity fails on (" + h.id + ", " + g.id + ", " + f.id + "): " +
                                  *left + " != " + *right);
            }
        }
    }

    return rep;
}

inline void require_valid(const FiniteCategory& c, const std::string& what) {
    ValidationReport rep = validate_category(c);
    if (!rep.valid())
        throw std::invalid_argument(what + " is not a valid category:\n" + rep.summary());
}

// Same objects, all morphisms reversed, composition table transposed.
inline FiniteCategory opposite(const FiniteCategory& c) {
    require_valid(c, "opposite input");
    FiniteCategory op;
    op.objects = c.objects;
    op.morphisms = c.morphisms;
    for (auto& m : op.morphisms) std::swap(m.source, m.target);
    op.identity = c.identity;
    for (const auto& [key, value] : c.composition)
        op.composition[{key.second, key.first}] = value;
    return op;
}

struct Functor {
    FiniteCategory source;
    FiniteCategory target;
    std::map<std::string, std::string> object_map;
    std::map<std::string, std::string> morphism_map;

    const std::string& on_object(const std::string& x) const {
        auto it = object_map.find(x);
        if (it == object_map.end()) throw std::out_of_range("functor undefined on object '" + x + "'");
        return it->second;
    }
    const std::string& on_morphism(const std::string& f) const {
        auto it = morphism_map.find(f);
        if (it == morphism_map.end()) throw std::out_of_range("functor undefined on morphism '" + f + "'");
        return it->second;
    }
};

inline ValidationReport check_functor(const Functor& fun) {
    ValidationReport rep;
    for (const auto& x : fun.source.objects) {
        auto it = fun.object_map.find(x);
        if (it == fun.object_map.end())
            rep.structural.push_back({IssueKind::NotTotal, "object_map undefined on '" + x + "'"});
        else if (!fun.target.has_object(it->second))
            rep.structural.push_back({IssueKind::UnresolvedObject,
                                      "object_map sends '" + x + "' to unknown '" + it->second + "'"});
    }
    for (const auto& m : fun.source.morphisms) {
        auto it = fun.morphism_map.find(m.id);
        if (it == fun.morphism_map.end())
            rep.structural.push_back({IssueKind::NotTotal, "morphism_map undefined on '" + m.id + "'"});
        else if (!fun.target.find_morphism(it->second))
            rep.structural.push_back({IssueKind::UnresolvedMorphism,
                                      "morphism_map sends '" + m.id + "' to unknown '" + it->second + "'"});
    }
    if (!rep.structural.empty()) return rep;

    for (const auto& m : fun.source.morphisms) {
        const Morphism& fm = fun.target.morphism(fun.on_morphism(m.id));
        if (fm.source != fun.on_object(m.source) || fm.target != fun.on_object(m.target))
            rep.violations.push_back({IssueKind::EndpointMismatch,
                                      "image of '" + m.id + "' has wrong endpoints"});
    }
    for (const auto& [obj, mid] : fun.source.identity) {
        auto target_id = fun.target.identity.find(fun.on_object(obj));
        if (target_id == fun.target.identity.end()) continue;
        if (fun.on_morphism(mid) != target_id->second)
            rep.violations.push_back({IssueKind::PreservationIdentity,
                                      "identity of '" + obj + "' not sent to identity of '" +
                                          fun.on_object(obj) + "'"});
    }
    for (const auto& [key, value] : fun.source.composition) {
        auto it = fun.target.composition.find({fun.on_morphism(key.first), fun.on_morphism(key.second)});
        if (it == fun.target.composition.end()) {
            rep.violations.push_back({IssueKind::PreservationComposition,
                                      "images of (" + key.first + ", " + key.second + ") are not composable"});
            continue;
        }
        if (it->second != fun.on_morphism(value))
            rep.violations.push_back({IssueKind::PreservationComposition,
                                      "composition not preserved on (" + key.first + ", " + key.second +
                                          "): " + it->second + " != " + fun.on_morphism(value)});
    }
    return rep;
}

enum class Variance { Covariant, Contravariant };

inline const char* variance_name(Variance v) {
    return v == Variance::Covariant ? "covariant" : "contravariant";
}

// A functor from the base into finite sets. Contravariant instances are the
// presheaves; covariant instances play the role of the dual presheaves, with
// the direction of each morphism function reversed accordingly.
struct SetFunctor {
    FiniteCategory base;
    Variance variance = Variance::Contravariant;
    std::map<std::string, std::vector<std::string>> object_sets;
    std::map<std::string, std::map<std::string, std::string>> morphism_fns;

    friend bool operator==(const SetFunctor&, const SetFunctor&) = default;

    const std::vector<std::string>& set_at(const std::string& x) const {
        auto it = object_sets.find(x);
        if (it == object_sets.end()) throw std::out_of_range("no set at object '" + x + "'");
        return it->second;
    }

    // Object whose set is the domain of the function attached to f.
    const std::string& fn_domain(const Morphism& f) const {
        return variance == Variance::Covariant ? f.source : f.target;
    }
    const std::string& fn_codomain(const Morphism& f) const {
        return variance == Variance::Covariant ? f.target : f.source;
    }

    const std::string& apply(const std::string& morphism_id, const std::string& elem) const {
        auto fit = morphism_fns.find(morphism_id);
        if (fit == morphism_fns.end())
            throw std::out_of_range("no function for morphism '" + morphism_id + "'");
        auto eit = fit->second.find(elem);
        if (eit == fit->second.end())
            throw std::out_of_range("function of '" + morphism_id + "' undefined on '" + elem + "'");
        return eit->second;
    }
};

inline ValidationReport validate_set_functor(const SetFunctor& f) {
    ValidationReport rep;
    for (const auto& x : f.base.objects) {
        if (!f.object_sets.count(x))
            rep.structural.push_back({IssueKind::NotTotal, "no set assigned to object '" + x + "'"});
        else {
            std::set<std::string> seen;
            for (const auto& e : f.object_sets.at(x))
                if (!seen.insert(e).second)
                    rep.structural.push_back({IssueKind::DuplicateIdentifier,
                                              "duplicate element '" + e + "' at object '" + x + "'"});
        }
    }
    for (const auto& [x, elems] : f.object_sets)
        if (!f.base.has_object(x))
            rep.structural.push_back({IssueKind::UnresolvedObject, "set assigned to unknown object '" + x + "'"});

    for (const auto& m : f.base.morphisms) {
        auto it = f.morphism_fns.find(m.id);
        if (it == f.morphism_fns.end()) {
            rep.structural.push_back({IssueKind::NotTotal, "no function for morphism '" + m.id + "'"});
            continue;
        }
        if (!f.object_sets.count(f.fn_domain(m)) || !f.object_sets.count(f.fn_codomain(m))) continue;
        const auto& dom = f.object_sets.at(f.fn_domain(m));
        const auto& cod = f.object_sets.at(f.fn_codomain(m));
        for (const auto& e : dom)
            if (!it->second.count(e))
                rep.structural.push_back({IssueKind::NotTotal,
                                          "function of '" + m.id + "' undefined on '" + e + "'"});
        for (const auto& [e, img] : it->second) {
            if (std::find(dom.begin(), dom.end(), e) == dom.end())
                rep.structural.push_back({IssueKind::UnresolvedObject,
                                          "function of '" + m.id + "' defined on foreign element '" + e + "'"});
            if (std::find(cod.begin(), cod.end(), img) == cod.end())
                rep.structural.push_back({IssueKind::UnresolvedObject,
                                          "function of '" + m.id + "' maps '" + e + "' outside its codomain"});
        }
    }
    if (!rep.structural.empty()) return rep;

    for (const auto& [obj, mid] : f.base.identity)
        for (const auto& e : f.set_at(obj))
            if (f.apply(mid, e) != e)
                rep.violations.push_back({IssueKind::PreservationIdentity,
                                          "identity '" + mid + "' moves element '" + e + "'"});

    for (const auto& [key, value] : f.base.composition) {
        const Morphism& g = f.base.morphism(key.first);
        const Morphism& fm = f.base.morphism(key.second);
        // covariant: F(g.f) = F(g) . F(f); contravariant: F(g.f) = F(f) . F(g)
        const std::string& inner = f.variance == Variance::Covariant ? fm.id : g.id;
        const std::string& outer = f.variance == Variance::Covariant ? g.id : fm.id;
        const Morphism& composite = f.base.morphism(value);
        for (const auto& e : f.set_at(f.fn_domain(composite))) {
            const std::string& two_step = f.apply(outer, f.apply(inner, e));
            if (f.apply(value, e) != two_step)
                rep.violations.push_back({IssueKind::PreservationComposition,
                                          "functoriality fails for (" + key.first + ", " + key.second +
                                              ") at element '" + e + "'"});
        }
    }
    return rep;
}

// Constant functor sending every object to the one-point set {pt}.
inline SetFunctor constant_singleton(const FiniteCategory& base, Variance variance) {
    SetFunctor f;
    f.base = base;
    f.variance = variance;
    for (const auto& x : base.objects) f.object_sets[x] = {"pt"};
    for (const auto& m : base.morphisms) f.morphism_fns[m.id] = {{"pt", "pt"}};
    return f;
}

// h_C(X) = hom(-, X) for the contravariant side, k_C(X) = hom(X, -) for the
// covariant side. Elements are the morphism ids themselves; the action is
// pre- or post-composition read off the table.
inline SetFunctor yoneda_embed(const FiniteCategory& c, const std::string& x, Variance variance) {
    if (!c.has_object(x)) throw std::invalid_argument("yoneda_embed: unknown object '" + x + "'");
    SetFunctor f;
    f.base = c;
    f.variance = variance;
    for (const auto& y : c.objects)
        f.object_sets[y] = variance == Variance::Contravariant ? c.hom(y, x) : c.hom(x, y);
    for (const auto& m : c.morphisms) {
        auto& fn = f.morphism_fns[m.id];
        if (variance == Variance::Contravariant) {
            // h(X)(m): hom(target, X) -> hom(source, X), g |-> g . m
            for (const auto& g : c.hom(m.target, x)) fn[g] = c.compose(g, m.id);
        } else {
            // k(X)(m): hom(X, source) -> hom(X, target), g |-> m . g
            for (const auto& g : c.hom(x, m.source)) fn[g] = c.compose(m.id, g);
        }
    }
    return f;
}

struct NaturalTransformation {
    SetFunctor source_functor;
    SetFunctor target_functor;
    std::map<std::string, std::map<std::string, std::string>> components;

    const std::string& apply(const std::string& obj, const std::string& elem) const {
        auto cit = components.find(obj);
        if (cit == components.end()) throw std::out_of_range("no component at object '" + obj + "'");
        auto eit = cit->second.find(elem);
        if (eit == cit->second.end())
            throw std::out_of_range("component at '" + obj + "' undefined on '" + elem + "'");
        return eit->second;
    }
};

// Canonical text encoding of a transformation's components; used as element
// names wherever hom-sets of presheaves become sets in their own right.
inline std::string nat_key(const NaturalTransformation& t) {
    std::string key;
    for (const auto& x : t.source_functor.base.objects) {
        key += x;
        key += '{';
        bool first = true;
        for (const auto& e : t.source_functor.set_at(x)) {
            if (!first) key += ',';
            first = false;
            key += e;
            key += ':';
            key += t.apply(x, e);
        }
        key += '}';
    }
    return key;
}

inline ValidationReport check_natural(const NaturalTransformation& t) {
    ValidationReport rep;
    const SetFunctor& F = t.source_functor;
    const SetFunctor& G = t.target_functor;
    if (!(F.base == G.base) || F.variance != G.variance) {
        rep.structural.push_back({IssueKind::EndpointMismatch,
                                  "source and target functors disagree on base or variance"});
        return rep;
    }
    for (const auto& x : F.base.objects) {
        auto cit = t.components.find(x);
        if (cit == t.components.end()) {
            rep.structural.push_back({IssueKind::NotTotal, "no component at object '" + x + "'"});
            continue;
        }
        const auto& gset = G.set_at(x);
        for (const auto& e : F.set_at(x)) {
            auto eit = cit->second.find(e);
            if (eit == cit->second.end())
                rep.structural.push_back({IssueKind::NotTotal,
                                          "component at '" + x + "' undefined on '" + e + "'"});
            else if (std::find(gset.begin(), gset.end(), eit->second) == gset.end())
                rep.structural.push_back({IssueKind::UnresolvedObject,
                                          "component at '" + x + "' maps '" + e + "' outside the target set"});
        }
    }
    if (!rep.structural.empty()) return rep;

    for (const auto& m : F.base.morphisms) {
        if (F.base.is_identity(m.id)) continue;
        // component at the domain of the function, then G's action, must agree
        // with F's action followed by the component at the codomain.
        const std::string& dom = F.fn_domain(m);
        const std::string& cod = F.fn_codomain(m);
        for (const auto& e : F.set_at(dom)) {
            const std::string& via_f = t.apply(cod, F.apply(m.id, e));
            const std::string& via_g = G.apply(m.id, t.apply(dom, e));
            if (via_f != via_g)
                rep.violations.push_back({IssueKind::NaturalitySquare,
                                          "square for '" + m.id + "' fails at element '" + e + "' of '" +
                                              dom + "'"});
        }
    }
    return rep;
}

inline NaturalTransformation identity_nat(const SetFunctor& f) {
    NaturalTransformation t;
    t.source_functor = f;
    t.target_functor = f;
    for (const auto& [x, elems] : f.object_sets) {
        auto& comp = t.components[x];
        for (const auto& e : elems) comp[e] = e;
    }
    return t;
}

// Vertical composition: after . before, with before: F => G, after: G => H.
inline NaturalTransformation compose_nat(const NaturalTransformation& after,
                                         const NaturalTransformation& before) {
    if (!(after.source_functor == before.target_functor))
        throw std::invalid_argument("compose_nat: transformations do not meet");
    NaturalTransformation t;
    t.source_functor = before.source_functor;
    t.target_functor = after.target_functor;
    for (const auto& [x, comp] : before.components) {
        auto& out = t.components[x];
        for (const auto& [e, mid] : comp) out[e] = after.apply(x, mid);
    }
    return t;
}

namespace detail {

// Dense indexed mirror of a pair of parallel functors, for enumeration.
struct NatSearchSpace {
    std::vector<std::string> objects;
    std::vector<std::vector<std::string>> f_elems, g_elems;
    // flattened variables: one per (object, F-element)
    std::vector<std::pair<std::size_t, std::size_t>> vars; // (object idx, elem idx)
    std::vector<std::vector<std::size_t>> var_of;          // [obj][elem] -> var index
    struct Constraint {
        std::size_t from_var;            // value determines...
        std::size_t to_var;              // ...this variable, via mapping
        std::vector<std::size_t> mapping; // g-element index -> g-element index
    };
    std::vector<Constraint> constraints;
    std::vector<std::vector<std::size_t>> constraints_at; // by max(from,to)
};

inline NatSearchSpace build_search_space(const SetFunctor& F, const SetFunctor& G) {
    NatSearchSpace s;
    s.objects = F.base.objects;
    std::map<std::string, std::size_t> obj_index;
    for (std::size_t i = 0; i < s.objects.size(); ++i) obj_index[s.objects[i]] = i;

    s.f_elems.resize(s.objects.size());
    s.g_elems.resize(s.objects.size());
    s.var_of.resize(s.objects.size());
    std::vector<std::map<std::string, std::size_t>> f_index(s.objects.size());
    std::vector<std::map<std::string, std::size_t>> g_index(s.objects.size());
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
        s.f_elems[i] = F.set_at(s.objects[i]);
        s.g_elems[i] = G.set_at(s.objects[i]);
        for (std::size_t j = 0; j < s.f_elems[i].size(); ++j) {
            f_index[i][s.f_elems[i][j]] = j;
            s.var_of[i].push_back(s.vars.size());
            s.vars.emplace_back(i, j);
        }
        for (std::size_t j = 0; j < s.g_elems[i].size(); ++j) g_index[i][s.g_elems[i][j]] = j;
    }

    for (const auto& m : F.base.morphisms) {
        if (F.base.is_identity(m.id)) continue;
        std::size_t dom = obj_index.at(F.fn_domain(m));
        std::size_t cod = obj_index.at(F.fn_codomain(m));
        for (std::size_t j = 0; j < s.f_elems[dom].size(); ++j) {
            NatSearchSpace::Constraint con;
            con.from_var = s.var_of[dom][j];
            con.to_var = s.var_of[cod][f_index[cod].at(F.apply(m.id, s.f_elems[dom][j]))];
            con.mapping.resize(s.g_elems[dom].size());
            for (std::size_t k = 0; k < s.g_elems[dom].size(); ++k)
                con.mapping[k] = g_index[cod].at(G.apply(m.id, s.g_elems[dom][k]));
            s.constraints.push_back(std::move(con));
        }
    }
    s.constraints_at.resize(s.vars.size());
    for (std::size_t ci = 0; ci < s.constraints.size(); ++ci) {
        const auto& con = s.constraints[ci];
        s.constraints_at[std::max(con.from_var, con.to_var)].push_back(ci);
    }
    return s;
}

} // namespace detail

// All natural transformations F => G, in a canonical lexicographic order
// (variables ordered by base object then source element, images by target
// element order). Element-level backtracking with naturality checked as soon
// as both ends of a square are assigned keeps the search close to the size
// of the answer.
inline std::vector<NaturalTransformation> enumerate_nat(const SetFunctor& F, const SetFunctor& G) {
    if (!(F.base == G.base))
        throw std::invalid_argument("enumerate_nat: functors have different bases");
    if (F.variance != G.variance)
        throw std::invalid_argument("enumerate_nat: functors have different variances");

    detail::NatSearchSpace s = detail::build_search_space(F, G);
    std::vector<NaturalTransformation> out;

    // An object with an empty target set and nonempty source admits no map.
    for (std::size_t i = 0; i < s.objects.size(); ++i)
        if (!s.f_elems[i].empty() && s.g_elems[i].empty()) return out;

    std::vector<std::size_t> assignment(s.vars.size(), 0);
    auto emit = [&]() {
        NaturalTransformation t;
        t.source_functor = F;
        t.target_functor = G;
        for (std::size_t i = 0; i < s.objects.size(); ++i) t.components[s.objects[i]];
        for (std::size_t v = 0; v < s.vars.size(); ++v) {
            auto [oi, ei] = s.vars[v];
            t.components[s.objects[oi]][s.f_elems[oi][ei]] = s.g_elems[oi][assignment[v]];
        }
        out.push_back(std::move(t));
    };

    auto consistent_at = [&](std::size_t v) {
        for (std::size_t ci : s.constraints_at[v]) {
            const auto& con = s.constraints[ci];
            if (con.mapping[assignment[con.from_var]] != assignment[con.to_var]) return false;
        }
        return true;
    };

    std::size_t n = s.vars.size();
    if (n == 0) { emit(); return out; }

    std::size_t v = 0;
    std::vector<std::size_t> cursor(n, 0);
    while (true) {
        auto [oi, ei] = s.vars[v];
        bool advanced = false;
        for (std::size_t cand = cursor[v]; cand < s.g_elems[oi].size(); ++cand) {
            assignment[v] = cand;
            if (consistent_at(v)) {
                cursor[v] = cand + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            cursor[v] = 0;
            if (v == 0) break;
            --v;
            continue;
        }
        if (v + 1 == n) {
            emit();
            continue; // stay at last variable, try the next candidate
        }
        ++v;
    }
    return out;
}

// Assembles a category from objects, named generating morphisms and the
// non-identity part of the composition table. Identities ("id_<object>") and
// every composition entry involving an identity are filled in automatically.
class CategoryBuilder {
public:
    CategoryBuilder& object(const std::string& name) {
        cat_.objects.push_back(name);
        return *this;
    }

    CategoryBuilder& objects(std::initializer_list<std::string> names) {
        for (const auto& n : names) cat_.objects.push_back(n);
        return *this;
    }

    CategoryBuilder& morphism(const std::string& id, const std::string& source,
                              const std::string& target, const std::string& label = "") {
        cat_.morphisms.push_back({id, source, target, label.empty() ? id : label});
        return *this;
    }

    // g after f equals h.
    CategoryBuilder& compose(const std::string& g, const std::string& f, const std::string& h) {
        cat_.composition[{g, f}] = h;
        return *this;
    }

    FiniteCategory build() const {
        FiniteCategory c = cat_;
        std::vector<Morphism> ids;
        for (const auto& obj : c.objects) {
            std::string id_name = "id_" + obj;
            ids.push_back({id_name, obj, obj, "id"});
            c.identity[obj] = id_name;
        }
        c.morphisms.insert(c.morphisms.begin(), ids.begin(), ids.end());
        for (const auto& m : c.morphisms) {
            c.composition[{c.identity.at(m.target), m.id}] = m.id;
            c.composition[{m.id, c.identity.at(m.source)}] = m.id;
        }
        return c;
    }

private:
    FiniteCategory cat_;
};

struct YonedaReport {
    std::size_t nat_count = 0;     // |Nat(h_C(X), A)| resp. |Nat(k_C(X), A)|
    std::size_t element_count = 0; // |A(X)|
    bool injective = false;
    bool surjective = false;

    bool bijection() const { return injective && surjective && nat_count == element_count; }
};

// Evaluates the canonical map eta |-> eta_X(id_X) by full enumeration and
// reports whether it is a bijection onto A(X). Contravariant A is checked
// against h_C(X), covariant A against k_C(X).
inline YonedaReport verify_yoneda(const FiniteCategory& c, const std::string& x, const SetFunctor& a) {
    if (!c.has_object(x)) throw std::invalid_argument("verify_yoneda: unknown object '" + x + "'");
    if (!(a.base == c)) throw std::invalid_argument("verify_yoneda: presheaf lives over a different base");

    SetFunctor h = yoneda_embed(c, x, a.variance);
    std::vector<NaturalTransformation> nats = enumerate_nat(h, a);
    const std::string& id_x = c.identity.at(x);

    YonedaReport rep;
    rep.nat_count = nats.size();
    rep.element_count = a.set_at(x).size();
    std::set<std::string> images;
    for (const auto& t : nats) images.insert(t.apply(x, id_x));
    rep.injective = images.size() == nats.size();
    rep.surjective = images.size() == rep.element_count;
    return rep;
}

} // namespace cattice::fincat
