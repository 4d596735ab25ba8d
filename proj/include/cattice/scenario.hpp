// Scenario representation: a scene is a diagram, its meaning a limit. The
// exact path works over finite presheaf diagrams through the limits module;
// the embedded path works over world embeddings with a least-squares stand-in
// for the limit cone. Also here: abstraction of weighted diagrams to exact
// linear systems, and breadth/depth measures over hierarchical scopes.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cattice/limits.hpp"
#include "cattice/rational.hpp"
#include "cattice/world.hpp"

namespace cattice::scenario {

using limits::ExchangeReport;
using limits::PresheafDiagram;

struct LabeledEdge {
    std::string source;
    std::string label;
    std::string target;

    friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

// Scene content for the embedded path: world objects plus labeled relations.
// The relations document the scene; the embedding-space limit aggregates the
// member objects only.
struct ScenarioContent {
    std::vector<std::string> objects;
    std::vector<LabeledEdge> edges;
};

// Least-squares stand-in for a limit cone in embedding space: the minimizer
// of sum_i |v - F_W(X_i)|^2, i.e. the mean of the member embeddings.
// Accumulation runs in sorted object order, so the result is bit-identical
// under permutations of the content.
inline std::vector<double> embedded_scenario_limit(const world::EmbeddingWorld& w,
                                                   const ScenarioContent& content) {
    if (content.objects.empty())
        throw std::invalid_argument("embedded_scenario_limit: empty scenario content");
    std::vector<std::string> members = content.objects;
    std::sort(members.begin(), members.end());
    std::vector<double> mean(w.dim, 0.0);
    for (const auto& obj : members) {
        const std::vector<double>& v = world::embed(w, obj);
        for (std::size_t i = 0; i < w.dim; ++i) mean[i] += v[i];
    }
    for (auto& x : mean) x /= static_cast<double>(members.size());
    return mean;
}

// Registry extraction: nearest registered object by Euclidean distance,
// ties broken by registry order.
inline std::string nearest_object(const world::EmbeddingWorld& w, const std::vector<double>& v) {
    if (w.objects.empty()) throw std::invalid_argument("nearest_object: empty registry");
    std::string best;
    double best_d2 = 0.0;
    bool first = true;
    for (const auto& obj : w.objects) {
        const std::vector<double>& u = world::embed(w, obj);
        double d2 = 0.0;
        for (std::size_t i = 0; i < w.dim; ++i) d2 += (u[i] - v[i]) * (u[i] - v[i]);
        if (first || d2 < best_d2) {
            best = obj;
            best_d2 = d2;
            first = false;
        }
    }
    return best;
}

enum class TaskMode { Whole, Factored };
enum class Aggregator { Minimum, Mean };

// Embedded path. Whole: score the task against the scene's aggregated
// embedding. Factored: score the task per member and aggregate the scores,
// by default with the minimum (the meet).
inline double task_on_scenario(const world::EmbeddingWorld& w, const world::Task& t,
                               const ScenarioContent& content, TaskMode mode,
                               Aggregator agg = Aggregator::Minimum) {
    if (mode == TaskMode::Whole)
        return world::task_score(t, embedded_scenario_limit(w, content));

    if (content.objects.empty())
        throw std::invalid_argument("task_on_scenario: empty scenario content");
    double acc = agg == Aggregator::Minimum ? 1.0 : 0.0;
    for (const auto& obj : content.objects) {
        double s = world::task_score(t, world::embed(w, obj));
        if (agg == Aggregator::Minimum)
            acc = std::min(acc, s);
        else
            acc += s / static_cast<double>(content.objects.size());
    }
    return acc;
}

// Exact path, P1: all transformations from the task presheaf into the limit
// of the scene diagram.
inline std::vector<fincat::NaturalTransformation> p1_exact(const fincat::SetFunctor& task,
                                                           const PresheafDiagram& content) {
    return fincat::enumerate_nat(task, limits::pointwise_limit(content).functor);
}

// Exact path, P2: the limit of the per-node hom-sets.
inline limits::LimitResult p2_exact(const fincat::SetFunctor& task, const PresheafDiagram& content) {
    std::map<std::string, std::vector<fincat::NaturalTransformation>> nats_by_node;
    fincat::SetFunctor h = limits::detail::hom_diagram(content, task, /*other_is_target=*/false,
                                                       nats_by_node);
    return limits::limit_set_diagram(h);
}

inline std::size_t task_on_scenario(const fincat::SetFunctor& task, const PresheafDiagram& content,
                                    TaskMode mode) {
    if (mode == TaskMode::Whole) return p1_exact(task, content).size();
    return p2_exact(task, content).apex.size();
}

// The whole-vs-factored equivalence, checked by enumerating both sides.
inline ExchangeReport verify_p1_p2(const fincat::SetFunctor& task, const PresheafDiagram& content) {
    return limits::verify_hom_into_limit_exchange(task, content);
}

// ---------------------------------------------------------------------------
// Mathematical modeling: abstracted diagrams and exact linear systems.

// One term of a limit expression: coeff * var * basis, with the variable
// optional. Terms are linear by construction; anything richer is rejected at
// parse time.
struct LinearTerm {
    Rational coeff = Rational(1);
    std::string var;   // empty for constant terms
    std::string basis; // basis object the term contributes to
};

struct AbstractDiagram {
    std::vector<std::string> variables;
    std::vector<std::string> basis_objects;
    std::vector<LinearTerm> lhs; // first designated limit expression
    std::vector<LinearTerm> rhs; // second designated limit expression
};

struct LinearEquation {
    std::map<std::string, Rational> coeffs; // by variable
    Rational constant;                      // right-hand side

    bool trivial() const {
        for (const auto& [v, c] : coeffs)
            if (!c.is_zero()) return false;
        return constant.is_zero();
    }
};

struct LinearSystem {
    std::vector<std::string> variables;
    std::vector<LinearEquation> equations;
    std::vector<std::string> basis_objects; // equation i came from basis i
};

namespace detail {

inline void validate_terms(const AbstractDiagram& a, const std::vector<LinearTerm>& terms,
                           const char* side) {
    for (const auto& t : terms) {
        if (std::find(a.basis_objects.begin(), a.basis_objects.end(), t.basis) ==
            a.basis_objects.end())
            throw std::invalid_argument(std::string(side) + " references undeclared basis '" +
                                        t.basis + "'");
        if (!t.var.empty() &&
            std::find(a.variables.begin(), a.variables.end(), t.var) == a.variables.end())
            throw std::invalid_argument(std::string(side) + " references undeclared variable '" +
                                        t.var + "'");
    }
}

} // namespace detail

// Equate the two limit expressions coefficient-by-coefficient per basis
// object: each basis emits one linear equation over the variables. Trivial
// 0 = 0 rows are dropped.
inline LinearSystem abstract_diagram(const AbstractDiagram& a) {
    detail::validate_terms(a, a.lhs, "lhs");
    detail::validate_terms(a, a.rhs, "rhs");

    LinearSystem sys;
    sys.variables = a.variables;
    for (const auto& basis : a.basis_objects) {
        LinearEquation eq;
        for (const auto& v : a.variables) eq.coeffs[v] = Rational(0);
        // vars collected on the left, constants on the right: lhs - rhs = 0
        for (const auto& t : a.lhs) {
            if (t.basis != basis) continue;
            if (t.var.empty())
                eq.constant = eq.constant - t.coeff;
            else
                eq.coeffs[t.var] = eq.coeffs[t.var] + t.coeff;
        }
        for (const auto& t : a.rhs) {
            if (t.basis != basis) continue;
            if (t.var.empty())
                eq.constant = eq.constant + t.coeff;
            else
                eq.coeffs[t.var] = eq.coeffs[t.var] - t.coeff;
        }
        // canonical sign: first nonzero coefficient positive
        for (const auto& v : sys.variables) {
            const Rational& c = eq.coeffs.at(v);
            if (c.is_zero()) continue;
            if (c.num() < 0) {
                for (auto& [var, coeff] : eq.coeffs) coeff = -coeff;
                eq.constant = -eq.constant;
            }
            break;
        }
        if (eq.trivial()) continue;
        sys.equations.push_back(std::move(eq));
        sys.basis_objects.push_back(basis);
    }
    return sys;
}

enum class SolveStatus { Unique, Underdetermined, Inconsistent };

struct SolveResult {
    SolveStatus status = SolveStatus::Underdetermined;
    std::vector<std::pair<std::string, Rational>> assignment; // declaration order
};

// Exact Gauss elimination over the rationals.
inline SolveResult solve_abstracted(const LinearSystem& sys) {
    std::size_t nvars = sys.variables.size();
    std::vector<std::vector<Rational>> rows;
    for (const auto& eq : sys.equations) {
        std::vector<Rational> row(nvars + 1, Rational(0));
        for (std::size_t j = 0; j < nvars; ++j) {
            auto it = eq.coeffs.find(sys.variables[j]);
            if (it != eq.coeffs.end()) row[j] = it->second;
        }
        row[nvars] = eq.constant;
        rows.push_back(std::move(row));
    }

    SolveResult result;
    std::vector<std::size_t> pivot_of_col(nvars, SIZE_MAX);
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < nvars && pivot_row < rows.size(); ++col) {
        std::size_t sel = SIZE_MAX;
        for (std::size_t r = pivot_row; r < rows.size(); ++r)
            if (!rows[r][col].is_zero()) {
                sel = r;
                break;
            }
        if (sel == SIZE_MAX) continue;
        std::swap(rows[pivot_row], rows[sel]);
        Rational inv = Rational(1) / rows[pivot_row][col];
        for (auto& x : rows[pivot_row]) x = x * inv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == pivot_row || rows[r][col].is_zero()) continue;
            Rational factor = rows[r][col];
            for (std::size_t j = 0; j <= nvars; ++j)
                rows[r][j] = rows[r][j] - factor * rows[pivot_row][j];
        }
        pivot_of_col[col] = pivot_row;
        ++pivot_row;
    }

    for (std::size_t r = pivot_row; r < rows.size(); ++r)
        if (!rows[r][nvars].is_zero()) {
            result.status = SolveStatus::Inconsistent;
            return result;
        }

    for (std::size_t col = 0; col < nvars; ++col)
        if (pivot_of_col[col] == SIZE_MAX) {
            result.status = SolveStatus::Underdetermined;
            return result;
        }

    result.status = SolveStatus::Unique;
    for (std::size_t col = 0; col < nvars; ++col)
        result.assignment.emplace_back(sys.variables[col], rows[pivot_of_col[col]][nvars]);
    return result;
}

struct ModelSolution {
    LinearSystem system;
    SolveResult solution;
    bool expressions_equal = false; // both limit expressions agree under the assignment
};

namespace detail {

inline std::map<std::string, Rational> evaluate_expression(const std::vector<LinearTerm>& terms,
                                                           const std::vector<std::string>& basis,
                                                           const SolveResult& sol) {
    std::map<std::string, Rational> totals;
    for (const auto& b : basis) totals[b] = Rational(0);
    for (const auto& t : terms) {
        Rational value = t.coeff;
        if (!t.var.empty()) {
            bool found = false;
            for (const auto& [var, x] : sol.assignment)
                if (var == t.var) {
                    value = value * x;
                    found = true;
                    break;
                }
            if (!found) throw std::logic_error("no assignment for variable '" + t.var + "'");
        }
        totals[t.basis] = totals[t.basis] + value;
    }
    return totals;
}

} // namespace detail

// Abstraction followed by elimination, then the sanity check that both limit
// expressions evaluate to the same totals under the solution.
inline ModelSolution model_solve(const AbstractDiagram& a) {
    ModelSolution out;
    out.system = abstract_diagram(a);
    out.solution = solve_abstracted(out.system);
    if (out.solution.status == SolveStatus::Unique) {
        auto lhs = detail::evaluate_expression(a.lhs, a.basis_objects, out.solution);
        auto rhs = detail::evaluate_expression(a.rhs, a.basis_objects, out.solution);
        out.expressions_equal = lhs == rhs;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scope: a diagram whose objects may decompose into further diagrams.

struct ScopeNode {
    std::vector<std::string> objects;
    std::vector<LabeledEdge> edges;
    std::map<std::string, std::string> decomposition; // object -> child node name
    std::vector<LabeledEdge> cross_edges;             // stored, ignored by depth
};

struct Scope {
    std::map<std::string, ScopeNode> nodes;
    std::string root;

    const ScopeNode& node(const std::string& name) const {
        auto it = nodes.find(name);
        if (it == nodes.end()) throw std::out_of_range("unknown scope node '" + name + "'");
        return it->second;
    }
};

struct ScopeMeasure {
    std::size_t breadth = 0;
    std::size_t depth = 0;
};

namespace detail {

inline std::size_t scope_depth(const Scope& s, const std::string& name,
                               std::set<std::string>& on_stack) {
    if (!on_stack.insert(name).second)
        throw std::invalid_argument("scope decomposition cycle through '" + name + "'");
    const ScopeNode& node = s.node(name);
    std::size_t best = 0;
    for (const auto& [obj, child] : node.decomposition) {
        if (std::find(node.objects.begin(), node.objects.end(), obj) == node.objects.end())
            throw std::invalid_argument("decomposition of unknown object '" + obj + "'");
        best = std::max(best, scope_depth(s, child, on_stack));
    }
    on_stack.erase(name);
    return 1 + best;
}

} // namespace detail

// Breadth is the object count of the root diagram; depth counts nested
// decomposition layers with a flat scope at depth 1. Cycles are rejected.
inline ScopeMeasure scope_breadth_depth(const Scope& s) {
    ScopeMeasure m;
    m.breadth = s.node(s.root).objects.size();
    std::set<std::string> on_stack;
    m.depth = detail::scope_depth(s, s.root, on_stack);
    return m;
}

// Maxima of breadth and depth over the scopes a runner can process.
inline ScopeMeasure measure_intelligence(const std::function<bool(const Scope&)>& runner,
                                         const std::vector<Scope>& suite) {
    if (suite.empty()) throw std::invalid_argument("measure_intelligence: empty suite");
    ScopeMeasure best;
    for (const auto& s : suite) {
        if (!runner(s)) continue;
        ScopeMeasure m = scope_breadth_depth(s);
        best.breadth = std::max(best.breadth, m.breadth);
        best.depth = std::max(best.depth, m.depth);
    }
    return best;
}

} // namespace cattice::scenario
