// Consistency machinery over an embedding world: composition tests against a
// ground-truth category, alignment tests between two worlds along an object
// pairing, and reconstruction tests that rebuild a masked member from the
// rest of a diagram. Every test pairs a boolean predicate with a
// differentiable loss whose pass bound the predicate respects.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cattice/fincat.hpp"
#include "cattice/rng.hpp"
#include "cattice/scenario.hpp"
#include "cattice/world.hpp"

namespace cattice::consistency {

using world::EmbeddingWorld;

enum class TestKind { Composition, FunctorAlignment, LimitReconstruction };

inline const char* kind_name(TestKind k) {
    switch (k) {
        case TestKind::Composition: return "composition";
        case TestKind::FunctorAlignment: return "functor-alignment";
        case TestKind::LimitReconstruction: return "limit-reconstruction";
    }
    return "?";
}

struct ConsistencyTest {
    TestKind kind = TestKind::Composition;

    // composition: the composite's label must score above tau from source to
    // target. The identity corner is scored rather than forced so that the
    // predicate stays aligned with the loss bound.
    std::string comp_source, comp_target, comp_label;

    // functor-alignment: per shared label, the kernel score between the two
    // objects must sit within eps of the frozen reference score.
    std::string align_x, align_y;
    std::vector<std::pair<std::string, double>> align_targets;
    double align_eps = 0.05;

    // limit-reconstruction: the masked member must be close (in cosine) to
    // the aggregated embedding of the remaining members.
    std::vector<std::string> recon_members;
    std::string recon_masked;
    double recon_cosine_bar = 0.9;
};

namespace detail {

inline std::vector<double> reconstruction(const EmbeddingWorld& w, const ConsistencyTest& t) {
    scenario::ScenarioContent content;
    content.objects = t.recon_members;
    return scenario::embedded_scenario_limit(w, content);
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double na = std::sqrt(world::dot(a, a));
    double nb = std::sqrt(world::dot(b, b));
    if (na == 0.0 || nb == 0.0) return 0.0;
    return world::dot(a, b) / (na * nb);
}

} // namespace detail

inline bool predicate(const EmbeddingWorld& w, const ConsistencyTest& t) {
    switch (t.kind) {
        case TestKind::Composition:
            return world::kernel_score(w, t.comp_source, t.comp_target, t.comp_label) > w.tau;
        case TestKind::FunctorAlignment:
            for (const auto& [label, target] : t.align_targets) {
                double s = world::kernel_score(w, t.align_x, t.align_y, label);
                if (std::abs(s - target) > t.align_eps) return false;
            }
            return true;
        case TestKind::LimitReconstruction: {
            std::vector<double> r = detail::reconstruction(w, t);
            return detail::cosine(world::embed(w, t.recon_masked), r) >= t.recon_cosine_bar;
        }
    }
    return false;
}

inline double loss(const EmbeddingWorld& w, const ConsistencyTest& t) {
    switch (t.kind) {
        case TestKind::Composition:
            return -std::log(world::kernel_score(w, t.comp_source, t.comp_target, t.comp_label));
        case TestKind::FunctorAlignment: {
            double sum = 0.0;
            for (const auto& [label, target] : t.align_targets) {
                double d = world::kernel_score(w, t.align_x, t.align_y, label) - target;
                sum += d * d;
            }
            return sum;
        }
        case TestKind::LimitReconstruction: {
            std::vector<double> r = detail::reconstruction(w, t);
            const std::vector<double>& x = world::embed(w, t.recon_masked);
            double sum = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) sum += (x[i] - r[i]) * (x[i] - r[i]);
            return sum;
        }
    }
    return 0.0;
}

// The loss value a passing test can reach at worst.
inline double pass_loss_bound(const EmbeddingWorld& w, const ConsistencyTest& t) {
    switch (t.kind) {
        case TestKind::Composition:
            return -std::log(w.tau);
        case TestKind::FunctorAlignment:
            return static_cast<double>(t.align_targets.size()) * t.align_eps * t.align_eps;
        case TestKind::LimitReconstruction: {
            std::vector<double> r = detail::reconstruction(w, t);
            const std::vector<double>& x = world::embed(w, t.recon_masked);
            double nx = std::sqrt(world::dot(x, x));
            double nr = std::sqrt(world::dot(r, r));
            return nx * nx + nr * nr - 2.0 * t.recon_cosine_bar * nx * nr;
        }
    }
    return 0.0;
}

struct GradientSet {
    std::map<std::string, std::vector<double>> table; // object -> d/d embedding
    std::map<std::string, std::vector<double>> matrices; // label -> d/d relation matrix
};

namespace detail {

inline void axpy(std::vector<double>& acc, double a, const std::vector<double>& x) {
    if (acc.empty()) acc.assign(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) acc[i] += a * x[i];
}

// score = sigma(u^T M v); adds dscale * dscore/d{u,v,M} into the set.
inline void add_bilinear_score_grads(const EmbeddingWorld& w, const std::string& x,
                                     const std::string& y, const std::string& label,
                                     double dscale, GradientSet& g, bool matrices_trainable) {
    const std::vector<double>& u = w.vector_of(x);
    const std::vector<double>& v = w.vector_of(y);
    const std::vector<double>& m = w.matrix_of(label);
    std::size_t d = w.dim;
    double s = world::logistic(world::bilinear(u, m, v));
    double slope = dscale * s * (1.0 - s);

    std::vector<double> mv(d, 0.0), mtu(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            mv[i] += m[i * d + j] * v[j];
            mtu[j] += m[i * d + j] * u[i];
        }
    axpy(g.table[x], slope, mv);
    axpy(g.table[y], slope, mtu);
    if (matrices_trainable) {
        auto& gm = g.matrices[label];
        if (gm.empty()) gm.assign(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) gm[i * d + j] += slope * u[i] * v[j];
    }
}

} // namespace detail

// Analytic gradients of the test loss with respect to the embedding table
// and, for composition tests, the relation matrices.
inline GradientSet loss_gradients(const EmbeddingWorld& w, const ConsistencyTest& t) {
    GradientSet g;
    switch (t.kind) {
        case TestKind::Composition: {
            double s = world::kernel_score(w, t.comp_source, t.comp_target, t.comp_label);
            // d(-log sigma(z))/dz = s - 1; chain through the raw score via
            // dscore/dz = s(1-s): dloss/dscore = -1/s.
            detail::add_bilinear_score_grads(w, t.comp_source, t.comp_target, t.comp_label,
                                             -1.0 / s, g, /*matrices_trainable=*/true);
            break;
        }
        case TestKind::FunctorAlignment: {
            for (const auto& [label, target] : t.align_targets) {
                double s = world::kernel_score(w, t.align_x, t.align_y, label);
                detail::add_bilinear_score_grads(w, t.align_x, t.align_y, label,
                                                 2.0 * (s - target), g,
                                                 /*matrices_trainable=*/false);
            }
            break;
        }
        case TestKind::LimitReconstruction: {
            std::vector<double> r = detail::reconstruction(w, t);
            const std::vector<double>& x = world::embed(w, t.recon_masked);
            std::vector<double> diff(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - r[i];
            detail::axpy(g.table[t.recon_masked], 2.0, diff);
            double n = static_cast<double>(t.recon_members.size());
            for (const auto& member : t.recon_members)
                detail::axpy(g.table[member], -2.0 / n, diff);
            break;
        }
    }
    return g;
}

// One test per composable pair of non-identity morphisms of the ground
// truth, asserting the composite's label between the pair's outer endpoints.
inline std::vector<ConsistencyTest> make_composition_tests(const fincat::FiniteCategory& truth,
                                                           const EmbeddingWorld& w) {
    for (const auto& obj : truth.objects)
        if (!w.has_object(obj))
            throw std::invalid_argument("ground-truth object '" + obj + "' is not registered");

    std::set<std::string> vocab(w.label_vocab.begin(), w.label_vocab.end());
    std::vector<ConsistencyTest> tests;
    for (const auto& f : truth.morphisms) {
        if (truth.is_identity(f.id)) continue;
        for (const auto& g : truth.morphisms) {
            if (truth.is_identity(g.id) || g.source != f.target) continue;
            const fincat::Morphism& composite = truth.morphism(truth.compose(g.id, f.id));
            const std::string& label = composite.label.empty() ? composite.id : composite.label;
            if (!vocab.count(label))
                throw std::invalid_argument("composite '" + composite.id + "' has label '" + label +
                                            "' outside the world vocabulary");
            ConsistencyTest t;
            t.kind = TestKind::Composition;
            t.comp_source = f.source;
            t.comp_target = g.target;
            t.comp_label = label;
            tests.push_back(std::move(t));
        }
    }
    return tests;
}

// One test per ordered pair of paired objects, freezing the reference
// world's kernel scores over the shared label vocabulary.
inline std::vector<ConsistencyTest>
make_functor_alignment_tests(const EmbeddingWorld& w1, const EmbeddingWorld& w2,
                             const std::map<std::string, std::string>& pairing, double eps = 0.05) {
    for (const auto& [x, y] : pairing) {
        if (!w1.has_object(x)) throw std::invalid_argument("unpaired object '" + x + "' in first world");
        if (!w2.has_object(y)) throw std::invalid_argument("unpaired object '" + y + "' in second world");
    }
    std::vector<std::string> shared;
    std::set<std::string> vocab2(w2.label_vocab.begin(), w2.label_vocab.end());
    for (const auto& label : w1.label_vocab)
        if (vocab2.count(label)) shared.push_back(label);

    std::vector<ConsistencyTest> tests;
    for (const auto& [x1, x2] : pairing)
        for (const auto& [y1, y2] : pairing) {
            ConsistencyTest t;
            t.kind = TestKind::FunctorAlignment;
            t.align_x = x1;
            t.align_y = y1;
            t.align_eps = eps;
            for (const auto& label : shared)
                t.align_targets.emplace_back(label, world::kernel_score(w2, x2, y2, label));
            tests.push_back(std::move(t));
        }
    return tests;
}

// One test per (diagram, masked member): the mean of the remaining members
// must reconstruct the masked embedding up to the cosine bar.
inline std::vector<ConsistencyTest>
make_limit_reconstruction_tests(const EmbeddingWorld& w,
                                const std::vector<std::pair<scenario::ScenarioContent, std::string>>& masked_diagrams,
                                double cosine_bar = 0.9) {
    std::vector<ConsistencyTest> tests;
    for (const auto& [content, masked] : masked_diagrams) {
        if (content.objects.size() < 2)
            throw std::invalid_argument("reconstruction diagram needs at least two objects");
        if (std::find(content.objects.begin(), content.objects.end(), masked) ==
            content.objects.end())
            throw std::invalid_argument("masked object '" + masked + "' is not in its diagram");
        ConsistencyTest t;
        t.kind = TestKind::LimitReconstruction;
        t.recon_masked = masked;
        t.recon_cosine_bar = cosine_bar;
        for (const auto& obj : content.objects) {
            w.vector_of(obj); // registration check
            if (obj != masked) t.recon_members.push_back(obj);
        }
        tests.push_back(std::move(t));
    }
    return tests;
}

struct ConsistencyReport {
    std::vector<bool> passes;
    double pass_rate = 0.0;
    std::map<TestKind, double> mean_loss;
    std::map<TestKind, std::size_t> counts;
    std::uint64_t step = 0;
};

inline ConsistencyReport run_consistency_check(const EmbeddingWorld& w,
                                               const std::vector<ConsistencyTest>& tests) {
    if (tests.empty()) throw std::invalid_argument("run_consistency_check: empty test list");
    ConsistencyReport rep;
    rep.step = w.step;
    std::map<TestKind, double> loss_sum;
    std::size_t pass_count = 0;
    for (const auto& t : tests) {
        bool ok = predicate(w, t);
        rep.passes.push_back(ok);
        pass_count += ok ? 1 : 0;
        loss_sum[t.kind] += loss(w, t);
        rep.counts[t.kind] += 1;
    }
    rep.pass_rate = static_cast<double>(pass_count) / static_cast<double>(tests.size());
    for (const auto& [kind, total] : loss_sum)
        rep.mean_loss[kind] = total / static_cast<double>(rep.counts.at(kind));
    return rep;
}

struct ConsistencyTrainResult {
    EmbeddingWorld world;
    std::vector<std::pair<std::size_t, double>> trace; // (test index, loss)
};

// Algorithm-style loop: sample a test, step the embeddings (and, for
// composition tests, the relation matrices) down its loss gradient.
inline ConsistencyTrainResult train_consistency(const EmbeddingWorld& w,
                                                const std::vector<ConsistencyTest>& tests,
                                                std::size_t steps, double lr, std::uint64_t seed) {
    if (tests.empty()) throw std::invalid_argument("train_consistency: empty test list");
    if (!(lr > 0.0)) throw std::invalid_argument("train_consistency: learning rate must be positive");

    ConsistencyTrainResult result;
    result.world = w;
    Rng rng(seed);
    for (std::size_t i = 0; i < steps; ++i) {
        std::size_t idx = rng.below(tests.size());
        const ConsistencyTest& t = tests[idx];
        result.trace.emplace_back(idx, loss(result.world, t));
        GradientSet g = loss_gradients(result.world, t);
        for (const auto& [obj, grad] : g.table) {
            std::vector<double>& v = result.world.table.at(obj);
            for (std::size_t k = 0; k < v.size(); ++k) v[k] -= lr * grad[k];
        }
        for (const auto& [label, grad] : g.matrices) {
            std::vector<double>& m = result.world.label_matrices.at(label);
            for (std::size_t k = 0; k < m.size(); ++k) m[k] -= lr * grad[k];
        }
    }
    result.world.step += steps;
    result.world.seed_lineage.push_back(seed);
    return result;
}

struct TranslatedSuite {
    EmbeddingWorld world; // augmented with one virtual object per task
    std::vector<ConsistencyTest> tests;
};

// Awareness test sets embed into the consistency machinery: each
// representable task becomes a virtual object scored against the target
// through an identity relation matrix, so the exhaustive awareness delta
// equals the consistency pass rate on the translated suite.
inline TranslatedSuite translate_awareness_suite(const EmbeddingWorld& w, const std::string& self,
                                                 const world::TestSet& ts) {
    const std::string label = "__task";
    TranslatedSuite out;
    out.world = w;
    if (out.world.label_matrices.count(label))
        throw std::invalid_argument("translate_awareness_suite: label '" + label + "' already in use");
    out.world.label_vocab.push_back(label);
    std::vector<double> identity(w.dim * w.dim, 0.0);
    for (std::size_t i = 0; i < w.dim; ++i) identity[i * w.dim + i] = 1.0;
    out.world.label_matrices[label] = std::move(identity);

    for (std::size_t i = 0; i < ts.tests.size(); ++i) {
        const world::Task& task = ts.tests[i];
        if (task.kind != world::TaskKind::Representable)
            throw std::invalid_argument("translate_awareness_suite: task '" + task.name +
                                        "' is not representable");
        std::string obj = "__task_" + std::to_string(i);
        if (out.world.has_object(obj))
            throw std::invalid_argument("translate_awareness_suite: object '" + obj + "' already in use");
        out.world.objects.push_back(obj);
        out.world.table[obj] = task.vec;

        ConsistencyTest t;
        t.kind = TestKind::Composition;
        t.comp_source = obj;
        t.comp_target = self;
        t.comp_label = label;
        out.tests.push_back(std::move(t));
    }
    return out;
}

} // namespace cattice::consistency
