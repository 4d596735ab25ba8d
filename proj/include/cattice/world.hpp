// The embedding-backed world category: objects are rows of a real-valued
// table, hom-sets are decoded from the embeddings by a fixed kernel (one
// bilinear form per morphism label, squashed through a logistic and
// thresholded), and tasks are scored against the same kernel. Training
// operations return an updated copy; values never mutate in place.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cattice/rng.hpp"

namespace cattice::world {

inline constexpr const char* kIdentityLabel = "id";

// Logistic squash clamped to the open interval (0,1) so that scores stay
// strictly between the bounds even in saturated regimes.
inline double logistic(double z) {
    double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    constexpr double lo = std::numeric_limits<double>::denorm_min();
    constexpr double hi = 1.0 - 0x1.0p-53;
    if (s < lo) return lo;
    if (s > hi) return hi;
    return s;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// u^T M v with M stored row-major.
inline double bilinear(const std::vector<double>& u, const std::vector<double>& m,
                       const std::vector<double>& v) {
    double s = 0.0;
    std::size_t d = u.size();
    for (std::size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < d; ++j) row += m[i * d + j] * v[j];
        s += u[i] * row;
    }
    return s;
}

struct EmbeddingWorld {
    std::vector<std::string> objects; // registry order
    std::size_t dim = 0;
    std::map<std::string, std::vector<double>> table;
    std::uint64_t step = 0;
    std::vector<std::string> label_vocab;                      // always contains "id"
    std::map<std::string, std::vector<double>> label_matrices; // row-major dim*dim
    double tau = 0.5;
    std::vector<std::uint64_t> seed_lineage;

    friend bool operator==(const EmbeddingWorld&, const EmbeddingWorld&) = default;

    bool has_object(const std::string& x) const { return table.count(x) != 0; }

    const std::vector<double>& vector_of(const std::string& x) const {
        auto it = table.find(x);
        if (it == table.end()) throw std::out_of_range("unregistered object '" + x + "'");
        return it->second;
    }

    const std::vector<double>& matrix_of(const std::string& label) const {
        auto it = label_matrices.find(label);
        if (it == label_matrices.end()) throw std::out_of_range("unknown label '" + label + "'");
        return it->second;
    }
};

// Seeded initializer: every coordinate of every vector and relation matrix is
// Gaussian with standard deviation 0.1, drawn in registry order so a seed
// pins the whole world. "id" is prepended to the vocabulary if missing.
inline EmbeddingWorld make_world(std::vector<std::string> objects, std::size_t dim,
                                 std::uint64_t seed, std::vector<std::string> labels,
                                 double tau = 0.5) {
    if (dim == 0) throw std::invalid_argument("make_world: dimension must be positive");
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("make_world: tau must lie in (0,1)");
    EmbeddingWorld w;
    w.objects = std::move(objects);
    w.dim = dim;
    w.tau = tau;
    w.seed_lineage.push_back(seed);
    w.label_vocab.push_back(kIdentityLabel);
    for (auto& l : labels)
        if (l != kIdentityLabel) w.label_vocab.push_back(std::move(l));

    Rng rng(seed);
    for (const auto& obj : w.objects) {
        if (w.table.count(obj)) throw std::invalid_argument("make_world: duplicate object '" + obj + "'");
        w.table[obj] = rng.gaussian_vector(dim, 0.1);
    }
    for (const auto& label : w.label_vocab) w.label_matrices[label] = rng.gaussian_vector(dim * dim, 0.1);
    return w;
}

// F_W(X): the object's row of the table. For the self object this is the
// self-state, for any other agent object the corresponding other-state.
inline const std::vector<double>& embed(const EmbeddingWorld& w, const std::string& x) {
    return w.vector_of(x);
}

inline double kernel_score(const EmbeddingWorld& w, const std::string& x, const std::string& y,
                           const std::string& label) {
    return logistic(bilinear(w.vector_of(x), w.matrix_of(label), w.vector_of(y)));
}

struct LabelScore {
    std::string label;
    double score;
};

// Decoded hom-set: labels whose score clears tau, with "id" always present
// on the diagonal regardless of its score.
inline std::vector<LabelScore> hom_w(const EmbeddingWorld& w, const std::string& x,
                                     const std::string& y) {
    std::vector<LabelScore> out;
    for (const auto& label : w.label_vocab) {
        double s = kernel_score(w, x, y, label);
        bool present = s > w.tau || (label == kIdentityLabel && x == y);
        if (present) out.push_back({label, s});
    }
    return out;
}

inline bool hom_contains(const EmbeddingWorld& w, const std::string& x, const std::string& y,
                         const std::string& label) {
    if (label == kIdentityLabel && x == y) return true;
    return kernel_score(w, x, y, label) > w.tau;
}

enum class TaskKind { Representable, Explicit };

// A task is either representable (scored as sigma(t . v)) or an explicit
// boolean predicate with a differentiable surrogate in [0,1]. The surrogate
// gradient is with respect to the argument embedding.
struct Task {
    std::string name;
    TaskKind kind = TaskKind::Representable;
    std::vector<double> vec; // representable only
    std::function<bool(const std::vector<double>&)> predicate;
    std::function<double(const std::vector<double>&)> surrogate;
    std::function<std::vector<double>(const std::vector<double>&)> surrogate_grad;
};

inline Task make_representable_task(std::string name, std::vector<double> t) {
    Task task;
    task.name = std::move(name);
    task.kind = TaskKind::Representable;
    task.vec = std::move(t);
    return task;
}

// Explicit test: "coordinate i is positive", surrogate sigma(scale * v[i]).
inline Task make_coord_task(std::string name, std::size_t index, double scale) {
    Task task;
    task.name = std::move(name);
    task.kind = TaskKind::Explicit;
    task.predicate = [index](const std::vector<double>& v) { return v.at(index) > 0.0; };
    task.surrogate = [index, scale](const std::vector<double>& v) {
        return logistic(scale * v.at(index));
    };
    task.surrogate_grad = [index, scale](const std::vector<double>& v) {
        double s = logistic(scale * v.at(index));
        std::vector<double> g(v.size(), 0.0);
        g[index] = s * (1.0 - s) * scale;
        return g;
    };
    return task;
}

// Explicit test: "squared norm exceeds radius", surrogate
// sigma(scale * (|v|^2 - radius)).
inline Task make_norm_task(std::string name, double radius, double scale) {
    Task task;
    task.name = std::move(name);
    task.kind = TaskKind::Explicit;
    task.predicate = [radius](const std::vector<double>& v) { return dot(v, v) > radius; };
    task.surrogate = [radius, scale](const std::vector<double>& v) {
        return logistic(scale * (dot(v, v) - radius));
    };
    task.surrogate_grad = [radius, scale](const std::vector<double>& v) {
        double s = logistic(scale * (dot(v, v) - radius));
        std::vector<double> g(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) g[i] = s * (1.0 - s) * scale * 2.0 * v[i];
        return g;
    };
    return task;
}

inline double task_score(const Task& t, const std::vector<double>& v) {
    if (t.kind == TaskKind::Representable) {
        if (t.vec.size() != v.size())
            throw std::invalid_argument("task '" + t.name + "' has mismatched dimension");
        return logistic(dot(t.vec, v));
    }
    if (t.surrogate) return t.surrogate(v);
    if (t.predicate) return t.predicate(v) ? 1.0 : 0.0;
    throw std::invalid_argument("task '" + t.name + "' has neither surrogate nor predicate");
}

inline double eval_task(const EmbeddingWorld& w, const Task& t, const std::string& x) {
    return task_score(t, w.vector_of(x));
}

inline bool task_verdict(const EmbeddingWorld& w, const Task& t, const std::string& x) {
    return eval_task(w, t, x) > w.tau;
}

enum class Sampling { WithReplacement, Exhaustive };

struct TestSet {
    std::vector<Task> tests;
    Sampling sampling = Sampling::WithReplacement;
};

struct AwarenessReport {
    double delta = 0.0;
    std::size_t samples = 0;
    std::vector<std::pair<std::size_t, bool>> outcomes; // (test index, verdict)
};

// Awareness sweep: mean of binary verdicts on the target object's state,
// either over m uniform samples (seeded) or exactly over the whole test set.
inline AwarenessReport evaluate_awareness(const EmbeddingWorld& w, const std::string& self,
                                          const TestSet& ts, std::size_t m, std::uint64_t seed) {
    if (ts.tests.empty()) throw std::invalid_argument("evaluate_awareness: empty test set");
    AwarenessReport rep;
    if (ts.sampling == Sampling::Exhaustive) {
        for (std::size_t i = 0; i < ts.tests.size(); ++i)
            rep.outcomes.emplace_back(i, task_verdict(w, ts.tests[i], self));
    } else {
        if (m == 0) throw std::invalid_argument("evaluate_awareness: need at least one sample");
        Rng rng(seed);
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t idx = rng.below(ts.tests.size());
            rep.outcomes.emplace_back(idx, task_verdict(w, ts.tests[idx], self));
        }
    }
    rep.samples = rep.outcomes.size();
    std::size_t passes = 0;
    for (const auto& [idx, ok] : rep.outcomes) passes += ok ? 1 : 0;
    rep.delta = static_cast<double>(passes) / static_cast<double>(rep.samples);
    return rep;
}

struct TaskGradient {
    double loss = 0.0;
    std::vector<double> wrt_embedding;
    std::vector<double> wrt_task_vector; // representable tasks only
    bool has_task_vector = false;
};

// loss = -score. Representable tasks get the closed-form gradient for both
// the embedding and the task vector; explicit tasks defer to their surrogate.
inline TaskGradient loss_and_gradient(const EmbeddingWorld& w, const Task& t, const std::string& x) {
    const std::vector<double>& v = w.vector_of(x);
    TaskGradient g;
    if (t.kind == TaskKind::Representable) {
        double s = logistic(dot(t.vec, v));
        double slope = s * (1.0 - s);
        g.loss = -s;
        g.wrt_embedding.resize(v.size());
        g.wrt_task_vector.resize(v.size());
        g.has_task_vector = true;
        for (std::size_t i = 0; i < v.size(); ++i) {
            g.wrt_embedding[i] = -slope * t.vec[i];
            g.wrt_task_vector[i] = -slope * v[i];
        }
        return g;
    }
    if (!t.surrogate || !t.surrogate_grad)
        throw std::invalid_argument("task '" + t.name + "' has no differentiable surrogate");
    g.loss = -t.surrogate(v);
    g.wrt_embedding = t.surrogate_grad(v);
    for (auto& x_i : g.wrt_embedding) x_i = -x_i;
    return g;
}

struct TraceEntry {
    std::size_t test_index = 0;
    double loss = 0.0;
    double score_before = 0.0;
    double score_after = 0.0;
};

struct TrainResult {
    EmbeddingWorld world;
    std::vector<TraceEntry> trace;
};

// Gradient descent on the sampled task losses, touching only the target
// object's row. The trace records the sampled test and its score on either
// side of each update.
inline TrainResult enforce_awareness(const EmbeddingWorld& w, const std::string& self,
                                     const TestSet& ts, std::size_t steps, double lr,
                                     std::uint64_t seed) {
    if (ts.tests.empty()) throw std::invalid_argument("enforce_awareness: empty test set");
    if (!(lr > 0.0)) throw std::invalid_argument("enforce_awareness: learning rate must be positive");
    for (const auto& t : ts.tests)
        if (t.kind == TaskKind::Explicit && (!t.surrogate || !t.surrogate_grad))
            throw std::invalid_argument("enforce_awareness: task '" + t.name + "' has no surrogate");

    TrainResult result;
    result.world = w;
    if (!result.world.has_object(self))
        throw std::out_of_range("unregistered object '" + self + "'");

    Rng rng(seed);
    std::vector<double>& v = result.world.table.at(self);
    for (std::size_t i = 0; i < steps; ++i) {
        std::size_t idx = rng.below(ts.tests.size());
        const Task& t = ts.tests[idx];
        TraceEntry entry;
        entry.test_index = idx;
        entry.score_before = task_score(t, v);
        TaskGradient g = loss_and_gradient(result.world, t, self);
        entry.loss = g.loss;
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= lr * g.wrt_embedding[k];
        entry.score_after = task_score(t, v);
        result.trace.push_back(entry);
    }
    result.world.step += steps;
    result.world.seed_lineage.push_back(seed);
    return result;
}

} // namespace cattice::world
