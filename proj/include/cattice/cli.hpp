// Command dispatch for the cattice tool. Every command reads a spec file (or
// a checkpoint for `load`), runs one library operation, prints a plain-text
// report and optionally mirrors it into a key=value report file. All output
// is deterministic: fixed iteration orders, fixed decimal formatting, and a
// required --seed wherever sampling is involved.
#pragma once

#include <cstdlib>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cattice/checkpoint.hpp"
#include "cattice/consistency.hpp"
#include "cattice/dsl.hpp"
#include "cattice/fincat.hpp"
#include "cattice/limits.hpp"
#include "cattice/numfmt.hpp"
#include "cattice/scenario.hpp"
#include "cattice/world.hpp"

namespace cattice::cli {

inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kSpecError = 3;
inline constexpr int kDataError = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct Args {
    std::string command;
    std::map<std::string, std::string> values;
    std::set<std::string> switches;

    bool flag(const std::string& name) const { return switches.count(name) != 0; }

    const std::string* find(const std::string& name) const {
        auto it = values.find(name);
        return it == values.end() ? nullptr : &it->second;
    }

    const std::string& require(const std::string& name) const {
        const std::string* v = find(name);
        if (!v) throw UsageError("missing required flag --" + name);
        return *v;
    }

    std::uint64_t integer(const std::string& name) const {
        try {
            return parse_u64(require(name));
        } catch (const std::invalid_argument&) {
            throw UsageError("flag --" + name + " expects an integer");
        }
    }

    double real(const std::string& name, double fallback) const {
        const std::string* v = find(name);
        if (!v) return fallback;
        try {
            return parse_double(*v);
        } catch (const std::invalid_argument&) {
            throw UsageError("flag --" + name + " expects a real number");
        }
    }
};

inline const std::set<std::string> kSwitchFlags = {"exhaustive"};

inline Args parse_args(const std::vector<std::string>& argv) {
    if (argv.empty()) throw UsageError("no command given");
    Args args;
    args.command = argv[0];
    std::size_t i = 1;
    while (i < argv.size()) {
        const std::string& tok = argv[i];
        if (tok.rfind("--", 0) != 0) throw UsageError("unexpected argument '" + tok + "'");
        std::string name = tok.substr(2);
        if (kSwitchFlags.count(name)) {
            args.switches.insert(name);
            ++i;
            continue;
        }
        if (i + 1 >= argv.size()) throw UsageError("flag --" + name + " expects a value");
        args.values[name] = argv[i + 1];
        i += 2;
    }
    return args;
}

// Fixed-precision decimals; CATTICE_PRECISION overrides the place count.
inline int decimal_places() {
    const char* env = std::getenv("CATTICE_PRECISION");
    if (!env) return 6;
    try {
        std::uint64_t p = parse_u64(env);
        return static_cast<int>(p > 17 ? 17 : p);
    } catch (const std::invalid_argument&) {
        return 6;
    }
}

class Report {
public:
    Report(const std::string& command, std::ostream& out)
        : out_(out), places_(decimal_places()) {
        machine_ << "format=1\n";
        machine_ << "command=" << command << "\n";
    }

    std::string fmt(double x) const { return fmt_double_fixed(x, places_); }

    // machine-readable key, no echo to stdout
    void kv(const std::string& key, const std::string& value) {
        machine_ << key << '=' << value << "\n";
    }
    void kv(const std::string& key, double value) { kv(key, fmt(value)); }
    void kv(const std::string& key, std::size_t value) { kv(key, std::to_string(value)); }

    // echoed line plus machine key
    void line(const std::string& text) { out_ << text << "\n"; }
    void both(const std::string& key, const std::string& value, const std::string& text) {
        kv(key, value);
        line(text);
    }

    void write(const std::string* path) const {
        if (path) checkpoint::write_file(*path, machine_.str());
    }

private:
    std::ostream& out_;
    int places_;
    std::ostringstream machine_;
};

template <typename T>
const std::pair<const std::string, T>& pick_block(const std::map<std::string, T>& table,
                                                  const Args& args, const std::string& flag,
                                                  const char* kind) {
    if (const std::string* name = args.find(flag)) {
        auto it = table.find(*name);
        if (it == table.end())
            throw std::out_of_range(std::string("unknown ") + kind + " '" + *name + "'");
        return *it;
    }
    if (table.size() == 1) return *table.begin();
    if (table.empty()) throw std::out_of_range(std::string("spec defines no ") + kind + " block");
    throw UsageError(std::string("several ") + kind + " blocks; choose one with --" + flag);
}

inline dsl::SpecDocument load_spec(const Args& args) {
    return dsl::parse_spec(checkpoint::read_file(args.require("spec")));
}

inline void append_issues(Report& report, const std::string& kind, const std::string& name,
                          const fincat::ValidationReport& rep, std::size_t& total) {
    std::size_t count = rep.structural.size() + rep.violations.size();
    report.kv(kind + "." + name, rep.valid() ? std::string("ok") : std::to_string(count));
    report.line(kind + " " + name + ": " +
                (rep.valid() ? std::string("ok") : std::to_string(count) + " issues"));
    for (const auto& issue : rep.structural) {
        report.line("  structural: " + issue.detail);
        ++total;
    }
    for (const auto& issue : rep.violations) {
        report.line("  violation: " + issue.detail);
        ++total;
    }
}

// ---------------------------------------------------------------------------

inline int cmd_validate(const Args& args, Report& report) {
    dsl::SpecDocument doc = load_spec(args);
    std::size_t total = 0;
    for (const auto& [kind, name] : doc.block_order) {
        if (kind == "category") {
            append_issues(report, kind, name, fincat::validate_category(doc.categories.at(name)), total);
        } else if (kind == "functor") {
            append_issues(report, kind, name, fincat::check_functor(doc.functors.at(name)), total);
        } else if (kind == "presheaf") {
            append_issues(report, kind, name, fincat::validate_set_functor(doc.presheaves.at(name)),
                          total);
        } else if (kind == "diagram") {
            if (doc.cat_diagrams.count(name))
                append_issues(report, kind, name, fincat::check_functor(doc.cat_diagrams.at(name)),
                              total);
            else
                append_issues(report, kind, name,
                              limits::validate_presheaf_diagram(doc.presheaf_diagrams.at(name)), total);
        }
    }
    report.kv("issues", total);
    report.line(std::to_string(total) + " violations");
    return total == 0 ? kOk : kCheckFailed;
}

inline int cmd_yoneda_check(const Args& args, Report& report) {
    dsl::SpecDocument doc = load_spec(args);
    const std::string* category_filter = args.find("category");
    const std::string* object_filter = args.find("object");
    const std::string* presheaf_filter = args.find("presheaf");

    std::size_t checked = 0, bijections = 0;
    for (const auto& [kind, name] : doc.block_order) {
        if (kind != "presheaf") continue;
        if (presheaf_filter && name != *presheaf_filter) continue;
        const fincat::SetFunctor& a = doc.presheaves.at(name);
        // find the category the presheaf lives over, honoring the filter
        std::string base_name;
        for (const auto& [cname, cat] : doc.categories)
            if (cat == a.base) base_name = cname;
        if (category_filter && base_name != *category_filter) continue;

        for (const auto& obj : a.base.objects) {
            if (object_filter && obj != *object_filter) continue;
            fincat::YonedaReport rep = fincat::verify_yoneda(a.base, obj, a);
            ++checked;
            bijections += rep.bijection() ? 1 : 0;
            std::string text = "presheaf " + name + " at " + obj + ": nat=" +
                               std::to_string(rep.nat_count) + " elements=" +
                               std::to_string(rep.element_count) +
                               (rep.bijection() ? " bijection" : " NOT a bijection");
            report.kv("check." + name + "." + obj, rep.bijection() ? "bijection" : "failure");
            report.line(text);
        }
    }
    report.kv("checked", checked);
    report.kv("bijections", bijections);
    report.line("checked " + std::to_string(checked) + ", bijections " + std::to_string(bijections));
    if (checked == 0) throw std::out_of_range("nothing to check: no matching presheaf");
    return checked == bijections ? kOk : kCheckFailed;
}

inline int cmd_limit(const Args& args, Report& report, bool colimit) {
    dsl::SpecDocument doc = load_spec(args);
    if (args.find("diagram")) {
        const auto& [name, alpha] = pick_block(doc.cat_diagrams, args, "diagram", "diagram");
        limits::Direction dir = colimit ? limits::Direction::Inductive : limits::Direction::Projective;
        if (const std::string* d = args.find("direction")) {
            if (*d == "projective")
                dir = limits::Direction::Projective;
            else if (*d == "inductive")
                dir = limits::Direction::Inductive;
            else
                throw UsageError("--direction expects 'projective' or 'inductive'");
        }
        fincat::SetFunctor result = limits::presheaf_limit(alpha, dir);
        report.kv("diagram", name);
        report.kv("direction", dir == limits::Direction::Projective ? "projective" : "inductive");
        report.line("diagram " + name + (dir == limits::Direction::Projective
                                             ? ": projective limit presheaf"
                                             : ": inductive limit presheaf"));
        for (const auto& x : result.base.objects) {
            report.kv("size." + x, result.set_at(x).size());
            report.line("  at " + x + ": " + std::to_string(result.set_at(x).size()) + " elements");
        }
        return kOk;
    }

    const auto& [name, diagram] = pick_block(doc.presheaves, args, "presheaf", "presheaf");
    report.kv("presheaf", name);
    if (colimit) {
        limits::ColimitResult result = limits::colimit_set_diagram(diagram);
        report.kv("coapex", result.classes.size());
        report.line("coapex size: " + std::to_string(result.classes.size()));
        for (std::size_t k = 0; k < result.classes.size(); ++k) {
            std::string members;
            for (const auto& [obj, elem] : result.classes[k]) {
                if (!members.empty()) members += ' ';
                members += obj + ":" + elem;
            }
            report.kv("class." + std::to_string(k), members);
            report.line("  class " + std::to_string(k) + ": " + members);
        }
    } else {
        limits::LimitResult result = limits::limit_set_diagram(diagram);
        report.kv("apex", result.apex.size());
        report.line("apex size: " + std::to_string(result.apex.size()));
        for (std::size_t k = 0; k < result.apex.size(); ++k) {
            report.kv("family." + std::to_string(k), result.name_of(result.apex[k]));
            report.line("  family " + result.name_of(result.apex[k]));
        }
    }
    return kOk;
}

inline int report_exchange(Report& report, const limits::ExchangeReport& rep) {
    report.kv("hom_side", rep.hom_side);
    report.kv("limit_side", rep.limit_side);
    report.kv("bijection", rep.bijection() ? "yes" : "no");
    report.line("hom side: " + std::to_string(rep.hom_side));
    report.line("limit side: " + std::to_string(rep.limit_side));
    report.line(rep.bijection() ? "bijection: yes" : "bijection: NO");
    return rep.bijection() ? kOk : kCheckFailed;
}

inline int cmd_exchange_check(const Args& args, Report& report, bool dual) {
    dsl::SpecDocument doc = load_spec(args);
    const auto& [dname, diagram] = pick_block(doc.presheaf_diagrams, args, "diagram", "diagram");
    const auto& [pname, other] = pick_block(doc.presheaves, args, "presheaf", "presheaf");
    report.kv("diagram", dname);
    report.kv("presheaf", pname);
    limits::ExchangeReport rep = dual ? limits::verify_hom_into_limit_exchange(other, diagram)
                                      : limits::verify_hom_limit_exchange(diagram, other);
    return report_exchange(report, rep);
}

inline std::string self_object(const Args& args, const world::EmbeddingWorld& w) {
    std::string self = args.find("self") ? *args.find("self") : std::string("I");
    if (!w.has_object(self))
        throw std::out_of_range("world has no object '" + self + "'; pass --self");
    return self;
}

inline int cmd_eval_awareness(const Args& args, Report& report) {
    dsl::SpecDocument doc = load_spec(args);
    const auto& [tname, tasks] = pick_block(doc.task_sets, args, "tasks", "tasks");
    const world::EmbeddingWorld& w = args.find("world")
                                         ? pick_block(doc.worlds, args, "world", "world").second
                                         : doc.named(doc.worlds, tasks.world, "world");
    std::string self = self_object(args, w);

    world::TestSet set = tasks.set;
    world::AwarenessReport rep;
    if (args.flag("exhaustive")) {
        set.sampling = world::Sampling::Exhaustive;
        rep = world::evaluate_awareness(w, self, set, 0, 0);
    } else {
        set.sampling = world::Sampling::WithReplacement;
        std::uint64_t seed = args.integer("seed");
        std::uint64_t samples = args.find("steps") ? args.integer("steps") : 1000;
        rep = world::evaluate_awareness(w, self, set, samples, seed);
    }
    report.kv("tasks", tname);
    report.kv("self", self);
    report.kv("samples", rep.samples);
    report.kv("delta", rep.delta);
    report.line("samples: " + std::to_string(rep.samples));
    report.line("delta: " + report.fmt(rep.delta));
    return kOk;
}

inline int cmd_train_awareness(const Args& args, Report& report) {
    dsl::SpecDocument doc = load_spec(args);
    const auto& [tname, tasks] = pick_block(doc.task_sets, args, "tasks", "tasks");
    const world::EmbeddingWorld& w = args.find("world")
                                         ? pick_block(doc.worlds, args, "world", "world").second
                                         : doc.named(doc.worlds, tasks.world, "world");
    std::string self = self_object(args, w);
    std::uint64_t steps = args.integer("steps");
    std::uint64_t seed = args.integer("seed");
    double lr = args.real("lr", 0.5);

    world::TestSet exhaustive = tasks.set;
    exhaustive.sampling = world::Sampling::Exhaustive;
    double initial = world::evaluate_awareness(w, self, exhaustive, 0, 0).delta;

    world::TestSet sampler = tasks.set;
    sampler.sampling = world::Sampling::WithReplacement;
    world::TrainResult result = world::enforce_awareness(w, self, sampler, steps, lr, seed);
    double final_delta = world::evaluate_awareness(result.world, self, exhaustive, 0, 0).delta;

    report.kv("tasks", tname);
    report.kv("self", self);
    report.kv("steps", static_cast<std::size_t>(steps));
    report.kv("lr", lr);
    report.kv("seed", std::to_string(seed));
    report.kv("initial_delta", initial);
    report.kv("final_delta", final_delta);
    report.kv("final_loss", result.trace.empty() ? 0.0 : result.trace.back().loss);
    report.line("initial delta: " + report.fmt(initial));
    report.line("final delta: " + report.fmt(final_delta));
    if (const std::string* out = args.find("out")) {
        checkpoint::write_file(*out, checkpoint::save_checkpoint(result.world));
        report.line("checkpoint written to " + *out);
    }
    return kOk;
}

inline int cmd_scenario_solve(const Args& args, Report& report) {
    dsl::SpecDocument doc = load_spec(args);
    const auto& [sname, content] = pick_block(doc.scenarios, args, "scenario", "scenario");
    const auto& [tname, tasks] = pick_block(doc.task_sets, args, "tasks", "tasks");
    const world::EmbeddingWorld& w = args.find("world")
                                         ? pick_block(doc.worlds, args, "world", "world").second
                                         : doc.named(doc.worlds, tasks.world, "world");
    report.kv("scenario", sname);
    report.kv("tasks", tname);
    for (const auto& task : tasks.set.tests) {
        double whole = scenario::task_on_scenario(w, task, content, scenario::TaskMode::Whole);
        double factored = scenario::task_on_scenario(w, task, content, scenario::TaskMode::Factored);
        report.kv("whole." + task.name, whole);
        report.kv("factored." + task.name, factored);
        report.line("task " + task.name + ": whole=" + report.fmt(whole) +
                    " factored=" + report.fmt(factored));
    }
    return kOk;
}

inline int cmd_model_solve(const Args& args, Report& report) {
    dsl::SpecDocument doc = load_spec(args);
    const auto& [name, diagram] = pick_block(doc.abstracts, args, "abstract", "abstract");
    scenario::ModelSolution solved = scenario::model_solve(diagram);
    report.kv("abstract", name);
    report.kv("equations", solved.system.equations.size());
    if (solved.solution.status == scenario::SolveStatus::Underdetermined) {
        report.kv("status", "underdetermined");
        report.line("underdetermined");
        return kCheckFailed;
    }
    if (solved.solution.status == scenario::SolveStatus::Inconsistent) {
        report.kv("status", "no solution");
        report.line("no solution");
        return kCheckFailed;
    }
    report.kv("status", "unique");
    for (const auto& [var, value] : solved.solution.assignment) {
        report.kv("solution." + var, value.str());
        report.line(var + "=" + value.str());
    }
    report.kv("expressions_equal", solved.expressions_equal ? "yes" : "no");
    report.line(solved.expressions_equal ? "expressions equal: yes" : "expressions equal: NO");
    return solved.expressions_equal ? kOk : kCheckFailed;
}

inline int cmd_scope_measure(const Args& args, Report& report) {
    dsl::SpecDocument doc = load_spec(args);
    const auto& [name, node] = pick_block(doc.scope_nodes, args, "scope", "scope");
    (void)node;
    scenario::Scope scope;
    scope.nodes = doc.scope_nodes;
    scope.root = name;
    scenario::ScopeMeasure m = scenario::scope_breadth_depth(scope);
    report.kv("scope", name);
    report.kv("breadth", m.breadth);
    report.kv("depth", m.depth);
    report.line("scope " + name + ": breadth=" + std::to_string(m.breadth) +
                " depth=" + std::to_string(m.depth));
    return kOk;
}

inline void report_consistency(Report& report, const consistency::ConsistencyReport& rep,
                               const std::string& prefix) {
    report.kv(prefix + "pass_rate", rep.pass_rate);
    for (const auto& [kind, count] : rep.counts) {
        std::string kname = consistency::kind_name(kind);
        report.kv(prefix + "count." + kname, count);
        report.kv(prefix + "loss." + kname, rep.mean_loss.at(kind));
        report.line("  " + kname + ": " + std::to_string(count) +
                    " tests, mean loss " + report.fmt(rep.mean_loss.at(kind)));
    }
    report.line("  pass rate: " + report.fmt(rep.pass_rate));
}

inline int cmd_consistency_check(const Args& args, Report& report) {
    dsl::SpecDocument doc = load_spec(args);
    const auto& [name, suite] = pick_block(doc.suites, args, "suite", "suite");
    const world::EmbeddingWorld& w = doc.named(doc.worlds, suite.world, "world");
    auto tests = dsl::build_suite_tests(doc, suite, w);
    auto rep = consistency::run_consistency_check(w, tests);
    report.kv("suite", name);
    report.kv("tests", tests.size());
    report.kv("step", static_cast<std::size_t>(rep.step));
    report.line("suite " + name + ": " + std::to_string(tests.size()) + " tests at step " +
                std::to_string(rep.step));
    report_consistency(report, rep, "");
    return kOk;
}

inline int cmd_consistency_train(const Args& args, Report& report) {
    dsl::SpecDocument doc = load_spec(args);
    const auto& [name, suite] = pick_block(doc.suites, args, "suite", "suite");
    const world::EmbeddingWorld& w = doc.named(doc.worlds, suite.world, "world");
    std::uint64_t steps = args.integer("steps");
    std::uint64_t seed = args.integer("seed");
    double lr = args.real("lr", 0.3);

    auto tests = dsl::build_suite_tests(doc, suite, w);
    auto before = consistency::run_consistency_check(w, tests);
    auto result = consistency::train_consistency(w, tests, steps, lr, seed);
    auto after = consistency::run_consistency_check(result.world, tests);

    report.kv("suite", name);
    report.kv("tests", tests.size());
    report.kv("steps", static_cast<std::size_t>(steps));
    report.kv("lr", lr);
    report.kv("seed", std::to_string(seed));
    report.line("before:");
    report_consistency(report, before, "before.");
    report.line("after:");
    report_consistency(report, after, "after.");
    if (const std::string* out = args.find("out")) {
        checkpoint::write_file(*out, checkpoint::save_checkpoint(result.world));
        report.line("checkpoint written to " + *out);
    }
    return kOk;
}

inline int cmd_save(const Args& args, Report& report) {
    dsl::SpecDocument doc = load_spec(args);
    const auto& [name, w] = pick_block(doc.worlds, args, "world", "world");
    const std::string& out = args.require("out");
    checkpoint::write_file(out, checkpoint::save_checkpoint(w));
    report.kv("world", name);
    report.kv("out", out);
    report.line("world " + name + " saved to " + out);
    return kOk;
}

inline int cmd_load(const Args& args, Report& report) {
    world::EmbeddingWorld w = checkpoint::load_checkpoint(checkpoint::read_file(args.require("spec")));
    report.kv("dim", w.dim);
    report.kv("step", static_cast<std::size_t>(w.step));
    report.kv("objects", w.objects.size());
    report.kv("labels", w.label_vocab.size());
    report.kv("tau", w.tau);
    report.line("dim: " + std::to_string(w.dim));
    report.line("step: " + std::to_string(w.step));
    report.line("objects: " + std::to_string(w.objects.size()));
    report.line("labels: " + std::to_string(w.label_vocab.size()));
    if (const std::string* out = args.find("out")) {
        checkpoint::write_file(*out, checkpoint::save_checkpoint(w));
        report.line("checkpoint written to " + *out);
    }
    return kOk;
}

} // namespace detail

inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    detail::Args args;
    try {
        args = detail::parse_args(argv);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        detail::Report report(args.command, out);
        int status;
        if (args.command == "validate")
            status = detail::cmd_validate(args, report);
        else if (args.command == "yoneda-check")
            status = detail::cmd_yoneda_check(args, report);
        else if (args.command == "limit")
            status = detail::cmd_limit(args, report, /*colimit=*/false);
        else if (args.command == "colimit")
            status = detail::cmd_limit(args, report, /*colimit=*/true);
        else if (args.command == "exchange-check")
            status = detail::cmd_exchange_check(args, report, /*dual=*/false);
        else if (args.command == "p1p2-check")
            status = detail::cmd_exchange_check(args, report, /*dual=*/true);
        else if (args.command == "eval-awareness")
            status = detail::cmd_eval_awareness(args, report);
        else if (args.command == "train-awareness")
            status = detail::cmd_train_awareness(args, report);
        else if (args.command == "scenario-solve")
            status = detail::cmd_scenario_solve(args, report);
        else if (args.command == "model-solve")
            status = detail::cmd_model_solve(args, report);
        else if (args.command == "scope-measure")
            status = detail::cmd_scope_measure(args, report);
        else if (args.command == "consistency-check")
            status = detail::cmd_consistency_check(args, report);
        else if (args.command == "consistency-train")
            status = detail::cmd_consistency_train(args, report);
        else if (args.command == "save")
            status = detail::cmd_save(args, report);
        else if (args.command == "load")
            status = detail::cmd_load(args, report);
        else {
            err << "usage error: unknown command '" << args.command << "'\n";
            return kUsage;
        }
        report.kv("status", static_cast<std::size_t>(status));
        report.write(args.find("report"));
        return status;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const dsl::ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kSpecError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
}

} // namespace cattice::cli
