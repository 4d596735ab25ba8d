// Line-oriented text format for categories, functors, presheaves, diagrams,
// worlds, task sets, scenarios, scopes, abstracted diagrams and test suites.
// Blocks open with "<kind> <name> ..." and close with "end"; bodies are
// key-led lines; "#" starts a comment. Parsing is strict: unknown block
// kinds, unknown keys, duplicate identifiers and dangling references are
// errors carrying the offending line and column. References must be declared
// before use.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cattice/consistency.hpp"
#include "cattice/fincat.hpp"
#include "cattice/limits.hpp"
#include "cattice/numfmt.hpp"
#include "cattice/rational.hpp"
#include "cattice/scenario.hpp"
#include "cattice/world.hpp"

namespace cattice::dsl {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

struct SuiteSpec {
    std::string world;
    std::vector<std::string> composition_categories;
    struct Alignment {
        std::string other_world;
        double eps = 0.05;
        std::vector<std::pair<std::string, std::string>> pairs;
    };
    std::optional<Alignment> alignment;
    struct Reconstruction {
        std::string scenario;
        std::string mask;
        double bar = 0.9;
    };
    std::vector<Reconstruction> reconstructions;
};

struct TaskSetSpec {
    std::string world;
    world::TestSet set;
};

struct SpecDocument {
    std::vector<std::pair<std::string, std::string>> block_order; // (kind, name)
    std::map<std::string, fincat::FiniteCategory> categories;
    std::map<std::string, fincat::Functor> functors;
    std::map<std::string, fincat::SetFunctor> presheaves;
    std::map<std::string, fincat::Functor> cat_diagrams;
    std::map<std::string, limits::PresheafDiagram> presheaf_diagrams;
    std::map<std::string, world::EmbeddingWorld> worlds;
    std::map<std::string, TaskSetSpec> task_sets;
    std::map<std::string, scenario::ScenarioContent> scenarios;
    std::map<std::string, scenario::ScopeNode> scope_nodes;
    std::map<std::string, scenario::AbstractDiagram> abstracts;
    std::map<std::string, SuiteSpec> suites;

    template <typename T>
    const T& named(const std::map<std::string, T>& table, const std::string& name,
                   const char* what) const {
        auto it = table.find(name);
        if (it == table.end())
            throw std::out_of_range(std::string("unknown ") + what + " '" + name + "'");
        return it->second;
    }
};

namespace detail {

struct Token {
    std::string text;
    std::size_t column; // 1-based
};

struct Line {
    std::size_t number = 0;
    std::vector<Token> tokens;
};

inline std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        Line line;
        line.number = number;
        std::size_t i = 0;
        while (i < raw.size()) {
            if (raw[i] == '#') break;
            if (std::isspace(static_cast<unsigned char>(raw[i]))) {
                ++i;
                continue;
            }
            std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])) &&
                   raw[i] != '#')
                ++i;
            line.tokens.push_back({raw.substr(start, i - start), start + 1});
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

class Cursor {
public:
    explicit Cursor(std::vector<Line> lines) : lines_(std::move(lines)) {}

    bool done() const { return at_ >= lines_.size(); }
    const Line& peek() const { return lines_[at_]; }
    Line next() { return lines_[at_++]; }

private:
    std::vector<Line> lines_;
    std::size_t at_ = 0;
};

[[noreturn]] inline void fail(const Line& line, std::size_t token_index, const std::string& msg) {
    std::size_t column =
        line.tokens.empty()
            ? 1
            : line.tokens[std::min(token_index, line.tokens.size() - 1)].column;
    throw ParseError(line.number, column, msg);
}

inline const Token& want(const Line& line, std::size_t index, const char* what) {
    if (index >= line.tokens.size())
        fail(line, line.tokens.size(), std::string("expected ") + what);
    return line.tokens[index];
}

inline void want_end(const Line& line, std::size_t count) {
    if (line.tokens.size() > count)
        fail(line, count, "unexpected trailing token '" + line.tokens[count].text + "'");
}

inline void want_arrow(const Line& line, std::size_t index) {
    if (want(line, index, "'->'").text != "->")
        fail(line, index, "expected '->', got '" + line.tokens[index].text + "'");
}

inline double parse_real(const Line& line, std::size_t index) {
    try {
        double x = parse_double(want(line, index, "a real number").text);
        if (!std::isfinite(x)) fail(line, index, "non-finite real number");
        return x;
    } catch (const std::invalid_argument& e) {
        fail(line, index, e.what());
    }
}

inline std::uint64_t parse_integer(const Line& line, std::size_t index) {
    try {
        return parse_u64(want(line, index, "an integer").text);
    } catch (const std::invalid_argument& e) {
        fail(line, index, e.what());
    }
}

inline bool is_rational_literal(const std::string& s) {
    std::size_t i = s.size() && (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i >= s.size()) return false;
    bool digits = false, slash = false;
    for (; i < s.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            digits = true;
        } else if (s[i] == '/' && !slash && digits) {
            slash = true;
            digits = false;
        } else {
            return false;
        }
    }
    return digits;
}

inline Rational parse_rational(const Line& line, std::size_t index) {
    const std::string& s = want(line, index, "a rational").text;
    if (!is_rational_literal(s)) fail(line, index, "malformed rational '" + s + "'");
    std::size_t slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
        fail(line, index, "malformed rational '" + s + "'");
    }
}

// "key=value" option tokens at the tail of a header or body line.
inline std::optional<std::pair<std::string, std::string>> split_option(const std::string& s) {
    std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 > s.size()) return std::nullopt;
    return std::make_pair(s.substr(0, eq), s.substr(eq + 1));
}

} // namespace detail

// ---------------------------------------------------------------------------

namespace detail {

struct Parser {
    SpecDocument doc;

    void check_fresh(const Line& line, const std::string& kind, const std::string& name,
                     bool taken) {
        if (taken) fail(line, 1, "duplicate " + kind + " identifier '" + name + "'");
    }

    const fincat::FiniteCategory& category_ref(const Line& line, std::size_t index) {
        const std::string& name = want(line, index, "a category name").text;
        auto it = doc.categories.find(name);
        if (it == doc.categories.end()) fail(line, index, "unknown category '" + name + "'");
        return it->second;
    }

    void parse_category(Cursor& cur, const Line& header) {
        const std::string& name = want(header, 1, "a category name").text;
        bool raw = false;
        for (std::size_t i = 2; i < header.tokens.size(); ++i) {
            if (header.tokens[i].text == "raw")
                raw = true;
            else
                fail(header, i, "unknown category option '" + header.tokens[i].text + "'");
        }
        check_fresh(header, "category", name, doc.categories.count(name));

        fincat::CategoryBuilder builder;
        fincat::FiniteCategory raw_cat;
        std::set<std::string> objects, morphisms;
        auto known_object = [&](const Line& line, std::size_t index) -> const std::string& {
            const std::string& o = want(line, index, "an object").text;
            if (!objects.count(o)) fail(line, index, "unknown object '" + o + "'");
            return o;
        };
        auto known_morphism = [&](const Line& line, std::size_t index) -> const std::string& {
            const std::string& m = want(line, index, "a morphism id").text;
            if (!morphisms.count(m)) fail(line, index, "unknown morphism '" + m + "'");
            return m;
        };

        while (!cur.done() && cur.peek().tokens.front().text != "end") {
            Line line = cur.next();
            const std::string& key = line.tokens.front().text;
            if (key == "object" || key == "objects") {
                if (line.tokens.size() < 2) fail(line, 1, "expected at least one object name");
                for (std::size_t i = 1; i < line.tokens.size(); ++i) {
                    const std::string& o = line.tokens[i].text;
                    builder.object(o);
                    raw_cat.objects.push_back(o);
                    objects.insert(o);
                    if (!raw) morphisms.insert("id_" + o); // auto identity
                }
            } else if (key == "morphism") {
                const std::string& id = want(line, 1, "a morphism id").text;
                const std::string& src = known_object(line, 2);
                const std::string& dst = known_object(line, 3);
                std::string label;
                for (std::size_t i = 4; i < line.tokens.size(); ++i) {
                    auto opt = split_option(line.tokens[i].text);
                    if (opt && opt->first == "label")
                        label = opt->second;
                    else
                        fail(line, i, "unknown morphism option '" + line.tokens[i].text + "'");
                }
                if (morphisms.count(id)) fail(line, 1, "duplicate morphism id '" + id + "'");
                builder.morphism(id, src, dst, label);
                raw_cat.morphisms.push_back({id, src, dst, label.empty() ? id : label});
                morphisms.insert(id);
            } else if (key == "compose") {
                const std::string& g = known_morphism(line, 1);
                const std::string& f = known_morphism(line, 2);
                if (want(line, 3, "'='").text != "=") fail(line, 3, "expected '='");
                const std::string& h = known_morphism(line, 4);
                want_end(line, 5);
                builder.compose(g, f, h);
                raw_cat.composition[{g, f}] = h;
            } else if (key == "identity") {
                if (!raw) fail(line, 0, "'identity' lines are only allowed in raw categories");
                const std::string& obj = known_object(line, 1);
                const std::string& mid = known_morphism(line, 2);
                want_end(line, 3);
                raw_cat.identity[obj] = mid;
            } else {
                fail(line, 0, "unknown key '" + key + "' in category block");
            }
        }
        if (cur.done()) throw ParseError(header.number, 1, "unterminated category block");
        cur.next(); // end

        doc.categories[name] = raw ? raw_cat : builder.build();
        doc.block_order.emplace_back("category", name);
    }

    void parse_functor_body(Cursor& cur, const Line& header, fincat::Functor& fun) {
        while (!cur.done() && cur.peek().tokens.front().text != "end") {
            Line line = cur.next();
            const std::string& key = line.tokens.front().text;
            if (key == "object") {
                const std::string& from = want(line, 1, "an object").text;
                want_arrow(line, 2);
                const std::string& to = want(line, 3, "an object").text;
                want_end(line, 4);
                if (!fun.source.has_object(from))
                    fail(line, 1, "unknown source object '" + from + "'");
                if (!fun.target.has_object(to)) fail(line, 3, "unknown target object '" + to + "'");
                fun.object_map[from] = to;
            } else if (key == "morphism") {
                const std::string& from = want(line, 1, "a morphism id").text;
                want_arrow(line, 2);
                const std::string& to = want(line, 3, "a morphism id").text;
                want_end(line, 4);
                if (!fun.source.find_morphism(from))
                    fail(line, 1, "unknown source morphism '" + from + "'");
                if (!fun.target.find_morphism(to))
                    fail(line, 3, "unknown target morphism '" + to + "'");
                fun.morphism_map[from] = to;
            } else {
                fail(line, 0, "unknown key '" + key + "' in functor block");
            }
        }
        if (cur.done()) throw ParseError(header.number, 1, "unterminated block");
        cur.next();
    }

    void parse_functor(Cursor& cur, const Line& header) {
        const std::string& name = want(header, 1, "a functor name").text;
        check_fresh(header, "functor", name, doc.functors.count(name));
        fincat::Functor fun;
        fun.source = category_ref(header, 2);
        fun.target = category_ref(header, 3);
        want_end(header, 4);
        parse_functor_body(cur, header, fun);
        doc.functors[name] = std::move(fun);
        doc.block_order.emplace_back("functor", name);
    }

    void parse_presheaf(Cursor& cur, const Line& header) {
        const std::string& name = want(header, 1, "a presheaf name").text;
        check_fresh(header, "presheaf", name, doc.presheaves.count(name));
        if (want(header, 2, "'on'").text != "on") fail(header, 2, "expected 'on <category>'");
        fincat::SetFunctor p;
        p.base = category_ref(header, 3);
        p.variance = fincat::Variance::Contravariant;
        for (std::size_t i = 4; i < header.tokens.size(); ++i) {
            auto opt = split_option(header.tokens[i].text);
            if (opt && opt->first == "variance") {
                if (opt->second == "covariant")
                    p.variance = fincat::Variance::Covariant;
                else if (opt->second == "contravariant")
                    p.variance = fincat::Variance::Contravariant;
                else
                    fail(header, i, "unknown variance '" + opt->second + "'");
            } else {
                fail(header, i, "unknown presheaf option '" + header.tokens[i].text + "'");
            }
        }

        for (const auto& obj : p.base.objects) p.object_sets[obj];
        for (const auto& m : p.base.morphisms) p.morphism_fns[m.id];

        while (!cur.done() && cur.peek().tokens.front().text != "end") {
            Line line = cur.next();
            const std::string& key = line.tokens.front().text;
            if (key == "set") {
                const std::string& obj = want(line, 1, "an object").text;
                if (!p.base.has_object(obj)) fail(line, 1, "unknown object '" + obj + "'");
                auto& elems = p.object_sets.at(obj);
                for (std::size_t i = 2; i < line.tokens.size(); ++i)
                    elems.push_back(line.tokens[i].text);
            } else if (key == "map") {
                const std::string& mid = want(line, 1, "a morphism id").text;
                if (!p.base.find_morphism(mid)) fail(line, 1, "unknown morphism '" + mid + "'");
                const std::string& from = want(line, 2, "an element").text;
                want_arrow(line, 3);
                const std::string& to = want(line, 4, "an element").text;
                want_end(line, 5);
                p.morphism_fns.at(mid)[from] = to;
            } else {
                fail(line, 0, "unknown key '" + key + "' in presheaf block");
            }
        }
        if (cur.done()) throw ParseError(header.number, 1, "unterminated presheaf block");
        cur.next();

        // identity actions can be left implicit
        for (const auto& [obj, mid] : p.base.identity) {
            auto& fn = p.morphism_fns.at(mid);
            if (fn.empty())
                for (const auto& e : p.object_sets.at(obj)) fn[e] = e;
        }
        doc.presheaves[name] = std::move(p);
        doc.block_order.emplace_back("presheaf", name);
    }

    void parse_diagram(Cursor& cur, const Line& header) {
        const std::string& name = want(header, 1, "a diagram name").text;
        check_fresh(header, "diagram", name,
                    doc.cat_diagrams.count(name) || doc.presheaf_diagrams.count(name));
        if (want(header, 2, "'shape'").text != "shape")
            fail(header, 2, "expected 'shape <category>'");
        const fincat::FiniteCategory& shape = category_ref(header, 3);
        const std::string& mode = want(header, 4, "'target' or 'of'").text;

        if (mode == "target") {
            fincat::Functor fun;
            fun.source = shape;
            fun.target = category_ref(header, 5);
            want_end(header, 6);
            parse_functor_body(cur, header, fun);
            doc.cat_diagrams[name] = std::move(fun);
            doc.block_order.emplace_back("diagram", name);
            return;
        }
        if (mode != "of" || want(header, 5, "'presheaves'").text != "presheaves")
            fail(header, 4, "expected 'target <category>' or 'of presheaves'");
        want_end(header, 6);

        limits::PresheafDiagram d;
        d.shape = shape;
        while (!cur.done() && cur.peek().tokens.front().text != "end") {
            Line line = cur.next();
            const std::string& key = line.tokens.front().text;
            if (key == "node") {
                const std::string& at = want(line, 1, "a shape object").text;
                want_arrow(line, 2);
                const std::string& pname = want(line, 3, "a presheaf name").text;
                want_end(line, 4);
                if (!d.shape.has_object(at)) fail(line, 1, "unknown shape object '" + at + "'");
                auto it = doc.presheaves.find(pname);
                if (it == doc.presheaves.end()) fail(line, 3, "unknown presheaf '" + pname + "'");
                d.nodes[at] = it->second;
            } else if (key == "arrow") {
                const std::string& mid = want(line, 1, "a shape morphism").text;
                if (!d.shape.find_morphism(mid)) fail(line, 1, "unknown shape morphism '" + mid + "'");
                const std::string& obj = want(line, 2, "a base object").text;
                const std::string& from = want(line, 3, "an element").text;
                want_arrow(line, 4);
                const std::string& to = want(line, 5, "an element").text;
                want_end(line, 6);
                d.arrows[mid].components[obj][from] = to;
            } else {
                fail(line, 0, "unknown key '" + key + "' in diagram block");
            }
        }
        if (cur.done()) throw ParseError(header.number, 1, "unterminated diagram block");
        cur.next();

        // attach endpoint functors to the collected component maps
        for (auto& [mid, arrow] : d.arrows) {
            const fincat::Morphism& m = d.shape.morphism(mid);
            auto s = d.nodes.find(m.source), t = d.nodes.find(m.target);
            if (s == d.nodes.end() || t == d.nodes.end())
                throw ParseError(header.number, 1,
                                 "arrow '" + mid + "' connects shape objects without nodes");
            arrow.source_functor = s->second;
            arrow.target_functor = t->second;
            for (const auto& obj : arrow.source_functor.base.objects) arrow.components[obj];
        }
        doc.presheaf_diagrams[name] = std::move(d);
        doc.block_order.emplace_back("diagram", name);
    }

    void parse_world(Cursor& cur, const Line& header) {
        const std::string& name = want(header, 1, "a world name").text;
        want_end(header, 2);
        check_fresh(header, "world", name, doc.worlds.count(name));

        std::size_t dim = 0;
        std::uint64_t seed = 0;
        double tau = 0.5;
        std::vector<std::string> objects, labels;
        std::vector<Line> vector_lines, matrix_lines;

        while (!cur.done() && cur.peek().tokens.front().text != "end") {
            Line line = cur.next();
            const std::string& key = line.tokens.front().text;
            if (key == "dim") {
                dim = parse_integer(line, 1);
                want_end(line, 2);
            } else if (key == "seed") {
                seed = parse_integer(line, 1);
                want_end(line, 2);
            } else if (key == "tau") {
                tau = parse_real(line, 1);
                want_end(line, 2);
            } else if (key == "object" || key == "objects") {
                for (std::size_t i = 1; i < line.tokens.size(); ++i)
                    objects.push_back(line.tokens[i].text);
            } else if (key == "label" || key == "labels") {
                for (std::size_t i = 1; i < line.tokens.size(); ++i)
                    labels.push_back(line.tokens[i].text);
            } else if (key == "vector" || key == "matrix") {
                (key == "vector" ? vector_lines : matrix_lines).push_back(line);
            } else {
                fail(line, 0, "unknown key '" + key + "' in world block");
            }
        }
        if (cur.done()) throw ParseError(header.number, 1, "unterminated world block");
        cur.next();

        if (dim == 0) throw ParseError(header.number, 1, "world '" + name + "' needs a dim line");
        world::EmbeddingWorld w;
        try {
            w = world::make_world(objects, dim, seed, labels, tau);
        } catch (const std::invalid_argument& e) {
            throw ParseError(header.number, 1, e.what());
        }
        for (const Line& line : vector_lines) {
            const std::string& obj = want(line, 1, "an object").text;
            if (!w.has_object(obj)) fail(line, 1, "unknown world object '" + obj + "'");
            if (line.tokens.size() != 2 + dim)
                fail(line, 2, "expected " + std::to_string(dim) + " coordinates");
            auto& v = w.table.at(obj);
            for (std::size_t i = 0; i < dim; ++i) v[i] = parse_real(line, 2 + i);
        }
        for (const Line& line : matrix_lines) {
            const std::string& label = want(line, 1, "a label").text;
            if (!w.label_matrices.count(label)) fail(line, 1, "unknown label '" + label + "'");
            if (line.tokens.size() != 2 + dim * dim)
                fail(line, 2, "expected " + std::to_string(dim * dim) + " entries");
            auto& m = w.label_matrices.at(label);
            for (std::size_t i = 0; i < dim * dim; ++i) m[i] = parse_real(line, 2 + i);
        }
        doc.worlds[name] = std::move(w);
        doc.block_order.emplace_back("world", name);
    }

    void parse_tasks(Cursor& cur, const Line& header) {
        const std::string& name = want(header, 1, "a task set name").text;
        check_fresh(header, "tasks", name, doc.task_sets.count(name));
        if (want(header, 2, "'world'").text != "world") fail(header, 2, "expected 'world <name>'");
        const std::string& world_name = want(header, 3, "a world name").text;
        want_end(header, 4);
        if (!doc.worlds.count(world_name)) fail(header, 3, "unknown world '" + world_name + "'");
        const world::EmbeddingWorld& w = doc.worlds.at(world_name);

        TaskSetSpec spec;
        spec.world = world_name;
        while (!cur.done() && cur.peek().tokens.front().text != "end") {
            Line line = cur.next();
            const std::string& key = line.tokens.front().text;
            if (key == "sampling") {
                const std::string& mode = want(line, 1, "a sampling mode").text;
                if (mode == "exhaustive")
                    spec.set.sampling = world::Sampling::Exhaustive;
                else if (mode == "sample")
                    spec.set.sampling = world::Sampling::WithReplacement;
                else
                    fail(line, 1, "unknown sampling mode '" + mode + "'");
                want_end(line, 2);
            } else if (key == "task") {
                const std::string& tname = want(line, 1, "a task name").text;
                const std::string& kind = want(line, 2, "a task kind").text;
                if (kind == "vector") {
                    if (line.tokens.size() != 3 + w.dim)
                        fail(line, 3, "expected " + std::to_string(w.dim) + " coordinates");
                    std::vector<double> v(w.dim);
                    for (std::size_t i = 0; i < w.dim; ++i) v[i] = parse_real(line, 3 + i);
                    spec.set.tests.push_back(world::make_representable_task(tname, v));
                } else if (kind == "coord") {
                    std::size_t index = parse_integer(line, 3);
                    if (index >= w.dim) fail(line, 3, "coordinate index out of range");
                    if (want(line, 4, "'scale'").text != "scale") fail(line, 4, "expected 'scale'");
                    double scale = parse_real(line, 5);
                    want_end(line, 6);
                    spec.set.tests.push_back(world::make_coord_task(tname, index, scale));
                } else if (kind == "norm") {
                    double radius = parse_real(line, 3);
                    if (want(line, 4, "'scale'").text != "scale") fail(line, 4, "expected 'scale'");
                    double scale = parse_real(line, 5);
                    want_end(line, 6);
                    spec.set.tests.push_back(world::make_norm_task(tname, radius, scale));
                } else {
                    fail(line, 2, "unknown task kind '" + kind + "'");
                }
            } else {
                fail(line, 0, "unknown key '" + key + "' in tasks block");
            }
        }
        if (cur.done()) throw ParseError(header.number, 1, "unterminated tasks block");
        cur.next();
        doc.task_sets[name] = std::move(spec);
        doc.block_order.emplace_back("tasks", name);
    }

    void parse_scenario(Cursor& cur, const Line& header) {
        const std::string& name = want(header, 1, "a scenario name").text;
        check_fresh(header, "scenario", name, doc.scenarios.count(name));
        const world::EmbeddingWorld* w = nullptr;
        if (header.tokens.size() > 2) {
            if (header.tokens[2].text != "world") fail(header, 2, "expected 'world <name>'");
            const std::string& world_name = want(header, 3, "a world name").text;
            want_end(header, 4);
            if (!doc.worlds.count(world_name)) fail(header, 3, "unknown world '" + world_name + "'");
            w = &doc.worlds.at(world_name);
        }

        scenario::ScenarioContent content;
        while (!cur.done() && cur.peek().tokens.front().text != "end") {
            Line line = cur.next();
            const std::string& key = line.tokens.front().text;
            if (key == "object" || key == "objects") {
                for (std::size_t i = 1; i < line.tokens.size(); ++i) {
                    if (w && !w->has_object(line.tokens[i].text))
                        fail(line, i, "object '" + line.tokens[i].text + "' is not in the world");
                    content.objects.push_back(line.tokens[i].text);
                }
            } else if (key == "edge") {
                scenario::LabeledEdge e;
                e.source = want(line, 1, "a source object").text;
                e.label = want(line, 2, "a label").text;
                e.target = want(line, 3, "a target object").text;
                want_end(line, 4);
                content.edges.push_back(std::move(e));
            } else {
                fail(line, 0, "unknown key '" + key + "' in scenario block");
            }
        }
        if (cur.done()) throw ParseError(header.number, 1, "unterminated scenario block");
        cur.next();
        doc.scenarios[name] = std::move(content);
        doc.block_order.emplace_back("scenario", name);
    }

    void parse_scope(Cursor& cur, const Line& header) {
        const std::string& name = want(header, 1, "a scope name").text;
        want_end(header, 2);
        check_fresh(header, "scope", name, doc.scope_nodes.count(name));

        scenario::ScopeNode node;
        std::vector<std::pair<Line, std::pair<std::string, std::string>>> decompositions;
        while (!cur.done() && cur.peek().tokens.front().text != "end") {
            Line line = cur.next();
            const std::string& key = line.tokens.front().text;
            if (key == "object" || key == "objects") {
                for (std::size_t i = 1; i < line.tokens.size(); ++i)
                    node.objects.push_back(line.tokens[i].text);
            } else if (key == "edge" || key == "cross") {
                scenario::LabeledEdge e;
                e.source = want(line, 1, "a source object").text;
                e.label = want(line, 2, "a label").text;
                e.target = want(line, 3, "a target object").text;
                want_end(line, 4);
                (key == "edge" ? node.edges : node.cross_edges).push_back(std::move(e));
            } else if (key == "decompose") {
                const std::string& obj = want(line, 1, "an object").text;
                want_arrow(line, 2);
                const std::string& child = want(line, 3, "a scope name").text;
                want_end(line, 4);
                decompositions.push_back({line, {obj, child}});
            } else {
                fail(line, 0, "unknown key '" + key + "' in scope block");
            }
        }
        if (cur.done()) throw ParseError(header.number, 1, "unterminated scope block");
        cur.next();

        for (const auto& [line, entry] : decompositions) {
            if (std::find(node.objects.begin(), node.objects.end(), entry.first) ==
                node.objects.end())
                fail(line, 1, "decomposition of unknown object '" + entry.first + "'");
            node.decomposition[entry.first] = entry.second;
        }
        doc.scope_nodes[name] = std::move(node);
        doc.block_order.emplace_back("scope", name);
    }

    // limit expressions: terms separated by '+'/'-', each term
    // "[rational] [variable] basis"
    std::vector<scenario::LinearTerm> parse_expression(const Line& line, std::size_t start,
                                                       const scenario::AbstractDiagram& a) {
        std::vector<scenario::LinearTerm> terms;
        std::vector<std::pair<std::string, std::size_t>> current; // token, index
        int sign = 1;
        auto flush = [&](std::size_t at) {
            if (current.empty()) fail(line, at, "empty term in expression");
            scenario::LinearTerm term;
            term.coeff = Rational(sign);
            std::size_t i = 0;
            if (is_rational_literal(current[i].first)) {
                term.coeff = term.coeff * parse_rational(line, current[i].second);
                ++i;
            }
            if (current.size() - i == 2) {
                term.var = current[i].first;
                ++i;
            }
            if (current.size() - i != 1)
                fail(line, current.back().second,
                     "term must be '[coefficient] [variable] basis'; products of variables are not linear");
            term.basis = current[i].first;
            if (!term.var.empty() &&
                std::find(a.variables.begin(), a.variables.end(), term.var) == a.variables.end())
                fail(line, current[0].second, "unknown variable '" + term.var + "'");
            if (std::find(a.basis_objects.begin(), a.basis_objects.end(), term.basis) ==
                a.basis_objects.end())
                fail(line, current.back().second, "unknown basis object '" + term.basis + "'");
            terms.push_back(std::move(term));
            current.clear();
        };
        for (std::size_t i = start; i < line.tokens.size(); ++i) {
            const std::string& text = line.tokens[i].text;
            if (text == "+" || text == "-") {
                if (current.empty() && terms.empty()) {
                    sign = text == "-" ? -1 : 1; // leading sign
                    continue;
                }
                flush(i);
                sign = text == "-" ? -1 : 1;
            } else {
                current.push_back({text, i});
            }
        }
        flush(line.tokens.size());
        return terms;
    }

    void parse_abstract(Cursor& cur, const Line& header) {
        const std::string& name = want(header, 1, "an abstract diagram name").text;
        want_end(header, 2);
        check_fresh(header, "abstract", name, doc.abstracts.count(name));

        scenario::AbstractDiagram a;
        std::vector<Line> expr_lines;
        while (!cur.done() && cur.peek().tokens.front().text != "end") {
            Line line = cur.next();
            const std::string& key = line.tokens.front().text;
            if (key == "var" || key == "vars") {
                for (std::size_t i = 1; i < line.tokens.size(); ++i)
                    a.variables.push_back(line.tokens[i].text);
            } else if (key == "basis") {
                for (std::size_t i = 1; i < line.tokens.size(); ++i)
                    a.basis_objects.push_back(line.tokens[i].text);
            } else if (key == "lhs" || key == "rhs") {
                expr_lines.push_back(line);
            } else {
                fail(line, 0, "unknown key '" + key + "' in abstract block");
            }
        }
        if (cur.done()) throw ParseError(header.number, 1, "unterminated abstract block");
        cur.next();

        for (const Line& line : expr_lines) {
            auto terms = parse_expression(line, 1, a);
            auto& side = line.tokens.front().text == "lhs" ? a.lhs : a.rhs;
            side.insert(side.end(), terms.begin(), terms.end());
        }
        doc.abstracts[name] = std::move(a);
        doc.block_order.emplace_back("abstract", name);
    }

    void parse_suite(Cursor& cur, const Line& header) {
        const std::string& name = want(header, 1, "a suite name").text;
        check_fresh(header, "suite", name, doc.suites.count(name));
        if (want(header, 2, "'world'").text != "world") fail(header, 2, "expected 'world <name>'");
        const std::string& world_name = want(header, 3, "a world name").text;
        want_end(header, 4);
        if (!doc.worlds.count(world_name)) fail(header, 3, "unknown world '" + world_name + "'");

        SuiteSpec suite;
        suite.world = world_name;
        while (!cur.done() && cur.peek().tokens.front().text != "end") {
            Line line = cur.next();
            const std::string& key = line.tokens.front().text;
            if (key == "composition") {
                const std::string& cat = want(line, 1, "a category name").text;
                want_end(line, 2);
                if (!doc.categories.count(cat)) fail(line, 1, "unknown category '" + cat + "'");
                suite.composition_categories.push_back(cat);
            } else if (key == "alignment") {
                if (suite.alignment) fail(line, 0, "only one alignment per suite");
                SuiteSpec::Alignment align;
                align.other_world = want(line, 1, "a world name").text;
                if (!doc.worlds.count(align.other_world))
                    fail(line, 1, "unknown world '" + align.other_world + "'");
                for (std::size_t i = 2; i < line.tokens.size(); ++i) {
                    auto opt = split_option(line.tokens[i].text);
                    if (opt && opt->first == "eps")
                        align.eps = parse_double(opt->second);
                    else
                        fail(line, i, "unknown alignment option '" + line.tokens[i].text + "'");
                }
                suite.alignment = std::move(align);
            } else if (key == "pair") {
                if (!suite.alignment) fail(line, 0, "'pair' must follow an 'alignment' line");
                const std::string& x = want(line, 1, "an object").text;
                want_arrow(line, 2);
                const std::string& y = want(line, 3, "an object").text;
                want_end(line, 4);
                suite.alignment->pairs.emplace_back(x, y);
            } else if (key == "reconstruct") {
                SuiteSpec::Reconstruction recon;
                recon.scenario = want(line, 1, "a scenario name").text;
                if (!doc.scenarios.count(recon.scenario))
                    fail(line, 1, "unknown scenario '" + recon.scenario + "'");
                if (want(line, 2, "'mask'").text != "mask") fail(line, 2, "expected 'mask'");
                recon.mask = want(line, 3, "an object").text;
                for (std::size_t i = 4; i < line.tokens.size(); ++i) {
                    auto opt = split_option(line.tokens[i].text);
                    if (opt && opt->first == "bar")
                        recon.bar = parse_double(opt->second);
                    else
                        fail(line, i, "unknown reconstruct option '" + line.tokens[i].text + "'");
                }
                suite.reconstructions.push_back(std::move(recon));
            } else {
                fail(line, 0, "unknown key '" + key + "' in suite block");
            }
        }
        if (cur.done()) throw ParseError(header.number, 1, "unterminated suite block");
        cur.next();
        doc.suites[name] = std::move(suite);
        doc.block_order.emplace_back("suite", name);
    }
};

} // namespace detail

inline SpecDocument parse_spec(const std::string& text) {
    detail::Cursor cur(detail::tokenize(text));
    detail::Parser parser;
    while (!cur.done()) {
        detail::Line header = cur.next();
        const std::string& kind = header.tokens.front().text;
        if (kind == "category")
            parser.parse_category(cur, header);
        else if (kind == "functor")
            parser.parse_functor(cur, header);
        else if (kind == "presheaf")
            parser.parse_presheaf(cur, header);
        else if (kind == "diagram")
            parser.parse_diagram(cur, header);
        else if (kind == "world")
            parser.parse_world(cur, header);
        else if (kind == "tasks")
            parser.parse_tasks(cur, header);
        else if (kind == "scenario")
            parser.parse_scenario(cur, header);
        else if (kind == "scope")
            parser.parse_scope(cur, header);
        else if (kind == "abstract")
            parser.parse_abstract(cur, header);
        else if (kind == "suite")
            parser.parse_suite(cur, header);
        else
            detail::fail(header, 0, "unknown block kind '" + kind + "'");
    }
    return std::move(parser.doc);
}

// Materializes the tests a suite describes against a concrete world.
inline std::vector<consistency::ConsistencyTest> build_suite_tests(const SpecDocument& doc,
                                                                   const SuiteSpec& suite,
                                                                   const world::EmbeddingWorld& w) {
    std::vector<consistency::ConsistencyTest> tests;
    for (const auto& cat_name : suite.composition_categories) {
        auto batch = consistency::make_composition_tests(doc.named(doc.categories, cat_name, "category"), w);
        tests.insert(tests.end(), batch.begin(), batch.end());
    }
    if (suite.alignment) {
        std::map<std::string, std::string> pairing(suite.alignment->pairs.begin(),
                                                   suite.alignment->pairs.end());
        auto batch = consistency::make_functor_alignment_tests(
            w, doc.named(doc.worlds, suite.alignment->other_world, "world"), pairing,
            suite.alignment->eps);
        tests.insert(tests.end(), batch.begin(), batch.end());
    }
    for (const auto& recon : suite.reconstructions) {
        auto batch = consistency::make_limit_reconstruction_tests(
            w, {{doc.named(doc.scenarios, recon.scenario, "scenario"), recon.mask}}, recon.bar);
        tests.insert(tests.end(), batch.begin(), batch.end());
    }
    return tests;
}

} // namespace cattice::dsl
