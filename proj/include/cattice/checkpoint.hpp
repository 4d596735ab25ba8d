// Versioned text checkpoints for embedding worlds. Reals carry 17
// significant digits, which round-trips every double exactly, so
// load(save(w)) == w and re-saving reproduces the file byte for byte.
#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cattice/numfmt.hpp"
#include "cattice/world.hpp"

namespace cattice::checkpoint {

inline std::string save_checkpoint(const world::EmbeddingWorld& w) {
    std::ostringstream out;
    out << "format=1\n";
    out << "dim=" << w.dim << "\n";
    out << "step=" << w.step << "\n";
    out << "tau=" << fmt_double_full(w.tau) << "\n";
    out << "seeds=";
    for (std::size_t i = 0; i < w.seed_lineage.size(); ++i) {
        if (i) out << ',';
        out << w.seed_lineage[i];
    }
    out << "\n";
    out << "objects=" << w.objects.size() << "\n";
    for (const auto& obj : w.objects) {
        out << "object " << obj;
        for (double x : w.vector_of(obj)) out << ' ' << fmt_double_full(x);
        out << "\n";
    }
    out << "labels=" << w.label_vocab.size() << "\n";
    for (const auto& label : w.label_vocab) {
        out << "label " << label;
        for (double x : w.matrix_of(label)) out << ' ' << fmt_double_full(x);
        out << "\n";
    }
    return out.str();
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::string expect_kv(const std::string& line, const std::string& key) {
    std::string prefix = key + "=";
    if (line.rfind(prefix, 0) != 0)
        throw std::invalid_argument("checkpoint: expected '" + prefix + "...', got '" + line + "'");
    return line.substr(prefix.size());
}

} // namespace detail

inline world::EmbeddingWorld load_checkpoint(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto next_line = [&]() {
        if (!std::getline(in, line))
            throw std::invalid_argument("checkpoint: unexpected end of file");
        return line;
    };

    if (detail::expect_kv(next_line(), "format") != "1")
        throw std::invalid_argument("checkpoint: unsupported format version");

    world::EmbeddingWorld w;
    w.dim = parse_u64(detail::expect_kv(next_line(), "dim"));
    w.step = parse_u64(detail::expect_kv(next_line(), "step"));
    w.tau = parse_double(detail::expect_kv(next_line(), "tau"));
    std::string seeds = detail::expect_kv(next_line(), "seeds");
    std::size_t at = 0;
    while (at < seeds.size()) {
        std::size_t comma = seeds.find(',', at);
        std::string part = seeds.substr(at, comma == std::string::npos ? std::string::npos : comma - at);
        if (!part.empty()) w.seed_lineage.push_back(parse_u64(part));
        if (comma == std::string::npos) break;
        at = comma + 1;
    }

    std::size_t object_count = parse_u64(detail::expect_kv(next_line(), "objects"));
    for (std::size_t i = 0; i < object_count; ++i) {
        auto toks = detail::split_ws(next_line());
        if (toks.size() != 2 + w.dim || toks[0] != "object")
            throw std::invalid_argument("checkpoint: malformed object line '" + line + "'");
        w.objects.push_back(toks[1]);
        std::vector<double> v(w.dim);
        for (std::size_t k = 0; k < w.dim; ++k) {
            v[k] = parse_double(toks[2 + k]);
            if (!std::isfinite(v[k]))
                throw std::invalid_argument("checkpoint: non-finite coordinate in '" + toks[1] + "'");
        }
        w.table[toks[1]] = std::move(v);
    }

    std::size_t label_count = parse_u64(detail::expect_kv(next_line(), "labels"));
    for (std::size_t i = 0; i < label_count; ++i) {
        auto toks = detail::split_ws(next_line());
        if (toks.size() != 2 + w.dim * w.dim || toks[0] != "label")
            throw std::invalid_argument("checkpoint: malformed label line '" + line + "'");
        w.label_vocab.push_back(toks[1]);
        std::vector<double> m(w.dim * w.dim);
        for (std::size_t k = 0; k < w.dim * w.dim; ++k) m[k] = parse_double(toks[2 + k]);
        w.label_matrices[toks[1]] = std::move(m);
    }
    return w;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace cattice::checkpoint
