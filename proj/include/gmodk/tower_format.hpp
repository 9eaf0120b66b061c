#pragma once

// Plain-text tower files.
//
//   # comment
//   tower p=3 n=1 m=2
//   space level=0 degree=1 dim=2
//   map sigma level=0 degree=1
//   1 0
//   0 1
//   class a level=0 : 1 0
//   scalar t=1
//
// A map header is followed by exactly target-dim rows of source-dim entries
// in [0, p); cup maps at degree 1 read from the implicit one-dimensional
// degree-0 space. Comments and blank lines are allowed between blocks but not
// inside a matrix. Serialization is canonical (fixed block order, no
// comments), so serialize(parse(file)) == file for canonical files.

#include <fstream>
#include <sstream>

#include "ktower.hpp"

namespace gmodk {

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

// "key=value" -> value as int, or a parse error naming the line
inline int parse_kv(const std::string& tok, const std::string& key, int line) {
    std::string prefix = key + "=";
    if (tok.rfind(prefix, 0) != 0)
        throw parse_error(line, "expected " + prefix + "<int>, got '" + tok + "'");
    const std::string rest = tok.substr(prefix.size());
    try {
        size_t used = 0;
        int v = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw parse_error(line, "bad integer in '" + tok + "'");
    }
}

inline int parse_entry(const std::string& tok, int p, int line) {
    try {
        size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("trailing");
        if (v < 0 || v >= p) throw parse_error(line, "entry " + tok + " outside [0, p)");
        return v;
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception&) {
        throw parse_error(line, "bad integer '" + tok + "'");
    }
}

}  // namespace detail

inline Tower parse_tower(const std::string& text) {
    std::vector<std::string> lines;
    {
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
    }
    auto is_blank_or_comment = [](const std::string& s) {
        size_t i = s.find_first_not_of(" \t");
        return i == std::string::npos || s[i] == '#';
    };

    Tower T;
    bool have_header = false;
    std::vector<std::vector<bool>> space_seen;
    std::map<std::string, std::vector<std::vector<bool>>> map_seen;
    std::vector<bool> cup_an_seen;
    std::vector<bool> a_seen, xi_seen;
    bool an_seen = false, scalar_seen = false;
    const std::vector<std::string> kinds = {"sigma", "iota", "norm", "cup_a", "cup_xi", "cup_an"};

    size_t idx = 0;
    const int eof_line = int(lines.size()) + 1;
    auto next_meaningful = [&]() -> std::optional<size_t> {
        while (idx < lines.size() && is_blank_or_comment(lines[idx])) ++idx;
        if (idx == lines.size()) return std::nullopt;
        return idx++;
    };

    while (auto li = next_meaningful()) {
        const int line = int(*li) + 1;
        auto toks = detail::split_ws(lines[*li]);
        const std::string& head = toks[0];

        if (head == "tower") {
            if (have_header) throw parse_error(line, "duplicate tower header");
            if (toks.size() != 4) throw parse_error(line, "expected: tower p=<int> n=<int> m=<int>");
            T.p = detail::parse_kv(toks[1], "p", line);
            T.n = detail::parse_kv(toks[2], "n", line);
            T.m_max = detail::parse_kv(toks[3], "m", line);
            try {
                require_modulus(T.p);
            } catch (const error& e) {
                throw parse_error(line, e.what());
            }
            if (T.n < 0) throw parse_error(line, "negative n");
            if (T.m_max < 0) throw parse_error(line, "negative m");
            have_header = true;
            T.dims.assign(size_t(T.n) + 1, std::vector<int>(size_t(T.m_max) + 1, 1));
            space_seen.assign(size_t(T.n) + 1, std::vector<bool>(size_t(T.m_max) + 1, false));
            auto grid = [&](int levels) {
                return std::vector<std::vector<Mat>>(size_t(levels),
                                                     std::vector<Mat>(size_t(T.m_max) + 1));
            };
            T.sigma_m = grid(T.n + 1);
            T.iota_m = grid(T.n);
            T.norm_m = grid(T.n + 1);
            T.cup_a_m = grid(T.n);
            T.cup_xi_m = grid(T.n + 1);
            T.cup_an_m.resize(size_t(T.m_max) + 1);
            for (const auto& k : kinds)
                map_seen[k].assign(size_t(T.n) + 1,
                                   std::vector<bool>(size_t(T.m_max) + 1, false));
            cup_an_seen.assign(size_t(T.m_max) + 1, false);
            a_seen.assign(size_t(std::max(T.n, 0)), false);
            xi_seen.assign(size_t(T.n) + 1, false);
            T.a_class.assign(a_seen.size(), Vec{});
            T.xi_class.assign(xi_seen.size(), Vec{});
            continue;
        }
        if (!have_header) throw parse_error(line, "tower header must come first");

        auto level_in = [&](int i, int lo, int hi) {
            if (i < lo || i > hi)
                throw parse_error(line, "level " + std::to_string(i) + " out of range");
            return i;
        };
        auto degree_in = [&](int d) {
            if (d < 1 || d > T.m_max)
                throw parse_error(line, "degree " + std::to_string(d) +
                                            " out of range [1, m] (degree 0 is implicit)");
            return d;
        };

        if (head == "space") {
            if (toks.size() != 4)
                throw parse_error(line, "expected: space level=<i> degree=<d> dim=<k>");
            int i = level_in(detail::parse_kv(toks[1], "level", line), 0, T.n);
            int d = degree_in(detail::parse_kv(toks[2], "degree", line));
            int k = detail::parse_kv(toks[3], "dim", line);
            if (k < 0) throw parse_error(line, "negative dim");
            if (space_seen[i][d]) throw parse_error(line, "duplicate space declaration");
            space_seen[i][d] = true;
            T.dims[i][d] = k;
        } else if (head == "map") {
            if (toks.size() != 4)
                throw parse_error(line, "expected: map <kind> level=<i> degree=<d>");
            const std::string kind = toks[1];
            if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
                throw parse_error(line, "unknown map kind '" + kind + "'");
            int i = level_in(detail::parse_kv(toks[2], "level", line), 0, T.n);
            int d = degree_in(detail::parse_kv(toks[3], "degree", line));
            int rows, cols, tgt_level = i, tgt_deg = d, src_level = i, src_deg = d;
            if (kind == "sigma") {
            } else if (kind == "iota") {
                if (i >= T.n) throw parse_error(line, "iota level must be < n");
                tgt_level = i + 1;
            } else if (kind == "norm") {
                if (i < 1) throw parse_error(line, "norm level must be >= 1");
                tgt_level = i - 1;
            } else if (kind == "cup_a") {
                if (i > T.n - 1) throw parse_error(line, "cup_a level must be <= n-1");
                src_deg = d - 1;
            } else if (kind == "cup_xi") {
                src_deg = d - 1;
            } else {  // cup_an
                if (i != T.n) throw parse_error(line, "cup_an uses level=n");
                src_deg = d - 1;
            }
            auto dim_of = [&](int lv, int dg) {
                if (dg >= 1 && !space_seen[lv][dg])
                    throw parse_error(line, "map refers to undeclared space level=" +
                                                std::to_string(lv) + " degree=" +
                                                std::to_string(dg));
                return T.dim(lv, dg);
            };
            rows = dim_of(tgt_level, tgt_deg);
            cols = dim_of(src_level, src_deg);
            auto seen = (kind == "cup_an") ? cup_an_seen[d] : map_seen[kind][i][d];
            if (seen) throw parse_error(line, "duplicate map " + kind);
            seen = true;  // proxy writes through to the bit
            Mat m(T.p, rows, cols);
            for (int r = 0; r < rows; ++r) {
                if (idx >= lines.size())
                    throw parse_error(eof_line, "matrix rows missing for map " + kind);
                const int row_line = int(idx) + 1;
                auto row = detail::split_ws(lines[idx++]);
                if (int(row.size()) != cols)
                    throw parse_error(row_line, "expected " + std::to_string(cols) +
                                                    " entries, got " + std::to_string(row.size()));
                for (int ccol = 0; ccol < cols; ++ccol)
                    m(r, ccol) = detail::parse_entry(row[ccol], T.p, row_line);
            }
            if (kind == "sigma") T.sigma_m[i][d] = m;
            else if (kind == "iota") T.iota_m[i][d] = m;
            else if (kind == "norm") T.norm_m[i][d] = m;
            else if (kind == "cup_a") T.cup_a_m[i][d] = m;
            else if (kind == "cup_xi") T.cup_xi_m[i][d] = m;
            else T.cup_an_m[d] = m;
        } else if (head == "class") {
            if (toks.size() < 4 || toks[3] != ":")
                throw parse_error(line, "expected: class <a|xi|an> level=<i> : <entries>");
            const std::string kind = toks[1];
            int i = detail::parse_kv(toks[2], "level", line);
            Vec v;
            for (size_t k = 4; k < toks.size(); ++k)
                v.push_back(detail::parse_entry(toks[k], T.p, line));
            if (kind == "a") {
                level_in(i, 0, T.n - 1);
                if (a_seen[i]) throw parse_error(line, "duplicate class a");
                a_seen[i] = true;
                T.a_class[i] = v;
            } else if (kind == "xi") {
                level_in(i, 0, T.n);
                if (xi_seen[i]) throw parse_error(line, "duplicate class xi");
                xi_seen[i] = true;
                T.xi_class[i] = v;
            } else if (kind == "an") {
                if (i != T.n) throw parse_error(line, "class an uses level=n");
                if (an_seen) throw parse_error(line, "duplicate class an");
                an_seen = true;
                T.an_class = v;
            } else {
                throw parse_error(line, "unknown class kind '" + kind + "'");
            }
        } else if (head == "scalar") {
            if (toks.size() != 2) throw parse_error(line, "expected: scalar t=<int>");
            if (scalar_seen) throw parse_error(line, "duplicate scalar");
            scalar_seen = true;
            T.t = detail::parse_kv(toks[1], "t", line);
            if (T.t < 1 || T.t >= T.p) throw parse_error(line, "scalar t outside [1, p)");
        } else {
            throw parse_error(line, "unknown directive '" + head + "'");
        }
    }

    if (!have_header) throw parse_error(eof_line, "missing tower header");
    for (int i = 0; i <= T.n; ++i)
        for (int d = 1; d <= T.m_max; ++d) {
            if (!space_seen[i][d])
                throw parse_error(eof_line, "missing space level=" + std::to_string(i) +
                                                " degree=" + std::to_string(d));
            if (!map_seen["sigma"][i][d])
                throw parse_error(eof_line, "missing map sigma level=" + std::to_string(i) +
                                                " degree=" + std::to_string(d));
            if (i < T.n && !map_seen["iota"][i][d])
                throw parse_error(eof_line, "missing map iota level=" + std::to_string(i) +
                                                " degree=" + std::to_string(d));
            if (i >= 1 && !map_seen["norm"][i][d])
                throw parse_error(eof_line, "missing map norm level=" + std::to_string(i) +
                                                " degree=" + std::to_string(d));
            if (i <= T.n - 1 && !map_seen["cup_a"][i][d])
                throw parse_error(eof_line, "missing map cup_a level=" + std::to_string(i) +
                                                " degree=" + std::to_string(d));
        }
    // cup_xi and cup_an are optional, but all-or-nothing
    {
        int want = (T.n + 1) * T.m_max, got = 0;
        for (int i = 0; i <= T.n; ++i)
            for (int d = 1; d <= T.m_max; ++d) got += map_seen["cup_xi"][i][d] ? 1 : 0;
        if (got != 0 && got != want)
            throw parse_error(eof_line, "incomplete cup_xi family (all levels and degrees or none)");
        T.has_cup_xi = got == want && want > 0;
        if (!T.has_cup_xi) T.cup_xi_m.clear();
    }
    {
        int got = 0;
        for (int d = 1; d <= T.m_max; ++d) got += cup_an_seen[d] ? 1 : 0;
        if (got != 0 && got != T.m_max)
            throw parse_error(eof_line, "incomplete cup_an family (all degrees or none)");
        T.has_cup_an = got == T.m_max && T.m_max > 0;
        if (!T.has_cup_an) T.cup_an_m.clear();
    }
    for (int i = 0; i <= T.n - 1; ++i)
        if (!a_seen[i])
            throw parse_error(eof_line, "missing class a level=" + std::to_string(i));
    for (int i = 0; i <= T.n; ++i)
        if (!xi_seen[i])
            throw parse_error(eof_line, "missing class xi level=" + std::to_string(i));
    try {
        check_shape(T);
    } catch (const error& e) {
        throw parse_error(eof_line, e.what());
    }
    return T;
}

inline std::string serialize_tower(const Tower& T) {
    check_shape(T);
    std::ostringstream os;
    os << "tower p=" << T.p << " n=" << T.n << " m=" << T.m_max << "\n";
    for (int i = 0; i <= T.n; ++i)
        for (int d = 1; d <= T.m_max; ++d)
            os << "space level=" << i << " degree=" << d << " dim=" << T.dims[i][d] << "\n";
    auto emit = [&](const std::string& kind, int i, int d, const Mat& m) {
        os << "map " << kind << " level=" << i << " degree=" << d << "\n";
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c) os << (c ? " " : "") << m(r, c);
            os << "\n";
        }
    };
    for (int i = 0; i <= T.n; ++i)
        for (int d = 1; d <= T.m_max; ++d) emit("sigma", i, d, T.sigma_m[i][d]);
    for (int i = 0; i < T.n; ++i)
        for (int d = 1; d <= T.m_max; ++d) emit("iota", i, d, T.iota_m[i][d]);
    for (int i = 1; i <= T.n; ++i)
        for (int d = 1; d <= T.m_max; ++d) emit("norm", i, d, T.norm_m[i][d]);
    for (int i = 0; i <= T.n - 1; ++i)
        for (int d = 1; d <= T.m_max; ++d) emit("cup_a", i, d, T.cup_a_m[i][d]);
    if (T.has_cup_xi)
        for (int i = 0; i <= T.n; ++i)
            for (int d = 1; d <= T.m_max; ++d) emit("cup_xi", i, d, T.cup_xi_m[i][d]);
    if (T.has_cup_an)
        for (int d = 1; d <= T.m_max; ++d) emit("cup_an", T.n, d, T.cup_an_m[d]);
    auto emit_class = [&](const std::string& kind, int i, const Vec& v) {
        os << "class " << kind << " level=" << i << " :";
        for (auto x : v) os << " " << x;
        os << "\n";
    };
    for (int i = 0; i <= T.n - 1; ++i) emit_class("a", i, T.a_class[i]);
    for (int i = 0; i <= T.n; ++i) emit_class("xi", i, T.xi_class[i]);
    if (T.an_class) emit_class("an", T.n, *T.an_class);
    os << "scalar t=" << T.t << "\n";
    return os.str();
}

inline Tower load_tower_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_tower(ss.str());
}

inline void save_tower_file(const std::string& path, const Tower& T) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write '" + path + "'");
    out << serialize_tower(T);
}

}  // namespace gmodk
