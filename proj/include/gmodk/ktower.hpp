#pragma once

// Data model for a height-n tower of mod-p symbol spaces k[i][d]
// (0 <= i <= n levels, 0 <= d <= m_max degrees) carrying the generator action
// sigma, restriction iota (one level up), transfer norm (one level down), and
// cup products with the distinguished degree-1 classes. Degree-0 spaces are
// implicit everywhere: dimension 1, trivial sigma, iota = [1], norm = [0].
//
// validate_axioms runs the named consistency checks a genuine tower must
// satisfy; everything downstream (the structure-theorem engine) assumes a
// validated tower and reports structured clause failures otherwise.

#include <utility>

#include "gmod.hpp"

namespace gmodk {

struct Tower {
    int p = 3;
    int n = 1;
    int m_max = 1;

    // indexed [i][d]; the d = 0 slots exist but stored maps live at d >= 1
    std::vector<std::vector<int>> dims;
    std::vector<std::vector<Mat>> sigma_m;   // [i][d]
    std::vector<std::vector<Mat>> iota_m;    // [i][d], i < n, maps k[i][d] -> k[i+1][d]
    std::vector<std::vector<Mat>> norm_m;    // [i][d], i >= 1, maps k[i][d] -> k[i-1][d]
    std::vector<std::vector<Mat>> cup_a_m;   // [i][d], i <= n-1, maps k[i][d-1] -> k[i][d]
    bool has_cup_xi = false;
    std::vector<std::vector<Mat>> cup_xi_m;  // same shape family as cup_a_m, all levels
    bool has_cup_an = false;
    std::vector<Mat> cup_an_m;               // [d], maps k[n][d-1] -> k[n][d]

    std::vector<Vec> a_class;   // [i], i <= n-1, element of k[i][1]
    std::vector<Vec> xi_class;  // [i], 0 <= i <= n, element of k[i][1]
    std::optional<Vec> an_class;  // element of k[n][1]
    int t = 1;

    int dim(int i, int d) const { return d == 0 ? 1 : dims[size_t(i)][size_t(d)]; }

    Mat sigma(int i, int d) const {
        return d == 0 ? Mat::identity(p, 1) : sigma_m[size_t(i)][size_t(d)];
    }
    Mat iota(int i, int d) const {
        return d == 0 ? Mat::identity(p, 1) : iota_m[size_t(i)][size_t(d)];
    }
    Mat norm(int i, int d) const {
        return d == 0 ? Mat::zero(p, 1, 1) : norm_m[size_t(i)][size_t(d)];
    }
    Mat cup_a(int i, int d) const { return cup_a_m[size_t(i)][size_t(d)]; }
    Mat cup_xi(int i, int d) const { return cup_xi_m[size_t(i)][size_t(d)]; }
    Mat cup_an(int d) const { return cup_an_m[size_t(d)]; }

    // cup with the distinguished class at the top of the sub-tower 0..level
    Mat cup_top(int level, int d) const {
        if (level < n) return cup_a(level, d);
        if (!has_cup_an) throw error("cup_an data missing");
        return cup_an(d);
    }

    Mat iota_chain(int from, int to, int d) const {
        if (from > to) throw error("iota_chain goes upward only");
        Mat m = Mat::identity(p, dim(from, d));
        for (int l = from; l < to; ++l) m = iota(l, d) * m;
        return m;
    }
    Mat norm_chain(int from, int to, int d) const {
        if (from < to) throw error("norm_chain goes downward only");
        Mat m = Mat::identity(p, dim(from, d));
        for (int l = from; l > to; --l) m = norm(l, d) * m;
        return m;
    }

    GModule module_at(int i, int d) const { return make_module(p, i, sigma(i, d)); }

    bool operator==(const Tower& o) const {
        return p == o.p && n == o.n && m_max == o.m_max && dims == o.dims &&
               sigma_m == o.sigma_m && iota_m == o.iota_m && norm_m == o.norm_m &&
               cup_a_m == o.cup_a_m && has_cup_xi == o.has_cup_xi && cup_xi_m == o.cup_xi_m &&
               has_cup_an == o.has_cup_an && cup_an_m == o.cup_an_m && a_class == o.a_class &&
               xi_class == o.xi_class && an_class == o.an_class && t == o.t;
    }
};

inline void check_shape(const Tower& T) {
    require_modulus(T.p);
    if (T.n < 0) throw error("negative tower height");
    if (T.m_max < 0) throw error("negative m_max");
    if (T.t < 1 || T.t >= T.p) throw error("scalar t out of range [1, p)");
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) throw error("malformed tower: " + what);
    };
    need(int(T.dims.size()) == T.n + 1, "dims level count");
    for (int i = 0; i <= T.n; ++i) {
        need(int(T.dims[i].size()) == T.m_max + 1, "dims degree count");
        for (int d = 0; d <= T.m_max; ++d) need(T.dims[i][d] >= 0, "negative space dimension");
    }
    auto mat_ok = [&](const Mat& m, int rows, int cols) {
        return m.modulus() == T.p && m.rows() == rows && m.cols() == cols;
    };
    need(int(T.sigma_m.size()) == T.n + 1, "sigma level count");
    need(int(T.iota_m.size()) == std::max(T.n, 0), "iota level count");
    need(int(T.norm_m.size()) == T.n + 1, "norm level count");
    need(int(T.cup_a_m.size()) == T.n, "cup_a level count");
    for (int i = 0; i <= T.n; ++i)
        for (int d = 1; d <= T.m_max; ++d) {
            need(int(T.sigma_m[i].size()) == T.m_max + 1, "sigma degree count");
            need(mat_ok(T.sigma_m[i][d], T.dim(i, d), T.dim(i, d)), "sigma shape");
            if (i < T.n) {
                need(int(T.iota_m[i].size()) == T.m_max + 1, "iota degree count");
                need(mat_ok(T.iota_m[i][d], T.dim(i + 1, d), T.dim(i, d)), "iota shape");
            }
            if (i >= 1) {
                need(int(T.norm_m[i].size()) == T.m_max + 1, "norm degree count");
                need(mat_ok(T.norm_m[i][d], T.dim(i - 1, d), T.dim(i, d)), "norm shape");
            }
            if (i <= T.n - 1) {
                need(int(T.cup_a_m[i].size()) == T.m_max + 1, "cup_a degree count");
                need(mat_ok(T.cup_a_m[i][d], T.dim(i, d), T.dim(i, d - 1)), "cup_a shape");
            }
            if (T.has_cup_xi) {
                need(int(T.cup_xi_m.size()) == T.n + 1, "cup_xi level count");
                need(int(T.cup_xi_m[i].size()) == T.m_max + 1, "cup_xi degree count");
                need(mat_ok(T.cup_xi_m[i][d], T.dim(i, d), T.dim(i, d - 1)), "cup_xi shape");
            }
        }
    if (T.has_cup_an) {
        need(int(T.cup_an_m.size()) == T.m_max + 1, "cup_an degree count");
        for (int d = 1; d <= T.m_max; ++d)
            need(mat_ok(T.cup_an_m[d], T.dim(T.n, d), T.dim(T.n, d - 1)), "cup_an shape");
    }
    need(int(T.a_class.size()) == std::max(T.n, 0), "a_class count");
    for (int i = 0; i <= T.n - 1; ++i)
        need(int(T.a_class[i].size()) == T.dim(i, 1), "a_class length");
    need(int(T.xi_class.size()) == T.n + 1, "xi_class count");
    for (int i = 0; i <= T.n; ++i)
        need(int(T.xi_class[i].size()) == T.dim(i, 1), "xi_class length");
    if (T.an_class) need(int(T.an_class->size()) == T.dim(T.n, 1), "an_class length");
}

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string detail;  // first failing sub-check and witness, empty when passing
};

struct ValidationReport {
    bool strict = false;
    std::vector<CheckResult> checks;
    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }
};

inline std::string vec_to_string(const Vec& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(v[i]);
    }
    return s + "]";
}

// a vector in exactly one of the two subspaces, if any
inline std::optional<Vec> subspace_mismatch_witness(const Subspace& x, const Subspace& y) {
    for (const auto& b : x.basis())
        if (!y.contains(b)) return b;
    for (const auto& b : y.basis())
        if (!x.contains(b)) return b;
    return std::nullopt;
}

namespace detail {

struct CheckCollector {
    CheckResult res;
    explicit CheckCollector(std::string name) { res.name = std::move(name); }
    void fail(const std::string& what) {
        if (res.pass) {
            res.pass = false;
            res.detail = what;
        }
    }
    void expect(bool ok, const std::string& what) {
        if (!ok) fail(what);
    }
    void expect_equal(const Subspace& a, const Subspace& b, const std::string& where) {
        if (a == b) return;
        auto w = subspace_mismatch_witness(a, b);
        fail(where + (w ? " witness=" + vec_to_string(*w) : ""));
    }
};

}  // namespace detail

inline ValidationReport validate_axioms(const Tower& T, bool strict = false) {
    ValidationReport rep;
    rep.strict = strict;

    detail::CheckCollector shape("shape");
    try {
        check_shape(T);
    } catch (const error& e) {
        shape.fail(e.what());
    }
    rep.checks.push_back(shape.res);
    if (!shape.res.pass) return rep;

    auto pos = [&](int i, int d) {
        return " at level=" + std::to_string(i) + " degree=" + std::to_string(d);
    };

    detail::CheckCollector order("order");
    for (int i = 0; i <= T.n; ++i) {
        uint64_t pi = checked_pow(uint64_t(T.p), i, uint64_t(1) << 24);
        for (int d = 1; d <= T.m_max; ++d)
            order.expect(T.sigma(i, d).pow(pi) == Mat::identity(T.p, T.dim(i, d)),
                         "sigma^(p^level) != identity" + pos(i, d));
    }
    rep.checks.push_back(order.res);

    detail::CheckCollector equi("equivariance");
    for (int d = 1; d <= T.m_max; ++d)
        for (int i = 0; i <= T.n; ++i) {
            if (i < T.n)
                equi.expect(T.iota(i, d) * T.sigma(i, d) == T.sigma(i + 1, d) * T.iota(i, d),
                            "iota does not intertwine sigma" + pos(i, d));
            if (i >= 1)
                equi.expect(T.norm(i, d) * T.sigma(i, d) == T.sigma(i - 1, d) * T.norm(i, d),
                            "norm does not intertwine sigma" + pos(i, d));
            if (i <= T.n - 1)
                equi.expect(T.cup_a(i, d) * T.sigma(i, d - 1) == T.sigma(i, d) * T.cup_a(i, d),
                            "cup_a does not intertwine sigma" + pos(i, d));
        }
    rep.checks.push_back(equi.res);

    detail::CheckCollector fixedness("class_fixedness");
    for (int i = 0; i <= T.n; ++i) {
        if (i <= T.n - 1)
            fixedness.expect(T.sigma(i, 1).apply(T.a_class[i]) == T.a_class[i],
                             "a_class not fixed at level " + std::to_string(i));
        fixedness.expect(T.sigma(i, 1).apply(T.xi_class[i]) == T.xi_class[i],
                         "xi_class not fixed at level " + std::to_string(i));
    }
    rep.checks.push_back(fixedness.res);

    detail::CheckCollector ncomp("norm_compatibility");
    for (int i = 0; i <= T.n - 1; ++i)
        for (int j = 0; j < i; ++j)
            ncomp.expect(T.norm_chain(i, j, 1).apply(T.a_class[i]) == T.a_class[j],
                         "norm chain does not send a_class[" + std::to_string(i) + "] to a_class[" +
                             std::to_string(j) + "]");
    rep.checks.push_back(ncomp.res);

    detail::CheckCollector kummer("kummer_exactness");
    for (int i = 0; i <= T.n - 1; ++i)
        for (int d = 1; d <= T.m_max; ++d) {
            // At d = 1 the first equation lives in the implicit degree-0 line;
            // with no degree-1 space the cup map out of it carries nothing, so
            // the equation is vacuous (an all-zero tower must validate).
            if (d > 1 || T.dim(i, 1) > 0)
                kummer.expect_equal(Subspace::column_space(T.norm(i + 1, d - 1)),
                                    Subspace::kernel_of_matrix(T.cup_a(i, d)),
                                    "image(norm) != kernel(cup_a)" + pos(i, d));
            kummer.expect_equal(Subspace::column_space(T.cup_a(i, d)),
                                Subspace::kernel_of_matrix(T.iota(i, d)),
                                "image(cup_a) != kernel(iota)" + pos(i, d));
        }
    rep.checks.push_back(kummer.res);

    detail::CheckCollector proj("projection_compatibility");
    for (int d = 1; d <= T.m_max; ++d) {
        for (int i = 0; i + 1 <= T.n - 1; ++i)
            proj.expect(T.norm(i + 1, d) * T.cup_a(i + 1, d) * T.iota(i, d - 1) == T.cup_a(i, d),
                        "norm(cup_a(iota)) != cup_a" + pos(i, d));
        if (T.has_cup_an && T.n >= 1)
            proj.expect(T.norm(T.n, d) * T.cup_an(d) * T.iota(T.n - 1, d - 1) ==
                            T.cup_a(T.n - 1, d).scaled(T.t),
                        "norm(cup_an(iota)) != t*cup_a" + pos(T.n - 1, d));
    }
    rep.checks.push_back(proj.res);

    detail::CheckCollector npow("norm_as_power");
    for (int d = 1; d <= T.m_max; ++d)
        for (int i = 1; i <= T.n; ++i) {
            uint64_t pi = checked_pow(uint64_t(T.p), i, uint64_t(1) << 24);
            for (int j = 0; j < i; ++j) {
                uint64_t pj = checked_pow(uint64_t(T.p), j, uint64_t(1) << 24);
                Mat lhs = T.iota_chain(j, i, d) * T.norm_chain(i, j, d);
                Mat rhs = (T.sigma(i, d) - Mat::identity(T.p, T.dim(i, d))).pow(pi - pj);
                npow.expect(lhs == rhs, "iota(norm) != (sigma-1)^(p^i-p^j)" + pos(i, d) +
                                            " target level " + std::to_string(j));
            }
        }
    rep.checks.push_back(npow.res);

    if (strict) {
        detail::CheckCollector opt("optional_data_present");
        opt.expect(T.has_cup_xi, "cup_xi missing");
        opt.expect(T.has_cup_an, "cup_an missing");
        opt.expect(T.an_class.has_value(), "an_class missing");
        rep.checks.push_back(opt.res);

        detail::CheckCollector lms("lms_sequence");
        if (T.n >= 1) {
            uint64_t pn1 = checked_pow(uint64_t(T.p), T.n - 1, uint64_t(1) << 24);
            for (int d = 1; d <= T.m_max; ++d) {
                Mat sub_fix = T.sigma(T.n, d).pow(pn1) - Mat::identity(T.p, T.dim(T.n, d));
                Subspace lhs = intersect(Subspace::kernel_of_matrix(T.norm(T.n, d)),
                                         Subspace::kernel_of_matrix(sub_fix));
                lms.expect_equal(lhs, Subspace::column_space(T.iota(T.n - 1, d)),
                                 "kernel(norm)^H != image(iota)" + pos(T.n, d));
            }
        }
        rep.checks.push_back(lms.res);
    }

    return rep;
}

struct ExceptionalReport {
    Vec candidate;             // element of k[n][1]
    std::optional<int> index;  // nullopt encodes -infinity
    bool embeddable = false;   // index == -infinity
    int t = 1;
};

// Scan k[n][1] for classes whose full norm is nonzero at the bottom but dies
// under restriction back up, take the one of minimum index. Enumeration order:
// candidate #k has j-th coordinate = j-th base-p digit of k (least significant
// digit first), so the scan is deterministic.
inline ExceptionalReport compute_exceptional(const Tower& T, uint64_t cap = 100000) {
    check_shape(T);
    if (T.n < 1) throw error("compute_exceptional needs a tower of height >= 1");
    const int D = T.dim(T.n, 1);
    uint64_t total = 1;
    for (int j = 0; j < D; ++j) {
        if (total > cap / uint64_t(T.p)) throw error("exceptional search exceeds enumeration cap");
        total *= uint64_t(T.p);
    }
    Mat norm_to_0 = T.norm_chain(T.n, 0, 1);
    Mat iota_back = T.iota_chain(0, T.n, 1);
    Mat composite = iota_back * norm_to_0;
    Mat theta = T.sigma(T.n, 1) - Mat::identity(T.p, D);
    Mat norm_to_prev = T.norm_chain(T.n, T.n - 1, 1);
    std::vector<Subspace> images;
    for (int i = 0; i <= T.n - 1; ++i)
        images.push_back(Subspace::column_space(T.iota_chain(i, T.n, 1)));

    const int kNoCandidate = T.n + 1;
    int best = kNoCandidate;  // -1 encodes -infinity
    std::optional<ExceptionalReport> found;
    for (uint64_t k = 0; k < total; ++k) {
        Vec a(D);
        uint64_t rest = k;
        for (int j = 0; j < D; ++j) {
            a[j] = int32_t(rest % uint64_t(T.p));
            rest /= uint64_t(T.p);
        }
        if (is_zero_vec(norm_to_0.apply(a))) continue;
        if (!is_zero_vec(composite.apply(a))) continue;
        Vec ta = theta.apply(a);
        int idx;
        if (is_zero_vec(ta)) {
            idx = -1;
        } else {
            idx = kNoCandidate;
            for (int i = 0; i <= T.n - 1; ++i)
                if (images[i].contains(ta)) { idx = i; break; }
            if (idx == kNoCandidate)
                throw check_failure("exceptional_index",
                                    "candidate " + vec_to_string(a) + " has index above n-1");
        }
        if (idx > best || (idx == best && found)) continue;
        // solve t * norm(a) = a_class[n-1]
        Vec na = norm_to_prev.apply(a);
        std::optional<int> tv;
        const Vec& target = T.a_class[T.n - 1];
        if (is_zero_vec(na)) {
            if (is_zero_vec(target)) tv = 1;
        } else {
            for (int s = 1; s < T.p; ++s) {
                bool ok = true;
                for (size_t c = 0; c < na.size(); ++c)
                    if (int64_t(s) * na[c] % T.p != target[c]) { ok = false; break; }
                if (ok) { tv = s; break; }
            }
        }
        if (idx < best) {
            best = idx;
            found.reset();
        }
        if (!tv) continue;  // keep scanning this index class for a candidate with a valid t
        ExceptionalReport r;
        r.candidate = a;
        r.index = (idx == -1) ? std::optional<int>() : std::optional<int>(idx);
        r.embeddable = (idx == -1);
        r.t = *tv;
        found = r;
    }
    if (best == kNoCandidate)
        throw check_failure("exceptional_candidate", "no norm-exceptional class exists");
    if (!found)
        throw check_failure("exceptional_scalar",
                            "no minimum-index candidate admits a valid scalar t");
    return *found;
}

namespace detail {

inline Mat block_diag(const Mat& a, const Mat& b) {
    Mat r(a.modulus(), a.rows() + b.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) r(a.rows() + i, a.cols() + j) = b(i, j);
    return r;
}

}  // namespace detail

// Blockwise direct sum. Maps with a degree-0 source cannot be block-diagonal
// (degree-0 spaces stay one-dimensional), so the two cup columns are stacked;
// for nonzero summands this genuinely breaks Kummer exactness at degree 1,
// which is why the re-validation report travels with the result.
inline std::pair<Tower, ValidationReport> tower_direct_sum(const Tower& A, const Tower& B) {
    check_shape(A);
    check_shape(B);
    if (A.p != B.p || A.n != B.n || A.m_max != B.m_max)
        throw error("tower_direct_sum requires matching (p, n, m_max)");
    Tower S;
    S.p = A.p;
    S.n = A.n;
    S.m_max = A.m_max;
    S.t = A.t;
    auto level_sized = [&](int levels) {
        return std::vector<std::vector<Mat>>(size_t(levels), std::vector<Mat>(size_t(S.m_max) + 1));
    };
    S.dims.assign(size_t(S.n) + 1, std::vector<int>(size_t(S.m_max) + 1, 1));
    S.sigma_m = level_sized(S.n + 1);
    S.iota_m = level_sized(std::max(S.n, 0));
    S.norm_m = level_sized(S.n + 1);
    S.cup_a_m = level_sized(S.n);
    S.has_cup_xi = A.has_cup_xi && B.has_cup_xi;
    if (S.has_cup_xi) S.cup_xi_m = level_sized(S.n + 1);
    S.has_cup_an =
        A.has_cup_an && B.has_cup_an && A.an_class.has_value() && B.an_class.has_value();
    if (S.has_cup_an) S.cup_an_m.resize(size_t(S.m_max) + 1);

    auto join = [&](const Mat& x, const Mat& y, int source_degree) {
        return source_degree == 0 ? vstack({x, y}) : detail::block_diag(x, y);
    };
    for (int i = 0; i <= S.n; ++i)
        for (int d = 1; d <= S.m_max; ++d) {
            S.dims[i][d] = A.dim(i, d) + B.dim(i, d);
            S.sigma_m[i][d] = detail::block_diag(A.sigma(i, d), B.sigma(i, d));
            if (i < S.n) S.iota_m[i][d] = detail::block_diag(A.iota(i, d), B.iota(i, d));
            if (i >= 1) S.norm_m[i][d] = detail::block_diag(A.norm(i, d), B.norm(i, d));
            if (i <= S.n - 1) S.cup_a_m[i][d] = join(A.cup_a(i, d), B.cup_a(i, d), d - 1);
            if (S.has_cup_xi) S.cup_xi_m[i][d] = join(A.cup_xi(i, d), B.cup_xi(i, d), d - 1);
        }
    if (S.has_cup_an)
        for (int d = 1; d <= S.m_max; ++d)
            S.cup_an_m[d] = join(A.cup_an(d), B.cup_an(d), d - 1);

    // The classes stack like the cup columns do, so cup_a(i,1) keeps sending
    // the degree-0 generator to a_class[i] in the summed space.
    for (int i = 0; i <= S.n - 1; ++i)
        S.a_class.push_back(concat({A.a_class[i], B.a_class[i]}));
    for (int i = 0; i <= S.n; ++i)
        S.xi_class.push_back(concat({A.xi_class[i], B.xi_class[i]}));
    if (S.has_cup_an) S.an_class = concat({*A.an_class, *B.an_class});

    bool strict = S.has_cup_xi && S.has_cup_an && S.an_class.has_value();
    return {S, validate_axioms(S, strict)};
}

inline Tower zero_tower(int p, int n, int m_max) {
    Tower T;
    T.p = p;
    T.n = n;
    T.m_max = m_max;
    T.dims.assign(size_t(n) + 1, std::vector<int>(size_t(m_max) + 1, 0));
    for (auto& row : T.dims) row[0] = 1;
    auto levels = [&](int count) {
        return std::vector<std::vector<Mat>>(size_t(count), std::vector<Mat>(size_t(m_max) + 1));
    };
    T.sigma_m = levels(n + 1);
    T.iota_m = levels(std::max(n, 0));
    T.norm_m = levels(n + 1);
    T.cup_a_m = levels(n);
    T.has_cup_xi = true;
    T.cup_xi_m = levels(n + 1);
    T.has_cup_an = true;
    T.cup_an_m.resize(size_t(m_max) + 1);
    for (int i = 0; i <= n; ++i)
        for (int d = 1; d <= m_max; ++d) {
            T.sigma_m[i][d] = Mat::zero(p, 0, 0);
            if (i < n) T.iota_m[i][d] = Mat::zero(p, 0, 0);
            if (i >= 1) T.norm_m[i][d] = Mat::zero(p, 0, 0);
            if (i <= n - 1) T.cup_a_m[i][d] = Mat::zero(p, 0, d == 1 ? 1 : 0);
            T.cup_xi_m[i][d] = Mat::zero(p, 0, d == 1 ? 1 : 0);
        }
    for (int d = 1; d <= m_max; ++d) T.cup_an_m[d] = Mat::zero(p, 0, d == 1 ? 1 : 0);
    T.a_class.assign(size_t(std::max(n, 0)), Vec{});
    T.xi_class.assign(size_t(n) + 1, Vec{});
    T.an_class = Vec{};
    return T;
}

}  // namespace gmodk
