#pragma once

// Modules over F_p[G] for G cyclic of order p^n, presented by the matrix of a
// generator sigma. Everything reduces to the nilpotent operator
// theta = sigma - 1: a cyclic summand of dimension d is a Jordan block of
// theta of size d, and d is the "length" of its generator.

#include "fpla.hpp"

namespace gmodk {

struct GModule {
    int p = 3;
    int n = 0;
    int dim = 0;
    uint64_t order = 1;  // p^n
    Mat sigma;
    Mat theta;           // sigma - identity
};

inline uint64_t checked_pow(uint64_t base, int exp, uint64_t limit) {
    uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > limit / base) throw error("group order p^n exceeds supported bound");
        r *= base;
    }
    return r;
}

inline GModule make_module(int p, int n, const Mat& sigma) {
    require_modulus(p);
    if (n < 0) throw error("negative n");
    if (sigma.modulus() != p) throw error("sigma modulus differs from p");
    if (sigma.rows() != sigma.cols()) throw error("sigma must be square");
    GModule m;
    m.p = p;
    m.n = n;
    m.dim = sigma.rows();
    m.order = checked_pow(uint64_t(p), n, uint64_t(1) << 24);
    m.sigma = sigma;
    m.theta = sigma - Mat::identity(p, m.dim);
    if (rank_of(sigma) != m.dim) throw error("sigma is not invertible");
    if (sigma.pow(m.order) != Mat::identity(p, m.dim))
        throw error("sigma^(p^n) is not the identity");
    if (!m.theta.pow(m.order).is_zero())
        throw error("(sigma-1)^(p^n) is not zero");  // equivalent to the order check; both verified
    return m;
}

// theta^0 .. theta^(p^n), computed incrementally
inline std::vector<Mat> theta_powers(const GModule& m) {
    std::vector<Mat> tp;
    tp.push_back(Mat::identity(m.p, m.dim));
    for (uint64_t k = 1; k <= m.order; ++k) tp.push_back(tp.back() * m.theta);
    return tp;
}

// minimal l >= 0 with theta^l w = 0
inline int length(const GModule& m, const Vec& w) {
    if (int(w.size()) != m.dim) throw error("vector length mismatch in length()");
    Vec v = w;
    for (auto& x : v) x = int32_t(((x % m.p) + m.p) % m.p);
    int l = 0;
    while (!is_zero_vec(v)) {
        v = m.theta.apply(v);
        if (uint64_t(++l) > m.order) throw internal_error("length exceeded the group order");
    }
    return l;
}

inline Subspace fixed_subspace(const GModule& m) {
    return Subspace::kernel_of_matrix(m.theta);
}

// F_p[G]-submodule generated by the given vectors
inline Subspace submodule_span(const GModule& m, const std::vector<Vec>& gens) {
    std::vector<Vec> all;
    for (const auto& g : gens) {
        Vec v = g;
        for (auto& x : v) x = int32_t(((x % m.p) + m.p) % m.p);
        while (!is_zero_vec(v)) {
            all.push_back(v);
            v = m.theta.apply(v);
        }
    }
    return Subspace::span_of(m.p, m.dim, all);
}

// V_i = image(theta^(i-1)) /\ kernel(theta) for i = 1..p^n (index 0 <-> V_1).
// V_1 is the fixed subspace and the chain decreases.
inline std::vector<Subspace> v_filtration(const GModule& m) {
    std::vector<Mat> tp = theta_powers(m);
    Subspace fixed = fixed_subspace(m);
    std::vector<Subspace> v;
    for (uint64_t i = 1; i <= m.order; ++i)
        v.push_back(intersect(Subspace::column_space(tp[size_t(i - 1)]), fixed));
    for (size_t i = 1; i < v.size(); ++i)
        if (!v[i - 1].contains(v[i])) throw internal_error("v_filtration is not decreasing");
    return v;
}

struct Decomposition {
    std::vector<std::pair<Vec, int>> generators;  // (generator, cyclic dimension)
    std::map<int, int> multiplicities;            // cyclic dimension -> count (zeros omitted)
};

// Jordan-type multiplicity count straight from ranks:
//   count(d) = rank(theta^(d-1)) - 2 rank(theta^d) + rank(theta^(d+1)).
inline std::map<int, int> multiplicities_oracle(const GModule& m) {
    std::vector<Mat> tp = theta_powers(m);
    std::vector<int> rk(size_t(m.order) + 2, 0);
    for (uint64_t k = 0; k <= m.order; ++k) rk[size_t(k)] = rank_of(tp[size_t(k)]);
    rk[size_t(m.order) + 1] = 0;  // theta^(p^n) is already zero
    std::map<int, int> counts;
    for (uint64_t d = 1; d <= m.order; ++d) {
        int c = rk[size_t(d - 1)] - 2 * rk[size_t(d)] + rk[size_t(d + 1)];
        if (c < 0) throw internal_error("negative multiplicity from rank identity");
        if (c > 0) counts[int(d)] = c;
    }
    return counts;
}

// Module independence test via fixed parts: submodules U_1..U_k are jointly
// independent iff their fixed parts are. Returns the fixed-part answer and
// cross-checks it against the full dimension count.
inline bool exclusion_check(const GModule& m, const std::vector<std::vector<Vec>>& submodule_gens) {
    Subspace fixed = fixed_subspace(m);
    int fix_total = 0, full_total = 0;
    Subspace fix_sum = Subspace::zero(m.p, m.dim), full_sum = Subspace::zero(m.p, m.dim);
    for (const auto& gens : submodule_gens) {
        Subspace u = submodule_span(m, gens);
        Subspace f = intersect(u, fixed);
        fix_total += f.dim();
        full_total += u.dim();
        fix_sum = sum(fix_sum, f);
        full_sum = sum(full_sum, u);
    }
    bool fixed_independent = fix_sum.dim() == fix_total;
    bool fully_independent = full_sum.dim() == full_total;
    if (fixed_independent != fully_independent)
        throw internal_error("fixed-part independence disagrees with module independence");
    return fixed_independent;
}

// Decomposition into cyclic summands: walk the filtration from the top, pick a
// deterministic complement I_k of V_(k+1) inside V_k, and lift each basis
// vector x through theta^(k-1) to a generator of an A_k summand.
inline Decomposition decompose(const GModule& m) {
    std::vector<Mat> tp = theta_powers(m);
    std::vector<Subspace> v = v_filtration(m);
    Decomposition d;
    std::vector<std::vector<Vec>> singletons;
    int dim_total = 0;
    for (uint64_t k = m.order; k >= 1; --k) {
        const Subspace& vk = v[size_t(k - 1)];
        Subspace vnext = (k == m.order) ? Subspace::zero(m.p, m.dim) : v[size_t(k)];
        Subspace comp = complement_within(vnext, vk);
        for (const auto& x : comp.basis()) {
            std::optional<Vec> alpha = solve(tp[size_t(k - 1)], x);
            if (!alpha) throw internal_error("filtration vector not in the expected theta image");
            if (length(m, *alpha) != int(k)) throw internal_error("decompose generator has wrong length");
            d.generators.emplace_back(*alpha, int(k));
            d.multiplicities[int(k)] += 1;
            singletons.push_back({*alpha});
            dim_total += int(k);
        }
    }
    if (dim_total != m.dim) throw internal_error("cyclic dimensions do not sum to dim");
    if (!exclusion_check(m, singletons)) throw internal_error("decompose produced a non-direct sum");
    return d;
}

// Sum over the subgroup of order p^(i-j) acting through sigma^(p^j) equals
// theta^(p^i - p^j); a polynomial identity in F_p[x], so it must hold on any
// valid module. Verified literally.
inline bool verify_operator_identities(const GModule& m, int i, int j) {
    if (j < 0 || i < j || i > m.n) throw error("operator identity indices out of range");
    uint64_t pi = checked_pow(uint64_t(m.p), i, uint64_t(1) << 24);
    uint64_t pj = checked_pow(uint64_t(m.p), j, uint64_t(1) << 24);
    Mat step = m.sigma.pow(pj);
    Mat acc = Mat::zero(m.p, m.dim, m.dim), cur = Mat::identity(m.p, m.dim);
    for (uint64_t k = 0; k < pi / pj; ++k) {
        acc = acc + cur;
        cur = cur * step;
    }
    return acc == m.theta.pow(pi - pj);
}

}  // namespace gmodk
