#pragma once

// Exactly computable towers from tame local fields F_q((t)) with p | q - 1.
// Classes in k_1 are (valuation mod p, Teichmueller exponent mod p) pairs over
// a fixed generator of the residue field's unit group; k_2 is one-dimensional
// via the tame symbol; degrees >= 3 vanish (mod-p Milnor K-theory of a local
// field with residue characteristic != p is zero above degree 2, see e.g.
// Fesenko-Vostokov, "Local Fields and Their Extensions", ch. IX).
//
// Two tower styles:
//   totally_ramified: E_i = F(t^(1/p^i)), residue field F_q throughout,
//     basis {[s_i], [u]} with s_i the level-i uniformizer, u a fixed non-power
//     unit. Requires p^n | q - 1.
//   unramified: E_i = F_(q^(p^i))((t)), basis {[t], [u_i]} with norm-compatible
//     unit generators u_i. Requires p | q - 1 only.
//
// All matrix entries are exponent arithmetic on (q, p); no choice of generator
// affects them, so prime powers q need no explicit generator search.

#include "ktower.hpp"

namespace gmodk {

enum class TowerStyle { totally_ramified, unramified };

inline const char* style_name(TowerStyle s) {
    return s == TowerStyle::totally_ramified ? "totally_ramified" : "unramified";
}

inline std::optional<TowerStyle> style_from_name(const std::string& s) {
    if (s == "totally_ramified" || s == "ramified") return TowerStyle::totally_ramified;
    if (s == "unramified") return TowerStyle::unramified;
    return std::nullopt;
}

struct LocalFieldSpec {
    int p = 3;
    int64_t q = 7;
    int n = 1;
    int m_max = 2;
    TowerStyle style = TowerStyle::totally_ramified;
};

// smallest prime factor, q >= 2
inline int64_t smallest_prime_factor(int64_t q) {
    for (int64_t r = 2; r * r <= q; ++r)
        if (q % r == 0) return r;
    return q;
}

inline bool is_prime_power(int64_t q, int64_t* base = nullptr) {
    if (q < 2) return false;
    int64_t r = smallest_prime_factor(q);
    int64_t rest = q;
    while (rest % r == 0) rest /= r;
    if (base) *base = r;
    return rest == 1;
}

inline uint64_t modpow(uint64_t base, uint64_t exp, uint64_t mod) {
    if (mod == 0) throw internal_error("modpow by zero modulus");
    uint64_t acc = 1 % mod;
    base %= mod;
    while (exp) {
        if (exp & 1) acc = acc * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return acc;
}

inline void validate_spec(const LocalFieldSpec& s) {
    require_modulus(s.p);
    if (s.q < 2 || s.q >= (int64_t(1) << 31)) throw error("q out of range [2, 2^31)");
    if (!is_prime_power(s.q)) throw error("q = " + std::to_string(s.q) + " is not a prime power");
    if (s.q % s.p == 0) throw error("residue characteristic p is out of scope");
    if ((s.q - 1) % s.p != 0) throw error("q must be 1 mod p");
    if (s.n < 1) throw error("tower height n must be >= 1");
    if (s.m_max < 1 || s.m_max > 2) throw error("unsupported m_max (must be 1 or 2)");
    if (s.style == TowerStyle::totally_ramified) {
        int64_t pn = 1;
        for (int i = 0; i < s.n; ++i) pn *= s.p;
        if ((s.q - 1) % pn != 0)
            throw error("totally ramified style needs p^n | q-1");
    }
}

// Smallest generator of (Z/q)^x. Only prime q has a plain residue search;
// the tower matrices never depend on the choice, so prime powers go without.
inline int64_t find_unit_generator(int64_t q) {
    int64_t base = 0;
    if (!is_prime_power(q, &base) || base != q)
        throw error("unit generator search supports prime q only");
    int64_t m = q - 1;
    std::vector<int64_t> primes;
    int64_t rest = m;
    for (int64_t r = 2; r * r <= rest; ++r)
        if (rest % r == 0) {
            primes.push_back(r);
            while (rest % r == 0) rest /= r;
        }
    if (rest > 1) primes.push_back(rest);
    for (int64_t g = 2; g < q; ++g) {
        bool ok = true;
        for (int64_t r : primes)
            if (modpow(uint64_t(g), uint64_t(m / r), uint64_t(q)) == 1) { ok = false; break; }
        if (ok) return g;
    }
    throw internal_error("no generator found for prime q");
}

// class in k_1: valuation and unit exponent, both mod p
struct K1Class {
    int v = 0;
    int u = 0;
    bool operator==(const K1Class&) const = default;
};

inline K1Class k1_reduce(int64_t valuation, int64_t teich_exponent, const LocalFieldSpec& spec,
                         int level) {
    if (level < 0 || level > spec.n) throw error("k1_reduce level out of range");
    auto red = [&](int64_t x) { return int(((x % spec.p) + spec.p) % spec.p); };
    return K1Class{red(valuation), red(teich_exponent)};
}

// exact class: Teichmueller exponent as an integer (mod residue unit order),
// the form tame_symbol needs before reduction
struct K1Exact {
    int64_t v = 0;
    int64_t e = 0;
};

// Residue of (-1)^(v(a)v(b)) a^v(b) b^(-v(a)) as an exponent of the fixed
// generator, reduced mod p. minus_one_exponent is the discrete log of -1 in
// the residue field (0 in characteristic 2).
inline int tame_symbol(int p, const K1Exact& a, const K1Exact& b, int64_t minus_one_exponent) {
    int64_t exact = minus_one_exponent % p * (a.v % p) % p * (b.v % p) + a.e % p * (b.v % p) -
                    b.e % p * (a.v % p);
    return int(((exact % p) + p) % p);
}

namespace detail {

// ((q^(p^level) - 1) / k) mod p for k in {2, p}; q^(p^level) mod 2p resp. p^2
// is enough, so the huge power is never materialized
inline int divided_unit_order_mod_p(int64_t q, int p, int level, int k) {
    uint64_t mod = (k == 2) ? 2 * uint64_t(p) : uint64_t(p) * uint64_t(p);
    uint64_t exp = 1;
    for (int i = 0; i < level; ++i) exp *= uint64_t(p);
    uint64_t r = modpow(uint64_t(q % int64_t(mod)), exp, mod);
    uint64_t x = (r + mod - 1) % mod;  // q^m - 1 mod (k*p)
    if (x % uint64_t(k) != 0) throw internal_error("unit order not divisible as expected");
    return int((x / uint64_t(k)) % uint64_t(p));
}

}  // namespace detail

inline Tower generate_tower(const LocalFieldSpec& spec) {
    validate_spec(spec);
    const int p = spec.p;
    const int n = spec.n;
    const int m = spec.m_max;
    const bool ramified = spec.style == TowerStyle::totally_ramified;

    Tower T;
    T.p = p;
    T.n = n;
    T.m_max = m;
    T.t = 1;
    T.dims.assign(size_t(n) + 1, std::vector<int>(size_t(m) + 1, 1));
    auto levels = [&](int count) {
        return std::vector<std::vector<Mat>>(size_t(count), std::vector<Mat>(size_t(m) + 1));
    };
    T.sigma_m = levels(n + 1);
    T.iota_m = levels(n);
    T.norm_m = levels(n + 1);
    T.cup_a_m = levels(n);
    T.has_cup_xi = true;
    T.cup_xi_m = levels(n + 1);
    T.has_cup_an = true;
    T.cup_an_m.resize(size_t(m) + 1);

    auto mat2 = [&](int a, int b, int c, int d) {
        Mat r(p, 2, 2);
        r(0, 0) = a; r(0, 1) = b; r(1, 0) = c; r(1, 1) = d;
        return r;
    };
    auto col2 = [&](const K1Class& x) {
        Mat r(p, 2, 1);
        r(0, 0) = x.v; r(1, 0) = x.u;
        return r;
    };
    // row of cup-with-c against the k_1 basis {uniformizer, unit}, with the
    // symbol evaluated in the level's residue field
    auto cup_row = [&](const K1Exact& c, int level) {
        int64_t half = detail::divided_unit_order_mod_p(spec.q, p, ramified ? 0 : level, 2);
        int vs = tame_symbol(p, c, K1Exact{1, 0}, half);
        int vu = tame_symbol(p, c, K1Exact{0, 1}, half);
        // the symbol must be alternating and antisymmetric on these inputs
        if (tame_symbol(p, c, c, half) != 0)
            throw internal_error("tame symbol not alternating");
        if ((vs + tame_symbol(p, K1Exact{1, 0}, c, half)) % p != 0 ||
            (vu + tame_symbol(p, K1Exact{0, 1}, c, half)) % p != 0)
            throw internal_error("tame symbol not antisymmetric");
        Mat r(p, 1, 2);
        r(0, 0) = vs;
        r(0, 1) = vu;
        return r;
    };

    for (int i = 0; i <= n; ++i)
        for (int d = 1; d <= m; ++d) T.dims[i][d] = (d == 1) ? 2 : 1;

    if (ramified) {
        // c_i = ((q-1)/p^i) mod p, the unit shift sigma puts on [s_i]
        std::vector<int> c(size_t(n) + 1, 0);
        int64_t div = 1;
        for (int i = 0; i <= n; ++i) {
            if ((spec.q - 1) % div != 0) throw internal_error("ramified divisibility hole");
            c[i] = int(((spec.q - 1) / div) % p);
            div *= p;
        }
        const int w = detail::divided_unit_order_mod_p(spec.q, p, 0, p);
        const K1Class s{1, 0}, xi{0, w};
        const K1Exact s_exact{1, 0}, xi_exact{0, w};
        for (int i = 0; i <= n; ++i) {
            T.sigma_m[i][1] = mat2(1, 0, c[i], 1);
            if (m >= 2) T.sigma_m[i][2] = Mat::identity(p, 1);
            if (i < n) {
                T.iota_m[i][1] = mat2(0, 0, 0, 1);
                if (m >= 2) T.iota_m[i][2] = Mat::zero(p, 1, 1);
                T.cup_a_m[i][1] = col2(s);
                if (m >= 2) T.cup_a_m[i][2] = cup_row(s_exact, i);
                T.a_class.push_back(Vec{s.v, s.u});
            }
            if (i >= 1) {
                T.norm_m[i][1] = mat2(1, 0, 0, 0);
                if (m >= 2) T.norm_m[i][2] = Mat::identity(p, 1);
            }
            T.cup_xi_m[i][1] = col2(xi);
            if (m >= 2) T.cup_xi_m[i][2] = cup_row(xi_exact, i);
            T.xi_class.push_back(Vec{xi.v, xi.u});
        }
        T.cup_an_m[1] = col2(s);
        if (m >= 2) T.cup_an_m[2] = cup_row(s_exact, n);
        T.an_class = Vec{s.v, s.u};
    } else {
        const K1Class a{0, 1};
        const K1Exact a_exact{0, 1};
        for (int i = 0; i <= n; ++i) {
            T.sigma_m[i][1] = Mat::identity(p, 2);
            if (m >= 2) T.sigma_m[i][2] = Mat::identity(p, 1);
            if (i < n) {
                T.iota_m[i][1] = mat2(1, 0, 0, 0);
                if (m >= 2) T.iota_m[i][2] = Mat::zero(p, 1, 1);
                T.cup_a_m[i][1] = col2(a);
                if (m >= 2) T.cup_a_m[i][2] = cup_row(a_exact, i);
                T.a_class.push_back(Vec{a.v, a.u});
            }
            if (i >= 1) {
                T.norm_m[i][1] = mat2(0, 0, 0, 1);
                if (m >= 2) T.norm_m[i][2] = Mat::identity(p, 1);
            }
            const int wi = detail::divided_unit_order_mod_p(spec.q, p, i, p);
            const K1Class xi{0, wi};
            T.cup_xi_m[i][1] = col2(xi);
            if (m >= 2) T.cup_xi_m[i][2] = cup_row(K1Exact{0, wi}, i);
            T.xi_class.push_back(Vec{xi.v, xi.u});
        }
        T.cup_an_m[1] = col2(a);
        if (m >= 2) T.cup_an_m[2] = cup_row(a_exact, n);
        T.an_class = Vec{a.v, a.u};
    }

    auto rep = validate_axioms(T, true);
    if (!rep.all_pass()) {
        std::string bad;
        for (const auto& ck : rep.checks)
            if (!ck.pass) bad += " " + ck.name + " (" + ck.detail + ")";
        throw internal_error("generated tower fails its own validation:" + bad);
    }
    return T;
}

}  // namespace gmodk
