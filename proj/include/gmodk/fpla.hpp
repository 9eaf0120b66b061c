#pragma once

// Exact linear algebra over F_p, p an odd prime small enough for machine ints
// (p < 2^15, so entry products fit comfortably in int64 accumulators).
//
// Conventions used throughout the library:
//  * matrices act on column vectors: w' = M * w, so M has (target dim) rows
//    and (source dim) cols;
//  * Subspace keeps its basis as the nonzero rows of a reduced row-echelon
//    matrix, which is canonical: equal subspaces have identical bases, and
//    every complement / solve choice built on top of it is deterministic;
//  * all solvers return the particular solution with free variables = 0.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmodk {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tower/text-format problem; carries the 1-based line it was detected on.
struct parse_error : error {
    int line;
    parse_error(int line_, const std::string& what_)
        : error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

// A named check (axiom, theorem clause, proposition) did not hold.
struct check_failure : error {
    std::string clause;
    check_failure(const std::string& clause_, const std::string& what_)
        : error(clause_ + ": " + what_), clause(clause_) {}
};

// Violation of something the library itself guarantees; a bug, not bad input.
struct internal_error : error {
    using error::error;
};

using Vec = std::vector<int32_t>;

inline bool is_odd_prime(long long p) {
    if (p < 3 || p % 2 == 0) return false;
    for (long long d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

inline void require_modulus(int p) {
    if (!is_odd_prime(p) || p >= (1 << 15))
        throw error("modulus must be an odd prime below 2^15, got " + std::to_string(p));
}

inline int32_t inv_mod(int32_t a, int32_t p) {
    // extended Euclid; a must be nonzero mod p
    int32_t t = 0, nt = 1, r = p, nr = a % p;
    while (nr != 0) {
        int32_t q = r / nr;
        int32_t tmp = t - q * nt; t = nt; nt = tmp;
        tmp = r - q * nr; r = nr; nr = tmp;
    }
    if (r != 1) throw internal_error("inv_mod of non-unit " + std::to_string(a));
    return ((t % p) + p) % p;
}

class Mat {
public:
    Mat() : p_(3), rows_(0), cols_(0) {}
    Mat(int p, int rows, int cols) : p_(p), rows_(rows), cols_(cols), a_(size_t(rows) * cols, 0) {
        require_modulus(p);
        if (rows < 0 || cols < 0) throw error("negative matrix dimension");
    }

    static Mat identity(int p, int n) {
        Mat m(p, n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    static Mat zero(int p, int rows, int cols) { return Mat(p, rows, cols); }

    int modulus() const { return p_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    int32_t& operator()(int r, int c) { return a_[size_t(r) * cols_ + c]; }
    int32_t operator()(int r, int c) const { return a_[size_t(r) * cols_ + c]; }

    int32_t at(int r, int c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw error("matrix index out of range");
        return (*this)(r, c);
    }
    void set(int r, int c, int64_t v) {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw error("matrix index out of range");
        (*this)(r, c) = int32_t(((v % p_) + p_) % p_);
    }

    bool operator==(const Mat& o) const {
        return p_ == o.p_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }
    bool operator!=(const Mat& o) const { return !(*this == o); }

    Mat operator+(const Mat& o) const {
        check_same_shape(o);
        Mat r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = int32_t((a_[i] + o.a_[i]) % p_);
        return r;
    }
    Mat operator-(const Mat& o) const {
        check_same_shape(o);
        Mat r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = int32_t((a_[i] - o.a_[i] + p_) % p_);
        return r;
    }
    Mat operator*(const Mat& o) const {
        if (p_ != o.p_) throw error("modulus mismatch in matrix product");
        if (cols_ != o.rows_) throw error("shape mismatch in matrix product");
        Mat r(p_, rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                int64_t v = (*this)(i, k);
                if (v == 0) continue;
                for (int j = 0; j < o.cols_; ++j)
                    r(i, j) = int32_t((r(i, j) + v * o(k, j)) % p_);
            }
        return r;
    }

    Mat scaled(int64_t s) const {
        s = ((s % p_) + p_) % p_;
        Mat r = *this;
        for (auto& x : r.a_) x = int32_t((int64_t(x) * s) % p_);
        return r;
    }

    Vec apply(const Vec& w) const {
        if (int(w.size()) != cols_) throw error("vector length mismatch in apply");
        Vec r(rows_, 0);
        for (int i = 0; i < rows_; ++i) {
            int64_t acc = 0;
            for (int j = 0; j < cols_; ++j) acc += int64_t((*this)(i, j)) * w[j];
            r[i] = int32_t(acc % p_);
        }
        return r;
    }

    Mat pow(uint64_t e) const {
        if (rows_ != cols_) throw error("pow of non-square matrix");
        Mat acc = identity(p_, rows_), b = *this;
        while (e) {
            if (e & 1) acc = acc * b;
            b = b * b;
            e >>= 1;
        }
        return acc;
    }

    Mat transpose() const {
        Mat r(p_, cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    Vec row(int i) const {
        Vec r(cols_);
        for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
        return r;
    }
    Vec col(int j) const {
        Vec c(rows_);
        for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    bool is_zero() const {
        return std::all_of(a_.begin(), a_.end(), [](int32_t v) { return v == 0; });
    }

private:
    void check_same_shape(const Mat& o) const {
        if (p_ != o.p_ || rows_ != o.rows_ || cols_ != o.cols_)
            throw error("shape/modulus mismatch in matrix sum");
    }

    int p_;
    int rows_, cols_;
    std::vector<int32_t> a_;
};

// Row reduction in place; returns the pivot column of each pivot row.
inline std::vector<int> rref_in_place(Mat& m) {
    const int p = m.modulus();
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int pr = -1;
        for (int i = r; i < m.rows(); ++i)
            if (m(i, c) != 0) { pr = i; break; }
        if (pr < 0) continue;
        if (pr != r)
            for (int j = 0; j < m.cols(); ++j) std::swap(m(pr, j), m(r, j));
        int64_t inv = inv_mod(m(r, c), p);
        for (int j = 0; j < m.cols(); ++j) m(r, j) = int32_t((m(r, j) * inv) % p);
        for (int i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c) == 0) continue;
            int64_t f = m(i, c);
            for (int j = 0; j < m.cols(); ++j)
                m(i, j) = int32_t(((m(i, j) - f * m(r, j)) % p + p) % p);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline int rank_of(const Mat& m) {
    Mat c = m;
    return int(rref_in_place(c).size());
}

inline bool is_zero_vec(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](int32_t x) { return x == 0; });
}

class Subspace {
public:
    Subspace() : p_(3), ambient_(0) {}
    Subspace(int p, int ambient) : p_(p), ambient_(ambient) {
        require_modulus(p);
        if (ambient < 0) throw error("negative ambient dimension");
    }

    static Subspace zero(int p, int ambient) { return Subspace(p, ambient); }

    static Subspace full(int p, int ambient) {
        Subspace s(p, ambient);
        for (int i = 0; i < ambient; ++i) {
            Vec e(ambient, 0);
            e[i] = 1;
            s.rows_.push_back(std::move(e));
            s.pivots_.push_back(i);
        }
        return s;
    }

    static Subspace span_of(int p, int ambient, const std::vector<Vec>& vectors) {
        Subspace s(p, ambient);
        if (vectors.empty()) return s;
        Mat m(p, int(vectors.size()), ambient);
        for (int i = 0; i < int(vectors.size()); ++i) {
            if (int(vectors[i].size()) != ambient) throw error("span vector has wrong length");
            for (int j = 0; j < ambient; ++j) m(i, j) = int32_t(((vectors[i][j] % p) + p) % p);
        }
        s.pivots_ = rref_in_place(m);
        for (int i = 0; i < int(s.pivots_.size()); ++i) s.rows_.push_back(m.row(i));
        return s;
    }

    int modulus() const { return p_; }
    int ambient() const { return ambient_; }
    int dim() const { return int(rows_.size()); }
    const std::vector<Vec>& basis() const { return rows_; }
    const std::vector<int>& pivots() const { return pivots_; }

    bool contains(const Vec& v) const { return is_zero_vec(reduce(v)); }

    // v minus its projection onto the span; zero iff contained
    Vec reduce(Vec v) const {
        if (int(v.size()) != ambient_) throw error("vector length mismatch in subspace");
        for (auto& x : v) x = int32_t(((x % p_) + p_) % p_);
        for (size_t i = 0; i < rows_.size(); ++i) {
            int32_t f = v[pivots_[i]];
            if (f == 0) continue;
            for (int j = 0; j < ambient_; ++j)
                v[j] = int32_t(((v[j] - int64_t(f) * rows_[i][j]) % p_ + p_) % p_);
        }
        return v;
    }

    bool contains(const Subspace& o) const {
        check_compatible(o);
        for (const auto& b : o.rows_)
            if (!contains(b)) return false;
        return true;
    }

    bool operator==(const Subspace& o) const {
        return p_ == o.p_ && ambient_ == o.ambient_ && rows_ == o.rows_;
    }
    bool operator!=(const Subspace& o) const { return !(*this == o); }

    friend Subspace sum(const Subspace& a, const Subspace& b) {
        a.check_compatible(b);
        std::vector<Vec> all = a.rows_;
        all.insert(all.end(), b.rows_.begin(), b.rows_.end());
        return span_of(a.p_, a.ambient_, all);
    }

    // annihilator under the coordinate dot product; (U^perp)^perp == U
    Subspace orthogonal() const {
        Mat m(p_, dim(), ambient_);
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < ambient_; ++j) m(i, j) = rows_[i][j];
        return kernel_of_matrix(m);
    }

    friend Subspace intersect(const Subspace& a, const Subspace& b) {
        a.check_compatible(b);
        return sum(a.orthogonal(), b.orthogonal()).orthogonal();
    }

    static Subspace kernel_of_matrix(const Mat& m) {
        Mat r = m;
        std::vector<int> piv = rref_in_place(r);
        std::vector<bool> is_piv(m.cols(), false);
        for (int c : piv) is_piv[c] = true;
        std::vector<Vec> basis;
        for (int f = 0; f < m.cols(); ++f) {
            if (is_piv[f]) continue;
            Vec v(m.cols(), 0);
            v[f] = 1;
            for (int i = 0; i < int(piv.size()); ++i)
                v[piv[i]] = int32_t((m.modulus() - r(i, f)) % m.modulus());
            basis.push_back(std::move(v));
        }
        return span_of(m.modulus(), m.cols(), basis);
    }

    static Subspace column_space(const Mat& m) {
        std::vector<Vec> cols;
        for (int j = 0; j < m.cols(); ++j) cols.push_back(m.col(j));
        return span_of(m.modulus(), m.rows(), cols);
    }

    // image of this subspace under the matrix (ambient must equal m.cols())
    Subspace map_by(const Mat& m) const {
        if (m.cols() != ambient_) throw error("shape mismatch in subspace map");
        std::vector<Vec> imgs;
        for (const auto& b : rows_) imgs.push_back(m.apply(b));
        return span_of(p_, m.rows(), imgs);
    }

private:
    void check_compatible(const Subspace& o) const {
        if (p_ != o.p_ || ambient_ != o.ambient_)
            throw error("subspace modulus/ambient mismatch");
    }

    int p_;
    int ambient_;
    std::vector<Vec> rows_;   // canonical reduced echelon basis
    std::vector<int> pivots_;
};

// Deterministic complement: walk W's echelon basis and keep the vectors that
// grow the span of A. For W = F_p^n this adds exactly the standard vectors at
// A's non-pivot positions.
inline Subspace complement_within(const Subspace& a, const Subspace& w) {
    if (a.modulus() != w.modulus() || a.ambient() != w.ambient())
        throw error("subspace modulus/ambient mismatch");
    if (!w.contains(a)) throw error("complement_within: first subspace not contained in second");
    std::vector<Vec> ech = a.basis();
    std::vector<int> lead;
    for (const auto& b : a.basis())
        lead.push_back(int(std::find_if(b.begin(), b.end(), [](int32_t x) { return x != 0; }) - b.begin()));
    const int p = a.modulus();
    std::vector<Vec> picked;
    for (const auto& wb : w.basis()) {
        Vec v = wb;
        bool again = true;
        while (again) {
            again = false;
            for (size_t i = 0; i < ech.size(); ++i) {
                int l = lead[i];
                if (v[l] == 0) continue;
                int64_t f = int64_t(v[l]) * inv_mod(ech[i][l], p) % p;
                for (size_t j = 0; j < v.size(); ++j)
                    v[j] = int32_t(((v[j] - f * ech[i][j]) % p + p) % p);
                again = true;
            }
        }
        if (is_zero_vec(v)) continue;
        picked.push_back(wb);
        int l = int(std::find_if(v.begin(), v.end(), [](int32_t x) { return x != 0; }) - v.begin());
        ech.push_back(std::move(v));
        lead.push_back(l);
    }
    return Subspace::span_of(a.modulus(), a.ambient(), picked);
}

struct Analysis {
    int rank;
    Subspace kernel;
    Subspace image;
    Mat rref;
};

inline Analysis analyze(const Mat& m) {
    Analysis a{0, Subspace(m.modulus(), m.cols()), Subspace(m.modulus(), m.rows()), m};
    a.rank = int(rref_in_place(a.rref).size());
    a.kernel = Subspace::kernel_of_matrix(m);
    a.image = Subspace::column_space(m);
    return a;
}

// Particular solution of A x = b with free variables set to zero.
inline std::optional<Vec> solve(const Mat& A, const Vec& b) {
    if (int(b.size()) != A.rows()) throw error("rhs length mismatch in solve");
    const int p = A.modulus();
    Mat aug(p, A.rows(), A.cols() + 1);
    for (int i = 0; i < A.rows(); ++i) {
        for (int j = 0; j < A.cols(); ++j) aug(i, j) = A(i, j);
        aug(i, A.cols()) = int32_t(((b[i] % p) + p) % p);
    }
    std::vector<int> piv = rref_in_place(aug);
    if (!piv.empty() && piv.back() == A.cols()) return std::nullopt;
    Vec x(A.cols(), 0);
    for (int i = 0; i < int(piv.size()); ++i) x[piv[i]] = aug(i, A.cols());
    return x;
}

inline Mat vstack(const std::vector<Mat>& parts) {
    if (parts.empty()) throw error("vstack of nothing");
    int p = parts[0].modulus(), cols = parts[0].cols(), rows = 0;
    for (const auto& m : parts) {
        if (m.modulus() != p || m.cols() != cols) throw error("vstack shape mismatch");
        rows += m.rows();
    }
    Mat r(p, rows, cols);
    int off = 0;
    for (const auto& m : parts) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < cols; ++j) r(off + i, j) = m(i, j);
        off += m.rows();
    }
    return r;
}

inline Vec concat(const std::vector<Vec>& parts) {
    Vec r;
    for (const auto& v : parts) r.insert(r.end(), v.begin(), v.end());
    return r;
}

// Solve the stacked system A_k x = b_k for all k simultaneously.
inline std::optional<Vec> solve_stacked(const std::vector<Mat>& As, const std::vector<Vec>& bs) {
    if (As.size() != bs.size()) throw error("solve_stacked arity mismatch");
    return solve(vstack(As), concat(bs));
}

// xorshift64* generator. Recurrence, from state x (never zero):
//   x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;  output = x * 0x2545F4914F6CDD1D.
// A zero seed is remapped to 0x9E3779B97F4A7C15 so the state cannot stick.
// Fixed here so every seeded artifact of the library is reproducible across
// platforms and standard library implementations.
class Xorshift64Star {
public:
    explicit Xorshift64Star(uint64_t seed) : x_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

    uint64_t next() {
        x_ ^= x_ >> 12;
        x_ ^= x_ << 25;
        x_ ^= x_ >> 27;
        return x_ * 0x2545F4914F6CDD1Dull;
    }

    // uniform on [0, m) by rejection, so the distribution is exact
    uint64_t below(uint64_t m) {
        if (m == 0) throw error("below(0)");
        uint64_t rem = (UINT64_MAX % m + 1) % m;  // 2^64 mod m
        uint64_t bound = 0 - rem;                 // wraps to 2^64 - rem; 0 means "accept all"
        for (;;) {
            uint64_t v = next();
            if (rem == 0 || v < bound) return v % m;
        }
    }

private:
    uint64_t x_;
};

inline Mat random_matrix(int p, int rows, int cols, uint64_t seed) {
    require_modulus(p);
    if (rows < 0 || cols < 0) throw error("negative matrix dimension");
    Xorshift64Star rng(seed);
    Mat m(p, rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = int32_t(rng.below(uint64_t(p)));
    return m;
}

}  // namespace gmodk
