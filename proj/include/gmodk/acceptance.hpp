// Acceptance suite: ten self-contained criteria, one printed line each.
// Shared by the dedicated acceptance binary and the `selftest` subcommand.
// The randomized criteria take a seed so failures replay exactly; the
// determinism criterion shells out to the real binary.

#ifndef GMODK_ACCEPTANCE_HPP
#define GMODK_ACCEPTANCE_HPP

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gmodk/engine.hpp"
#include "gmodk/lfield.hpp"

namespace gmodk::acceptance {

struct Options {
    uint64_t seed = 12345;
    std::string cli_path;  // binary to spawn for the determinism criterion
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline Mat inverse_of(const Mat& m) {
    Mat inv(m.modulus(), m.rows(), m.rows());
    for (int j = 0; j < m.rows(); ++j) {
        Vec e(size_t(m.rows()), 0);
        e[size_t(j)] = 1;
        std::optional<Vec> x = solve(m, e);
        if (!x) throw internal_error("matrix not invertible");
        for (int i = 0; i < m.rows(); ++i) inv(i, j) = (*x)[size_t(i)];
    }
    return inv;
}

// Random conjugate of a random unipotent Jordan shape with blocks capped at
// the group order.
inline GModule random_module(int p, int n, int max_dim, Xorshift64Star& rng) {
    uint64_t cap = checked_pow(uint64_t(p), n, uint64_t(1) << 24);
    int dim = 1 + int(rng.below(uint64_t(max_dim)));
    Mat j(p, dim, dim);
    int off = 0;
    while (off < dim) {
        int b = 1 + int(rng.below(std::min(cap, uint64_t(dim - off))));
        for (int k = 0; k < b; ++k) {
            j(off + k, off + k) = 1;
            if (k + 1 < b) j(off + k + 1, off + k) = 1;
        }
        off += b;
    }
    for (;;) {
        Mat c(p, dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int s = 0; s < dim; ++s) c(r, s) = int32_t(rng.below(uint64_t(p)));
        if (rank_of(c) != dim) continue;
        return make_module(p, n, c * j * inverse_of(c));
    }
}

struct TowerCase {
    LocalFieldSpec spec;
    Tower tower;
    bool embeddable_expected = false;
};

inline const std::map<int, std::vector<int64_t>>& q_lists() {
    static const std::map<int, std::vector<int64_t>> qs = {
        {3, {7, 13, 19, 37, 109}},
        {5, {11, 31, 101, 151, 251}},
    };
    return qs;
}

inline std::vector<TowerCase> generated_towers() {
    std::vector<TowerCase> cases;
    for (const auto& [p, qlist] : q_lists())
        for (int64_t q : qlist) {
            int v = 0;
            for (int64_t r = q - 1; r % p == 0; r /= p) ++v;
            for (int n = 1; n <= 2; ++n)
                for (TowerStyle st : {TowerStyle::totally_ramified, TowerStyle::unramified}) {
                    if (st == TowerStyle::totally_ramified && v < n) continue;
                    LocalFieldSpec s;
                    s.p = p;
                    s.q = q;
                    s.n = n;
                    s.m_max = 2;
                    s.style = st;
                    cases.push_back({s, generate_tower(s),
                                     st == TowerStyle::unramified || v >= n + 1});
                }
        }
    return cases;
}

inline std::string case_name(const LocalFieldSpec& s) {
    return "p=" + std::to_string(s.p) + " q=" + std::to_string(s.q) + " n=" +
           std::to_string(s.n) + " " + style_name(s.style);
}

// Group indices of shape-compatible cases so direct sums are well formed.
inline std::map<std::pair<int, int>, std::vector<size_t>> shape_groups(
    const std::vector<TowerCase>& cases) {
    std::map<std::pair<int, int>, std::vector<size_t>> g;
    for (size_t i = 0; i < cases.size(); ++i)
        g[{cases[i].spec.p, cases[i].spec.n}].push_back(i);
    return g;
}

struct SpawnResult {
    int exit_code = -1;
    std::string output;
};

inline SpawnResult spawn(const std::string& command) {
    SpawnResult r;
    FILE* f = popen((command + " 2>&1").c_str(), "r");
    if (!f) return r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, f)) > 0) r.output.append(buf, got);
    int status = pclose(f);
    if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
    return r;
}

inline std::string read_file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

// 1. Decomposition agrees with the rank-identity oracle on seeded random
//    modules, fast.
inline bool criterion_oracle(uint64_t seed, std::ostream& out) {
    auto t0 = std::chrono::steady_clock::now();
    Xorshift64Star rng(seed);
    int total = 0, bad = 0;
    for (int p : {3, 5})
        for (int n : {1, 2})
            for (int k = 0; k < 50; ++k) {
                GModule m = detail::random_module(p, n, 60, rng);
                if (decompose(m).multiplicities != multiplicities_oracle(m)) ++bad;
                ++total;
            }
    double dt = detail::seconds_since(t0);
    bool ok = bad == 0 && total >= 200 && dt < 10.0;
    out << "criterion 1 " << (ok ? "PASS" : "FAIL") << " decompose matches the rank oracle on "
        << total << " random modules, " << bad << " mismatches, " << dt << "s\n";
    return ok;
}

// 2. The geometric-sum operator identity holds as an exact matrix equality
//    for all subgroup pairs.
inline bool criterion_operator_identities(uint64_t seed, std::ostream& out) {
    Xorshift64Star rng(seed + 1);
    int total = 0, bad = 0;
    for (int k = 0; k < 100; ++k) {
        int p = (k % 2) ? 5 : 3;
        int n = (k % 4 < 2) ? 1 : 2;
        GModule m = detail::random_module(p, n, 30, rng);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= i; ++j) {
                if (!verify_operator_identities(m, i, j)) ++bad;
                ++total;
            }
    }
    bool ok = bad == 0;
    out << "criterion 2 " << (ok ? "PASS" : "FAIL") << " operator identities exact on " << total
        << " subgroup pairs, " << bad << " violations\n";
    return ok;
}

// 3. Fixed-part independence decides module independence, with the direct
//    dimension count as referee.
inline bool criterion_exclusion(uint64_t seed, std::ostream& out) {
    Xorshift64Star rng(seed + 2);
    int total = 0, bad = 0;
    for (int k = 0; k < 100; ++k) {
        int p = (k % 2) ? 5 : 3;
        int n = (k % 4 < 2) ? 1 : 2;
        GModule m = detail::random_module(p, n, 24, rng);
        std::vector<std::vector<Vec>> fams(1 + rng.below(3));
        for (auto& f : fams) {
            f.resize(1 + rng.below(2));
            for (auto& g : f) {
                g.assign(size_t(m.dim), 0);
                for (auto& x : g) x = int32_t(rng.below(uint64_t(m.p)));
            }
        }
        bool fixed_side = exclusion_check(m, fams);  // throws on internal disagreement
        int dim_total = 0;
        Subspace s = Subspace::zero(m.p, m.dim);
        for (const auto& f : fams) {
            Subspace u = submodule_span(m, f);
            dim_total += u.dim();
            s = sum(s, u);
        }
        if (fixed_side != (s.dim() == dim_total)) ++bad;
        ++total;
    }
    bool ok = bad == 0;
    out << "criterion 3 " << (ok ? "PASS" : "FAIL") << " exclusion test agrees with dimension "
        << "counts on " << total << " random families, " << bad << " discrepancies\n";
    return ok;
}

// 4. Every generated tower passes the strict axiom suite, and the
//    exceptional-index search lands exactly where the arithmetic predicts.
inline bool criterion_axiom_suite(const std::vector<detail::TowerCase>& cases, std::ostream& out) {
    int bad = 0;
    std::string first;
    for (const auto& c : cases) {
        ValidationReport rep = validate_axioms(c.tower, true);
        bool emb_ok = true;
        try {
            emb_ok = compute_exceptional(c.tower).embeddable == c.embeddable_expected;
        } catch (const error&) {
            emb_ok = false;
        }
        if (!rep.all_pass() || !emb_ok) {
            ++bad;
            if (first.empty()) first = detail::case_name(c.spec);
        }
    }
    bool ok = bad == 0;
    out << "criterion 4 " << (ok ? "PASS" : "FAIL") << " strict axiom suite on " << cases.size()
        << " generated towers" << (ok ? "" : ", first failure " + first) << "\n";
    return ok;
}

// 5. No summand dimension in the forbidden gap and full filtration collapse,
//    for singles and direct sums of up to three towers; frozen counts for
//    the two hand-computed cases.
inline bool criterion_theorem1(const std::vector<detail::TowerCase>& cases, std::ostream& out) {
    int checked = 0, bad = 0;
    auto run_one = [&](const Tower& T) {
        for (int d = 1; d <= T.m_max; ++d) {
            if (!verify_theorem1(T, d).pass()) ++bad;
            ++checked;
        }
    };
    for (const auto& c : cases) run_one(c.tower);
    auto groups = detail::shape_groups(cases);
    for (const auto& [key, idx] : groups) {
        for (size_t k = 0; k + 1 < idx.size(); ++k)
            run_one(tower_direct_sum(cases[idx[k]].tower, cases[idx[k + 1]].tower).first);
        for (size_t k = 0; k + 2 < idx.size(); ++k) {
            Tower ab = tower_direct_sum(cases[idx[k]].tower, cases[idx[k + 1]].tower).first;
            run_one(tower_direct_sum(ab, cases[idx[k + 2]].tower).first);
        }
    }
    bool frozen = true;
    for (const auto& c : cases) {
        if (c.spec.p != 3 || c.spec.n != 1 || c.spec.style != TowerStyle::totally_ramified)
            continue;
        auto mults = verify_theorem1(c.tower, 1).multiplicities;
        if (c.spec.q == 13 && mults != std::map<int, int>{{2, 1}}) frozen = false;
        if (c.spec.q == 19 && mults != std::map<int, int>{{1, 2}}) frozen = false;
    }
    bool ok = bad == 0 && frozen;
    out << "criterion 5 " << (ok ? "PASS" : "FAIL") << " dimension gap and collapse on "
        << checked << " stages including sums" << (frozen ? "" : ", frozen counts differ")
        << "\n";
    return ok;
}

// 6. The full construction succeeds with every clause on every embeddable
//    tower, quickly. Collects every complement the recursion produced for
//    the next criterion.
inline bool criterion_theorem2(const std::vector<detail::TowerCase>& cases,
                               std::vector<std::pair<Tower, GammaResult>>& gammas,
                               std::ostream& out) {
    int towers = 0, bad = 0;
    bool saw_q19 = false, saw_q109 = false;
    double worst = 0.0;
    for (const auto& c : cases) {
        bool emb;
        try {
            emb = compute_exceptional(c.tower).embeddable;
        } catch (const error&) {
            emb = false;
        }
        if (!emb) continue;
        ++towers;
        if (c.spec.p == 3 && c.spec.q == 19 && c.spec.n == 1 &&
            c.spec.style == TowerStyle::totally_ramified)
            saw_q19 = true;
        if (c.spec.p == 3 && c.spec.q == 109 && c.spec.n == 2 &&
            c.spec.style == TowerStyle::totally_ramified)
            saw_q109 = true;
        auto t0 = std::chrono::steady_clock::now();
        try {
            Engine eng(c.tower);
            for (int d = 1; d <= c.tower.m_max; ++d)
                if (!eng.theorem2(c.tower.n, d).all_pass()) ++bad;
            for (const auto& [key, g] : eng.gamma_trace()) gammas.emplace_back(c.tower, g);
        } catch (const error&) {
            ++bad;
        }
        worst = std::max(worst, detail::seconds_since(t0));
    }
    bool ok = bad == 0 && saw_q19 && saw_q109 && worst < 5.0;
    out << "criterion 6 " << (ok ? "PASS" : "FAIL") << " full construction on " << towers
        << " embeddable towers, " << bad << " failures, slowest " << worst << "s\n";
    return ok;
}

// 7. Every complement the recursion produced satisfies its structural
//    clauses when re-checked from scratch.
inline bool criterion_gamma_properties(const std::vector<std::pair<Tower, GammaResult>>& gammas,
                                       std::ostream& out) {
    int bad = 0;
    for (const auto& [T, g] : gammas)
        if (!all_clauses_pass(gamma_clause_report(T, g))) ++bad;
    bool ok = bad == 0 && !gammas.empty();
    out << "criterion 7 " << (ok ? "PASS" : "FAIL") << " structural clauses re-verified on "
        << gammas.size() << " cached complements, " << bad << " failures\n";
    return ok;
}

// 8. The fixed-elements-are-norms scan never finds a non-vacuous failure on
//    generated towers or their pairwise sums.
inline bool criterion_fixed_norms(const std::vector<detail::TowerCase>& cases, uint64_t seed,
                                  std::ostream& out) {
    int scans = 0, bad = 0;
    std::size_t nonvac = 0;
    auto run_scan = [&](const Tower& T) {
        for (int d = 1; d <= T.m_max; ++d)
            for (int j = 0; j < T.n; ++j) {
                FixedNormsReport rep = check_fixed_elements_are_norms(T, d, j, seed);
                if (!rep.failures.empty()) ++bad;
                nonvac += rep.checked;
                ++scans;
            }
    };
    for (const auto& c : cases) run_scan(c.tower);
    auto groups = detail::shape_groups(cases);
    for (const auto& [key, idx] : groups)
        for (size_t a = 0; a < idx.size(); ++a)
            for (size_t b = a + 1; b < idx.size(); ++b)
                run_scan(tower_direct_sum(cases[idx[a]].tower, cases[idx[b]].tower).first);
    bool ok = bad == 0 && scans > 0;
    out << "criterion 8 " << (ok ? "PASS" : "FAIL") << " fixed-elements-are-norms over " << scans
        << " scans (" << nonvac << " non-vacuous), " << bad << " with failures\n";
    return ok;
}

// 9. Every subgroup-fixed norm-zero class lifts with its cyclic dimension
//    intact, exhaustively.
inline bool criterion_lifting(const std::vector<detail::TowerCase>& cases, std::ostream& out) {
    long lifted = 0;
    int bad = 0;
    for (const auto& c : cases) {
        const Tower& T = c.tower;
        for (int d = 1; d <= T.m_max; ++d) {
            GModule M = T.module_at(T.n, d);
            Mat norm_top = T.norm(T.n, d);
            for (int i = 0; i <= T.n; ++i) {
                uint64_t pi = checked_pow(uint64_t(T.p), i, uint64_t(1) << 24);
                Mat hstep = M.sigma.pow(pi) - Mat::identity(T.p, M.dim);
                gmodk::detail::for_each_vector(T.p, M.dim, [&](const Vec& g) {
                    if (!is_zero_vec(hstep.apply(g)) || !is_zero_vec(norm_top.apply(g))) return;
                    try {
                        lift_fixed_element(T, i, d, g);
                        ++lifted;
                    } catch (const error&) {
                        ++bad;
                    }
                });
            }
        }
    }
    bool ok = bad == 0 && lifted > 0;
    out << "criterion 9 " << (ok ? "PASS" : "FAIL") << " " << lifted
        << " exhaustive lifts preserved length, " << bad << " failures\n";
    return ok;
}

// 10. The binary is deterministic: generation is byte-identical and the
//     reporting commands reproduce output and exit codes exactly.
inline bool criterion_cli_determinism(const std::string& cli, std::ostream& out) {
    namespace fs = std::filesystem;
    if (cli.empty()) {
        out << "criterion 10 FAIL no binary path provided\n";
        return false;
    }
    std::string dirt = (fs::temp_directory_path() / "gmodk-accept-XXXXXX").string();
    std::vector<char> tmpl(dirt.begin(), dirt.end());
    tmpl.push_back('\0');
    if (!mkdtemp(tmpl.data())) {
        out << "criterion 10 FAIL cannot create a scratch directory\n";
        return false;
    }
    fs::path dir(tmpl.data());
    bool ok = true;
    std::string why;
    auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };

    fs::path f1 = dir / "a1.twr", f2 = dir / "a2.twr";
    std::string gen = " lfgen --p 3 --q 19 --n 1 --m 2 --style totally_ramified --out ";
    detail::SpawnResult g1 = detail::spawn(cli + gen + q(f1));
    detail::SpawnResult g2 = detail::spawn(cli + gen + q(f2));
    if (g1.exit_code != 0 || g2.exit_code != 0) {
        ok = false;
        why = "generation exited nonzero";
    } else if (detail::read_file_bytes(f1) != detail::read_file_bytes(f2) ||
               detail::read_file_bytes(f1).empty()) {
        ok = false;
        why = "generated files differ";
    }
    if (ok) {
        const std::vector<std::string> cmds = {
            " check " + q(f1) + " --strict",
            " decompose " + q(f1) + " --level 1 --degree 1",
            " decompose " + q(f1) + " --level 1 --degree 1 --json",
            " theorem2 " + q(f1) + " --degree 1",
        };
        for (const auto& cmd : cmds) {
            detail::SpawnResult r1 = detail::spawn(cli + cmd);
            detail::SpawnResult r2 = detail::spawn(cli + cmd);
            if (r1.exit_code != 0 || r1.exit_code != r2.exit_code || r1.output != r2.output) {
                ok = false;
                why = "unstable run of" + cmd;
                break;
            }
        }
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    out << "criterion 10 " << (ok ? "PASS" : "FAIL") << " binary determinism"
        << (ok ? "" : ", " + why) << "\n";
    return ok;
}

inline bool run_all(const Options& o, std::ostream& out) {
    std::vector<detail::TowerCase> cases = detail::generated_towers();
    std::vector<std::pair<Tower, GammaResult>> gammas;
    bool ok = true;
    ok &= criterion_oracle(o.seed, out);
    ok &= criterion_operator_identities(o.seed, out);
    ok &= criterion_exclusion(o.seed, out);
    ok &= criterion_axiom_suite(cases, out);
    ok &= criterion_theorem1(cases, out);
    ok &= criterion_theorem2(cases, gammas, out);
    ok &= criterion_gamma_properties(gammas, out);
    ok &= criterion_fixed_norms(cases, o.seed, out);
    ok &= criterion_lifting(cases, out);
    ok &= criterion_cli_determinism(o.cli_path, out);
    return ok;
}

}  // namespace gmodk::acceptance

#endif
