// Command-line front end. Thin dispatch over the library: every subcommand
// loads or writes tower files, runs one library entry point, and reports in
// a stable plain-text shape (or frozen-key JSON where offered).
//
// Exit codes: 0 success or all checks passed, 1 usage or parse error,
// 2 a named check or theorem clause failed, 3 internal assertion.

#ifndef GMODK_CLI_HPP
#define GMODK_CLI_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gmodk/acceptance.hpp"
#include "gmodk/engine.hpp"
#include "gmodk/lfield.hpp"
#include "gmodk/tower_format.hpp"

namespace gmodk::cli {

namespace detail {

inline void print_multiplicities(const std::map<int, int>& m, std::ostream& out) {
    for (const auto& [dim, count] : m) out << "A_" << dim << " x " << count << "\n";
}

inline void require_site(const Tower& T, int level, int degree) {
    if (level < 0 || level > T.n) throw error("level out of range (tower height " + std::to_string(T.n) + ")");
    if (degree < 1 || degree > T.m_max)
        throw error("degree out of range (tower carries degrees 1.." + std::to_string(T.m_max) + ")");
}

inline std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"finite-tower toolkit: validate tower files, decompose module stages, "
                 "and run the structure-theorem constructions"};
    app.require_subcommand(1);

    std::string file, file2, out_path, style_s = "totally_ramified";
    int level = 0, degree = 1, p = 3, n = 1, m = 2;
    int64_t q = 0;
    uint64_t seed = 12345;
    bool strict = false, as_json = false;

    CLI::App* c_check = app.add_subcommand("check", "validate a tower file");
    c_check->add_option("file", file, "tower file")->required();
    c_check->add_flag("--strict", strict, "also require optional data and the sequence checks");

    CLI::App* c_dec = app.add_subcommand("decompose", "cyclic decomposition of one stage");
    c_dec->add_option("file", file, "tower file")->required();
    c_dec->add_option("--level", level, "tower level")->required();
    c_dec->add_option("--degree", degree, "degree")->required();
    c_dec->add_flag("--json", as_json, "machine summary with frozen keys");

    CLI::App* c_gam = app.add_subcommand("gamma", "norm-complement construction one step down");
    c_gam->add_option("file", file, "tower file")->required();
    c_gam->add_option("--level", level, "tower level")->required();
    c_gam->add_option("--degree", degree, "degree")->required();

    CLI::App* c_t1 = app.add_subcommand("theorem1", "dimension-gap and collapse verifier");
    c_t1->add_option("file", file, "tower file")->required();
    c_t1->add_option("--degree", degree, "degree")->required();

    CLI::App* c_t2 = app.add_subcommand("theorem2", "full summand construction at the top level");
    c_t2->add_option("file", file, "tower file")->required();
    c_t2->add_option("--degree", degree, "degree")->required();

    CLI::App* c_exc = app.add_subcommand("exceptional", "exceptional class search and index");
    c_exc->add_option("file", file, "tower file")->required();

    CLI::App* c_gen = app.add_subcommand("lfgen", "generate a local-field tower file");
    c_gen->add_option("--p", p, "odd prime")->required();
    c_gen->add_option("--q", q, "residue size, prime power with q = 1 mod p")->required();
    c_gen->add_option("--n", n, "tower height")->required();
    c_gen->add_option("--m", m, "highest degree (at most 2)")->required();
    c_gen->add_option("--style", style_s, "totally_ramified (alias: ramified) or unramified");
    c_gen->add_option("--out", out_path, "output file")->required();

    CLI::App* c_sum = app.add_subcommand("sum", "direct sum of two tower files");
    c_sum->add_option("file1", file, "first tower file")->required();
    c_sum->add_option("file2", file2, "second tower file")->required();
    c_sum->add_option("--out", out_path, "output file")->required();

    CLI::App* c_self = app.add_subcommand("selftest", "run the acceptance suite");
    c_self->add_option("--seed", seed, "seed for the randomized criteria");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(c_check)) {
            Tower T = load_tower_file(file);
            ValidationReport rep = validate_axioms(T, strict);
            for (const auto& c : rep.checks) {
                out << c.name << (c.pass ? " PASS" : " FAIL") ;
                if (!c.pass && !c.detail.empty()) out << " " << c.detail;
                out << "\n";
            }
            return rep.all_pass() ? 0 : 2;
        }
        if (app.got_subcommand(c_dec)) {
            Tower T = load_tower_file(file);
            detail::require_site(T, level, degree);
            GModule M = T.module_at(level, degree);
            Decomposition D = decompose(M);
            if (as_json) {
                nlohmann::ordered_json j;
                j["multiplicities"] = nlohmann::ordered_json::object();
                for (const auto& [dim, count] : D.multiplicities)
                    j["multiplicities"][std::to_string(dim)] = count;
                j["dim"] = M.dim;
                out << j.dump() << "\n";
            } else {
                detail::print_multiplicities(D.multiplicities, out);
            }
            return 0;
        }
        if (app.got_subcommand(c_gam)) {
            Tower T = load_tower_file(file);
            GammaResult G = build_gamma(T, level, degree);
            out << "gamma level=" << G.level << " degree=" << G.degree << " dim="
                << G.gamma.dim() << "\n";
            for (size_t j = 0; j < G.z.size(); ++j) {
                out << "Z_" << j << " x " << G.z[j].size() << "\n";
                for (const Vec& g : G.z[j]) out << "  " << vec_to_string(g) << "\n";
            }
            return 0;
        }
        if (app.got_subcommand(c_t1)) {
            Tower T = load_tower_file(file);
            Theorem1Report r = verify_theorem1(T, degree);
            detail::print_multiplicities(r.multiplicities, out);
            out << "gap" << (r.gap_violations.empty()
                                 ? std::string(" PASS")
                                 : " FAIL " + detail::join_ints(r.gap_violations))
                << "\n";
            out << "collapse" << (r.collapse_failures.empty()
                                      ? std::string(" PASS")
                                      : " FAIL " + detail::join_ints(r.collapse_failures))
                << "\n";
            return r.pass() ? 0 : 2;
        }
        if (app.got_subcommand(c_t2)) {
            Tower T = load_tower_file(file);
            Theorem2Report r = construct_theorem2(T, degree);
            detail::print_multiplicities(r.multiplicities, out);
            for (const auto& c : r.clauses) out << c.name << (c.pass ? " PASS" : " FAIL") << "\n";
            return 0;
        }
        if (app.got_subcommand(c_exc)) {
            Tower T = load_tower_file(file);
            ExceptionalReport ex = compute_exceptional(T);
            out << "candidate " << vec_to_string(ex.candidate) << "\n";
            out << "index " << (ex.index ? std::to_string(*ex.index) : std::string("-inf")) << "\n";
            out << "embeddable " << (ex.embeddable ? "true" : "false") << "\n";
            out << "t " << ex.t << "\n";
            return 0;
        }
        if (app.got_subcommand(c_gen)) {
            LocalFieldSpec s;
            s.p = p;
            s.q = q;
            s.n = n;
            s.m_max = m;
            auto st = style_from_name(style_s);
            if (!st) throw error("unknown style '" + style_s + "'");
            s.style = *st;
            Tower T = generate_tower(s);
            save_tower_file(out_path, T);
            out << "wrote " << out_path << "\n";
            return 0;
        }
        if (app.got_subcommand(c_sum)) {
            Tower A = load_tower_file(file);
            Tower B = load_tower_file(file2);
            auto [S, rep] = tower_direct_sum(A, B);
            save_tower_file(out_path, S);
            out << "wrote " << out_path << "\n";
            if (!rep.all_pass()) {
                // The stacked pairing can lose exactness; the file is still
                // written so the stages stay usable.
                for (const auto& c : rep.checks)
                    if (!c.pass) err << c.name << " FAIL " << c.detail << "\n";
                return 2;
            }
            return 0;
        }
        if (app.got_subcommand(c_self)) {
            acceptance::Options o;
            o.seed = seed;
            // resolve before the spawn: /proc/self/exe inside the spawned
            // shell would name the shell, not this binary
            std::error_code ec;
            auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
            if (ec) throw error("cannot resolve own binary path for selftest");
            o.cli_path = self.string();
            return acceptance::run_all(o, out) ? 0 : 2;
        }
    } catch (const parse_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const check_failure& e) {
        err << "failed " << e.what() << "\n";
        return 2;
    } catch (const internal_error& e) {
        err << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace gmodk::cli

#endif
