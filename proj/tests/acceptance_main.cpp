// Standalone acceptance driver: prints one pass/fail line per criterion.
// Usage: gmodk_acceptance [--seed N] --cli <path-to-gmodk-binary>

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "gmodk/acceptance.hpp"

int main(int argc, char** argv) {
    gmodk::acceptance::Options o;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--seed" && i + 1 < argc) {
            o.seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (a == "--cli" && i + 1 < argc) {
            o.cli_path = argv[++i];
        } else {
            std::cerr << "usage: gmodk_acceptance [--seed N] --cli <binary>\n";
            return 1;
        }
    }
    bool ok = gmodk::acceptance::run_all(o, std::cout);
    std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: FAILURES above") << "\n";
    return ok ? 0 : 1;
}
