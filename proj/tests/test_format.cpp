#include <cstdio>
#include <filesystem>

#include <catch2/catch_amalgamated.hpp>

#include "gmodk/lfield.hpp"
#include "gmodk/tower_format.hpp"

using namespace gmodk;

static Tower sample(int64_t q = 19, int n = 1) {
    LocalFieldSpec s;
    s.p = 3;
    s.q = q;
    s.n = n;
    s.m_max = 2;
    s.style = TowerStyle::totally_ramified;
    return generate_tower(s);
}

TEST_CASE("serialize then parse is the identity", "[format]") {
    for (int64_t q : {int64_t(13), int64_t(19), int64_t(109)}) {
        Tower T = sample(q, q == 109 ? 2 : 1);
        CHECK(parse_tower(serialize_tower(T)) == T);
    }
    Tower Z = zero_tower(3, 2, 2);
    CHECK(parse_tower(serialize_tower(Z)) == Z);
}

TEST_CASE("serialization is canonical", "[format]") {
    Tower T = sample();
    CHECK(serialize_tower(T) == serialize_tower(parse_tower(serialize_tower(T))));
}

TEST_CASE("comments and blank lines are accepted, stray entries are not", "[format]") {
    Tower T = sample();
    std::string text = serialize_tower(T);
    text.insert(0, "# leading comment\n\n");
    text += "\n  # trailing\n";
    CHECK(parse_tower(text) == T);

    std::string tiny =
        "tower p=3 n=0 m=1\n"
        "space level=0 degree=1 dim=1\n"
        "map sigma level=0 degree=1\n"
        "-1\n"
        "class xi level=0 : 2\n"
        "scalar t=1\n";
    CHECK_THROWS_MATCHES(parse_tower(tiny), parse_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("line 4: entry -1 outside")));
    std::string fixed = tiny;
    fixed.replace(fixed.find("-1"), 2, "2");
    CHECK(parse_tower(fixed).sigma(0, 1).at(0, 0) == 2);
}

TEST_CASE("parse failures carry the offending line", "[format]") {
    auto line_of = [](const std::string& text) {
        try {
            parse_tower(text);
        } catch (const parse_error& e) {
            return e.line;
        }
        return -1;
    };
    CHECK(line_of("garbage first\n") == 1);
    CHECK(line_of("tower p=3 n=1\n") == 1);                      // missing m
    CHECK(line_of("tower p=4 n=1 m=1\n") == 1);                  // bad modulus
    CHECK(line_of("tower p=3 n=1 m=1\nwat\n") == 2);
    CHECK(line_of("# comment\ntower p=3 n=1 m=1\nspace level=9 degree=1 dim=1\n") == 3);
    CHECK(line_of("tower p=3 n=1 m=1\ntower p=3 n=1 m=1\n") == 2);

    // truncated matrix: error points past the map header
    std::string trunc =
        "tower p=3 n=0 m=1\n"
        "space level=0 degree=1 dim=2\n"
        "map sigma level=0 degree=1\n"
        "1 0\n";
    CHECK(line_of(trunc) >= 4);
}

TEST_CASE("missing sections are reported", "[format]") {
    Tower T = sample();
    std::string text = serialize_tower(T);
    size_t pos = text.find("class");
    REQUIRE(pos != std::string::npos);
    CHECK_THROWS_AS(parse_tower(text.substr(0, pos)), parse_error);

    // the scalar line is the one optional trailer
    size_t spos = text.find("scalar");
    REQUIRE(spos != std::string::npos);
    CHECK(parse_tower(text.substr(0, spos)).t == 1);
}

TEST_CASE("file round trip", "[format]") {
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "gmodk-format-roundtrip.twr";
    Tower T = sample(109, 2);
    save_tower_file(path.string(), T);
    CHECK(load_tower_file(path.string()) == T);
    std::remove(path.string().c_str());
    CHECK_THROWS_AS(load_tower_file(path.string()), error);
}
