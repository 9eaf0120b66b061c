#include <catch2/catch_amalgamated.hpp>

#include "gmodk/lfield.hpp"

using namespace gmodk;

static Tower tame(int p, int64_t q, int n, TowerStyle style = TowerStyle::totally_ramified) {
    LocalFieldSpec s;
    s.p = p;
    s.q = q;
    s.n = n;
    s.m_max = 2;
    s.style = style;
    return generate_tower(s);
}

TEST_CASE("implicit degree 0 accessors", "[ktower]") {
    Tower T = tame(3, 13, 1);
    CHECK(T.dim(0, 0) == 1);
    CHECK(T.sigma(1, 0) == Mat::identity(3, 1));
    CHECK(T.iota(0, 0) == Mat::identity(3, 1));
    CHECK(T.norm(1, 0) == Mat::zero(3, 1, 1));
}

TEST_CASE("chains compose level by level", "[ktower]") {
    Tower T = tame(3, 109, 2);
    CHECK(T.iota_chain(0, 2, 1) == (T.iota(1, 1) * T.iota(0, 1)));
    CHECK(T.norm_chain(2, 0, 1) == (T.norm(1, 1) * T.norm(2, 1)));
    CHECK(T.iota_chain(1, 1, 1) == Mat::identity(3, T.dim(1, 1)));
    CHECK_THROWS_AS(T.iota_chain(2, 0, 1), error);
    CHECK_THROWS_AS(T.norm_chain(0, 2, 1), error);
}

TEST_CASE("vector rendering", "[ktower]") {
    CHECK(vec_to_string(Vec{0, 1}) == "[0 1]");
    CHECK(vec_to_string(Vec{}) == "[]");
}

TEST_CASE("generated towers pass the strict axiom suite", "[ktower]") {
    for (TowerStyle st : {TowerStyle::totally_ramified, TowerStyle::unramified}) {
        Tower T = tame(3, 19, 1, st);
        ValidationReport r = validate_axioms(T, true);
        CHECK(r.all_pass());
        bool saw_lms = false;
        for (const auto& c : r.checks) saw_lms |= c.name == "lms_sequence";
        CHECK(saw_lms);
    }
}

TEST_CASE("a corrupted restriction map is caught with a witness", "[ktower]") {
    Tower T = tame(3, 13, 1);
    T.iota_m[0][1] = Mat::zero(3, T.dim(1, 1), T.dim(0, 1));
    ValidationReport r = validate_axioms(T, false);
    CHECK_FALSE(r.all_pass());
    bool kummer_failed = false;
    for (const auto& c : r.checks)
        if (c.name == "kummer_exactness" && !c.pass) {
            kummer_failed = true;
            CHECK(c.detail.find("witness") != std::string::npos);
        }
    CHECK(kummer_failed);
}

TEST_CASE("zero-height and zero-dimension towers validate", "[ktower]") {
    Tower Z = zero_tower(3, 2, 2);
    CHECK(validate_axioms(Z, true).all_pass());
    CHECK(Z.dim(2, 1) == 0);
}

TEST_CASE("exceptional search on the tame models", "[ktower]") {
    ExceptionalReport q13 = compute_exceptional(tame(3, 13, 1));
    CHECK_FALSE(q13.embeddable);
    REQUIRE(q13.index.has_value());
    CHECK(*q13.index == 0);
    CHECK(q13.candidate == Vec{1, 0});
    CHECK(q13.t == 1);

    ExceptionalReport q19 = compute_exceptional(tame(3, 19, 1));
    CHECK(q19.embeddable);
    CHECK_FALSE(q19.index.has_value());  // index is -infinity

    ExceptionalReport u = compute_exceptional(tame(3, 13, 1, TowerStyle::unramified));
    CHECK(u.embeddable);
    CHECK(u.candidate == Vec{0, 1});
}

TEST_CASE("direct sum doubles spaces and keeps the factors' action", "[ktower]") {
    Tower A = tame(3, 13, 1);
    auto [S, rep] = tower_direct_sum(A, A);
    CHECK(S.dim(1, 1) == 4);
    CHECK(S.dim(1, 0) == 1);  // degree-0 spaces stay one-dimensional
    CHECK(S.sigma(1, 1).at(3, 2) == A.sigma(1, 1).at(1, 0));
    CHECK(S.a_class[0] == Vec{1, 0, 1, 0});  // stacked like the cup columns
    CHECK(S.cup_a(0, 1).col(0) == Vec{1, 0, 1, 0});
    // exactness at degree 1 is genuinely lost for a nonzero sum
    bool kummer_ok = true;
    for (const auto& c : rep.checks)
        if (c.name == "kummer_exactness") kummer_ok = c.pass;
    CHECK_FALSE(kummer_ok);
    CHECK_THROWS_AS(tower_direct_sum(A, tame(5, 11, 1)), error);
}

TEST_CASE("summing with the zero tower changes nothing", "[ktower]") {
    Tower A = tame(3, 37, 2);
    auto [S, rep] = tower_direct_sum(A, zero_tower(3, 2, 2));
    CHECK(S == A);
    CHECK(rep.all_pass());
}

TEST_CASE("mixed-style sum has no consistent exceptional scalar", "[ktower]") {
    Tower S = tower_direct_sum(tame(3, 7, 1, TowerStyle::unramified), tame(3, 13, 1)).first;
    CHECK_THROWS_MATCHES(compute_exceptional(S), check_failure,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("exceptional_scalar")));
}

TEST_CASE("cup_top dispatches to the top-level pairing and guards it", "[ktower]") {
    Tower T = tame(3, 19, 1);
    CHECK(T.cup_top(0, 1) == T.cup_a(0, 1));
    CHECK(T.cup_top(1, 1) == T.cup_an(1));
    T.has_cup_an = false;
    CHECK_THROWS_AS(T.cup_top(1, 1), error);
}

TEST_CASE("module_at wraps a stage as a group module", "[ktower]") {
    Tower T = tame(3, 13, 1);
    GModule m = T.module_at(1, 1);
    CHECK(m.dim == 2);
    CHECK(m.order == 3);
    CHECK(m.sigma == T.sigma(1, 1));
}
