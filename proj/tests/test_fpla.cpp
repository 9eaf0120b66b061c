#include <catch2/catch_amalgamated.hpp>

#include "gmodk/fpla.hpp"

using namespace gmodk;

static Mat from_rows(int p, std::initializer_list<std::initializer_list<int>> rows) {
    Mat m(p, int(rows.size()), int(rows.begin()->size()));
    int i = 0;
    for (const auto& r : rows) {
        int j = 0;
        for (int v : r) m.set(i, j++, v);
        ++i;
    }
    return m;
}

TEST_CASE("modulus is restricted to odd primes", "[fpla]") {
    CHECK_THROWS_AS(Mat(2, 1, 1), error);
    CHECK_THROWS_AS(Mat(9, 1, 1), error);
    CHECK_THROWS_AS(Mat(1, 1, 1), error);
    CHECK_NOTHROW(Mat(32749, 1, 1));
    CHECK_THROWS_AS(Mat(32771, 1, 1), error);  // >= 2^15
}

TEST_CASE("matrix arithmetic stays reduced", "[fpla]") {
    Mat a = from_rows(5, {{1, 2}, {3, 4}});
    Mat b = from_rows(5, {{4, 3}, {2, 1}});
    CHECK((a + b) == from_rows(5, {{0, 0}, {0, 0}}));
    CHECK((a - b) == from_rows(5, {{2, 4}, {1, 3}}));
    CHECK((a * Mat::identity(5, 2)) == a);
    CHECK(a.scaled(7) == (a + a));
    CHECK(a.scaled(-1) == (Mat::zero(5, 2, 2) - a));
    CHECK(a.transpose() == from_rows(5, {{1, 3}, {2, 4}}));
    CHECK(a.apply({1, 1}) == Vec{3, 2});
    CHECK_THROWS_AS(a.apply({1, 1, 1}), error);
    CHECK(from_rows(3, {{0, 0}}).is_zero());
    CHECK_FALSE(a.is_zero());
}

TEST_CASE("set and at validate indices and normalize values", "[fpla]") {
    Mat a(7, 2, 2);
    a.set(0, 1, -1);
    CHECK(a.at(0, 1) == 6);
    a.set(1, 0, 15);
    CHECK(a.at(1, 0) == 1);
    CHECK_THROWS_AS(a.set(2, 0, 1), error);
    CHECK_THROWS_AS(a.at(0, -1), error);
}

TEST_CASE("pow squares and handles the zero exponent", "[fpla]") {
    Mat j = from_rows(3, {{1, 0}, {1, 1}});
    CHECK(j.pow(0) == Mat::identity(3, 2));
    CHECK(j.pow(3) == Mat::identity(3, 2));
    CHECK(j.pow(2) == from_rows(3, {{1, 0}, {2, 1}}));
    CHECK_THROWS_AS(Mat(3, 1, 2).pow(2), error);
}

TEST_CASE("rank and rref on a dependent matrix", "[fpla]") {
    Mat m = from_rows(3, {{1, 2}, {2, 4}});
    CHECK(rank_of(m) == 1);
    Analysis a = analyze(m);
    CHECK(a.rank == 1);
    CHECK(a.kernel.dim() == 1);
    CHECK(a.image.dim() == 1);
    CHECK(a.kernel.contains(Vec{1, 1}));
    CHECK(a.rref.at(0, 0) == 1);
    CHECK(a.rref.at(0, 1) == 2);
}

TEST_CASE("subspace construction and membership", "[fpla]") {
    Subspace s = Subspace::span_of(5, 3, {{1, 2, 0}, {2, 4, 0}, {0, 0, 3}});
    CHECK(s.dim() == 2);
    CHECK(s.contains(Vec{3, 6 % 5, 1}));
    CHECK_FALSE(s.contains(Vec{0, 1, 0}));
    CHECK(Subspace::full(5, 3).contains(s));
    CHECK(s.contains(Subspace::zero(5, 3)));

    // canonical basis: same span, same rows
    Subspace t = Subspace::span_of(5, 3, {{0, 0, 1}, {1, 2, 0}});
    CHECK(s == t);
}

TEST_CASE("sum intersect and complement are consistent", "[fpla]") {
    Subspace a = Subspace::span_of(3, 4, {{1, 0, 0, 0}, {0, 1, 0, 0}});
    Subspace b = Subspace::span_of(3, 4, {{0, 1, 0, 0}, {0, 0, 1, 0}});
    CHECK(sum(a, b).dim() == 3);
    Subspace meet = intersect(a, b);
    CHECK(meet.dim() == 1);
    CHECK(meet.contains(Vec{0, 1, 0, 0}));

    Subspace c = complement_within(a, sum(a, b));
    CHECK(c.dim() == 1);
    CHECK(intersect(a, c).dim() == 0);
    CHECK(sum(a, c) == sum(a, b));
    CHECK_THROWS_AS(complement_within(b, a), error);  // b is not inside a
}

TEST_CASE("kernel and column space of a map", "[fpla]") {
    Mat m = from_rows(3, {{1, 1, 0}, {0, 0, 0}});
    Subspace ker = Subspace::kernel_of_matrix(m);
    CHECK(ker.dim() == 2);
    CHECK(ker.contains(Vec{1, 2, 0}));
    Subspace img = Subspace::column_space(m);
    CHECK(img.dim() == 1);
    CHECK(img.contains(Vec{1, 0}));
}

TEST_CASE("map_by pushes a subspace through a matrix", "[fpla]") {
    Subspace s = Subspace::span_of(3, 2, {{1, 0}});
    Mat rot = from_rows(3, {{0, 1}, {1, 0}});
    CHECK(s.map_by(rot) == Subspace::span_of(3, 2, {{0, 1}}));
}

TEST_CASE("solve returns a particular solution or nothing", "[fpla]") {
    Mat a = from_rows(3, {{1, 2}, {2, 4}});
    auto x = solve(a, {1, 2});
    REQUIRE(x.has_value());
    CHECK(a.apply(*x) == Vec{1, 2});
    CHECK_FALSE(solve(a, {1, 0}).has_value());
    CHECK_THROWS_AS(solve(a, {1, 2, 3}), error);
}

TEST_CASE("solve_stacked couples several constraints", "[fpla]") {
    Mat a = from_rows(3, {{1, 0}});
    Mat b = from_rows(3, {{0, 1}});
    auto x = solve_stacked({a, b}, {{2}, {1}});
    REQUIRE(x.has_value());
    CHECK(*x == Vec{2, 1});
    Mat c = from_rows(3, {{1, 0}});
    CHECK_FALSE(solve_stacked({a, c}, {{1}, {2}}).has_value());
}

TEST_CASE("vstack and concat validate shapes", "[fpla]") {
    Mat a = from_rows(3, {{1, 2}});
    Mat b = from_rows(3, {{0, 1}, {1, 0}});
    Mat s = vstack({a, b});
    CHECK(s.rows() == 3);
    CHECK(s.row(2) == Vec{1, 0});
    CHECK_THROWS_AS(vstack({a, Mat(3, 1, 3)}), error);
    CHECK_THROWS_AS(vstack({}), error);
    CHECK(concat({{1, 2}, {}, {3}}) == Vec{1, 2, 3});
}

TEST_CASE("seeded generator is reproducible and rejection sampling is in range", "[fpla]") {
    Xorshift64Star a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Xorshift64Star c(0), d(1);
    CHECK(c.next() != d.next());  // zero seed is remapped, not sticky
    Xorshift64Star e(7);
    for (int i = 0; i < 1000; ++i) CHECK(e.below(13) < 13);
    CHECK_THROWS_AS(e.below(0), error);
    CHECK(random_matrix(3, 4, 4, 9) == random_matrix(3, 4, 4, 9));
    CHECK(random_matrix(3, 4, 4, 9) != random_matrix(3, 4, 4, 10));
}

TEST_CASE("error types carry structured context", "[fpla]") {
    parse_error pe(7, "bad token");
    CHECK(pe.line == 7);
    CHECK(std::string(pe.what()) == "line 7: bad token");
    check_failure cf("some_clause", "witness here");
    CHECK(cf.clause == "some_clause");
    CHECK(std::string(cf.what()) == "some_clause: witness here");
    CHECK_THROWS_AS(throw internal_error("x"), error);  // all errors share a base
}
