#include "quadsurf/polyparse.hpp"
#include "malformed_corpus.hpp"
#include "support.hpp"

#include <doctest.h>

#include <string>
#include <vector>

using namespace quadsurf;
using namespace quadsurf::testing;

namespace {

Mat3 sym(std::initializer_list<std::initializer_list<long>> num, long den = 1) {
    Mat3 m;
    int i = 0;
    for (const auto &row : num) {
        int j = 0;
        for (long v : row) m[i][j++] = make_rational(v, den);
        ++i;
    }
    return m;
}

}  // namespace

TEST_SUITE("polyparse") {

TEST_CASE("forms parse to symmetric coefficient matrices") {
    CHECK(parse_form("x1*x2 + x3^2").coeff() == sym({{0, 1, 0}, {1, 0, 0}, {0, 0, 2}}, 2));
    CHECK(parse_form("x1^2 - 2/3*x2*x3").coeff() == sym({{3, 0, 0}, {0, 0, -1}, {0, -1, 0}}, 3));
    CHECK(parse_form("0").is_zero());
    CHECK(parse_form("  -x1*x1 ").coeff() == sym({{-1, 0, 0}, {0, 0, 0}, {0, 0, 0}}));
}

TEST_CASE("degree errors") {
    try {
        parse_form("x1^3");
        FAIL("expected DegreeError");
    } catch (const DegreeError &e) {
        CHECK(e.position() == 0);
    }
    CHECK_THROWS_AS(parse_form("x1^2 + x2"), DegreeError);
    CHECK_THROWS_AS(parse_form("x1^2 + 3"), DegreeError);
}

TEST_CASE("pairs") {
    QuadPair r0 = parse_pair("P = x1*x2; Q = x1*x3");
    CHECK(r0.p == parse_form("x1*x2"));
    CHECK(r0.q == parse_form("x1*x3"));
    QuadPair tw = parse_pair("P = x1*x2 + x3^2; Q = x1^2;");
    CHECK(tw.p == parse_form("x3^2 + x1*x2"));
    CHECK_THROWS_AS(parse_pair("Q = x1^2; P = x1*x2"), MissingComponent);
    CHECK_THROWS_AS(parse_pair("P = x1^2"), MissingComponent);
}

TEST_CASE("pair files skip comments and blank lines") {
    auto pairs = parse_pair_file("# presets\n\nP = x1*x2; Q = x1*x3  # r0\nP = x1^2 + x2^2; Q = x2^2 + x3^2\n");
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[1].q == parse_form("x2^2 + x3^2"));
    try {
        parse_pair_file("P = x1^2; Q = x2^2\nP = x1^2; Q = x2^");
        FAIL("expected ParseError");
    } catch (const ParseError &e) {
        CHECK(e.position() == 36);
    }
}

TEST_CASE("formatting") {
    CHECK(format_form(QuadraticForm(sym({{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}))) == "x1^2 + x2^2");
    CHECK(format_form(QuadraticForm()) == "0");
    CHECK(format_form(QuadraticForm(sym({{0, 1, 0}, {1, 0, 0}, {0, 0, 2}}, 2))) == "x3^2 + x1*x2");
    CHECK(format_form(parse_form("x1^2 - 2/3*x2*x3")) == "x1^2 - 2/3*x2*x3");
}

TEST_CASE("malformed corpus yields positioned errors") {
    for (const auto &m : malformed_corpus()) {
        CAPTURE(m.text);
        try {
            parse_form(m.text);
            FAIL("accepted malformed input");
        } catch (const ParseError &e) {
            CHECK(e.position() == m.offset);
            CHECK(e.position() <= std::string(m.text).size());
            CHECK_FALSE(e.expected().empty());
            CHECK_FALSE(e.found().empty());
        }
    }
}

TEST_CASE("format then parse is the identity on random forms") {
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 1000; ++k) {
        Mat3 m = random_symmetric(rng);
        if (k % 7 == 0) m[0][1] = m[1][0] = 0;
        if (k % 11 == 0) m[2][2] = 0;
        QuadraticForm f(m);
        CAPTURE(format_form(f));
        CHECK(parse_form(format_form(f)) == f);
    }
}

TEST_CASE("whitespace and redundant signs do not change the matrix") {
    QuadraticForm ref = parse_form("x1^2 - x2*x3");
    CHECK(parse_form("  x1 ^ 2-x2 * x3") == ref);
    CHECK(parse_form("+x1^2 + -x2*x3") == ref);
    CHECK(parse_form("x1^2 - + x2*x3") == ref);
}

}
