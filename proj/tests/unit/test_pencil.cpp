#include "quadsurf/pencil.hpp"
#include "quadsurf/pencil_numeric.hpp"
#include "quadsurf/polyparse.hpp"
#include "quadsurf/presets.hpp"
#include "support.hpp"

#include <doctest.h>

#include <map>
#include <string>

using namespace quadsurf;
using namespace quadsurf::testing;

namespace {

QuadPair pair_of(const char *text) { return parse_pair(text); }

BinaryCubic cubic(long a, long b, long c, long d) { return BinaryCubic{{a, b, c, d}}; }

Mat2 transpose2(const Mat2 &m) { return {{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; }

bool definite(const Inertia &i) { return i.n_pos == 0 || i.n_neg == 0; }

}  // namespace

TEST_SUITE("pencil") {

TEST_CASE("pencil cubics of the normal forms") {
    const std::map<std::string, BinaryCubic> expected{
        {"cm-oberlin", cubic(0, 8, 8, 0)},      {"dfail-elliptic", cubic(0, 8, 0, 0)},
        {"dfail-hyperbolic", cubic(0, -8, 0, 0)}, {"dfail-twisted", cubic(-2, 0, 0, 0)},
        {"r1-triple", cubic(0, 0, 0, -2)},      {"r1-double-def", cubic(0, -2, 0, 0)},
        {"r1-double-indef", cubic(0, 2, 0, 0)}, {"r0", cubic(0, 0, 0, 0)},
    };
    for (const auto &p : normal_form_presets()) {
        CAPTURE(p.name);
        CHECK(pencil_cubic(p.pair) == expected.at(p.name));
    }
}

TEST_CASE("root patterns") {
    CHECK(root_pattern(cubic(0, 0, 0, 0)).kind == RootKind::IdenticallyZero);

    RootPattern triple = root_pattern(cubic(-8, 0, 0, 0));
    CHECK(triple.kind == RootKind::TripleReal);
    REQUIRE(triple.repeated_root_direction);
    CHECK(*triple.repeated_root_direction == Direction{0, 1});

    RootPattern dbl = root_pattern(cubic(0, 1, 0, 0));
    CHECK(dbl.kind == RootKind::DoubleSimpleReal);
    REQUIRE(dbl.repeated_root_direction);
    REQUIRE(dbl.simple_root_direction);
    CHECK(*dbl.repeated_root_direction == Direction{0, 1});
    CHECK(*dbl.simple_root_direction == Direction{1, 0});
    CHECK(dbl.simple_real_roots_count == 1);

    CHECK(root_pattern(cubic(1, 0, 1, 0)).kind == RootKind::OneRealPlusComplexPair);
    RootPattern three = root_pattern(cubic(0, 8, 8, 0));
    CHECK(three.kind == RootKind::ThreeDistinctReal);
    CHECK(three.simple_real_roots_count == 3);
}

TEST_CASE("irreducibility") {
    IrreducibilityResult dep = is_irreducible(pair_of("P = x1^2; Q = 2*x1^2"));
    CHECK_FALSE(dep.irreducible);
    CHECK(dep.dependency.has_value());

    IrreducibilityResult ker = is_irreducible(pair_of("P = x1^2; Q = x1*x2"));
    CHECK_FALSE(ker.irreducible);
    REQUIRE(ker.common_kernel);
    CHECK(normalize_projective(*ker.common_kernel) == Vec3{0, 0, 1});

    CHECK(is_irreducible(pair_of("P = x1*x2; Q = x1*x3")).irreducible);
}

TEST_CASE("condition (D)") {
    DConditionResult ell = check_D(pair_of("P = x1^2 + x2^2; Q = x3^2"));
    CHECK_FALSE(ell.holds);
    REQUIRE(ell.witness_w);
    CHECK(normalize_projective(*ell.witness_w) == Vec3{0, 0, 1});
    CHECK_FALSE(check_D(pair_of("P = x1*x2 + x3^2; Q = x1^2")).holds);
    CHECK(check_D(pair_of("P = x1*x2; Q = x1*x3")).holds);
}

TEST_CASE("rank condition") {
    RankConditionResult r0 = check_R(pair_of("P = x1*x2; Q = x1*x3"));
    CHECK(r0.d_prime == 0);
    REQUIRE(r0.witness_normal.is_rational());
    CHECK(normalize_projective(r0.witness_normal.rational_part) == Vec3{1, 0, 0});
    CHECK(check_R(pair_of("P = x1*x2; Q = x1*x3 + x2^2")).d_prime == 1);
    CHECK(check_R(pair_of("P = x1^2 + x2^2; Q = x2^2 + x3^2")).d_prime == 2);

    const std::map<std::string, int> expected{{"cm-oberlin", 2}, {"dfail-elliptic", 2}, {"dfail-hyperbolic", 1},
                                              {"dfail-twisted", 1}, {"r1-triple", 1}, {"r1-double-def", 1},
                                              {"r1-double-indef", 1}, {"r0", 0}};
    for (const auto &p : normal_form_presets()) {
        CAPTURE(p.name);
        CHECK(check_R(p.pair).d_prime == expected.at(p.name));
    }
}

TEST_CASE("condition (CM)") {
    CHECK(check_CM(pair_of("P = x1^2 + x2^2; Q = x2^2 + x3^2")).holds);
    CMDecision tw = check_CM(pair_of("P = x1*x2 + x3^2; Q = x1^2"));
    CHECK_FALSE(tw.holds);
    REQUIRE(tw.max_real_root_multiplicity);
    CHECK(*tw.max_real_root_multiplicity == 3);
    CHECK(tw.critical_gamma == make_rational(1, 3));
    CMDecision zero = check_CM(pair_of("P = x1*x2; Q = x1*x3"));
    CHECK_FALSE(zero.holds);
    CHECK_FALSE(zero.max_real_root_multiplicity.has_value());
}

TEST_CASE("signatures") {
    CHECK(signature_at(pair_of("P = x1*x2; Q = x1^2 + x3^2"), {0, 1}) == Inertia{2, 0, 1});
    CHECK(signature_at(pair_of("P = x1*x2; Q = x1^2 - x3^2"), {0, 1}) == Inertia{1, 1, 1});
    CHECK(signature_at(pair_of("P = x1^2 + x2^2 + x3^2; Q = x1*x2"), {1, 0}) == Inertia{3, 0, 0});
    CHECK_THROWS_AS(signature_at(pair_of("P = x1*x2; Q = x1*x3"), {0, 0}), ZeroDirection);
}

TEST_CASE("normal forms classify to their labels") {
    for (const auto &p : normal_form_presets()) {
        CAPTURE(p.name);
        CHECK(classify(p.pair).label == p.label);
    }
    CHECK(classify(pair_of("P = x1*x2; Q = x1^2 - x3^2")).label == ClassLabel::R1_DoubleRoot_Indefinite);
    CHECK(classify(pair_of("P = x1^2; Q = 2*x1^2")).label == ClassLabel::Reducible);
}

TEST_CASE("classification is invariant under random equivalences") {
    std::mt19937_64 rng(20240611);
    for (const auto &p : normal_form_presets()) {
        ClassificationCertificate base = classify(p.pair);
        for (int k = 0; k < 20; ++k) {
            QuadPair conj = apply_equivalence(p.pair, random_equivalence(rng));
            CAPTURE(p.name);
            CAPTURE(format_pair(conj));
            ClassificationCertificate c = classify(conj);
            CHECK(c.label == p.label);
            REQUIRE(c.r_result);
            CHECK(c.cm.holds == (c.d_result.holds && c.r_result->d_prime == 2));
            if (base.signature_at_repeated_root) {
                REQUIRE(c.signature_at_repeated_root);
                CHECK(definite(*c.signature_at_repeated_root) == definite(*base.signature_at_repeated_root));
            }
        }
    }
}

TEST_CASE("cubic covariance under equivalence") {
    std::mt19937_64 rng(77);
    for (int k = 0; k < 100; ++k) {
        QuadPair pair{QuadraticForm(random_symmetric(rng)), QuadraticForm(random_symmetric(rng))};
        Equivalence e = random_equivalence(rng);
        Rational d = det(e.m1());
        BinaryCubic lhs = pencil_cubic(apply_equivalence(pair, e));
        BinaryCubic rhs = pencil_cubic(pair).substitute(transpose2(e.m2())).scaled(d * d);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("equivalence examples") {
    QuadPair r0 = pair_of("P = x1*x2; Q = x1*x3");
    CHECK(apply_equivalence(r0, Equivalence::identity()) == r0);
    Mat3 perm = zero3();
    perm[0][0] = perm[1][2] = perm[2][1] = 1;
    Mat2 swap{{{0, 1}, {1, 0}}};
    CHECK(verify_equivalence(r0, r0, Equivalence(perm, swap)));
    CHECK_FALSE(verify_equivalence(r0, pair_of("P = x1^2; Q = x2^2"), Equivalence::identity()));

    Mat3 hyp = zero3();
    hyp[0][0] = hyp[0][1] = hyp[1][0] = hyp[2][2] = 1;
    hyp[1][1] = -1;
    Mat2 comp{{{make_rational(1, 4), 0}, {0, 1}}};
    CHECK(verify_equivalence(pair_of("P = x1^2 - x2^2; Q = x3^2"), pair_of("P = x1*x2; Q = x3^2"),
                             Equivalence(hyp, comp)));
    CHECK_THROWS_AS(Equivalence(zero3(), swap), std::invalid_argument);
}

TEST_CASE("adjugate restricts the determinant to hyperplanes") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        Mat3 a = random_symmetric(rng);
        Vec3 u{random_rational(rng), random_rational(rng), random_rational(rng)};
        Vec3 v{random_rational(rng), random_rational(rng), random_rational(rng)};
        Vec3 w = cross(u, v);
        Mat2 restricted{{{bilinear(u, a, u), bilinear(u, a, v)}, {bilinear(v, a, u), bilinear(v, a, v)}}};
        CHECK(bilinear(w, adjugate(a), w) == det(restricted));
    }
}

TEST_CASE("adjugate conics vanish on the low-rank normal") {
    QuadPair r0 = pair_of("P = x1*x2; Q = x1*x3");
    Vec3 e1{1, 0, 0};
    for (const auto &conic : adjugate_conics(r0)) CHECK(bilinear(e1, conic, e1) == 0);
    CHECK(restricted_max_rank(r0, e1) == 0);
    CHECK(restricted_max_rank(pair_of("P = x1^2 + x2^2; Q = x2^2 + x3^2"), e1) == 2);
}

TEST_CASE("numeric rank search agrees with the exact verdict") {
    std::mt19937_64 rng(11);
    for (const auto &p : normal_form_presets()) {
        CAPTURE(p.name);
        RankConditionResult exact = check_R(p.pair);
        RankConditionResult numeric = check_R_numeric(p.pair);
        CHECK(numeric.d_prime == exact.d_prime);
        CHECK(numeric.method == RankMethod::NumericThenVerified);
        for (int k = 0; k < 5; ++k) {
            QuadPair conj = apply_equivalence(p.pair, random_equivalence(rng));
            CHECK(check_R_numeric(conj).d_prime == check_R(conj).d_prime);
        }
    }
}

TEST_CASE("rationalize finds small denominators") {
    CHECK(rationalize(0.3333333333333, 64) == make_rational(1, 3));
    CHECK(rationalize(-2.5, 64) == make_rational(-5, 2));
}

}
