#include "quadsurf/criteria.hpp"
#include "quadsurf/experiments.hpp"
#include "quadsurf/oscillatory.hpp"
#include "quadsurf/presets.hpp"
#include "quadsurf/report.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace quadsurf;

TEST_SUITE("experiments") {

TEST_CASE("exponent fits") {
    std::vector<std::pair<double, double>> sq, flat, noisy;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> noise(-1, 1);
    for (double R : {8.0, 16.0, 32.0, 64.0, 128.0}) {
        sq.emplace_back(R, R * R);
        flat.emplace_back(R, 3.0);
        noisy.emplace_back(R, std::pow(R, -1.5) * (1 + 0.01 * noise(rng)));
    }
    FitResult a = fit_exponent(sq);
    CHECK(a.slope == doctest::Approx(2).epsilon(1e-12));
    CHECK(a.max_residual < 1e-12);
    CHECK(a.n_points == 5);
    CHECK(std::fabs(fit_exponent(flat).slope) < 1e-12);
    CHECK(fit_exponent(noisy).slope == doctest::Approx(-1.5).epsilon(0.05 / 1.5));
    CHECK_THROWS_AS(fit_exponent({{1, 1}, {2, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(fit_exponent({{1, 1}, {2, 0}, {4, 4}}), NonPositiveValue);
}

TEST_CASE("Jacobian determinants") {
    CHECK(abs(jacobian_determinant(JacobianCase::Flat, {1, 0, 0}, {0, 0, 0})) == 1);
    CHECK(abs(jacobian_determinant(JacobianCase::Twisted, {1, 0, 2}, {0, 0, 0})) == 8);
    Vec3 xi{make_rational(3, 2), make_rational(-1, 3), 2}, xp{make_rational(-1, 5), 4, make_rational(7, 4)};
    CHECK(jacobian_determinant(JacobianCase::Flat, xi, xp) == -(xi[0] - xp[0]) * (xi[0] - xp[0]));
    CHECK(jacobian_determinant(JacobianCase::Twisted, xi, xp) == -4 * (xi[0] - xp[0]) * (xi[2] - xp[2]));
    CHECK_THROWS_AS(jacobian_relative_error(JacobianCase::Twisted, xi, xi), DegenerateSample);
    for (JacobianCase c : {JacobianCase::Twisted, JacobianCase::Flat}) {
        JacobianResult r = jacobian_check(c, 200, 42);
        CHECK(r.samples == 200);
        CHECK(r.max_relative_error == 0);
        CHECK(check_jacobian(r).pass);
    }
}

TEST_CASE("Knapp function value at the origin is its support volume") {
    SurfaceSpec s = SurfaceSpec::from_pair(find_preset("dfail-twisted")->pair);
    for (double R : {16.0, 64.0}) {
        Box3 b = knapp_function_box(KnappConfig::Twisted, R);
        CHECK(std::abs(evaluate_point(s, BoxIndicator{b}, EvalPoint{}, 256)) ==
              doctest::Approx(std::pow(R, -1.5)).epsilon(1e-12));
    }
    CHECK(knapp_volume_exponent(KnappConfig::Flat) == 1.0);
    Region5 r = knapp_region(KnappConfig::Twisted, 100);
    CHECK(r.hi[4] == doctest::Approx(100));
    REQUIRE(r.diamond_x1_x4);
    CHECK(*r.diamond_x1_x4 == doctest::Approx(1));
}

TEST_CASE("Knapp scan on a short R list") {
    ExperimentParams p;
    p.pair = find_preset("dfail-twisted")->pair;
    p.R_list = {8, 16, 32};
    p.N = 128;
    KnappOptions o;
    o.nodes_per_axis = 5;
    ExperimentReport rep = knapp_scan(p, o);
    REQUIRE(rep.series.size() == 2);
    REQUIRE(rep.series[0].fit);
    CHECK(rep.series[0].predicted_slope == doctest::Approx(-0.375));
    CHECK(rep.series[1].predicted_slope == doctest::Approx(0));
    CHECK(rep.extra("min_scaled_modulus") > 0.5);
    p.N = 64;
    CHECK_THROWS_AS(knapp_scan(p, o), GridTooCoarse);
    p.N = 128;
    p.memory_cap_bytes = 1024;
    CHECK_THROWS_AS(knapp_scan(p, o), GridTooLarge);
}

TEST_CASE("square-function partition") {
    auto boxes = square_function_partition(16);
    CHECK(boxes.size() == 16 * 4);
    double vol = 0;
    for (const auto &b : boxes) vol += b.volume();
    CHECK(vol == doctest::Approx(1));
    CHECK(square_function_partition(32).size() == 32 * 5);
}

TEST_CASE("decay along the x5 axis matches Fresnel integrals") {
    // ∫_0^1 e(t s²) ds for the elliptic preset at (0,0,0,0,t), mpmath reference values.
    SurfaceSpec s = SurfaceSpec::from_pair(find_preset("dfail-elliptic")->pair);
    const double ref[][3] = {{10, 0.078993675678833045, 0.071100702810309403},
                             {100, 0.024999366748617219, 0.024204226796297695},
                             {1000, 0.0079056878178475722, 0.007826116680386791},
                             {-37.5, 0.040829331906012726, -0.042946866290764009}};
    for (const auto &r : ref) {
        cplx v = box_extension_point(s, Box3{}, EvalPoint{{0, 0, 0}, 0, r[0]}, 65536);
        CAPTURE(r[0]);
        CHECK(std::fabs(v.real() - r[1]) < 1e-12);
        CHECK(std::fabs(v.imag() - r[2]) < 1e-12);
    }
}

TEST_CASE("decay scan structure") {
    auto dirs = sphere_directions(50);
    REQUIRE(dirs.size() == 50);
    for (const auto &d : dirs) {
        double n = 0;
        for (double v : d) n += v * v;
        CHECK(n == doctest::Approx(1).epsilon(1e-12));
    }
    DecayParams p;
    p.pair = find_preset("cm-oberlin")->pair;
    p.radii = {10, 20, 40};
    p.n_directions = 100;
    ExperimentReport rep = decay_scan(p);
    REQUIRE(rep.series.size() == 2);
    CHECK(rep.series[0].rows[0].R == 0);
    CHECK(rep.series[0].rows[0].measured == doctest::Approx(1).epsilon(1e-12));
    CHECK(rep.series[1].rows[0].measured == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("bilinear check inputs") {
    SeparatedBoxes close;
    close.a2 = 0.25;
    CHECK_THROWS_AS(close.validate(), NotSeparated);
    SeparatedBoxes outside;
    outside.a2 = 0.95;
    CHECK_THROWS_AS(outside.validate(), std::invalid_argument);

    BilinearParams zero;
    zero.amplitude1 = 0;
    zero.T_list = {1, 2};
    ExperimentReport rep = bilinear_l4_check(zero);
    for (const auto &row : rep.series[0].rows) CHECK(row.measured == 0);
}

TEST_CASE("bilinear oracle is symmetric under swapping the boxes") {
    SeparatedBoxes a;
    SeparatedBoxes b;
    std::swap(b.a1, b.a2);
    std::swap(b.b1, b.b2);
    BilinearOracle oa = bilinear_oracle(a, 4, 2), ob = bilinear_oracle(b, 4, 2);
    CHECK(oa.value == doctest::Approx(ob.value).epsilon(1e-12));
    CHECK(oa.value < bilinear_holder_bound(a));

    BilinearParams p;
    p.T_list = {1, 2};
    BilinearParams q = p;
    q.boxes = b;
    ExperimentReport ra = bilinear_l4_check(p), rb = bilinear_l4_check(q);
    for (std::size_t k = 0; k < 2; ++k)
        CHECK(ra.series[0].rows[k].measured == doctest::Approx(rb.series[0].rows[k].measured).epsilon(1e-9));
}

}

TEST_SUITE("report") {

TEST_CASE("CSV layout is fixed") {
    ExperimentReport rep;
    rep.experiment = "demo";
    rep.surface = "cm-oberlin";
    Series s;
    s.experiment = "demo";
    s.surface = "cm-oberlin";
    s.q = 4;
    s.predicted_slope = 2;
    for (double R : {2.0, 4.0, 8.0}) s.rows.push_back({R, R * R, 2, ""});
    s.fit_rows();
    rep.series = {s};
    std::string csv = csv_string(rep);
    CHECK(csv.rfind("experiment,surface,R,q,p,measured,predicted_slope,fitted_slope,residual\n", 0) == 0);
    CHECK(csv.find("demo,cm-oberlin,2.0000000000e+00,4.0000000000e+00,nan,4.0000000000e+00,2.0000000000e+00,"
                   "2.0000000000e+00,") != std::string::npos);
    CHECK(csv == csv_string(rep));

    nlohmann::json j = to_json(rep);
    CHECK(j["series"][0]["fit"]["slope"].get<double>() == doctest::Approx(2));
    CHECK(j["series"][0]["p"].is_null());
    CHECK(j.size() == 4);
}

TEST_CASE("criteria on synthetic reports") {
    ExperimentReport rep;
    Series s;
    s.experiment = "decay-normalized";
    s.predicted_slope = 0;
    s.fit = FitResult{0.03, 0, 0, 5};
    rep.series = {s};
    CHECK(check_decay(rep).pass);
    rep.series[0].fit->slope = -0.06;
    CHECK_FALSE(check_decay(rep).pass);

    ExperimentReport bil;
    bil.extras = {{"monotone", 1}, {"saturation", 0.95}};
    CHECK(check_bilinear(bil).pass);
    bil.extras = {{"monotone", 1}, {"saturation", 0.85}};
    CHECK_FALSE(check_bilinear(bil).pass);
}

TEST_CASE("classification certificates serialize") {
    ClassificationCertificate c = classify(find_preset("r1-double-def")->pair);
    nlohmann::json j = to_json(c);
    CHECK(j["label"] == to_string(ClassLabel::R1_DoubleRoot_Definite));
    CHECK(j["d_prime"] == 1);
    CHECK(j["signature_at_repeated_root"]["zero"] == 1);
    CHECK(certificate_table(c).find("label") == 0);
}

}
