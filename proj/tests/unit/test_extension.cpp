#include "quadsurf/extension.hpp"
#include "quadsurf/oscillatory.hpp"
#include "quadsurf/presets.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

using namespace quadsurf;

namespace {

SurfaceSpec preset_surface(const char *name) { return SurfaceSpec::from_pair(find_preset(name)->pair); }

Box3 random_box(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0, 1);
    Box3 b;
    for (int i = 0; i < 3; ++i) {
        double a = u(rng), c = u(rng);
        if (std::fabs(a - c) < 0.05) c = std::fmod(a + 0.3, 1.0);
        b.lo[i] = std::min(a, c);
        b.hi[i] = std::max(a, c);
    }
    return b;
}

}  // namespace

TEST_SUITE("extension") {

TEST_CASE("indicator values at the origin") {
    for (const auto &p : normal_form_presets()) {
        SurfaceSpec s = SurfaceSpec::from_pair(p.pair);
        CHECK(std::abs(evaluate_point(s, BoxIndicator{}, EvalPoint{}, 64) - cplx(1, 0)) < 1e-13);
    }
    SurfaceSpec tw = preset_surface("dfail-twisted");
    Box3 f1{{0, 0, 0}, {1.0 / 64, 1, 1.0 / 8}};
    CHECK(std::abs(evaluate_point(tw, BoxIndicator{f1}, EvalPoint{}, 512) - std::pow(64.0, -1.5)) < 1e-15);
}

TEST_CASE("closed-form box slices") {
    Box3 unit;
    CHECK(std::abs(closed_form_box_slice(unit, {0, 0, 0}) - 1.0) < 1e-15);
    CHECK(std::abs(closed_form_box_slice(unit, {3, 0, 0})) < 1e-15);
    Box3 half{{0, 0, 0}, {0.5, 0.5, 0.5}};
    cplx expected = std::pow(cplx(0, 1 / M_PI), 3);
    CHECK(std::abs(closed_form_box_slice(half, {1, 1, 1}) - expected) < 1e-14);
    CHECK(std::abs(interval_transform(0, 2, 1e-12) - 2.0) < 1e-10);
}

TEST_CASE("midpoint rule agrees with closed-form slices") {
    // Errors are relative to the box volume, which bounds |Ef| everywhere.
    SurfaceSpec s = preset_surface("cm-oberlin");
    auto worst_error = [&](int n) {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-4, 4);
        double worst = 0;
        for (int k = 0; k < 100; ++k) {
            Box3 b = random_box(rng);
            EvalPoint x{{u(rng), u(rng), u(rng)}, 0, 0};
            cplx exact = closed_form_box_slice(b, x.x_prime);
            worst = std::max(worst, std::abs(evaluate_point(s, BoxIndicator{b}, x, n) - exact) / b.volume());
        }
        return worst;
    };
    double e256 = worst_error(256);
    CHECK(e256 <= 1e-3);
    CHECK(e256 < worst_error(128) / 3);
}

TEST_CASE("FFT field matches direct evaluation on shared lattice points") {
    SurfaceSpec s = preset_surface("dfail-twisted");
    FunctionSpec f = Gaussian{{0.4, 0.5, 0.6}, {0.2, 0.15, 0.25}};
    Field field = evaluate_field(s, f, 1.5, -2.25, 32, 2);
    REQUIRE(field.lattice.count[0] == 64);
    double worst = 0;
    for (auto [i, j, k] : {std::array<int, 3>{32, 32, 32}, {0, 5, 63}, {40, 17, 9}, {63, 63, 0}, {31, 33, 48}}) {
        EvalPoint x{field.lattice.point(i, j, k), 1.5, -2.25};
        worst = std::max(worst, std::abs(field.at(i, j, k) - evaluate_point(s, f, x, 32)));
    }
    CHECK(worst <= 1e-10);

    Field at_zero = evaluate_field(s, BoxIndicator{}, 0.75, 0.5, 16, 1);
    EvalPoint origin{{0, 0, 0}, 0.75, 0.5};
    CHECK(std::abs(at_zero.at(8, 8, 8) - evaluate_point(s, BoxIndicator{}, origin, 16)) < 1e-12);
}

TEST_CASE("lattice contraction matches direct evaluation") {
    SurfaceSpec s = preset_surface("r1-triple");
    Lattice lat{{-3, 0.5, 2}, {0.7, 1.1, -0.4}, {3, 4, 2}};
    FunctionSpec f = BoxIndicator{{{0.1, 0.2, 0.3}, {0.8, 0.9, 0.6}}};
    Field field = evaluate_lattice(s, f, -1.25, 3.5, 48, lat);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 2; ++k) {
                EvalPoint x{lat.point(i, j, k), -1.25, 3.5};
                CHECK(std::abs(field.at(i, j, k) - evaluate_point(s, f, x, 48)) < 1e-12);
            }
}

TEST_CASE("field at x4 = x5 = 0 is the product of interval transforms") {
    SurfaceSpec s = preset_surface("cm-oberlin");
    Box3 b{{0.25, 0, 0.5}, {0.75, 1, 1}};
    Field field = evaluate_field(s, BoxIndicator{b}, 0, 0, 64, 1);
    double worst = 0;
    for (int i = 20; i < 44; i += 5)
        for (int j = 24; j < 40; j += 3)
            for (int k = 28; k < 36; ++k)
                worst = std::max(worst, std::abs(field.at(i, j, k) -
                                                 closed_form_box_slice(b, field.lattice.point(i, j, k))));
    CHECK(worst < 1e-12);
}

TEST_CASE("linearity and the L1 bound") {
    SurfaceSpec s = preset_surface("dfail-hyperbolic");
    Box3 a{{0, 0, 0}, {0.5, 1, 1}}, b{{0.25, 0.5, 0}, {1, 1, 0.5}};
    EvalPoint x{{1.3, -0.7, 2.1}, 0.9, -1.6};
    cplx ea = evaluate_point(s, BoxIndicator{a}, x, 128);
    cplx eb = evaluate_point(s, BoxIndicator{b}, x, 128);
    cplx sum = evaluate_point(s, SignedBoxSum{{{a, 1}, {a, 1}, {b, -1}, {b, -1}, {b, -1}}}, x, 128);
    CHECK(std::abs(sum - (2.0 * ea - 3.0 * eb)) < 1e-13);
    CHECK(std::abs(ea) <= a.volume() + 1e-14);
    CHECK(std::abs(sum) <= 2 * a.volume() + 3 * b.volume() + 1e-14);
}

TEST_CASE("Gaussian inputs converge with the grid") {
    SurfaceSpec s = preset_surface("cm-oberlin");
    FunctionSpec g = Gaussian{{0.5, 0.5, 0.5}, {0.1, 0.12, 0.08}};
    EvalPoint x{{2, -1, 3}, 4, -2};
    cplx ref = evaluate_point(s, g, x, 512);
    double e64 = std::abs(evaluate_point(s, g, x, 64) - ref);
    double e128 = std::abs(evaluate_point(s, g, x, 128) - ref);
    CHECK(e128 < e64);
    CHECK(e128 < 1e-6);
}

TEST_CASE("validity window") {
    SurfaceSpec s = preset_surface("cm-oberlin");
    CHECK(in_validity_window(s, EvalPoint{{10, 0, 0}, 0, 0}, 64));
    CHECK_FALSE(in_validity_window(s, EvalPoint{{0, 0, 0}, 0, 200}, 256));
}

TEST_CASE("grid sample files round-trip") {
    GridSamples g;
    g.n = {4, 4, 4};
    for (int i = 0; i < 64; ++i) g.values.emplace_back(0.5 * i, -1.0 / (i + 1));
    auto path = std::filesystem::temp_directory_path() / "quadsurf_grid_test.bin";
    write_grid_samples(path.string(), g);
    GridSamples back = read_grid_samples(path.string());
    CHECK(back.n == g.n);
    CHECK(back.values == g.values);
    SurfaceSpec s = preset_surface("r0");
    EvalPoint x{{0.3, 1, -2}, 0.5, 0.25};
    CHECK(std::abs(evaluate_point(s, back, x, 4) - evaluate_point(s, g, x, 4)) == 0);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_grid_samples(path.string()), InvalidFunction);
}

TEST_CASE("region norms") {
    Field f;
    f.lattice = Lattice{{0, 0, 0}, {0.5, 0.5, 0.5}, {3, 3, 3}};
    f.samples.assign(27, cplx(2, 0));
    FieldStack stack;
    stack.x4_nodes = {0, 1};
    stack.x5_nodes = {0, 1, 2};
    stack.fields.assign(6, f);
    Region5 region;
    region.lo = {0, 0, 0, 0, 0};
    region.hi = {1, 1, 1, 1, 2};
    NormEstimate est = norm_lq(stack, 4, region);
    CHECK(est.value == doctest::Approx(std::pow(16.0 * 2, 0.25)).epsilon(1e-12));
    region.hi[4] = 3;
    CHECK_THROWS_AS(norm_lq(stack, 4, region), RegionNotCovered);
}

TEST_CASE("square-function field") {
    SurfaceSpec s = preset_surface("dfail-twisted");
    Box3 a{{0, 0, 0}, {0.5, 1, 1}}, b{{0.5, 0, 0}, {1, 1, 1}};
    RealField one = square_function_field(s, {a}, 0.5, 0.25, 16, 1);
    Field ea = evaluate_field(s, BoxIndicator{a}, 0.5, 0.25, 16, 1);
    CHECK(std::fabs(one.values[1234] - std::norm(ea.samples[1234])) < 1e-13);
    RealField two = square_function_field(s, {a, b}, 0, 0, 16, 1);
    CHECK(two.values[two.lattice.index(8, 8, 8)] == doctest::Approx(0.5));
}

TEST_CASE("memory cap") {
    SurfaceSpec s = preset_surface("cm-oberlin");
    FieldOptions small;
    small.memory_cap_bytes = 1 << 20;
    CHECK_THROWS_AS(evaluate_field(s, BoxIndicator{}, 0, 0, 128, 1, small), GridTooLarge);
}

}

TEST_SUITE("oscillatory") {

TEST_CASE("block factorization matches the midpoint rule") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-6, 6);
    for (const auto &p : normal_form_presets()) {
        SurfaceSpec s = SurfaceSpec::from_pair(p.pair);
        for (int k = 0; k < 3; ++k) {
            EvalPoint x{{u(rng), u(rng), u(rng)}, u(rng), u(rng)};
            Box3 b{{0.1, 0, 0.2}, {0.7, 0.9, 1}};
            CAPTURE(p.name);
            CHECK(std::abs(box_extension_point(s, b, x, 4096) - evaluate_point(s, BoxIndicator{b}, x, 512)) < 2e-4);
        }
    }
}

TEST_CASE("variable blocks") {
    CHECK(variable_blocks(preset_surface("cm-oberlin")).size() == 3);
    auto tw = variable_blocks(preset_surface("dfail-twisted"));
    REQUIRE(tw.size() == 2);
    CHECK(tw[0] == std::vector<int>{0, 1});
    CHECK(tw[1] == std::vector<int>{2});
    CHECK(variable_blocks(preset_surface("r1-triple")).size() == 1);
}

TEST_CASE("Gauss-Legendre rules") {
    AxisRule r = gauss_panels(0, 2, 6, 3);
    double s = 0, s4 = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        s += r.weights[i];
        s4 += r.weights[i] * std::pow(r.nodes[i], 4);
    }
    CHECK(s == doctest::Approx(2).epsilon(1e-14));
    CHECK(s4 == doctest::Approx(32.0 / 5).epsilon(1e-13));
    CHECK_THROWS_AS(composite_gauss(0, 1, 1e6, 512), GridTooCoarse);
    CHECK_THROWS_AS(gauss_panels(0, 1, 7, 1), std::invalid_argument);
}

}
