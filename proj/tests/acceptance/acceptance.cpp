#include "quadsurf/criteria.hpp"
#include "quadsurf/experiments.hpp"
#include "quadsurf/extension.hpp"
#include "quadsurf/parallel.hpp"
#include "quadsurf/pencil.hpp"
#include "quadsurf/polyparse.hpp"
#include "quadsurf/presets.hpp"
#include "malformed_corpus.hpp"
#include "support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace quadsurf;
using namespace quadsurf::testing;

namespace {

struct Criterion {
    const char *name;
    double limit_seconds;
    std::function<CheckResult()> run;
};

Mat2 transpose2(const Mat2 &m) { return {{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; }

CheckResult classification_corpus() {
    std::mt19937_64 rng(1001);
    int cases = 0, wrong = 0, cm_mismatch = 0;
    for (const auto &p : normal_form_presets()) {
        std::vector<QuadPair> pairs{p.pair};
        for (int k = 0; k < 20; ++k) pairs.push_back(apply_equivalence(p.pair, random_equivalence(rng)));
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            ClassificationCertificate c = classify(pairs[k]);
            if (c.label != p.label) ++wrong;
            if (k == 0) continue;
            ++cases;
            bool r2 = c.r_result && c.r_result->d_prime == 2;
            if (c.cm.holds != (c.d_result.holds && r2)) ++cm_mismatch;
        }
    }
    return {wrong == 0 && cm_mismatch == 0 && cases == 160,
            std::to_string(cases) + " conjugates plus 8 presets, " + std::to_string(wrong) + " mislabelled, " +
                std::to_string(cm_mismatch) + " (CM) vs (D)+(R_2) mismatches"};
}

CheckResult cubic_covariance() {
    std::mt19937_64 rng(2002);
    int bad = 0;
    for (int k = 0; k < 100; ++k) {
        QuadPair pair{QuadraticForm(random_symmetric(rng)), QuadraticForm(random_symmetric(rng))};
        Equivalence e = random_equivalence(rng);
        Rational d = det(e.m1());
        if (pencil_cubic(apply_equivalence(pair, e)) !=
            pencil_cubic(pair).substitute(transpose2(e.m2())).scaled(d * d))
            ++bad;
    }
    return {bad == 0, "100 samples, " + std::to_string(bad) + " violations"};
}

CheckResult jacobian_identities() {
    CheckResult flat = check_jacobian(jacobian_check(JacobianCase::Flat, 200, 3003));
    CheckResult twisted = check_jacobian(jacobian_check(JacobianCase::Twisted, 200, 3004));
    return {flat.pass && twisted.pass, flat.detail + "; " + twisted.detail};
}

CheckResult knapp_scaling() {
    ExperimentParams p;
    p.surface_name = "dfail-twisted";
    p.pair = find_preset(p.surface_name)->pair;
    p.R_list = {16, 32, 64, 128};
    p.q = p.p = 4;
    p.N = 512;
    p.threads = default_thread_count();
    return check_knapp(knapp_scan(p));
}

CheckResult square_function_bound() {
    ExperimentParams p;
    p.surface_name = "dfail-twisted";
    p.pair = find_preset(p.surface_name)->pair;
    p.R_list = {16, 32, 64};
    p.threads = default_thread_count();
    SquareFnOptions o;
    o.q_list = {3.5, 4, 4.5};
    ExperimentReport rep = square_function_scan(p, o);
    CheckResult c = check_square_function(rep);
    bool threshold = rep.series[0].fit && rep.series[0].fit->slope > 0;
    c.pass = c.pass && threshold;
    if (!threshold) c.detail += "; slope at q=3.5 is not positive";
    return c;
}

CheckResult fourier_decay() {
    DecayParams p;
    p.surface_name = "cm-oberlin";
    p.pair = find_preset(p.surface_name)->pair;
    p.n_directions = 500;
    p.threads = default_thread_count();
    return check_decay(decay_scan(p));
}

CheckResult oracle_agreements() {
    std::mt19937_64 rng(7007);
    std::uniform_real_distribution<double> u(0, 1), ux(-4, 4), uw(-20, 20);
    SurfaceSpec cm = SurfaceSpec::from_pair(find_preset("cm-oberlin")->pair);
    double worst_closed = 0;
    for (int k = 0; k < 100; ++k) {
        Box3 b;
        for (int i = 0; i < 3; ++i) {
            double a = u(rng), c = u(rng);
            if (std::fabs(a - c) < 0.05) c = std::fmod(a + 0.3, 1.0);
            b.lo[i] = std::min(a, c);
            b.hi[i] = std::max(a, c);
        }
        EvalPoint x{{ux(rng), ux(rng), ux(rng)}, 0, 0};
        cplx exact = closed_form_box_slice(b, x.x_prime);
        worst_closed = std::max(worst_closed, std::abs(evaluate_point(cm, BoxIndicator{b}, x, 256) - exact) /
                                                  b.volume());
    }

    double worst_fft = 0;
    std::uniform_int_distribution<int> idx(0, 63);
    for (const auto &preset : normal_form_presets()) {
        SurfaceSpec s = SurfaceSpec::from_pair(preset.pair);
        FunctionSpec f = Gaussian{{0.45, 0.5, 0.55}, {0.2, 0.2, 0.2}};
        double x4 = uw(rng) / 4, x5 = uw(rng) / 4;
        Field field = evaluate_field(s, f, x4, x5, 32, 2);
        for (int k = 0; k < 12; ++k) {
            int i = idx(rng), j = idx(rng), l = idx(rng);
            EvalPoint x{field.lattice.point(i, j, l), x4, x5};
            worst_fft = std::max(worst_fft, std::abs(field.at(i, j, l) - evaluate_point(s, f, x, 32)));
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "closed form max error / ||f||_1 %.3e (limit 1e-3), FFT vs direct %.3e (limit 1e-10)",
                  worst_closed, worst_fft);
    return {worst_closed <= 1e-3 && worst_fft <= 1e-10, buf};
}

CheckResult bilinear_saturation() {
    BilinearParams p;
    p.threads = default_thread_count();
    return check_bilinear(bilinear_l4_check(p));
}

CheckResult parser_properties() {
    std::mt19937_64 rng(9009);
    int round_trip_failures = 0;
    for (int k = 0; k < 1000; ++k) {
        QuadraticForm f(random_symmetric(rng));
        if (!(parse_form(format_form(f)) == f)) ++round_trip_failures;
    }
    int position_failures = 0;
    for (const auto &m : malformed_corpus()) {
        try {
            parse_form(m.text);
            ++position_failures;
        } catch (const ParseError &e) {
            if (e.position() != m.offset) ++position_failures;
        }
    }
    return {round_trip_failures == 0 && position_failures == 0,
            "1000 round trips, " + std::to_string(round_trip_failures) + " failures; " +
                std::to_string(malformed_corpus().size()) + " malformed inputs, " +
                std::to_string(position_failures) + " wrong or missing positions"};
}

}  // namespace

int main(int argc, char **argv) {
    const std::vector<Criterion> criteria{
        {"classification corpus", 10, classification_corpus},
        {"cubic covariance", 5, cubic_covariance},
        {"Jacobian identities", 5, jacobian_identities},
        {"Knapp scaling", 300, knapp_scaling},
        {"square-function bound", 600, square_function_bound},
        {"Fourier decay", 300, fourier_decay},
        {"oracle agreements", 60, oracle_agreements},
        {"bilinear L4 saturation", 600, bilinear_saturation},
        {"parser", 5, parser_properties},
    };

    CLI::App app{"Acceptance criteria, one pass/fail line each"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    bool all_pass = true;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        if (only != 0 && static_cast<int>(k) + 1 != only) continue;
        const Criterion &c = criteria[k];
        auto start = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = c.run();
        } catch (const std::exception &e) {
            r = {false, std::string("error: ") + e.what()};
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = elapsed <= c.limit_seconds;
        bool pass = r.pass && in_time;
        all_pass = all_pass && pass;
        std::printf("criterion %zu [%s] %s: %s (%.1f s of %.0f s)\n", k + 1, pass ? "PASS" : "FAIL", c.name,
                    r.detail.c_str(), elapsed, c.limit_seconds);
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
