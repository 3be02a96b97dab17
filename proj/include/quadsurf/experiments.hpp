#pragma once

#include "quadsurf/extension.hpp"
#include "quadsurf/pencil.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace quadsurf {

class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonPositiveValue : public ExperimentError {
public:
    using ExperimentError::ExperimentError;
};

class NotSeparated : public ExperimentError {
public:
    using ExperimentError::ExperimentError;
};

class DegenerateSample : public ExperimentError {
public:
    using ExperimentError::ExperimentError;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ExperimentRow {
    double R = 0;
    double measured = 0;
    double predicted_exponent = kNaN;
    std::string notes;
};

struct FitResult {
    double slope = 0;
    double intercept = 0;
    double max_residual = 0;
    int n_points = 0;
};

// Least squares of log(value) against log(R). Needs at least three rows.
FitResult fit_exponent(const std::vector<std::pair<double, double>> &rows);

// One measured quantity across R, with its fit when one applies.
struct Series {
    std::string experiment;
    std::string surface;
    double q = kNaN;
    double p = kNaN;
    double predicted_slope = kNaN;
    std::vector<ExperimentRow> rows;
    std::optional<FitResult> fit;

    // Fits rows with R >= min_R and stores the result.
    void fit_rows(double min_R = 0);
};

struct ExperimentReport {
    std::string experiment;
    std::string surface;
    std::vector<Series> series;
    std::vector<std::pair<std::string, double>> extras;

    double extra(const std::string &key) const;
};

struct ExperimentParams {
    std::string surface_name = "dfail-twisted";
    QuadPair pair;
    std::vector<double> R_list{16, 32, 64, 128};
    double q = 4;
    double p = 4;
    int N = 512;
    int pad = 1;
    std::uint64_t seed = 0;
    int threads = 1;
    // Largest field or lattice an experiment may hold; GridTooLarge beyond.
    std::size_t memory_cap_bytes = std::size_t(1) << 30;

    // Throws std::invalid_argument unless R_list is increasing with every
    // R >= 4 and q, p >= 1.
    void validate() const;
};

// Knapp function and region. Twisted: f = 1 on [0,1/R]×[0,1]×[0,R^-1/2],
// region |x1|+|x4| ≤ R/100, |x2| ≤ 1/100, |x3| ≤ R^1/2/100, |x5| ≤ R²/100.
// Flat: f = 1 on [0,1/R]×[0,1]², region |x1|,|x4|,|x5| ≤ R/100,
// |x2|,|x3| ≤ 1/100.
enum class KnappConfig { Twisted, Flat };

Box3 knapp_function_box(KnappConfig config, double R);
Region5 knapp_region(KnappConfig config, double R);
// Exponent a with vol(support) = R^-a.
double knapp_volume_exponent(KnappConfig config);

struct KnappOptions {
    int nodes_per_axis = 9;
    // Default: Flat for the R0 class, Twisted otherwise.
    std::optional<KnappConfig> config;
};

// Series 0 is the region L^q norm, series 1 the norm divided by ‖f‖_p.
// Extras: min over region nodes of R^a·|E f| (a from knapp_volume_exponent).
ExperimentReport knapp_scan(const ExperimentParams &params, const KnappOptions &options = {});

struct SquareFnOptions {
    std::vector<double> q_list{4};
    // (x4, x5) window |x4| ≤ Y·R, |x5| ≤ Y·R².
    double window = 2;
    // Graded rule: Gauss–Legendre panels halving in width toward x4 = 0 and
    // x5 = 0 until the inner panel is 1/(grading·R) of the window. Otherwise
    // a nodes_x45 × nodes_x45 midpoint grid.
    bool graded = true;
    int grading = 16;
    int nodes_per_panel = 4;
    int nodes_x45 = 8;
    // x' lattice spacing as a fraction of the dual box length.
    double spacing_fraction = 0.125;
    // x' patch margin in dual box lengths.
    double margin = 6;
    // Random-sign trials for the optional Khintchine cross-check.
    int mc_trials = 0;
};

// R intervals of length 1/R in ξ1, the whole ξ2 range, and ⌊√R⌋ intervals of
// length R^-1/2 in ξ3, on [0,1]³.
std::vector<Box3> square_function_partition(double R);

// One series per q: ∫(Σ_□|E 1_□|²)^{q/2} over the window, predicted slope
// 6 − 3q/2. Requires every cross-term block of the surface to have at most
// two variables.
ExperimentReport square_function_scan(const ExperimentParams &params, const SquareFnOptions &options = {});

struct DecayParams {
    std::string surface_name = "cm-oberlin";
    QuadPair pair;
    std::vector<double> radii;  // empty: 13 geometric radii from 10 to 1000
    int n_directions = 500;
    int N = 65536;  // Gauss–Legendre node budget per axis
    int threads = 1;
};

// Quasi-uniform points on S⁴: Halton points in bases 2, 3, 5, 7, 11 mapped
// through the inverse normal distribution and normalized.
std::vector<std::array<double, 5>> sphere_directions(int n);

// Series 0: sup over directions of |E 1(r·ω)|; series 1: that sup times
// (1+r)^{1/2}, fitted over r ≥ 10. r = 0 is always included.
ExperimentReport decay_scan(const DecayParams &params);

// Twisted: surface (ξ1ξ2+ξ3², ξ1²), map (ξ+ξ', P(ξ)+P(ξ'), Q(ξ)+Q(ξ'), ξ2),
// |det| = 4|ξ1−ξ1'||ξ3−ξ3'|. Flat: surface (ξ1ξ2, ξ1ξ3), map
// (ξ+ξ', ξ1ξ2+ξ1'ξ2', ξ1ξ3+ξ1'ξ3', ξ1), |det| = |ξ1−ξ1'|².
enum class JacobianCase { Twisted, Flat };

std::string to_string(JacobianCase c);

// Exact determinant of the 6×6 Jacobian at (ξ, ξ').
Rational jacobian_determinant(JacobianCase c, const Vec3 &xi, const Vec3 &xi_prime);
Rational jacobian_closed_form(JacobianCase c, const Vec3 &xi, const Vec3 &xi_prime);

struct JacobianResult {
    JacobianCase jcase = JacobianCase::Twisted;
    int samples = 0;
    int degenerate = 0;
    Rational max_relative_error = 0;
};

// Random rational samples; throws DegenerateSample where the closed form
// vanishes.
Rational jacobian_relative_error(JacobianCase c, const Vec3 &xi, const Vec3 &xi_prime);
JacobianResult jacobian_check(JacobianCase c, int n_samples, std::uint64_t seed);

// Q_i = [a_i, a_i+l1]×[0,1]×[b_i, b_i+l2].
struct SeparatedBoxes {
    double a1 = 0, a2 = 0.625, b1 = 0, b2 = 0.625;
    double l1 = 0.125, l2 = 0.125;

    // Throws NotSeparated unless |a1−a2| ≥ 5·l1 and |b1−b2| ≥ 5·l2, and
    // std::invalid_argument if a box leaves [0,1]³.
    void validate() const;
    Box3 box(int i) const;
};

struct BilinearParams {
    SeparatedBoxes boxes;
    // f_i = amplitude_i · 1_{Q_i}.
    double amplitude1 = 1;
    double amplitude2 = 1;
    std::vector<double> T_list{2, 4, 8, 16, 32};
    std::array<double, 5> spacing{1, 0.25, 1, 0.25, 1};
    int N = 512;  // Gauss–Legendre node budget per axis
    int oracle_order = 6;
    int oracle_panels = 3;
    int threads = 1;
};

struct BilinearOracle {
    double value = 0;
    double error_estimate = 0;  // difference to one panel fewer
};

// ∫∫|f1(ξ)|²|f2(ξ')|² J⁻¹ on the image of the sum map for the surface
// (ξ1ξ2+ξ3², ξ1²), evaluated as ∫_{Q1×Q2} F(Φ(ξ, ξ')) with F the fiber
// density of Φ(ξ, ξ') = (ξ+ξ', P(ξ)+P(ξ'), Q(ξ)+Q(ξ')).
BilinearOracle bilinear_oracle(const SeparatedBoxes &boxes, int order, int panels);
// ∫∫ (4|ξ1−ξ1'||ξ3−ξ3'|)⁻¹ over Q1×Q2.
double bilinear_holder_bound(const SeparatedBoxes &boxes);

// ∫_{[-T,T]^5}|E_{Q1}f1|²|E_{Q2}f2|² for each T on the surface
// (ξ1ξ2+ξ3², ξ1²). Extras: oracle, oracle_error, holder_bound, monotone,
// saturation (last value / oracle).
ExperimentReport bilinear_l4_check(const BilinearParams &params);

}  // namespace quadsurf
