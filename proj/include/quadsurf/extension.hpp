#pragma once

#include "quadsurf/pencil.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace quadsurf {

using cplx = std::complex<double>;
using Real3 = std::array<double, 3>;
using RMat3 = std::array<Real3, 3>;

class ExtensionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GridTooLarge : public ExtensionError {
public:
    using ExtensionError::ExtensionError;
};

class GridTooCoarse : public ExtensionError {
public:
    using ExtensionError::ExtensionError;
};

class RegionNotCovered : public ExtensionError {
public:
    using ExtensionError::ExtensionError;
};

class InvalidFunction : public ExtensionError {
public:
    using ExtensionError::ExtensionError;
};

// e(t) = exp(2πit).
cplx expi2pi(double t);

struct Box3 {
    Real3 lo{0, 0, 0};
    Real3 hi{1, 1, 1};

    double volume() const;
    double side(int axis) const { return hi[axis] - lo[axis]; }
    bool contains(const Box3 &inner, double tol = 1e-12) const;
};

struct EvalPoint {
    Real3 x_prime{0, 0, 0};
    double x4 = 0;
    double x5 = 0;
};

struct SurfaceSpec {
    RMat3 p{};  // coefficient matrices, P(ξ) = ξᵀ·p·ξ
    RMat3 q{};
    Box3 domain;

    static SurfaceSpec from_pair(const QuadPair &pair, const Box3 &domain = Box3{});
    // Throws std::invalid_argument on an empty domain or non-finite entries.
    void validate() const;
    double P(const Real3 &xi) const;
    double Q(const Real3 &xi) const;
    double phase(const Real3 &xi, const EvalPoint &x) const;
};

struct BoxIndicator {
    Box3 box;
};

// exp(-½·Σ((ξ_i - center_i)/width_i)²).
struct Gaussian {
    Real3 center{0.5, 0.5, 0.5};
    Real3 widths{0.1, 0.1, 0.1};
};

// Values at the cell centres of the N1×N2×N3 midpoint grid of the domain,
// row-major with the ξ3 index fastest.
struct GridSamples {
    std::array<int, 3> n{0, 0, 0};
    std::vector<cplx> values;
};

struct SignedBoxSum {
    std::vector<std::pair<Box3, int>> terms;
};

using FunctionSpec = std::variant<BoxIndicator, Gaussian, GridSamples, SignedBoxSum>;

// Uniform x' lattice: point(i,j,k) = origin + (i,j,k)·spacing.
struct Lattice {
    Real3 origin{0, 0, 0};
    Real3 spacing{1, 1, 1};
    std::array<int, 3> count{1, 1, 1};

    std::size_t size() const {
        return static_cast<std::size_t>(count[0]) * count[1] * count[2];
    }
    double coord(int axis, int i) const { return origin[axis] + i * spacing[axis]; }
    Real3 point(int i, int j, int k) const { return {coord(0, i), coord(1, j), coord(2, k)}; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * count[1] + j) * count[2] + k;
    }
};

struct Field {
    Lattice lattice;
    std::vector<cplx> samples;
    double x4 = 0;
    double x5 = 0;
    int quadrature_N = 0;

    const cplx &at(int i, int j, int k) const { return samples[lattice.index(i, j, k)]; }
};

struct RealField {
    Lattice lattice;
    std::vector<double> values;
    double x4 = 0;
    double x5 = 0;
    int quadrature_N = 0;
};

// Per-cell weights of f on the N³ midpoint grid: exact coverage fractions for
// box indicators, centre values otherwise. Only the bounding block of the
// support is stored.
struct Raster {
    std::array<int, 3> n{0, 0, 0};      // full grid size
    std::array<int, 3> begin{0, 0, 0};  // first stored cell per axis
    std::array<int, 3> count{0, 0, 0};  // stored cells per axis
    std::vector<cplx> weights;          // row-major over the stored block
};

Raster rasterize(const SurfaceSpec &s, const FunctionSpec &f, int N);

// Midpoint rule on the N³ grid over the domain, compensated summation.
cplx evaluate_point(const SurfaceSpec &s, const FunctionSpec &f, const EvalPoint &x, int N);

// The midpoint rule is trusted for |x|·(largest domain side) ≤ N/4.
bool in_validity_window(const SurfaceSpec &s, const EvalPoint &x, int N);

struct FieldOptions {
    std::size_t memory_cap_bytes = std::size_t(1) << 30;
};

// Zero-padded 3-D FFT of the phased grid samples. The lattice has
// M = pad·N points per axis, spacing 1/(M·h_i) and covers
// [-M/2, M/2)·spacing; on the unit cube this is [-N/2, N/2) with spacing 1/pad.
Field evaluate_field(const SurfaceSpec &s, const FunctionSpec &f, double x4, double x5, int N, int pad,
                     const FieldOptions &opts = {});

// Same quadrature as evaluate_point, evaluated on an arbitrary lattice by a
// separable three-pass contraction with compensated sums.
Field evaluate_lattice(const SurfaceSpec &s, const FunctionSpec &f, double x4, double x5, int N,
                       const Lattice &lattice);

// Π_i ∫_{lo_i}^{hi_i} e(ξ_i t_i) dξ_i.
cplx closed_form_box_slice(const Box3 &box, const Real3 &x_prime);

// ∫_a^b e(c·t) dt, stable for small c.
cplx interval_transform(double a, double b, double c);

struct Region5 {
    std::array<double, 5> lo{};
    std::array<double, 5> hi{};
    // Optional |x1| + |x4| ≤ diamond constraint.
    std::optional<double> diamond_x1_x4;
};

// Fields on a common x' lattice, one per node of an (x4, x5) product grid;
// fields[i4 * x5_nodes.size() + i5].
struct FieldStack {
    std::vector<double> x4_nodes;
    std::vector<double> x5_nodes;
    std::vector<Field> fields;
};

struct NormEstimate {
    double value = 0;
    double q_exponent = 0;
    Region5 region;                     // node hull actually integrated
    std::array<int, 5> nodes{};         // nodes used per axis
    double estimated_quadrature_error = 0;  // |full - half resolution|
};

// Product trapezoid rule over the lattice nodes inside the region. An axis
// with a single node is treated as a slice (weight 1).
NormEstimate norm_lq(const FieldStack &fields, double q, const Region5 &region);

RealField square_function_field(const SurfaceSpec &s, const std::vector<Box3> &partition, double x4,
                                double x5, int N, int pad, const FieldOptions &opts = {});

// Binary layout: three little-endian int32 (N1, N2, N3) followed by
// N1·N2·N3 little-endian (re, im) double pairs in row-major order.
GridSamples read_grid_samples(const std::string &path);
void write_grid_samples(const std::string &path, const GridSamples &g);
void write_field(const std::string &path, const Field &field);

}  // namespace quadsurf
