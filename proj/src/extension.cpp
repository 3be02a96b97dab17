#include "quadsurf/extension.hpp"

#include "quadsurf/summation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>

namespace quadsurf {

cplx expi2pi(double t) {
    double r = t - std::nearbyint(t);
    double angle = 2.0 * M_PI * r;
    return {std::cos(angle), std::sin(angle)};
}

double Box3::volume() const {
    double v = 1;
    for (int i = 0; i < 3; ++i) v *= std::max(0.0, hi[i] - lo[i]);
    return v;
}

bool Box3::contains(const Box3 &inner, double tol) const {
    for (int i = 0; i < 3; ++i)
        if (inner.lo[i] < lo[i] - tol || inner.hi[i] > hi[i] + tol) return false;
    return true;
}

SurfaceSpec SurfaceSpec::from_pair(const QuadPair &pair, const Box3 &domain) {
    SurfaceSpec s;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            s.p[i][j] = to_double(pair.p.coeff()[i][j]);
            s.q[i][j] = to_double(pair.q.coeff()[i][j]);
        }
    s.domain = domain;
    s.validate();
    return s;
}

void SurfaceSpec::validate() const {
    for (int i = 0; i < 3; ++i) {
        if (!(domain.hi[i] > domain.lo[i]) || !std::isfinite(domain.lo[i]) || !std::isfinite(domain.hi[i]))
            throw std::invalid_argument("surface domain must be a nonempty finite box");
        for (int j = 0; j < 3; ++j)
            if (!std::isfinite(p[i][j]) || !std::isfinite(q[i][j]))
                throw std::invalid_argument("surface coefficients must be finite");
    }
}

namespace {

double form(const RMat3 &m, const Real3 &xi) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += xi[i] * m[i][j] * xi[j];
    return s;
}

RMat3 phase_matrix(const SurfaceSpec &s, double x4, double x5) {
    RMat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = x4 * s.p[i][j] + x5 * s.q[i][j];
    return m;
}

}  // namespace

double SurfaceSpec::P(const Real3 &xi) const { return form(p, xi); }
double SurfaceSpec::Q(const Real3 &xi) const { return form(q, xi); }

double SurfaceSpec::phase(const Real3 &xi, const EvalPoint &x) const {
    return xi[0] * x.x_prime[0] + xi[1] * x.x_prime[1] + xi[2] * x.x_prime[2] + x.x4 * P(xi) + x.x5 * Q(xi);
}

cplx interval_transform(double a, double b, double c) {
    double len = b - a;
    double u = M_PI * len * c;
    double sinc = std::fabs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
    return len * sinc * expi2pi(0.5 * (a + b) * c);
}

cplx closed_form_box_slice(const Box3 &box, const Real3 &x_prime) {
    cplx v = 1;
    for (int i = 0; i < 3; ++i) v *= interval_transform(box.lo[i], box.hi[i], x_prime[i]);
    return v;
}

namespace {

struct AxisWeights {
    int begin = 0;
    std::vector<double> w;
};

struct SeparableTerm {
    double coeff = 1;
    std::array<AxisWeights, 3> axes;
};

AxisWeights box_coverage(double a, double b, double lo, double h, int n) {
    AxisWeights out;
    int first = std::clamp(static_cast<int>(std::floor((a - lo) / h)), 0, n - 1);
    int last = std::clamp(static_cast<int>(std::ceil((b - lo) / h)) - 1, 0, n - 1);
    out.begin = first;
    for (int k = first; k <= last; ++k) {
        double c0 = lo + k * h, c1 = lo + (k + 1) * h;
        out.w.push_back(std::max(0.0, std::min(b, c1) - std::max(a, c0)) / h);
    }
    return out;
}

SeparableTerm box_term(const SurfaceSpec &s, const Box3 &box, double coeff, int N) {
    if (!s.domain.contains(box, 1e-12)) throw InvalidFunction("box indicator extends outside the domain");
    for (int i = 0; i < 3; ++i)
        if (!(box.hi[i] >= box.lo[i])) throw InvalidFunction("box with hi < lo");
    SeparableTerm t;
    t.coeff = coeff;
    for (int i = 0; i < 3; ++i) {
        double h = s.domain.side(i) / N;
        t.axes[i] = box_coverage(box.lo[i], box.hi[i], s.domain.lo[i], h, N);
    }
    return t;
}

SeparableTerm gaussian_term(const SurfaceSpec &s, const Gaussian &g, int N) {
    SeparableTerm t;
    for (int i = 0; i < 3; ++i) {
        if (!(g.widths[i] > 0)) throw InvalidFunction("Gaussian widths must be positive");
        double h = s.domain.side(i) / N;
        t.axes[i].begin = 0;
        for (int k = 0; k < N; ++k) {
            double xi = s.domain.lo[i] + (k + 0.5) * h;
            double z = (xi - g.center[i]) / g.widths[i];
            t.axes[i].w.push_back(std::exp(-0.5 * z * z));
        }
    }
    return t;
}

// Either a list of separable terms or one dense grid.
struct Decomposed {
    std::vector<SeparableTerm> terms;
    const GridSamples *dense = nullptr;
};

Decomposed decompose(const SurfaceSpec &s, const FunctionSpec &f, int N) {
    if (N < 2) throw std::invalid_argument("quadrature grid size must be at least 2");
    Decomposed d;
    if (auto b = std::get_if<BoxIndicator>(&f)) {
        d.terms.push_back(box_term(s, b->box, 1.0, N));
    } else if (auto g = std::get_if<Gaussian>(&f)) {
        d.terms.push_back(gaussian_term(s, *g, N));
    } else if (auto sb = std::get_if<SignedBoxSum>(&f)) {
        for (const auto &[box, sign] : sb->terms) {
            if (sign != 1 && sign != -1) throw InvalidFunction("signed box sum signs must be ±1");
            d.terms.push_back(box_term(s, box, sign, N));
        }
    } else {
        const auto &gs = std::get<GridSamples>(f);
        if (gs.n[0] != N || gs.n[1] != N || gs.n[2] != N)
            throw InvalidFunction("grid samples dimensions do not match the quadrature grid");
        if (gs.values.size() != static_cast<std::size_t>(N) * N * N)
            throw InvalidFunction("grid samples array has the wrong length");
        d.dense = &gs;
    }
    return d;
}

struct Block {
    std::array<int, 3> begin{0, 0, 0};
    std::array<int, 3> count{0, 0, 0};
    std::vector<cplx> w;
};

Block term_block(const SeparableTerm &t) {
    Block b;
    for (int i = 0; i < 3; ++i) {
        b.begin[i] = t.axes[i].begin;
        b.count[i] = static_cast<int>(t.axes[i].w.size());
    }
    b.w.resize(static_cast<std::size_t>(b.count[0]) * b.count[1] * b.count[2]);
    std::size_t idx = 0;
    for (int i = 0; i < b.count[0]; ++i)
        for (int j = 0; j < b.count[1]; ++j)
            for (int k = 0; k < b.count[2]; ++k)
                b.w[idx++] = t.coeff * t.axes[0].w[i] * t.axes[1].w[j] * t.axes[2].w[k];
    return b;
}

Block dense_block(const GridSamples &g) {
    Block b;
    b.count = g.n;
    b.w = g.values;
    return b;
}

std::vector<Block> blocks_of(const Decomposed &d) {
    std::vector<Block> out;
    if (d.dense) {
        out.push_back(dense_block(*d.dense));
    } else {
        for (const auto &t : d.terms) out.push_back(term_block(t));
    }
    return out;
}

// Σ over one block of w·e(phase)·h³, using a phase recurrence along ξ3.
void accumulate_point(const SurfaceSpec &s, const Block &b, const EvalPoint &x, int N, ComplexSum &acc) {
    Real3 h, c0;
    for (int i = 0; i < 3; ++i) {
        h[i] = s.domain.side(i) / N;
        c0[i] = s.domain.lo[i] + 0.5 * h[i];
    }
    const double cell = h[0] * h[1] * h[2];
    RMat3 m = phase_matrix(s, x.x4, x.x5);
    const double C = m[2][2] * h[2] * h[2];
    const cplx step2 = expi2pi(2.0 * C);
    std::size_t idx = 0;
    for (int i = 0; i < b.count[0]; ++i) {
        double xi1 = c0[0] + (b.begin[0] + i) * h[0];
        for (int j = 0; j < b.count[1]; ++j) {
            double xi2 = c0[1] + (b.begin[1] + j) * h[1];
            double s0 = c0[2] + b.begin[2] * h[2];
            double constant = x.x_prime[0] * xi1 + x.x_prime[1] * xi2 + m[0][0] * xi1 * xi1 +
                              m[1][1] * xi2 * xi2 + 2.0 * m[0][1] * xi1 * xi2;
            double lin = x.x_prime[2] + 2.0 * (m[0][2] * xi1 + m[1][2] * xi2);
            double A = constant + lin * s0 + m[2][2] * s0 * s0;
            double B = (lin + 2.0 * m[2][2] * s0) * h[2];
            cplx z, r;
            for (int k = 0; k < b.count[2]; ++k, ++idx) {
                if (k % 64 == 0) {
                    z = expi2pi(A + B * k + C * k * k);
                    r = expi2pi(B + C * (2.0 * k + 1.0));
                }
                const cplx &w = b.w[idx];
                if (w != 0.0) acc.add(w * z * cell);
                z *= r;
                r *= step2;
            }
        }
    }
}

std::mutex &fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

Raster rasterize(const SurfaceSpec &s, const FunctionSpec &f, int N) {
    Decomposed d = decompose(s, f, N);
    auto blocks = blocks_of(d);
    Raster r;
    r.n = {N, N, N};
    if (blocks.empty()) return r;
    std::array<int, 3> lo{N, N, N}, hi{0, 0, 0};
    for (const auto &b : blocks)
        for (int i = 0; i < 3; ++i) {
            lo[i] = std::min(lo[i], b.begin[i]);
            hi[i] = std::max(hi[i], b.begin[i] + b.count[i]);
        }
    for (int i = 0; i < 3; ++i) {
        r.begin[i] = lo[i];
        r.count[i] = std::max(0, hi[i] - lo[i]);
    }
    r.weights.assign(static_cast<std::size_t>(r.count[0]) * r.count[1] * r.count[2], 0.0);
    for (const auto &b : blocks) {
        std::size_t idx = 0;
        for (int i = 0; i < b.count[0]; ++i)
            for (int j = 0; j < b.count[1]; ++j)
                for (int k = 0; k < b.count[2]; ++k, ++idx) {
                    std::size_t dst = (static_cast<std::size_t>(b.begin[0] + i - lo[0]) * r.count[1] +
                                       (b.begin[1] + j - lo[1])) *
                                          r.count[2] +
                                      (b.begin[2] + k - lo[2]);
                    r.weights[dst] += b.w[idx];
                }
    }
    return r;
}

cplx evaluate_point(const SurfaceSpec &s, const FunctionSpec &f, const EvalPoint &x, int N) {
    s.validate();
    Decomposed d = decompose(s, f, N);
    ComplexSum acc;
    for (const auto &b : blocks_of(d)) accumulate_point(s, b, x, N, acc);
    return acc.value();
}

bool in_validity_window(const SurfaceSpec &s, const EvalPoint &x, int N) {
    double r2 = x.x4 * x.x4 + x.x5 * x.x5;
    for (double v : x.x_prime) r2 += v * v;
    double side = std::max({s.domain.side(0), s.domain.side(1), s.domain.side(2)});
    return std::sqrt(r2) * side <= N / 4.0;
}

Field evaluate_field(const SurfaceSpec &s, const FunctionSpec &f, double x4, double x5, int N, int pad,
                     const FieldOptions &opts) {
    s.validate();
    if (pad < 1) throw std::invalid_argument("pad must be at least 1");
    const long long M = static_cast<long long>(pad) * N;
    const double bytes = static_cast<double>(M) * M * M * sizeof(fftw_complex);
    if (bytes > static_cast<double>(opts.memory_cap_bytes) || M > 4096)
        throw GridTooLarge("FFT grid of " + std::to_string(M) + "^3 exceeds the memory cap");
    Raster r = rasterize(s, f, N);
    const std::size_t total = static_cast<std::size_t>(M) * M * M;
    auto *data = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * total));
    if (!data) throw GridTooLarge("FFT buffer allocation failed");
    std::memset(data, 0, sizeof(fftw_complex) * total);
    Real3 h, c0;
    for (int i = 0; i < 3; ++i) {
        h[i] = s.domain.side(i) / N;
        c0[i] = s.domain.lo[i] + 0.5 * h[i];
    }
    const double cell = h[0] * h[1] * h[2];
    RMat3 m = phase_matrix(s, x4, x5);
    std::size_t idx = 0;
    for (int i = 0; i < r.count[0]; ++i)
        for (int j = 0; j < r.count[1]; ++j)
            for (int k = 0; k < r.count[2]; ++k, ++idx) {
                const cplx &w = r.weights[idx];
                if (w == 0.0) continue;
                int gi = r.begin[0] + i, gj = r.begin[1] + j, gk = r.begin[2] + k;
                Real3 xi{c0[0] + gi * h[0], c0[1] + gj * h[1], c0[2] + gk * h[2]};
                cplx v = w * expi2pi(form(m, xi)) * cell;
                std::size_t dst = (static_cast<std::size_t>(gi) * M + gj) * M + gk;
                data[dst][0] = v.real();
                data[dst][1] = v.imag();
            }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_3d(static_cast<int>(M), static_cast<int>(M), static_cast<int>(M), data, data,
                                FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    Field out;
    out.x4 = x4;
    out.x5 = x5;
    out.quadrature_N = N;
    for (int i = 0; i < 3; ++i) {
        out.lattice.spacing[i] = 1.0 / (M * h[i]);
        out.lattice.origin[i] = -(M / 2) * out.lattice.spacing[i];
        out.lattice.count[i] = static_cast<int>(M);
    }
    out.samples.resize(total);
    std::vector<std::array<cplx, 2>> dummy;
    std::array<std::vector<cplx>, 3> shift;
    for (int a = 0; a < 3; ++a) {
        shift[a].resize(M);
        for (long long t = 0; t < M; ++t) shift[a][t] = expi2pi(c0[a] * out.lattice.coord(a, static_cast<int>(t)));
    }
    auto src_index = [M](long long t) { return ((t - M / 2) % M + M) % M; };
    for (long long i = 0; i < M; ++i)
        for (long long j = 0; j < M; ++j)
            for (long long k = 0; k < M; ++k) {
                std::size_t src = (static_cast<std::size_t>(src_index(i)) * M + src_index(j)) * M + src_index(k);
                cplx v(data[src][0], data[src][1]);
                out.samples[(static_cast<std::size_t>(i) * M + j) * M + k] = v * shift[0][i] * shift[1][j] * shift[2][k];
            }
    fftw_free(data);
    return out;
}

Field evaluate_lattice(const SurfaceSpec &s, const FunctionSpec &f, double x4, double x5, int N,
                       const Lattice &lattice) {
    s.validate();
    Decomposed d = decompose(s, f, N);
    Real3 h, c0;
    for (int i = 0; i < 3; ++i) {
        h[i] = s.domain.side(i) / N;
        c0[i] = s.domain.lo[i] + 0.5 * h[i];
    }
    const double cell = h[0] * h[1] * h[2];
    RMat3 m = phase_matrix(s, x4, x5);
    const int m1 = lattice.count[0], m2 = lattice.count[1], m3 = lattice.count[2];
    std::vector<ComplexSum> out_acc(lattice.size());

    for (const auto &b : blocks_of(d)) {
        const int n1 = b.count[0], n2 = b.count[1], n3 = b.count[2];
        if (n1 == 0 || n2 == 0 || n3 == 0) continue;
        std::array<std::vector<double>, 3> xi;
        for (int a = 0; a < 3; ++a)
            for (int t = 0; t < b.count[a]; ++t) xi[a].push_back(c0[a] + (b.begin[a] + t) * h[a]);
        std::array<std::vector<cplx>, 3> table;
        for (int a = 0; a < 3; ++a) {
            table[a].resize(static_cast<std::size_t>(b.count[a]) * lattice.count[a]);
            for (int t = 0; t < b.count[a]; ++t)
                for (int u = 0; u < lattice.count[a]; ++u)
                    table[a][static_cast<std::size_t>(t) * lattice.count[a] + u] =
                        expi2pi(xi[a][t] * lattice.coord(a, u));
        }
        // Pass 1 over ξ3.
        std::vector<cplx> t1(static_cast<std::size_t>(n1) * n2 * m3);
        std::vector<cplx> g(n3);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j) {
                bool any = false;
                for (int k = 0; k < n3; ++k) {
                    const cplx &w = b.w[(static_cast<std::size_t>(i) * n2 + j) * n3 + k];
                    if (w == 0.0) {
                        g[k] = 0;
                        continue;
                    }
                    any = true;
                    g[k] = w * expi2pi(form(m, {xi[0][i], xi[1][j], xi[2][k]})) * cell;
                }
                cplx *row = &t1[(static_cast<std::size_t>(i) * n2 + j) * m3];
                if (!any) {
                    std::fill(row, row + m3, cplx(0));
                    continue;
                }
                for (int u = 0; u < m3; ++u) {
                    ComplexSum acc;
                    for (int k = 0; k < n3; ++k)
                        if (g[k] != 0.0) acc.add(g[k] * table[2][static_cast<std::size_t>(k) * m3 + u]);
                    row[u] = acc.value();
                }
            }
        // Pass 2 over ξ2.
        std::vector<cplx> t2(static_cast<std::size_t>(n1) * m2 * m3);
        for (int i = 0; i < n1; ++i)
            for (int v = 0; v < m2; ++v)
                for (int u = 0; u < m3; ++u) {
                    ComplexSum acc;
                    for (int j = 0; j < n2; ++j)
                        acc.add(t1[(static_cast<std::size_t>(i) * n2 + j) * m3 + u] *
                                table[1][static_cast<std::size_t>(j) * m2 + v]);
                    t2[(static_cast<std::size_t>(i) * m2 + v) * m3 + u] = acc.value();
                }
        // Pass 3 over ξ1.
        for (int w1 = 0; w1 < m1; ++w1)
            for (int v = 0; v < m2; ++v)
                for (int u = 0; u < m3; ++u) {
                    ComplexSum acc;
                    for (int i = 0; i < n1; ++i)
                        acc.add(t2[(static_cast<std::size_t>(i) * m2 + v) * m3 + u] *
                                table[0][static_cast<std::size_t>(i) * m1 + w1]);
                    out_acc[lattice.index(w1, v, u)].add(acc.value());
                }
    }
    Field out;
    out.lattice = lattice;
    out.x4 = x4;
    out.x5 = x5;
    out.quadrature_N = N;
    out.samples.resize(lattice.size());
    for (std::size_t t = 0; t < out_acc.size(); ++t) out.samples[t] = out_acc[t].value();
    return out;
}

namespace {

struct AxisSelection {
    std::vector<std::size_t> index;
    std::vector<double> coord;
    std::vector<double> fine;
    std::vector<double> coarse;
};

std::vector<double> trapezoid(const std::vector<double> &x) {
    std::vector<double> w(x.size(), 0.0);
    if (x.size() == 1) {
        w[0] = 1.0;
        return w;
    }
    for (std::size_t t = 0; t + 1 < x.size(); ++t) {
        double d = 0.5 * (x[t + 1] - x[t]);
        w[t] += d;
        w[t + 1] += d;
    }
    return w;
}

AxisSelection select_axis(const std::vector<double> &nodes, double lo, double hi, const char *name) {
    if (nodes.empty()) throw RegionNotCovered(std::string("no nodes on axis ") + name);
    double span = std::max(1.0, std::fabs(nodes.back() - nodes.front()));
    double tol = 1e-9 * span;
    if (lo < nodes.front() - tol || hi > nodes.back() + tol)
        throw RegionNotCovered(std::string("region exceeds the sampled range on axis ") + name);
    AxisSelection sel;
    for (std::size_t t = 0; t < nodes.size(); ++t)
        if (nodes[t] >= lo - tol && nodes[t] <= hi + tol) {
            sel.index.push_back(t);
            sel.coord.push_back(nodes[t]);
        }
    if (sel.index.empty()) throw RegionNotCovered(std::string("region contains no nodes on axis ") + name);
    sel.fine = trapezoid(sel.coord);
    std::vector<double> cc;
    std::vector<std::size_t> pos;
    for (std::size_t t = 0; t < sel.coord.size(); t += 2) pos.push_back(t);
    if (pos.back() != sel.coord.size() - 1) pos.push_back(sel.coord.size() - 1);
    for (auto p : pos) cc.push_back(sel.coord[p]);
    auto cw = trapezoid(cc);
    sel.coarse.assign(sel.coord.size(), 0.0);
    for (std::size_t t = 0; t < pos.size(); ++t) sel.coarse[pos[t]] = cw[t];
    return sel;
}

}  // namespace

NormEstimate norm_lq(const FieldStack &stack, double q, const Region5 &region) {
    if (!(q >= 1)) throw std::invalid_argument("norm exponent q must be at least 1");
    if (stack.fields.size() != stack.x4_nodes.size() * stack.x5_nodes.size())
        throw std::invalid_argument("field stack size does not match its (x4, x5) grid");
    if (stack.fields.empty()) throw RegionNotCovered("empty field stack");
    const Lattice &lat = stack.fields.front().lattice;
    for (const auto &f : stack.fields)
        if (f.lattice.count != lat.count || f.lattice.origin != lat.origin || f.lattice.spacing != lat.spacing)
            throw std::invalid_argument("fields in a stack must share one lattice");
    std::array<std::vector<double>, 3> xn;
    for (int a = 0; a < 3; ++a)
        for (int t = 0; t < lat.count[a]; ++t) xn[a].push_back(lat.coord(a, t));
    static const char *names[5] = {"x1", "x2", "x3", "x4", "x5"};
    std::array<AxisSelection, 5> sel;
    for (int a = 0; a < 3; ++a) sel[a] = select_axis(xn[a], region.lo[a], region.hi[a], names[a]);
    sel[3] = select_axis(stack.x4_nodes, region.lo[3], region.hi[3], names[3]);
    sel[4] = select_axis(stack.x5_nodes, region.lo[4], region.hi[4], names[4]);

    RealSum fine, coarse;
    const double diamond = region.diamond_x1_x4.value_or(std::numeric_limits<double>::infinity());
    const double dtol = 1e-12 * std::max(1.0, std::fabs(diamond));
    for (std::size_t a4 = 0; a4 < sel[3].index.size(); ++a4)
        for (std::size_t a5 = 0; a5 < sel[4].index.size(); ++a5) {
            const Field &f = stack.fields[sel[3].index[a4] * stack.x5_nodes.size() + sel[4].index[a5]];
            double x4 = sel[3].coord[a4];
            double w45f = sel[3].fine[a4] * sel[4].fine[a5];
            double w45c = sel[3].coarse[a4] * sel[4].coarse[a5];
            for (std::size_t a1 = 0; a1 < sel[0].index.size(); ++a1) {
                if (std::fabs(sel[0].coord[a1]) + std::fabs(x4) > diamond + dtol) continue;
                for (std::size_t a2 = 0; a2 < sel[1].index.size(); ++a2)
                    for (std::size_t a3 = 0; a3 < sel[2].index.size(); ++a3) {
                        double v = std::pow(std::abs(f.at(static_cast<int>(sel[0].index[a1]),
                                                          static_cast<int>(sel[1].index[a2]),
                                                          static_cast<int>(sel[2].index[a3]))),
                                            q);
                        double wf = w45f * sel[0].fine[a1] * sel[1].fine[a2] * sel[2].fine[a3];
                        double wc = w45c * sel[0].coarse[a1] * sel[1].coarse[a2] * sel[2].coarse[a3];
                        fine.add(wf * v);
                        if (wc != 0) coarse.add(wc * v);
                    }
            }
        }
    NormEstimate out;
    out.q_exponent = q;
    out.value = std::pow(std::max(0.0, fine.value()), 1.0 / q);
    double coarse_value = std::pow(std::max(0.0, coarse.value()), 1.0 / q);
    out.estimated_quadrature_error = std::fabs(out.value - coarse_value);
    for (int a = 0; a < 5; ++a) {
        out.region.lo[a] = sel[a].coord.front();
        out.region.hi[a] = sel[a].coord.back();
        out.nodes[a] = static_cast<int>(sel[a].coord.size());
    }
    out.region.diamond_x1_x4 = region.diamond_x1_x4;
    return out;
}

RealField square_function_field(const SurfaceSpec &s, const std::vector<Box3> &partition, double x4,
                                double x5, int N, int pad, const FieldOptions &opts) {
    for (std::size_t a = 0; a < partition.size(); ++a)
        for (std::size_t b = a + 1; b < partition.size(); ++b) {
            double overlap = 1;
            for (int i = 0; i < 3; ++i)
                overlap *= std::max(0.0, std::min(partition[a].hi[i], partition[b].hi[i]) -
                                             std::max(partition[a].lo[i], partition[b].lo[i]));
            if (overlap > 0) throw std::invalid_argument("partition boxes must be disjoint");
        }
    RealField out;
    out.x4 = x4;
    out.x5 = x5;
    out.quadrature_N = N;
    for (const auto &box : partition) {
        Field f = evaluate_field(s, BoxIndicator{box}, x4, x5, N, pad, opts);
        if (out.values.empty()) {
            out.lattice = f.lattice;
            out.values.assign(f.samples.size(), 0.0);
        }
        for (std::size_t t = 0; t < f.samples.size(); ++t) out.values[t] += std::norm(f.samples[t]);
    }
    return out;
}

namespace {

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        std::reverse(b, b + sizeof(T));
        std::memcpy(&v, b, sizeof(T));
        return v;
    }
}

template <typename T>
void put(std::ofstream &os, T v) {
    v = to_little(v);
    os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream &is) {
    T v;
    is.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (!is) throw InvalidFunction("grid samples file is truncated");
    return to_little(v);
}

void write_complex_grid(const std::string &path, const std::array<int, 3> &n, const std::vector<cplx> &values) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    for (int d : n) put<std::int32_t>(os, d);
    for (const auto &v : values) {
        put<double>(os, v.real());
        put<double>(os, v.imag());
    }
    if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace

GridSamples read_grid_samples(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidFunction("cannot open grid samples file " + path);
    GridSamples g;
    for (int a = 0; a < 3; ++a) {
        g.n[a] = get<std::int32_t>(is);
        if (g.n[a] <= 0 || g.n[a] > 4096) throw InvalidFunction("grid samples header has invalid dimensions");
    }
    std::size_t total = static_cast<std::size_t>(g.n[0]) * g.n[1] * g.n[2];
    g.values.resize(total);
    for (auto &v : g.values) {
        double re = get<double>(is);
        double im = get<double>(is);
        v = {re, im};
    }
    return g;
}

void write_grid_samples(const std::string &path, const GridSamples &g) {
    if (g.values.size() != static_cast<std::size_t>(g.n[0]) * g.n[1] * g.n[2])
        throw InvalidFunction("grid samples array has the wrong length");
    write_complex_grid(path, g.n, g.values);
}

void write_field(const std::string &path, const Field &field) {
    write_complex_grid(path, field.lattice.count, field.samples);
}

}  // namespace quadsurf
