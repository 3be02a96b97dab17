#include "quadsurf/experiments.hpp"

#include "quadsurf/oscillatory.hpp"
#include "quadsurf/parallel.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace quadsurf {

FitResult fit_exponent(const std::vector<std::pair<double, double>> &rows) {
    if (rows.size() < 3) throw std::invalid_argument("a log-log fit needs at least three rows");
    std::vector<double> x, y;
    for (const auto &[R, v] : rows) {
        if (!(R > 0) || !(v > 0))
            throw NonPositiveValue("log-log fit needs positive R and values, got R=" + std::to_string(R) +
                                   " value=" + std::to_string(v));
        x.push_back(std::log(R));
        y.push_back(std::log(v));
    }
    double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("log-log fit needs at least two distinct R values");
    FitResult f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.n_points = static_cast<int>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        f.max_residual = std::max(f.max_residual, std::fabs(y[i] - (f.intercept + f.slope * x[i])));
    return f;
}

void Series::fit_rows(double min_R) {
    std::vector<std::pair<double, double>> pts;
    for (const auto &r : rows)
        if (r.R >= min_R) pts.emplace_back(r.R, r.measured);
    fit = fit_exponent(pts);
}

double ExperimentReport::extra(const std::string &key) const {
    for (const auto &[k, v] : extras)
        if (k == key) return v;
    return kNaN;
}

void ExperimentParams::validate() const {
    if (R_list.empty()) throw std::invalid_argument("R list is empty");
    for (std::size_t i = 0; i < R_list.size(); ++i) {
        if (!(R_list[i] >= 4)) throw std::invalid_argument("every R must be at least 4");
        if (i > 0 && !(R_list[i] > R_list[i - 1])) throw std::invalid_argument("R list must be increasing");
    }
    if (!(q >= 1) || !(p >= 1)) throw std::invalid_argument("exponents q and p must be at least 1");
    if (N < 2) throw std::invalid_argument("grid size must be at least 2");
    if (pad < 1) throw std::invalid_argument("pad must be at least 1");
    if (threads < 1) throw std::invalid_argument("thread budget must be at least 1");
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

Box3 knapp_function_box(KnappConfig config, double R) {
    if (config == KnappConfig::Twisted) return Box3{{0, 0, 0}, {1 / R, 1, 1 / std::sqrt(R)}};
    return Box3{{0, 0, 0}, {1 / R, 1, 1}};
}

Region5 knapp_region(KnappConfig config, double R) {
    Region5 r;
    std::array<double, 5> half;
    if (config == KnappConfig::Twisted) {
        half = {R / 100, 0.01, std::sqrt(R) / 100, R / 100, R * R / 100};
        r.diamond_x1_x4 = R / 100;
    } else {
        half = {R / 100, 0.01, 0.01, R / 100, R / 100};
    }
    for (int a = 0; a < 5; ++a) {
        r.lo[a] = -half[a];
        r.hi[a] = half[a];
    }
    return r;
}

double knapp_volume_exponent(KnappConfig config) { return config == KnappConfig::Twisted ? 1.5 : 1.0; }

ExperimentReport knapp_scan(const ExperimentParams &params, const KnappOptions &options) {
    params.validate();
    if (options.nodes_per_axis < 2) throw std::invalid_argument("Knapp region needs at least two nodes per axis");
    double max_R = params.R_list.back();
    if (params.N < 4 * max_R)
        throw GridTooCoarse("grid N = " + std::to_string(params.N) + " is below 4·max R = " +
                            format_double(4 * max_R));
    KnappConfig config = options.config.value_or(classify(params.pair).label == ClassLabel::R0 ? KnappConfig::Flat
                                                                                                : KnappConfig::Twisted);
    const double a = knapp_volume_exponent(config);
    // log-volume exponent of the region in R
    const double region_exponent = config == KnappConfig::Twisted ? 4.5 : 3.0;
    SurfaceSpec s = SurfaceSpec::from_pair(params.pair);
    const int n = options.nodes_per_axis;
    if (std::pow(static_cast<double>(n), 5) * sizeof(cplx) > static_cast<double>(params.memory_cap_bytes))
        throw GridTooLarge("Knapp field stack of " + std::to_string(n) + "^5 nodes exceeds the memory cap");

    Series norm, ratio;
    norm.experiment = "knapp-norm";
    ratio.experiment = "knapp-ratio";
    for (Series *sr : {&norm, &ratio}) {
        sr->surface = params.surface_name;
        sr->q = params.q;
        sr->p = params.p;
    }
    norm.predicted_slope = -a + region_exponent / params.q;
    ratio.predicted_slope = norm.predicted_slope + a / params.p;
    double min_scaled = std::numeric_limits<double>::infinity();

    for (double R : params.R_list) {
        Region5 region = knapp_region(config, R);
        Box3 box = knapp_function_box(config, R);
        Lattice lat;
        for (int ax = 0; ax < 3; ++ax) {
            lat.origin[ax] = region.lo[ax];
            lat.spacing[ax] = (region.hi[ax] - region.lo[ax]) / (n - 1);
            lat.count[ax] = n;
        }
        FieldStack stack;
        stack.x4_nodes = linspace(region.lo[3], region.hi[3], n);
        stack.x5_nodes = linspace(region.lo[4], region.hi[4], n);
        stack.fields.resize(static_cast<std::size_t>(n) * n);
        parallel_for(stack.fields.size(), params.threads, [&](std::size_t i) {
            stack.fields[i] = evaluate_lattice(s, BoxIndicator{box}, stack.x4_nodes[i / n], stack.x5_nodes[i % n],
                                               params.N, lat);
        });
        NormEstimate est = norm_lq(stack, params.q, region);
        for (std::size_t i = 0; i < stack.fields.size(); ++i) {
            double x4 = stack.x4_nodes[i / n];
            const Field &f = stack.fields[i];
            for (int i1 = 0; i1 < n; ++i1) {
                double x1 = lat.coord(0, i1);
                if (region.diamond_x1_x4 && std::fabs(x1) + std::fabs(x4) > *region.diamond_x1_x4 * (1 + 1e-12))
                    continue;
                for (int i2 = 0; i2 < n; ++i2)
                    for (int i3 = 0; i3 < n; ++i3)
                        min_scaled = std::min(min_scaled, std::abs(f.at(i1, i2, i3)) * std::pow(R, a));
            }
        }
        double f_norm = std::pow(R, -a / params.p);
        std::string notes = "quadrature_error=" + format_double(est.estimated_quadrature_error);
        norm.rows.push_back({R, est.value, norm.predicted_slope, notes});
        ratio.rows.push_back({R, est.value / f_norm, ratio.predicted_slope, notes});
    }
    if (norm.rows.size() >= 3) {
        norm.fit_rows();
        ratio.fit_rows();
    }
    ExperimentReport rep;
    rep.experiment = "knapp";
    rep.surface = params.surface_name;
    rep.series = {norm, ratio};
    rep.extras = {{"min_scaled_modulus", min_scaled},
                  {"volume_exponent", a},
                  {"flat_configuration", config == KnappConfig::Flat ? 1.0 : 0.0}};
    return rep;
}

std::vector<Box3> square_function_partition(double R) {
    long n1 = std::lround(R);
    long n3 = static_cast<long>(std::floor(std::sqrt(R) + 1e-12));
    double l1 = 1 / R, l3 = 1 / std::sqrt(R);
    std::vector<Box3> out;
    for (long i = 0; i < n1; ++i)
        for (long k = 0; k < n3; ++k) out.push_back(Box3{{i * l1, 0, k * l3}, {(i + 1) * l1, 1, (k + 1) * l3}});
    return out;
}

namespace {

struct BlockIntegrals {
    std::vector<double> deterministic;  // per q
    std::vector<double> random_sign;    // per q, mean over trials
    bool rounded = false;
};

// ∫(Σ_j |E_{B0+c_j}|²)^{q/2} over the block's x' coordinates, using
// |E_{B0+c}(x)| = |E_{B0}(x + 2Mc)| on a lattice that contains the shifts.
BlockIntegrals block_square_function(const RMat3 &m, const std::vector<int> &axes, const std::array<double, 3> &len,
                                     const std::array<long, 3> &count, const SquareFnOptions &opt, int node_budget,
                                     std::size_t memory_cap, std::uint64_t seed) {
    const int dim = static_cast<int>(axes.size());
    BlockIntegrals out;
    Box3 b0{{0, 0, 0}, {len[0], len[1], len[2]}};

    std::vector<std::vector<double>> gens;  // generator vectors over block axes
    std::vector<int> gen_axis;
    for (int a : axes)
        if (count[a] > 1) {
            std::vector<double> g(dim);
            for (int c = 0; c < dim; ++c) g[c] = 2.0 * m[axes[c]][a] * len[a];
            gens.push_back(g);
            gen_axis.push_back(a);
        }

    std::vector<double> h(dim), dual(dim);
    for (int c = 0; c < dim; ++c) {
        dual[c] = 1.0 / len[axes[c]];
        double target = opt.spacing_fraction * dual[c];
        std::vector<double> comps;
        for (const auto &g : gens)
            if (std::fabs(g[c]) > 1e-12 * target) comps.push_back(std::fabs(g[c]));
        bool single = !comps.empty();
        for (double v : comps)
            if (std::fabs(v - comps[0]) > 1e-12 * comps[0]) single = false;
        if (single && comps[0] >= target) {
            h[c] = comps[0] / std::ceil(comps[0] / target - 1e-12);
        } else {
            h[c] = target;
            if (!comps.empty()) out.rounded = true;
        }
    }

    // Patch around the stationary set of the base box.
    std::vector<long> klo(dim), khi(dim);
    for (int c = 0; c < dim; ++c) {
        double zlo = std::numeric_limits<double>::infinity(), zhi = -zlo;
        for (int corner = 0; corner < (1 << dim); ++corner) {
            double z = 0;
            for (int e = 0; e < dim; ++e) {
                double xi = (corner >> e) & 1 ? len[axes[e]] : 0.0;
                z -= 2.0 * m[axes[c]][axes[e]] * xi;
            }
            zlo = std::min(zlo, z);
            zhi = std::max(zhi, z);
        }
        klo[c] = static_cast<long>(std::floor((zlo - opt.margin * dual[c]) / h[c]));
        khi[c] = static_cast<long>(std::ceil((zhi + opt.margin * dual[c]) / h[c]));
    }
    std::vector<std::vector<double>> coords(dim);
    std::vector<long> psize(dim);
    for (int c = 0; c < dim; ++c) {
        psize[c] = khi[c] - klo[c] + 1;
        for (long k = klo[c]; k <= khi[c]; ++k) coords[c].push_back(k * h[c]);
    }
    std::vector<cplx> patch = block_extension_grid(m, axes, b0, coords, node_budget);

    // Shift offsets in lattice units, and the base-point shifts c_j.
    std::size_t n_shift = 1;
    for (int a : gen_axis) n_shift *= static_cast<std::size_t>(count[a]);
    std::vector<std::vector<long>> off(n_shift, std::vector<long>(dim));
    std::vector<std::array<double, 3>> base_shift(n_shift, {0, 0, 0});
    std::vector<long> off_min(dim, 0), off_max(dim, 0);
    for (std::size_t j = 0; j < n_shift; ++j) {
        std::size_t rest = j;
        std::vector<double> s(dim, 0.0);
        for (std::size_t g = 0; g < gens.size(); ++g) {
            long jj = static_cast<long>(rest % count[gen_axis[g]]);
            rest /= count[gen_axis[g]];
            for (int c = 0; c < dim; ++c) s[c] += jj * gens[g][c];
            base_shift[j][gen_axis[g]] = jj * len[gen_axis[g]];
        }
        for (int c = 0; c < dim; ++c) {
            off[j][c] = std::lround(s[c] / h[c]);
            off_min[c] = std::min(off_min[c], off[j][c]);
            off_max[c] = std::max(off_max[c], off[j][c]);
        }
    }
    std::vector<long> slo(dim), ssize(dim);
    for (int c = 0; c < dim; ++c) {
        slo[c] = klo[c] - off_max[c];
        ssize[c] = (khi[c] - off_min[c]) - slo[c] + 1;
    }
    std::size_t stotal = 1;
    for (int c = 0; c < dim; ++c) stotal *= static_cast<std::size_t>(ssize[c]);
    if (static_cast<double>(stotal) * sizeof(double) > static_cast<double>(memory_cap))
        throw GridTooLarge("square-function lattice of " + std::to_string(stotal) + " points exceeds the memory cap");
    double cell = 1;
    for (int c = 0; c < dim; ++c) cell *= h[c];

    auto s_index = [&](const std::vector<long> &k, const std::vector<long> &o) {
        std::size_t idx = 0;
        for (int c = 0; c < dim; ++c) idx = idx * ssize[c] + static_cast<std::size_t>(k[c] - o[c] - slo[c]);
        return idx;
    };
    auto for_patch = [&](auto &&fn) {
        std::vector<long> k(dim);
        std::size_t p = 0;
        if (dim == 1) {
            for (long a0 = klo[0]; a0 <= khi[0]; ++a0, ++p) {
                k[0] = a0;
                fn(k, p);
            }
        } else {
            for (long a0 = klo[0]; a0 <= khi[0]; ++a0)
                for (long a1 = klo[1]; a1 <= khi[1]; ++a1, ++p) {
                    k[0] = a0;
                    k[1] = a1;
                    fn(k, p);
                }
        }
    };

    std::vector<double> S(stotal, 0.0);
    for (std::size_t j = 0; j < n_shift; ++j)
        for_patch([&](const std::vector<long> &k, std::size_t p) { S[s_index(k, off[j])] += std::norm(patch[p]); });
    const auto &qs = opt.q_list;
    out.deterministic.assign(qs.size(), 0.0);
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        double acc = 0;
        for (double v : S)
            if (v > 0) acc += std::pow(v, qs[qi] / 2);
        out.deterministic[qi] = acc * cell;
    }

    out.random_sign.assign(qs.size(), 0.0);
    if (opt.mc_trials > 0) {
        std::vector<cplx> G(stotal);
        for (int t = 0; t < opt.mc_trials; ++t) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(t)};
            std::mt19937_64 rng(seq);
            std::fill(G.begin(), G.end(), cplx(0));
            for (std::size_t j = 0; j < n_shift; ++j) {
                double sign = (rng() & 1) ? 1.0 : -1.0;
                const auto &c0 = base_shift[j];
                double cmc = 0;
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) cmc += c0[a] * m[a][b] * c0[b];
                for_patch([&](const std::vector<long> &k, std::size_t p) {
                    double lin = 0;
                    for (int c = 0; c < dim; ++c) lin += c0[axes[c]] * (k[c] - off[j][c]) * h[c];
                    G[s_index(k, off[j])] += sign * expi2pi(lin + cmc) * patch[p];
                });
            }
            for (std::size_t qi = 0; qi < qs.size(); ++qi) {
                double acc = 0;
                for (const auto &z : G) {
                    double a = std::abs(z);
                    if (a > 0) acc += std::pow(a, qs[qi]);
                }
                out.random_sign[qi] += acc * cell / opt.mc_trials;
            }
        }
    }
    return out;
}

// Gauss–Legendre panels on [0, half]: [0, inner], then panels doubling in
// width, the last one clipped at half.
AxisRule graded_half_rule(double half, double inner, int per_panel) {
    AxisRule out;
    double a = 0, b = std::min(inner, half);
    while (a < half) {
        AxisRule p = gauss_panels(a, b, per_panel, 1);
        out.nodes.insert(out.nodes.end(), p.nodes.begin(), p.nodes.end());
        out.weights.insert(out.weights.end(), p.weights.begin(), p.weights.end());
        a = b;
        b = std::min(2 * b, half);
    }
    return out;
}

}  // namespace

ExperimentReport square_function_scan(const ExperimentParams &params, const SquareFnOptions &opt) {
    params.validate();
    if (opt.q_list.empty()) throw std::invalid_argument("q list is empty");
    for (double q : opt.q_list)
        if (!(q >= 2)) throw std::invalid_argument("square-function exponents must satisfy q >= 2");
    if (opt.nodes_x45 < 1 || opt.grading < 1 || !(opt.window > 0) || !(opt.spacing_fraction > 0) || !(opt.margin > 0) ||
        opt.mc_trials < 0)
        throw std::invalid_argument("invalid square-function options");
    for (double R : params.R_list)
        if (std::fabs(R - std::round(R)) > 1e-9) throw std::invalid_argument("square-function R must be an integer");
    SurfaceSpec s = SurfaceSpec::from_pair(params.pair);
    auto blocks = variable_blocks(s);
    for (const auto &b : blocks)
        if (b.size() > 2)
            throw std::invalid_argument("square-function scan needs cross-term blocks of at most two variables");

    const auto &qs = opt.q_list;
    std::vector<Series> series(qs.size());
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        series[qi].experiment = "squarefn";
        series[qi].surface = params.surface_name;
        series[qi].q = qs[qi];
        series[qi].predicted_slope = 6 - 1.5 * qs[qi];
    }
    std::vector<std::pair<std::string, double>> extras;

    for (double R : params.R_list) {
        std::array<double, 3> len{1 / R, 1, 1 / std::sqrt(R)};
        std::array<long, 3> count{std::lround(R), 1, static_cast<long>(std::floor(std::sqrt(R) + 1e-12))};
        // J(-x4, -x5) = J(x4, x5), so only x4 > 0 is sampled.
        AxisRule r4, r5;
        if (opt.graded) {
            r4 = graded_half_rule(opt.window * R, opt.window / opt.grading, opt.nodes_per_panel);
            AxisRule half5 = graded_half_rule(opt.window * R * R, opt.window * R / opt.grading, opt.nodes_per_panel);
            for (std::size_t i = 0; i < half5.nodes.size(); ++i) {
                r5.nodes.push_back(-half5.nodes[i]);
                r5.weights.push_back(half5.weights[i]);
                r5.nodes.push_back(half5.nodes[i]);
                r5.weights.push_back(half5.weights[i]);
            }
        } else {
            const int n = opt.nodes_x45;
            double w4 = 2 * opt.window * R / n, w5 = 2 * opt.window * R * R / n;
            for (int i = 0; i < n; ++i) {
                double x4 = -opt.window * R + (i + 0.5) * w4;
                if (x4 > 0) {
                    r4.nodes.push_back(x4);
                    r4.weights.push_back(w4);
                } else if (x4 == 0) {
                    r4.nodes.push_back(0);
                    r4.weights.push_back(0.5 * w4);
                }
                r5.nodes.push_back(-opt.window * R * R + (i + 0.5) * w5);
                r5.weights.push_back(w5);
            }
        }
        for (auto &w : r4.weights) w *= 2;
        struct NodeResult {
            std::vector<double> det, rnd;
            bool rounded = false;
        };
        const std::size_t n5 = r5.nodes.size();
        std::vector<NodeResult> nodes(r4.nodes.size() * n5);
        parallel_for(nodes.size(), params.threads, [&](std::size_t t) {
            double x4 = r4.nodes[t / n5], x5 = r5.nodes[t % n5];
            double weight = r4.weights[t / n5] * r5.weights[t % n5];
            RMat3 m;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) m[i][j] = x4 * s.p[i][j] + x5 * s.q[i][j];
            NodeResult r;
            r.det.assign(qs.size(), weight);
            r.rnd.assign(qs.size(), weight);
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                std::uint64_t seed = params.seed * 1000003ULL + static_cast<std::uint64_t>(R) * 7919ULL + t * 31ULL + b;
                BlockIntegrals bi = block_square_function(m, blocks[b], len, count, opt, params.N, params.memory_cap_bytes, seed);
                for (std::size_t qi = 0; qi < qs.size(); ++qi) {
                    r.det[qi] *= bi.deterministic[qi];
                    r.rnd[qi] *= bi.random_sign[qi];
                }
                r.rounded = r.rounded || bi.rounded;
            }
            nodes[t] = std::move(r);
        });
        int rounded = 0;
        for (std::size_t qi = 0; qi < qs.size(); ++qi) {
            double total = 0, rnd = 0;
            for (const auto &nr : nodes) {
                total += nr.det[qi];
                rnd += nr.rnd[qi];
            }
            std::string notes = "boxes=" + std::to_string(count[0] * count[1] * count[2]);
            if (opt.mc_trials > 0) {
                notes += " khintchine_ratio=" + format_double(rnd / total);
                extras.emplace_back("khintchine_ratio_q" + format_double(qs[qi]) + "_R" + format_double(R),
                                    rnd / total);
            }
            series[qi].rows.push_back({R, total, series[qi].predicted_slope, notes});
        }
        for (const auto &nr : nodes) rounded += nr.rounded ? 1 : 0;
        extras.emplace_back("rounded_shift_nodes_R" + format_double(R), rounded);
    }
    for (auto &sr : series)
        if (sr.rows.size() >= 3) sr.fit_rows();
    ExperimentReport rep;
    rep.experiment = "squarefn";
    rep.surface = params.surface_name;
    rep.series = std::move(series);
    rep.extras = std::move(extras);
    return rep;
}

std::vector<std::array<double, 5>> sphere_directions(int n) {
    static const int bases[5] = {2, 3, 5, 7, 11};
    boost::math::normal_distribution<double> normal;
    std::vector<std::array<double, 5>> out;
    for (int i = 1; i <= n; ++i) {
        std::array<double, 5> v;
        double norm2 = 0;
        for (int d = 0; d < 5; ++d) {
            double f = 1, u = 0;
            for (int k = i; k > 0; k /= bases[d]) {
                f /= bases[d];
                u += f * (k % bases[d]);
            }
            v[d] = boost::math::quantile(normal, u);
            norm2 += v[d] * v[d];
        }
        double len = std::sqrt(norm2);
        for (double &c : v) c /= len;
        out.push_back(v);
    }
    return out;
}

ExperimentReport decay_scan(const DecayParams &params) {
    if (params.n_directions < 100) throw std::invalid_argument("decay scan needs at least 100 directions");
    std::vector<double> radii = params.radii;
    if (radii.empty())
        for (int k = 0; k <= 12; ++k) radii.push_back(10 * std::pow(100.0, k / 12.0));
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (!(radii[i] > 0) || (i > 0 && !(radii[i] > radii[i - 1])))
            throw std::invalid_argument("radii must be positive and increasing");
    radii.insert(radii.begin(), 0.0);
    SurfaceSpec s = SurfaceSpec::from_pair(params.pair);
    auto dirs = sphere_directions(params.n_directions);
    Box3 box = s.domain;

    Series sup, normalized;
    sup.experiment = "decay-sup";
    normalized.experiment = "decay-normalized";
    sup.surface = normalized.surface = params.surface_name;
    sup.predicted_slope = -0.5;
    normalized.predicted_slope = 0;
    for (double r : radii) {
        std::vector<double> mod(dirs.size());
        parallel_for(dirs.size(), params.threads, [&](std::size_t i) {
            const auto &w = dirs[i];
            EvalPoint x{{r * w[0], r * w[1], r * w[2]}, r * w[3], r * w[4]};
            mod[i] = std::abs(box_extension_point(s, box, x, params.N));
        });
        double m = *std::max_element(mod.begin(), mod.end());
        sup.rows.push_back({r, m, sup.predicted_slope, ""});
        normalized.rows.push_back({r, m * std::sqrt(1 + r), normalized.predicted_slope, ""});
    }
    std::size_t fitted = std::count_if(radii.begin(), radii.end(), [](double r) { return r >= 10; });
    if (fitted >= 3) {
        sup.fit_rows(10);
        normalized.fit_rows(10);
    }
    ExperimentReport rep;
    rep.experiment = "decay";
    rep.surface = params.surface_name;
    rep.series = {sup, normalized};
    rep.extras = {{"directions", static_cast<double>(dirs.size())}};
    return rep;
}

std::string to_string(JacobianCase c) { return c == JacobianCase::Twisted ? "twisted" : "flat"; }

Rational jacobian_determinant(JacobianCase c, const Vec3 &xi, const Vec3 &xp) {
    RationalMatrix j(6, 6);
    for (int i = 0; i < 3; ++i) {
        j(i, i) = 1;
        j(i, i + 3) = 1;
    }
    if (c == JacobianCase::Twisted) {
        // P = ξ1ξ2 + ξ3², Q = ξ1², last coordinate ξ2.
        Rational row3[6] = {xi[1], xi[0], 2 * xi[2], xp[1], xp[0], 2 * xp[2]};
        Rational row4[6] = {2 * xi[0], 0, 0, 2 * xp[0], 0, 0};
        for (int k = 0; k < 6; ++k) {
            j(3, k) = row3[k];
            j(4, k) = row4[k];
        }
        j(5, 1) = 1;
    } else {
        // P = ξ1ξ2, Q = ξ1ξ3, last coordinate ξ1.
        Rational row3[6] = {xi[1], xi[0], 0, xp[1], xp[0], 0};
        Rational row4[6] = {xi[2], 0, xi[0], xp[2], 0, xp[0]};
        for (int k = 0; k < 6; ++k) {
            j(3, k) = row3[k];
            j(4, k) = row4[k];
        }
        j(5, 0) = 1;
    }
    return j.determinant();
}

Rational jacobian_closed_form(JacobianCase c, const Vec3 &xi, const Vec3 &xp) {
    Rational d1 = abs(Rational(xi[0] - xp[0]));
    if (c == JacobianCase::Flat) return d1 * d1;
    return 4 * d1 * abs(Rational(xi[2] - xp[2]));
}

Rational jacobian_relative_error(JacobianCase c, const Vec3 &xi, const Vec3 &xp) {
    Rational closed = jacobian_closed_form(c, xi, xp);
    if (closed == 0) throw DegenerateSample("Jacobian vanishes at this sample");
    Rational det = abs(jacobian_determinant(c, xi, xp));
    return abs(Rational(det - closed)) / closed;
}

JacobianResult jacobian_check(JacobianCase c, int n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("at least one sample is required");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num(-60, 60), den(1, 24);
    auto draw = [&] {
        Vec3 v;
        for (auto &x : v) x = make_rational(num(rng), den(rng));
        return v;
    };
    JacobianResult out;
    out.jcase = c;
    while (out.samples < n_samples) {
        Vec3 xi = draw(), xp = draw();
        try {
            Rational err = jacobian_relative_error(c, xi, xp);
            if (err > out.max_relative_error) out.max_relative_error = err;
            ++out.samples;
        } catch (const DegenerateSample &) {
            ++out.degenerate;
        }
    }
    return out;
}

void SeparatedBoxes::validate() const {
    if (!(l1 > 0) || !(l2 > 0)) throw std::invalid_argument("box sides must be positive");
    for (double a : {a1, a2})
        if (a < 0 || a + l1 > 1 + 1e-12) throw std::invalid_argument("boxes must lie in [0,1]^3");
    for (double b : {b1, b2})
        if (b < 0 || b + l2 > 1 + 1e-12) throw std::invalid_argument("boxes must lie in [0,1]^3");
    if (std::fabs(a1 - a2) < 5 * l1 * (1 - 1e-12) || std::fabs(b1 - b2) < 5 * l2 * (1 - 1e-12))
        throw NotSeparated("boxes need |a1-a2| >= 5*l1 and |b1-b2| >= 5*l2");
}

Box3 SeparatedBoxes::box(int i) const {
    double a = i == 0 ? a1 : a2, b = i == 0 ? b1 : b2;
    return Box3{{a, 0, b}, {a + l1, 1, b + l2}};
}

BilinearOracle bilinear_oracle(const SeparatedBoxes &boxes, int order, int panels) {
    boxes.validate();
    if (panels < 2) throw std::invalid_argument("the oracle error estimate needs at least two panels");
    SeparatedBoxes bx = boxes;
    if (bx.a1 > bx.a2) {
        std::swap(bx.a1, bx.a2);
        std::swap(bx.b1, bx.b2);
    }
    if (bx.b1 > bx.b2) {
        // ξ3 → −ξ3 leaves the surface unchanged.
        bx.b1 = -bx.b1 - bx.l2;
        bx.b2 = -bx.b2 - bx.l2;
    }
    const double l2 = bx.l2, b1 = bx.b1, b2 = bx.b2;
    auto integrate = [&](int np) {
        AxisRule U = gauss_panels(bx.a1, bx.a1 + bx.l1, order, np);
        AxisRule V = gauss_panels(bx.a2, bx.a2 + bx.l1, order, np);
        AxisRule X2 = gauss_panels(0, 1, order, np), Y2 = X2;
        AxisRule X3 = gauss_panels(b1, b1 + l2, order, np);
        AxisRule Y3 = gauss_panels(b2, b2 + l2, order, np);
        double total = 0;
        for (std::size_t iu = 0; iu < U.nodes.size(); ++iu)
            for (std::size_t iv = 0; iv < V.nodes.size(); ++iv) {
                double u = U.nodes[iu], v = V.nodes[iv];
                double beta = 2 * (v - u), scale = 1 / (4 * (v - u) * (v - u));
                double acc = 0;
                for (std::size_t i2 = 0; i2 < X2.nodes.size(); ++i2)
                    for (std::size_t i3 = 0; i3 < X3.nodes.size(); ++i3)
                        for (std::size_t j2 = 0; j2 < Y2.nodes.size(); ++j2)
                            for (std::size_t j3 = 0; j3 < Y3.nodes.size(); ++j3) {
                                double x2 = X2.nodes[i2], x3 = X3.nodes[i3], y2 = Y2.nodes[j2], y3 = Y3.nodes[j3];
                                double e2 = x2 + y2, e3 = x3 + y3;
                                double e4 = u * x2 + x3 * x3 + v * y2 + y3 * y3;
                                double tmin = std::max(0.0, e2 - 1), tmax = std::min(1.0, e2);
                                double alpha = 2 * (e4 - v * e2) - e3 * e3;
                                double rlo = std::max({2 * b2 - e3, e3 - 2 * (b1 + l2), 0.0});
                                double rhi = std::min(2 * (b2 + l2) - e3, e3 - 2 * b1);
                                double r0 = std::sqrt(std::max(alpha + beta * tmin, 0.0));
                                double r1 = std::sqrt(std::max(alpha + beta * tmax, 0.0));
                                double F = std::max(std::min(rhi, r1) - std::max(rlo, r0), 0.0);
                                acc += X2.weights[i2] * X3.weights[i3] * Y2.weights[j2] * Y3.weights[j3] * F;
                            }
                total += U.weights[iu] * V.weights[iv] * scale * acc;
            }
        return total;
    };
    BilinearOracle out;
    out.value = integrate(panels);
    out.error_estimate = std::fabs(out.value - integrate(panels - 1));
    return out;
}

double bilinear_holder_bound(const SeparatedBoxes &boxes) {
    boxes.validate();
    auto G = [](double x) { return x > 0 ? x * std::log(x) - x : 0.0; };
    auto pair_integral = [&](double d, double l) { return G(d + l) - 2 * G(d) + G(d - l); };
    double i1 = pair_integral(std::fabs(boxes.a2 - boxes.a1), boxes.l1);
    double i3 = pair_integral(std::fabs(boxes.b2 - boxes.b1), boxes.l2);
    return i1 * i3 / 4;
}

ExperimentReport bilinear_l4_check(const BilinearParams &params) {
    const auto &bx = params.boxes;
    bx.validate();
    if (params.T_list.empty()) throw std::invalid_argument("T list is empty");
    for (std::size_t i = 0; i < params.T_list.size(); ++i)
        if (!(params.T_list[i] > 0) || (i > 0 && !(params.T_list[i] > params.T_list[i - 1])))
            throw std::invalid_argument("T list must be positive and increasing");
    for (double h : params.spacing)
        if (!(h > 0)) throw std::invalid_argument("spacings must be positive");
    for (double T : params.T_list)
        for (double h : params.spacing)
            if (std::fabs(T / h - std::round(T / h)) > 1e-9)
                throw std::invalid_argument("every T must be a multiple of every spacing");

    const double Tmax = params.T_list.back();
    const std::size_t nT = params.T_list.size();
    std::array<std::vector<double>, 5> x;
    for (int a = 0; a < 5; ++a) {
        long n = std::lround(Tmax / params.spacing[a]);
        for (long k = -n; k <= n; ++k) x[a].push_back(k * params.spacing[a]);
    }
    // Trapezoid weights on [-T, T] per axis and T.
    auto weights = [&](int a) {
        std::vector<std::vector<double>> w(nT, std::vector<double>(x[a].size(), 0.0));
        double h = params.spacing[a];
        for (std::size_t t = 0; t < nT; ++t)
            for (std::size_t i = 0; i < x[a].size(); ++i) {
                double d = std::fabs(x[a][i]) - params.T_list[t];
                if (d < -1e-9 * h)
                    w[t][i] = h;
                else if (d < 1e-9 * h)
                    w[t][i] = h / 2;
            }
        return w;
    };
    std::array<std::vector<std::vector<double>>, 5> W;
    for (int a = 0; a < 5; ++a) W[a] = weights(a);

    const Box3 q1 = bx.box(0), q2 = bx.box(1);
    const double amp = params.amplitude1 * params.amplitude1 * params.amplitude2 * params.amplitude2;
    std::vector<std::size_t> x4_index;
    for (std::size_t i = 0; i < x[3].size(); ++i)
        if (x[3][i] >= 0) x4_index.push_back(i);

    std::vector<std::vector<double>> partial(x4_index.size(), std::vector<double>(nT, 0.0));
    parallel_for(x4_index.size(), params.threads, [&](std::size_t t) {
        std::size_t i4 = x4_index[t];
        double x4 = x[3][i4];
        double mult = x4 > 0 ? 2.0 : 1.0;
        RMat3 m3{};
        m3[2][2] = x4;
        auto e31 = block_extension_grid(m3, {2}, q1, {x[2]}, params.N);
        auto e32 = block_extension_grid(m3, {2}, q2, {x[2]}, params.N);
        std::vector<double> C(nT, 0.0);
        for (std::size_t i3 = 0; i3 < x[2].size(); ++i3) {
            double c = std::norm(e31[i3] * e32[i3]);
            for (std::size_t k = 0; k < nT; ++k) C[k] += W[2][k][i3] * c;
        }
        const std::size_t n1 = x[0].size(), n2 = x[1].size();
        std::vector<double> d(n1 * n2);
        for (std::size_t i5 = 0; i5 < x[4].size(); ++i5) {
            bool needed = false;
            for (std::size_t k = 0; k < nT; ++k) needed = needed || (W[3][k][i4] > 0 && W[4][k][i5] > 0);
            if (!needed) continue;
            RMat3 m{};
            m[0][0] = x[4][i5];
            m[0][1] = m[1][0] = x4 / 2;
            auto a = block_extension_grid(m, {0, 1}, q1, {x[0], x[1]}, params.N);
            auto b = block_extension_grid(m, {0, 1}, q2, {x[0], x[1]}, params.N);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(a[i] * b[i]);
            for (std::size_t k = 0; k < nT; ++k) {
                double w45 = W[3][k][i4] * W[4][k][i5];
                if (w45 == 0) continue;
                double s = 0;
                for (std::size_t i1 = 0; i1 < n1; ++i1) {
                    double w1 = W[0][k][i1];
                    if (w1 == 0) continue;
                    double row = 0;
                    for (std::size_t i2 = 0; i2 < n2; ++i2) row += W[1][k][i2] * d[i1 * n2 + i2];
                    s += w1 * row;
                }
                partial[t][k] += mult * w45 * C[k] * s;
            }
        }
    });
    std::vector<double> totals(nT, 0.0);
    for (const auto &p : partial)
        for (std::size_t k = 0; k < nT; ++k) totals[k] += p[k];

    BilinearOracle oracle = bilinear_oracle(bx, params.oracle_order, params.oracle_panels);
    oracle.value *= amp;
    oracle.error_estimate *= amp;
    double holder = bilinear_holder_bound(bx) * amp;

    Series sr;
    sr.experiment = "bilinear";
    sr.surface = "dfail-twisted";
    sr.q = 4;
    sr.p = 4;
    bool monotone = true;
    for (std::size_t k = 0; k < nT; ++k) {
        double v = totals[k] * amp;
        if (k > 0 && v < sr.rows.back().measured) monotone = false;
        sr.rows.push_back({params.T_list[k], v, kNaN, "oracle=" + format_double(oracle.value)});
    }
    ExperimentReport rep;
    rep.experiment = "bilinear";
    rep.surface = sr.surface;
    double last = sr.rows.back().measured;
    rep.series = {sr};
    rep.extras = {{"oracle", oracle.value},
                  {"oracle_error", oracle.error_estimate},
                  {"holder_bound", holder},
                  {"monotone", monotone ? 1.0 : 0.0},
                  {"saturation", oracle.value > 0 ? last / oracle.value : kNaN}};
    return rep;
}

}  // namespace quadsurf
