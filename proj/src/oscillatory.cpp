#include "quadsurf/oscillatory.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace quadsurf {

namespace {

template <unsigned n>
AxisRule gauss_template(double a, double b, int panels) {
    using rule = boost::math::quadrature::gauss<double, n>;
    const auto &abscissa = rule::abscissa();
    const auto &weights = rule::weights();
    AxisRule out;
    double width = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        double mid = a + (k + 0.5) * width, half = 0.5 * width;
        for (std::size_t i = 0; i < abscissa.size(); ++i) {
            if (abscissa[i] == 0) {
                out.nodes.push_back(mid);
                out.weights.push_back(half * weights[i]);
                continue;
            }
            out.nodes.push_back(mid - half * abscissa[i]);
            out.weights.push_back(half * weights[i]);
            out.nodes.push_back(mid + half * abscissa[i]);
            out.weights.push_back(half * weights[i]);
        }
    }
    return out;
}

}  // namespace

AxisRule gauss_panels(double a, double b, int n, int panels) {
    if (panels < 1) throw std::invalid_argument("at least one panel is required");
    switch (n) {
        case 2: return gauss_template<2>(a, b, panels);
        case 3: return gauss_template<3>(a, b, panels);
        case 4: return gauss_template<4>(a, b, panels);
        case 5: return gauss_template<5>(a, b, panels);
        case 6: return gauss_template<6>(a, b, panels);
        case 8: return gauss_template<8>(a, b, panels);
        case 10: return gauss_template<10>(a, b, panels);
        case 12: return gauss_template<12>(a, b, panels);
        case 24: return gauss_template<24>(a, b, panels);
        default: throw std::invalid_argument("unsupported Gauss-Legendre order " + std::to_string(n));
    }
}

AxisRule composite_gauss(double a, double b, double cycles, int node_budget) {
    constexpr int per_panel = 24;
    constexpr double cycles_per_panel = 4.0;
    double panels_needed = std::max(1.0, std::ceil(std::fabs(cycles) / cycles_per_panel));
    if (!std::isfinite(panels_needed) || panels_needed * per_panel > node_budget)
        throw GridTooCoarse("oscillatory quadrature needs " + std::to_string(panels_needed * per_panel) +
                            " nodes per axis but the budget is " + std::to_string(node_budget));
    return gauss_panels(a, b, per_panel, static_cast<int>(panels_needed));
}

std::vector<std::vector<int>> variable_blocks(const SurfaceSpec &s) {
    std::array<int, 3> parent{0, 1, 2};
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i];
        return i;
    };
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (s.p[i][j] != 0 || s.q[i][j] != 0) parent[find(j)] = find(i);
    std::vector<std::vector<int>> blocks;
    for (int root = 0; root < 3; ++root) {
        std::vector<int> block;
        for (int i = 0; i < 3; ++i)
            if (find(i) == root) block.push_back(i);
        if (!block.empty()) blocks.push_back(block);
    }
    return blocks;
}

std::vector<cplx> block_extension_grid(const RMat3 &m, const std::vector<int> &axes, const Box3 &box,
                                       const std::vector<std::vector<double>> &coords, int node_budget) {
    const int dim = static_cast<int>(axes.size());
    if (coords.size() != axes.size()) throw std::invalid_argument("one coordinate list per block axis is required");
    std::vector<int> lin, quad;
    for (int a : axes) {
        bool linear = m[a][a] == 0;
        for (int l : lin)
            if (m[a][l] != 0) linear = false;
        (linear ? lin : quad).push_back(a);
    }
    auto slot = [&](int axis) {
        return static_cast<int>(std::find(axes.begin(), axes.end(), axis) - axes.begin());
    };
    auto max_abs = [](const std::vector<double> &v) {
        double r = 0;
        for (double x : v) r = std::max(r, std::fabs(x));
        return r;
    };

    std::vector<AxisRule> rules;
    for (int a : quad) {
        double len = box.hi[a] - box.lo[a];
        double slope = max_abs(coords[slot(a)]);
        for (int b : quad) slope += 2.0 * std::fabs(m[a][b]) * std::max(std::fabs(box.lo[b]), std::fabs(box.hi[b]));
        double cycles = len * slope;
        for (int l : lin) cycles += 2.0 * std::fabs(m[l][a]) * (box.hi[l] - box.lo[l]) * len;
        rules.push_back(composite_gauss(box.lo[a], box.hi[a], cycles, node_budget));
    }

    // Tensor nodes over the quadratic axes.
    std::size_t n_nodes = 1;
    for (const auto &r : rules) n_nodes *= r.nodes.size();
    std::vector<std::vector<double>> xi(quad.size(), std::vector<double>(n_nodes));
    std::vector<cplx> base(n_nodes);
    for (std::size_t v = 0; v < n_nodes; ++v) {
        std::size_t rest = v;
        double w = 1;
        for (int qi = static_cast<int>(quad.size()) - 1; qi >= 0; --qi) {
            std::size_t k = rest % rules[qi].nodes.size();
            rest /= rules[qi].nodes.size();
            xi[qi][v] = rules[qi].nodes[k];
            w *= rules[qi].weights[k];
        }
        double phase = 0;
        for (std::size_t i = 0; i < quad.size(); ++i)
            for (std::size_t j = 0; j < quad.size(); ++j) phase += m[quad[i]][quad[j]] * xi[i][v] * xi[j][v];
        base[v] = w * expi2pi(phase);
    }

    // Per block axis, a table over (coordinate, tensor node).
    std::vector<std::vector<cplx>> table(dim);
    for (int d = 0; d < dim; ++d) {
        int a = axes[d];
        const auto &xs = coords[d];
        auto &t = table[d];
        t.resize(xs.size() * n_nodes);
        auto qpos = std::find(quad.begin(), quad.end(), a);
        if (qpos != quad.end()) {
            const auto &xa = xi[qpos - quad.begin()];
            for (std::size_t c = 0; c < xs.size(); ++c)
                for (std::size_t v = 0; v < n_nodes; ++v) t[c * n_nodes + v] = expi2pi(xs[c] * xa[v]);
        } else {
            std::vector<double> shift(n_nodes, 0.0);
            for (std::size_t i = 0; i < quad.size(); ++i)
                if (m[a][quad[i]] != 0)
                    for (std::size_t v = 0; v < n_nodes; ++v) shift[v] += 2.0 * m[a][quad[i]] * xi[i][v];
            for (std::size_t c = 0; c < xs.size(); ++c)
                for (std::size_t v = 0; v < n_nodes; ++v)
                    t[c * n_nodes + v] = interval_transform(box.lo[a], box.hi[a], xs[c] + shift[v]);
        }
    }

    std::size_t total = 1;
    for (const auto &xs : coords) total *= xs.size();
    std::vector<cplx> out(total);
    if (total == 0) return out;
    // partial[d] = base ∘ table[0][t0] ∘ … ∘ table[d-1][t_{d-1}].
    std::vector<std::vector<cplx>> partial(dim, std::vector<cplx>(n_nodes));
    partial[0] = base;
    std::vector<std::size_t> idx(dim, 0);
    std::size_t pos = 0;
    int depth = 0;
    for (;;) {
        // Fill partial products down to the last axis for the current index.
        for (int d = depth; d + 1 < dim; ++d) {
            const cplx *row = &table[d][idx[d] * n_nodes];
            for (std::size_t v = 0; v < n_nodes; ++v) partial[d + 1][v] = partial[d][v] * row[v];
        }
        const auto &last = partial[dim - 1];
        const std::size_t nlast = coords[dim - 1].size();
        for (std::size_t c = 0; c < nlast; ++c) {
            const cplx *row = &table[dim - 1][c * n_nodes];
            double re = 0, im = 0;
            for (std::size_t v = 0; v < n_nodes; ++v) {
                cplx z = last[v] * row[v];
                re += z.real();
                im += z.imag();
            }
            out[pos++] = {re, im};
        }
        int d = dim - 2;
        while (d >= 0 && ++idx[d] == coords[d].size()) idx[d--] = 0;
        if (d < 0) break;
        depth = d;
    }
    return out;
}

cplx block_extension_point(const RMat3 &m, const std::vector<int> &axes, const Box3 &box, const Real3 &x_prime,
                           int node_budget) {
    std::vector<std::vector<double>> coords;
    for (int a : axes) coords.push_back({x_prime[a]});
    return block_extension_grid(m, axes, box, coords, node_budget)[0];
}

cplx box_extension_point(const SurfaceSpec &s, const Box3 &box, const EvalPoint &x, int node_budget) {
    RMat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = x.x4 * s.p[i][j] + x.x5 * s.q[i][j];
    cplx v = 1;
    for (const auto &block : variable_blocks(s)) v *= block_extension_point(m, block, box, x.x_prime, node_budget);
    return v;
}

}  // namespace quadsurf
