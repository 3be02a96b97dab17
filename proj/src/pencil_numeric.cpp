#include "quadsurf/pencil_numeric.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace quadsurf {

Rational rationalize(double x, long max_den) {
    // Continued-fraction convergents, stopping before the denominator bound.
    long sign = x < 0 ? -1 : 1;
    double y = std::fabs(x);
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = y;
    for (int iter = 0; iter < 64; ++iter) {
        double a = std::floor(frac);
        if (a > 1e15) break;
        long ai = static_cast<long>(a);
        long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double rest = frac - a;
        if (rest < 1e-15) break;
        frac = 1.0 / rest;
    }
    if (q1 == 0) return Rational(0);
    return make_rational(sign * p1, q1);
}

namespace {

using D3 = std::array<double, 3>;
using DM = std::array<D3, 3>;

double quad(const DM &k, const D3 &n) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += n[i] * k[i][j] * n[j];
    return s;
}

double objective(const std::array<DM, 3> &ks, const D3 &n) {
    double s = 0;
    for (const auto &k : ks) {
        double v = quad(k, n);
        s += v * v;
    }
    return s;
}

D3 unit(D3 v) {
    double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / r, v[1] / r, v[2] / r};
}

D3 cross3(const D3 &a, const D3 &b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Levenberg-Marquardt on the three residuals n^T K n, stepping in the tangent
// plane of the unit sphere.
D3 refine(const std::array<DM, 3> &ks, D3 n) {
    double f = objective(ks, n);
    double lambda = 1e-3;
    for (int iter = 0; iter < 5000 && f > 1e-30; ++iter) {
        D3 seed = std::fabs(n[0]) < 0.9 ? D3{1, 0, 0} : D3{0, 1, 0};
        D3 t1 = unit(cross3(n, seed));
        D3 t2 = cross3(n, t1);
        double jtj[2][2] = {{0, 0}, {0, 0}}, jtr[2] = {0, 0};
        for (const auto &k : ks) {
            D3 kn{0, 0, 0};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) kn[i] += k[i][j] * n[j];
            double r = quad(k, n);
            double g[2] = {2 * (kn[0] * t1[0] + kn[1] * t1[1] + kn[2] * t1[2]),
                           2 * (kn[0] * t2[0] + kn[1] * t2[1] + kn[2] * t2[2])};
            for (int a = 0; a < 2; ++a) {
                jtr[a] += g[a] * r;
                for (int b = 0; b < 2; ++b) jtj[a][b] += g[a] * g[b];
            }
        }
        bool improved = false;
        while (lambda < 1e12) {
            double m00 = jtj[0][0] * (1 + lambda) + 1e-300, m11 = jtj[1][1] * (1 + lambda) + 1e-300;
            double det = m00 * m11 - jtj[0][1] * jtj[1][0];
            if (det == 0) break;
            double d0 = -(m11 * jtr[0] - jtj[0][1] * jtr[1]) / det;
            double d1 = -(m00 * jtr[1] - jtj[1][0] * jtr[0]) / det;
            D3 trial = unit({n[0] + d0 * t1[0] + d1 * t2[0], n[1] + d0 * t1[1] + d1 * t2[1],
                             n[2] + d0 * t1[2] + d1 * t2[2]});
            double ft = objective(ks, trial);
            if (ft < f) {
                n = trial;
                f = ft;
                lambda = std::max(lambda / 10, 1e-12);
                improved = true;
                break;
            }
            lambda *= 10;
        }
        if (!improved) break;
    }
    return n;
}

}  // namespace

RankConditionResult check_R_numeric(const QuadPair &pair, int max_denominator) {
    auto conics = adjugate_conics(pair);
    std::array<DM, 3> ks;
    for (int c = 0; c < 3; ++c) {
        double norm = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                ks[c][i][j] = conics[c][i][j].get_d();
                norm += ks[c][i][j] * ks[c][i][j];
            }
        if (norm > 0)
            for (auto &row : ks[c])
                for (auto &x : row) x /= std::sqrt(norm);
    }

    // Fibonacci points on the sphere as starting normals.
    const int n_start = 2000;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    std::vector<std::pair<double, D3>> starts;
    for (int i = 0; i < n_start; ++i) {
        double z = 1.0 - (i + 0.5) / n_start;
        double r = std::sqrt(1.0 - z * z);
        D3 n{r * std::cos(golden * i), r * std::sin(golden * i), z};
        starts.push_back({objective(ks, n), n});
    }
    std::sort(starts.begin(), starts.end(), [](const auto &a, const auto &b) { return a.first < b.first; });

    std::vector<Vec3> candidates{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    std::set<std::string> seen;
    auto add = [&](const Vec3 &v) {
        std::string key;
        for (const auto &c : v) key += c.get_str() + ",";
        if (seen.insert(key).second) candidates.push_back(v);
    };
    std::vector<D3> roots;
    for (int s = 0; s < 32 && s < static_cast<int>(starts.size()); ++s) {
        D3 n = refine(ks, starts[s].second);
        if (objective(ks, n) > 1e-8) continue;
        int big = 0;
        for (int i = 1; i < 3; ++i)
            if (std::fabs(n[i]) > std::fabs(n[big])) big = i;
        D3 ratio{n[0] / n[big], n[1] / n[big], n[2] / n[big]};
        bool duplicate = false;
        for (const auto &r : roots)
            duplicate = duplicate || (std::fabs(r[0] - ratio[0]) + std::fabs(r[1] - ratio[1]) +
                                          std::fabs(r[2] - ratio[2]) < 1e-4);
        if (!duplicate) roots.push_back(ratio);
    }

    // The common zeros are often high-multiplicity intersections, where the
    // objective is flat and the minimizer can be off by a few 1e-2.
    // Candidates come from a shared denominator and from small per-coordinate
    // denominators; each is verified exactly below.
    const double tolerance = 0.06;
    const long small_den = std::min<long>(16, max_denominator);
    for (const auto &ratio : roots) {
        for (long den = 1; den <= max_denominator; ++den) {
            Vec3 v;
            for (int i = 0; i < 3; ++i) v[i] = make_rational(std::lround(ratio[i] * den), den);
            add(v);
        }
        std::array<std::vector<Rational>, 3> near;
        for (int i = 0; i < 3; ++i)
            for (long den = 1; den <= small_den; ++den)
                for (long num = std::lround(std::floor((ratio[i] - tolerance) * den));
                     num <= std::lround(std::ceil((ratio[i] + tolerance) * den)); ++num)
                    if (std::fabs(double(num) / den - ratio[i]) <= tolerance) near[i].push_back(make_rational(num, den));
        for (const auto &a : near[0])
            for (const auto &b : near[1])
                for (const auto &c : near[2]) add(Vec3{a, b, c});
    }

    RankConditionResult out;
    out.method = RankMethod::NumericThenVerified;
    out.d_prime = 3;
    for (const auto &v : candidates) {
        if (is_zero(v)) continue;
        int r = restricted_max_rank(pair, v);
        if (r < out.d_prime) {
            out.d_prime = r;
            out.witness_normal = SurdVector{};
            out.witness_normal.rational_part = normalize_projective(v);
            if (r == 0) break;
        }
    }
    return out;
}

}  // namespace quadsurf
