#include "quadsurf/rational.hpp"

#include <stdexcept>
#include <utility>

namespace quadsurf {

Rational make_rational(long num, long den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Rational parse_rational(const std::string &text) {
    Rational r;
    if (r.set_str(text, 10) != 0) throw std::invalid_argument("not a rational: " + text);
    if (r.get_den() == 0) throw std::domain_error("rational with zero denominator");
    r.canonicalize();
    return r;
}

std::string to_string(const Rational &r) { return r.get_str(); }

double to_double(const Rational &r) { return r.get_d(); }

Mat3 zero3() {
    Mat3 m;
    for (auto &row : m)
        for (auto &x : row) x = 0;
    return m;
}

Mat3 identity3() {
    Mat3 m = zero3();
    for (int i = 0; i < 3; ++i) m[i][i] = 1;
    return m;
}

Mat2 identity2() {
    Mat2 m;
    m[0][0] = 1;
    m[0][1] = 0;
    m[1][0] = 0;
    m[1][1] = 1;
    return m;
}

Mat3 transpose(const Mat3 &m) {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t[i][j] = m[j][i];
    return t;
}

Mat3 operator*(const Mat3 &a, const Mat3 &b) {
    Mat3 c = zero3();
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
            if (a[i][k] == 0) continue;
            for (int j = 0; j < 3; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

Mat3 operator+(const Mat3 &a, const Mat3 &b) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i][j] = a[i][j] + b[i][j];
    return c;
}

Mat3 operator-(const Mat3 &a, const Mat3 &b) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i][j] = a[i][j] - b[i][j];
    return c;
}

Mat3 scale(const Rational &s, const Mat3 &m) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i][j] = s * m[i][j];
    return c;
}

Vec3 operator*(const Mat3 &m, const Vec3 &v) {
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    return r;
}

Rational dot(const Vec3 &a, const Vec3 &b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

bool is_zero(const Vec3 &v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

bool is_zero(const Mat3 &m) {
    for (const auto &row : m)
        for (const auto &x : row)
            if (x != 0) return false;
    return true;
}

bool is_symmetric(const Mat3 &m) {
    return m[0][1] == m[1][0] && m[0][2] == m[2][0] && m[1][2] == m[2][1];
}

Rational det(const Mat3 &m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Rational det(const Mat2 &m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

Mat3 adjugate(const Mat3 &m) {
    Mat3 a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
            int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            // Cyclic index choice absorbs the cofactor sign.
            a[i][j] = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        }
    return a;
}

Rational bilinear(const Vec3 &u, const Mat3 &m, const Vec3 &v) { return dot(u, m * v); }

Vec3 normalize_projective(const Vec3 &v) {
    for (int i = 0; i < 3; ++i)
        if (v[i] != 0) {
            Rational s = v[i];
            return {v[0] / s, v[1] / s, v[2] / s};
        }
    return v;
}

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

RationalMatrix RationalMatrix::from(const Mat3 &m) {
    RationalMatrix r(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = m[i][j];
    return r;
}

RationalMatrix RationalMatrix::rref(std::vector<std::size_t> *pivots) const {
    RationalMatrix a = *this;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
        std::size_t sel = row;
        while (sel < rows_ && a(sel, col) == 0) ++sel;
        if (sel == rows_) continue;
        if (sel != row)
            for (std::size_t c = 0; c < cols_; ++c) std::swap(a(sel, c), a(row, c));
        Rational p = a(row, col);
        for (std::size_t c = col; c < cols_; ++c) a(row, c) /= p;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == row || a(r, col) == 0) continue;
            Rational f = a(r, col);
            for (std::size_t c = col; c < cols_; ++c) a(r, c) -= f * a(row, c);
        }
        if (pivots) pivots->push_back(col);
        ++row;
    }
    return a;
}

std::size_t RationalMatrix::rank() const {
    std::vector<std::size_t> piv;
    rref(&piv);
    return piv.size();
}

std::vector<std::vector<Rational>> RationalMatrix::nullspace() const {
    std::vector<std::size_t> piv;
    RationalMatrix r = rref(&piv);
    std::vector<bool> is_pivot(cols_, false);
    for (auto p : piv) is_pivot[p] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < cols_; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(cols_, Rational(0));
        v[free] = 1;
        for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -r(k, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

Rational RationalMatrix::determinant() const {
    if (rows_ != cols_) throw std::invalid_argument("determinant of a non-square matrix");
    RationalMatrix a = *this;
    Rational d = 1;
    for (std::size_t col = 0; col < cols_; ++col) {
        std::size_t sel = col;
        while (sel < rows_ && a(sel, col) == 0) ++sel;
        if (sel == rows_) return 0;
        if (sel != col) {
            for (std::size_t c = 0; c < cols_; ++c) std::swap(a(sel, c), a(col, c));
            d = -d;
        }
        d *= a(col, col);
        for (std::size_t r = col + 1; r < rows_; ++r) {
            if (a(r, col) == 0) continue;
            Rational f = a(r, col) / a(col, col);
            for (std::size_t c = col; c < cols_; ++c) a(r, c) -= f * a(col, c);
        }
    }
    return d;
}

Inertia inertia(const Mat3 &symmetric) {
    if (!is_symmetric(symmetric)) throw std::invalid_argument("inertia of a non-symmetric matrix");
    Mat3 a = symmetric;
    Inertia out;
    int n = 3;
    std::array<int, 3> idx{0, 1, 2};
    int active = n;
    auto record = [&](const Rational &d) {
        if (d > 0)
            ++out.n_pos;
        else if (d < 0)
            ++out.n_neg;
        else
            ++out.n_zero;
    };
    while (active > 0) {
        // Find a nonzero diagonal pivot among the active indices.
        int piv = -1;
        for (int k = 0; k < active; ++k)
            if (a[idx[k]][idx[k]] != 0) {
                piv = k;
                break;
            }
        if (piv < 0) {
            int pi = -1, pj = -1;
            for (int k = 0; k < active && pi < 0; ++k)
                for (int l = k + 1; l < active; ++l)
                    if (a[idx[k]][idx[l]] != 0) {
                        pi = k;
                        pj = l;
                        break;
                    }
            if (pi < 0) {
                out.n_zero += active;
                break;
            }
            // Congruence e_i -> e_i + e_j makes the diagonal entry 2·a_ij.
            int i = idx[pi], j = idx[pj];
            for (int c = 0; c < 3; ++c) a[i][c] += a[j][c];
            for (int r = 0; r < 3; ++r) a[r][i] += a[r][j];
            piv = pi;
        }
        int p = idx[piv];
        Rational d = a[p][p];
        record(d);
        for (int k = 0; k < active; ++k) {
            int r = idx[k];
            if (r == p || a[r][p] == 0) continue;
            Rational f = a[r][p] / d;
            for (int c = 0; c < 3; ++c) a[r][c] -= f * a[p][c];
            for (int c = 0; c < 3; ++c) a[c][r] -= f * a[c][p];
        }
        std::swap(idx[piv], idx[active - 1]);
        --active;
    }
    return out;
}

RationalPoly::RationalPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void RationalPoly::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

int RationalPoly::degree() const { return static_cast<int>(coeffs_.size()) - 1; }

Rational RationalPoly::leading() const { return coeffs_.empty() ? Rational(0) : coeffs_.back(); }

Rational RationalPoly::operator()(const Rational &t) const {
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

RationalPoly RationalPoly::derivative() const {
    std::vector<Rational> d;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * static_cast<long>(k));
    return RationalPoly(std::move(d));
}

RationalPoly RationalPoly::monic() const {
    if (is_zero()) return *this;
    std::vector<Rational> c = coeffs_;
    Rational l = leading();
    for (auto &x : c) x /= l;
    return RationalPoly(std::move(c));
}

RationalPoly operator-(const RationalPoly &a, const RationalPoly &b) {
    std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[k] -= b.coeffs_[k];
    return RationalPoly(std::move(c));
}

RationalPoly operator*(const RationalPoly &a, const RationalPoly &b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return RationalPoly(std::move(c));
}

void RationalPoly::divmod(const RationalPoly &a, const RationalPoly &b, RationalPoly &quot,
                          RationalPoly &rem) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Rational> r = a.coeffs_;
    int db = b.degree();
    std::vector<Rational> q(std::max(0, a.degree() - db + 1), Rational(0));
    for (int k = a.degree(); k >= db; --k) {
        if (r[k] == 0) continue;
        Rational f = r[k] / b.leading();
        q[k - db] = f;
        for (int j = 0; j <= db; ++j) r[k - db + j] -= f * b.coeffs_[j];
    }
    quot = RationalPoly(std::move(q));
    rem = RationalPoly(std::move(r));
}

RationalPoly RationalPoly::gcd(const RationalPoly &a, const RationalPoly &b) {
    RationalPoly x = a, y = b;
    while (!y.is_zero()) {
        RationalPoly q, r;
        divmod(x, y, q, r);
        x = std::move(y);
        y = std::move(r);
    }
    return x.monic();
}

}  // namespace quadsurf
