#pragma once

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace quadsurf {

// GMP keeps mpq_class values in canonical form (positive denominator, reduced)
// after every arithmetic operation.
using Rational = mpq_class;
using Integer = mpz_class;

Rational make_rational(long num, long den = 1);
Rational parse_rational(const std::string &text);
std::string to_string(const Rational &r);
double to_double(const Rational &r);

using Vec3 = std::array<Rational, 3>;
using Mat3 = std::array<std::array<Rational, 3>, 3>;
using Mat2 = std::array<std::array<Rational, 2>, 2>;

Mat3 zero3();
Mat3 identity3();
Mat2 identity2();
Mat3 transpose(const Mat3 &m);
Mat3 operator*(const Mat3 &a, const Mat3 &b);
Mat3 operator+(const Mat3 &a, const Mat3 &b);
Mat3 operator-(const Mat3 &a, const Mat3 &b);
Mat3 scale(const Rational &s, const Mat3 &m);
Vec3 operator*(const Mat3 &m, const Vec3 &v);
Rational dot(const Vec3 &a, const Vec3 &b);
Vec3 cross(const Vec3 &a, const Vec3 &b);
bool is_zero(const Vec3 &v);
bool is_zero(const Mat3 &m);
bool is_symmetric(const Mat3 &m);
Rational det(const Mat3 &m);
Rational det(const Mat2 &m);
Mat3 adjugate(const Mat3 &m);
// Bilinear value uᵀ·m·v.
Rational bilinear(const Vec3 &u, const Mat3 &m, const Vec3 &v);
// Scales v so its first nonzero entry is 1.
Vec3 normalize_projective(const Vec3 &v);

// Dense exact matrix with row-major storage.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols);
    static RationalMatrix from(const Mat3 &m);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rational &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    // Reduced row echelon form; pivot columns are appended to `pivots`.
    RationalMatrix rref(std::vector<std::size_t> *pivots = nullptr) const;
    std::size_t rank() const;
    // Basis of the right kernel, one vector per free column.
    std::vector<std::vector<Rational>> nullspace() const;
    Rational determinant() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

// Inertia (n_pos, n_neg, n_zero) of a symmetric matrix by exact congruence
// diagonalization.
struct Inertia {
    int n_pos = 0;
    int n_neg = 0;
    int n_zero = 0;
    bool operator==(const Inertia &) const = default;
};

Inertia inertia(const Mat3 &symmetric);

// Univariate polynomial over Q, coefficients in increasing degree.
class RationalPoly {
public:
    RationalPoly() = default;
    explicit RationalPoly(std::vector<Rational> coeffs);

    int degree() const;  // -1 for the zero polynomial
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<Rational> &coeffs() const { return coeffs_; }
    Rational leading() const;
    Rational operator()(const Rational &t) const;

    RationalPoly derivative() const;
    RationalPoly monic() const;
    friend RationalPoly operator-(const RationalPoly &a, const RationalPoly &b);
    friend RationalPoly operator*(const RationalPoly &a, const RationalPoly &b);
    // Euclidean division; throws std::domain_error on zero divisor.
    static void divmod(const RationalPoly &a, const RationalPoly &b, RationalPoly &quot,
                       RationalPoly &rem);
    static RationalPoly gcd(const RationalPoly &a, const RationalPoly &b);
    bool operator==(const RationalPoly &) const = default;

private:
    void trim();
    std::vector<Rational> coeffs_;
};

}  // namespace quadsurf
