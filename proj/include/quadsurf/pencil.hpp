#pragma once

#include "quadsurf/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace quadsurf {

class PencilError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FailsPrecondition : public PencilError {
public:
    using PencilError::PencilError;
};

class ZeroDirection : public PencilError {
public:
    ZeroDirection() : PencilError("direction (0,0) has no pencil member") {}
};

class InconsistentInvariants : public PencilError {
public:
    using PencilError::PencilError;
};

// Q(ξ) = ξᵀ·coeff·ξ; the Hessian is 2·coeff.
class QuadraticForm {
public:
    QuadraticForm() : coeff_(zero3()) {}
    // Throws std::invalid_argument unless m is exactly symmetric.
    explicit QuadraticForm(const Mat3 &m);

    const Mat3 &coeff() const { return coeff_; }
    Mat3 hessian() const { return scale(2, coeff_); }
    Rational operator()(const Vec3 &xi) const { return bilinear(xi, coeff_, xi); }
    bool is_zero() const { return quadsurf::is_zero(coeff_); }
    bool operator==(const QuadraticForm &o) const { return coeff_ == o.coeff_; }

private:
    Mat3 coeff_;
};

struct QuadPair {
    QuadraticForm p;
    QuadraticForm q;
    bool operator==(const QuadPair &) const = default;
};

// (P', Q')ᵀ = m2·(P(m1·ξ), Q(m1·ξ))ᵀ.
class Equivalence {
public:
    // Throws std::invalid_argument if either matrix is singular.
    Equivalence(const Mat3 &m1, const Mat2 &m2);
    static Equivalence identity();

    const Mat3 &m1() const { return m1_; }
    const Mat2 &m2() const { return m2_; }

private:
    Mat3 m1_;
    Mat2 m2_;
};

// D(x1,x2) = c[0]·x1³ + c[1]·x1²x2 + c[2]·x1x2² + c[3]·x2³.
struct BinaryCubic {
    std::array<Rational, 4> c{0, 0, 0, 0};

    bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0; }
    Rational operator()(const Rational &x1, const Rational &x2) const;
    // D(m·x) as a new cubic in x.
    BinaryCubic substitute(const Mat2 &m) const;
    BinaryCubic scaled(const Rational &s) const;
    std::string to_string() const;
    bool operator==(const BinaryCubic &) const = default;
};

// Rational point (a : b) of the projective line, normalized so the last
// nonzero coordinate is 1.
struct Direction {
    Rational a;
    Rational b;
    bool operator==(const Direction &) const = default;
};

Direction normalize(const Rational &a, const Rational &b);

enum class RootKind { IdenticallyZero, TripleReal, DoubleSimpleReal, ThreeDistinctReal, OneRealPlusComplexPair };

struct RootPattern {
    RootKind kind = RootKind::IdenticallyZero;
    std::optional<Direction> repeated_root_direction;
    // The simple root accompanying a double root.
    std::optional<Direction> simple_root_direction;
    int simple_real_roots_count = 0;
};

struct IrreducibilityResult {
    bool irreducible = false;
    // λ·HessP + μ·HessQ = 0 with (λ, μ) ≠ 0.
    std::optional<std::pair<Rational, Rational>> dependency;
    std::optional<Vec3> common_kernel;
};

struct DConditionResult {
    bool holds = true;
    std::optional<Vec3> witness_w;
};

// v = rational_part + sqrt(radicand)·radical_part; radicand is a positive
// non-square whenever radical_part is nonzero.
struct SurdVector {
    Vec3 rational_part{0, 0, 0};
    Vec3 radical_part{0, 0, 0};
    Rational radicand = 0;

    bool is_rational() const { return quadsurf::is_zero(radical_part); }
    std::array<double, 3> approx() const;
    std::string to_string() const;
};

enum class RankMethod { Exact, NumericThenVerified };

struct RankConditionResult {
    int d_prime = 2;
    SurdVector witness_normal;
    RankMethod method = RankMethod::Exact;
};

struct CMDecision {
    bool holds = false;
    // nullopt encodes the unbounded multiplicity of the zero cubic.
    std::optional<int> max_real_root_multiplicity;
    Rational critical_gamma = 0;
};

enum class ClassLabel {
    Reducible,
    CM,
    D_fail_EllipticTimesParabola,
    D_fail_HyperbolicTimesParabola,
    D_fail_Twisted,
    R1_TripleRoot,
    R1_DoubleRoot_Definite,
    R1_DoubleRoot_Indefinite,
    R0,
};

std::string to_string(ClassLabel label);
std::string to_string(RootKind kind);
std::string to_string(RankMethod method);

struct ClassificationCertificate {
    ClassLabel label = ClassLabel::Reducible;
    IrreducibilityResult irreducibility;
    BinaryCubic cubic;
    RootPattern pattern;
    DConditionResult d_result;
    std::optional<RankConditionResult> r_result;
    CMDecision cm;
    std::optional<Inertia> signature_at_repeated_root;
    std::optional<Inertia> signature_at_simple_root;
};

BinaryCubic pencil_cubic(const QuadPair &pair);
RootPattern root_pattern(const BinaryCubic &cubic);
IrreducibilityResult is_irreducible(const QuadPair &pair);
DConditionResult check_D(const QuadPair &pair);
RankConditionResult check_R(const QuadPair &pair);
CMDecision check_CM(const QuadPair &pair);
Inertia signature_at(const QuadPair &pair, const Direction &direction);
ClassificationCertificate classify(const QuadPair &pair);
QuadPair apply_equivalence(const QuadPair &pair, const Equivalence &e);
bool verify_equivalence(const QuadPair &a, const QuadPair &b, const Equivalence &e);

// Restricted-pencil diagnostics at a hyperplane with rational normal n:
// max over the pencil of the rank of the forms restricted to n^⊥.
int restricted_max_rank(const QuadPair &pair, const Vec3 &normal);

// The three conics nᵀadj(A)n, nᵀC(A,B)n, nᵀadj(B)n of the Hessian pencil,
// where C is the mixed adjugate adj(A+B) - adj(A) - adj(B).
std::array<Mat3, 3> adjugate_conics(const QuadPair &pair);

}  // namespace quadsurf
