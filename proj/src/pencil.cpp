#include "quadsurf/pencil.hpp"

#include "quadsurf/pencil_numeric.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace quadsurf {

QuadraticForm::QuadraticForm(const Mat3 &m) : coeff_(m) {
    if (!is_symmetric(m)) throw std::invalid_argument("quadratic form coefficients must be symmetric");
}

Equivalence::Equivalence(const Mat3 &m1, const Mat2 &m2) : m1_(m1), m2_(m2) {
    if (det(m1) == 0) throw std::invalid_argument("equivalence: m1 is singular");
    if (det(m2) == 0) throw std::invalid_argument("equivalence: m2 is singular");
}

Equivalence Equivalence::identity() { return Equivalence(identity3(), identity2()); }

namespace {

// Homogeneous binary polynomial, coefficient k multiplies x1^(deg-k)·x2^k.
using Binary = std::vector<Rational>;

Binary mul(const Binary &a, const Binary &b) {
    Binary c(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

}  // namespace

Rational BinaryCubic::operator()(const Rational &x1, const Rational &x2) const {
    return c[0] * x1 * x1 * x1 + c[1] * x1 * x1 * x2 + c[2] * x1 * x2 * x2 + c[3] * x2 * x2 * x2;
}

BinaryCubic BinaryCubic::substitute(const Mat2 &m) const {
    Binary l1{m[0][0], m[0][1]};
    Binary l2{m[1][0], m[1][1]};
    std::array<Binary, 4> terms{mul(mul(l1, l1), l1), mul(mul(l1, l1), l2), mul(mul(l1, l2), l2),
                                mul(mul(l2, l2), l2)};
    BinaryCubic out;
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) out.c[j] += c[k] * terms[k][j];
    return out;
}

BinaryCubic BinaryCubic::scaled(const Rational &s) const {
    BinaryCubic out;
    for (int k = 0; k < 4; ++k) out.c[k] = s * c[k];
    return out;
}

std::string BinaryCubic::to_string() const {
    static const char *mono[4] = {"x1^3", "x1^2*x2", "x1*x2^2", "x2^3"};
    std::ostringstream os;
    bool first = true;
    for (int k = 0; k < 4; ++k) {
        if (c[k] == 0) continue;
        Rational v = c[k];
        if (!first) os << (v < 0 ? " - " : " + ");
        else if (v < 0) os << "-";
        Rational mag = abs(v);
        if (mag != 1) os << mag.get_str() << "*";
        os << mono[k];
        first = false;
    }
    if (first) return "0";
    return os.str();
}

Direction normalize(const Rational &a, const Rational &b) {
    if (b != 0) return {a / b, 1};
    if (a != 0) return {1, 0};
    throw ZeroDirection();
}

std::array<double, 3> SurdVector::approx() const {
    double s = radicand > 0 ? std::sqrt(radicand.get_d()) : 0.0;
    return {rational_part[0].get_d() + s * radical_part[0].get_d(),
            rational_part[1].get_d() + s * radical_part[1].get_d(),
            rational_part[2].get_d() + s * radical_part[2].get_d()};
}

std::string SurdVector::to_string() const {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < 3; ++i) {
        if (i) os << ", ";
        if (radical_part[i] == 0) {
            os << rational_part[i].get_str();
        } else {
            if (rational_part[i] != 0) os << rational_part[i].get_str() << " + ";
            os << radical_part[i].get_str() << "*sqrt(" << radicand.get_str() << ")";
        }
    }
    os << ")";
    return os.str();
}

std::string to_string(ClassLabel label) {
    switch (label) {
    case ClassLabel::Reducible: return "Reducible";
    case ClassLabel::CM: return "CM";
    case ClassLabel::D_fail_EllipticTimesParabola: return "D_fail_EllipticTimesParabola";
    case ClassLabel::D_fail_HyperbolicTimesParabola: return "D_fail_HyperbolicTimesParabola";
    case ClassLabel::D_fail_Twisted: return "D_fail_Twisted";
    case ClassLabel::R1_TripleRoot: return "R1_TripleRoot";
    case ClassLabel::R1_DoubleRoot_Definite: return "R1_DoubleRoot_Definite";
    case ClassLabel::R1_DoubleRoot_Indefinite: return "R1_DoubleRoot_Indefinite";
    case ClassLabel::R0: return "R0";
    }
    return "?";
}

std::string to_string(RootKind kind) {
    switch (kind) {
    case RootKind::IdenticallyZero: return "IdenticallyZero";
    case RootKind::TripleReal: return "TripleReal";
    case RootKind::DoubleSimpleReal: return "DoubleSimpleReal";
    case RootKind::ThreeDistinctReal: return "ThreeDistinctReal";
    case RootKind::OneRealPlusComplexPair: return "OneRealPlusComplexPair";
    }
    return "?";
}

std::string to_string(RankMethod method) {
    return method == RankMethod::Exact ? "Exact" : "NumericThenVerified";
}

BinaryCubic pencil_cubic(const QuadPair &pair) {
    Mat3 a = pair.p.hessian();
    Mat3 b = pair.q.hessian();
    Mat3 adj_a = adjugate(a);
    Mat3 adj_b = adjugate(b);
    BinaryCubic out;
    out.c[0] = det(a);
    out.c[3] = det(b);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            out.c[1] += adj_a[i][j] * b[j][i];
            out.c[2] += adj_b[i][j] * a[j][i];
        }
    return out;
}

RootPattern root_pattern(const BinaryCubic &cubic) {
    RootPattern out;
    if (cubic.is_zero()) return out;
    const auto &c = cubic.c;
    // g(t) = D(t, 1); each degree lost relative to 3 is one more power of x2
    // dividing D, i.e. multiplicity of the root (1:0).
    RationalPoly g(std::vector<Rational>{c[3], c[2], c[1], c[0]});
    const Direction infinity{1, 0};
    auto double_simple = [&](Direction rep, Direction simple) {
        out.kind = RootKind::DoubleSimpleReal;
        out.repeated_root_direction = rep;
        out.simple_root_direction = simple;
        out.simple_real_roots_count = 1;
    };
    switch (g.degree()) {
    case 0:
        out.kind = RootKind::TripleReal;
        out.repeated_root_direction = infinity;
        return out;
    case 1:
        double_simple(infinity, Direction{-c[3] / c[2], 1});
        return out;
    case 2: {
        Rational disc = c[2] * c[2] - 4 * c[1] * c[3];
        if (disc == 0) {
            double_simple(Direction{-c[2] / (2 * c[1]), 1}, infinity);
        } else if (disc > 0) {
            out.kind = RootKind::ThreeDistinctReal;
            out.simple_real_roots_count = 3;
        } else {
            out.kind = RootKind::OneRealPlusComplexPair;
            out.simple_real_roots_count = 1;
        }
        return out;
    }
    default: break;
    }
    RationalPoly h = RationalPoly::gcd(g, g.derivative());
    if (h.degree() == 2) {
        out.kind = RootKind::TripleReal;
        out.repeated_root_direction = Direction{-h.coeffs()[1] / 2, 1};
        return out;
    }
    if (h.degree() == 1) {
        RationalPoly quot, rem;
        RationalPoly::divmod(g, h * h, quot, rem);
        double_simple(Direction{-h.coeffs()[0], 1}, Direction{-quot.coeffs()[0] / quot.coeffs()[1], 1});
        return out;
    }
    const Rational &a = c[0], &b = c[1], &cc = c[2], &d = c[3];
    Rational disc = 18 * a * b * cc * d - 4 * b * b * b * d + b * b * cc * cc - 4 * a * cc * cc * cc -
                    27 * a * a * d * d;
    if (disc > 0) {
        out.kind = RootKind::ThreeDistinctReal;
        out.simple_real_roots_count = 3;
    } else {
        out.kind = RootKind::OneRealPlusComplexPair;
        out.simple_real_roots_count = 1;
    }
    return out;
}

IrreducibilityResult is_irreducible(const QuadPair &pair) {
    IrreducibilityResult out;
    Mat3 a = pair.p.hessian();
    Mat3 b = pair.q.hessian();
    if (is_zero(a)) {
        out.dependency = std::make_pair(Rational(1), Rational(0));
        return out;
    }
    if (is_zero(b)) {
        out.dependency = std::make_pair(Rational(0), Rational(1));
        return out;
    }
    for (int i = 0; i < 3 && !out.dependency; ++i)
        for (int j = 0; j < 3; ++j) {
            if (a[i][j] == 0) continue;
            Rational lambda = b[i][j] / a[i][j];
            if (b == scale(lambda, a)) out.dependency = std::make_pair(lambda, Rational(-1));
            break;
        }
    if (out.dependency) return out;
    RationalMatrix stacked(6, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            stacked(i, j) = a[i][j];
            stacked(i + 3, j) = b[i][j];
        }
    auto kernel = stacked.nullspace();
    if (!kernel.empty()) {
        out.common_kernel = normalize_projective(Vec3{kernel[0][0], kernel[0][1], kernel[0][2]});
        return out;
    }
    out.irreducible = true;
    return out;
}

DConditionResult check_D(const QuadPair &pair) {
    Mat3 a = pair.p.hessian();
    Mat3 b = pair.q.hessian();
    // Row r of the 6×3 matrix holds the coefficient of monomial r in each
    // component of (Aξ) × (Bξ).
    static const int mono[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
    RationalMatrix m(6, 3);
    for (int k = 0; k < 3; ++k) {
        int i = (k + 1) % 3, j = (k + 2) % 3;
        for (int r = 0; r < 6; ++r) {
            int s = mono[r][0], t = mono[r][1];
            if (s == t)
                m(r, k) = a[i][s] * b[j][s] - a[j][s] * b[i][s];
            else
                m(r, k) = a[i][s] * b[j][t] + a[i][t] * b[j][s] - a[j][s] * b[i][t] - a[j][t] * b[i][s];
        }
    }
    DConditionResult out;
    auto kernel = m.nullspace();
    if (!kernel.empty()) {
        out.holds = false;
        out.witness_w = normalize_projective(Vec3{kernel[0][0], kernel[0][1], kernel[0][2]});
    }
    return out;
}

CMDecision check_CM(const QuadPair &pair) {
    RootPattern pat = root_pattern(pencil_cubic(pair));
    CMDecision out;
    switch (pat.kind) {
    case RootKind::IdenticallyZero:
        out.holds = false;
        out.max_real_root_multiplicity = std::nullopt;
        out.critical_gamma = 0;
        return out;
    case RootKind::TripleReal: out.max_real_root_multiplicity = 3; break;
    case RootKind::DoubleSimpleReal: out.max_real_root_multiplicity = 2; break;
    case RootKind::ThreeDistinctReal:
    case RootKind::OneRealPlusComplexPair: out.max_real_root_multiplicity = 1; break;
    }
    out.holds = *out.max_real_root_multiplicity <= 1;
    out.critical_gamma = Rational(1, *out.max_real_root_multiplicity);
    return out;
}

Inertia signature_at(const QuadPair &pair, const Direction &direction) {
    if (direction.a == 0 && direction.b == 0) throw ZeroDirection();
    return inertia(scale(direction.a, pair.p.hessian()) + scale(direction.b, pair.q.hessian()));
}

std::array<Mat3, 3> adjugate_conics(const QuadPair &pair) {
    Mat3 a = pair.p.hessian();
    Mat3 b = pair.q.hessian();
    Mat3 adj_a = adjugate(a);
    Mat3 adj_b = adjugate(b);
    return {adj_a, adjugate(a + b) - adj_a - adj_b, adj_b};
}

int restricted_max_rank(const QuadPair &pair, const Vec3 &normal) {
    if (is_zero(normal)) throw std::invalid_argument("hyperplane normal must be nonzero");
    RationalMatrix row(1, 3);
    for (int i = 0; i < 3; ++i) row(0, i) = normal[i];
    auto basis = row.nullspace();
    Vec3 u{basis[0][0], basis[0][1], basis[0][2]};
    Vec3 v{basis[1][0], basis[1][1], basis[1][2]};
    Mat3 a = pair.p.hessian();
    Mat3 b = pair.q.hessian();
    Mat2 ra{{{bilinear(u, a, u), bilinear(u, a, v)}, {bilinear(v, a, u), bilinear(v, a, v)}}};
    Mat2 rb{{{bilinear(u, b, u), bilinear(u, b, v)}, {bilinear(v, b, u), bilinear(v, b, v)}}};
    bool za = ra[0][0] == 0 && ra[0][1] == 0 && ra[1][1] == 0;
    bool zb = rb[0][0] == 0 && rb[0][1] == 0 && rb[1][1] == 0;
    if (za && zb) return 0;
    Rational mixed = ra[0][0] * rb[1][1] + ra[1][1] * rb[0][0] - 2 * ra[0][1] * rb[0][1];
    if (det(ra) == 0 && det(rb) == 0 && mixed == 0) return 1;
    return 2;
}

namespace {

// Element a + b·sqrt(d) of Q(sqrt d), with d carried by the caller.
struct Surd {
    Rational a = 0;
    Rational b = 0;
    bool is_zero() const { return a == 0 && b == 0; }
};

struct SurdVec {
    Vec3 r{0, 0, 0};
    Vec3 s{0, 0, 0};
};

Surd surd_bilinear(const SurdVec &u, const Mat3 &m, const SurdVec &v, const Rational &d) {
    return {bilinear(u.r, m, v.r) + d * bilinear(u.s, m, v.s),
            bilinear(u.r, m, v.s) + bilinear(u.s, m, v.r)};
}

bool rational_sqrt(const Rational &x, Rational &root) {
    if (x < 0) return false;
    Integer n = x.get_num(), d = x.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
    root = Rational(sqrt(n), sqrt(d));
    root.canonicalize();
    return true;
}

// Candidate plane spanned by two (possibly irrational) vectors.
struct PlaneCandidate {
    SurdVec u;
    SurdVec v;
    Rational radicand = 0;
};

SurdVec rational_vec(const Vec3 &x) { return {x, Vec3{0, 0, 0}}; }

SurdVec surd_cross(const Vec3 &k, const SurdVec &v) { return {cross(k, v.r), cross(k, v.s)}; }

// Planes on which the rank-≤2 pencil member m vanishes identically.
std::vector<PlaneCandidate> isotropic_planes(const Mat3 &m) {
    std::vector<PlaneCandidate> out;
    RationalMatrix rm = RationalMatrix::from(m);
    std::size_t rank = rm.rank();
    if (rank == 1) {
        for (const auto &row : m)
            if (!is_zero(Vec3{row[0], row[1], row[2]})) {
                RationalMatrix nrow(1, 3);
                for (int i = 0; i < 3; ++i) nrow(0, i) = row[i];
                auto basis = nrow.nullspace();
                out.push_back({rational_vec({basis[0][0], basis[0][1], basis[0][2]}),
                               rational_vec({basis[1][0], basis[1][1], basis[1][2]}), 0});
                break;
            }
        return out;
    }
    if (rank != 2) return out;
    Inertia in = inertia(m);
    if (in.n_pos != 1 || in.n_neg != 1) return out;
    auto kern = rm.nullspace();
    Vec3 k{kern[0][0], kern[0][1], kern[0][2]};
    int piv = k[0] != 0 ? 0 : (k[1] != 0 ? 1 : 2);
    Vec3 w1{0, 0, 0}, w2{0, 0, 0};
    w1[(piv + 1) % 3] = 1;
    w2[(piv + 2) % 3] = 1;
    Rational alpha = bilinear(w1, m, w1);
    Rational beta = bilinear(w1, m, w2);
    Rational gamma = bilinear(w2, m, w2);
    auto lin = [](const Rational &s, const Vec3 &x, const Vec3 &y) {
        return Vec3{s * x[0] + y[0], s * x[1] + y[1], s * x[2] + y[2]};
    };
    if (alpha == 0) {
        out.push_back({rational_vec(k), rational_vec(w1), 0});
        out.push_back({rational_vec(k), rational_vec(lin(-gamma / (2 * beta), w1, w2)), 0});
        return out;
    }
    Rational delta = beta * beta - alpha * gamma;
    Rational root;
    if (rational_sqrt(delta, root)) {
        for (int sign : {1, -1})
            out.push_back({rational_vec(k), rational_vec(lin((-beta + sign * root) / alpha, w1, w2)), 0});
        return out;
    }
    Vec3 base = lin(-beta / alpha, w1, w2);
    for (int sign : {1, -1}) {
        Rational f = Rational(sign) / alpha;
        SurdVec v{base, Vec3{f * w1[0], f * w1[1], f * w1[2]}};
        out.push_back({rational_vec(k), v, delta});
    }
    return out;
}

bool forms_vanish_on(const PlaneCandidate &c, const Mat3 &m) {
    return surd_bilinear(c.u, m, c.u, c.radicand).is_zero() &&
           surd_bilinear(c.u, m, c.v, c.radicand).is_zero() &&
           surd_bilinear(c.v, m, c.v, c.radicand).is_zero();
}

bool conics_vanish_at(const std::array<Mat3, 3> &conics, const SurdVec &n, const Rational &d) {
    for (const auto &k : conics)
        if (!surd_bilinear(n, k, n, d).is_zero()) return false;
    return true;
}

SurdVector to_surd_vector(const SurdVec &n, const Rational &d) {
    SurdVector out;
    out.rational_part = n.r;
    out.radical_part = n.s;
    out.radicand = is_zero(n.s) ? Rational(0) : d;
    if (out.is_rational()) out.rational_part = normalize_projective(n.r);
    return out;
}

RankConditionResult rank_two_result(const QuadPair &pair) {
    static const std::array<Vec3, 7> probes{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}, Vec3{1, 1, 0},
                                            Vec3{1, 0, 1}, Vec3{0, 1, 1}, Vec3{1, 1, 1}};
    for (const auto &n : probes)
        if (restricted_max_rank(pair, n) == 2) {
            RankConditionResult out;
            out.d_prime = 2;
            out.witness_normal.rational_part = n;
            return out;
        }
    // Callers reach this point only after ruling out every d' ≤ 1 plane.
    throw InconsistentInvariants("no rank-2 hyperplane among probe normals");
}

}  // namespace

RankConditionResult check_R(const QuadPair &pair) {
    if (!is_irreducible(pair).irreducible) throw FailsPrecondition("check_R requires an irreducible pair");
    Mat3 a = pair.p.hessian();
    Mat3 b = pair.q.hessian();
    BinaryCubic cubic = pencil_cubic(pair);
    RootPattern pat = root_pattern(cubic);
    auto conics = adjugate_conics(pair);

    if (pat.kind == RootKind::IdenticallyZero) {
        // Kernels of the singular members sweep a plane when that plane is
        // totally isotropic for the whole pencil.
        std::vector<Vec3> kernels;
        static const int samples[6][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {1, 2}, {2, 1}};
        for (const auto &s : samples) {
            Mat3 m = scale(s[0], a) + scale(s[1], b);
            RationalMatrix rm = RationalMatrix::from(m);
            auto kern = rm.nullspace();
            if (kern.size() == 1) kernels.push_back({kern[0][0], kern[0][1], kern[0][2]});
        }
        for (std::size_t i = 0; i < kernels.size(); ++i)
            for (std::size_t j = i + 1; j < kernels.size(); ++j) {
                Vec3 n = cross(kernels[i], kernels[j]);
                if (is_zero(n)) continue;
                if (restricted_max_rank(pair, n) == 0) {
                    RankConditionResult out;
                    out.d_prime = 0;
                    out.witness_normal.rational_part = normalize_projective(n);
                    return out;
                }
            }
        return check_R_numeric(pair);
    }

    if (!pat.repeated_root_direction) return rank_two_result(pair);

    // A hyperplane with restricted max rank ≤ 1 carries a real pencil member
    // vanishing on it, hence a root member of D; with a repeated root all
    // roots are rational.
    std::vector<Direction> roots{*pat.repeated_root_direction};
    if (pat.simple_root_direction) roots.push_back(*pat.simple_root_direction);
    std::optional<RankConditionResult> best;
    for (const auto &r : roots) {
        Mat3 m = scale(r.a, a) + scale(r.b, b);
        for (const auto &plane : isotropic_planes(m)) {
            SurdVec n = surd_cross(plane.u.r, plane.v);
            if (!conics_vanish_at(conics, n, plane.radicand)) continue;
            int d = (forms_vanish_on(plane, a) && forms_vanish_on(plane, b)) ? 0 : 1;
            if (!best || d < best->d_prime) {
                RankConditionResult out;
                out.d_prime = d;
                out.witness_normal = to_surd_vector(n, plane.radicand);
                best = out;
            }
        }
    }
    if (best) return *best;
    return rank_two_result(pair);
}

namespace {

int expected_d_prime(ClassLabel label) {
    switch (label) {
    case ClassLabel::CM:
    case ClassLabel::D_fail_EllipticTimesParabola: return 2;
    case ClassLabel::R0: return 0;
    default: return 1;
    }
}

}  // namespace

ClassificationCertificate classify(const QuadPair &pair) {
    ClassificationCertificate cert;
    cert.irreducibility = is_irreducible(pair);
    cert.cubic = pencil_cubic(pair);
    cert.pattern = root_pattern(cert.cubic);
    cert.d_result = check_D(pair);
    cert.cm = check_CM(pair);
    if (cert.pattern.repeated_root_direction)
        cert.signature_at_repeated_root = signature_at(pair, *cert.pattern.repeated_root_direction);
    if (cert.pattern.simple_root_direction)
        cert.signature_at_simple_root = signature_at(pair, *cert.pattern.simple_root_direction);
    if (!cert.irreducibility.irreducible) {
        cert.label = ClassLabel::Reducible;
        return cert;
    }
    cert.r_result = check_R(pair);

    auto definite = [](const Inertia &s) {
        return s.n_zero == 1 && (s.n_pos == 2 || s.n_neg == 2);
    };
    auto indefinite = [](const Inertia &s) { return s.n_zero == 1 && s.n_pos == 1 && s.n_neg == 1; };
    auto fail = [&](const std::string &why) -> ClassificationCertificate {
        throw InconsistentInvariants(why + " (cubic " + cert.cubic.to_string() + ", pattern " +
                                     to_string(cert.pattern.kind) + ")");
    };

    const bool d_holds = cert.d_result.holds;
    switch (cert.pattern.kind) {
    case RootKind::IdenticallyZero:
        if (!d_holds) return fail("zero pencil determinant with the (D) condition failing");
        cert.label = ClassLabel::R0;
        break;
    case RootKind::ThreeDistinctReal:
    case RootKind::OneRealPlusComplexPair:
        if (!d_holds) return fail("(D) fails with a squarefree pencil determinant");
        cert.label = ClassLabel::CM;
        break;
    case RootKind::TripleReal:
        cert.label = d_holds ? ClassLabel::R1_TripleRoot : ClassLabel::D_fail_Twisted;
        break;
    case RootKind::DoubleSimpleReal:
        if (d_holds) {
            const Inertia &s = *cert.signature_at_repeated_root;
            if (definite(s))
                cert.label = ClassLabel::R1_DoubleRoot_Definite;
            else if (indefinite(s))
                cert.label = ClassLabel::R1_DoubleRoot_Indefinite;
            else
                return fail("degenerate signature at the double root");
        } else {
            const Inertia &s = *cert.signature_at_simple_root;
            if (definite(s))
                cert.label = ClassLabel::D_fail_EllipticTimesParabola;
            else if (indefinite(s))
                cert.label = ClassLabel::D_fail_HyperbolicTimesParabola;
            else
                return fail("degenerate signature at the simple root");
        }
        break;
    }
    if (cert.r_result->d_prime != expected_d_prime(cert.label))
        return fail("rank condition d'=" + std::to_string(cert.r_result->d_prime) + " contradicts label " +
                    to_string(cert.label));
    if (cert.cm.holds != (d_holds && cert.r_result->d_prime == 2))
        return fail("(CM) disagrees with (D) and (R_2)");
    return cert;
}

QuadPair apply_equivalence(const QuadPair &pair, const Equivalence &e) {
    Mat3 t = transpose(e.m1());
    Mat3 pc = t * pair.p.coeff() * e.m1();
    Mat3 qc = t * pair.q.coeff() * e.m1();
    const Mat2 &m2 = e.m2();
    return {QuadraticForm(scale(m2[0][0], pc) + scale(m2[0][1], qc)),
            QuadraticForm(scale(m2[1][0], pc) + scale(m2[1][1], qc))};
}

bool verify_equivalence(const QuadPair &a, const QuadPair &b, const Equivalence &e) {
    return apply_equivalence(a, e) == b;
}

}  // namespace quadsurf
