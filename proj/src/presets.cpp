#include "quadsurf/presets.hpp"

namespace quadsurf {

namespace {

// Symmetric coefficient matrix from the monomial coefficients of
// x1², x2², x3², x1x2, x1x3, x2x3.
QuadraticForm form(long a11, long a22, long a33, long a12, long a13, long a23) {
    Mat3 m = zero3();
    m[0][0] = a11;
    m[1][1] = a22;
    m[2][2] = a33;
    m[0][1] = m[1][0] = make_rational(a12, 2);
    m[0][2] = m[2][0] = make_rational(a13, 2);
    m[1][2] = m[2][1] = make_rational(a23, 2);
    return QuadraticForm(m);
}

}  // namespace

const std::vector<Preset> &normal_form_presets() {
    static const std::vector<Preset> presets{
        {"cm-oberlin", {form(1, 1, 0, 0, 0, 0), form(0, 1, 1, 0, 0, 0)}, ClassLabel::CM},
        {"dfail-elliptic", {form(1, 1, 0, 0, 0, 0), form(0, 0, 1, 0, 0, 0)},
         ClassLabel::D_fail_EllipticTimesParabola},
        {"dfail-hyperbolic", {form(1, -1, 0, 0, 0, 0), form(0, 0, 1, 0, 0, 0)},
         ClassLabel::D_fail_HyperbolicTimesParabola},
        {"dfail-twisted", {form(0, 0, 1, 1, 0, 0), form(1, 0, 0, 0, 0, 0)}, ClassLabel::D_fail_Twisted},
        {"r1-triple", {form(0, 0, 0, 1, 0, 0), form(0, 1, 0, 0, 1, 0)}, ClassLabel::R1_TripleRoot},
        {"r1-double-def", {form(0, 0, 0, 1, 0, 0), form(1, 0, 1, 0, 0, 0)}, ClassLabel::R1_DoubleRoot_Definite},
        {"r1-double-indef", {form(0, 0, 0, 1, 0, 0), form(1, 0, -1, 0, 0, 0)},
         ClassLabel::R1_DoubleRoot_Indefinite},
        {"r0", {form(0, 0, 0, 1, 0, 0), form(0, 0, 0, 0, 1, 0)}, ClassLabel::R0},
    };
    return presets;
}

std::optional<Preset> find_preset(const std::string &name) {
    for (const auto &p : normal_form_presets())
        if (p.name == name) return p;
    return std::nullopt;
}

}  // namespace quadsurf
