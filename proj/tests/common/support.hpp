#pragma once

#include "quadsurf/pencil.hpp"

#include <random>

namespace quadsurf::testing {

inline Rational random_rational(std::mt19937_64 &rng, long range = 9, long max_den = 6) {
    std::uniform_int_distribution<long> num(-range, range), den(1, max_den);
    return make_rational(num(rng), den(rng));
}

inline Mat3 random_invertible3(std::mt19937_64 &rng) {
    for (;;) {
        Mat3 m;
        for (auto &row : m)
            for (auto &x : row) x = random_rational(rng, 5, 4);
        if (det(m) != 0) return m;
    }
}

inline Mat2 random_invertible2(std::mt19937_64 &rng) {
    for (;;) {
        Mat2 m;
        for (auto &row : m)
            for (auto &x : row) x = random_rational(rng, 5, 4);
        if (det(m) != 0) return m;
    }
}

inline Mat3 random_symmetric(std::mt19937_64 &rng) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) m[i][j] = m[j][i] = random_rational(rng);
    return m;
}

inline Equivalence random_equivalence(std::mt19937_64 &rng) {
    return Equivalence(random_invertible3(rng), random_invertible2(rng));
}

}  // namespace quadsurf::testing
