#pragma once

#include <cstddef>
#include <vector>

namespace quadsurf::testing {

struct Malformed {
    const char *text;
    std::size_t offset;  // expected error position
};

inline const std::vector<Malformed> &malformed_corpus() {
    static const std::vector<Malformed> corpus{
        {"", 0},          {"x4^2", 0},        {"x1^2 +", 6},         {"x1^2 + + ", 9},  {"x1*", 3},
        {"x1^", 3},       {"x1^x2", 3},       {"2/0*x1^2", 2},       {"x1^2 x2^2", 5},  {"x1^2 )", 5},
        {"y1^2", 0},      {"x1^2 + 3*x", 9},  {"1/ x1^2", 3},        {"x1**x2", 3},     {"x1^2 + x2^2 -", 13},
        {"x1^2 , x2^2", 5}, {"x12^2", 0},     {"x1^-2", 3},          {"x1^2 + 2x", 8},  {"x1 ^ 2 + x3 * ", 14},
    };
    return corpus;
}

}  // namespace quadsurf::testing
