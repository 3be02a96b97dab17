#pragma once

#include <cmath>
#include <complex>

namespace quadsurf {

// Neumaier compensated summation.
class RealSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0;
    double comp_ = 0;
};

class ComplexSum {
public:
    void add(const std::complex<double> &z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }

private:
    RealSum re_;
    RealSum im_;
};

}  // namespace quadsurf
