#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace ppwg {

// Compensated summation. Reductions over large grids must not depend on
// traversal order at the 1e-12 level, so every integral in the library
// goes through this.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double kahan_total(std::span<const double> values) {
    KahanSum s;
    for (double v : values) s.add(v);
    return s.value();
}

/// sin(x)/x with the removable singularity handled.
inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

inline double sqr(double x) { return x * x; }

}  // namespace ppwg
