#pragma once

#include <cstddef>

namespace ffsrm::detail {

enum class LagMode { ZeroLag, DistinctFrames };

// Compensated (Kahan) accumulation keeps the kernel deterministic to the
// last bit for a fixed trace, independent of call site.
class KahanSum {
public:
    void add(double v) {
        const double y = v - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

double trace_mean(const double* trace, size_t n);

// Temporal cumulant of one pixel trace, orders 1-4.
// ZeroLag uses central moments m_k = E[d^k]:
//   k2 = m2, k3 = m3, k4 = m4 - 3 m2^2.
// DistinctFrames replaces the k-th power with a product over k consecutive
// frames, which removes the shot-noise contribution that only correlates a
// sample with itself.
double trace_cumulant(const double* trace, size_t n, int order, LagMode lag);

// Distinct-frame cumulant extended to orders 2..6 (moment-to-cumulant
// expansion of the centred products). Matches trace_cumulant for 2..4.
double trace_cumulant_distinct_ext(const double* trace, size_t n, int order);

}  // namespace ffsrm::detail
