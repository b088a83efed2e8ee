#include "ffsrm/detail/cumulant.hpp"

#include <stdexcept>
#include <vector>

namespace ffsrm::detail {

double trace_mean(const double* trace, size_t n) {
    KahanSum sum;
    for (size_t i = 0; i < n; ++i) sum.add(trace[i]);
    return sum.value() / static_cast<double>(n);
}

namespace {

double central_moment_power(const double* trace, size_t n, int order, double mean) {
    KahanSum sum;
    for (size_t i = 0; i < n; ++i) {
        const double d = trace[i] - mean;
        double p = d;
        for (int k = 1; k < order; ++k) p *= d;
        sum.add(p);
    }
    return sum.value() / static_cast<double>(n);
}

double central_moment_distinct(const double* trace, size_t n, int order, double mean) {
    const size_t count = n - static_cast<size_t>(order) + 1;
    KahanSum sum;
    for (size_t i = 0; i < count; ++i) {
        double p = trace[i] - mean;
        for (int k = 1; k < order; ++k) p *= trace[i + k] - mean;
        sum.add(p);
    }
    return sum.value() / static_cast<double>(count);
}

}  // namespace

double trace_cumulant(const double* trace, size_t n, int order, LagMode lag) {
    if (order < 1 || order > 4)
        throw std::invalid_argument("trace_cumulant: order must be in 1..4");
    if (n < static_cast<size_t>(order))
        throw std::invalid_argument("trace_cumulant: trace shorter than order");

    const double mean = trace_mean(trace, n);
    if (order == 1) return mean;

    auto moment = [&](int k) {
        return lag == LagMode::ZeroLag ? central_moment_power(trace, n, k, mean)
                                       : central_moment_distinct(trace, n, k, mean);
    };
    switch (order) {
        case 2: return moment(2);
        case 3: return moment(3);
        default: {
            const double m2 = moment(2);
            return moment(4) - 3.0 * m2 * m2;
        }
    }
}

double trace_cumulant_distinct_ext(const double* trace, size_t n, int order) {
    if (order < 2 || order > 6)
        throw std::invalid_argument("trace_cumulant_distinct_ext: order must be in 2..6");
    if (n < static_cast<size_t>(order))
        throw std::invalid_argument("trace_cumulant_distinct_ext: trace shorter than order");

    const double mean = trace_mean(trace, n);
    auto p = [&](int k) { return central_moment_distinct(trace, n, k, mean); };
    switch (order) {
        case 2: return p(2);
        case 3: return p(3);
        case 4: {
            const double p2 = p(2);
            return p(4) - 3.0 * p2 * p2;
        }
        case 5: return p(5) - 10.0 * p(3) * p(2);
        default: {
            const double p2 = p(2);
            const double p3 = p(3);
            return p(6) - 15.0 * p(4) * p2 - 10.0 * p3 * p3 + 30.0 * p2 * p2 * p2;
        }
    }
}

}  // namespace ffsrm::detail
