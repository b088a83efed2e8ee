#pragma once

#include <complex>
#include <functional>
#include <stdexcept>

namespace ffsrm::detail {

struct QuadratureResult {
    std::complex<double> value;
    double error = 0.0;   // achieved absolute error estimate
    int intervals = 0;
};

// Adaptive Gauss-Kronrod (G7,K15) for complex-valued integrands on [a,b].
// Bisects the interval with the largest error estimate until the summed
// estimate meets max(abs_tol, rel_tol * |integral|) or max_intervals is hit.
QuadratureResult gauss_kronrod(const std::function<std::complex<double>(double)>& f,
                               double a, double b, double rel_tol = 1e-6,
                               double abs_tol = 1e-14, int max_intervals = 512);

struct QuadratureError : std::runtime_error {
    double residual;
    explicit QuadratureError(const std::string& msg, double achieved)
        : std::runtime_error(msg), residual(achieved) {}
};

}  // namespace ffsrm::detail
