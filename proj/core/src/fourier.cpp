#include "ffsrm/detail/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace ffsrm::detail {

namespace {

std::mutex plan_mutex;  // FFTW plan creation is not thread-safe

void fft2(std::vector<std::complex<double>>& data, int h, int w, int sign) {
    if (static_cast<size_t>(h) * w != data.size())
        throw std::invalid_argument("fft2: buffer does not match dimensions");
    fftw_complex* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_2d(h, w, buf, buf, sign, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft2: FFTW plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
}

}  // namespace

void fft2_forward(std::vector<std::complex<double>>& data, int h, int w) {
    fft2(data, h, w, FFTW_FORWARD);
}

void fft2_backward(std::vector<std::complex<double>>& data, int h, int w) {
    fft2(data, h, w, FFTW_BACKWARD);
}

}  // namespace ffsrm::detail
