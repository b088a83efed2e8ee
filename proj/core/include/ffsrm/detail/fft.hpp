#pragma once

#include <complex>
#include <vector>

namespace ffsrm::detail {

// In-place 2D complex DFTs, unnormalized (FFTW convention): a forward
// followed by a backward transform scales by h * w.
void fft2_forward(std::vector<std::complex<double>>& data, int h, int w);
void fft2_backward(std::vector<std::complex<double>>& data, int h, int w);

}  // namespace ffsrm::detail
