#pragma once

#include <string>

#include "ffsrm/image.hpp"

namespace ffsrm::io {

// 8-bit grayscale preview, min-max normalized per image.
void write_png_gray(const Image& image, const std::string& path);

}  // namespace ffsrm::io
