#pragma once

#include <string>

#include "ffsrm/image.hpp"

namespace ffsrm::io {

enum class TiffFormat { Uint16, Float32 };

// Minimal baseline TIFF, little-endian, uncompressed, one strip per page.
// Uint16 pages carry a scale factor in the ImageDescription so fractional
// stacks round-trip as value = stored / scale; Float32 pages store values
// directly. The description also records pixel_size_nm (authoritative over
// the resolution tags) and the upscale factor.
void write_tiff_stack(const ImageStack& stack, const std::string& path,
                      TiffFormat format);
void write_tiff_image(const Image& image, const std::string& path,
                      TiffFormat format = TiffFormat::Float32);

ImageStack read_tiff_stack(const std::string& path);

}  // namespace ffsrm::io
