#include "ffsrm/tiff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

// Byte layout assumes a little-endian host, which matches the file format.

namespace ffsrm::io {

namespace {

constexpr uint16_t kTagWidth = 256;
constexpr uint16_t kTagLength = 257;
constexpr uint16_t kTagBits = 258;
constexpr uint16_t kTagCompression = 259;
constexpr uint16_t kTagPhotometric = 262;
constexpr uint16_t kTagDescription = 270;
constexpr uint16_t kTagStripOffsets = 273;
constexpr uint16_t kTagSamplesPerPixel = 277;
constexpr uint16_t kTagRowsPerStrip = 278;
constexpr uint16_t kTagStripByteCounts = 279;
constexpr uint16_t kTagXResolution = 282;
constexpr uint16_t kTagYResolution = 283;
constexpr uint16_t kTagResolutionUnit = 296;
constexpr uint16_t kTagSampleFormat = 339;

constexpr uint16_t kTypeShort = 3;
constexpr uint16_t kTypeLong = 4;
constexpr uint16_t kTypeRational = 5;
constexpr uint16_t kTypeAscii = 2;

struct Writer {
    std::vector<uint8_t> bytes;

    void u16(uint16_t v) {
        bytes.push_back(static_cast<uint8_t>(v));
        bytes.push_back(static_cast<uint8_t>(v >> 8));
    }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void raw(const void* data, size_t n) {
        const uint8_t* p = static_cast<const uint8_t*>(data);
        bytes.insert(bytes.end(), p, p + n);
    }
    void patch_u32(size_t pos, uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes[pos + i] = static_cast<uint8_t>(v >> (8 * i));
    }
};

struct Entry {
    uint16_t tag;
    uint16_t type;
    uint32_t count;
    uint32_t value;
};

void write_entry(Writer& w, const Entry& e) {
    w.u16(e.tag);
    w.u16(e.type);
    w.u32(e.count);
    if (e.type == kTypeShort && e.count == 1) {
        w.u16(static_cast<uint16_t>(e.value));
        w.u16(0);
    } else {
        w.u32(e.value);
    }
}

std::string make_description(double pixel_size_nm, double scale, int frames,
                             int upscale) {
    std::ostringstream os;
    os.precision(17);
    os << "ffsrm pixel_size_nm=" << pixel_size_nm << ";scale=" << scale
       << ";frames=" << frames << ";upscale=" << upscale;
    return os.str();
}

void write_tiff(const std::vector<const double*>& pages, int height, int width,
                double pixel_size_nm, int upscale, const std::string& path,
                TiffFormat format) {
    const size_t npix = static_cast<size_t>(height) * width;
    double scale = 1.0;
    if (format == TiffFormat::Uint16) {
        double peak = 0.0;
        bool integral = true;
        for (const double* page : pages)
            for (size_t i = 0; i < npix; ++i) {
                const double v = page[i];
                if (v < 0.0)
                    throw std::invalid_argument("tiff: Uint16 pages cannot hold negatives");
                peak = std::max(peak, v);
                if (integral && v != std::floor(v)) integral = false;
            }
        if (integral && peak <= 65535.0)
            scale = 1.0;
        else
            scale = peak > 0.0 ? 65535.0 / peak : 1.0;
    }

    const size_t sample_bytes = format == TiffFormat::Uint16 ? 2 : 4;
    const size_t frame_bytes = npix * sample_bytes;
    const std::string desc =
        make_description(pixel_size_nm, scale, static_cast<int>(pages.size()), upscale);

    Writer w;
    w.raw("II", 2);
    w.u16(42);
    const size_t first_ifd_pos = w.bytes.size();
    w.u32(0);  // patched later

    // Pixel data for all pages first.
    std::vector<uint32_t> data_offsets;
    for (const double* page : pages) {
        data_offsets.push_back(static_cast<uint32_t>(w.bytes.size()));
        if (format == TiffFormat::Uint16) {
            for (size_t i = 0; i < npix; ++i) {
                const double v = std::round(page[i] * scale);
                w.u16(static_cast<uint16_t>(std::clamp(v, 0.0, 65535.0)));
            }
        } else {
            for (size_t i = 0; i < npix; ++i) {
                const float f = static_cast<float>(page[i]);
                w.raw(&f, 4);
            }
        }
    }

    // Shared auxiliary blocks: description and resolution rationals.
    const uint32_t desc_offset = static_cast<uint32_t>(w.bytes.size());
    w.raw(desc.data(), desc.size());
    w.bytes.push_back(0);
    if (w.bytes.size() % 2) w.bytes.push_back(0);
    const uint32_t res_offset = static_cast<uint32_t>(w.bytes.size());
    // pixels per centimetre as a rational with 1/1000 precision
    const uint64_t per_cm = static_cast<uint64_t>(std::llround(1e7 / pixel_size_nm * 1000.0));
    w.u32(static_cast<uint32_t>(per_cm));
    w.u32(1000);

    const uint32_t desc_count = static_cast<uint32_t>(desc.size() + 1);
    size_t next_link_pos = first_ifd_pos;
    for (size_t p = 0; p < pages.size(); ++p) {
        const uint32_t ifd_offset = static_cast<uint32_t>(w.bytes.size());
        w.patch_u32(next_link_pos, ifd_offset);

        const Entry entries[] = {
            {kTagWidth, kTypeLong, 1, static_cast<uint32_t>(width)},
            {kTagLength, kTypeLong, 1, static_cast<uint32_t>(height)},
            {kTagBits, kTypeShort, 1, format == TiffFormat::Uint16 ? 16u : 32u},
            {kTagCompression, kTypeShort, 1, 1},
            {kTagPhotometric, kTypeShort, 1, 1},
            {kTagDescription, kTypeAscii, desc_count, desc_offset},
            {kTagStripOffsets, kTypeLong, 1, data_offsets[p]},
            {kTagSamplesPerPixel, kTypeShort, 1, 1},
            {kTagRowsPerStrip, kTypeLong, 1, static_cast<uint32_t>(height)},
            {kTagStripByteCounts, kTypeLong, 1, static_cast<uint32_t>(frame_bytes)},
            {kTagXResolution, kTypeRational, 1, res_offset},
            {kTagYResolution, kTypeRational, 1, res_offset},
            {kTagResolutionUnit, kTypeShort, 1, 3},
            {kTagSampleFormat, kTypeShort, 1, format == TiffFormat::Uint16 ? 1u : 3u},
        };
        w.u16(static_cast<uint16_t>(std::size(entries)));
        for (const Entry& e : entries) write_entry(w, e);
        next_link_pos = w.bytes.size();
        w.u32(0);
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("tiff: cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(w.bytes.data()),
              static_cast<std::streamsize>(w.bytes.size()));
    if (!out) throw std::runtime_error("tiff: write failed: " + path);
}

struct Reader {
    std::vector<uint8_t> bytes;

    uint16_t u16(size_t pos) const {
        check(pos, 2);
        return static_cast<uint16_t>(bytes[pos] | bytes[pos + 1] << 8);
    }
    uint32_t u32(size_t pos) const {
        check(pos, 4);
        return static_cast<uint32_t>(bytes[pos]) | static_cast<uint32_t>(bytes[pos + 1]) << 8 |
               static_cast<uint32_t>(bytes[pos + 2]) << 16 |
               static_cast<uint32_t>(bytes[pos + 3]) << 24;
    }
    void check(size_t pos, size_t n) const {
        if (pos + n > bytes.size()) throw std::runtime_error("tiff: truncated file");
    }
};

struct PageInfo {
    uint32_t width = 0, height = 0, bits = 0, sample_format = 1;
    std::vector<uint32_t> strip_offsets, strip_counts;
    uint32_t rows_per_strip = 0;
    std::string description;
};

double parse_description_field(const std::string& desc, const std::string& key,
                               double fallback) {
    const std::string token = key + "=";
    const size_t pos = desc.find(token);
    if (pos == std::string::npos) return fallback;
    return std::stod(desc.substr(pos + token.size()));
}

}  // namespace

void write_tiff_stack(const ImageStack& stack, const std::string& path,
                      TiffFormat format) {
    if (stack.frames <= 0) throw std::invalid_argument("tiff: empty stack");
    std::vector<const double*> pages;
    for (int t = 0; t < stack.frames; ++t) pages.push_back(stack.frame(t));
    write_tiff(pages, stack.height, stack.width, stack.pixel_size_nm, 1, path, format);
}

void write_tiff_image(const Image& image, const std::string& path, TiffFormat format) {
    if (image.pixel_count() == 0) throw std::invalid_argument("tiff: empty image");
    write_tiff({image.data.data()}, image.height, image.width, image.pixel_size_nm,
               image.upscale_factor, path, format);
}

ImageStack read_tiff_stack(const std::string& path) {
    Reader r;
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("tiff: cannot open: " + path);
        r.bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    if (r.bytes.size() < 8 || r.bytes[0] != 'I' || r.bytes[1] != 'I' || r.u16(2) != 42)
        throw std::runtime_error("tiff: not a little-endian TIFF: " + path);

    std::vector<PageInfo> pages;
    uint32_t ifd = r.u32(4);
    while (ifd != 0) {
        PageInfo page;
        const uint16_t count = r.u16(ifd);
        for (uint16_t e = 0; e < count; ++e) {
            const size_t pos = ifd + 2 + static_cast<size_t>(e) * 12;
            const uint16_t tag = r.u16(pos);
            const uint16_t type = r.u16(pos + 2);
            const uint32_t n = r.u32(pos + 4);
            auto scalar = [&]() -> uint32_t {
                return type == kTypeShort ? r.u16(pos + 8) : r.u32(pos + 8);
            };
            auto array_u32 = [&]() {
                std::vector<uint32_t> vals;
                if (n == 1) {
                    vals.push_back(scalar());
                } else {
                    const uint32_t off = r.u32(pos + 8);
                    for (uint32_t i = 0; i < n; ++i)
                        vals.push_back(type == kTypeShort ? r.u16(off + 2 * i)
                                                          : r.u32(off + 4 * i));
                }
                return vals;
            };
            switch (tag) {
                case kTagWidth: page.width = scalar(); break;
                case kTagLength: page.height = scalar(); break;
                case kTagBits: page.bits = scalar(); break;
                case kTagCompression:
                    if (scalar() != 1)
                        throw std::runtime_error("tiff: compressed files are not supported");
                    break;
                case kTagSampleFormat: page.sample_format = scalar(); break;
                case kTagSamplesPerPixel:
                    if (scalar() != 1)
                        throw std::runtime_error("tiff: only single-channel files are supported");
                    break;
                case kTagStripOffsets: page.strip_offsets = array_u32(); break;
                case kTagStripByteCounts: page.strip_counts = array_u32(); break;
                case kTagRowsPerStrip: page.rows_per_strip = scalar(); break;
                case kTagDescription: {
                    const uint32_t off = n <= 4 ? static_cast<uint32_t>(pos + 8) : r.u32(pos + 8);
                    r.check(off, n);
                    page.description.assign(reinterpret_cast<const char*>(&r.bytes[off]),
                                            n > 0 ? n - 1 : 0);
                    break;
                }
                default: break;
            }
        }
        pages.push_back(std::move(page));
        ifd = r.u32(ifd + 2 + static_cast<size_t>(count) * 12);
    }
    if (pages.empty()) throw std::runtime_error("tiff: no pages: " + path);

    const PageInfo& first = pages.front();
    for (size_t p = 0; p < pages.size(); ++p)
        if (pages[p].width != first.width || pages[p].height != first.height ||
            pages[p].bits != first.bits)
            throw std::runtime_error("tiff: page " + std::to_string(p) +
                                     " does not match page 0 (size or bit depth)");

    const double pixel_size =
        parse_description_field(first.description, "pixel_size_nm", 0.0);
    const double scale = parse_description_field(first.description, "scale", 1.0);
    if (!(pixel_size > 0.0))
        throw std::runtime_error("tiff: missing pixel_size_nm metadata: " + path);

    ImageStack stack(static_cast<int>(pages.size()), static_cast<int>(first.height),
                     static_cast<int>(first.width), pixel_size);
    const size_t npix = stack.frame_pixels();
    for (size_t p = 0; p < pages.size(); ++p) {
        const PageInfo& page = pages[p];
        if (page.strip_offsets.size() != page.strip_counts.size() ||
            page.strip_offsets.empty())
            throw std::runtime_error("tiff: bad strip layout");
        std::vector<uint8_t> raw;
        for (size_t s = 0; s < page.strip_offsets.size(); ++s) {
            r.check(page.strip_offsets[s], page.strip_counts[s]);
            raw.insert(raw.end(), &r.bytes[page.strip_offsets[s]],
                       &r.bytes[page.strip_offsets[s]] + page.strip_counts[s]);
        }
        double* dst = stack.frame(static_cast<int>(p));
        if (page.bits == 16 && page.sample_format == 1) {
            if (raw.size() < npix * 2) throw std::runtime_error("tiff: short pixel data");
            for (size_t i = 0; i < npix; ++i) {
                const uint16_t v =
                    static_cast<uint16_t>(raw[2 * i] | raw[2 * i + 1] << 8);
                dst[i] = static_cast<double>(v) / scale;
            }
        } else if (page.bits == 32 && page.sample_format == 3) {
            if (raw.size() < npix * 4) throw std::runtime_error("tiff: short pixel data");
            for (size_t i = 0; i < npix; ++i) {
                float f;
                std::memcpy(&f, &raw[4 * i], 4);
                dst[i] = static_cast<double>(f);
                if (f < 0.0f) stack.allow_negative = true;
            }
        } else {
            throw std::runtime_error("tiff: unsupported sample layout (need u16 or f32)");
        }
    }
    return stack;
}

}  // namespace ffsrm::io
