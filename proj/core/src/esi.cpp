#include "ffsrm/esi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ffsrm/detail/cumulant.hpp"
#include "ffsrm/parallel.hpp"

namespace ffsrm::esi {

void EsiParams::validate(int frames) const {
    if (moment_order < 2) throw std::invalid_argument("esi: moment order must be >= 2");
    if (bins < 2) throw std::invalid_argument("esi: need at least 2 bins");
    if (output_images < 1) throw std::invalid_argument("esi: output_images must be >= 1");
    if (frames / output_images < 2)
        throw std::invalid_argument("esi: fewer than 2 frames per output block");
}

double trace_entropy(const std::vector<double>& trace, int bins) {
    const auto [lo, hi] = std::minmax_element(trace.begin(), trace.end());
    return trace_entropy(trace, bins, *lo, *hi);
}

double trace_entropy(const std::vector<double>& trace, int bins, double lo, double hi) {
    if (bins < 1) throw std::invalid_argument("trace_entropy: bins must be >= 1");
    if (trace.empty()) throw std::invalid_argument("trace_entropy: empty trace");
    if (!(hi > lo)) return 0.0;
    std::vector<int> counts(static_cast<size_t>(bins), 0);
    const double scale = bins / (hi - lo);
    for (double v : trace) {
        int b = static_cast<int>((v - lo) * scale);
        b = std::clamp(b, 0, bins - 1);
        ++counts[static_cast<size_t>(b)];
    }
    const double inv_n = 1.0 / static_cast<double>(trace.size());
    double h = 0.0;
    for (int c : counts) {
        if (c == 0) continue;
        const double p = c * inv_n;
        h -= p * std::log2(p);
    }
    return h;
}

double central_moment(const std::vector<double>& trace, int order) {
    if (trace.empty()) throw std::invalid_argument("central_moment: empty trace");
    if (order < 1) throw std::invalid_argument("central_moment: order must be >= 1");
    const double mean = detail::trace_mean(trace.data(), trace.size());
    detail::KahanSum sum;
    for (double v : trace) {
        const double d = v - mean;
        double p = d;
        for (int k = 1; k < order; ++k) p *= d;
        sum.add(p);
    }
    return sum.value() / static_cast<double>(trace.size());
}

namespace {

// Virtual trace between camera pixels: per-frame geometric mean of the
// flanking pixels (4 on diagonals).
void fill_cross_trace(const ImageStack& stack, int t0, int t1, int oy, int ox,
                      std::vector<double>& trace) {
    const int y = oy / 2;
    const int x = ox / 2;
    const bool odd_y = oy % 2 != 0;
    const bool odd_x = ox % 2 != 0;
    const int n = t1 - t0;
    for (int t = 0; t < n; ++t) {
        const int f = t0 + t;
        double v;
        if (odd_y && odd_x) {
            const double p = stack.at(f, y, x) * stack.at(f, y, x + 1) *
                             stack.at(f, y + 1, x) * stack.at(f, y + 1, x + 1);
            v = std::sqrt(std::sqrt(p));
        } else if (odd_x) {
            v = std::sqrt(stack.at(f, y, x) * stack.at(f, y, x + 1));
        } else if (odd_y) {
            v = std::sqrt(stack.at(f, y, x) * stack.at(f, y + 1, x));
        } else {
            v = stack.at(f, y, x);
        }
        trace[static_cast<size_t>(t)] = v;
    }
}

}  // namespace

std::vector<ReconstructionResult> esi_reconstruct(const ImageStack& stack,
                                                  const EsiParams& params) {
    params.validate(stack.frames);
    const auto report = validate_stack(stack);
    if (!report.valid)
        throw std::invalid_argument("esi: invalid input stack: " + report.issues.front());
    if (*std::min_element(stack.data.begin(), stack.data.end()) < 0.0)
        throw std::invalid_argument("esi: stack must be non-negative (geometric-mean traces)");

    const int out_h = 2 * stack.height - 1;
    const int out_w = 2 * stack.width - 1;
    const int block = stack.frames / params.output_images;

    std::vector<ReconstructionResult> results(static_cast<size_t>(params.output_images));
    for (int b = 0; b < params.output_images; ++b) {
        const int t0 = b * block;
        const int t1 = b + 1 == params.output_images ? stack.frames : t0 + block;

        double lo = stack.at(t0, 0, 0), hi = lo;
        for (int f = t0; f < t1; ++f) {
            const double* frame = stack.frame(f);
            for (size_t p = 0; p < stack.frame_pixels(); ++p) {
                lo = std::min(lo, frame[p]);
                hi = std::max(hi, frame[p]);
            }
        }

        ReconstructionResult& res = results[static_cast<size_t>(b)];
        res.method = Method::Esi;
        res.input_frames = t1 - t0;
        res.image = Image(out_h, out_w, stack.pixel_size_nm / 2.0, 2);
        res.param("moment_order", params.moment_order);
        res.param("bins", params.bins);
        res.param("block", b);

        Image& img = res.image;
        parallel_for(static_cast<size_t>(out_h), [&](size_t oy) {
            std::vector<double> trace(static_cast<size_t>(t1 - t0));
            for (int ox = 0; ox < out_w; ++ox) {
                fill_cross_trace(stack, t0, t1, static_cast<int>(oy), ox, trace);
                const double h = trace_entropy(trace, params.bins, lo, hi);
                const double m = central_moment(trace, params.moment_order);
                img.at(static_cast<int>(oy), ox) = h * std::fabs(m);
            }
        });
    }
    return results;
}

}  // namespace ffsrm::esi
