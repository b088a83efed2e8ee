#include "ffsrm/image.hpp"

#include <cmath>
#include <sstream>

namespace ffsrm {

StackValidation validate_stack(const ImageStack& stack) {
    StackValidation report;
    auto fail = [&](const std::string& msg) {
        report.valid = false;
        report.issues.push_back(msg);
    };

    if (stack.frames <= 0 || stack.height <= 0 || stack.width <= 0)
        fail("non-positive dimensions");
    if (!(stack.pixel_size_nm > 0.0))
        fail("pixel size must be positive");
    const size_t expected =
        static_cast<size_t>(stack.frames) * stack.height * stack.width;
    if (stack.data.size() != expected) {
        std::ostringstream os;
        os << "storage size " << stack.data.size() << " does not match dimensions ("
           << expected << " expected)";
        fail(os.str());
        return report;
    }

    const size_t frame_px = stack.frame_pixels();
    auto coords = [&](size_t i) {
        std::ostringstream os;
        os << "(" << i / frame_px << ", " << (i % frame_px) / stack.width << ", "
           << i % stack.width << ")";
        return os.str();
    };
    for (size_t i = 0; i < stack.data.size(); ++i) {
        const double v = stack.data[i];
        if (!std::isfinite(v)) {
            fail("non-finite value at " + coords(i));
            break;
        }
        if (v < 0.0 && !stack.allow_negative) {
            std::ostringstream os;
            os << "negative value " << v << " at " << coords(i)
               << " in a non-negative stack";
            fail(os.str());
            break;
        }
    }
    return report;
}

std::vector<double> pixel_trace(const ImageStack& stack, int y, int x) {
    std::vector<double> trace(static_cast<size_t>(stack.frames));
    for (int t = 0; t < stack.frames; ++t) trace[static_cast<size_t>(t)] = stack.at(t, y, x);
    return trace;
}

}  // namespace ffsrm
