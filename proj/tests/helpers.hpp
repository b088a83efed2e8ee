#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "ffsrm/image.hpp"

namespace test_util {

inline std::string tmp_path(const std::string& name) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ffsrm_tests";
    fs::create_directories(dir);
    return (dir / name).string();
}

inline ffsrm::ImageStack random_stack(int t, int h, int w, uint64_t seed,
                                      double lo = 0.0, double hi = 100.0,
                                      double pixel_nm = 80.0) {
    ffsrm::ImageStack stack(t, h, w, pixel_nm);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (double& v : stack.data) v = dist(rng);
    return stack;
}

inline std::vector<double> random_trace(int n, uint64_t seed, double lo = 0.0,
                                        double hi = 1.0) {
    std::vector<double> trace(static_cast<size_t>(n));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (double& v : trace) v = dist(rng);
    return trace;
}

}  // namespace test_util
