#include "ffsrm/photokinetics.hpp"

#include <random>
#include <stdexcept>

namespace ffsrm::sim {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t substream_seed(uint64_t seed, uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

// Dwell in whole frames, at least one.
int draw_dwell(std::mt19937_64& rng, double tau) {
    std::poisson_distribution<int> dist(tau);
    int d = 0;
    do {
        d = dist(rng);
    } while (d == 0);
    return d;
}

}  // namespace

void PhotokineticsParams::validate() const {
    if (!(tau_on_frames > 0.0))
        throw std::invalid_argument("tau_on must be positive");
    if (!(tau_off_frames >= 0.0))
        throw std::invalid_argument("tau_off must be non-negative");
}

PhotokineticsParams preset_low_fluctuation() { return {10.0, 1.0}; }
PhotokineticsParams preset_medium_fluctuation() { return {2.0, 2.0}; }
PhotokineticsParams preset_high_fluctuation() { return {1.0, 10.0}; }

PhotokineticsParams preset_from_name(const std::string& name) {
    if (name == "low") return preset_low_fluctuation();
    if (name == "medium") return preset_medium_fluctuation();
    if (name == "high") return preset_high_fluctuation();
    throw std::invalid_argument("unknown fluctuation preset: " + name);
}

OnFractions simulate_blinking(int n_emitters, int frames,
                              const PhotokineticsParams& params, uint64_t seed) {
    params.validate();
    if (n_emitters < 0 || frames <= 0)
        throw std::invalid_argument("simulate_blinking: bad dimensions");

    OnFractions out;
    out.n_emitters = n_emitters;
    out.frames = frames;
    out.values.assign(static_cast<size_t>(n_emitters) * frames, 0.0);

    if (params.tau_off_frames == 0.0) {
        std::fill(out.values.begin(), out.values.end(), 1.0);
        return out;
    }

    const double p_on = params.tau_on_frames /
                        (params.tau_on_frames + params.tau_off_frames);
    for (int e = 0; e < n_emitters; ++e) {
        std::mt19937_64 rng(substream_seed(seed, static_cast<uint64_t>(e)));
        std::uniform_real_distribution<double> uni01(0.0, 1.0);
        bool on = uni01(rng) < p_on;
        int t = 0;
        while (t < frames) {
            const int dwell =
                draw_dwell(rng, on ? params.tau_on_frames : params.tau_off_frames);
            if (on) {
                const int end = std::min(frames, t + dwell);
                for (int f = t; f < end; ++f) out.at(e, f) = 1.0;
            }
            t += dwell;
            on = !on;
        }
    }
    return out;
}

}  // namespace ffsrm::sim
