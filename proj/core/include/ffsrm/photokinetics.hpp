#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ffsrm::sim {

// Two-state blinking model. Dwell times (in frames) are zero-truncated
// Poisson draws with the respective mean; tau_off = 0 keeps the emitter
// permanently on.
struct PhotokineticsParams {
    double tau_on_frames = 2.0;
    double tau_off_frames = 2.0;

    void validate() const;
};

PhotokineticsParams preset_low_fluctuation();     // tau_on 10, tau_off 1
PhotokineticsParams preset_medium_fluctuation();  // tau_on 2,  tau_off 2
PhotokineticsParams preset_high_fluctuation();    // tau_on 1,  tau_off 10
PhotokineticsParams preset_from_name(const std::string& name);

// Per-emitter, per-frame fraction of the exposure spent in the on state.
struct OnFractions {
    int n_emitters = 0;
    int frames = 0;
    std::vector<double> values;  // emitter-major

    double at(int e, int t) const {
        return values[static_cast<size_t>(e) * frames + t];
    }
    double& at(int e, int t) {
        return values[static_cast<size_t>(e) * frames + t];
    }
};

// Each emitter owns an independent substream derived from (seed, emitter
// index), so the trace of emitter i does not depend on how many emitters
// exist. The initial state is on with probability tau_on/(tau_on + tau_off).
OnFractions simulate_blinking(int n_emitters, int frames,
                              const PhotokineticsParams& params, uint64_t seed);

}  // namespace ffsrm::sim
