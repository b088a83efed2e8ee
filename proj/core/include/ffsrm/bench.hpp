#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ffsrm/config_file.hpp"
#include "ffsrm/esi.hpp"
#include "ffsrm/musical.hpp"
#include "ffsrm/optical_config.hpp"
#include "ffsrm/render.hpp"
#include "ffsrm/sacd.hpp"
#include "ffsrm/sofi.hpp"
#include "ffsrm/srrf.hpp"

namespace ffsrm::bench {

// One comparison campaign: the cross product of presets, frame counts, seeds
// and methods on a single sample geometry. Every cell writes its
// reconstruction (TIFF + PNG preview + provenance sidecar) and one CSV row
// of metrics derived from the known ground truth.
struct BenchmarkSpec {
    OpticalConfig optics;
    std::string sample = "two_point";
    double separation_nm = 100.0;  // two_point only
    int fov_px = 64;
    std::vector<std::string> presets = {"high"};
    std::vector<int> frame_counts = {100};
    std::vector<uint64_t> seeds = {1};
    std::vector<std::string> methods = {"sofi"};

    esi::EsiParams esi_params;
    sofi::SofiParams sofi_params;
    srrf::SrrfParams srrf_params;
    sacd::SacdParams sacd_params;
    musical::MusicalParams musical_params;
    bool musical_auto_threshold = true;  // median of the second-SV spectrum

    sim::CameraNoiseParams camera;
    double display_gamma = 0.5;
    std::string output_dir = "bench_out";

    static BenchmarkSpec from_config(const ConfigFile& config);
    void validate() const;
};

struct BenchmarkSummary {
    int cells = 0;
    int failed_cells = 0;
    std::string csv_path;
    std::string summary_path;
};

// Cells that throw are recorded with status=error and do not stop the run.
// Output bytes are a pure function of the spec; the wall_ms CSV column is
// the only part that varies between reruns.
BenchmarkSummary run_benchmark(const BenchmarkSpec& spec);

}  // namespace ffsrm::bench
