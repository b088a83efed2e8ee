#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ffsrm::sim {

// Point emitter in scene coordinates. z is relative to the focal plane
// (positive above). rate scales the emitted photon flux when fully on.
struct Emitter {
    double x_nm = 0.0;
    double y_nm = 0.0;
    double z_nm = 0.0;
    double rate = 1.0;
    int geometry_id = 0;
};

// Line segment descriptor for filament centerlines.
struct Strand {
    double x0, y0, z0;
    double x1, y1, z1;
};

// Flat-lying torus: tube of minor radius around a circle of major radius.
struct TorusSpec {
    double cx, cy, cz;
    double major_radius_nm;
    double minor_radius_nm;
};

struct EmitterSet {
    std::vector<Emitter> emitters;
    std::vector<Strand> strands;
    std::vector<TorusSpec> tori;
    double field_width_nm = 0.0;
    double field_height_nm = 0.0;
    uint64_t seed = 0;
    std::string sample_name;
};

// Four straight filament tubes (6 nm diameter): two crossing in-focus-ish
// layouts at z = 0 and +-400 nm plus one inclined from -200 to +200 nm.
// Emitters sit on the tube surface with Poisson(500 per um of length) counts.
EmitterSet generate_actin_sample(uint64_t seed, double field_width_nm = 5120.0,
                                 double field_height_nm = 5120.0);

// Two rows of three tori lying flat. Top row: minor 100 / major 300 nm.
// Bottom row: minor 200 / major 500 nm. Column centre planes sit 200 nm
// below focus, in focus, and 200 nm above. Surface density 400 per um^2.
EmitterSet generate_tori_sample(uint64_t seed, double field_width_nm = 5120.0,
                                double field_height_nm = 5120.0);

// Two in-focus emitters at the field centre, split along x.
EmitterSet generate_two_point_sample(double separation_nm,
                                     double field_width_nm = 5120.0,
                                     double field_height_nm = 5120.0);

}  // namespace ffsrm::sim
