#include "ffsrm/geometry.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ffsrm::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTubeRadiusNm = 3.0;
constexpr double kStrandEmittersPerUm = 500.0;
constexpr double kTorusEmittersPerUm2 = 400.0;

struct Vec3 {
    double x, y, z;
};

Vec3 normalize(const Vec3& v) {
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    return {v.x / n, v.y / n, v.z / n};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

int draw_poisson_count(std::mt19937_64& rng, double mean) {
    std::poisson_distribution<int> dist(mean);
    return dist(rng);
}

void scatter_on_strand(std::mt19937_64& rng, const Strand& s, int geometry_id,
                       EmitterSet& out) {
    const Vec3 axis = {s.x1 - s.x0, s.y1 - s.y0, s.z1 - s.z0};
    const double length_nm =
        std::sqrt(axis.x * axis.x + axis.y * axis.y + axis.z * axis.z);
    const Vec3 dir = normalize(axis);
    // Perpendicular frame around the tube axis.
    const Vec3 ref = std::fabs(dir.z) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
    const Vec3 u = normalize(cross(dir, ref));
    const Vec3 v = cross(dir, u);

    const int count = draw_poisson_count(rng, kStrandEmittersPerUm * length_nm / 1000.0);
    std::uniform_real_distribution<double> uni01(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (int i = 0; i < count; ++i) {
        const double t = uni01(rng);
        const double phi = angle(rng);
        const double cu = kTubeRadiusNm * std::cos(phi);
        const double cv = kTubeRadiusNm * std::sin(phi);
        Emitter e;
        e.x_nm = s.x0 + t * axis.x + cu * u.x + cv * v.x;
        e.y_nm = s.y0 + t * axis.y + cu * u.y + cv * v.y;
        e.z_nm = s.z0 + t * axis.z + cu * u.z + cv * v.z;
        e.geometry_id = geometry_id;
        out.emitters.push_back(e);
    }
}

void scatter_on_torus(std::mt19937_64& rng, const TorusSpec& t, int geometry_id,
                      EmitterSet& out) {
    const double R = t.major_radius_nm;
    const double r = t.minor_radius_nm;
    const double area_um2 = 4.0 * kPi * kPi * (R / 1000.0) * (r / 1000.0);
    const int count = draw_poisson_count(rng, kTorusEmittersPerUm2 * area_um2);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> uni01(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
        // Rejection on the tube angle keeps the surface density uniform:
        // the area element carries a (R + r cos theta) factor.
        double theta;
        do {
            theta = angle(rng);
        } while (uni01(rng) * (R + r) > R + r * std::cos(theta));
        const double psi = angle(rng);
        const double ring = R + r * std::cos(theta);
        Emitter e;
        e.x_nm = t.cx + ring * std::cos(psi);
        e.y_nm = t.cy + ring * std::sin(psi);
        e.z_nm = t.cz + r * std::sin(theta);
        e.geometry_id = geometry_id;
        out.emitters.push_back(e);
    }
}

}  // namespace

EmitterSet generate_actin_sample(uint64_t seed, double field_width_nm,
                                 double field_height_nm) {
    if (!(field_width_nm > 0.0) || !(field_height_nm > 0.0))
        throw std::invalid_argument("field dimensions must be positive");
    EmitterSet set;
    set.seed = seed;
    set.sample_name = "actin";
    set.field_width_nm = field_width_nm;
    set.field_height_nm = field_height_nm;

    const double w = field_width_nm / 5120.0;
    const double h = field_height_nm / 5120.0;
    set.strands = {
        {300.0 * w, 1200.0 * h, 0.0, 4820.0 * w, 3000.0 * h, 0.0},
        {300.0 * w, 3600.0 * h, 400.0, 4820.0 * w, 1800.0 * h, 400.0},
        {300.0 * w, 2400.0 * h, -400.0, 4820.0 * w, 4500.0 * h, -400.0},
        {1200.0 * w, 300.0 * h, -200.0, 3600.0 * w, 4820.0 * h, 200.0},
    };

    std::mt19937_64 rng(seed);
    for (size_t i = 0; i < set.strands.size(); ++i)
        scatter_on_strand(rng, set.strands[i], static_cast<int>(i), set);
    return set;
}

EmitterSet generate_tori_sample(uint64_t seed, double field_width_nm,
                                double field_height_nm) {
    if (!(field_width_nm > 0.0) || !(field_height_nm > 0.0))
        throw std::invalid_argument("field dimensions must be positive");
    EmitterSet set;
    set.seed = seed;
    set.sample_name = "tori";
    set.field_width_nm = field_width_nm;
    set.field_height_nm = field_height_nm;

    const double w = field_width_nm / 5120.0;
    const double h = field_height_nm / 5120.0;
    const double col_x[3] = {900.0 * w, 2560.0 * w, 4220.0 * w};
    const double col_z[3] = {-200.0, 0.0, 200.0};
    for (int c = 0; c < 3; ++c)
        set.tori.push_back({col_x[c], 1400.0 * h, col_z[c], 300.0, 100.0});
    for (int c = 0; c < 3; ++c)
        set.tori.push_back({col_x[c], 3600.0 * h, col_z[c], 500.0, 200.0});

    std::mt19937_64 rng(seed);
    for (size_t i = 0; i < set.tori.size(); ++i)
        scatter_on_torus(rng, set.tori[i], static_cast<int>(i), set);
    return set;
}

EmitterSet generate_two_point_sample(double separation_nm, double field_width_nm,
                                     double field_height_nm) {
    if (!(separation_nm >= 0.0))
        throw std::invalid_argument("separation must be non-negative");
    if (!(field_width_nm > 0.0) || !(field_height_nm > 0.0))
        throw std::invalid_argument("field dimensions must be positive");
    EmitterSet set;
    set.sample_name = "two_point";
    set.field_width_nm = field_width_nm;
    set.field_height_nm = field_height_nm;
    const double cx = field_width_nm / 2.0;
    const double cy = field_height_nm / 2.0;
    Emitter a;
    a.x_nm = cx - separation_nm / 2.0;
    a.y_nm = cy;
    Emitter b;
    b.x_nm = cx + separation_nm / 2.0;
    b.y_nm = cy;
    b.geometry_id = 1;
    set.emitters = {a, b};
    return set;
}

}  // namespace ffsrm::sim
