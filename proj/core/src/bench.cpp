#include "ffsrm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ffsrm/csv.hpp"
#include "ffsrm/geometry.hpp"
#include "ffsrm/metrics.hpp"
#include "ffsrm/photokinetics.hpp"
#include "ffsrm/png_io.hpp"
#include "ffsrm/provenance.hpp"
#include "ffsrm/psf.hpp"
#include "ffsrm/tiff.hpp"

namespace ffsrm::bench {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct Probe {
    // Probe segment in scene nm plus an anchor pixel for the signal region.
    double x0, y0, x1, y1;
    double anchor_x, anchor_y;
};

Probe make_probe(const sim::EmitterSet& set, double separation_nm) {
    Probe p{};
    if (set.sample_name == "two_point") {
        const double cx = set.field_width_nm / 2.0;
        const double cy = set.field_height_nm / 2.0;
        const double reach = separation_nm / 2.0 + 300.0;
        p = {cx - reach, cy, cx + reach, cy, cx, cy};
    } else if (set.sample_name == "tori") {
        // Radial cut through the in-focus small torus (both tube walls).
        const sim::TorusSpec* focus = nullptr;
        for (const auto& t : set.tori)
            if (t.cz == 0.0 && (!focus || t.minor_radius_nm < focus->minor_radius_nm))
                focus = &t;
        if (!focus) throw std::runtime_error("bench: no in-focus torus");
        const double reach = focus->major_radius_nm + 3.0 * focus->minor_radius_nm;
        p = {focus->cx, focus->cy, focus->cx + reach, focus->cy,
             focus->cx + focus->major_radius_nm, focus->cy};
    } else if (set.sample_name == "actin") {
        // Perpendicular cut across the midpoint of the in-focus strand.
        const sim::Strand* focus = nullptr;
        for (const auto& s : set.strands)
            if (s.z0 == 0.0 && s.z1 == 0.0) focus = &s;
        if (!focus) throw std::runtime_error("bench: no in-focus strand");
        const double mx = 0.5 * (focus->x0 + focus->x1);
        const double my = 0.5 * (focus->y0 + focus->y1);
        const double len = std::hypot(focus->x1 - focus->x0, focus->y1 - focus->y0);
        const double px = -(focus->y1 - focus->y0) / len;
        const double py = (focus->x1 - focus->x0) / len;
        p = {mx - 400.0 * px, my - 400.0 * py, mx + 400.0 * px, my + 400.0 * py, mx, my};
    } else {
        throw std::invalid_argument("bench: unknown sample " + set.sample_name);
    }
    return p;
}

metrics::LineProfile probe_profile(const Image& img, const Probe& probe) {
    auto to_px_x = [&](double nm) { return nm / img.pixel_size_nm - 0.5; };
    auto to_px_y = [&](double nm) { return nm / img.pixel_size_nm - 0.5; };
    return metrics::line_profile(img, to_px_y(probe.y0), to_px_x(probe.x0),
                                 to_px_y(probe.y1), to_px_x(probe.x1));
}

// Corner patch farthest from every emitter, so the background is emitter-free.
metrics::Rect background_rect(const Image& img, const sim::EmitterSet& set) {
    const int bh = std::max(1, img.height / 10);
    const int bw = std::max(1, img.width / 10);
    const metrics::Rect corners[] = {{0, 0, bh, bw},
                                     {0, img.width - bw, bh, bw},
                                     {img.height - bh, 0, bh, bw},
                                     {img.height - bh, img.width - bw, bh, bw}};
    const metrics::Rect* best = &corners[0];
    double best_dist = -1.0;
    for (const metrics::Rect& rect : corners) {
        const double cy = (rect.y + rect.height / 2.0) * img.pixel_size_nm;
        const double cx = (rect.x + rect.width / 2.0) * img.pixel_size_nm;
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& em : set.emitters)
            dist = std::min(dist, std::hypot(em.x_nm - cx, em.y_nm - cy));
        if (dist > best_dist) {
            best_dist = dist;
            best = &rect;
        }
    }
    return *best;
}

double rect_mean(const Image& img, const metrics::Rect& rect) {
    double acc = 0.0;
    for (int y = rect.y; y < rect.y + rect.height; ++y)
        for (int x = rect.x; x < rect.x + rect.width; ++x) acc += img.at(y, x);
    return acc / (static_cast<double>(rect.height) * rect.width);
}

double image_sbr(const Image& img, const Probe& probe, const metrics::Rect& background) {
    const int ax = std::clamp(static_cast<int>(probe.anchor_x / img.pixel_size_nm),
                              0, img.width - 1);
    const int ay = std::clamp(static_cast<int>(probe.anchor_y / img.pixel_size_nm),
                              0, img.height - 1);
    const int obj_half = std::max(2, img.width / 32);
    metrics::Rect object;
    object.y = std::clamp(ay - obj_half, 0, img.height - 1);
    object.x = std::clamp(ax - obj_half, 0, img.width - 1);
    object.height = std::min(2 * obj_half + 1, img.height - object.y);
    object.width = std::min(2 * obj_half + 1, img.width - object.x);
    return metrics::sbr(img, object, background);
}

struct SimKey {
    std::string preset;
    int frames;
    uint64_t seed;
    bool operator<(const SimKey& o) const {
        return std::tie(preset, frames, seed) < std::tie(o.preset, o.frames, o.seed);
    }
};

}  // namespace

BenchmarkSpec BenchmarkSpec::from_config(const ConfigFile& config) {
    BenchmarkSpec spec;
    spec.optics.emission_wavelength_nm =
        config.get_double("wavelength_nm", spec.optics.emission_wavelength_nm);
    spec.optics.numerical_aperture =
        config.get_double("numerical_aperture", spec.optics.numerical_aperture);
    spec.optics.pixel_size_nm = config.get_double("pixel_size_nm", spec.optics.pixel_size_nm);
    spec.sample = config.get_string("sample", spec.sample);
    spec.separation_nm = config.get_double("separation_nm", spec.separation_nm);
    spec.fov_px = config.get_int("fov_px", spec.fov_px);
    if (config.has("presets")) spec.presets = config.get_list("presets");
    if (config.has("frames")) {
        spec.frame_counts.clear();
        for (const std::string& f : config.get_list("frames"))
            spec.frame_counts.push_back(std::stoi(f));
    }
    if (config.has("seeds")) {
        spec.seeds.clear();
        for (const std::string& s : config.get_list("seeds"))
            spec.seeds.push_back(std::stoull(s));
    }
    if (config.has("methods")) spec.methods = config.get_list("methods");

    spec.esi_params.moment_order = config.get_int("esi_order", spec.esi_params.moment_order);
    spec.esi_params.bins = config.get_int("esi_bins", spec.esi_params.bins);
    spec.sofi_params.order = config.get_int("sofi_order", spec.sofi_params.order);
    spec.srrf_params.magnification =
        config.get_int("srrf_magnification", spec.srrf_params.magnification);
    spec.srrf_params.ring_radius_px =
        config.get_double("srrf_ring_radius", spec.srrf_params.ring_radius_px);
    spec.srrf_params.axes = config.get_int("srrf_axes", spec.srrf_params.axes);
    if (config.has("srrf_mode"))
        spec.srrf_params.mode = srrf::temporal_mode_from_name(config.get_string("srrf_mode", ""));
    spec.sacd_params.magnification =
        config.get_int("sacd_magnification", spec.sacd_params.magnification);
    spec.sacd_params.lr_iterations =
        config.get_int("sacd_iterations", spec.sacd_params.lr_iterations);
    spec.sacd_params.order = config.get_int("sacd_order", spec.sacd_params.order);
    spec.musical_params.subpixels =
        config.get_int("musical_subpixels", spec.musical_params.subpixels);
    spec.musical_params.alpha = config.get_double("musical_alpha", spec.musical_params.alpha);
    spec.musical_params.window_side =
        config.get_int("musical_window", spec.musical_params.window_side);
    if (config.has("musical_threshold")) {
        spec.musical_params.threshold = config.require_double("musical_threshold");
        spec.musical_auto_threshold = false;
    }
    spec.camera.gain_a = config.get_double("camera_gain", spec.camera.gain_a);
    spec.camera.offset_b = config.get_double("camera_offset", spec.camera.offset_b);
    spec.display_gamma = config.get_double("display_gamma", spec.display_gamma);
    spec.output_dir = config.get_string("output_dir", spec.output_dir);
    config.reject_unknown_keys();
    return spec;
}

void BenchmarkSpec::validate() const {
    optics.validate();
    camera.validate();
    if (sample != "actin" && sample != "tori" && sample != "two_point")
        throw std::invalid_argument("bench: unknown sample " + sample);
    if (fov_px < 8) throw std::invalid_argument("bench: fov too small");
    if (presets.empty() || frame_counts.empty() || seeds.empty() || methods.empty())
        throw std::invalid_argument("bench: empty axis in the spec");
    for (int f : frame_counts)
        if (f < 2) throw std::invalid_argument("bench: frame counts must be >= 2");
    if (!(display_gamma > 0.0))
        throw std::invalid_argument("bench: display gamma must be positive");
}

BenchmarkSummary run_benchmark(const BenchmarkSpec& spec) {
    spec.validate();
    fs::create_directories(spec.output_dir);
    fs::create_directories(fs::path(spec.output_dir) / "data");
    fs::create_directories(fs::path(spec.output_dir) / "recon");

    const optics::Psf3D psf = optics::gibson_lanni_psf(spec.optics);
    const double field_nm = spec.fov_px * spec.optics.pixel_size_nm;

    struct SimData {
        sim::EmitterSet set;
        ImageStack noisy;
        Probe probe;
        std::string tif_path;
    };
    std::map<SimKey, SimData> sims;
    auto simulate = [&](const SimKey& key) -> SimData& {
        auto it = sims.find(key);
        if (it != sims.end()) return it->second;

        SimData data;
        if (spec.sample == "actin")
            data.set = sim::generate_actin_sample(key.seed, field_nm, field_nm);
        else if (spec.sample == "tori")
            data.set = sim::generate_tori_sample(key.seed, field_nm, field_nm);
        else
            data.set = sim::generate_two_point_sample(spec.separation_nm, field_nm, field_nm);
        data.set.seed = key.seed;

        const auto kinetics = sim::preset_from_name(key.preset);
        const auto blink = sim::simulate_blinking(
            static_cast<int>(data.set.emitters.size()), key.frames, kinetics, key.seed);
        sim::FovSpec fov;
        fov.width_px = spec.fov_px;
        fov.height_px = spec.fov_px;
        const ImageStack clean = sim::render_stack(data.set, blink, psf, spec.optics, fov);
        data.noisy = sim::apply_camera_noise(clean, spec.camera, key.seed + 0x9e3779b9ULL);
        data.probe = make_probe(data.set, spec.separation_nm);

        std::ostringstream base;
        base << spec.sample << "_" << key.preset << "_T" << key.frames << "_s" << key.seed;
        data.tif_path = (fs::path(spec.output_dir) / "data" / (base.str() + ".tif")).string();
        io::write_tiff_stack(data.noisy, data.tif_path, io::TiffFormat::Uint16);
        io::write_ground_truth_csv(data.set,
                                   (fs::path(spec.output_dir) / "data" / (base.str() + "_gt.csv")).string());
        io::ProvenanceRecord prov;
        prov.command = "simulate";
        prov.parameters = {{"sample", spec.sample},
                           {"preset", key.preset},
                           {"frames", std::to_string(key.frames)},
                           {"fov_px", std::to_string(spec.fov_px)}};
        prov.output_path = data.tif_path;
        prov.output_hash = io::hash_stack(data.noisy);
        prov.has_seed = true;
        prov.seed = key.seed;
        io::write_provenance(prov, data.tif_path + ".provenance.json");
        return sims.emplace(key, std::move(data)).first->second;
    };

    std::vector<std::vector<std::string>> rows;
    int failures = 0;
    for (const std::string& preset : spec.presets)
        for (int frames : spec.frame_counts)
            for (uint64_t seed : spec.seeds)
                for (const std::string& method : spec.methods) {
                    std::ostringstream cell;
                    cell << spec.sample << "_" << preset << "_T" << frames << "_s" << seed
                         << "_" << method;
                    const std::string cell_id = cell.str();
                    std::vector<std::string> row{cell_id, spec.sample, preset,
                                                 std::to_string(frames),
                                                 std::to_string(seed), method};
                    try {
                        SimData& data = simulate({preset, frames, seed});
                        const auto t0 = std::chrono::steady_clock::now();
                        ReconstructionResult result;
                        if (method == "esi") {
                            result = esi::esi_reconstruct(data.noisy, spec.esi_params).front();
                        } else if (method == "sofi") {
                            result = sofi::sofi_reconstruct(data.noisy, spec.sofi_params);
                        } else if (method == "srrf") {
                            result = srrf::srrf_reconstruct(data.noisy, spec.srrf_params);
                        } else if (method == "sacd") {
                            const Image kernel = optics::psf_slice(
                                psf, 0.0,
                                spec.optics.pixel_size_nm / spec.sacd_params.magnification);
                            result = sacd::sacd_reconstruct(data.noisy, kernel, spec.sacd_params);
                        } else if (method == "musical") {
                            musical::MusicalParams mp = spec.musical_params;
                            if (spec.musical_auto_threshold) {
                                const auto spectrum = musical::singular_value_spectrum(
                                    data.noisy, spec.optics, mp.window_side);
                                mp.threshold = spectrum.mid_log10;
                            }
                            result = musical::musical_reconstruct(data.noisy, psf, spec.optics, mp);
                        } else if (method == "widefield") {
                            result.method = Method::Sofi;
                            result.image = sofi::temporal_cumulant(data.noisy, 1,
                                                                   sofi::LagMode::ZeroLag);
                            result.param("order", 1);
                        } else {
                            throw std::invalid_argument("bench: unknown method " + method);
                        }
                        const auto t1 = std::chrono::steady_clock::now();
                        const double wall_ms =
                            std::chrono::duration<double, std::milli>(t1 - t0).count();

                        // Magnitude image for display and probing.
                        Image display = result.image;
                        for (double& v : display.data) v = std::fabs(v);

                        const std::string recon_base =
                            (fs::path(spec.output_dir) / "recon" / cell_id).string();
                        io::write_tiff_image(result.image, recon_base + ".tif");
                        io::write_png_gray(metrics::intensity_adjust(display, spec.display_gamma),
                                           recon_base + ".png");
                        io::ProvenanceRecord prov;
                        prov.command = "reconstruct";
                        prov.parameters = result.parameters;
                        prov.parameters.emplace_back("method", method);
                        prov.has_input = true;
                        prov.input_path = data.tif_path;
                        prov.input_hash = io::hash_stack(data.noisy);
                        prov.output_path = recon_base + ".tif";
                        prov.output_hash = io::hash_image(result.image);
                        io::write_provenance(prov, recon_base + ".tif.provenance.json");

                        const auto profile = probe_profile(display, data.probe);
                        const auto dip = metrics::dip_ratio(profile.values);
                        double fwhm = 0.0;
                        try {
                            fwhm = metrics::gaussian_fit_fwhm(profile.values, profile.spacing_nm)
                                       .fwhm_nm;
                        } catch (const std::exception&) {
                            fwhm = std::nan("");
                        }
                        const metrics::Rect bg = background_rect(display, data.set);
                        const double sbr_value = image_sbr(display, data.probe, bg);

                        row.push_back(dip ? fmt(*dip) : "");
                        row.push_back(std::isnan(fwhm) ? "" : fmt(fwhm));
                        row.push_back(fmt(sbr_value));
                        row.push_back(fmt(rect_mean(display, bg)));
                        row.push_back(fmt(wall_ms));
                        row.push_back("ok");
                    } catch (const std::exception& err) {
                        ++failures;
                        row.resize(6);
                        row.insert(row.end(),
                                   {"", "", "", "", "", std::string("error: ") + err.what()});
                    }
                    rows.push_back(std::move(row));
                }

    BenchmarkSummary summary;
    summary.cells = static_cast<int>(rows.size());
    summary.failed_cells = failures;
    summary.csv_path = (fs::path(spec.output_dir) / "metrics.csv").string();
    io::write_csv(summary.csv_path,
                  {"cell", "sample", "preset", "frames", "seed", "method", "dip_ratio",
                   "fwhm_nm", "sbr", "background_mean", "wall_ms", "status"},
                  rows);

    nlohmann::ordered_json j;
    j["sample"] = spec.sample;
    j["fov_px"] = spec.fov_px;
    j["presets"] = spec.presets;
    j["frames"] = spec.frame_counts;
    j["seeds"] = spec.seeds;
    j["methods"] = spec.methods;
    j["cells"] = summary.cells;
    j["failed_cells"] = summary.failed_cells;
    summary.summary_path = (fs::path(spec.output_dir) / "summary.json").string();
    std::ofstream out(summary.summary_path);
    if (!out) throw std::runtime_error("bench: cannot write summary");
    out << j.dump(2) << '\n';
    return summary;
}

}  // namespace ffsrm::bench
