// Command-line front end: simulate fluctuation stacks, run the
// reconstruction methods, inspect singular-value spectra, compute metrics
// and drive benchmark campaigns.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ffsrm/abbe.hpp"
#include "ffsrm/bench.hpp"
#include "ffsrm/config_file.hpp"
#include "ffsrm/csv.hpp"
#include "ffsrm/esi.hpp"
#include "ffsrm/geometry.hpp"
#include "ffsrm/hawk.hpp"
#include "ffsrm/metrics.hpp"
#include "ffsrm/musical.hpp"
#include "ffsrm/photokinetics.hpp"
#include "ffsrm/provenance.hpp"
#include "ffsrm/psf.hpp"
#include "ffsrm/render.hpp"
#include "ffsrm/sacd.hpp"
#include "ffsrm/sofi.hpp"
#include "ffsrm/srrf.hpp"
#include "ffsrm/tiff.hpp"

namespace {

using namespace ffsrm;

constexpr uint64_t kNoiseSeedOffset = 0x9e3779b9ULL;

struct OpticsFlags {
    double wavelength_nm = 510.0;
    double numerical_aperture = 1.42;
    double pixel_size_nm = 80.0;
    bool pixel_given = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--wavelength", wavelength_nm, "Emission wavelength [nm]");
        cmd->add_option("--na", numerical_aperture, "Numerical aperture");
        cmd->add_option("--pixel", pixel_size_nm, "Camera pixel size [nm]")
            ->each([this](const std::string&) { pixel_given = true; });
    }

    OpticalConfig config(double stack_pixel_nm = 0.0) const {
        OpticalConfig c;
        c.emission_wavelength_nm = wavelength_nm;
        c.numerical_aperture = numerical_aperture;
        c.pixel_size_nm =
            (!pixel_given && stack_pixel_nm > 0.0) ? stack_pixel_nm : pixel_size_nm;
        c.validate();
        return c;
    }
};

std::pair<double, double> parse_point(const std::string& text) {
    const size_t comma = text.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("expected x,y but got '" + text + "'");
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

void write_result(const ReconstructionResult& result, const std::string& out_path,
                  const std::string& in_path, const ImageStack& input,
                  const std::string& method) {
    io::write_tiff_image(result.image, out_path);
    io::ProvenanceRecord prov;
    prov.command = "reconstruct";
    prov.parameters = result.parameters;
    prov.parameters.emplace_back("method", method);
    prov.has_input = true;
    prov.input_path = in_path;
    prov.input_hash = io::hash_stack(input);
    prov.output_path = out_path;
    prov.output_hash = io::hash_image(result.image);
    io::write_provenance(prov, out_path + ".provenance.json");
}

std::string insert_block_suffix(const std::string& path, int block) {
    const size_t dot = path.rfind('.');
    std::ostringstream os;
    if (dot == std::string::npos)
        os << path << "_b" << block;
    else
        os << path.substr(0, dot) << "_b" << block << path.substr(dot);
    return os.str();
}

int run(int argc, char** argv) {
    CLI::App app{"Fluctuation microscopy simulator and reconstruction toolbox"};
    app.require_subcommand(1);

    // simulate ------------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Render a synthetic image stack");
    std::string sim_sample = "two_point";
    std::string sim_preset = "high";
    int sim_frames = 100;
    uint64_t sim_seed = 1;
    int sim_fov = 64;
    double sim_separation = 100.0;
    bool sim_no_noise = false;
    std::string sim_out, sim_gt;
    OpticsFlags sim_optics;
    simulate->add_option("--sample", sim_sample, "actin | tori | two_point")
        ->check(CLI::IsMember({"actin", "tori", "two_point"}));
    simulate->add_option("--preset", sim_preset, "low | medium | high fluctuation")
        ->check(CLI::IsMember({"low", "medium", "high"}));
    simulate->add_option("--frames", sim_frames, "Number of frames")->required();
    simulate->add_option("--seed", sim_seed, "Random seed");
    simulate->add_option("--fov", sim_fov, "Field of view [px, square]");
    simulate->add_option("--separation", sim_separation, "two_point separation [nm]");
    simulate->add_flag("--no-noise", sim_no_noise, "Skip the camera noise model");
    simulate->add_option("--out", sim_out, "Output TIFF stack")->required();
    simulate->add_option("--gt", sim_gt, "Ground-truth CSV path");
    sim_optics.attach(simulate);

    // reconstruct ---------------------------------------------------------
    auto* reconstruct = app.add_subcommand("reconstruct", "Run a reconstruction method");
    std::string rec_method, rec_in, rec_out;
    OpticsFlags rec_optics;
    reconstruct->add_option("--method", rec_method, "esi | sofi | srrf | sacd | musical")
        ->required()
        ->check(CLI::IsMember({"esi", "sofi", "srrf", "sacd", "musical"}));
    reconstruct->add_option("-i,--input", rec_in, "Input TIFF stack")->required();
    reconstruct->add_option("-o,--output", rec_out, "Output TIFF image")->required();
    rec_optics.attach(reconstruct);

    // Shared flags; --order and --mag default per method.
    int rec_order = 0;
    int rec_mag = 0;
    auto* order_opt =
        reconstruct->add_option("--order", rec_order,
                                "Moment/cumulant order (esi: 4, sofi: 2, sacd: 2)");
    auto* mag_opt = reconstruct->add_option("--mag", rec_mag,
                                            "Output magnification (srrf: 5, sacd: 8)");

    esi::EsiParams esi_params;
    reconstruct->add_option("--bins", esi_params.bins, "esi: histogram bins");
    reconstruct->add_option("--images", esi_params.output_images, "esi: output blocks");

    sofi::SofiParams sofi_params;
    std::string lag_name = "distinct";
    reconstruct->add_option("--lag", lag_name, "sofi: zero | distinct")
        ->check(CLI::IsMember({"zero", "distinct"}));
    reconstruct->add_flag("--balanced", sofi_params.balanced, "sofi: |k|^(1/n) map");

    srrf::SrrfParams srrf_params;
    std::string srrf_mode = "trac2";
    reconstruct->add_option("--mode", srrf_mode, "srrf: tra | trppm | trac2 | trac3 | trac4")
        ->check(CLI::IsMember({"tra", "trppm", "trac2", "trac3", "trac4"}));
    reconstruct->add_option("--ring-radius", srrf_params.ring_radius_px,
                            "srrf: ring radius [px]");
    reconstruct->add_option("--axes", srrf_params.axes, "srrf: ring axes (samples = 2x)");
    bool srrf_no_iw = false;
    reconstruct->add_flag("--no-iw", srrf_no_iw, "srrf: disable intensity weighting");
    reconstruct->add_flag("--grad-smooth", srrf_params.gradient_smoothing,
                          "srrf: smooth gradients before radiality");
    reconstruct->add_flag("--antipattern", srrf_params.minimize_patterning,
                          "srrf: average quarter-pixel ring offsets");

    sacd::SacdParams sacd_params;
    reconstruct->add_option("--iters", sacd_params.lr_iterations,
                            "sacd: Richardson-Lucy iterations");
    reconstruct->add_option("--psf-power", sacd_params.psf_exponent,
                            "sacd: kernel exponent for the final deconvolution (0 = order)");
    bool sacd_single_plane = false;
    reconstruct->add_flag("--single-plane", sacd_single_plane,
                          "sacd: disable temporal bin averaging");

    musical::MusicalParams musical_params;
    bool musical_auto = true;
    reconstruct->add_option("--threshold", musical_params.threshold,
                            "musical: log10 singular value threshold (<= 0)")
        ->each([&](const std::string&) { musical_auto = false; });
    reconstruct->add_option("--alpha", musical_params.alpha, "musical: contrast exponent");
    reconstruct->add_option("--subpixels", musical_params.subpixels,
                            "musical: subpixels per camera pixel");
    reconstruct->add_option("--window", musical_params.window_side,
                            "musical: analysis window side (odd, 0 = auto)");

    // hawk ------------------------------------------------------------------
    auto* hawk_cmd = app.add_subcommand("hawk", "Haar wavelet temporal preprocessing");
    std::string hawk_in, hawk_out;
    hawk::HawkParams hawk_params;
    std::string hawk_neg = "separate", hawk_order = "level";
    hawk_cmd->add_option("-i,--input", hawk_in, "Input TIFF stack")->required();
    hawk_cmd->add_option("-o,--output", hawk_out, "Output TIFF stack")->required();
    hawk_cmd->add_option("--levels", hawk_params.levels, "Decomposition levels");
    hawk_cmd->add_option("--negatives", hawk_neg, "separate | absolute")
        ->check(CLI::IsMember({"separate", "absolute"}));
    hawk_cmd->add_option("--order", hawk_order, "level | time frame ordering")
        ->check(CLI::IsMember({"level", "time"}));

    // spectrum ----------------------------------------------------------------
    auto* spectrum = app.add_subcommand("spectrum", "Per-window singular value spectrum");
    std::string spec_in;
    int spec_window = 0;
    OpticsFlags spec_optics;
    spectrum->add_option("-i,--input", spec_in, "Input TIFF stack")->required();
    spectrum->add_option("--window", spec_window, "Window side (0 = auto)");
    spec_optics.attach(spectrum);

    // abbe ----------------------------------------------------------------
    auto* abbe_cmd = app.add_subcommand("abbe", "Print the diffraction limits");
    OpticsFlags abbe_optics;
    abbe_optics.attach(abbe_cmd);

    // psf -------------------------------------------------------------------
    auto* psf_cmd = app.add_subcommand("psf", "Export the 3D PSF as a TIFF stack");
    std::string psf_out;
    OpticsFlags psf_optics;
    psf_cmd->add_option("--out", psf_out, "Output TIFF stack")->required();
    psf_optics.attach(psf_cmd);

    // metrics ---------------------------------------------------------------
    auto* metrics_cmd = app.add_subcommand("metrics", "Profile and summary metrics");
    metrics_cmd->require_subcommand(1);
    std::string met_in, met_from, met_to, met_out;
    int met_width = 1;
    int met_page = 0;
    auto add_profile_flags = [&](CLI::App* cmd) {
        cmd->add_option("-i,--input", met_in, "Input TIFF image")->required();
        cmd->add_option("--from", met_from, "Segment start x,y [px]")->required();
        cmd->add_option("--to", met_to, "Segment end x,y [px]")->required();
        cmd->add_option("--width", met_width, "Averaging width [px, odd]");
        cmd->add_option("--page", met_page, "Stack page to probe");
    };
    auto* met_profile = metrics_cmd->add_subcommand("profile", "Dump a line profile as CSV");
    add_profile_flags(met_profile);
    met_profile->add_option("-o,--output", met_out, "CSV path (default stdout)");
    auto* met_fwhm = metrics_cmd->add_subcommand("fwhm", "Gaussian FWHM along a segment");
    add_profile_flags(met_fwhm);
    auto* met_dip = metrics_cmd->add_subcommand("dip", "Dip ratio along a segment");
    add_profile_flags(met_dip);
    auto* met_sbr = metrics_cmd->add_subcommand("sbr", "Signal-to-background ratio");
    std::string sbr_obj, sbr_bg;
    met_sbr->add_option("-i,--input", met_in, "Input TIFF image")->required();
    met_sbr->add_option("--object", sbr_obj, "Object rect y,x,h,w")->required();
    met_sbr->add_option("--background", sbr_bg, "Background rect y,x,h,w")->required();
    met_sbr->add_option("--page", met_page, "Stack page to probe");

    // benchmark ---------------------------------------------------------------
    auto* bench_cmd = app.add_subcommand("benchmark", "Run a comparison campaign");
    std::string bench_config;
    bench_cmd->add_option("--config", bench_config, "key=value campaign description")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 1;
    }

    if (simulate->parsed()) {
        const OpticalConfig optics = sim_optics.config();
        const double field_nm = sim_fov * optics.pixel_size_nm;
        sim::EmitterSet set;
        if (sim_sample == "actin")
            set = sim::generate_actin_sample(sim_seed, field_nm, field_nm);
        else if (sim_sample == "tori")
            set = sim::generate_tori_sample(sim_seed, field_nm, field_nm);
        else
            set = sim::generate_two_point_sample(sim_separation, field_nm, field_nm);
        set.seed = sim_seed;

        const auto kinetics = sim::preset_from_name(sim_preset);
        const auto blink = sim::simulate_blinking(static_cast<int>(set.emitters.size()),
                                                  sim_frames, kinetics, sim_seed);
        const auto psf = optics::gibson_lanni_psf(optics);
        sim::FovSpec fov;
        fov.width_px = sim_fov;
        fov.height_px = sim_fov;
        ImageStack stack = sim::render_stack(set, blink, psf, optics, fov);
        if (!sim_no_noise)
            stack = sim::apply_camera_noise(stack, {}, sim_seed + kNoiseSeedOffset);

        io::write_tiff_stack(stack, sim_out,
                             sim_no_noise ? io::TiffFormat::Float32 : io::TiffFormat::Uint16);
        if (!sim_gt.empty()) io::write_ground_truth_csv(set, sim_gt);

        io::ProvenanceRecord prov;
        prov.command = "simulate";
        prov.parameters = {{"sample", sim_sample},
                           {"preset", sim_preset},
                           {"frames", std::to_string(sim_frames)},
                           {"fov_px", std::to_string(sim_fov)},
                           {"noise", sim_no_noise ? "false" : "true"}};
        if (sim_sample == "two_point")
            prov.parameters.emplace_back("separation_nm", std::to_string(sim_separation));
        prov.output_path = sim_out;
        prov.output_hash = io::hash_stack(stack);
        prov.has_seed = true;
        prov.seed = sim_seed;
        io::write_provenance(prov, sim_out + ".provenance.json");
        std::cout << "wrote " << sim_out << " (" << stack.frames << " frames, "
                  << set.emitters.size() << " emitters)\n";
        return 0;
    }

    if (reconstruct->parsed()) {
        const ImageStack stack = io::read_tiff_stack(rec_in);
        const OpticalConfig optics = rec_optics.config(stack.pixel_size_nm);
        if (rec_method == "esi") {
            if (order_opt->count() > 0) esi_params.moment_order = rec_order;
            const auto results = esi::esi_reconstruct(stack, esi_params);
            for (size_t b = 0; b < results.size(); ++b) {
                const std::string path =
                    b == 0 ? rec_out : insert_block_suffix(rec_out, static_cast<int>(b));
                write_result(results[b], path, rec_in, stack, rec_method);
            }
        } else if (rec_method == "sofi") {
            if (order_opt->count() > 0) sofi_params.order = rec_order;
            sofi_params.lag = lag_name == "zero" ? sofi::LagMode::ZeroLag
                                                 : sofi::LagMode::DistinctFrames;
            write_result(sofi::sofi_reconstruct(stack, sofi_params), rec_out, rec_in,
                         stack, rec_method);
        } else if (rec_method == "srrf") {
            if (mag_opt->count() > 0) srrf_params.magnification = rec_mag;
            srrf_params.mode = srrf::temporal_mode_from_name(srrf_mode);
            srrf_params.intensity_weighting = !srrf_no_iw;
            write_result(srrf::srrf_reconstruct(stack, srrf_params), rec_out, rec_in,
                         stack, rec_method);
        } else if (rec_method == "sacd") {
            if (order_opt->count() > 0) sacd_params.order = rec_order;
            if (mag_opt->count() > 0) sacd_params.magnification = rec_mag;
            sacd_params.multi_plane = !sacd_single_plane;
            const auto psf = optics::gibson_lanni_psf(optics);
            const Image kernel = optics::psf_slice(
                psf, 0.0, optics.pixel_size_nm / sacd_params.magnification);
            write_result(sacd::sacd_reconstruct(stack, kernel, sacd_params), rec_out,
                         rec_in, stack, rec_method);
        } else {
            const auto psf = optics::gibson_lanni_psf(optics);
            if (musical_auto) {
                const auto spectrum_summary = musical::singular_value_spectrum(
                    stack, optics, musical_params.window_side);
                musical_params.threshold = spectrum_summary.mid_log10;
            }
            write_result(musical::musical_reconstruct(stack, psf, optics, musical_params),
                         rec_out, rec_in, stack, rec_method);
        }
        std::cout << "wrote " << rec_out << "\n";
        return 0;
    }

    if (hawk_cmd->parsed()) {
        hawk_params.negatives = hawk_neg == "separate" ? hawk::NegativesMode::Separate
                                                       : hawk::NegativesMode::Absolute;
        hawk_params.order =
            hawk_order == "level" ? hawk::OrderMode::ByLevel : hawk::OrderMode::ByTime;
        const ImageStack stack = io::read_tiff_stack(hawk_in);
        const ImageStack out = hawk::hawk_transform(stack, hawk_params);
        io::write_tiff_stack(out, hawk_out, io::TiffFormat::Float32);

        io::ProvenanceRecord prov;
        prov.command = "hawk";
        prov.parameters = {{"levels", std::to_string(hawk_params.levels)},
                           {"negatives", hawk_neg},
                           {"order", hawk_order}};
        prov.has_input = true;
        prov.input_path = hawk_in;
        prov.input_hash = io::hash_stack(stack);
        prov.output_path = hawk_out;
        prov.output_hash = io::hash_stack(out);
        io::write_provenance(prov, hawk_out + ".provenance.json");
        std::cout << "wrote " << hawk_out << " (" << out.frames << " frames)\n";
        return 0;
    }

    if (spectrum->parsed()) {
        const ImageStack stack = io::read_tiff_stack(spec_in);
        const OpticalConfig optics = spec_optics.config(stack.pixel_size_nm);
        const auto summary = musical::singular_value_spectrum(stack, optics, spec_window);
        std::cout << "windows," << summary.second_log10.size() << "\n";
        std::cout << "second_sv_log10_min," << summary.min_log10 << "\n";
        std::cout << "second_sv_log10_mid," << summary.mid_log10 << "\n";
        std::cout << "second_sv_log10_max," << summary.max_log10 << "\n";
        return 0;
    }

    if (abbe_cmd->parsed()) {
        const auto limits = optics::abbe_limits(abbe_optics.config());
        std::cout << "lateral_nm," << limits.lateral_nm << "\n";
        std::cout << "axial_nm," << limits.axial_nm << "\n";
        return 0;
    }

    if (psf_cmd->parsed()) {
        const auto psf = optics::gibson_lanni_psf(psf_optics.config());
        ImageStack stack(psf.nz, psf.n_lat, psf.n_lat, psf.lateral_step_nm);
        std::copy(psf.values.begin(), psf.values.end(), stack.data.begin());
        io::write_tiff_stack(stack, psf_out, io::TiffFormat::Float32);
        std::cout << "wrote " << psf_out << " (" << psf.nz << " slices)\n";
        return 0;
    }

    if (metrics_cmd->parsed()) {
        const ImageStack stack = io::read_tiff_stack(met_in);
        if (met_page < 0 || met_page >= stack.frames)
            throw std::invalid_argument("metrics: page out of range");
        const Image img = stack.frame_image(met_page);

        if (met_sbr->parsed()) {
            auto parse_rect = [](const std::string& text) {
                metrics::Rect r;
                if (std::sscanf(text.c_str(), "%d,%d,%d,%d", &r.y, &r.x, &r.height,
                                &r.width) != 4)
                    throw std::invalid_argument("expected y,x,h,w but got '" + text + "'");
                return r;
            };
            std::cout << "sbr," << metrics::sbr(img, parse_rect(sbr_obj), parse_rect(sbr_bg))
                      << "\n";
            return 0;
        }

        const auto [x0, y0] = parse_point(met_from);
        const auto [x1, y1] = parse_point(met_to);
        const auto profile = metrics::line_profile(img, y0, x0, y1, x1, met_width);
        if (met_profile->parsed()) {
            std::vector<std::vector<std::string>> rows;
            for (size_t i = 0; i < profile.values.size(); ++i) {
                std::ostringstream pos, val;
                pos.precision(12);
                val.precision(12);
                pos << static_cast<double>(i) * profile.spacing_nm;
                val << profile.values[i];
                rows.push_back({pos.str(), val.str()});
            }
            if (met_out.empty()) {
                std::cout << "position_nm,value\n";
                for (const auto& row : rows) std::cout << row[0] << "," << row[1] << "\n";
            } else {
                io::write_csv(met_out, {"position_nm", "value"}, rows);
            }
        } else if (met_fwhm->parsed()) {
            const auto fit = metrics::gaussian_fit_fwhm(profile.values, profile.spacing_nm);
            std::cout << "fwhm_nm," << fit.fwhm_nm << "\n";
            std::cout << "center_samples," << fit.center_samples << "\n";
            std::cout << "converged," << (fit.converged ? "true" : "false") << "\n";
        } else {
            const auto dip = metrics::dip_ratio(profile.values);
            if (dip)
                std::cout << "dip_ratio," << *dip << "\n";
            else
                std::cout << "dip_ratio,none\n";
        }
        return 0;
    }

    if (bench_cmd->parsed()) {
        const auto config = ConfigFile::parse_file(bench_config);
        const auto spec = bench::BenchmarkSpec::from_config(config);
        const auto summary = bench::run_benchmark(spec);
        std::cout << "cells," << summary.cells << "\n";
        std::cout << "failed," << summary.failed_cells << "\n";
        std::cout << "csv," << summary.csv_path << "\n";
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
}
