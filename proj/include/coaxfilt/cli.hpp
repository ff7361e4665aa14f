#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "coaxfilt/design_file.hpp"
#include "coaxfilt/errors.hpp"
#include "coaxfilt/extraction.hpp"
#include "coaxfilt/synthesis.hpp"
#include "coaxfilt/touchstone.hpp"
#include "coaxfilt/txline.hpp"

namespace coaxfilt::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kNumericError = 1,
    kInputError = 2,
    kExtractionFailed = 3,
    kPredictionTolerance = 4,
    kSynthesisUnsupported = 5,
    kComplianceFailed = 6,
};

namespace detail {

using coaxfilt::detail::fmt12;

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputError("cannot write file '" + path.string() + "'");
    out << text;
    if (!out)
        throw InputError("failed writing file '" + path.string() + "'");
}

inline bool has_extension(const std::filesystem::path& p, std::string_view ext) {
    return to_upper(p.extension().string()) == to_upper(ext);
}

inline void write_response(const std::filesystem::path& path, const TwoPortResponse& resp) {
    if (has_extension(path, ".s2p"))
        write_text_file(path, write_s2p(to_raw(resp), FreqUnit::GHz, DataFormat::RI));
    else
        write_text_file(path, export_csv(resp));
}

/// Reads .s2p (symmetrized) or response CSV.
inline TwoPortResponse read_response(const std::filesystem::path& path, double* asymmetry = nullptr) {
    const std::string text = read_text_file(path);
    try {
        if (has_extension(path, ".s2p")) {
            const SymmetrizedResponse sym = symmetrize(parse_s2p(text));
            if (asymmetry)
                *asymmetry = sym.asymmetry_max;
            return sym.response;
        }
        return parse_response_csv(text);
    } catch (const ParseError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

inline MaterialModel read_material(const std::filesystem::path& path) {
    try {
        return parse_material_csv(read_text_file(path));
    } catch (const ParseError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

/// "start:stop:n" in Hz.
inline GridSpec parse_grid_spec(const std::string& spec) {
    const auto parts = coaxfilt::detail::split_char(spec, ':');
    if (parts.size() != 3)
        throw InputError("grid spec must be start:stop:n, got '" + spec + "'");
    GridSpec g;
    try {
        g.f_start_hz = coaxfilt::detail::parse_number(parts[0], 0);
        g.f_stop_hz = coaxfilt::detail::parse_number(parts[1], 0);
        const double n = coaxfilt::detail::parse_number(parts[2], 0);
        if (!(n >= 1.0) || n != std::floor(n))
            throw InputError("grid point count must be a positive integer");
        g.n_points = static_cast<std::size_t>(n);
    } catch (const ParseError&) {
        throw InputError("grid spec must be start:stop:n, got '" + spec + "'");
    }
    if (!(g.f_start_hz > 0.0))
        throw InputError("grid start must be > 0 (DC is excluded)");
    return g;
}

inline CoaxGeometry geometry_from_flags(double length, double inner_d, double outer_d) {
    CoaxGeometry g{length, inner_d, outer_d};
    g.validate();
    return g;
}

inline void print_flags(std::ostream& err, const std::vector<PointFlag>& flags) {
    for (const auto& f : flags)
        err << "flag " << f.index << " f_hz=" << fmt12(f.f_hz) << " " << flag_name(f.kind) << ": " << f.message
            << "\n";
}

inline void ensure_covers(const MaterialModel& mat, const FrequencyGrid& grid) {
    for (double f : grid)
        if (!mat.covers(f))
            throw OutOfRangeError("grid point " + fmt12(f) + " Hz outside material range [" + fmt12(mat.f_min()) +
                                  ", " + fmt12(mat.f_max()) + "] Hz");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands. Each returns an exit code; errors propagate as exceptions.

inline int cmd_model(const std::string& design_path, const std::string& out_path, std::ostream& out) {
    const DesignFile design = load_design(design_path);
    const FrequencyGrid grid = design.grid.build();
    detail::ensure_covers(design.material, grid);
    const TwoPortResponse resp = s_params_model(design.geometry, design.material, grid, design.z0_ohm);
    detail::write_response(out_path, resp);

    const double z_first = characteristic_impedance(design.geometry, design.material, grid[0]);
    out << "points: " << resp.size() << "\n";
    out << "length_m: " << detail::fmt12(design.geometry.length_m) << "\n";
    out << "z_ohm_at_dc_proxy: " << detail::fmt12(z_first) << "\n";
    out << "dc_proxy_hz: " << detail::fmt12(grid[0]) << "\n";
    out << "dc_proxy_s21_db: " << detail::fmt12(magnitude_db(resp.s21.front())) << "\n";
    out << "last_s21_db: " << detail::fmt12(magnitude_db(resp.s21.back())) << "\n";
    return kOk;
}

inline int cmd_extract(const std::string& measured_path, const CoaxGeometry& geom, std::size_t smooth_window,
                       const std::string& out_path, std::ostream& out, std::ostream& err) {
    RawTwoPort raw;
    try {
        raw = parse_s2p(read_text_file(measured_path));
    } catch (const ParseError& e) {
        throw InputError(measured_path + ": " + e.what());
    }
    if (!(geom.length_m > 0.0))
        throw InputError("--length must be > 0 for extraction");
    ExtractionReport report;
    try {
        report = extract_material(raw, geom, ExtractionOptions{smooth_window});
    } catch (const ExtractionFailedError& e) {
        err << e.what() << "\n";
        detail::print_flags(err, e.flags());
        return kExtractionFailed;
    }
    detail::write_text_file(out_path, export_csv(report));
    detail::print_flags(err, report.flags);
    out << "points: " << report.grid_size << "\n";
    out << "flagged: " << report.flagged_count() << "\n";
    out << "material_samples: " << report.material.size() << "\n";
    out << "asymmetry_max: " << detail::fmt12(report.asymmetry_max) << "\n";
    out << "smooth_window: " << smooth_window << "\n";
    return kOk;
}

struct PredictOptions {
    std::string material_path;
    CoaxGeometry geometry;
    std::optional<std::string> grid_spec;
    double z0_ohm = 50.0;
    std::string out_path;
    std::optional<std::string> compare_path;
    double tolerance = 0.10;
};

inline int cmd_predict(const PredictOptions& opt, std::ostream& out) {
    const MaterialModel mat = detail::read_material(opt.material_path);
    std::optional<TwoPortResponse> measured;
    FrequencyGrid grid;
    if (opt.compare_path) {
        measured = detail::read_response(*opt.compare_path);
        grid = measured->grid;
    } else {
        grid = (opt.grid_spec ? detail::parse_grid_spec(*opt.grid_spec) : GridSpec{}).build();
    }
    detail::ensure_covers(mat, grid);
    const TwoPortResponse resp = predict(mat, opt.geometry, grid, opt.z0_ohm);
    detail::write_response(opt.out_path, resp);
    out << "points: " << resp.size() << "\n";
    out << "length_m: " << detail::fmt12(opt.geometry.length_m) << "\n";
    if (!measured)
        return kOk;

    double max_dev = 0.0, sum_dev = 0.0, worst_f = grid[0];
    for (std::size_t i = 0; i < resp.size(); ++i) {
        const double truth = std::abs(measured->s21[i]);
        const double dev = truth > 0.0 ? std::abs(std::abs(resp.s21[i]) - truth) / truth
                                       : std::abs(resp.s21[i]) > 0.0 ? 1.0 : 0.0;
        sum_dev += dev;
        if (dev > max_dev) {
            max_dev = dev;
            worst_f = grid[i];
        }
    }
    const bool pass = max_dev <= opt.tolerance;
    out << "max_rel_dev_s21: " << detail::fmt12(max_dev) << "\n";
    out << "max_rel_dev_f_hz: " << detail::fmt12(worst_f) << "\n";
    out << "mean_rel_dev_s21: " << detail::fmt12(sum_dev / static_cast<double>(resp.size())) << "\n";
    out << "tolerance: " << detail::fmt12(opt.tolerance) << "\n";
    out << "result: " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kOk : kPredictionTolerance;
}

inline int cmd_synth(const std::string& material_path, std::optional<double> target_z,
                     std::optional<double> slope, std::optional<double> f_ref, std::ostream& out) {
    if (!target_z && !slope)
        throw InputError("synth needs --target-z and/or --slope-db-per-ghz");
    const MaterialModel mat = detail::read_material(material_path);
    const double f = f_ref ? *f_ref : mat.f_min();
    if (!(f > 0.0))
        throw InputError("--f-ref must be > 0");
    if (!mat.covers(f))
        throw OutOfRangeError("--f-ref " + detail::fmt12(f) + " Hz outside material range");
    out << "f_ref_hz: " << detail::fmt12(f) << "\n";
    if (target_z) {
        const double ratio = solve_diameter_ratio(*target_z, mat, f);
        const double z_check = characteristic_impedance(CoaxGeometry{0.0, 1.0, ratio}, mat, f);
        out << "diameter_ratio: " << detail::fmt12(ratio) << "\n";
        out << "impedance_at_f_ref_ohm: " << detail::fmt12(z_check) << "\n";
    }
    if (slope) {
        const double length = solve_length_for_slope(*slope, mat);
        const AlphaFit fit = fit_alpha(mat);
        out << "length_m: " << detail::fmt12(length) << "\n";
        out << "achieved_slope_db_per_ghz: " << detail::fmt12(kDbPerNeper * fit.a1_np_per_m_hz * 1e9 * length)
            << "\n";
    }
    return kOk;
}

inline int cmd_check(const std::string& response_path, const ComplianceTargets& targets, bool default_tolerance,
                     std::ostream& out) {
    const TwoPortResponse resp = detail::read_response(response_path);
    const ComplianceReport r = check_compliance(resp, targets);
    out << "in_band_points: " << r.in_band_points << "\n";
    out << "worst_reflection_db: " << detail::fmt12(r.worst_reflection_db) << "\n";
    out << "worst_reflection_f_hz: " << detail::fmt12(r.worst_reflection_f_hz) << "\n";
    out << "reflection_ceiling_db: " << detail::fmt12(targets.reflection_ceiling_db) << "\n";
    out << "reflection: " << (r.reflection_pass ? "PASS" : "FAIL") << "\n";
    out << "fitted_slope_db_per_ghz: " << detail::fmt12(r.fitted_slope_db_per_ghz) << "\n";
    out << "fitted_intercept_db: " << detail::fmt12(r.fitted_intercept_db) << "\n";
    out << "max_linearity_residual_db: " << detail::fmt12(r.max_linearity_residual_db) << "\n";
    out << "slope_target_db_per_ghz: " << detail::fmt12(targets.slope_target_db_per_ghz) << "\n";
    out << "slope_tolerance_rel: " << detail::fmt12(targets.slope_tolerance_rel)
        << (default_tolerance ? " (default; not a measured bound)" : "") << "\n";
    out << "slope: " << (r.slope_pass ? "PASS" : "FAIL") << "\n";
    return r.pass() ? kOk : kComplianceFailed;
}

inline int cmd_convert(const std::string& in_path, const std::string& out_path, DataFormat format, FreqUnit unit,
                       std::ostream& out) {
    RawTwoPort raw;
    try {
        raw = parse_s2p(read_text_file(in_path));
    } catch (const ParseError& e) {
        throw InputError(in_path + ": " + e.what());
    }
    detail::write_text_file(out_path, write_s2p(raw, unit, format));
    out << "points: " << raw.size() << "\n";
    out << "format: " << format_name(format) << "\n";
    out << "unit: " << unit_name(unit) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

/// Runs the command line. args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Matched coaxial powder filter toolkit", "coaxfilt"};
    app.require_subcommand(1);

    // model
    std::string design_path, out_path;
    auto* model = app.add_subcommand("model", "Forward-model a design file to CSV or .s2p");
    model->add_option("design", design_path, "Design file (JSON)")->required();
    model->add_option("--out", out_path, "Output path (.csv or .s2p)")->required();

    // extract
    std::string measured_path;
    double length = 0.0, inner_d = 0.0, outer_d = 0.0;
    std::size_t smooth_window = 1;
    auto* extract = app.add_subcommand("extract", "Extract material parameters from a measured .s2p");
    extract->add_option("measured", measured_path, "Measured Touchstone file")->required();
    extract->add_option("--length", length, "Filter length, m")->required();
    extract->add_option("--inner-d", inner_d, "Inner conductor diameter, m")->required();
    extract->add_option("--outer-d", outer_d, "Outer conductor diameter, m")->required();
    extract->add_option("--smooth-window", smooth_window, "Odd moving-median window (1 = off)");
    extract->add_option("--out", out_path, "Material CSV output")->required();

    // predict
    PredictOptions popt;
    std::string grid_spec, compare_path;
    auto* pred = app.add_subcommand("predict", "Predict the response of another length from a material CSV");
    pred->add_option("material", popt.material_path, "Material CSV")->required();
    pred->add_option("--length", length, "Filter length, m")->required();
    pred->add_option("--inner-d", inner_d, "Inner conductor diameter, m")->required();
    pred->add_option("--outer-d", outer_d, "Outer conductor diameter, m")->required();
    auto* grid_opt = pred->add_option("--grid", grid_spec, "start:stop:n in Hz (default 1e7:2e10:2001)");
    pred->add_option("--z0", popt.z0_ohm, "Reference impedance, ohm");
    pred->add_option("--out", popt.out_path, "Output path (.csv or .s2p)")->required();
    auto* compare_opt = pred->add_option("--compare", compare_path, "Measured response to compare |S21| against");
    pred->add_option("--tol", popt.tolerance, "Max relative |S21| deviation for --compare");
    grid_opt->excludes(compare_opt);

    // synth
    std::string material_path;
    double target_z = 0.0, slope = 0.0, f_ref = 0.0;
    auto* synth = app.add_subcommand("synth", "Solve diameter ratio and/or length for design targets");
    synth->add_option("material", material_path, "Material CSV")->required();
    auto* tz_opt = synth->add_option("--target-z", target_z, "Target characteristic impedance, ohm");
    auto* slope_opt = synth->add_option("--slope-db-per-ghz", slope, "Target |S21| slope, dB/GHz");
    auto* fref_opt = synth->add_option("--f-ref", f_ref, "Reference frequency for impedance, Hz");

    // check
    std::string response_path;
    ComplianceTargets targets;
    auto* check = app.add_subcommand("check", "Check a response against reflection/slope targets");
    check->add_option("response", response_path, "Response (.s2p or CSV)")->required();
    check->add_option("--reflection-ceiling-db", targets.reflection_ceiling_db, "Max |S11| in band, dB");
    check->add_option("--band-max-hz", targets.band_max_hz, "Upper band edge, Hz");
    check->add_option("--slope-target", targets.slope_target_db_per_ghz, "Target slope, dB/GHz");
    auto* tol_opt = check->add_option("--slope-tol", targets.slope_tolerance_rel, "Relative slope tolerance");

    // convert
    std::string in_path, to = "ri", unit = "ghz";
    auto* convert = app.add_subcommand("convert", "Convert Touchstone format and frequency unit");
    convert->add_option("input", in_path, "Input .s2p")->required();
    convert->add_option("output", out_path, "Output .s2p")->required();
    convert->add_option("--to", to, "ri|ma|db");
    convert->add_option("--unit", unit, "hz|khz|mhz|ghz");

    std::vector<const char*> argv{"coaxfilt"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*model)
            return cmd_model(design_path, out_path, out);
        if (*extract)
            return cmd_extract(measured_path, detail::geometry_from_flags(length, inner_d, outer_d), smooth_window,
                               out_path, out, err);
        if (*pred) {
            popt.geometry = detail::geometry_from_flags(length, inner_d, outer_d);
            if (*grid_opt)
                popt.grid_spec = grid_spec;
            if (*compare_opt)
                popt.compare_path = compare_path;
            return cmd_predict(popt, out);
        }
        if (*synth) {
            return cmd_synth(material_path, *tz_opt ? std::optional(target_z) : std::nullopt,
                             *slope_opt ? std::optional(slope) : std::nullopt,
                             *fref_opt ? std::optional(f_ref) : std::nullopt, out);
        }
        if (*check)
            return cmd_check(response_path, targets, tol_opt->count() == 0, out);
        if (*convert) {
            const auto fmt = parse_format(to);
            const auto u = parse_unit(unit);
            if (!fmt)
                throw InputError("--to must be ri, ma or db");
            if (!u)
                throw InputError("--unit must be hz, khz, mhz or ghz");
            return cmd_convert(in_path, out_path, *fmt, *u, out);
        }
    } catch (const ExtractionFailedError& e) {
        err << "error: " << e.what() << "\n";
        return kExtractionFailed;
    } catch (const UnsupportedMaterialError& e) {
        err << "error: " << e.what() << "\n";
        return kSynthesisUnsupported;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumericError;
    }
    return kInputError;
}

}  // namespace coaxfilt::cli
