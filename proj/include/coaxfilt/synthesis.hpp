#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "coaxfilt/errors.hpp"
#include "coaxfilt/material.hpp"
#include "coaxfilt/txline.hpp"
#include "coaxfilt/units.hpp"

namespace coaxfilt {

/// Pass/fail targets for a matched low-pass filter. Defaults: -20 dB up to 20 GHz, 1 dB/GHz +-10%.
struct ComplianceTargets {
    double reflection_ceiling_db = -20.0;
    double band_max_hz = 20e9;
    double slope_target_db_per_ghz = 1.0;
    double slope_tolerance_rel = 0.1;

    void validate() const {
        if (!(reflection_ceiling_db < 0.0))
            throw InputError("reflection ceiling must be negative dB");
        if (!(band_max_hz > 0.0))
            throw InputError("band maximum must be positive");
        if (!(slope_target_db_per_ghz >= 0.0))
            throw InputError("slope target must be non-negative");
        if (!(slope_tolerance_rel >= 0.0))
            throw InputError("slope tolerance must be non-negative");
    }
};

struct ComplianceReport {
    bool reflection_pass = false;
    double worst_reflection_db = kDbFloor;
    double worst_reflection_f_hz = 0.0;
    double fitted_slope_db_per_ghz = 0.0;
    double fitted_intercept_db = 0.0;
    double max_linearity_residual_db = 0.0;
    bool slope_pass = false;
    std::size_t in_band_points = 0;

    bool pass() const noexcept { return reflection_pass && slope_pass; }
};

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double max_abs_residual = 0.0;
};

/// Ordinary least squares y = intercept + slope * x, centered for conditioning.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InsufficientDataError("line fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw InsufficientDataError("line fit needs distinct abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i)
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(fit.intercept + fit.slope * x[i] - y[i]));
    return fit;
}

inline double solve_diameter_ratio(double target_z_ohm, const MaterialModel& mat, double f_ref_hz) {
    if (!(target_z_ohm > 0.0))
        throw InputError("target impedance must be positive");
    const MaterialSample s = mat.at(f_ref_hz);
    return std::exp(kTwoPi * target_z_ohm / (PhysicalConstants::eta0() * std::sqrt(s.mu_rel / s.eps_rel)));
}

/// alpha(f) = a0 + a1 f fitted over the material samples (f in Hz).
struct AlphaFit {
    double a0_np_per_m = 0.0;
    double a1_np_per_m_hz = 0.0;
    double max_rel_residual = 0.0;
};

inline AlphaFit fit_alpha(const MaterialModel& mat) {
    if (mat.size() < 2)
        return {mat.samples().front().alpha_np_per_m, 0.0, 0.0};
    std::vector<double> f, a;
    double a_max = 0.0;
    for (const auto& s : mat.samples()) {
        f.push_back(s.f_hz);
        a.push_back(s.alpha_np_per_m);
        a_max = std::max(a_max, std::abs(s.alpha_np_per_m));
    }
    const LineFit fit = fit_line(f, a);
    return {fit.intercept, fit.slope, a_max > 0.0 ? fit.max_abs_residual / a_max : 0.0};
}

inline constexpr double kAffineTolerance = 1e-6;

/**
 * Length of a matched line whose |S21| falls by target_slope dB per GHz.
 *
 * Matched transmission is |S21|_dB(f) = -kDbPerNeper * alpha(f) * l, so only
 * materials with alpha affine in f have a closed-form answer.
 */
inline double solve_length_for_slope(double target_slope_db_per_ghz, const MaterialModel& mat) {
    if (!(target_slope_db_per_ghz > 0.0))
        throw InputError("target slope must be positive");
    const AlphaFit fit = fit_alpha(mat);
    if (fit.max_rel_residual > kAffineTolerance)
        throw UnsupportedMaterialError("attenuation is not affine in frequency (relative residual " +
                                       std::to_string(fit.max_rel_residual) + ")");
    if (!(fit.a1_np_per_m_hz > 0.0))
        throw NoSolutionError("attenuation does not grow with frequency; no length gives the slope");
    return target_slope_db_per_ghz / (kDbPerNeper * fit.a1_np_per_m_hz * 1e9);
}

inline ComplianceReport check_compliance(const TwoPortResponse& resp, const ComplianceTargets& targets = {}) {
    resp.validate();
    targets.validate();
    ComplianceReport report;
    std::vector<double> f_ghz, loss_db;
    bool first = true;
    for (std::size_t i = 0; i < resp.size(); ++i) {
        const double f = resp.grid[i];
        if (f > targets.band_max_hz)
            continue;
        const double refl = magnitude_db(resp.s11[i]);
        if (first || refl > report.worst_reflection_db) {
            report.worst_reflection_db = refl;
            report.worst_reflection_f_hz = f;
            first = false;
        }
        f_ghz.push_back(f * 1e-9);
        loss_db.push_back(-magnitude_db(resp.s21[i]));
    }
    report.in_band_points = f_ghz.size();
    if (f_ghz.size() < 2)
        throw InsufficientDataError("fewer than two points inside the compliance band");

    report.reflection_pass = report.worst_reflection_db < targets.reflection_ceiling_db;
    const LineFit fit = fit_line(f_ghz, loss_db);
    report.fitted_slope_db_per_ghz = fit.slope;
    report.fitted_intercept_db = fit.intercept;
    report.max_linearity_residual_db = fit.max_abs_residual;
    const double target = targets.slope_target_db_per_ghz;
    const double dev = std::abs(fit.slope - target);
    report.slope_pass = target > 0.0 ? dev / target <= targets.slope_tolerance_rel
                                     : dev <= targets.slope_tolerance_rel;
    return report;
}

}  // namespace coaxfilt
