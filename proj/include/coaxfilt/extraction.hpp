#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "coaxfilt/errors.hpp"
#include "coaxfilt/material.hpp"
#include "coaxfilt/touchstone.hpp"
#include "coaxfilt/txline.hpp"
#include "coaxfilt/units.hpp"

namespace coaxfilt {

/// Interface reflection and one-pass propagation factor of a symmetric line section.
struct InterfaceDecomposition {
    Complex gamma_refl;   // (Z - Z0) / (Z + Z0)
    Complex prop_factor;  // exp(-gamma l)
};

/// Below this |S11| the data are treated as matched: Gamma = 0, P = S21.
inline constexpr double kMatchedS11 = 1e-8;

/**
 * Inverts one symmetric (S11, S21) pair into (Gamma, P).
 *
 * With K = (S11^2 - S21^2 + 1) / (2 S11), the two reflection candidates are
 * K +- sqrt(K^2 - 1) and multiply to 1; the one inside the unit circle is kept.
 * It is formed as the reciprocal of the large root to avoid cancellation when
 * K is large (nearly matched data).
 */
inline InterfaceDecomposition invert_point(Complex s11, Complex s21) {
    if (std::abs(s11) < kMatchedS11)
        return {Complex{0.0, 0.0}, s21};

    const Complex one{1.0, 0.0};
    const Complex k = (s11 * s11 - s21 * s21 + one) / (2.0 * s11);
    Complex root = std::sqrt(k * k - one);
    if (std::real(std::conj(k) * root) < 0.0)
        root = -root;
    const Complex big = k + root;
    if (std::abs(big) == 0.0)
        throw SingularInversionError("degenerate reflection roots");
    const Complex gamma = one / big;
    if (std::abs(gamma) > 1.0 + 1e-6)
        throw NonPassiveDataError("no passive interface reflection (|Gamma| = " +
                                  std::to_string(std::abs(gamma)) + ")");

    const Complex v1 = s11 + s21;
    const Complex den = one - v1 * gamma;
    if (std::abs(den) < 1e-12)
        throw SingularInversionError("propagation factor inversion is singular");
    return {gamma, (v1 - gamma) / den};
}

inline Complex impedance_from_reflection(Complex gamma_refl, double z0_ohm) {
    const Complex one{1.0, 0.0};
    if (std::abs(one - gamma_refl) <= 1e-12)
        throw SingularInversionError("reflection coefficient at open-circuit singularity");
    return z0_ohm * (one + gamma_refl) / (one - gamma_refl);
}

/// Recovers (eps, mu, alpha) from gamma and the real part of Z for a known cross-section.
inline MaterialSample material_from_point(Complex gamma, double z_real_ohm, const CoaxGeometry& geom,
                                          double f_hz) {
    const double n = gamma.imag() * PhysicalConstants::c / (kTwoPi * f_hz);
    const double w = kTwoPi * z_real_ohm / (PhysicalConstants::eta0() * geom.log_ratio());
    if (!(n > 0.0) || !(w > 0.0))
        throw UnphysicalPointError("unphysical point at " + std::to_string(f_hz) +
                                   " Hz (sqrt(eps mu) = " + std::to_string(n) +
                                   ", sqrt(mu/eps) = " + std::to_string(w) + ")");
    return {f_hz, n / w, n * w, gamma.real()};
}

// ---------------------------------------------------------------------------
// Phase unwrapping

enum class FlagKind { near_singular, non_passive, branch_ambiguity, passivity_violation, unphysical };

inline const char* flag_name(FlagKind k) noexcept {
    switch (k) {
    case FlagKind::near_singular: return "near-singular";
    case FlagKind::non_passive: return "non-passive";
    case FlagKind::branch_ambiguity: return "branch-ambiguity";
    case FlagKind::passivity_violation: return "passivity-violation";
    case FlagKind::unphysical: return "unphysical";
    }
    return "unknown";
}

struct PointFlag {
    std::size_t index = 0;  // position in the input grid
    double f_hz = 0.0;
    FlagKind kind = FlagKind::near_singular;
    std::string message;
};

struct UnwrapResult {
    std::vector<Complex> gamma;
    std::vector<int> branch_index;
    /// Indices refer to the input list.
    std::vector<PointFlag> flags;
};

/// Re(gamma) in (-kAlphaClamp, 0) is clamped to 0; anything lower is flagged.
inline constexpr double kAlphaClamp = 1e-9;

namespace detail {

inline UnwrapResult unwrap(std::span<const double> f_hz, std::span<const Complex> prop_factor, double length_m,
                           bool strict) {
    if (f_hz.size() != prop_factor.size())
        throw InputError("frequency and propagation-factor lists differ in length");
    if (!(length_m > 0.0))
        throw InputError("line length must be positive for unwrapping");

    constexpr double pi = std::numbers::pi;
    UnwrapResult out;
    out.gamma.reserve(f_hz.size());
    out.branch_index.reserve(f_hz.size());
    double unwrapped = 0.0;
    for (std::size_t i = 0; i < f_hz.size(); ++i) {
        const double principal = std::arg(prop_factor[i]);
        if (i == 0) {
            unwrapped = principal;
        } else {
            const double raw = principal - std::arg(prop_factor[i - 1]);
            const double step = raw - kTwoPi * std::round(raw / kTwoPi);
            if (std::abs(step) >= pi * (1.0 - 1e-12)) {
                const std::string msg = "phase jump of " + std::to_string(step) + " rad between " +
                                        std::to_string(f_hz[i - 1]) + " Hz and " + std::to_string(f_hz[i]) +
                                        " Hz is ambiguous";
                if (strict)
                    throw BranchAmbiguityError(i - 1, msg);
                out.flags.push_back({i, f_hz[i], FlagKind::branch_ambiguity, msg});
            }
            unwrapped += step;
        }
        const int branch = static_cast<int>(std::lround((principal - unwrapped) / kTwoPi));
        Complex g = -Complex{std::log(std::abs(prop_factor[i])), unwrapped} / length_m;
        if (g.real() < 0.0) {
            if (g.real() > -kAlphaClamp) {
                g.real(0.0);
            } else {
                out.flags.push_back({i, f_hz[i], FlagKind::passivity_violation,
                                     "negative attenuation " + std::to_string(g.real()) + " Np/m"});
            }
        }
        if (i == 0 && g.imag() < 0.0) {
            out.flags.push_back({i, f_hz[i], FlagKind::branch_ambiguity,
                                 "negative phase constant at the first point: grid starts above the first "
                                 "phase wrap"});
        }
        out.gamma.push_back(g);
        out.branch_index.push_back(branch);
    }
    return out;
}

}  // namespace detail

/**
 * gamma(f) = -(ln|P| + i unwrapped_arg(P)) / l.
 *
 * The first point's phase is taken on the principal sheet (-pi, pi]. Adjacent
 * phase steps of pi or more throw BranchAmbiguityError. Attenuation slightly
 * below zero is clamped; larger negatives and a negative first-point phase
 * constant are returned as flags.
 */
inline UnwrapResult unwrap_gamma(std::span<const double> f_hz, std::span<const Complex> prop_factor,
                                 double length_m) {
    return detail::unwrap(f_hz, prop_factor, length_m, /*strict=*/true);
}

// ---------------------------------------------------------------------------
// Full extraction

struct ExtractionPoint {
    double f_hz = 0.0;
    Complex gamma_refl;
    Complex prop_factor;
    Complex gamma;
    Complex z_ohm;
    int branch_index = 0;  // whole 2 pi windings of beta l added by unwrapping
    std::size_t grid_index = 0;
    bool usable = true;
};

struct ExtractionOptions {
    /// Odd moving-median window applied to eps, mu and alpha; 1 disables smoothing.
    std::size_t smooth_window = 1;
};

struct ExtractionReport {
    std::vector<ExtractionPoint> points;
    MaterialModel material = MaterialModel::uniform(1.0, 1.0, 0.0);
    double asymmetry_max = 0.0;
    std::vector<PointFlag> flags;
    std::size_t grid_size = 0;

    std::size_t flagged_count() const {
        std::vector<std::size_t> idx;
        idx.reserve(flags.size());
        for (const auto& f : flags)
            idx.push_back(f.index);
        std::sort(idx.begin(), idx.end());
        return static_cast<std::size_t>(std::unique(idx.begin(), idx.end()) - idx.begin());
    }
};

/// More than half of the grid was unusable.
class ExtractionFailedError : public NumericError {
public:
    ExtractionFailedError(const std::string& what, std::vector<PointFlag> flags)
        : NumericError(what), flags_(std::move(flags)) {}

    const std::vector<PointFlag>& flags() const noexcept { return flags_; }

private:
    std::vector<PointFlag> flags_;
};

/// Moving median with the window clamped inside the sequence at both ends.
template <typename T>
std::vector<T> moving_median(std::span<const T> values, std::size_t window) {
    if (window % 2 == 0)
        throw InputError("smoothing window must be odd");
    if (window <= 1 || values.size() <= 1)
        return {values.begin(), values.end()};
    const std::size_t w = std::min(window, values.size() % 2 == 1 ? values.size() : values.size() - 1);
    const std::size_t half = w / 2;
    std::vector<T> out(values.size());
    std::vector<T> buf(w);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::size_t start = i > half ? i - half : 0;
        start = std::min(start, values.size() - w);
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(start), w, buf.begin());
        std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(half), buf.end());
        out[i] = buf[half];
    }
    return out;
}

/// Points with eps this close below 1 are rounding noise and clamped to 1.
inline constexpr double kEpsFloorTolerance = 1e-9;

inline ExtractionReport extract_material(const TwoPortResponse& measured, const CoaxGeometry& geom,
                                         const ExtractionOptions& options = {}) {
    measured.validate();
    geom.validate();
    if (!(geom.length_m > 0.0))
        throw InputError("extraction needs a positive line length");
    if (options.smooth_window == 0 || options.smooth_window % 2 == 0)
        throw InputError("smoothing window must be a positive odd number");

    ExtractionReport report;
    report.grid_size = measured.size();

    // Per-point inversion; failures are flagged and the point is dropped.
    std::vector<double> inv_f;
    std::vector<Complex> inv_p;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        const double f = measured.grid[i];
        try {
            const InterfaceDecomposition d = invert_point(measured.s11[i], measured.s21[i]);
            if (std::abs(d.prop_factor) > 1.0 + 1e-9) {
                report.flags.push_back({i, f, FlagKind::passivity_violation,
                                        "|P| = " + std::to_string(std::abs(d.prop_factor)) + " exceeds 1"});
                continue;
            }
            ExtractionPoint pt;
            pt.f_hz = f;
            pt.gamma_refl = d.gamma_refl;
            pt.prop_factor = d.prop_factor;
            pt.grid_index = i;
            report.points.push_back(pt);
            inv_f.push_back(f);
            inv_p.push_back(d.prop_factor);
        } catch (const NonPassiveDataError& e) {
            report.flags.push_back({i, f, FlagKind::non_passive, e.what()});
        } catch (const SingularInversionError& e) {
            report.flags.push_back({i, f, FlagKind::near_singular, e.what()});
        }
    }

    // Sequential unwrap over the inverted points.
    if (!inv_f.empty()) {
        UnwrapResult uw = detail::unwrap(inv_f, inv_p, geom.length_m, /*strict=*/false);
        for (auto& flag : uw.flags) {
            ExtractionPoint& pt = report.points[flag.index];
            pt.usable = false;
            flag.index = pt.grid_index;
            report.flags.push_back(std::move(flag));
        }
        for (std::size_t k = 0; k < report.points.size(); ++k) {
            report.points[k].gamma = uw.gamma[k];
            report.points[k].branch_index = uw.branch_index[k];
        }
    }

    // Impedance and material per point.
    std::vector<MaterialSample> samples;
    for (auto& pt : report.points) {
        try {
            pt.z_ohm = impedance_from_reflection(pt.gamma_refl, measured.z0_ohm);
        } catch (const SingularInversionError& e) {
            pt.usable = false;
            report.flags.push_back({pt.grid_index, pt.f_hz, FlagKind::near_singular, e.what()});
            continue;
        }
        if (!pt.usable)
            continue;
        try {
            MaterialSample s = material_from_point(pt.gamma, pt.z_ohm.real(), geom, pt.f_hz);
            if (s.eps_rel < 1.0 && s.eps_rel >= 1.0 - kEpsFloorTolerance)
                s.eps_rel = 1.0;
            if (s.eps_rel < 1.0)
                throw UnphysicalPointError("eps_rel = " + std::to_string(s.eps_rel) + " below 1 at " +
                                           std::to_string(pt.f_hz) + " Hz");
            samples.push_back(s);
        } catch (const UnphysicalPointError& e) {
            pt.usable = false;
            report.flags.push_back({pt.grid_index, pt.f_hz, FlagKind::unphysical, e.what()});
        }
    }

    std::sort(report.flags.begin(), report.flags.end(),
              [](const PointFlag& a, const PointFlag& b) { return a.index < b.index; });

    if (2 * report.flagged_count() > report.grid_size || samples.empty())
        throw ExtractionFailedError("extraction failed: " + std::to_string(report.flagged_count()) + " of " +
                                        std::to_string(report.grid_size) + " points flagged",
                                    report.flags);

    if (options.smooth_window > 1) {
        std::vector<double> eps, mu, alpha;
        for (const auto& s : samples) {
            eps.push_back(s.eps_rel);
            mu.push_back(s.mu_rel);
            alpha.push_back(s.alpha_np_per_m);
        }
        eps = moving_median<double>(eps, options.smooth_window);
        mu = moving_median<double>(mu, options.smooth_window);
        alpha = moving_median<double>(alpha, options.smooth_window);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i].eps_rel = eps[i];
            samples[i].mu_rel = mu[i];
            samples[i].alpha_np_per_m = alpha[i];
        }
    }
    report.material = MaterialModel(std::move(samples));
    return report;
}

/// Symmetrizes four-parameter data first and records the asymmetry.
inline ExtractionReport extract_material(const RawTwoPort& raw, const CoaxGeometry& geom,
                                         const ExtractionOptions& options = {}) {
    const SymmetrizedResponse sym = symmetrize(raw);
    ExtractionReport report = extract_material(sym.response, geom, options);
    report.asymmetry_max = sym.asymmetry_max;
    return report;
}

/// Material CSV of the extracted model.
inline std::string export_csv(const ExtractionReport& report) { return export_csv(report.material); }

/// Forward model of a new geometry with an extracted material.
inline TwoPortResponse predict(const MaterialModel& material, const CoaxGeometry& new_geom,
                               const FrequencyGrid& grid, double z0_ohm = 50.0) {
    return s_params_model(new_geom, material, grid, z0_ohm);
}

}  // namespace coaxfilt
