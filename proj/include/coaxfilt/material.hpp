#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "coaxfilt/errors.hpp"

namespace coaxfilt {

/// Effective compound parameters at one frequency. Loss lives only in alpha.
struct MaterialSample {
    double f_hz = 0.0;
    double eps_rel = 1.0;
    double mu_rel = 1.0;
    double alpha_np_per_m = 0.0;

    friend bool operator==(const MaterialSample&, const MaterialSample&) = default;
};

inline void validate(const MaterialSample& s) {
    if (!(s.f_hz > 0.0) || !std::isfinite(s.f_hz))
        throw InputError("material sample frequency must be positive, got " + std::to_string(s.f_hz));
    if (!(s.eps_rel >= 1.0) || !std::isfinite(s.eps_rel))
        throw InputError("eps_rel must be >= 1, got " + std::to_string(s.eps_rel));
    if (!(s.mu_rel > 0.0) || !std::isfinite(s.mu_rel))
        throw InputError("mu_rel must be > 0, got " + std::to_string(s.mu_rel));
    if (!(s.alpha_np_per_m >= 0.0) || !std::isfinite(s.alpha_np_per_m))
        throw InputError("alpha_np_per_m must be >= 0, got " + std::to_string(s.alpha_np_per_m));
}

/**
 * Tabulated material, piecewise-linear in frequency for eps, mu and alpha.
 *
 * Evaluation outside [first, last] sample frequency is an error. A model with a
 * single sample is frequency independent and can be evaluated anywhere.
 */
class MaterialModel {
public:
    explicit MaterialModel(std::vector<MaterialSample> samples) : samples_(std::move(samples)) {
        if (samples_.empty())
            throw InputError("material model needs at least one sample");
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            validate(samples_[i]);
            if (i > 0 && !(samples_[i].f_hz > samples_[i - 1].f_hz))
                throw InputError("material frequencies must be strictly increasing (sample " +
                                 std::to_string(i) + ")");
        }
    }

    /// Frequency-independent material.
    static MaterialModel uniform(double eps_rel, double mu_rel, double alpha_np_per_m) {
        return MaterialModel({MaterialSample{1.0, eps_rel, mu_rel, alpha_np_per_m}});
    }

    const std::vector<MaterialSample>& samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool is_uniform() const noexcept { return samples_.size() == 1; }

    double f_min() const noexcept { return samples_.front().f_hz; }
    double f_max() const noexcept { return samples_.back().f_hz; }

    bool covers(double f_hz) const noexcept {
        return is_uniform() || (f_hz >= f_min() && f_hz <= f_max());
    }

    MaterialSample at(double f_hz) const {
        if (is_uniform()) {
            MaterialSample s = samples_.front();
            s.f_hz = f_hz;
            return s;
        }
        if (!covers(f_hz))
            throw OutOfRangeError("frequency " + std::to_string(f_hz) + " Hz outside material range [" +
                                  std::to_string(f_min()) + ", " + std::to_string(f_max()) + "] Hz");
        auto hi = std::lower_bound(samples_.begin(), samples_.end(), f_hz,
                                   [](const MaterialSample& s, double f) { return s.f_hz < f; });
        if (hi->f_hz == f_hz)
            return *hi;
        auto lo = hi - 1;
        const double t = (f_hz - lo->f_hz) / (hi->f_hz - lo->f_hz);
        auto lerp = [t](double a, double b) { return a + t * (b - a); };
        return {f_hz, lerp(lo->eps_rel, hi->eps_rel), lerp(lo->mu_rel, hi->mu_rel),
                lerp(lo->alpha_np_per_m, hi->alpha_np_per_m)};
    }

private:
    std::vector<MaterialSample> samples_;
};

}  // namespace coaxfilt
