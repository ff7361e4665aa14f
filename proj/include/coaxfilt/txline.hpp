#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "coaxfilt/errors.hpp"
#include "coaxfilt/material.hpp"
#include "coaxfilt/units.hpp"

namespace coaxfilt {

/// Coaxial filter body: length l, inner conductor d, shield bore D. All in meters.
struct CoaxGeometry {
    double length_m = 0.0;
    double inner_d_m = 0.0;
    double outer_d_m = 0.0;

    double log_ratio() const noexcept { return std::log(outer_d_m / inner_d_m); }

    void validate() const {
        if (!(inner_d_m > 0.0) || !std::isfinite(inner_d_m))
            throw InputError("inner diameter must be positive");
        if (!(outer_d_m > inner_d_m) || !std::isfinite(outer_d_m))
            throw InputError("outer diameter must exceed inner diameter");
        if (!(length_m >= 0.0) || !std::isfinite(length_m))
            throw InputError("length must be non-negative");
    }
};

/// Strictly increasing, DC-free list of frequencies in Hz.
class FrequencyGrid {
public:
    FrequencyGrid() = default;

    explicit FrequencyGrid(std::vector<double> points_hz) : points_(std::move(points_hz)) {
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (!(points_[i] > 0.0) || !std::isfinite(points_[i]))
                throw InputError("grid point " + std::to_string(i) + " must be a positive frequency");
            if (i > 0 && !(points_[i] > points_[i - 1]))
                throw InputError("grid must be strictly increasing at point " + std::to_string(i));
        }
    }

    static FrequencyGrid linear(double f_start_hz, double f_stop_hz, std::size_t n_points) {
        if (n_points == 0)
            throw InputError("grid needs at least one point");
        if (n_points == 1)
            return FrequencyGrid({f_start_hz});
        if (!(f_stop_hz > f_start_hz))
            throw InputError("grid stop must exceed start");
        std::vector<double> pts(n_points);
        const double step = (f_stop_hz - f_start_hz) / static_cast<double>(n_points - 1);
        for (std::size_t i = 0; i < n_points; ++i)
            pts[i] = f_start_hz + step * static_cast<double>(i);
        pts.back() = f_stop_hz;
        return FrequencyGrid(std::move(pts));
    }

    const std::vector<double>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    double operator[](std::size_t i) const { return points_[i]; }

    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

private:
    std::vector<double> points_;
};

struct LinePointParams {
    double f_hz = 0.0;
    double z_ohm = 0.0;
    Complex gamma;  // alpha + i beta, per meter
};

struct SPair {
    Complex s11;
    Complex s21;
};

/// Symmetric reciprocal two-port: S22 == S11, S12 == S21.
struct TwoPortResponse {
    FrequencyGrid grid;
    std::vector<Complex> s11;
    std::vector<Complex> s21;
    double z0_ohm = 50.0;

    std::size_t size() const noexcept { return grid.size(); }

    void validate() const {
        if (s11.size() != grid.size() || s21.size() != grid.size())
            throw InputError("response arrays do not match grid length");
        if (!(z0_ohm > 0.0))
            throw InputError("reference impedance must be positive");
    }
};

/// Chain (ABCD) matrix of a two-port.
struct AbcdMatrix {
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};
    Complex c{0.0, 0.0};
    Complex d{1.0, 0.0};

    static AbcdMatrix identity() noexcept { return {}; }

    friend AbcdMatrix operator*(const AbcdMatrix& x, const AbcdMatrix& y) noexcept {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
};

// ---------------------------------------------------------------------------
// Line parameters

inline Complex propagation_constant(const MaterialModel& mat, double f_hz) {
    const MaterialSample s = mat.at(f_hz);
    const double beta = kTwoPi * f_hz * std::sqrt(s.eps_rel * s.mu_rel) / PhysicalConstants::c;
    return {s.alpha_np_per_m, beta};
}

inline double characteristic_impedance(const CoaxGeometry& geom, const MaterialSample& s) {
    return PhysicalConstants::eta0() / kTwoPi * std::sqrt(s.mu_rel / s.eps_rel) * geom.log_ratio();
}

inline double characteristic_impedance(const CoaxGeometry& geom, const MaterialModel& mat, double f_hz) {
    return characteristic_impedance(geom, mat.at(f_hz));
}

inline LinePointParams line_params(const CoaxGeometry& geom, const MaterialModel& mat, double f_hz) {
    return {f_hz, characteristic_impedance(geom, mat, f_hz), propagation_constant(mat, f_hz)};
}

// ---------------------------------------------------------------------------
// Closed-form S-parameters of a uniform line section

/// Above this alpha*l the forward transmission is below any representable floor.
inline constexpr double kMaxAttenuationNepers = 700.0;

/**
 * S11/S21 of a line section of impedance z_ohm and propagation constant gamma
 * between two z0_ohm ports.
 *
 * cosh/sinh/coth are expanded with q = exp(-2 gamma l), |q| <= 1 for alpha >= 0:
 *   S21 = 2 e^{-gl} / ((1 + q) + (1 - q)(r + 1/r)/2)
 *   S11 = (r - 1/r)(1 - q) / (2(1 + q) + (1 - q)(r + 1/r))
 * which never overflows for large alpha*l.
 */
inline SPair line_s_params(double z_ohm, Complex gamma, double length_m, double z0_ohm) {
    if (length_m == 0.0)
        return {Complex{0.0, 0.0}, Complex{1.0, 0.0}};
    const double r = z_ohm / z0_ohm;
    const double sum = r + 1.0 / r;
    const double diff = r - 1.0 / r;
    const Complex gl = gamma * length_m;
    if (gl.real() > kMaxAttenuationNepers)
        return {Complex{diff / (2.0 + sum), 0.0}, Complex{0.0, 0.0}};
    const Complex e_minus = std::exp(-gl);
    const Complex q = e_minus * e_minus;
    const Complex one{1.0, 0.0};
    const Complex s21 = 2.0 * e_minus / ((one + q) + (one - q) * (0.5 * sum));
    const Complex s11 = diff * (one - q) / (2.0 * (one + q) + (one - q) * sum);
    return {s11, s21};
}

inline SPair s_params_point(const CoaxGeometry& geom, const MaterialModel& mat, double f_hz, double z0_ohm) {
    const LinePointParams p = line_params(geom, mat, f_hz);
    return line_s_params(p.z_ohm, p.gamma, geom.length_m, z0_ohm);
}

inline TwoPortResponse s_params_model(const CoaxGeometry& geom, const MaterialModel& mat,
                                      const FrequencyGrid& grid, double z0_ohm = 50.0) {
    geom.validate();
    if (!(z0_ohm > 0.0))
        throw InputError("reference impedance must be positive");
    TwoPortResponse out{grid, {}, {}, z0_ohm};
    out.s11.reserve(grid.size());
    out.s21.reserve(grid.size());
    for (double f : grid) {
        const SPair s = s_params_point(geom, mat, f, z0_ohm);
        out.s11.push_back(s.s11);
        out.s21.push_back(s.s21);
    }
    return out;
}

// ---------------------------------------------------------------------------
// ABCD route

inline AbcdMatrix abcd_of_line(double z_ohm, Complex gamma, double length_m) {
    const Complex gl = gamma * length_m;
    const Complex ch = std::cosh(gl);
    const Complex sh = std::sinh(gl);
    return {ch, z_ohm * sh, sh / z_ohm, ch};
}

inline AbcdMatrix abcd_of_line(const CoaxGeometry& geom, const MaterialModel& mat, double f_hz) {
    const LinePointParams p = line_params(geom, mat, f_hz);
    return abcd_of_line(p.z_ohm, p.gamma, geom.length_m);
}

inline SPair abcd_to_s(const AbcdMatrix& m, double z0_ohm) {
    if (!(z0_ohm > 0.0))
        throw InputError("reference impedance must be positive");
    const Complex den = m.a + m.b / z0_ohm + m.c * z0_ohm + m.d;
    if (std::abs(den) < 1e-30)
        throw SingularNetworkError("ABCD to S conversion is singular");
    return {(m.a + m.b / z0_ohm - m.c * z0_ohm - m.d) / den, 2.0 / den};
}

inline AbcdMatrix cascade(const AbcdMatrix& first, const AbcdMatrix& second) noexcept {
    return first * second;
}

}  // namespace coaxfilt
