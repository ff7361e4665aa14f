#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace coaxfilt {

using Complex = std::complex<double>;

/// CODATA 2018 vacuum constants. Not configurable.
struct PhysicalConstants {
    static constexpr double c = 299792458.0;          // m/s
    static constexpr double mu0 = 1.25663706212e-6;   // H/m
    static constexpr double eps0 = 8.8541878128e-12;  // F/m

    static double eta0() noexcept { return std::sqrt(mu0 / eps0); }
};

/// 20 / ln(10): dB per neper of amplitude.
inline constexpr double kDbPerNeper = 8.68588963806503655302257837833210;

/// Magnitudes at or below this are reported as the floor.
inline constexpr double kDbFloor = -300.0;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double magnitude_db(Complex s) noexcept {
    const double mag = std::abs(s);
    if (!(mag > 0.0))
        return kDbFloor;
    const double db = 20.0 * std::log10(mag);
    return db < kDbFloor ? kDbFloor : db;
}

inline double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

}  // namespace coaxfilt
