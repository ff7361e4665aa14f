// Regenerates the CLI fixtures in tests/fixtures.
// usage: make_fixtures <dir>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "coaxfilt/touchstone.hpp"
#include "coaxfilt/txline.hpp"
#include "support/synthetic.hpp"

using namespace coaxfilt;
namespace ct = coaxfilt::testing;

namespace {

constexpr double kEps = 2.0;
constexpr double kAlpha0 = 2.0;
constexpr double kAlphaTop = 54.8;
constexpr std::size_t kPoints = 401;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double matched_mu() {
    const double k = kTwoPi * 50.0 / (PhysicalConstants::eta0() * std::log(ct::kOuterD / ct::kInnerD));
    return kEps * k * k;
}

std::string material_json(double eps, double mu, double a_lo, double a_hi) {
    return R"({"samples": [
    {"f_hz": 1e7, "eps_rel": )" + g17(eps) + R"(, "mu_rel": )" + g17(mu) + R"(, "alpha_np_per_m": )" + g17(a_lo) +
           R"(},
    {"f_hz": 2e10, "eps_rel": )" + g17(eps) + R"(, "mu_rel": )" + g17(mu) + R"(, "alpha_np_per_m": )" + g17(a_hi) +
           "}]}";
}

std::string design(const std::string& geometry, const std::string& material) {
    return "{\n  \"geometry\": " + geometry + ",\n  \"material\": " + material +
           ",\n  \"z0_ohm\": 50,\n  \"grid\": {\"f_start_hz\": 1e7, \"f_stop_hz\": 2e10, \"n_points\": " +
           std::to_string(kPoints) + ", \"spacing\": \"linear\"}\n}\n";
}

std::string geometry(const std::string& length) {
    return R"({"length_m": )" + length + R"(, "inner_d_m": 0.0051, "outer_d_m": 0.008})";
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

MaterialModel fixture_material() {
    const double a1 = (kAlphaTop - kAlpha0) / 20e9;
    return MaterialModel({{1e7, kEps, matched_mu(), kAlpha0 + a1 * 1e7}, {2e10, kEps, matched_mu(), kAlphaTop}});
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: make_fixtures <dir>\n");
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);

    const MaterialModel mat = fixture_material();
    const double a_lo = mat.samples()[0].alpha_np_per_m;
    const std::string m = material_json(kEps, matched_mu(), a_lo, kAlphaTop);
    write(dir / "design_42mm.json", design(geometry("0.042"), m));
    write(dir / "design_36mm.json", design(geometry("0.036"), m));
    write(dir / "design_zero_length.json", design(geometry("0"), m));
    write(dir / "design_missing_length.json",
          design(R"({"inner_d_m": 0.0051, "outer_d_m": 0.008})", m));

    // Lossless vacuum line with ln(D/d) chosen for 65 ohm.
    const double ratio65 = std::exp(kTwoPi * 65.0 / PhysicalConstants::eta0());
    write(dir / "design_65ohm.json",
          design(R"({"length_m": 0.042, "inner_d_m": 0.001, "outer_d_m": )" + g17(1e-3 * ratio65) + "}",
                 material_json(1.0, 1.0, 0.0, 0.0)));

    write(dir / "material_vacuum.csv", "f_hz,eps_rel,mu_rel,alpha_np_per_m\n1e9,1,1,0\n");
    write(dir / "material_constant_alpha.csv",
          "f_hz,eps_rel,mu_rel,alpha_np_per_m\n1e7,2,3,5\n1e10,2,3,5\n2e10,2,3,5\n");
    write(dir / "material_affine.csv", export_csv(mat));

    const FrequencyGrid grid = FrequencyGrid::linear(1e7, 2e10, kPoints);
    const auto long_resp = s_params_model(ct::body(0.042), mat, grid);
    const auto short_resp = s_params_model(ct::body(0.036), mat, grid);

    RawTwoPort corrupted = to_raw(long_resp);
    for (std::size_t i = 0; i < corrupted.size(); ++i) {
        corrupted.s21[i] *= 3.0;
        corrupted.s12[i] *= 3.0;
    }
    write(dir / "corrupted_42mm.s2p", write_s2p(corrupted, FreqUnit::GHz, DataFormat::RI));

    std::mt19937_64 rng(20260101);
    RawTwoPort noisy = to_raw(short_resp);
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        noisy.s11[i] += ct::complex_noise(rng, 0.01);
        noisy.s21[i] += ct::complex_noise(rng, 0.01);
        noisy.s12[i] += ct::complex_noise(rng, 0.01);
        noisy.s22[i] += ct::complex_noise(rng, 0.01);
    }
    write(dir / "noisy_36mm.s2p", write_s2p(noisy, FreqUnit::GHz, DataFormat::MA));

    write(dir / "malformed.s2p",
          "! truncated record on line 4\n# GHZ S RI R 50\n1 0.1 0 0.9 0 0.9 0 0.1 0\n2 0.1 0 0.9 0 0.9 0 0.1\n");
    return 0;
}
