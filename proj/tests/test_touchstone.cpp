#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "coaxfilt/touchstone.hpp"
#include "support/malformed_corpus.hpp"
#include "support/synthetic.hpp"

using namespace coaxfilt;
namespace ct = coaxfilt::testing;

namespace {

RawTwoPort random_raw(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> mag(0.0, 1.0), ph(-3.14159, 3.14159), df(1e5, 5e7);
    RawTwoPort raw;
    std::vector<double> f;
    double acc = 1e6;
    for (std::size_t i = 0; i < n; ++i) {
        acc += df(rng);
        f.push_back(acc);
        raw.s11.push_back(std::polar(mag(rng), ph(rng)));
        raw.s21.push_back(std::polar(mag(rng), ph(rng)));
        raw.s12.push_back(std::polar(mag(rng), ph(rng)));
        raw.s22.push_back(std::polar(mag(rng), ph(rng)));
    }
    raw.grid = FrequencyGrid(std::move(f));
    raw.z0_ohm = 50.0;
    return raw;
}

double max_diff(const RawTwoPort& a, const RawTwoPort& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.grid[i] - b.grid[i]) / a.grid[i]);
        for (auto m : {&RawTwoPort::s11, &RawTwoPort::s21, &RawTwoPort::s12, &RawTwoPort::s22}) {
            worst = std::max(worst, std::abs(((a.*m)[i]).real() - ((b.*m)[i]).real()));
            worst = std::max(worst, std::abs(((a.*m)[i]).imag() - ((b.*m)[i]).imag()));
        }
    }
    return worst;
}

std::size_t error_line(const std::string& text) {
    try {
        parse_s2p(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST(ParseS2p, RealImaginaryLine) {
    const auto raw = parse_s2p("# GHZ S RI R 50\n1.0 0.1 0 0.9 0 0.9 0 0.1 0\n");
    ASSERT_EQ(raw.size(), 1u);
    EXPECT_EQ(raw.grid[0], 1e9);
    EXPECT_EQ(raw.s11[0], Complex(0.1, 0.0));
    EXPECT_EQ(raw.s21[0], Complex(0.9, 0.0));
    EXPECT_EQ(raw.z0_ohm, 50.0);
}

TEST(ParseS2p, DecibelAngleLine) {
    const auto raw = parse_s2p("# HZ S DB R 50\n2e9 -20 0 -3.0103 -90 -3.0103 -90 -20 0\n");
    EXPECT_EQ(raw.grid[0], 2e9);
    EXPECT_NEAR(raw.s11[0].real(), 0.1, 1e-15);
    EXPECT_NEAR(raw.s11[0].imag(), 0.0, 1e-15);
    // -3.0103 dB is the half-power point: |S21| = 0.70711
    EXPECT_NEAR(raw.s21[0].real(), 0.0, 1e-15);
    EXPECT_NEAR(raw.s21[0].imag(), -0.707106777656652, 1e-12);

    const auto half = parse_s2p("# HZ S DB R 50\n2e9 -20 0 -6.0206 -90 -6.0206 -90 -20 0\n");
    EXPECT_NEAR(half.s21[0].imag(), -0.5, 1e-5);
}

TEST(ParseS2p, MagnitudeAngleAndDefaults) {
    // no unit/format/R given: GHZ, MA, 50
    const auto raw = parse_s2p("! comment\n#\n2 0.5 180 1 90 1 90 0.5 0 ! trailing\n");
    EXPECT_EQ(raw.grid[0], 2e9);
    EXPECT_NEAR(raw.s11[0].real(), -0.5, 1e-15);
    EXPECT_NEAR(raw.s21[0].imag(), 1.0, 1e-15);
    EXPECT_EQ(raw.z0_ohm, 50.0);
}

TEST(ParseS2p, MixedCaseAndWhitespace) {
    const auto raw = parse_s2p("\t#  mHz   s   ri  r   75 \r\n  100\t0.1  0   0.9 0 \t 0.9 0 0.1 0\r\n\n");
    EXPECT_EQ(raw.grid[0], 100e6);
    EXPECT_EQ(raw.z0_ohm, 75.0);
    EXPECT_EQ(raw.s22[0], Complex(0.1, 0.0));
}

TEST(ParseS2p, HeaderOnlyIsEmpty) {
    const auto raw = parse_s2p("! nothing\n# GHZ S RI R 50\n");
    EXPECT_EQ(raw.size(), 0u);
}

class Malformed : public ::testing::TestWithParam<ct::MalformedCase> {};

TEST_P(Malformed, ReportsLine) {
    const auto& c = GetParam();
    EXPECT_EQ(error_line(c.text), c.line) << c.name;
}

INSTANTIATE_TEST_SUITE_P(
    Corpus, Malformed,
    ::testing::ValuesIn(ct::kMalformedCorpus),
    [](const auto& info) { return std::string(info.param.name); });

TEST(WriteS2p, RoundTripAllFormatsAndUnits) {
    std::mt19937_64 rng(3);
    const RawTwoPort raw = random_raw(rng, 200);
    for (FreqUnit u : {FreqUnit::Hz, FreqUnit::KHz, FreqUnit::MHz, FreqUnit::GHz})
        for (DataFormat f : {DataFormat::RI, DataFormat::MA, DataFormat::DB})
            EXPECT_LT(max_diff(raw, parse_s2p(write_s2p(raw, u, f))), 1e-10)
                << unit_name(u) << " " << format_name(f);
}

TEST(WriteS2p, RiMaRiChain) {
    std::mt19937_64 rng(4);
    const RawTwoPort raw = random_raw(rng, 500);
    const RawTwoPort ma = parse_s2p(write_s2p(raw, FreqUnit::GHz, DataFormat::MA));
    const RawTwoPort back = parse_s2p(write_s2p(ma, FreqUnit::GHz, DataFormat::RI));
    EXPECT_LT(max_diff(raw, back), 1e-10);
}

TEST(WriteS2p, ExampleRoundTripAndEmpty) {
    const auto raw = parse_s2p("# GHZ S RI R 50\n1.0 0.1 0 0.9 0 0.9 0 0.1 0\n");
    const auto again = parse_s2p(write_s2p(raw));
    EXPECT_EQ(again.s11[0], raw.s11[0]);
    EXPECT_EQ(again.s21[0], raw.s21[0]);
    EXPECT_EQ(again.grid, raw.grid);

    const std::string empty = write_s2p(RawTwoPort{});
    EXPECT_EQ(empty, "! two-port S-parameters\n# GHZ S RI R 50\n");
    EXPECT_EQ(parse_s2p(empty).size(), 0u);
}

TEST(WriteS2p, ZeroMagnitudeInDecibels) {
    RawTwoPort raw{FrequencyGrid({1e9}), {Complex{}}, {Complex{1, 0}}, {Complex{1, 0}}, {Complex{}}, 50.0};
    const std::string text = write_s2p(raw, FreqUnit::GHz, DataFormat::DB);
    EXPECT_NE(text.find("1 -300 0 0 0 0 0 -300 0"), std::string::npos) << text;
    EXPECT_LT(std::abs(parse_s2p(text).s11[0]), 1e-14);
}

TEST(Symmetrize, SymmetricDataUnchanged) {
    const auto resp = s_params_model(ct::body(0.03), MaterialModel::uniform(3.0, 1.0, 5.0), ct::default_grid(51));
    const auto sym = symmetrize(to_raw(resp));
    EXPECT_EQ(sym.asymmetry_max, 0.0);
    EXPECT_EQ(sym.response.s11, resp.s11);
    EXPECT_EQ(sym.response.s21, resp.s21);
}

TEST(Symmetrize, AveragesAndReportsAsymmetry) {
    RawTwoPort raw{FrequencyGrid({1e9}), {Complex{0.2, 0}}, {Complex{0.5, 0}}, {Complex{0.5, 0}},
                   {Complex{0.4, 0}}, 50.0};
    const auto sym = symmetrize(raw);
    EXPECT_NEAR(sym.response.s11[0].real(), 0.3, 1e-15);
    EXPECT_NEAR(sym.asymmetry_max, 0.2, 1e-15);
}

TEST(Symmetrize, IdempotentAndCommutesWithSubsetting) {
    std::mt19937_64 rng(8);
    const RawTwoPort raw = random_raw(rng, 100);
    const auto once = symmetrize(raw).response;
    const auto twice = symmetrize(to_raw(once));
    EXPECT_EQ(twice.asymmetry_max, 0.0);
    EXPECT_EQ(twice.response.s11, once.s11);
    EXPECT_EQ(twice.response.s21, once.s21);

    RawTwoPort sub;
    std::vector<double> f;
    for (std::size_t i = 0; i < raw.size(); i += 3) {
        f.push_back(raw.grid[i]);
        sub.s11.push_back(raw.s11[i]);
        sub.s21.push_back(raw.s21[i]);
        sub.s12.push_back(raw.s12[i]);
        sub.s22.push_back(raw.s22[i]);
    }
    sub.grid = FrequencyGrid(f);
    const auto sub_sym = symmetrize(sub).response;
    for (std::size_t k = 0; k < sub_sym.size(); ++k) {
        EXPECT_EQ(sub_sym.s11[k], once.s11[3 * k]);
        EXPECT_EQ(sub_sym.s21[k], once.s21[3 * k]);
    }
}

TEST(ExportCsv, MatchedPointAndFloor) {
    TwoPortResponse resp{FrequencyGrid({1e9}), {Complex{0.0, 0.0}}, {Complex{std::exp(-1.0), 0.0}}, 50.0};
    const std::string csv = export_csv(resp);
    EXPECT_EQ(csv,
              "freq_hz,s11_re,s11_im,s21_re,s21_im,s11_db,s21_db\n"
              "1000000000,0,0,0.367879441171,0,-300,-8.68588963807\n");
    EXPECT_EQ(export_csv(TwoPortResponse{}), "freq_hz,s11_re,s11_im,s21_re,s21_im,s11_db,s21_db\n");
}

TEST(ResponseCsv, RoundTrip) {
    const auto resp = s_params_model(ct::body(0.03), MaterialModel::uniform(3.0, 1.0, 5.0), ct::default_grid(51));
    const auto back = parse_response_csv(export_csv(resp));
    ASSERT_EQ(back.size(), resp.size());
    for (std::size_t i = 0; i < resp.size(); ++i) {
        EXPECT_LT(std::abs(back.s11[i] - resp.s11[i]), 1e-11);
        EXPECT_LT(std::abs(back.s21[i] - resp.s21[i]), 1e-11);
    }
    EXPECT_THROW(parse_response_csv("freq,s11\n"), ParseError);
}

TEST(MaterialCsv, RoundTripAndErrors) {
    const MaterialModel mat({{1e9, 2.0, 1.0, 3.0}, {2e9, 2.5, 1.1, 4.0}});
    const auto back = parse_material_csv(export_csv(mat));
    EXPECT_EQ(back.samples(), mat.samples());
    try {
        parse_material_csv("f_hz,eps_rel,mu_rel,alpha_np_per_m\n1e9,0.5,1,0\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse_material_csv("f_hz,eps_rel,mu_rel,alpha_np_per_m\n"), ParseError);
    EXPECT_THROW(parse_material_csv("f_hz,eps_rel,mu_rel,alpha_np_per_m\n1e9,2,1\n"), ParseError);
}
