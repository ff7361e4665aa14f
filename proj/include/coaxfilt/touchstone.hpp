#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coaxfilt/errors.hpp"
#include "coaxfilt/material.hpp"
#include "coaxfilt/txline.hpp"
#include "coaxfilt/units.hpp"

namespace coaxfilt {

/// Four-parameter two-port as read from an instrument file.
struct RawTwoPort {
    FrequencyGrid grid;
    std::vector<Complex> s11, s21, s12, s22;
    double z0_ohm = 50.0;

    std::size_t size() const noexcept { return grid.size(); }

    void validate() const {
        const std::size_t n = grid.size();
        if (s11.size() != n || s21.size() != n || s12.size() != n || s22.size() != n)
            throw InputError("two-port arrays do not match grid length");
        if (!(z0_ohm > 0.0))
            throw InputError("reference impedance must be positive");
    }
};

enum class FreqUnit { Hz, KHz, MHz, GHz };
enum class DataFormat { RI, MA, DB };

inline double unit_scale(FreqUnit u) noexcept {
    switch (u) {
    case FreqUnit::Hz: return 1.0;
    case FreqUnit::KHz: return 1e3;
    case FreqUnit::MHz: return 1e6;
    case FreqUnit::GHz: return 1e9;
    }
    return 1.0;
}

inline const char* unit_name(FreqUnit u) noexcept {
    switch (u) {
    case FreqUnit::Hz: return "HZ";
    case FreqUnit::KHz: return "KHZ";
    case FreqUnit::MHz: return "MHZ";
    case FreqUnit::GHz: return "GHZ";
    }
    return "HZ";
}

inline const char* format_name(DataFormat f) noexcept {
    switch (f) {
    case DataFormat::RI: return "RI";
    case DataFormat::MA: return "MA";
    case DataFormat::DB: return "DB";
    }
    return "RI";
}

inline std::string to_upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    return out;
}

inline std::optional<FreqUnit> parse_unit(std::string_view token) {
    const std::string u = to_upper(token);
    if (u == "HZ") return FreqUnit::Hz;
    if (u == "KHZ") return FreqUnit::KHz;
    if (u == "MHZ") return FreqUnit::MHz;
    if (u == "GHZ") return FreqUnit::GHz;
    return std::nullopt;
}

inline std::optional<DataFormat> parse_format(std::string_view token) {
    const std::string u = to_upper(token);
    if (u == "RI") return DataFormat::RI;
    if (u == "MA") return DataFormat::MA;
    if (u == "DB") return DataFormat::DB;
    return std::nullopt;
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        if (i > start)
            out.push_back(line.substr(start, i - start));
    }
    return out;
}

inline std::vector<std::string_view> split_char(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

/// Splits text into lines, dropping '\r'. Line i of the result is file line i + 1.
inline std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        out.push_back(line);
        start = end + 1;
    }
    return out;
}

inline double parse_number(std::string_view token, std::size_t line_no) {
    std::string_view t = token;
    if (!t.empty() && t.front() == '+')
        t.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(value))
        throw ParseError(line_no, "cannot parse number '" + std::string(token) + "'");
    return value;
}

inline std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline Complex decode_pair(double x, double y, DataFormat fmt) {
    switch (fmt) {
    case DataFormat::RI: return {x, y};
    case DataFormat::MA: return std::polar(x, deg_to_rad(y));
    case DataFormat::DB: return std::polar(std::pow(10.0, x / 20.0), deg_to_rad(y));
    }
    return {x, y};
}

inline std::pair<double, double> encode_pair(Complex s, DataFormat fmt) {
    switch (fmt) {
    case DataFormat::RI: return {s.real(), s.imag()};
    case DataFormat::MA: return {std::abs(s), rad_to_deg(std::arg(s))};
    case DataFormat::DB: return {magnitude_db(s), rad_to_deg(std::arg(s))};
    }
    return {s.real(), s.imag()};
}

struct OptionLine {
    FreqUnit unit = FreqUnit::GHz;
    DataFormat format = DataFormat::MA;
    double z0_ohm = 50.0;
};

inline OptionLine parse_option_line(std::string_view body, std::size_t line_no) {
    OptionLine opt;
    const auto tokens = split_ws(body);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string tok = to_upper(tokens[i]);
        if (auto u = parse_unit(tok)) {
            opt.unit = *u;
        } else if (auto f = parse_format(tok)) {
            opt.format = *f;
        } else if (tok == "S") {
            // only scattering parameters are supported
        } else if (tok == "Y" || tok == "Z" || tok == "H" || tok == "G") {
            throw ParseError(line_no, "unsupported parameter type '" + std::string(tokens[i]) +
                                          "', only S is accepted");
        } else if (tok == "R") {
            if (i + 1 >= tokens.size())
                throw ParseError(line_no, "option 'R' needs a reference impedance value");
            opt.z0_ohm = parse_number(tokens[++i], line_no);
            if (!(opt.z0_ohm > 0.0))
                throw ParseError(line_no, "reference impedance must be positive");
        } else {
            throw ParseError(line_no, "unknown option token '" + std::string(tokens[i]) + "'");
        }
    }
    return opt;
}

}  // namespace detail

/**
 * Parses a Touchstone v1 two-port file.
 *
 * Comments start with '!' (also trailing). Exactly one '#' option line must precede
 * the data; defaults are GHZ, MA, R 50. Each data line carries frequency followed by
 * S11 S21 S12 S22 as number pairs. Angles are in degrees.
 */
inline RawTwoPort parse_s2p(std::string_view text) {
    const auto lines = detail::lines_of(text);
    std::optional<detail::OptionLine> opt;
    std::vector<double> freqs;
    RawTwoPort raw;

    for (std::size_t idx = 0; idx < lines.size(); ++idx) {
        const std::size_t line_no = idx + 1;
        std::string_view line = lines[idx];
        if (const auto bang = line.find('!'); bang != std::string_view::npos)
            line = line.substr(0, bang);
        line = detail::trim(line);
        if (line.empty())
            continue;

        if (line.front() == '#') {
            if (opt)
                throw ParseError(line_no, "duplicate option line");
            if (!freqs.empty())
                throw ParseError(line_no, "option line after data");
            opt = detail::parse_option_line(line.substr(1), line_no);
            continue;
        }
        if (line.front() == '[')
            throw ParseError(line_no, "Touchstone v2 keyword not supported");
        if (!opt)
            throw ParseError(line_no, "missing option line before data");

        const auto tokens = detail::split_ws(line);
        if (tokens.size() != 9)
            throw ParseError(line_no, "expected 9 values on a two-port data line, found " +
                                          std::to_string(tokens.size()));
        double v[9];
        for (std::size_t k = 0; k < 9; ++k)
            v[k] = detail::parse_number(tokens[k], line_no);
        const double f = v[0] * unit_scale(opt->unit);
        if (!(f > 0.0))
            throw ParseError(line_no, "frequency must be positive");
        if (!freqs.empty() && !(f > freqs.back()))
            throw ParseError(line_no, "frequencies must be strictly increasing");
        freqs.push_back(f);
        raw.s11.push_back(detail::decode_pair(v[1], v[2], opt->format));
        raw.s21.push_back(detail::decode_pair(v[3], v[4], opt->format));
        raw.s12.push_back(detail::decode_pair(v[5], v[6], opt->format));
        raw.s22.push_back(detail::decode_pair(v[7], v[8], opt->format));
    }
    if (!opt)
        throw ParseError(lines.empty() ? 1 : lines.size(), "missing option line");
    raw.grid = FrequencyGrid(std::move(freqs));
    raw.z0_ohm = opt->z0_ohm;
    return raw;
}

/// Touchstone v1 text with 12 significant digits per value.
inline std::string write_s2p(const RawTwoPort& raw, FreqUnit unit = FreqUnit::GHz,
                             DataFormat format = DataFormat::RI) {
    raw.validate();
    std::string out = "! two-port S-parameters\n";
    out += "# ";
    out += unit_name(unit);
    out += " S ";
    out += format_name(format);
    out += " R " + detail::fmt12(raw.z0_ohm) + "\n";
    const double scale = unit_scale(unit);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out += detail::fmt12(raw.grid[i] / scale);
        for (const auto* s : {&raw.s11, &raw.s21, &raw.s12, &raw.s22}) {
            const auto [x, y] = detail::encode_pair((*s)[i], format);
            out += ' ' + detail::fmt12(x) + ' ' + detail::fmt12(y);
        }
        out += '\n';
    }
    return out;
}

/// Symmetric response expanded to four parameters.
inline RawTwoPort to_raw(const TwoPortResponse& resp) {
    resp.validate();
    return {resp.grid, resp.s11, resp.s21, resp.s21, resp.s11, resp.z0_ohm};
}

struct SymmetrizedResponse {
    TwoPortResponse response;
    double asymmetry_max = 0.0;
};

/// Averages S11/S22 and S21/S12; reports the largest per-point disagreement.
inline SymmetrizedResponse symmetrize(const RawTwoPort& raw) {
    raw.validate();
    SymmetrizedResponse out{{raw.grid, {}, {}, raw.z0_ohm}, 0.0};
    out.response.s11.reserve(raw.size());
    out.response.s21.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out.response.s11.push_back(0.5 * (raw.s11[i] + raw.s22[i]));
        out.response.s21.push_back(0.5 * (raw.s21[i] + raw.s12[i]));
        out.asymmetry_max = std::max({out.asymmetry_max, std::abs(raw.s11[i] - raw.s22[i]),
                                      std::abs(raw.s21[i] - raw.s12[i])});
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kResponseCsvHeader = "freq_hz,s11_re,s11_im,s21_re,s21_im,s11_db,s21_db";
inline constexpr std::string_view kMaterialCsvHeader = "f_hz,eps_rel,mu_rel,alpha_np_per_m";

inline std::string export_csv(const TwoPortResponse& resp) {
    resp.validate();
    std::string out(kResponseCsvHeader);
    out += '\n';
    for (std::size_t i = 0; i < resp.size(); ++i) {
        const Complex s11 = resp.s11[i];
        const Complex s21 = resp.s21[i];
        for (double v : {resp.grid[i], s11.real(), s11.imag(), s21.real(), s21.imag()}) {
            out += detail::fmt12(v);
            out += ',';
        }
        out += detail::fmt12(magnitude_db(s11)) + ',' + detail::fmt12(magnitude_db(s21)) + '\n';
    }
    return out;
}

inline std::string export_csv(const MaterialModel& mat) {
    std::string out(kMaterialCsvHeader);
    out += '\n';
    for (const auto& s : mat.samples())
        out += detail::fmt12(s.f_hz) + ',' + detail::fmt12(s.eps_rel) + ',' + detail::fmt12(s.mu_rel) + ',' +
               detail::fmt12(s.alpha_np_per_m) + '\n';
    return out;
}

namespace detail {

/// Rows of a comma-separated table with a fixed header; returns (line number, values).
inline std::vector<std::pair<std::size_t, std::vector<double>>> parse_csv_table(std::string_view text,
                                                                              std::string_view header) {
    const auto lines = lines_of(text);
    std::vector<std::pair<std::size_t, std::vector<double>>> rows;
    bool have_header = false;
    const std::size_t ncols = split_char(header, ',').size();
    for (std::size_t idx = 0; idx < lines.size(); ++idx) {
        const std::size_t line_no = idx + 1;
        const std::string_view line = trim(lines[idx]);
        if (line.empty())
            continue;
        if (!have_header) {
            if (line != header)
                throw ParseError(line_no, "expected CSV header '" + std::string(header) + "'");
            have_header = true;
            continue;
        }
        const auto cells = split_char(line, ',');
        if (cells.size() != ncols)
            throw ParseError(line_no, "expected " + std::to_string(ncols) + " columns, found " +
                                          std::to_string(cells.size()));
        std::vector<double> values;
        values.reserve(ncols);
        for (auto cell : cells)
            values.push_back(parse_number(trim(cell), line_no));
        rows.emplace_back(line_no, std::move(values));
    }
    if (!have_header)
        throw ParseError(1, "missing CSV header '" + std::string(header) + "'");
    return rows;
}

}  // namespace detail

/// Reads a response CSV written by export_csv. The dB columns are ignored.
inline TwoPortResponse parse_response_csv(std::string_view text, double z0_ohm = 50.0) {
    const auto rows = detail::parse_csv_table(text, kResponseCsvHeader);
    std::vector<double> freqs;
    TwoPortResponse resp;
    resp.z0_ohm = z0_ohm;
    for (const auto& [line_no, v] : rows) {
        if (!(v[0] > 0.0))
            throw ParseError(line_no, "frequency must be positive");
        if (!freqs.empty() && !(v[0] > freqs.back()))
            throw ParseError(line_no, "frequencies must be strictly increasing");
        freqs.push_back(v[0]);
        resp.s11.emplace_back(v[1], v[2]);
        resp.s21.emplace_back(v[3], v[4]);
    }
    resp.grid = FrequencyGrid(std::move(freqs));
    return resp;
}

inline MaterialModel parse_material_csv(std::string_view text) {
    const auto rows = detail::parse_csv_table(text, kMaterialCsvHeader);
    if (rows.empty())
        throw ParseError(2, "material CSV has no samples");
    std::vector<MaterialSample> samples;
    for (const auto& [line_no, v] : rows) {
        MaterialSample s{v[0], v[1], v[2], v[3]};
        try {
            validate(s);
        } catch (const InputError& e) {
            throw ParseError(line_no, e.what());
        }
        if (!samples.empty() && !(s.f_hz > samples.back().f_hz))
            throw ParseError(line_no, "frequencies must be strictly increasing");
        samples.push_back(s);
    }
    return MaterialModel(std::move(samples));
}

}  // namespace coaxfilt
