#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "coaxfilt/errors.hpp"
#include "coaxfilt/material.hpp"
#include "coaxfilt/synthesis.hpp"
#include "coaxfilt/touchstone.hpp"
#include "coaxfilt/txline.hpp"

namespace coaxfilt {

struct GridSpec {
    double f_start_hz = 10e6;
    double f_stop_hz = 20e9;
    std::size_t n_points = 2001;

    FrequencyGrid build() const { return FrequencyGrid::linear(f_start_hz, f_stop_hz, n_points); }
};

/**
 * A filter design document (JSON).
 *
 *   {
 *     "geometry": {"length_m": 0.042, "inner_d_m": 0.0051, "outer_d_m": 0.008},
 *     "material": {"samples": [{"f_hz": 1e9, "eps_rel": 4, "mu_rel": 1, "alpha_np_per_m": 2}]},
 *     "z0_ohm": 50,
 *     "grid": {"f_start_hz": 1e7, "f_stop_hz": 2e10, "n_points": 2001, "spacing": "linear"},
 *     "targets": {"reflection_ceiling_db": -20, "band_max_hz": 2e10,
 *                 "slope_target_db_per_ghz": 1, "slope_tolerance_rel": 0.1}
 *   }
 *
 * "material" may instead be {"csv": "path"} relative to the design file.
 * geometry and material are required; everything else has defaults.
 */
struct DesignFile {
    CoaxGeometry geometry;
    MaterialModel material = MaterialModel::uniform(1.0, 1.0, 0.0);
    double z0_ohm = 50.0;
    GridSpec grid;
    ComplianceTargets targets;
};

/// Failure at a named location inside a design document.
class DesignFieldError : public InputError {
public:
    DesignFieldError(const std::string& path, const std::string& what)
        : InputError(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

using Json = nlohmann::json;

inline const Json& require(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object())
        throw DesignFieldError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw DesignFieldError(path.empty() ? key : path + "." + key, "missing required field");
    return *it;
}

inline double number_at(const Json& v, const std::string& path) {
    if (!v.is_number())
        throw DesignFieldError(path, "expected a number");
    return v.get<double>();
}

inline double required_number(const Json& obj, const std::string& key, const std::string& path) {
    return number_at(require(obj, key, path), path.empty() ? key : path + "." + key);
}

inline double optional_number(const Json& obj, const std::string& key, const std::string& path, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    return number_at(*it, path + "." + key);
}

inline void check(bool ok, const std::string& path, const std::string& what) {
    if (!ok)
        throw DesignFieldError(path, what);
}

inline void reject_unknown(const Json& obj, std::initializer_list<std::string_view> known, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool found = false;
        for (auto k : known)
            found = found || it.key() == k;
        if (!found)
            throw DesignFieldError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
    }
}

}  // namespace detail

inline DesignFile parse_design(std::string_view text, const std::filesystem::path& base_dir = {}) {
    using detail::check;
    detail::Json root;
    try {
        root = detail::Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("design file is not valid JSON: ") + e.what());
    }
    check(root.is_object(), "<root>", "expected an object");
    detail::reject_unknown(root, {"geometry", "material", "z0_ohm", "grid", "targets"}, "");

    DesignFile design;

    const auto& g = detail::require(root, "geometry", "");
    check(g.is_object(), "geometry", "expected an object");
    detail::reject_unknown(g, {"length_m", "inner_d_m", "outer_d_m"}, "geometry");
    design.geometry.length_m = detail::required_number(g, "length_m", "geometry");
    design.geometry.inner_d_m = detail::required_number(g, "inner_d_m", "geometry");
    design.geometry.outer_d_m = detail::required_number(g, "outer_d_m", "geometry");
    check(design.geometry.length_m >= 0.0, "geometry.length_m", "must be >= 0");
    check(design.geometry.inner_d_m > 0.0, "geometry.inner_d_m", "must be > 0");
    check(design.geometry.outer_d_m > design.geometry.inner_d_m, "geometry.outer_d_m",
          "must exceed geometry.inner_d_m");

    const auto& m = detail::require(root, "material", "");
    check(m.is_object(), "material", "expected an object");
    detail::reject_unknown(m, {"samples", "csv"}, "material");
    const bool has_samples = m.contains("samples");
    const bool has_csv = m.contains("csv");
    check(has_samples != has_csv, "material", "needs exactly one of 'samples' or 'csv'");
    if (has_csv) {
        check(m["csv"].is_string(), "material.csv", "expected a path string");
        const std::filesystem::path p = base_dir / m["csv"].get<std::string>();
        try {
            design.material = parse_material_csv(read_text_file(p));
        } catch (const InputError& e) {
            throw DesignFieldError("material.csv", e.what());
        }
    } else {
        const auto& arr = m["samples"];
        check(arr.is_array() && !arr.empty(), "material.samples", "expected a non-empty array");
        std::vector<MaterialSample> samples;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "material.samples[" + std::to_string(i) + "]";
            const auto& s = arr[i];
            check(s.is_object(), path, "expected an object");
            detail::reject_unknown(s, {"f_hz", "eps_rel", "mu_rel", "alpha_np_per_m"}, path);
            MaterialSample ms{detail::required_number(s, "f_hz", path), detail::required_number(s, "eps_rel", path),
                              detail::required_number(s, "mu_rel", path),
                              detail::required_number(s, "alpha_np_per_m", path)};
            check(ms.f_hz > 0.0, path + ".f_hz", "must be > 0");
            check(ms.eps_rel >= 1.0, path + ".eps_rel", "must be >= 1");
            check(ms.mu_rel > 0.0, path + ".mu_rel", "must be > 0");
            check(ms.alpha_np_per_m >= 0.0, path + ".alpha_np_per_m", "must be >= 0");
            check(samples.empty() || ms.f_hz > samples.back().f_hz, path + ".f_hz",
                  "frequencies must be strictly increasing");
            samples.push_back(ms);
        }
        design.material = MaterialModel(std::move(samples));
    }

    design.z0_ohm = detail::optional_number(root, "z0_ohm", "", 50.0);
    check(design.z0_ohm > 0.0, "z0_ohm", "must be > 0");

    if (auto it = root.find("grid"); it != root.end()) {
        const auto& gr = *it;
        check(gr.is_object(), "grid", "expected an object");
        detail::reject_unknown(gr, {"f_start_hz", "f_stop_hz", "n_points", "spacing"}, "grid");
        design.grid.f_start_hz = detail::optional_number(gr, "f_start_hz", "grid", design.grid.f_start_hz);
        design.grid.f_stop_hz = detail::optional_number(gr, "f_stop_hz", "grid", design.grid.f_stop_hz);
        if (auto n = gr.find("n_points"); n != gr.end()) {
            check(n->is_number_integer() && n->get<long long>() >= 1, "grid.n_points",
                  "must be a positive integer");
            design.grid.n_points = n->get<std::size_t>();
        }
        if (auto sp = gr.find("spacing"); sp != gr.end())
            check(sp->is_string() && sp->get<std::string>() == "linear", "grid.spacing", "only 'linear' is supported");
    }
    check(design.grid.f_start_hz > 0.0, "grid.f_start_hz", "must be > 0 (DC is excluded)");
    check(design.grid.n_points == 1 || design.grid.f_stop_hz > design.grid.f_start_hz, "grid.f_stop_hz",
          "must exceed grid.f_start_hz");

    if (auto it = root.find("targets"); it != root.end()) {
        const auto& t = *it;
        check(t.is_object(), "targets", "expected an object");
        detail::reject_unknown(
            t, {"reflection_ceiling_db", "band_max_hz", "slope_target_db_per_ghz", "slope_tolerance_rel"}, "targets");
        auto& tg = design.targets;
        tg.reflection_ceiling_db = detail::optional_number(t, "reflection_ceiling_db", "targets", tg.reflection_ceiling_db);
        tg.band_max_hz = detail::optional_number(t, "band_max_hz", "targets", tg.band_max_hz);
        tg.slope_target_db_per_ghz =
            detail::optional_number(t, "slope_target_db_per_ghz", "targets", tg.slope_target_db_per_ghz);
        tg.slope_tolerance_rel = detail::optional_number(t, "slope_tolerance_rel", "targets", tg.slope_tolerance_rel);
        check(tg.reflection_ceiling_db < 0.0, "targets.reflection_ceiling_db", "must be < 0");
        check(tg.band_max_hz > 0.0, "targets.band_max_hz", "must be > 0");
        check(tg.slope_target_db_per_ghz >= 0.0, "targets.slope_target_db_per_ghz", "must be >= 0");
        check(tg.slope_tolerance_rel >= 0.0, "targets.slope_tolerance_rel", "must be >= 0");
    }
    return design;
}

inline DesignFile load_design(const std::filesystem::path& path) {
    return parse_design(read_text_file(path), path.parent_path());
}

}  // namespace coaxfilt
