/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/io/report.hpp
 *
 * Copyright 2026 The wlfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#ifndef WLFIT_IO_REPORT_HPP
#define WLFIT_IO_REPORT_HPP

#include "wlfit/camera/pose.hpp"
#include "wlfit/core/error.hpp"
#include "wlfit/fitting/fit.hpp"
#include "wlfit/metrics/benchmark.hpp"
#include "wlfit/metrics/mem.hpp"
#include "wlfit/model/synthetic.hpp"

#include "Eigen/Core"
#include "json.hpp"

#include <charconv>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wlfit {
namespace io {

using Json = nlohmann::ordered_json;

/// Everything a single fit produces, in the shape written to JSON.
struct FitReport
{
    double scale = 0.0;
    std::array<double, 9> rotation{}; ///< row-major
    std::array<double, 3> translation{};
    std::array<double, 3> euler_degrees{}; ///< pitch, yaw, roll
    std::vector<double> alpha_id;
    std::vector<double> alpha_exp;
    std::vector<double> residuals; ///< observed - projected, 2L
    std::vector<double> error_trace;
    fitting::FitConfig config;
    double mem = 0.0; ///< against the observed landmarks
    int iterations_run = 0;
    bool converged = false;

    bool operator==(const FitReport&) const = default;
};

namespace detail {

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline Eigen::VectorXd to_eigen(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace detail

inline FitReport make_fit_report(const fitting::FitResult& result, const fitting::FitConfig& config,
                                 const Eigen::VectorXd& observed2d)
{
    FitReport r;
    r.scale = result.pose.scale;
    for (int i = 0; i < 3; ++i)
    {
        for (int j = 0; j < 3; ++j)
        {
            r.rotation[3 * i + j] = result.pose.rotation(i, j);
        }
        r.translation[i] = result.pose.translation(i);
    }
    const auto e = camera::rotation_to_euler(result.pose.rotation);
    r.euler_degrees = {model::radians_to_degrees(e.pitch), model::radians_to_degrees(e.yaw),
                       model::radians_to_degrees(e.roll)};
    r.alpha_id = detail::to_std(result.coeffs.alpha_id);
    r.alpha_exp = detail::to_std(result.coeffs.alpha_exp);
    r.residuals = detail::to_std(result.per_landmark_residuals);
    r.error_trace = result.error_trace;
    r.config = config;
    r.mem = metrics::mem(observed2d, result.projected_landmarks);
    r.iterations_run = result.iterations_run;
    r.converged = result.converged;
    return r;
}

inline Json config_to_json(const fitting::FitConfig& c)
{
    return Json{{"xi1", c.xi1},
                {"xi2", c.xi2},
                {"lambda_id", c.lambda_id},
                {"lambda_exp", c.lambda_exp},
                {"max_iterations", c.max_iterations},
                {"tau", c.tau},
                {"min_rel_improvement", c.min_rel_improvement},
                {"weighting_enabled", c.weighting_enabled},
                {"contour_recorrespond_enabled", c.contour_recorrespond_enabled}};
}

inline fitting::FitConfig config_from_json(const Json& j)
{
    fitting::FitConfig c;
    c.xi1 = j.at("xi1").get<double>();
    c.xi2 = j.at("xi2").get<double>();
    c.lambda_id = j.at("lambda_id").get<double>();
    c.lambda_exp = j.at("lambda_exp").get<double>();
    c.max_iterations = j.at("max_iterations").get<int>();
    c.tau = j.at("tau").get<double>();
    c.min_rel_improvement = j.at("min_rel_improvement").get<double>();
    c.weighting_enabled = j.at("weighting_enabled").get<bool>();
    c.contour_recorrespond_enabled = j.at("contour_recorrespond_enabled").get<bool>();
    fitting::validate(c);
    return c;
}

inline Json to_json(const FitReport& r)
{
    return Json{{"pose",
                 {{"f", r.scale},
                  {"R", r.rotation},
                  {"t3d", r.translation},
                  {"euler_degrees",
                   {{"pitch", r.euler_degrees[0]}, {"yaw", r.euler_degrees[1]}, {"roll", r.euler_degrees[2]}}}}},
                {"alpha_id", r.alpha_id},
                {"alpha_exp", r.alpha_exp},
                {"residuals", r.residuals},
                {"error_trace", r.error_trace},
                {"config", config_to_json(r.config)},
                {"mem", r.mem},
                {"iterations_run", r.iterations_run},
                {"converged", r.converged}};
}

/// Parses the JSON produced by to_json(FitReport). Throws FormatError on missing or mistyped fields.
inline FitReport fit_report_from_json(const Json& j)
{
    try
    {
        FitReport r;
        const auto& pose = j.at("pose");
        r.scale = pose.at("f").get<double>();
        r.rotation = pose.at("R").get<std::array<double, 9>>();
        r.translation = pose.at("t3d").get<std::array<double, 3>>();
        const auto& e = pose.at("euler_degrees");
        r.euler_degrees = {e.at("pitch").get<double>(), e.at("yaw").get<double>(), e.at("roll").get<double>()};
        r.alpha_id = j.at("alpha_id").get<std::vector<double>>();
        r.alpha_exp = j.at("alpha_exp").get<std::vector<double>>();
        r.residuals = j.at("residuals").get<std::vector<double>>();
        r.error_trace = j.at("error_trace").get<std::vector<double>>();
        r.config = config_from_json(j.at("config"));
        r.mem = j.at("mem").get<double>();
        r.iterations_run = j.at("iterations_run").get<int>();
        r.converged = j.at("converged").get<bool>();
        return r;
    }
    catch (const Json::exception& e)
    {
        throw FormatError::at_line(0, std::string("fit report: ") + e.what());
    }
    catch (const ConfigError& e)
    {
        throw FormatError::at_line(0, std::string("fit report: ") + e.what());
    }
}

inline std::string serialize(const FitReport& r) { return to_json(r).dump(2) + "\n"; }

inline FitReport parse_fit_report(std::string_view text)
{
    Json j;
    try
    {
        j = Json::parse(text);
    }
    catch (const Json::parse_error& e)
    {
        throw FormatError::at_offset(e.byte, std::string("fit report: ") + e.what());
    }
    return fit_report_from_json(j);
}

/// Text form of a noise spec: none | gauss:s | hetero:a,b | outlier:p,r1,r2.
inline std::string format_noise_spec(const model::NoiseSpec& noise)
{
    const auto num = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    };
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, model::NoiseNone>)
                return "none";
            else if constexpr (std::is_same_v<T, model::NoiseGaussian>)
                return "gauss:" + num(n.sigma);
            else if constexpr (std::is_same_v<T, model::NoiseHeteroscedastic>)
                return "hetero:" + num(n.sigma_min) + "," + num(n.sigma_max);
            else
                return "outlier:" + num(n.fraction) + "," + num(n.radius_min) + "," + num(n.radius_max);
        },
        noise);
}

/// Inverse of format_noise_spec. Throws ConfigError on malformed text or invalid parameters.
inline model::NoiseSpec parse_noise_spec(std::string_view text)
{
    const auto colon = text.find(':');
    const std::string_view kind = text.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string_view::npos)
    {
        std::string_view rest = text.substr(colon + 1);
        while (true)
        {
            const auto comma = rest.find(',');
            const auto token = rest.substr(0, comma);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (token.empty() || ec != std::errc() || ptr != token.data() + token.size())
            {
                throw ConfigError("noise spec: bad number \"" + std::string(token) + "\"");
            }
            params.push_back(v);
            if (comma == std::string_view::npos)
                break;
            rest = rest.substr(comma + 1);
        }
    }
    const auto expect = [&](std::size_t n) {
        if (params.size() != n)
        {
            throw ConfigError("noise spec \"" + std::string(kind) + "\" takes " + std::to_string(n) + " parameter(s)");
        }
    };
    model::NoiseSpec spec;
    if (kind == "none")
    {
        if (colon != std::string_view::npos)
            expect(0);
        spec = model::NoiseNone{};
    }
    else if (kind == "gauss")
    {
        expect(1);
        spec = model::NoiseGaussian{params[0]};
    }
    else if (kind == "hetero")
    {
        expect(2);
        spec = model::NoiseHeteroscedastic{params[0], params[1]};
    }
    else if (kind == "outlier")
    {
        expect(3);
        spec = model::NoiseOutlier{params[0], params[1], params[2]};
    }
    else
    {
        throw ConfigError("noise spec: unknown kind \"" + std::string(kind) + "\"");
    }
    model::validate(spec);
    return spec;
}

inline Json to_json(const metrics::BenchSpec& s)
{
    return Json{{"n_scenes", s.n_scenes},
                {"yaw_bins", s.yaw_bins},
                {"noise", format_noise_spec(s.noise)},
                {"seed", s.seed},
                {"pose_template",
                 {{"pitch_degrees", s.pose_template.pitch_degrees},
                  {"roll_degrees", s.pose_template.roll_degrees},
                  {"scale", s.pose_template.scale},
                  {"angle_jitter_degrees", s.pose_template.angle_jitter_degrees},
                  {"translation_jitter", s.pose_template.translation_jitter}}},
                {"config_weighted", config_to_json(s.config_weighted)},
                {"config_baseline", config_to_json(s.config_baseline)}};
}

/// Benchmark summary: per-bin MEMs, per-scene MEMs and the mean error curves. Residual tables go to CSV.
inline Json to_json(const metrics::BenchReport& r, const metrics::BenchSpec& spec)
{
    Json bins = Json::array();
    for (const auto& b : r.per_bin)
    {
        bins.push_back({{"yaw_degrees", b.yaw_degrees},
                        {"mem_weighted", b.mem_weighted},
                        {"mem_baseline", b.mem_baseline},
                        {"improvement_percent", b.improvement_percent},
                        {"weighted_wins", b.weighted_wins},
                        {"n_scenes", b.n_scenes}});
    }
    Json scenes = Json::array();
    for (const auto& s : r.scenes)
    {
        scenes.push_back({{"bin", s.bin},
                          {"scene", s.scene},
                          {"seed", s.seed},
                          {"mem_weighted", s.mem_weighted},
                          {"mem_baseline", s.mem_baseline},
                          {"iterations_weighted", s.iterations_weighted},
                          {"iterations_baseline", s.iterations_baseline}});
    }
    return Json{{"spec", to_json(spec)},
                {"per_bin", bins},
                {"error_curves", {{"weighted", r.error_curve_weighted}, {"baseline", r.error_curve_baseline}}},
                {"scenes", scenes}};
}

/**
 * Residual scatter as CSV: a header "condition,fit,x0,y0,x1,y1,...", then one
 * row per fit. Values use the shortest round-trip representation.
 */
inline void format_residual_csv(std::ostream& out, const std::vector<std::pair<std::string, metrics::ResidualTable>>& tables)
{
    Eigen::Index columns = 0;
    for (const auto& [name, t] : tables)
    {
        if (columns == 0)
            columns = t.columns;
        wlfit::detail::require_dimension(t.columns == columns, "residual csv: tables have different widths");
    }
    out << "condition,fit";
    for (Eigen::Index c = 0; c < columns; ++c)
    {
        out << ',' << (c % 2 == 0 ? 'x' : 'y') << c / 2;
    }
    out << '\n';
    char buf[32];
    for (const auto& [name, t] : tables)
    {
        for (std::size_t i = 0; i < t.rows.size(); ++i)
        {
            out << name << ',' << i;
            for (Eigen::Index c = 0; c < columns; ++c)
            {
                const auto res = std::to_chars(buf, buf + sizeof(buf), t.rows[i](c));
                out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
            }
            out << '\n';
        }
    }
}

} // namespace io
} // namespace wlfit

#endif /* WLFIT_IO_REPORT_HPP */
