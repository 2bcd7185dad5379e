/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/io/cli.hpp
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

#ifndef WLFIT_IO_CLI_HPP
#define WLFIT_IO_CLI_HPP

#include "wlfit/core/error.hpp"
#include "wlfit/fitting/fit.hpp"
#include "wlfit/io/model_io.hpp"
#include "wlfit/io/obj.hpp"
#include "wlfit/io/pts.hpp"
#include "wlfit/io/report.hpp"
#include "wlfit/metrics/benchmark.hpp"
#include "wlfit/metrics/mem.hpp"
#include "wlfit/model/synthetic.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace wlfit {
namespace io {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;

/// Shortest round-trip decimal form, always with a decimal point or exponent ("0.0", "6.0827...").
inline std::string format_number(double v)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eEn") == std::string::npos)
    {
        s += ".0";
    }
    return s;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
    {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out)
    {
        throw std::runtime_error("failed writing " + path.string());
    }
}

struct FitOptions
{
    double xi1 = 3.0;
    double xi2 = 3.5;
    double lambda_id = 1.0;
    double lambda_exp = 1.0;
    int max_iter = 50;
    double tau = 0.5;
    bool no_weighting = false;
    bool contour = false;

    void add_to(CLI::App& cmd)
    {
        cmd.add_flag("--no-weighting", no_weighting, "Disable landmark weighting (unweighted baseline)");
        cmd.add_option("--xi1", xi1, "Weight offset xi1")->capture_default_str();
        cmd.add_option("--xi2", xi2, "Weight divisor xi2")->capture_default_str();
        cmd.add_option("--lambda-id", lambda_id, "Identity regularisation")->capture_default_str();
        cmd.add_option("--lambda-exp", lambda_exp, "Expression regularisation")->capture_default_str();
        cmd.add_option("--max-iter", max_iter, "Maximum iterations")->capture_default_str();
        cmd.add_option("--tau", tau, "Stop when the landmark error (px) is below this")->capture_default_str();
        cmd.add_flag("--contour-recorrespond", contour, "Re-select jaw-contour vertices each iteration");
    }

    fitting::FitConfig config() const
    {
        fitting::FitConfig c;
        c.xi1 = xi1;
        c.xi2 = xi2;
        c.lambda_id = lambda_id;
        c.lambda_exp = lambda_exp;
        c.max_iterations = max_iter;
        c.tau = tau;
        c.weighting_enabled = !no_weighting;
        c.contour_recorrespond_enabled = contour;
        fitting::validate(c);
        return c;
    }
};

} // namespace detail

/**
 * Command-line entry point. Subcommands: synth-model, synth-scene, fit,
 * bench, eval. Returns 0 on success, 1 on usage errors (unknown flags, bad
 * option values), 2 on data or numeric errors.
 */
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Residual-weighted 3D morphable model landmark fitting", "wlfit"};
    app.require_subcommand(1);

    // synth-model
    model::SynthModelSpec model_spec;
    std::string model_out;
    std::uint64_t model_seed = 0;
    auto* synth_model_cmd = app.add_subcommand("synth-model", "Generate a synthetic morphable model");
    synth_model_cmd->add_option("--out", model_out, "Output model file (M3DM)")->required();
    synth_model_cmd->add_option("--n-vertices", model_spec.n_vertices, "Vertex count")->capture_default_str();
    synth_model_cmd->add_option("--m-id", model_spec.m_id, "Identity basis size")->capture_default_str();
    synth_model_cmd->add_option("--k-exp", model_spec.k_exp, "Expression basis size")->capture_default_str();
    synth_model_cmd->add_option("--landmarks", model_spec.n_landmarks, "Landmark count")->capture_default_str();
    synth_model_cmd->add_option("--smoothness", model_spec.smoothness, "Deformation bump width")->capture_default_str();
    synth_model_cmd->add_option("--seed", model_seed, "Random seed")->capture_default_str();

    // synth-scene
    std::string scene_model, scene_pts, scene_truth, scene_noise = "none";
    std::uint64_t scene_seed = 0;
    model::PoseSpec pose_spec;
    auto* synth_scene_cmd = app.add_subcommand("synth-scene", "Sample a synthetic scene from a model");
    synth_scene_cmd->add_option("--model", scene_model, "Model file")->required();
    synth_scene_cmd->add_option("--out-pts", scene_pts, "Observed (noisy) landmarks, .pts")->required();
    synth_scene_cmd->add_option("--out-truth", scene_truth, "Clean landmarks, .pts")->required();
    synth_scene_cmd->add_option("--yaw", pose_spec.yaw_degrees, "Yaw in degrees")->capture_default_str();
    synth_scene_cmd->add_option("--pitch", pose_spec.pitch_degrees, "Pitch in degrees")->capture_default_str();
    synth_scene_cmd->add_option("--roll", pose_spec.roll_degrees, "Roll in degrees")->capture_default_str();
    synth_scene_cmd->add_option("--scale", pose_spec.scale, "Camera scale")->capture_default_str();
    synth_scene_cmd->add_option("--noise", scene_noise, "none | gauss:s | hetero:a,b | outlier:p,r1,r2")
        ->capture_default_str();
    synth_scene_cmd->add_option("--seed", scene_seed, "Random seed")->capture_default_str();

    // fit
    std::string fit_model, fit_pts, fit_report, fit_obj, fit_out_pts;
    detail::FitOptions fit_opts;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a model to 2D landmarks");
    fit_cmd->add_option("--model", fit_model, "Model file")->required();
    fit_cmd->add_option("--pts", fit_pts, "Observed landmarks, .pts")->required();
    fit_cmd->add_option("--out-report", fit_report, "JSON fit report")->required();
    fit_cmd->add_option("--out-obj", fit_obj, "Fitted mesh, OBJ")->required();
    fit_cmd->add_option("--out-pts", fit_out_pts, "Fitted landmark projections, .pts");
    fit_opts.add_to(*fit_cmd);

    // bench
    std::string bench_model, bench_report, bench_scatter, bench_noise = "none";
    int bench_scenes = 100;
    std::vector<double> bench_bins{-45, -30, -15, 0, 15, 30, 45};
    std::uint64_t bench_seed = 0;
    unsigned bench_threads = 0;
    detail::FitOptions bench_opts;
    auto* bench_cmd = app.add_subcommand("bench", "Weighted vs unweighted comparison on synthetic scenes");
    bench_cmd->add_option("--model", bench_model, "Model file")->required();
    bench_cmd->add_option("--scenes", bench_scenes, "Scenes per yaw bin")->capture_default_str();
    bench_cmd->add_option("--yaw-bins", bench_bins, "Yaw bins in degrees")->capture_default_str();
    bench_cmd->add_option("--noise", bench_noise, "none | gauss:s | hetero:a,b | outlier:p,r1,r2")
        ->capture_default_str();
    bench_cmd->add_option("--out-report", bench_report, "JSON benchmark report")->required();
    bench_cmd->add_option("--out-scatter", bench_scatter, "Residual scatter table, CSV");
    bench_cmd->add_option("--seed", bench_seed, "Random seed")->capture_default_str();
    bench_cmd->add_option("--threads", bench_threads, "Worker threads (0 = all cores)")->capture_default_str();
    bench_opts.add_to(*bench_cmd);

    // eval
    std::string eval_truth, eval_est;
    auto* eval_cmd = app.add_subcommand("eval", "Print the MEM between two landmark files");
    eval_cmd->add_option("--truth-pts", eval_truth, "Ground-truth landmarks, .pts")->required();
    eval_cmd->add_option("--est-pts", eval_est, "Estimated landmarks, .pts")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_usage;
    }

    try
    {
        if (*synth_model_cmd)
        {
            write_model(model::synth_model(model_spec, model_seed), model_out);
        }
        else if (*synth_scene_cmd)
        {
            const auto noise = parse_noise_spec(scene_noise);
            const auto m = read_model(scene_model);
            const auto scene = model::synth_scene(m, scene_seed, noise, pose_spec);
            write_pts(scene_pts, scene.noisy_landmarks_2d);
            write_pts(scene_truth, scene.clean_landmarks_2d);
        }
        else if (*fit_cmd)
        {
            const auto config = fit_opts.config();
            const auto m = read_model(fit_model);
            const auto observed = read_pts(fit_pts);
            const auto result = fitting::fit(m, observed, config);
            detail::write_text(fit_report, serialize(make_fit_report(result, config, observed)));
            write_obj(fit_obj, model::instantiate_shape(m, result.coeffs), m.triangles);
            if (!fit_out_pts.empty())
            {
                write_pts(fit_out_pts, result.projected_landmarks);
            }
        }
        else if (*bench_cmd)
        {
            metrics::BenchSpec spec;
            spec.n_scenes = bench_scenes;
            spec.yaw_bins = bench_bins;
            spec.noise = parse_noise_spec(bench_noise);
            spec.seed = bench_seed;
            spec.threads = bench_threads;
            spec.config_weighted = bench_opts.config();
            spec.config_weighted.weighting_enabled = true;
            spec.config_baseline = spec.config_weighted;
            spec.config_baseline.weighting_enabled = false;
            const auto m = read_model(bench_model);
            const auto report = metrics::run_benchmark(m, spec);
            detail::write_text(bench_report, to_json(report, spec).dump(2) + "\n");
            if (!bench_scatter.empty())
            {
                std::ofstream csv(bench_scatter, std::ios::trunc);
                if (!csv)
                {
                    throw std::runtime_error("cannot open " + bench_scatter + " for writing");
                }
                format_residual_csv(csv, {{"weighted", report.residual_scatter_weighted},
                                          {"baseline", report.residual_scatter_baseline}});
            }
            for (const auto& b : report.per_bin)
            {
                out << "yaw " << format_number(b.yaw_degrees) << ": MEM weighted " << format_number(b.mem_weighted)
                    << ", baseline " << format_number(b.mem_baseline) << ", improvement "
                    << format_number(b.improvement_percent) << "%\n";
            }
        }
        else if (*eval_cmd)
        {
            const auto truth = read_pts(eval_truth);
            const auto est = read_pts(eval_est);
            out << format_number(metrics::mem(truth, est)) << "\n";
        }
    }
    catch (const ConfigError& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_data;
    }
    return exit_ok;
}

} // namespace io
} // namespace wlfit

#endif /* WLFIT_IO_CLI_HPP */
