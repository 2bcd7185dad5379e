/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/metrics/benchmark.hpp
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

#ifndef WLFIT_METRICS_BENCHMARK_HPP
#define WLFIT_METRICS_BENCHMARK_HPP

#include "wlfit/core/error.hpp"
#include "wlfit/core/random.hpp"
#include "wlfit/fitting/fit.hpp"
#include "wlfit/metrics/mem.hpp"
#include "wlfit/model/morphable_model.hpp"
#include "wlfit/model/synthetic.hpp"

#include "Eigen/Core"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace wlfit {
namespace metrics {

/**
 * Weighted-vs-baseline comparison on synthetic scenes. For every yaw bin,
 * n_scenes scenes are generated from pose_template (with its yaw replaced by
 * the bin angle) and fitted with both configurations.
 */
struct BenchSpec
{
    int n_scenes = 100;
    std::vector<double> yaw_bins{-45.0, -30.0, -15.0, 0.0, 15.0, 30.0, 45.0};
    model::NoiseSpec noise = model::NoiseNone{};
    model::PoseSpec pose_template{.angle_jitter_degrees = 10.0, .translation_jitter = 20.0};
    fitting::FitConfig config_weighted{};
    fitting::FitConfig config_baseline{.weighting_enabled = false};
    std::uint64_t seed = 0;
    unsigned threads = 0; ///< 0 = hardware concurrency
};

/// Rows of per-coordinate residuals (one row per fit, 2L columns).
struct ResidualTable
{
    Eigen::Index columns = 0;
    std::vector<Eigen::VectorXd> rows;
};

struct BinResult
{
    double yaw_degrees = 0.0;
    double mem_weighted = 0.0;
    double mem_baseline = 0.0;
    double improvement_percent = 0.0; ///< (baseline - weighted) / baseline * 100, 0 if baseline is 0
    int weighted_wins = 0;            ///< scenes where the weighted fit has the lower error
    int n_scenes = 0;
};

struct SceneResult
{
    int bin = 0;
    int scene = 0;
    std::uint64_t seed = 0;
    double mem_weighted = 0.0; ///< single-scene MEM against the clean landmarks
    double mem_baseline = 0.0;
    int iterations_weighted = 0;
    int iterations_baseline = 0;
};

struct BenchReport
{
    std::vector<BinResult> per_bin;
    std::vector<SceneResult> scenes;
    std::vector<double> error_curve_weighted; ///< mean landmark error per iteration
    std::vector<double> error_curve_baseline;
    ResidualTable residual_scatter_weighted;
    ResidualTable residual_scatter_baseline;
};

inline double improvement_percent(double mem_baseline, double mem_weighted)
{
    return mem_baseline > 0.0 ? (mem_baseline - mem_weighted) / mem_baseline * 100.0 : 0.0;
}

/// Stacks the per_landmark_residuals of several fits, one row each.
inline ResidualTable residual_scatter(const std::vector<fitting::FitResult>& results)
{
    ResidualTable table;
    for (std::size_t i = 0; i < results.size(); ++i)
    {
        const auto& r = results[i].per_landmark_residuals;
        if (i == 0)
        {
            table.columns = r.size();
        }
        wlfit::detail::require_dimension(r.size() == table.columns, "residual_scatter: result " + std::to_string(i) +
                                                                 " has " + std::to_string(r.size()) +
                                                                 " residuals, expected " +
                                                                 std::to_string(table.columns));
        table.rows.push_back(r);
    }
    return table;
}

/**
 * Mean of error traces, index by index, over max_iterations entries. A trace
 * that stopped early contributes its last value to the remaining iterations.
 */
inline std::vector<double> mean_error_curve(const std::vector<std::vector<double>>& traces, int max_iterations)
{
    std::vector<double> curve(static_cast<std::size_t>(max_iterations), 0.0);
    if (traces.empty())
    {
        return curve;
    }
    for (const auto& t : traces)
    {
        for (std::size_t k = 0; k < curve.size(); ++k)
        {
            curve[k] += t.empty() ? 0.0 : t[std::min(k, t.size() - 1)];
        }
    }
    for (auto& v : curve)
    {
        v /= static_cast<double>(traces.size());
    }
    return curve;
}

namespace detail {

/// Runs task(i) for i in [0, count) on a pool of threads; results must be written by index.
template <class Task>
void parallel_for(std::size_t count, unsigned threads, Task&& task)
{
    if (threads == 0)
    {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++)
        {
            task(i);
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t)
    {
        pool.emplace_back(worker);
    }
    worker();
}

[[noreturn]] inline void rethrow_tagged(std::exception_ptr ep, const std::string& tag)
{
    try
    {
        std::rethrow_exception(ep);
    }
    catch (const NumericError& e)
    {
        throw NumericError(tag + ": " + e.what());
    }
    catch (const DimensionError& e)
    {
        throw DimensionError(tag + ": " + e.what());
    }
    catch (const ConfigError& e)
    {
        throw ConfigError(tag + ": " + e.what());
    }
}

} // namespace detail

/**
 * Runs the comparison. MEM is measured in landmark space against the clean
 * (noise-free) projections of each scene. The report is a pure function of
 * (model, spec); the thread count only affects speed.
 */
inline BenchReport run_benchmark(const model::MorphableModel& model, const BenchSpec& spec)
{
    model::validate(model);
    if (spec.n_scenes < 1)
    {
        throw ConfigError("bench spec: n_scenes must be at least 1");
    }
    if (spec.yaw_bins.empty())
    {
        throw ConfigError("bench spec: yaw_bins must not be empty");
    }
    model::validate(spec.noise);
    fitting::validate(spec.config_weighted);
    fitting::validate(spec.config_baseline);

    const std::size_t n_bins = spec.yaw_bins.size();
    const auto per_bin = static_cast<std::size_t>(spec.n_scenes);
    const std::size_t total = n_bins * per_bin;

    struct Outcome
    {
        model::GroundTruthScene scene;
        fitting::FitResult weighted;
        fitting::FitResult baseline;
    };
    std::vector<Outcome> outcomes(total);
    std::vector<std::exception_ptr> errors(total);

    detail::parallel_for(total, spec.threads, [&](std::size_t i) {
        try
        {
            model::PoseSpec pose = spec.pose_template;
            pose.yaw_degrees = spec.yaw_bins[i / per_bin];
            auto& out = outcomes[i];
            out.scene = model::synth_scene(model, derive_seed(spec.seed, i), spec.noise, pose);
            out.weighted = fitting::fit(model, out.scene.noisy_landmarks_2d, spec.config_weighted);
            out.baseline = fitting::fit(model, out.scene.noisy_landmarks_2d, spec.config_baseline);
        }
        catch (...)
        {
            errors[i] = std::current_exception();
        }
    });
    for (std::size_t i = 0; i < total; ++i)
    {
        if (errors[i])
        {
            detail::rethrow_tagged(errors[i], "scene " + std::to_string(i % per_bin) + " of yaw bin " +
                                                  std::to_string(spec.yaw_bins[i / per_bin]) + " (seed " +
                                                  std::to_string(derive_seed(spec.seed, i)) + ")");
        }
    }

    BenchReport report;
    std::vector<std::vector<double>> traces_w, traces_b;
    std::vector<fitting::FitResult> fits_w, fits_b;
    for (std::size_t b = 0; b < n_bins; ++b)
    {
        std::vector<Eigen::VectorXd> truth, est_w, est_b;
        BinResult bin;
        bin.yaw_degrees = spec.yaw_bins[b];
        bin.n_scenes = spec.n_scenes;
        for (std::size_t s = 0; s < per_bin; ++s)
        {
            const std::size_t i = b * per_bin + s;
            auto& o = outcomes[i];
            truth.push_back(o.scene.clean_landmarks_2d);
            est_w.push_back(o.weighted.projected_landmarks);
            est_b.push_back(o.baseline.projected_landmarks);

            SceneResult sr;
            sr.bin = static_cast<int>(b);
            sr.scene = static_cast<int>(s);
            sr.seed = o.scene.seed;
            sr.mem_weighted = mem(truth.back(), est_w.back());
            sr.mem_baseline = mem(truth.back(), est_b.back());
            sr.iterations_weighted = o.weighted.iterations_run;
            sr.iterations_baseline = o.baseline.iterations_run;
            bin.weighted_wins += sr.mem_weighted < sr.mem_baseline ? 1 : 0;
            report.scenes.push_back(sr);

            traces_w.push_back(o.weighted.error_trace);
            traces_b.push_back(o.baseline.error_trace);
            fits_w.push_back(std::move(o.weighted));
            fits_b.push_back(std::move(o.baseline));
        }
        bin.mem_weighted = mem(truth, est_w);
        bin.mem_baseline = mem(truth, est_b);
        bin.improvement_percent = improvement_percent(bin.mem_baseline, bin.mem_weighted);
        report.per_bin.push_back(bin);
    }
    report.error_curve_weighted = mean_error_curve(traces_w, spec.config_weighted.max_iterations);
    report.error_curve_baseline = mean_error_curve(traces_b, spec.config_baseline.max_iterations);
    report.residual_scatter_weighted = residual_scatter(fits_w);
    report.residual_scatter_baseline = residual_scatter(fits_b);
    return report;
}

} // namespace metrics
} // namespace wlfit

#endif /* WLFIT_METRICS_BENCHMARK_HPP */
