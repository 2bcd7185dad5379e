/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/fitting/fit.hpp
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

#ifndef WLFIT_FITTING_FIT_HPP
#define WLFIT_FITTING_FIT_HPP

#include "wlfit/camera/pose.hpp"
#include "wlfit/core/error.hpp"
#include "wlfit/fitting/coefficient_solver.hpp"
#include "wlfit/fitting/contour.hpp"
#include "wlfit/fitting/weights.hpp"
#include "wlfit/model/morphable_model.hpp"

#include "Eigen/Core"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace wlfit {
namespace fitting {

struct FitConfig
{
    double xi1 = 3.0;
    double xi2 = 3.5;
    double lambda_id = 1.0;
    double lambda_exp = 1.0;
    int max_iterations = 50;
    double tau = 0.5;                   ///< stop once the landmark error (pixels) drops below this
    double min_rel_improvement = 1e-6;  ///< stop once (previous - current) / previous falls below this
    bool weighting_enabled = true;      ///< false gives the unweighted baseline
    bool contour_recorrespond_enabled = false;

    bool operator==(const FitConfig&) const = default;
};

inline void validate(const FitConfig& c)
{
    const auto fail = [](const std::string& what) { throw ConfigError("fit config: " + what); };
    if (!(c.xi1 > 0.0) || !(c.xi2 > 0.0) || !std::isfinite(c.xi1) || !std::isfinite(c.xi2))
        fail("xi1 and xi2 must be finite and positive");
    if (!(c.lambda_id >= 0.0) || !(c.lambda_exp >= 0.0) || !std::isfinite(c.lambda_id) ||
        !std::isfinite(c.lambda_exp))
        fail("lambda_id and lambda_exp must be finite and non-negative");
    if (c.max_iterations < 1)
        fail("max_iterations must be at least 1");
    if (!(c.tau >= 0.0) || !std::isfinite(c.tau))
        fail("tau must be finite and non-negative");
    if (!std::isfinite(c.min_rel_improvement))
        fail("min_rel_improvement must be finite");
}

enum class StopReason { tolerance_reached, stalled, max_iterations };

inline const char* to_string(StopReason r)
{
    switch (r)
    {
    case StopReason::tolerance_reached: return "tolerance_reached";
    case StopReason::stalled: return "stalled";
    case StopReason::max_iterations: return "max_iterations";
    }
    return "unknown";
}

/**
 * Output of fit(). Pose, coefficients, weights, residuals and correspondences
 * all belong to the iteration with the lowest landmark error; error_trace
 * holds the error of every iteration that ran.
 */
struct FitResult
{
    camera::Pose pose;
    model::ShapeCoefficients coeffs;
    WeightState final_weights;
    std::vector<double> error_trace;
    Eigen::VectorXd per_landmark_residuals; ///< observed - projected, 2L
    Eigen::VectorXd projected_landmarks;    ///< 2L
    std::vector<std::uint32_t> landmark_indices;
    int iterations_run = 0;
    int best_iteration = 0; ///< 0-based index into error_trace
    bool converged = false;
    StopReason stop_reason = StopReason::max_iterations;
};

/// Snapshot passed to the fit observer after each iteration's weight update.
struct IterationRecord
{
    int iteration = 0;
    double error = 0.0;
    const camera::Pose& pose;
    const model::ShapeCoefficients& coeffs;
    const WeightState& weights;
};

using FitObserver = std::function<void(const IterationRecord&)>;

/// Landmark error used for the trace and the stopping test: sqrt(sum_i d_i^2).
inline double landmark_error(const Eigen::VectorXd& distances) { return distances.norm(); }

/**
 * Fits pose, expression and identity coefficients to 2D landmarks by block
 * coordinate descent with residual-driven landmark weights.
 *
 * Weights start at 1. Each iteration
 *  1. estimates the weighted weak-perspective pose for the current shape,
 *  2. optionally re-selects the jaw-contour vertices,
 *  3. solves the expression coefficients with identity fixed,
 *  4. solves the identity coefficients with expression fixed,
 *  5. measures the per-landmark distances D and the error |D|,
 *  6. sets w_i = (d_i + xi1) / xi2 (if weighting is enabled).
 * The loop stops when the error falls below tau, when the relative decrease
 * drops below min_rel_improvement (including any increase), or after
 * max_iterations.
 *
 * Numeric failures inside an iteration are rethrown with the iteration number.
 */
inline FitResult fit(const model::MorphableModel& model, const Eigen::VectorXd& observed2d, const FitConfig& config,
                     const FitObserver& observer = {})
{
    model::validate(model);
    validate(config);
    const auto L = static_cast<Eigen::Index>(model.num_landmarks());
    wlfit::detail::require_dimension(observed2d.size() == 2 * L, "fit: expected " + std::to_string(2 * L) +
                                                              " landmark coordinates, got " +
                                                              std::to_string(observed2d.size()));
    if (!observed2d.allFinite())
    {
        throw NumericError("fit: observed landmarks contain non-finite values");
    }
    if (config.contour_recorrespond_enabled && !model.has_contours())
    {
        throw ConfigError("fit: contour re-correspondence requested but the model has no contour candidates");
    }

    std::vector<std::uint32_t> indices = model.landmark_indices;
    Eigen::VectorXd mean_l;
    Eigen::MatrixXd id_l, exp_l;
    const auto restrict_to = [&](const std::vector<std::uint32_t>& idx) {
        const auto rows = model::vertex_rows(idx);
        mean_l = model.mean_shape(rows);
        id_l = model.id_basis(rows, Eigen::all);
        exp_l = model.exp_basis(rows, Eigen::all);
    };
    restrict_to(indices);

    model::ShapeCoefficients coeffs = model::zero_coefficients(model);
    Eigen::VectorXd weights = Eigen::VectorXd::Ones(L);
    FitResult result;
    double best_error = std::numeric_limits<double>::infinity();

    for (int it = 0; it < config.max_iterations; ++it)
    {
        double error = 0.0;
        try
        {
            Eigen::VectorXd points = mean_l + id_l * coeffs.alpha_id + exp_l * coeffs.alpha_exp;
            camera::Pose pose = camera::estimate_pose(points, observed2d, weights);

            if (config.contour_recorrespond_enabled)
            {
                auto updated = contour_recorrespond(model, model::instantiate_shape(model, coeffs), pose, observed2d,
                                                    indices);
                if (updated != indices)
                {
                    indices = std::move(updated);
                    restrict_to(indices);
                }
            }

            const Eigen::VectorXd translation = pose.translation.replicate(L, 1);
            const Eigen::VectorXd exp_offset = mean_l + id_l * coeffs.alpha_id + translation;
            coeffs.alpha_exp = solve_coefficients(
                {exp_l, model.exp_stddev, pose, exp_offset, observed2d, weights, config.lambda_exp});
            const Eigen::VectorXd id_offset = mean_l + exp_l * coeffs.alpha_exp + translation;
            coeffs.alpha_id = solve_coefficients(
                {id_l, model.id_stddev, pose, id_offset, observed2d, weights, config.lambda_id});

            points = mean_l + id_l * coeffs.alpha_id + exp_l * coeffs.alpha_exp;
            Eigen::VectorXd projected = camera::project(points, pose);
            const Eigen::VectorXd distances = residual_distances(observed2d, projected);
            error = landmark_error(distances);
            WeightState state = config.weighting_enabled ? update_weights(distances, config.xi1, config.xi2)
                                                         : WeightState{distances, Eigen::VectorXd::Ones(L)};
            result.error_trace.push_back(error);
            if (observer)
            {
                observer(IterationRecord{it, error, pose, coeffs, state});
            }
            if (error < best_error)
            {
                best_error = error;
                result.pose = pose;
                result.coeffs = coeffs;
                result.final_weights = state;
                result.per_landmark_residuals = observed2d - projected;
                result.projected_landmarks = std::move(projected);
                result.landmark_indices = indices;
                result.best_iteration = it;
            }
            weights = std::move(state.weights);
        }
        catch (const NumericError& e)
        {
            throw NumericError("fit iteration " + std::to_string(it + 1) + ": " + e.what());
        }
        result.iterations_run = it + 1;

        if (error < config.tau)
        {
            result.converged = true;
            result.stop_reason = StopReason::tolerance_reached;
            break;
        }
        if (it > 0)
        {
            const double previous = result.error_trace[result.error_trace.size() - 2];
            const bool stalled = previous == 0.0 || (previous - error) / previous < config.min_rel_improvement;
            if (stalled)
            {
                result.converged = error <= previous;
                result.stop_reason = StopReason::stalled;
                break;
            }
        }
    }
    return result;
}

} // namespace fitting
} // namespace wlfit

#endif /* WLFIT_FITTING_FIT_HPP */
