/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/fitting/weights.hpp
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

#ifndef WLFIT_FITTING_WEIGHTS_HPP
#define WLFIT_FITTING_WEIGHTS_HPP

#include "wlfit/core/error.hpp"

#include "Eigen/Core"

#include <cmath>
#include <string>

namespace wlfit {
namespace fitting {

/// Per-landmark reprojection distances (pixels) and the weights derived from them.
struct WeightState
{
    Eigen::VectorXd distances;
    Eigen::VectorXd weights;
};

/// Euclidean distance per landmark between two interleaved 2D point vectors.
inline Eigen::VectorXd residual_distances(const Eigen::VectorXd& observed2d, const Eigen::VectorXd& projected2d)
{
    wlfit::detail::require_dimension(observed2d.size() == projected2d.size(),
                              "residual_distances: observed has " + std::to_string(observed2d.size()) +
                                  " coordinates, projected has " + std::to_string(projected2d.size()));
    wlfit::detail::require_dimension(observed2d.size() % 2 == 0, "residual_distances: odd coordinate count");
    const Eigen::Index n = observed2d.size() / 2;
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        d(i) = std::hypot(observed2d(2 * i) - projected2d(2 * i), observed2d(2 * i + 1) - projected2d(2 * i + 1));
    }
    return d;
}

/**
 * Residual-proportional landmark weights, w_i = (d_i + xi1) / xi2.
 *
 * Landmarks that currently fit badly get larger weights, so the next solve
 * pulls them in harder. xi1 keeps well-fitted landmarks from dropping out and
 * xi2 sets the overall scale.
 */
inline WeightState update_weights(const Eigen::VectorXd& distances, double xi1, double xi2)
{
    if (!(xi1 > 0.0) || !(xi2 > 0.0) || !std::isfinite(xi1) || !std::isfinite(xi2))
    {
        throw ConfigError("update_weights: xi1 and xi2 must be finite and positive");
    }
    if (!distances.allFinite() || (distances.array() < 0.0).any())
    {
        throw NumericError("update_weights: distances must be finite and non-negative");
    }
    return {distances, (distances.array() + xi1) / xi2};
}

} // namespace fitting
} // namespace wlfit

#endif /* WLFIT_FITTING_WEIGHTS_HPP */
