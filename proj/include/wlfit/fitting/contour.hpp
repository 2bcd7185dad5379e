/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/fitting/contour.hpp
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

#ifndef WLFIT_FITTING_CONTOUR_HPP
#define WLFIT_FITTING_CONTOUR_HPP

#include "wlfit/camera/pose.hpp"
#include "wlfit/core/error.hpp"
#include "wlfit/model/morphable_model.hpp"

#include "Eigen/Core"

#include <cstdint>
#include <limits>
#include <vector>

namespace wlfit {
namespace fitting {

/**
 * Re-selects the model vertex for each jaw-contour landmark slot.
 *
 * Under rotation the visible face outline moves across the mesh, so the
 * vertex that should match a 2D contour landmark changes with pose. For every
 * slot in model.contour_candidates the candidate whose projection lies
 * closest to the observed landmark is chosen (ties go to the earlier
 * candidate). Other slots keep their current vertex.
 *
 * @param[in] current_indices Current landmark-to-vertex assignment, one per slot.
 * @param[in] enabled If false the assignment is returned unchanged.
 */
inline std::vector<std::uint32_t> contour_recorrespond(const model::MorphableModel& model,
                                                       const Eigen::VectorXd& shape3d, const camera::Pose& pose,
                                                       const Eigen::VectorXd& observed2d,
                                                       std::vector<std::uint32_t> current_indices,
                                                       bool enabled = true)
{
    if (!enabled)
    {
        return current_indices;
    }
    wlfit::detail::require_dimension(current_indices.size() == model.num_landmarks(),
                              "contour_recorrespond: index vector length does not match the model");
    wlfit::detail::require_dimension(observed2d.size() == 2 * static_cast<Eigen::Index>(model.num_landmarks()),
                              "contour_recorrespond: observed landmarks must have 2L entries");
    wlfit::detail::require_dimension(shape3d.size() == model.mean_shape.size(),
                              "contour_recorrespond: shape length does not match the model");
    if (!model.has_contours())
    {
        throw ConfigError("contour_recorrespond: model has no contour candidate lists");
    }
    camera::validate(pose);
    const Eigen::Matrix<double, 2, 3> P = pose.projection_matrix();
    const auto n = static_cast<std::uint64_t>(model.n_vertices());
    for (const auto& slot : model.contour_candidates)
    {
        const Eigen::Vector2d target = observed2d.segment<2>(2 * static_cast<Eigen::Index>(slot.slot));
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_vertex = current_indices[slot.slot];
        for (const auto v : slot.candidates)
        {
            wlfit::detail::require_dimension(v < n, "contour_recorrespond: candidate vertex out of range");
            const Eigen::Vector2d p = P * (shape3d.segment<3>(3 * static_cast<Eigen::Index>(v)) + pose.translation);
            const double d = (p - target).squaredNorm();
            if (d < best)
            {
                best = d;
                best_vertex = v;
            }
        }
        current_indices[slot.slot] = best_vertex;
    }
    return current_indices;
}

} // namespace fitting
} // namespace wlfit

#endif /* WLFIT_FITTING_CONTOUR_HPP */
