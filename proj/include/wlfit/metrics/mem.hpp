/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/metrics/mem.hpp
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

#ifndef WLFIT_METRICS_MEM_HPP
#define WLFIT_METRICS_MEM_HPP

#include "wlfit/core/error.hpp"

#include "Eigen/Core"

#include <cmath>
#include <span>
#include <string>

namespace wlfit {
namespace metrics {

/**
 * Mean Euclidean Metric over N samples of k landmarks each:
 *
 *   MEM = sqrt( (1/N) * sum_i sum_j |g_ij - r_ij|^2 )
 *
 * The inner sum over landmarks is not normalised by k; divide the result by
 * sqrt(k) for a per-landmark RMS.
 */
inline double mem(std::span<const Eigen::VectorXd> ground_truth, std::span<const Eigen::VectorXd> estimated)
{
    wlfit::detail::require_dimension(!ground_truth.empty(), "mem: need at least one sample");
    wlfit::detail::require_dimension(ground_truth.size() == estimated.size(),
                              "mem: " + std::to_string(ground_truth.size()) + " ground-truth samples but " +
                                  std::to_string(estimated.size()) + " estimates");
    const Eigen::Index width = ground_truth.front().size();
    double total = 0.0;
    for (std::size_t i = 0; i < ground_truth.size(); ++i)
    {
        wlfit::detail::require_dimension(ground_truth[i].size() == width && estimated[i].size() == width,
                                  "mem: sample " + std::to_string(i) + " has a different landmark count");
        wlfit::detail::require_dimension(width % 2 == 0, "mem: odd coordinate count");
        total += (ground_truth[i] - estimated[i]).squaredNorm();
    }
    return std::sqrt(total / static_cast<double>(ground_truth.size()));
}

/// Single-sample convenience overload.
inline double mem(const Eigen::VectorXd& ground_truth, const Eigen::VectorXd& estimated)
{
    return mem(std::span<const Eigen::VectorXd>(&ground_truth, 1), std::span<const Eigen::VectorXd>(&estimated, 1));
}

} // namespace metrics
} // namespace wlfit

#endif /* WLFIT_METRICS_MEM_HPP */
