/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/fitting/coefficient_solver.hpp
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

#ifndef WLFIT_FITTING_COEFFICIENT_SOLVER_HPP
#define WLFIT_FITTING_COEFFICIENT_SOLVER_HPP

#include "wlfit/camera/pose.hpp"
#include "wlfit/core/error.hpp"

#include "Eigen/Cholesky"
#include "Eigen/Core"

#include <cmath>
#include <string>

namespace wlfit {
namespace fitting {

/**
 * One linear block of the weighted fitting objective.
 *
 * The landmark positions are fixed_offset + basis * alpha (3L entries), where
 * fixed_offset already contains the mean, the contribution of every other
 * coefficient block and the pose translation. They are projected with the
 * pose's 2x3 linear part and compared to the observations with one weight per
 * landmark, applied to both of its coordinates:
 *
 *   E(alpha) = |W (observed - P (fixed_offset + basis * alpha))|^2 + lambda * sum_i alpha_i^2 / sigma_i
 */
struct LinearBlock
{
    const Eigen::MatrixXd& basis;        ///< 3L x M, landmark rows only
    const Eigen::VectorXd& stddevs;      ///< M
    const camera::Pose& pose;            ///< translation is ignored, fold it into fixed_offset
    const Eigen::VectorXd& fixed_offset; ///< 3L
    const Eigen::VectorXd& observed;     ///< 2L
    const Eigen::VectorXd& weights;      ///< L
    double lambda = 0.0;
};

namespace detail {

inline void check(const LinearBlock& b)
{
    const Eigen::Index L = b.weights.size();
    const Eigen::Index M = b.basis.cols();
    wlfit::detail::require_dimension(b.basis.rows() == 3 * L, "solve_coefficients: basis must have 3L rows, got " +
                                                                  std::to_string(b.basis.rows()) + " for L = " +
                                                                  std::to_string(L));
    wlfit::detail::require_dimension(b.stddevs.size() == M, "solve_coefficients: stddev count does not match basis");
    wlfit::detail::require_dimension(b.fixed_offset.size() == 3 * L, "solve_coefficients: fixed_offset must have 3L entries");
    wlfit::detail::require_dimension(b.observed.size() == 2 * L, "solve_coefficients: observed must have 2L entries");
    if (!b.basis.allFinite() || !b.stddevs.allFinite() || !b.fixed_offset.allFinite() || !b.observed.allFinite() ||
        !b.weights.allFinite() || !std::isfinite(b.lambda))
    {
        throw NumericError("solve_coefficients: non-finite input");
    }
    if ((b.stddevs.array() <= 0.0).any() || (b.weights.array() <= 0.0).any() || b.lambda < 0.0)
    {
        throw NumericError("solve_coefficients: stddevs and weights must be positive and lambda non-negative");
    }
    camera::validate(b.pose);
}

/// Rows 2i, 2i+1 are w_i * P * basis(3i..3i+2, :).
inline Eigen::MatrixXd weighted_design(const LinearBlock& b)
{
    const Eigen::Index L = b.weights.size();
    const Eigen::Matrix<double, 2, 3> P = b.pose.projection_matrix();
    Eigen::MatrixXd a(2 * L, b.basis.cols());
    for (Eigen::Index i = 0; i < L; ++i)
    {
        a.middleRows<2>(2 * i).noalias() = b.weights(i) * P * b.basis.middleRows<3>(3 * i);
    }
    return a;
}

/// w_i * (observed_i - P * fixed_offset_i), stacked.
inline Eigen::VectorXd weighted_target(const LinearBlock& b)
{
    const Eigen::Index L = b.weights.size();
    const Eigen::Matrix<double, 2, 3> P = b.pose.projection_matrix();
    Eigen::VectorXd r(2 * L);
    for (Eigen::Index i = 0; i < L; ++i)
    {
        r.segment<2>(2 * i) = b.weights(i) * (b.observed.segment<2>(2 * i) - P * b.fixed_offset.segment<3>(3 * i));
    }
    return r;
}

} // namespace detail

/**
 * Closed-form minimiser of the block objective: solves the normal equations
 *
 *   (lambda * C + (WPB)^T (WPB)) alpha = (WPB)^T W (observed - P * fixed_offset),  C = diag(1 / sigma),
 *
 * with an LDL^T factorisation. Throws NumericError when the normal matrix is
 * singular (lambda = 0 and a rank-deficient design).
 */
inline Eigen::VectorXd solve_coefficients(const LinearBlock& block)
{
    detail::check(block);
    const Eigen::MatrixXd a = detail::weighted_design(block);
    const Eigen::VectorXd r = detail::weighted_target(block);

    Eigen::MatrixXd normal = a.transpose() * a;
    normal.diagonal() += block.lambda * block.stddevs.cwiseInverse();
    const Eigen::VectorXd rhs = a.transpose() * r;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    const Eigen::VectorXd pivots = ldlt.vectorD();
    const double largest = pivots.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(largest > 0.0) || pivots.minCoeff() <= 1e-13 * largest)
    {
        throw NumericError("solve_coefficients: singular normal matrix (lambda = " + std::to_string(block.lambda) +
                           ", " + std::to_string(block.basis.cols()) + " coefficients)");
    }
    return ldlt.solve(rhs);
}

/// Value of the block objective at alpha.
inline double objective(const LinearBlock& block, const Eigen::VectorXd& alpha)
{
    detail::check(block);
    wlfit::detail::require_dimension(alpha.size() == block.basis.cols(), "objective: alpha length does not match basis");
    const Eigen::VectorXd residual = detail::weighted_target(block) - detail::weighted_design(block) * alpha;
    return residual.squaredNorm() + block.lambda * alpha.dot(block.stddevs.cwiseInverse().cwiseProduct(alpha));
}

} // namespace fitting
} // namespace wlfit

#endif /* WLFIT_FITTING_COEFFICIENT_SOLVER_HPP */
