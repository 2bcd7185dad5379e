/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/camera/pose.hpp
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

#ifndef WLFIT_CAMERA_POSE_HPP
#define WLFIT_CAMERA_POSE_HPP

#include "wlfit/core/error.hpp"

#include "Eigen/Core"
#include "Eigen/Eigenvalues"
#include "Eigen/SVD"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace wlfit {
namespace camera {

/**
 * Weak-perspective (scaled orthographic) camera.
 *
 * A model-space point v maps to the image point
 *   scale * [first two rows of rotation] * (v + translation).
 * The translation is applied in model space, before the rotation.
 */
struct Pose
{
    double scale = 1.0;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    /// The 2x3 linear part, scale * rotation.topRows<2>().
    Eigen::Matrix<double, 2, 3> projection_matrix() const { return scale * rotation.topRows<2>(); }
};

/// Rotation angles in radians, each in (-pi, pi].
struct EulerAngles
{
    double pitch = 0.0; ///< about x
    double yaw = 0.0;   ///< about y
    double roll = 0.0;  ///< about z
};

inline constexpr double rotation_tolerance = 1e-9;

/// Throws NumericError unless the pose has a proper rotation, positive scale and finite translation.
inline void validate(const Pose& pose)
{
    if (!std::isfinite(pose.scale) || pose.scale <= 0.0)
    {
        throw NumericError("pose scale must be finite and positive");
    }
    if (!pose.rotation.allFinite() || !pose.translation.allFinite())
    {
        throw NumericError("pose contains non-finite entries");
    }
    const double ortho_err =
        (pose.rotation.transpose() * pose.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (ortho_err > rotation_tolerance || std::abs(pose.rotation.determinant() - 1.0) > rotation_tolerance)
    {
        throw NumericError("pose rotation is not a proper rotation matrix");
    }
}

/**
 * Projects interleaved 3D points (X1, Y1, Z1, ...) to interleaved image points
 * (x1, y1, ...).
 */
inline Eigen::VectorXd project(const Eigen::VectorXd& points3d, const Pose& pose)
{
    wlfit::detail::require_dimension(points3d.size() % 3 == 0, "3D point vector length must be a multiple of 3");
    if (!points3d.allFinite())
    {
        throw NumericError("project: non-finite 3D point");
    }
    validate(pose);
    const Eigen::Index n = points3d.size() / 3;
    const Eigen::Matrix<double, 2, 3> P = pose.projection_matrix();
    Eigen::VectorXd out(2 * n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        out.segment<2>(2 * i) = P * (points3d.segment<3>(3 * i) + pose.translation);
    }
    return out;
}

inline Eigen::Matrix3d rotation_x(double angle)
{
    Eigen::Matrix3d r;
    const double c = std::cos(angle), s = std::sin(angle);
    r << 1, 0, 0, 0, c, -s, 0, s, c;
    return r;
}

inline Eigen::Matrix3d rotation_y(double angle)
{
    Eigen::Matrix3d r;
    const double c = std::cos(angle), s = std::sin(angle);
    r << c, 0, s, 0, 1, 0, -s, 0, c;
    return r;
}

inline Eigen::Matrix3d rotation_z(double angle)
{
    Eigen::Matrix3d r;
    const double c = std::cos(angle), s = std::sin(angle);
    r << c, -s, 0, s, c, 0, 0, 0, 1;
    return r;
}

/// R = R_z(roll) * R_y(yaw) * R_x(pitch).
inline Eigen::Matrix3d euler_to_rotation(const EulerAngles& angles)
{
    return rotation_z(angles.roll) * rotation_y(angles.yaw) * rotation_x(angles.pitch);
}

namespace detail {

/// Maps an angle to (-pi, pi].
inline double wrap_angle(double a)
{
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

} // namespace detail

/**
 * Inverse of euler_to_rotation. When the yaw is at +-90 degrees
 * (|cos(yaw)| < 1e-7), pitch and roll are not separable and roll is set to 0.
 */
inline EulerAngles rotation_to_euler(const Eigen::Matrix3d& R)
{
    EulerAngles e;
    const double sin_yaw = std::clamp(-R(2, 0), -1.0, 1.0);
    const double cos_yaw = std::hypot(R(0, 0), R(1, 0));
    if (cos_yaw < 1e-7)
    {
        e.yaw = sin_yaw > 0 ? std::numbers::pi / 2 : -std::numbers::pi / 2;
        e.roll = 0.0;
        e.pitch = detail::wrap_angle(std::atan2(-R(1, 2), R(1, 1)));
    }
    else
    {
        e.yaw = std::atan2(sin_yaw, cos_yaw);
        e.pitch = detail::wrap_angle(std::atan2(R(2, 1), R(2, 2)));
        e.roll = detail::wrap_angle(std::atan2(R(1, 0), R(0, 0)));
    }
    return e;
}

/**
 * Weighted scaled-orthographic pose from 3D-2D point correspondences.
 *
 * Minimises sum_i w_i * |A p_i - q_i|^2 over affine 2x3 maps A on the
 * weighted-centred point sets, then projects A onto the weak-perspective
 * family: the rotation is the nearest proper rotation to the matrix of A's
 * normalised rows and their cross product, and the scale is the mean of A's
 * two singular values. The translation maps the weighted 3D centroid onto the
 * weighted 2D centroid; its component along the viewing direction is zero.
 *
 * Coplanar 3D points are accepted: the affine map is completed along the
 * plane normal so that it is exactly scaled-orthographic (up to the usual
 * mirror ambiguity of planar targets). Collinear or coincident points are
 * rejected.
 *
 * @param[in] points3d Interleaved 3D points, 3L entries.
 * @param[in] points2d Interleaved image points, 2L entries.
 * @param[in] weights One strictly positive weight per point.
 */
inline Pose estimate_pose(const Eigen::VectorXd& points3d, const Eigen::VectorXd& points2d,
                          const Eigen::VectorXd& weights)
{
    const Eigen::Index n = weights.size();
    wlfit::detail::require_dimension(points3d.size() == 3 * n && points2d.size() == 2 * n,
                                     "estimate_pose: expected 3L and 2L coordinates for L = " +
                                         std::to_string(n) + " weights");
    if (n < 4)
    {
        throw DimensionError("estimate_pose: at least 4 correspondences are required");
    }
    if (!points3d.allFinite() || !points2d.allFinite() || !weights.allFinite())
    {
        throw NumericError("estimate_pose: non-finite input");
    }
    if ((weights.array() <= 0.0).any())
    {
        throw NumericError("estimate_pose: weights must be strictly positive");
    }

    const double total = weights.sum();
    Eigen::Vector3d c3 = Eigen::Vector3d::Zero();
    Eigen::Vector2d c2 = Eigen::Vector2d::Zero();
    for (Eigen::Index i = 0; i < n; ++i)
    {
        c3 += weights(i) * points3d.segment<3>(3 * i);
        c2 += weights(i) * points2d.segment<2>(2 * i);
    }
    c3 /= total;
    c2 /= total;

    // Weighted scatter S = sum w p p^T and cross term T = sum w q p^T of the centred sets.
    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
    Eigen::Matrix<double, 2, 3> T = Eigen::Matrix<double, 2, 3>::Zero();
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const Eigen::Vector3d p = points3d.segment<3>(3 * i) - c3;
        const Eigen::Vector2d q = points2d.segment<2>(2 * i) - c2;
        S.noalias() += weights(i) * p * p.transpose();
        T.noalias() += weights(i) * q * p.transpose();
    }
    S /= total;
    T /= total;

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(S);
    const Eigen::Vector3d evals = eig.eigenvalues();
    const double largest = evals.maxCoeff();
    if (!(largest > 0.0))
    {
        throw NumericError("estimate_pose: 3D points are coincident");
    }
    Eigen::Vector3d inv_evals = Eigen::Vector3d::Zero();
    int rank = 0;
    for (int k = 0; k < 3; ++k)
    {
        if (evals(k) > 1e-12 * largest)
        {
            inv_evals(k) = 1.0 / evals(k);
            ++rank;
        }
    }
    if (rank < 2)
    {
        throw NumericError("estimate_pose: 3D points are collinear");
    }
    const Eigen::Matrix3d S_pinv = eig.eigenvectors() * inv_evals.asDiagonal() * eig.eigenvectors().transpose();
    Eigen::Matrix<double, 2, 3> A = T * S_pinv;
    if (rank == 2)
    {
        // Planar points leave A undetermined along the plane normal n. Add the
        // component c n^T that makes the rows orthogonal with equal norms:
        // (c1 + i c2)^2 = |a2|^2 - |a1|^2 - 2i a1.a2. Of the two mirror
        // solutions the principal square root is taken.
        Eigen::Index smallest = 0;
        evals.minCoeff(&smallest);
        const Eigen::Vector3d normal = eig.eigenvectors().col(smallest);
        const std::complex<double> c = std::sqrt(std::complex<double>(
            A.row(1).squaredNorm() - A.row(0).squaredNorm(), -2.0 * A.row(0).dot(A.row(1))));
        A += Eigen::Vector2d(c.real(), c.imag()) * normal.transpose();
    }

    const Eigen::Vector3d r1 = A.row(0).transpose();
    const Eigen::Vector3d r2 = A.row(1).transpose();
    const Eigen::Vector3d r3 = r1.cross(r2);
    const double n1 = r1.norm(), n2 = r2.norm(), n3 = r3.norm();
    if (!(n1 > 0.0 && n2 > 0.0 && n3 > 1e-12 * n1 * n2))
    {
        throw NumericError("estimate_pose: affine camera is rank deficient");
    }
    Eigen::Matrix3d M;
    M.row(0) = r1.transpose() / n1;
    M.row(1) = r2.transpose() / n2;
    M.row(2) = r3.transpose() / n3;
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
    D(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;

    Pose pose;
    pose.rotation = svd.matrixU() * D * svd.matrixV().transpose();
    const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>>(A).singularValues();
    pose.scale = 0.5 * (sv(0) + sv(1));
    if (!(pose.scale > 1e-12))
    {
        throw NumericError("estimate_pose: recovered scale is not positive");
    }
    // In camera coordinates the translation is (tx, ty, 0); map it back to model space.
    const Eigen::Vector2d t_cam = c2 / pose.scale - pose.rotation.topRows<2>() * c3;
    pose.translation = pose.rotation.transpose() * Eigen::Vector3d(t_cam(0), t_cam(1), 0.0);
    return pose;
}

} // namespace camera
} // namespace wlfit

#endif /* WLFIT_CAMERA_POSE_HPP */
