/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/model/synthetic.hpp
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

#ifndef WLFIT_MODEL_SYNTHETIC_HPP
#define WLFIT_MODEL_SYNTHETIC_HPP

#include "wlfit/camera/pose.hpp"
#include "wlfit/core/error.hpp"
#include "wlfit/core/random.hpp"
#include "wlfit/model/morphable_model.hpp"

#include "Eigen/Core"
#include "Eigen/QR"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace wlfit {
namespace model {

/**
 * Dimensions of a synthetic model. smoothness is the width of the Gaussian
 * deformation bumps relative to the half-height of the mean face.
 */
struct SynthModelSpec
{
    std::uint32_t n_vertices = 500;
    std::uint32_t m_id = 20;
    std::uint32_t k_exp = 10;
    std::uint32_t n_landmarks = 68;
    double smoothness = 0.09;
};

/// Half-axes of the mean face ellipsoid (x: width, y: height, z: depth towards the camera).
inline constexpr double face_half_width = 70.0;
inline constexpr double face_half_height = 90.0;
inline constexpr double face_depth = 50.0;

/// Geometric decay of the PCA standard deviations, sigma_i = sigma_1 * r^(i-1).
inline constexpr double id_stddev_decay = 0.85;
inline constexpr double exp_stddev_decay = 0.8;
/// sigma_1 in units of per-coordinate RMS displacement: sigma_1 = c * sqrt(3n).
inline constexpr double id_stddev_rms = 4.0;
inline constexpr double exp_stddev_rms = 3.0;

inline constexpr std::uint32_t contour_candidates_per_slot = 10;
inline constexpr std::uint32_t deformation_bumps = 30;

/// Number of jaw-contour slots for L landmarks: 17 for the 68-point scheme.
inline std::uint32_t contour_slot_count(std::uint32_t n_landmarks)
{
    return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::lround(17.0 * n_landmarks / 68.0)));
}

namespace detail {

/**
 * The seven similarity-motion generators (3 translations, 3 infinitesimal
 * rotations, 1 scaling) of a point set, as columns.
 */
inline Eigen::MatrixXd similarity_generators(const Eigen::VectorXd& points)
{
    const Eigen::Index n = points.size() / 3;
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (Eigen::Index i = 0; i < n; ++i)
    {
        centroid += points.segment<3>(3 * i);
    }
    centroid /= static_cast<double>(n);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3 * n, 7);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const Eigen::Vector3d p = points.segment<3>(3 * i) - centroid;
        for (int axis = 0; axis < 3; ++axis)
        {
            const Eigen::Vector3d e = Eigen::Vector3d::Unit(axis);
            g.block<3, 1>(3 * i, axis) = e;
            g.block<3, 1>(3 * i, 3 + axis) = e.cross(p);
        }
        g.block<3, 1>(3 * i, 6) = p;
    }
    return g;
}

inline Eigen::MatrixXd thin_q(const Eigen::MatrixXd& a)
{
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

} // namespace detail

/**
 * Deterministic synthetic morphable model.
 *
 * The mean shape is a point cloud on the front half of an ellipsoid. Each
 * basis column is a sum of Gaussian bumps with random 3D displacement
 * directions. All identity and expression columns are made orthogonal to the
 * similarity motions of the mean and then jointly orthonormalised.
 * Landmarks are sampled without replacement; the first contour_slot_count(L)
 * slots lie on the lower rim (the jaw line) and carry candidate lists of the
 * nearest vertices for contour re-correspondence.
 */
inline MorphableModel synth_model(const SynthModelSpec& spec, std::uint64_t seed)
{
    const std::uint32_t n = spec.n_vertices;
    const std::uint32_t L = spec.n_landmarks;
    if (L < 4 || n < L)
    {
        throw ConfigError("synth_model: need n_vertices >= n_landmarks >= 4");
    }
    if (spec.m_id < 1 || spec.k_exp < 1)
    {
        throw ConfigError("synth_model: m_id and k_exp must be at least 1");
    }
    if (2ull * L < static_cast<std::uint64_t>(spec.m_id) + spec.k_exp)
    {
        throw ConfigError("synth_model: 2 * n_landmarks must be at least m_id + k_exp");
    }
    if (3ull * n < static_cast<std::uint64_t>(spec.m_id) + spec.k_exp + 7)
    {
        throw ConfigError("synth_model: too many basis vectors for the vertex count");
    }
    if (!(spec.smoothness > 0.0) || !std::isfinite(spec.smoothness))
    {
        throw ConfigError("synth_model: smoothness must be positive");
    }

    Random rng(seed);
    MorphableModel m;

    m.mean_shape.resize(3 * static_cast<Eigen::Index>(n));
    for (std::uint32_t i = 0; i < n; ++i)
    {
        // Uniform in cos(polar angle) over the front hemisphere.
        const double cos_t = 1.0 - rng.uniform01();
        const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
        const double phi = 2.0 * std::numbers::pi * rng.uniform01();
        m.mean_shape.segment<3>(3 * i) << face_half_width * sin_t * std::cos(phi),
            face_half_height * sin_t * std::sin(phi), face_depth * cos_t;
    }

    const std::uint32_t m_total = spec.m_id + spec.k_exp;
    const double width = spec.smoothness * face_half_height;
    Eigen::MatrixXd fields = Eigen::MatrixXd::Zero(3 * n, m_total);
    for (std::uint32_t j = 0; j < m_total; ++j)
    {
        for (std::uint32_t b = 0; b < deformation_bumps; ++b)
        {
            const auto centre_idx = static_cast<Eigen::Index>(rng.uniform_index(n));
            const Eigen::Vector3d centre = m.mean_shape.segment<3>(3 * centre_idx);
            const Eigen::Vector3d direction(rng.normal(), rng.normal(), rng.normal());
            for (std::uint32_t i = 0; i < n; ++i)
            {
                const double d2 = (m.mean_shape.segment<3>(3 * i) - centre).squaredNorm();
                fields.block<3, 1>(3 * i, j) += std::exp(-d2 / (2.0 * width * width)) * direction;
            }
        }
    }
    const Eigen::MatrixXd gq = detail::thin_q(detail::similarity_generators(m.mean_shape));
    fields -= gq * (gq.transpose() * fields);
    const Eigen::MatrixXd q = detail::thin_q(fields);
    m.id_basis = q.leftCols(spec.m_id);
    m.exp_basis = q.rightCols(spec.k_exp);

    const double rms_to_sigma = std::sqrt(3.0 * n);
    m.id_stddev.resize(spec.m_id);
    for (std::uint32_t i = 0; i < spec.m_id; ++i)
    {
        m.id_stddev(i) = id_stddev_rms * rms_to_sigma * std::pow(id_stddev_decay, i);
    }
    m.exp_stddev.resize(spec.k_exp);
    for (std::uint32_t i = 0; i < spec.k_exp; ++i)
    {
        m.exp_stddev(i) = exp_stddev_rms * rms_to_sigma * std::pow(exp_stddev_decay, i);
    }

    // Jaw contour: vertices of the lower half (y <= 0) closest to the rim (small z).
    const std::uint32_t n_contour = contour_slot_count(L);
    std::vector<std::uint32_t> by_depth(n);
    std::iota(by_depth.begin(), by_depth.end(), 0u);
    std::stable_sort(by_depth.begin(), by_depth.end(), [&](std::uint32_t a, std::uint32_t b) {
        const bool lower_a = m.mean_shape(3 * a + 1) <= 0.0;
        const bool lower_b = m.mean_shape(3 * b + 1) <= 0.0;
        if (lower_a != lower_b)
        {
            return lower_a;
        }
        return m.mean_shape(3 * a + 2) < m.mean_shape(3 * b + 2);
    });
    const std::uint32_t pool_size = std::min(n, 3 * n_contour);
    std::vector<std::uint32_t> contour;
    for (const auto k : rng.sample_without_replacement(pool_size, n_contour))
    {
        contour.push_back(by_depth[k]);
    }
    // Order the jaw line from one side of the face to the other.
    std::stable_sort(contour.begin(), contour.end(), [&](std::uint32_t a, std::uint32_t b) {
        return std::atan2(m.mean_shape(3 * a + 1), m.mean_shape(3 * a)) <
               std::atan2(m.mean_shape(3 * b + 1), m.mean_shape(3 * b));
    });

    std::vector<bool> used(n, false);
    for (const auto v : contour)
    {
        used[v] = true;
    }
    std::vector<std::uint32_t> remaining;
    for (std::uint32_t v = 0; v < n; ++v)
    {
        if (!used[v])
        {
            remaining.push_back(v);
        }
    }
    m.landmark_indices = contour;
    for (const auto k : rng.sample_without_replacement(static_cast<std::uint32_t>(remaining.size()), L - n_contour))
    {
        m.landmark_indices.push_back(remaining[k]);
    }

    const std::uint32_t q_count = std::min(contour_candidates_per_slot, n);
    for (std::uint32_t slot = 0; slot < n_contour; ++slot)
    {
        const auto nominal = m.landmark_indices[slot];
        const Eigen::Vector3d p = m.mean_shape.segment<3>(3 * nominal);
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::vector<double> dist(n);
        for (std::uint32_t v = 0; v < n; ++v)
        {
            dist[v] = (m.mean_shape.segment<3>(3 * v) - p).squaredNorm();
        }
        std::partial_sort(order.begin(), order.begin() + q_count, order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
        });
        order.resize(q_count);
        m.contour_candidates.push_back({slot, std::move(order)});
    }

    validate(m);
    return m;
}

/// Landmark noise models applied to clean projections.
struct NoiseNone
{
};

/// Isotropic Gaussian noise with the given stddev (pixels) on every coordinate.
struct NoiseGaussian
{
    double sigma = 0.0;
};

/// Per-landmark stddev drawn uniformly from [sigma_min, sigma_max], then isotropic Gaussian.
struct NoiseHeteroscedastic
{
    double sigma_min = 0.0;
    double sigma_max = 0.0;
};

/**
 * Each landmark is an outlier with probability fraction; outliers are moved
 * by a radius uniform in [radius_min, radius_max] in a uniformly random direction.
 */
struct NoiseOutlier
{
    double fraction = 0.0;
    double radius_min = 0.0;
    double radius_max = 0.0;
};

using NoiseSpec = std::variant<NoiseNone, NoiseGaussian, NoiseHeteroscedastic, NoiseOutlier>;

inline void validate(const NoiseSpec& noise)
{
    const auto bad = [](const char* what) { throw ConfigError(std::string("noise spec: ") + what); };
    if (const auto* g = std::get_if<NoiseGaussian>(&noise))
    {
        if (!(g->sigma >= 0.0) || !std::isfinite(g->sigma))
            bad("gaussian sigma must be finite and >= 0");
    }
    else if (const auto* h = std::get_if<NoiseHeteroscedastic>(&noise))
    {
        if (!(h->sigma_min >= 0.0 && h->sigma_max >= h->sigma_min) || !std::isfinite(h->sigma_max))
            bad("heteroscedastic range must satisfy 0 <= a <= b");
    }
    else if (const auto* o = std::get_if<NoiseOutlier>(&noise))
    {
        if (!(o->fraction >= 0.0 && o->fraction <= 1.0))
            bad("outlier fraction must be in [0, 1]");
        if (!(o->radius_min >= 0.0 && o->radius_max >= o->radius_min) || !std::isfinite(o->radius_max))
            bad("outlier radii must satisfy 0 <= r1 <= r2");
    }
}

/**
 * Pose of a synthetic scene. Angles in degrees. The jitter fields add a
 * uniform random perturbation in [-jitter, jitter] to pitch and roll (not yaw)
 * and to the image-plane translation.
 */
struct PoseSpec
{
    double yaw_degrees = 0.0;
    double pitch_degrees = 0.0;
    double roll_degrees = 0.0;
    double scale = 1.5;
    double tx = 0.0;
    double ty = 0.0;
    double angle_jitter_degrees = 0.0;
    double translation_jitter = 0.0;
};

struct GroundTruthScene
{
    ShapeCoefficients true_coeffs;
    camera::Pose true_pose;
    Eigen::VectorXd clean_landmarks_2d;
    Eigen::VectorXd noisy_landmarks_2d;
    NoiseSpec noise_spec;
    std::uint64_t seed = 0;
};

inline double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }
inline double radians_to_degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

/**
 * Samples one scene: coefficients from the model's PCA prior (truncated at
 * 3 sigma), a pose from pose_spec, clean landmark projections, and the noisy
 * observations.
 */
inline GroundTruthScene synth_scene(const MorphableModel& model, std::uint64_t seed, const NoiseSpec& noise,
                                    const PoseSpec& pose_spec)
{
    validate(model);
    validate(noise);
    if (!(pose_spec.scale > 0.0))
    {
        throw ConfigError("pose spec: scale must be positive");
    }
    Random rng(seed);
    GroundTruthScene scene;
    scene.seed = seed;
    scene.noise_spec = noise;

    scene.true_coeffs = zero_coefficients(model);
    for (Eigen::Index i = 0; i < model.num_id(); ++i)
    {
        scene.true_coeffs.alpha_id(i) = rng.truncated_normal(model.id_stddev(i), 3.0);
    }
    for (Eigen::Index i = 0; i < model.num_exp(); ++i)
    {
        scene.true_coeffs.alpha_exp(i) = rng.truncated_normal(model.exp_stddev(i), 3.0);
    }

    const double aj = pose_spec.angle_jitter_degrees;
    const double tj = pose_spec.translation_jitter;
    camera::EulerAngles angles;
    angles.yaw = degrees_to_radians(pose_spec.yaw_degrees);
    angles.pitch = degrees_to_radians(pose_spec.pitch_degrees + rng.uniform(-aj, aj));
    angles.roll = degrees_to_radians(pose_spec.roll_degrees + rng.uniform(-aj, aj));
    const double tx = pose_spec.tx + rng.uniform(-tj, tj);
    const double ty = pose_spec.ty + rng.uniform(-tj, tj);
    scene.true_pose.scale = pose_spec.scale;
    scene.true_pose.rotation = camera::euler_to_rotation(angles);
    // Same gauge as estimate_pose: no translation along the viewing direction.
    scene.true_pose.translation = scene.true_pose.rotation.transpose() * Eigen::Vector3d(tx, ty, 0.0);

    const Eigen::VectorXd shape = instantiate_shape(model, scene.true_coeffs);
    scene.clean_landmarks_2d =
        camera::project(landmark_points_3d(model, shape, model.landmark_indices), scene.true_pose);

    Eigen::VectorXd noisy = scene.clean_landmarks_2d;
    const Eigen::Index L = static_cast<Eigen::Index>(model.num_landmarks());
    if (const auto* g = std::get_if<NoiseGaussian>(&noise))
    {
        for (Eigen::Index i = 0; i < 2 * L; ++i)
        {
            noisy(i) += g->sigma * rng.normal();
        }
    }
    else if (const auto* h = std::get_if<NoiseHeteroscedastic>(&noise))
    {
        for (Eigen::Index i = 0; i < L; ++i)
        {
            const double sigma = rng.uniform(h->sigma_min, h->sigma_max);
            noisy(2 * i) += sigma * rng.normal();
            noisy(2 * i + 1) += sigma * rng.normal();
        }
    }
    else if (const auto* o = std::get_if<NoiseOutlier>(&noise))
    {
        for (Eigen::Index i = 0; i < L; ++i)
        {
            // Draw all three variates for every landmark so the stream does not depend on the outcome.
            const bool is_outlier = rng.uniform01() < o->fraction;
            const double radius = rng.uniform(o->radius_min, o->radius_max);
            const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
            if (is_outlier)
            {
                noisy(2 * i) += radius * std::cos(angle);
                noisy(2 * i + 1) += radius * std::sin(angle);
            }
        }
    }
    scene.noisy_landmarks_2d = std::move(noisy);
    return scene;
}

} // namespace model
} // namespace wlfit

#endif /* WLFIT_MODEL_SYNTHETIC_HPP */
