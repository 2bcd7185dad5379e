/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: tests/support/fixtures.hpp
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

#ifndef WLFIT_TESTS_FIXTURES_HPP
#define WLFIT_TESTS_FIXTURES_HPP

#include "oracles.hpp"

#include "wlfit/camera/pose.hpp"
#include "wlfit/fitting/coefficient_solver.hpp"
#include "wlfit/model/synthetic.hpp"

#include "Eigen/Core"
#include "Eigen/Geometry"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace fixtures {

/// Default synthetic model (n=500, m_id=20, k_exp=10, L=68), built once.
inline const wlfit::model::MorphableModel& default_model()
{
    static const wlfit::model::MorphableModel m = wlfit::model::synth_model({}, 1);
    return m;
}

/// A uniformly distributed random rotation (via a normalised quaternion).
inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> n01;
    Eigen::Quaterniond q(n01(rng), n01(rng), n01(rng), n01(rng));
    q.normalize();
    return q.toRotationMatrix();
}

inline wlfit::camera::Pose random_pose(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> scale(0.3, 3.0), shift(-50.0, 50.0);
    wlfit::camera::Pose pose;
    pose.scale = scale(rng);
    pose.rotation = random_rotation(rng);
    pose.translation = Eigen::Vector3d(shift(rng), shift(rng), shift(rng));
    return pose;
}

inline oracle::Camera to_camera(const wlfit::camera::Pose& pose)
{
    oracle::Camera c;
    c.f = pose.scale;
    for (int r = 0; r < 3; ++r)
    {
        c.t[r] = pose.translation(r);
        for (int k = 0; k < 3; ++k)
            c.R[r][k] = pose.rotation(r, k);
    }
    return c;
}

/// Random coefficient block with L landmarks and M coefficients, owning its data.
struct RandomBlock
{
    Eigen::MatrixXd basis;
    Eigen::VectorXd stddevs;
    wlfit::camera::Pose pose;
    Eigen::VectorXd offset;
    Eigen::VectorXd observed;
    Eigen::VectorXd weights;
    double lambda = 0.0;

    RandomBlock(std::mt19937_64& rng, Eigen::Index L, Eigen::Index M, double lambda_)
        : basis(3 * L, M), stddevs(M), offset(3 * L), observed(2 * L), weights(L), lambda(lambda_)
    {
        std::normal_distribution<double> n01;
        std::uniform_real_distribution<double> sd(0.5, 5.0), w(0.5, 3.0);
        for (Eigen::Index i = 0; i < basis.size(); ++i)
            basis.data()[i] = n01(rng);
        for (Eigen::Index i = 0; i < M; ++i)
            stddevs(i) = sd(rng);
        for (Eigen::Index i = 0; i < offset.size(); ++i)
            offset(i) = 10.0 * n01(rng);
        for (Eigen::Index i = 0; i < observed.size(); ++i)
            observed(i) = 10.0 * n01(rng);
        for (Eigen::Index i = 0; i < L; ++i)
            weights(i) = w(rng);
        pose = random_pose(rng);
        pose.translation.setZero();
    }

    wlfit::fitting::LinearBlock block() const { return {basis, stddevs, pose, offset, observed, weights, lambda}; }

    oracle::Problem problem() const
    {
        oracle::Problem p;
        p.basis = oracle::to_mat(basis);
        p.stddev = oracle::to_vec(stddevs);
        p.cam = to_camera(pose);
        p.offset = oracle::to_vec(offset);
        p.observed = oracle::to_vec(observed);
        p.weights = oracle::to_vec(weights);
        p.lambda = lambda;
        return p;
    }
};

inline double relative_error(const Eigen::VectorXd& got, const oracle::Vec& want)
{
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i)
    {
        diff += (got(static_cast<Eigen::Index>(i)) - want[i]) * (got(static_cast<Eigen::Index>(i)) - want[i]);
        ref += want[i] * want[i];
    }
    return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-300);
}

/// Scratch directory under the build tree, unique per test name.
inline std::filesystem::path scratch_dir(const std::string& name)
{
#ifdef WLFIT_TEST_TMPDIR
    std::filesystem::path root = WLFIT_TEST_TMPDIR;
#else
    std::filesystem::path root = std::filesystem::temp_directory_path() / "wlfit_tests";
#endif
    const auto dir = root / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace fixtures

#endif /* WLFIT_TESTS_FIXTURES_HPP */
