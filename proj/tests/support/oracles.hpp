/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: tests/support/oracles.hpp
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

#ifndef WLFIT_TESTS_ORACLES_HPP
#define WLFIT_TESTS_ORACLES_HPP

#include "Eigen/Core"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

// Independent reference implementations used by the tests. They use plain
// loops and std::vector only, so they share no code path with the library.
namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>; // row-major

inline Vec to_vec(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

inline Mat to_mat(const Eigen::MatrixXd& m)
{
    Mat out(static_cast<std::size_t>(m.rows()), Vec(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out[r][c] = m(r, c);
    return out;
}

/// mean + sum_j basis[:, j] * coeff[j], element by element.
inline Vec linear_combination(const Vec& mean, const Mat& id_basis, const Vec& a_id, const Mat& exp_basis,
                              const Vec& a_exp)
{
    Vec out(mean.size());
    for (std::size_t r = 0; r < mean.size(); ++r)
    {
        double s = mean[r];
        for (std::size_t j = 0; j < a_id.size(); ++j)
            s += id_basis[r][j] * a_id[j];
        for (std::size_t j = 0; j < a_exp.size(); ++j)
            s += exp_basis[r][j] * a_exp[j];
        out[r] = s;
    }
    return out;
}

/// Weak-perspective camera in plain arrays.
struct Camera
{
    double f = 1.0;
    double R[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    double t[3] = {0, 0, 0};
};

/// (x, y) = f * R[0:2] * (v + t), per vertex.
inline Vec project(const Vec& points3d, const Camera& cam)
{
    const std::size_t n = points3d.size() / 3;
    Vec out(2 * n);
    for (std::size_t i = 0; i < n; ++i)
    {
        double v[3];
        for (int k = 0; k < 3; ++k)
            v[k] = points3d[3 * i + k] + cam.t[k];
        for (int r = 0; r < 2; ++r)
        {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                s += cam.R[r][k] * v[k];
            out[2 * i + r] = cam.f * s;
        }
    }
    return out;
}

/// One coefficient block of the weighted, regularised landmark objective in plain arrays.
struct Problem
{
    Mat basis;   // 3L x M
    Vec stddev;  // M
    Camera cam;  // translation ignored (folded into offset)
    Vec offset;  // 3L
    Vec observed; // 2L
    Vec weights;  // L
    double lambda = 0.0;

    std::size_t L() const { return weights.size(); }
    std::size_t M() const { return stddev.size(); }

    /// Row 2i + r of the weighted design: w_i * f * sum_k R[r][k] * basis[3i + k][j].
    double design(std::size_t row, std::size_t j) const
    {
        const std::size_t i = row / 2, r = row % 2;
        double s = 0.0;
        for (int k = 0; k < 3; ++k)
            s += cam.R[r][k] * basis[3 * i + k][j];
        return weights[i] * cam.f * s;
    }

    double target(std::size_t row) const
    {
        const std::size_t i = row / 2, r = row % 2;
        double s = 0.0;
        for (int k = 0; k < 3; ++k)
            s += cam.R[r][k] * offset[3 * i + k];
        return weights[i] * (observed[row] - cam.f * s);
    }

    Vec residual(const Vec& alpha) const
    {
        Vec res(2 * L());
        for (std::size_t row = 0; row < res.size(); ++row)
        {
            double s = target(row);
            for (std::size_t j = 0; j < M(); ++j)
                s -= design(row, j) * alpha[j];
            res[row] = s;
        }
        return res;
    }

    double value(const Vec& alpha) const
    {
        double e = 0.0;
        for (const double r : residual(alpha))
            e += r * r;
        for (std::size_t j = 0; j < M(); ++j)
            e += lambda * alpha[j] * alpha[j] / stddev[j];
        return e;
    }

    Vec gradient(const Vec& alpha) const
    {
        const Vec res = residual(alpha);
        Vec g(M(), 0.0);
        for (std::size_t j = 0; j < M(); ++j)
        {
            double s = 0.0;
            for (std::size_t row = 0; row < res.size(); ++row)
                s += design(row, j) * res[row];
            g[j] = -2.0 * s + 2.0 * lambda * alpha[j] / stddev[j];
        }
        return g;
    }
};

inline double dot(const Vec& a, const Vec& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

/**
 * Gradient-based minimiser: conjugate gradients with an exact line search.
 * Curvature along a direction is measured from two gradient evaluations,
 * which is exact for a quadratic. Restarts every M steps.
 */
inline Vec minimise(const Problem& p, int max_sweeps = 200)
{
    const std::size_t M = p.M();
    Vec alpha(M, 0.0);
    const double g0 = norm(p.gradient(alpha));
    for (int sweep = 0; sweep < max_sweeps; ++sweep)
    {
        Vec g = p.gradient(alpha);
        if (norm(g) <= 1e-15 * (1.0 + g0))
            break;
        Vec d(M);
        for (std::size_t j = 0; j < M; ++j)
            d[j] = -g[j];
        for (std::size_t step = 0; step < M; ++step)
        {
            Vec probe(M);
            for (std::size_t j = 0; j < M; ++j)
                probe[j] = alpha[j] + d[j];
            const Vec g_probe = p.gradient(probe);
            Vec hd(M);
            for (std::size_t j = 0; j < M; ++j)
                hd[j] = g_probe[j] - g[j];
            const double curvature = dot(d, hd);
            if (!(curvature > 0.0))
                break;
            const double t = -dot(g, d) / curvature;
            for (std::size_t j = 0; j < M; ++j)
                alpha[j] += t * d[j];
            const Vec g_new = p.gradient(alpha);
            const double beta = dot(g_new, g_new) / dot(g, g);
            for (std::size_t j = 0; j < M; ++j)
                d[j] = -g_new[j] + beta * d[j];
            g = g_new;
            if (norm(g) <= 1e-15 * (1.0 + g0))
                break;
        }
    }
    return alpha;
}

/// Solves a small dense system by Gaussian elimination with partial pivoting.
inline Vec gauss_solve(Mat a, Vec b)
{
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c)
    {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c]))
                piv = r;
        if (a[piv][c] == 0.0)
            throw std::runtime_error("gauss_solve: singular");
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r)
        {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k)
                a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;)
    {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k)
            s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

/// Ordinary least squares via normal equations accumulated term by term (weights and lambda ignored).
inline Vec ols(const Problem& p)
{
    Problem plain = p;
    plain.weights.assign(p.L(), 1.0);
    const std::size_t M = p.M(), rows = 2 * p.L();
    Mat ata(M, Vec(M, 0.0));
    Vec atb(M, 0.0);
    for (std::size_t row = 0; row < rows; ++row)
    {
        for (std::size_t i = 0; i < M; ++i)
        {
            const double ai = plain.design(row, i);
            atb[i] += ai * plain.target(row);
            for (std::size_t j = 0; j < M; ++j)
                ata[i][j] += ai * plain.design(row, j);
        }
    }
    return gauss_solve(ata, atb);
}

/// Central-difference gradient of the objective.
inline Vec fd_gradient(const Problem& p, const Vec& alpha)
{
    Vec g(p.M());
    for (std::size_t j = 0; j < p.M(); ++j)
    {
        const double h = 1e-4 * (1.0 + std::abs(alpha[j]));
        Vec up = alpha, down = alpha;
        up[j] += h;
        down[j] -= h;
        g[j] = (p.value(up) - p.value(down)) / (2.0 * h);
    }
    return g;
}

/// Per-landmark 2D distances.
inline Vec distances(const Vec& a, const Vec& b)
{
    Vec d(a.size() / 2);
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        const double dx = a[2 * i] - b[2 * i];
        const double dy = a[2 * i + 1] - b[2 * i + 1];
        d[i] = std::sqrt(dx * dx + dy * dy);
    }
    return d;
}

/// sqrt(mean_i d_i^2) over landmarks.
inline double landmark_rms(const Vec& a, const Vec& b)
{
    double s = 0.0;
    const Vec d = distances(a, b);
    for (const double x : d)
        s += x * x;
    return std::sqrt(s / static_cast<double>(d.size()));
}

/// Rotation from three angles, R = Rz(roll) Ry(yaw) Rx(pitch), written out by hand.
inline void euler_rotation(double pitch, double yaw, double roll, double R[3][3])
{
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    const double cr = std::cos(roll), sr = std::sin(roll);
    R[0][0] = cr * cy;
    R[0][1] = cr * sy * sp - sr * cp;
    R[0][2] = cr * sy * cp + sr * sp;
    R[1][0] = sr * cy;
    R[1][1] = sr * sy * sp + cr * cp;
    R[1][2] = sr * sy * cp - cr * sp;
    R[2][0] = -sy;
    R[2][1] = cy * sp;
    R[2][2] = cy * cp;
}

} // namespace oracle

#endif /* WLFIT_TESTS_ORACLES_HPP */
