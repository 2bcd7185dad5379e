/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/model/morphable_model.hpp
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

#ifndef WLFIT_MODEL_MORPHABLE_MODEL_HPP
#define WLFIT_MODEL_MORPHABLE_MODEL_HPP

#include "wlfit/core/error.hpp"

#include "Eigen/Core"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace wlfit {
namespace model {

/// Candidate vertices for one jaw-contour landmark slot, nearest first.
struct ContourSlot
{
    std::uint32_t slot;                    ///< index into landmark_indices
    std::vector<std::uint32_t> candidates; ///< vertex indices, candidates[0] is the nominal vertex

    bool operator==(const ContourSlot&) const = default;
};

/**
 * A linear shape model with separate identity and expression bases:
 *
 *   S = mean + id_basis * alpha_id + exp_basis * alpha_exp
 *
 * Shape vectors are interleaved per vertex, (X1, Y1, Z1, X2, ...).
 * Landmark slot i corresponds to vertex landmark_indices[i].
 */
struct MorphableModel
{
    Eigen::VectorXd mean_shape;  ///< 3 * n_vertices
    Eigen::MatrixXd id_basis;    ///< 3 * n_vertices x m_id
    Eigen::VectorXd id_stddev;   ///< m_id, strictly positive
    Eigen::MatrixXd exp_basis;   ///< 3 * n_vertices x k_exp
    Eigen::VectorXd exp_stddev;  ///< k_exp, strictly positive
    std::vector<std::uint32_t> landmark_indices;
    std::vector<ContourSlot> contour_candidates; ///< empty if the model has none
    std::vector<std::array<std::uint32_t, 3>> triangles; ///< empty if the model has no topology

    Eigen::Index n_vertices() const { return mean_shape.size() / 3; }
    Eigen::Index num_id() const { return id_basis.cols(); }
    Eigen::Index num_exp() const { return exp_basis.cols(); }
    std::size_t num_landmarks() const { return landmark_indices.size(); }
    bool has_contours() const { return !contour_candidates.empty(); }
    bool has_triangles() const { return !triangles.empty(); }
};

struct ShapeCoefficients
{
    Eigen::VectorXd alpha_id;
    Eigen::VectorXd alpha_exp;
};

/// Zero coefficients sized for the given model.
inline ShapeCoefficients zero_coefficients(const MorphableModel& model)
{
    return {Eigen::VectorXd::Zero(model.num_id()), Eigen::VectorXd::Zero(model.num_exp())};
}

/**
 * Checks every structural invariant of a model and throws DimensionError or
 * NumericError naming the first violation.
 */
inline void validate(const MorphableModel& model)
{
    using wlfit::detail::require_dimension;
    const Eigen::Index rows = model.mean_shape.size();
    require_dimension(rows > 0 && rows % 3 == 0, "mean_shape length must be a positive multiple of 3");
    require_dimension(model.id_basis.rows() == rows, "id_basis row count does not match mean_shape");
    require_dimension(model.exp_basis.rows() == rows, "exp_basis row count does not match mean_shape");
    require_dimension(model.id_basis.cols() >= 1, "id_basis needs at least one column");
    require_dimension(model.exp_basis.cols() >= 1, "exp_basis needs at least one column");
    require_dimension(model.id_stddev.size() == model.id_basis.cols(),
                      "id_stddev length does not match id_basis columns");
    require_dimension(model.exp_stddev.size() == model.exp_basis.cols(),
                      "exp_stddev length does not match exp_basis columns");
    if (!model.mean_shape.allFinite() || !model.id_basis.allFinite() || !model.exp_basis.allFinite())
    {
        throw NumericError("model contains non-finite shape or basis entries");
    }
    if (!(model.id_stddev.array() > 0.0).all() || !(model.exp_stddev.array() > 0.0).all() ||
        !model.id_stddev.allFinite() || !model.exp_stddev.allFinite())
    {
        throw NumericError("model standard deviations must be finite and strictly positive");
    }

    const auto n = static_cast<std::uint64_t>(model.n_vertices());
    require_dimension(!model.landmark_indices.empty(), "model has no landmarks");
    std::unordered_set<std::uint32_t> seen;
    for (const auto idx : model.landmark_indices)
    {
        require_dimension(idx < n, "landmark index " + std::to_string(idx) + " out of range");
        require_dimension(seen.insert(idx).second, "duplicate landmark index " + std::to_string(idx));
    }
    for (const auto& tri : model.triangles)
    {
        for (const auto v : tri)
        {
            require_dimension(v < n, "triangle vertex index " + std::to_string(v) + " out of range");
        }
    }
    std::unordered_set<std::uint32_t> slots;
    for (const auto& c : model.contour_candidates)
    {
        require_dimension(c.slot < model.num_landmarks(), "contour slot out of range");
        require_dimension(slots.insert(c.slot).second, "duplicate contour slot");
        require_dimension(!c.candidates.empty(), "contour slot has no candidates");
        for (const auto v : c.candidates)
        {
            require_dimension(v < n, "contour candidate index out of range");
        }
    }
}

/// mean + id_basis * alpha_id + exp_basis * alpha_exp.
inline Eigen::VectorXd instantiate_shape(const MorphableModel& model, const ShapeCoefficients& coeffs)
{
    wlfit::detail::require_dimension(coeffs.alpha_id.size() == model.num_id(),
                              "alpha_id has " + std::to_string(coeffs.alpha_id.size()) +
                                  " entries, model has " + std::to_string(model.num_id()) + " identity bases");
    wlfit::detail::require_dimension(coeffs.alpha_exp.size() == model.num_exp(),
                              "alpha_exp has " + std::to_string(coeffs.alpha_exp.size()) +
                                  " entries, model has " + std::to_string(model.num_exp()) +
                                  " expression bases");
    return model.mean_shape + model.id_basis * coeffs.alpha_id + model.exp_basis * coeffs.alpha_exp;
}

/// Row indices (3 per vertex) selecting the given vertices from a shape vector or basis.
inline std::vector<Eigen::Index> vertex_rows(std::span<const std::uint32_t> indices)
{
    std::vector<Eigen::Index> rows;
    rows.reserve(indices.size() * 3);
    for (const auto v : indices)
    {
        rows.push_back(3 * static_cast<Eigen::Index>(v));
        rows.push_back(3 * static_cast<Eigen::Index>(v) + 1);
        rows.push_back(3 * static_cast<Eigen::Index>(v) + 2);
    }
    return rows;
}

/**
 * Gathers the (X, Y, Z) triplets of a full shape vector at the given vertex
 * indices, in the order given.
 */
inline Eigen::VectorXd landmark_points_3d(const MorphableModel& model, const Eigen::VectorXd& shape,
                                          std::span<const std::uint32_t> indices)
{
    wlfit::detail::require_dimension(shape.size() == model.mean_shape.size(),
                              "shape vector length does not match the model");
    const auto n = static_cast<std::uint64_t>(model.n_vertices());
    Eigen::VectorXd out(3 * static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i)
    {
        wlfit::detail::require_dimension(indices[i] < n,
                                  "vertex index " + std::to_string(indices[i]) + " out of range");
        out.segment<3>(3 * static_cast<Eigen::Index>(i)) = shape.segment<3>(3 * static_cast<Eigen::Index>(indices[i]));
    }
    return out;
}

/// Basis rows for the given vertices (3 rows per vertex).
inline Eigen::MatrixXd restrict_rows(const Eigen::MatrixXd& basis, std::span<const std::uint32_t> indices)
{
    return basis(vertex_rows(indices), Eigen::all);
}

} // namespace model
} // namespace wlfit

#endif /* WLFIT_MODEL_MORPHABLE_MODEL_HPP */
