/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/io/obj.hpp
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

#ifndef WLFIT_IO_OBJ_HPP
#define WLFIT_IO_OBJ_HPP

#include "wlfit/core/error.hpp"

#include "Eigen/Core"

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>

namespace wlfit {
namespace io {

/**
 * Writes a shape vector as Wavefront OBJ: one "v x y z" line per vertex with
 * 6 decimals, then one "f a b c" line per triangle (1-based), if any.
 */
inline void format_obj(std::ostream& out, const Eigen::VectorXd& shape3d,
                       std::span<const std::array<std::uint32_t, 3>> triangles = {})
{
    wlfit::detail::require_dimension(shape3d.size() % 3 == 0, "write_obj: shape length must be a multiple of 3");
    if (!shape3d.allFinite())
    {
        throw NumericError("write_obj: shape contains non-finite values");
    }
    const Eigen::Index n = shape3d.size() / 3;
    char buf[128];
    for (Eigen::Index i = 0; i < n; ++i)
    {
        std::snprintf(buf, sizeof(buf), "v %.6f %.6f %.6f\n", shape3d(3 * i), shape3d(3 * i + 1), shape3d(3 * i + 2));
        out << buf;
    }
    for (const auto& t : triangles)
    {
        for (const auto v : t)
        {
            wlfit::detail::require_dimension(v < static_cast<std::uint64_t>(n), "write_obj: face index out of range");
        }
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
}

inline void write_obj(const std::filesystem::path& path, const Eigen::VectorXd& shape3d,
                      std::span<const std::array<std::uint32_t, 3>> triangles = {})
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
    {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    format_obj(out, shape3d, triangles);
    if (!out)
    {
        throw std::runtime_error("failed writing " + path.string());
    }
}

} // namespace io
} // namespace wlfit

#endif /* WLFIT_IO_OBJ_HPP */
