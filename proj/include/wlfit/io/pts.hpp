/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/io/pts.hpp
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

#ifndef WLFIT_IO_PTS_HPP
#define WLFIT_IO_PTS_HPP

#include "wlfit/core/error.hpp"

#include "Eigen/Core"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wlfit {
namespace io {

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < s.size())
    {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
            ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t')
            ++i;
        if (i > start)
            tokens.push_back(s.substr(start, i - start));
    }
    return tokens;
}

inline bool parse_double(std::string_view token, double& out)
{
    if (!token.empty() && token.front() == '+')
    {
        token.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size();
}

} // namespace detail

/**
 * Reads an iBUG .pts landmark file:
 *
 *   version: 1
 *   n_points: <L>
 *   {
 *   x y          (L lines)
 *   }
 *
 * Returns the interleaved 2L vector. Errors carry the 1-based line number.
 */
inline Eigen::VectorXd parse_pts(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    const auto next = [&](const char* expected) -> std::string_view {
        if (!std::getline(in, line))
        {
            throw FormatError::at_line(line_no + 1, std::string("unexpected end of file, expected ") + expected);
        }
        ++line_no;
        return detail::trim(line);
    };

    {
        const auto t = detail::split_ws(next("version line"));
        if (t.size() != 2 || t[0] != "version:" || t[1] != "1")
        {
            throw FormatError::at_line(line_no, "expected \"version: 1\"");
        }
    }
    long long n_points = 0;
    {
        const auto t = detail::split_ws(next("n_points line"));
        if (t.size() != 2 || t[0] != "n_points:")
        {
            throw FormatError::at_line(line_no, "expected \"n_points: <count>\"");
        }
        const auto [ptr, ec] = std::from_chars(t[1].data(), t[1].data() + t[1].size(), n_points);
        if (ec != std::errc() || ptr != t[1].data() + t[1].size() || n_points <= 0)
        {
            throw FormatError::at_line(line_no, "n_points must be a positive integer");
        }
    }
    if (next("\"{\"") != "{")
    {
        throw FormatError::at_line(line_no, "expected \"{\"");
    }
    Eigen::VectorXd out(2 * n_points);
    for (long long i = 0; i < n_points; ++i)
    {
        const auto text = next("a point line");
        if (text == "}")
        {
            throw FormatError::at_line(line_no, "expected " + std::to_string(n_points) + " points, found " +
                                                    std::to_string(i) + " before \"}\"");
        }
        const auto t = detail::split_ws(text);
        double x = 0.0, y = 0.0;
        if (t.size() != 2 || !detail::parse_double(t[0], x) || !detail::parse_double(t[1], y))
        {
            throw FormatError::at_line(line_no, "malformed point line \"" + std::string(text) + "\"");
        }
        out(2 * i) = x;
        out(2 * i + 1) = y;
    }
    if (next("\"}\"") != "}")
    {
        throw FormatError::at_line(line_no, "expected \"}\" after " + std::to_string(n_points) + " points");
    }
    while (std::getline(in, line))
    {
        ++line_no;
        if (!detail::trim(line).empty())
        {
            throw FormatError::at_line(line_no, "unexpected content after \"}\"");
        }
    }
    return out;
}

inline Eigen::VectorXd read_pts(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw std::runtime_error("cannot open " + path.string());
    }
    return parse_pts(in);
}

/// Writes the interleaved 2L vector as a .pts file with 6 decimals per coordinate.
inline void format_pts(std::ostream& out, const Eigen::VectorXd& points2d)
{
    wlfit::detail::require_dimension(points2d.size() > 0 && points2d.size() % 2 == 0,
                                     "write_pts: need a non-empty even-length coordinate vector");
    const Eigen::Index n = points2d.size() / 2;
    out << "version: 1\nn_points: " << n << "\n{\n";
    char buf[96];
    for (Eigen::Index i = 0; i < n; ++i)
    {
        std::snprintf(buf, sizeof(buf), "%.6f %.6f\n", points2d(2 * i), points2d(2 * i + 1));
        out << buf;
    }
    out << "}\n";
}

inline void write_pts(const std::filesystem::path& path, const Eigen::VectorXd& points2d)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
    {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    format_pts(out, points2d);
    if (!out)
    {
        throw std::runtime_error("failed writing " + path.string());
    }
}

} // namespace io
} // namespace wlfit

#endif /* WLFIT_IO_PTS_HPP */
