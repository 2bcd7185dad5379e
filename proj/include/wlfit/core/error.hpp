/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/core/error.hpp
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

#ifndef WLFIT_CORE_ERROR_HPP
#define WLFIT_CORE_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace wlfit {

/**
 * Thrown when the sizes of inputs do not agree (coefficient count vs. model,
 * landmark vectors of different lengths, out-of-range vertex indices, ...).
 */
class DimensionError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Thrown for numerically degenerate problems: singular normal equations,
 * collinear point sets, non-finite inputs, zero scale.
 */
class NumericError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or generator spec.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * A malformed file. Carries the byte offset (binary formats) or the 1-based
 * line number (text formats) where parsing failed.
 */
class FormatError : public std::runtime_error
{
public:
    enum class Location { byte_offset, line };

    FormatError(Location kind, std::size_t where, const std::string& what)
        : std::runtime_error(describe(kind, where, what)), kind_(kind), where_(where)
    {
    }

    static FormatError at_offset(std::size_t offset, const std::string& what)
    {
        return FormatError(Location::byte_offset, offset, what);
    }

    static FormatError at_line(std::size_t line, const std::string& what)
    {
        return FormatError(Location::line, line, what);
    }

    Location location_kind() const noexcept { return kind_; }

    /// Byte offset or line number, depending on location_kind().
    std::size_t location() const noexcept { return where_; }

private:
    static std::string describe(Location kind, std::size_t where, const std::string& what)
    {
        return (kind == Location::byte_offset ? "at byte offset " : "at line ") + std::to_string(where) +
               ": " + what;
    }

    Location kind_;
    std::size_t where_;
};

namespace detail {

inline void require_dimension(bool condition, const std::string& message)
{
    if (!condition)
    {
        throw DimensionError(message);
    }
}

} // namespace detail

} // namespace wlfit

#endif /* WLFIT_CORE_ERROR_HPP */
