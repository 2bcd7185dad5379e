/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/io/model_io.hpp
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

#ifndef WLFIT_IO_MODEL_IO_HPP
#define WLFIT_IO_MODEL_IO_HPP

#include "wlfit/core/error.hpp"
#include "wlfit/model/morphable_model.hpp"

#include "Eigen/Core"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace wlfit {
namespace io {

/**
 * Binary model container ("M3DM", version 1). All values little-endian:
 *
 *   char[4]  magic "M3DM"
 *   uint16   version (1)
 *   uint32   n_vertices, m_id, k_exp, n_landmarks
 *   uint32   flags (bit 0: triangles, bit 1: contour candidates)
 *   float64  mean_shape[3n]
 *   float64  id_basis[3n * m_id]     column-major
 *   float64  id_stddev[m_id]
 *   float64  exp_basis[3n * k_exp]   column-major
 *   float64  exp_stddev[k_exp]
 *   uint32   landmark_indices[L]
 *   if flags bit 0:  uint32 count, then uint32[3 * count] triangle vertex indices
 *   if flags bit 1:  uint32 n_slots, then per slot: uint32 slot, uint32 count, uint32[count] candidates
 */
struct ModelFileHeader
{
    std::array<char, 4> magic{'M', '3', 'D', 'M'};
    std::uint16_t version = 1;
    std::uint32_t n_vertices = 0;
    std::uint32_t m_id = 0;
    std::uint32_t k_exp = 0;
    std::uint32_t n_landmarks = 0;
    std::uint32_t flags = 0;
};

inline constexpr std::uint16_t model_format_version = 1;
inline constexpr std::uint32_t flag_triangles = 1u << 0;
inline constexpr std::uint32_t flag_contours = 1u << 1;
inline constexpr std::size_t model_header_size = 26;

namespace detail {

class ByteWriter
{
public:
    void put_u16(std::uint16_t v) { put_le(v); }
    void put_u32(std::uint32_t v) { put_le(v); }
    void put_f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }
    void put_raw(const char* data, std::size_t n) { bytes_.insert(bytes_.end(), data, data + n); }

    template <class Vec>
    void put_f64_array(const Vec& v)
    {
        for (Eigen::Index i = 0; i < v.size(); ++i)
        {
            put_f64(v.data()[i]); // column-major storage order
        }
    }

    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    template <class U>
    void put_le(U v)
    {
        for (std::size_t i = 0; i < sizeof(U); ++i)
        {
            bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    std::vector<std::uint8_t> bytes_;
};

class ByteReader
{
public:
    explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    /// Throws unless count elements of elem_size bytes are available for the named section.
    void need(std::size_t count, std::size_t elem_size, const char* section) const
    {
        if (elem_size != 0 && count > remaining() / elem_size)
        {
            const std::string expected = count <= SIZE_MAX / elem_size ? std::to_string(count * elem_size)
                                                                        : "more than " + std::to_string(SIZE_MAX);
            throw FormatError::at_offset(pos_, std::string(section) + ": expected " + expected + " bytes, only " +
                                                   std::to_string(remaining()) + " available");
        }
    }

    std::uint16_t u16(const char* section) { return get_le<std::uint16_t>(section); }
    std::uint32_t u32(const char* section) { return get_le<std::uint32_t>(section); }
    double f64(const char* section) { return std::bit_cast<double>(get_le<std::uint64_t>(section)); }

    void f64_array(double* out, std::size_t count, const char* section)
    {
        need(count, 8, section);
        for (std::size_t i = 0; i < count; ++i)
        {
            out[i] = f64(section);
        }
    }

private:
    template <class U>
    U get_le(const char* section)
    {
        need(1, sizeof(U), section);
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i)
        {
            v |= static_cast<U>(static_cast<U>(bytes_[pos_ + i]) << (8 * i));
        }
        pos_ += sizeof(U);
        return v;
    }

    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Serialises a model to the M3DM byte layout. The model is validated first.
inline std::vector<std::uint8_t> encode_model(const model::MorphableModel& m)
{
    model::validate(m);
    detail::ByteWriter w;
    w.put_raw("M3DM", 4);
    w.put_u16(model_format_version);
    w.put_u32(static_cast<std::uint32_t>(m.n_vertices()));
    w.put_u32(static_cast<std::uint32_t>(m.num_id()));
    w.put_u32(static_cast<std::uint32_t>(m.num_exp()));
    w.put_u32(static_cast<std::uint32_t>(m.num_landmarks()));
    w.put_u32((m.has_triangles() ? flag_triangles : 0u) | (m.has_contours() ? flag_contours : 0u));
    w.put_f64_array(m.mean_shape);
    w.put_f64_array(m.id_basis);
    w.put_f64_array(m.id_stddev);
    w.put_f64_array(m.exp_basis);
    w.put_f64_array(m.exp_stddev);
    for (const auto idx : m.landmark_indices)
    {
        w.put_u32(idx);
    }
    if (m.has_triangles())
    {
        w.put_u32(static_cast<std::uint32_t>(m.triangles.size()));
        for (const auto& t : m.triangles)
        {
            w.put_u32(t[0]);
            w.put_u32(t[1]);
            w.put_u32(t[2]);
        }
    }
    if (m.has_contours())
    {
        w.put_u32(static_cast<std::uint32_t>(m.contour_candidates.size()));
        for (const auto& c : m.contour_candidates)
        {
            w.put_u32(c.slot);
            w.put_u32(static_cast<std::uint32_t>(c.candidates.size()));
            for (const auto v : c.candidates)
            {
                w.put_u32(v);
            }
        }
    }
    return w.take();
}

/**
 * Parses an M3DM byte buffer. Every failure is a FormatError carrying the byte
 * offset at which the problem was detected; no partially read model escapes.
 */
inline model::MorphableModel decode_model(const std::vector<std::uint8_t>& bytes)
{
    detail::ByteReader r(bytes);
    r.need(1, model_header_size, "header");
    if (std::memcmp(bytes.data(), "M3DM", 4) != 0)
    {
        throw FormatError::at_offset(0, "bad magic, expected \"M3DM\"");
    }
    r.u32("header"); // magic
    const std::size_t version_offset = r.offset();
    ModelFileHeader h;
    h.version = r.u16("header");
    if (h.version != model_format_version)
    {
        throw FormatError::at_offset(version_offset, "unsupported version " + std::to_string(h.version));
    }
    const std::size_t counts_offset = r.offset();
    h.n_vertices = r.u32("header");
    h.m_id = r.u32("header");
    h.k_exp = r.u32("header");
    h.n_landmarks = r.u32("header");
    const std::size_t flags_offset = r.offset();
    h.flags = r.u32("header");
    if (h.n_vertices == 0 || h.m_id == 0 || h.k_exp == 0 || h.n_landmarks == 0)
    {
        throw FormatError::at_offset(counts_offset, "header counts must all be positive");
    }
    if ((h.flags & ~(flag_triangles | flag_contours)) != 0)
    {
        throw FormatError::at_offset(flags_offset, "unknown flag bits " + std::to_string(h.flags));
    }

    model::MorphableModel m;
    const std::size_t rows = 3 * static_cast<std::size_t>(h.n_vertices);
    r.need(rows, 8, "mean_shape");
    m.mean_shape.resize(static_cast<Eigen::Index>(rows));
    r.f64_array(m.mean_shape.data(), rows, "mean_shape");
    r.need(rows, 8ull * h.m_id, "id_basis");
    m.id_basis.resize(static_cast<Eigen::Index>(rows), h.m_id);
    r.f64_array(m.id_basis.data(), rows * h.m_id, "id_basis");
    m.id_stddev.resize(h.m_id);
    r.f64_array(m.id_stddev.data(), h.m_id, "id_stddev");
    r.need(rows, 8ull * h.k_exp, "exp_basis");
    m.exp_basis.resize(static_cast<Eigen::Index>(rows), h.k_exp);
    r.f64_array(m.exp_basis.data(), rows * h.k_exp, "exp_basis");
    m.exp_stddev.resize(h.k_exp);
    r.f64_array(m.exp_stddev.data(), h.k_exp, "exp_stddev");

    r.need(h.n_landmarks, 4, "landmark_indices");
    m.landmark_indices.reserve(h.n_landmarks);
    for (std::uint32_t i = 0; i < h.n_landmarks; ++i)
    {
        const std::size_t at = r.offset();
        const auto v = r.u32("landmark_indices");
        if (v >= h.n_vertices)
        {
            throw FormatError::at_offset(at, "landmark index " + std::to_string(v) + " out of range");
        }
        m.landmark_indices.push_back(v);
    }

    const auto vertex = [&](const char* section) {
        const std::size_t at = r.offset();
        const auto v = r.u32(section);
        if (v >= h.n_vertices)
        {
            throw FormatError::at_offset(at, std::string(section) + ": vertex index " + std::to_string(v) +
                                                 " out of range");
        }
        return v;
    };
    if (h.flags & flag_triangles)
    {
        const std::size_t at = r.offset();
        const auto count = r.u32("triangles");
        if (count == 0)
        {
            throw FormatError::at_offset(at, "triangles flag set but the count is zero");
        }
        r.need(count, 12, "triangles");
        m.triangles.reserve(count);
        for (std::uint32_t t = 0; t < count; ++t)
        {
            const auto a = vertex("triangles");
            const auto b = vertex("triangles");
            const auto c = vertex("triangles");
            m.triangles.push_back({a, b, c});
        }
    }
    if (h.flags & flag_contours)
    {
        const std::size_t at = r.offset();
        const auto n_slots = r.u32("contour_candidates");
        if (n_slots == 0)
        {
            throw FormatError::at_offset(at, "contour flag set but the slot count is zero");
        }
        r.need(n_slots, 8, "contour_candidates");
        for (std::uint32_t s = 0; s < n_slots; ++s)
        {
            const std::size_t slot_at = r.offset();
            model::ContourSlot slot;
            slot.slot = r.u32("contour_candidates");
            if (slot.slot >= h.n_landmarks)
            {
                throw FormatError::at_offset(slot_at, "contour slot " + std::to_string(slot.slot) + " out of range");
            }
            const std::size_t count_at = r.offset();
            const auto count = r.u32("contour_candidates");
            if (count == 0)
            {
                throw FormatError::at_offset(count_at, "contour slot with no candidates");
            }
            r.need(count, 4, "contour_candidates");
            for (std::uint32_t k = 0; k < count; ++k)
            {
                slot.candidates.push_back(vertex("contour_candidates"));
            }
            m.contour_candidates.push_back(std::move(slot));
        }
    }
    if (r.remaining() != 0)
    {
        throw FormatError::at_offset(r.offset(), std::to_string(r.remaining()) + " trailing bytes after the model");
    }
    try
    {
        model::validate(m);
    }
    catch (const std::exception& e)
    {
        throw FormatError::at_offset(r.offset(), std::string("invalid model: ") + e.what());
    }
    return m;
}

inline void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
    {
        throw std::runtime_error("failed writing " + path.string());
    }
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw std::runtime_error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_model(const model::MorphableModel& m, const std::filesystem::path& path)
{
    write_bytes(path, encode_model(m));
}

inline model::MorphableModel read_model(const std::filesystem::path& path) { return decode_model(read_bytes(path)); }

} // namespace io
} // namespace wlfit

#endif /* WLFIT_IO_MODEL_IO_HPP */
