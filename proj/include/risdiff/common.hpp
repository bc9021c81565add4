// SPDX-License-Identifier: Apache-2.0
//
// risdiff: link-level simulator for RIS-aided differential SIMO-OFDM beam training
// Copyright (C) 2026 The risdiff contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace risdiff
{
    using cplx = std::complex<double>;
    using CVector = std::vector<cplx>;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double two_pi = 2.0 * std::numbers::pi;

    // Raised for invalid user configuration. `field` holds the dotted path of the offending entry.
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(const std::string &field, const std::string &what)
            : std::runtime_error(field + ": " + what), field_(field) {}
        const std::string &field() const noexcept { return field_; }

    private:
        std::string field_;
    };

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
    inline double deg_to_rad(double deg) { return deg * pi / 180.0; }

    // Wraps an azimuth into [-pi, pi)
    inline double wrap_azimuth(double a)
    {
        double w = std::fmod(a + pi, two_pi);
        if (w < 0.0)
            w += two_pi;
        return w - pi;
    }

    // Wraps a phase into (-pi, pi]
    inline double wrap_phase(double a)
    {
        double w = std::remainder(a, two_pi);
        if (w <= -pi)
            w += two_pi;
        return w;
    }

    // Dense row-major 2-D array
    template <typename T>
    class Array2
    {
    public:
        Array2() = default;
        Array2(std::size_t rows, std::size_t cols, T fill = T{})
            : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

        std::size_t rows() const noexcept { return rows_; }
        std::size_t cols() const noexcept { return cols_; }
        std::size_t size() const noexcept { return data_.size(); }

        T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
        const T &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

        std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
        std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

        T *data() noexcept { return data_.data(); }
        const T *data() const noexcept { return data_.data(); }
        std::vector<T> &values() noexcept { return data_; }
        const std::vector<T> &values() const noexcept { return data_; }

    private:
        std::size_t rows_ = 0, cols_ = 0;
        std::vector<T> data_;
    };

    // Dense row-major 3-D array
    template <typename T>
    class Array3
    {
    public:
        Array3() = default;
        Array3(std::size_t n0, std::size_t n1, std::size_t n2, T fill = T{})
            : n0_(n0), n1_(n1), n2_(n2), data_(n0 * n1 * n2, fill) {}

        std::size_t dim0() const noexcept { return n0_; }
        std::size_t dim1() const noexcept { return n1_; }
        std::size_t dim2() const noexcept { return n2_; }
        std::size_t size() const noexcept { return data_.size(); }

        T &operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * n1_ + j) * n2_ + k]; }
        const T &operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[(i * n1_ + j) * n2_ + k]; }

        std::span<T> slice(std::size_t i, std::size_t j) { return {data_.data() + (i * n1_ + j) * n2_, n2_}; }
        std::span<const T> slice(std::size_t i, std::size_t j) const { return {data_.data() + (i * n1_ + j) * n2_, n2_}; }

        std::vector<T> &values() noexcept { return data_; }
        const std::vector<T> &values() const noexcept { return data_; }

    private:
        std::size_t n0_ = 0, n1_ = 0, n2_ = 0;
        std::vector<T> data_;
    };

    using CMatrix = Array2<cplx>;
    using CTensor3 = Array3<cplx>;

    // Hermitian inner product a^H b
    inline cplx inner(std::span<const cplx> a, std::span<const cplx> b)
    {
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            acc += std::conj(a[i]) * b[i];
        return acc;
    }

    inline double norm_sq(std::span<const cplx> a)
    {
        double acc = 0.0;
        for (const auto &v : a)
            acc += std::norm(v);
        return acc;
    }
}
