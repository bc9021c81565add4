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

#include "risdiff/common.hpp"

#include <algorithm>

namespace risdiff
{
    struct Position
    {
        double x = 0.0, y = 0.0, z = 0.0;
    };

    // Azimuth in [-pi, pi), zenith in [0, pi], global frame
    struct Direction
    {
        double azimuth = 0.0;
        double zenith = 0.0;
    };

    // Uniform rectangular array in the xy-plane. Element spacings are in wavelengths.
    struct ArrayGeometry
    {
        int n_h = 1;
        int n_v = 1;
        double spacing_h = 0.5;
        double spacing_v = 0.5;

        std::size_t size() const noexcept { return static_cast<std::size_t>(n_h) * static_cast<std::size_t>(n_v); }

        void validate() const
        {
            if (n_h < 1 || n_v < 1)
                throw std::invalid_argument("ArrayGeometry: element counts must be >= 1");
            if (!(spacing_h > 0.0) || !(spacing_v > 0.0))
                throw std::invalid_argument("ArrayGeometry: element spacing must be positive");
        }
    };

    // Direction of `to` as seen from `from`
    inline Direction direction_to(const Position &from, const Position &to)
    {
        double dx = to.x - from.x, dy = to.y - from.y, dz = to.z - from.z;
        double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (r == 0.0)
            throw std::invalid_argument("direction_to: coincident positions");
        Direction d;
        d.azimuth = wrap_azimuth(std::atan2(dy, dx));
        d.zenith = std::acos(std::clamp(dz / r, -1.0, 1.0));
        return d;
    }

    inline double distance(const Position &a, const Position &b)
    {
        double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    }

    // Kronecker steering vector a = a_x (x) a_y, element (bx, by) at index bx * n_v + by
    inline void steering_vector(const ArrayGeometry &geom, double azimuth, double zenith, std::span<cplx> out)
    {
        if (!std::isfinite(azimuth) || !std::isfinite(zenith))
            throw std::invalid_argument("steering_vector: non-finite angle");
        if (out.size() != geom.size())
            throw std::invalid_argument("steering_vector: output size mismatch");
        const double st = std::sin(zenith);
        const double ph_x = two_pi * geom.spacing_h * st * std::cos(azimuth);
        const double ph_y = two_pi * geom.spacing_v * st * std::sin(azimuth);
        for (int bx = 0; bx < geom.n_h; ++bx)
        {
            const cplx ax = std::polar(1.0, ph_x * bx);
            for (int by = 0; by < geom.n_v; ++by)
                out[static_cast<std::size_t>(bx) * geom.n_v + by] = ax * std::polar(1.0, ph_y * by);
        }
    }

    inline CVector steering_vector(const ArrayGeometry &geom, double azimuth, double zenith)
    {
        geom.validate();
        CVector a(geom.size());
        steering_vector(geom, azimuth, zenith, a);
        return a;
    }

    inline CVector steering_vector(const ArrayGeometry &geom, const Direction &dir)
    {
        return steering_vector(geom, dir.azimuth, dir.zenith);
    }
}
