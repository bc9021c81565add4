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

#include "risdiff/channel.hpp"

#include <cstdio>
#include <ostream>

namespace risdiff
{
    // Unit-modulus RIS profile stored as phases in radians
    struct PhaseConfig
    {
        std::vector<double> phases;

        std::size_t size() const noexcept { return phases.size(); }

        CVector values() const
        {
            CVector v(phases.size());
            for (std::size_t m = 0; m < phases.size(); ++m)
                v[m] = std::polar(1.0, phases[m]);
            return v;
        }

        // Phases of an arbitrary complex vector; magnitudes are discarded
        static PhaseConfig from_values(std::span<const cplx> v)
        {
            PhaseConfig p;
            p.phases.resize(v.size());
            for (std::size_t m = 0; m < v.size(); ++m)
                p.phases[m] = std::arg(v[m]);
            return p;
        }
    };

    // Rounds every phase to the nearest of 2^bits uniform levels. bits == 0 keeps continuous phases.
    inline PhaseConfig quantize_phases(const PhaseConfig &p, int bits)
    {
        if (bits < 0)
            throw std::invalid_argument("quantize_phases: negative bit count");
        if (bits == 0)
            return p;
        const double step = two_pi / static_cast<double>(1u << bits);
        PhaseConfig q = p;
        for (auto &v : q.phases)
            v = wrap_phase(std::round(v / step) * step);
        return q;
    }

    // conj(a_RIS(bs side) (.) a_RIS(ue side))
    inline PhaseConfig conjugate_product(const ArrayGeometry &ris, const Direction &bs_side, const Direction &ue_side)
    {
        const CVector ae = steering_vector(ris, bs_side);
        const CVector au = steering_vector(ris, ue_side);
        PhaseConfig p;
        p.phases.resize(ae.size());
        for (std::size_t m = 0; m < ae.size(); ++m)
            p.phases[m] = std::arg(std::conj(ae[m] * au[m]));
        return p;
    }

    // Genie configuration from the true LoS angles at the RIS
    inline PhaseConfig best_phase_config(const ArrayGeometry &ris, const Direction &bs_side, const Direction &ue_side)
    {
        return conjugate_product(ris, bs_side, ue_side);
    }

    // Azimuth x zenith beam grid over the half-space below the RIS. Entry index = i_phi * n_zenith + i_theta.
    struct Codebook
    {
        int n_azimuth = 1;
        int n_zenith = 1;
        Direction bs_side;
        std::vector<PhaseConfig> entries;

        std::size_t size() const noexcept { return entries.size(); }
        double azimuth_step() const noexcept { return pi / n_azimuth; }
        double zenith_step() const noexcept { return (pi / 2.0) / n_zenith; }

        std::size_t index(int i_phi, int i_theta) const
        {
            return static_cast<std::size_t>(i_phi) * static_cast<std::size_t>(n_zenith) + static_cast<std::size_t>(i_theta);
        }
        int azimuth_index(std::size_t idx) const { return static_cast<int>(idx / static_cast<std::size_t>(n_zenith)); }
        int zenith_index(std::size_t idx) const { return static_cast<int>(idx % static_cast<std::size_t>(n_zenith)); }

        Direction direction(std::size_t idx) const
        {
            return {azimuth_index(idx) * azimuth_step(), pi / 2.0 + zenith_index(idx) * zenith_step()};
        }
    };

    inline Codebook build_codebook(const ArrayGeometry &ris, const Direction &bs_side, int n_azimuth, int n_zenith,
                                   int phase_bits = 0)
    {
        if (n_azimuth < 1 || n_zenith < 1)
            throw std::invalid_argument("build_codebook: grid sizes must be >= 1");
        ris.validate();
        Codebook cb;
        cb.n_azimuth = n_azimuth;
        cb.n_zenith = n_zenith;
        cb.bs_side = bs_side;
        cb.entries.reserve(static_cast<std::size_t>(n_azimuth) * static_cast<std::size_t>(n_zenith));
        for (int ip = 0; ip < n_azimuth; ++ip)
            for (int it = 0; it < n_zenith; ++it)
            {
                const std::size_t idx = cb.index(ip, it);
                cb.entries.push_back(quantize_phases(conjugate_product(ris, bs_side, cb.direction(idx)), phase_bits));
            }
        return cb;
    }

    // (1/K) sum_k ||H[k] psi||^2 over the dense cascade
    inline double reflective_gain(const CTensor3 &cascaded, std::span<const cplx> psi)
    {
        if (psi.size() != cascaded.dim2())
            throw std::invalid_argument("reflective_gain: phase configuration length mismatch");
        double acc = 0.0;
        for (std::size_t k = 0; k < cascaded.dim0(); ++k)
            for (std::size_t b = 0; b < cascaded.dim1(); ++b)
            {
                auto row = cascaded.slice(k, b);
                cplx s(0.0, 0.0);
                for (std::size_t m = 0; m < psi.size(); ++m)
                    s += row[m] * psi[m];
                acc += std::norm(s);
            }
        return cascaded.dim0() ? acc / static_cast<double>(cascaded.dim0()) : 0.0;
    }

    inline double reflective_gain(const ChannelRealization &ch, const PhaseConfig &psi)
    {
        return reflective_gain(ch.cascaded(), psi.values());
    }

    inline double reflective_gain(const FactoredChannel &ch, std::span<const cplx> psi)
    {
        const CMatrix r = ch.reflected_response(psi);
        return norm_sq(r.values()) / static_cast<double>(ch.n_subcarriers());
    }

    // Per-antenna bound L_e L_u |mu_e|^2 |mu_u|^2 M^2 on the reflective gain
    inline double upper_bound_reflective(double gain_bs_ris, double gain_ris_ue, double mu_e, double mu_u, std::size_t n_ris)
    {
        const double M = static_cast<double>(n_ris);
        return gain_bs_ris * gain_ris_ue * mu_e * mu_e * mu_u * mu_u * M * M;
    }

    inline void write_codebook_csv(std::ostream &os, const Codebook &cb)
    {
        os << "index,i_phi,i_theta,azimuth_rad,zenith_rad";
        const std::size_t M = cb.entries.empty() ? 0 : cb.entries.front().size();
        for (std::size_t m = 0; m < M; ++m)
            os << ",phase_" << m << "_rad";
        os << '\n';
        char buf[64];
        for (std::size_t i = 0; i < cb.size(); ++i)
        {
            const Direction d = cb.direction(i);
            os << i << ',' << cb.azimuth_index(i) << ',' << cb.zenith_index(i);
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", d.azimuth, d.zenith);
            os << buf;
            for (double p : cb.entries[i].phases)
            {
                std::snprintf(buf, sizeof buf, ",%.17g", p);
                os << buf;
            }
            os << '\n';
        }
    }
}
