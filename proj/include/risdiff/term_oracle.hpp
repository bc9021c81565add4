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

#include "risdiff/analysis.hpp"
#include "risdiff/channel.hpp"
#include "risdiff/engine.hpp"
#include "risdiff/modulation.hpp"

#include <optional>

namespace risdiff
{
    // Monte Carlo set-up for the decode-term oracle
    struct TermOracleConfig
    {
        ChannelScenario scenario;   // direct link and geometry
        std::optional<CVector> psi; // RIS configuration; no reflected path when empty
        double px = 1.0;
        double noise_var = 0.0;
        int psk_order = 4;
    };

    struct TermMoments
    {
        TermPowers mean;
        TermPowers std_error;
        double beta_d_sq = 0.0; // sample mean of |h_d|^2 / B
        double beta_r_sq = 0.0; // sample mean of |H psi|^2 / B
        std::uint64_t n_trials = 0;
    };

    namespace detail
    {
        struct TermSums
        {
            cplx s1{0.0, 0.0};
            double s1_sq = 0.0;
            double m[4]{}, m_sq[4]{};
            double gd = 0.0, gr = 0.0;
            std::uint64_t n = 0;

            void add(const TermSums &o)
            {
                s1 += o.s1;
                s1_sq += o.s1_sq;
                for (int i = 0; i < 4; ++i)
                {
                    m[i] += o.m[i];
                    m_sq[i] += o.m_sq[i];
                }
                gd += o.gd;
                gr += o.gr;
                n += o.n;
            }
        };
    }

    // Draws a fresh channel, subcarrier pair (k-1, k), PSK symbols and noise per trial and forms
    // I1 = P s h_{k-1}^H h_k, I2 = sqrt(P) u*_{k-1} h_{k-1}^H v_k, I3 = sqrt(P) u_k v_{k-1}^H h_k, I4 = v_{k-1}^H v_k
    inline TermMoments term_powers_mc(const TermOracleConfig &cfg, std::uint64_t n_trials, std::uint64_t seed, int workers = 1)
    {
        if (n_trials < 2)
            throw std::invalid_argument("term_powers_mc: need at least two trials");
        const ChannelScenario &sc = cfg.scenario;
        sc.validate();
        if (cfg.psi && cfg.psi->size() != sc.ris.size())
            throw std::invalid_argument("term_powers_mc: phase configuration length mismatch");
        const std::size_t K = static_cast<std::size_t>(sc.grid.n_subcarriers), B = sc.bs.size();
        const std::uint64_t chunk = 4096;
        const std::uint64_t n_chunks = (n_trials + chunk - 1) / chunk;
        std::vector<detail::TermSums> parts(n_chunks);
        const double amp = std::sqrt(cfg.px), sigma = std::sqrt(cfg.noise_var);
        const int nb = bits_per_symbol(cfg.psk_order);

        parallel_for(n_chunks, workers, [&](std::size_t c)
                     {
            Engine rng = make_stream(seed, c, StreamTag::oracle);
            std::uniform_int_distribution<std::size_t> pick_k(1, K - 1);
            std::uniform_int_distribution<unsigned> pick_label(0, (1u << nb) - 1u);
            ComplexGaussian gauss(1.0);
            CVector h0(B), h1(B), r(B), v0(B), v1(B);
            auto &acc = parts[c];
            const std::uint64_t n = std::min(chunk, n_trials - c * chunk);
            for (std::uint64_t t = 0; t < n; ++t)
            {
                LinkDraws d;
                if (sc.direct_enabled)
                    d.direct = sample_clusters(sc.direct, sc.grid, rng);
                if (cfg.psi)
                {
                    draw_bs_ris(sc, d, rng);
                    d.ris_ue_nlos = sample_clusters(sc.ris_ue, sc.grid, rng);
                    d.ris_ue_los = los_cluster(sc.ris_ue, rng);
                }
                const FactoredChannel ch = factorize(sc, d);
                const std::size_t k = pick_k(rng);
                ch.direct_at(k - 1, h0);
                ch.direct_at(k, h1);
                for (std::size_t b = 0; b < B; ++b)
                    acc.gd += std::norm(h0[b]);
                if (cfg.psi)
                {
                    const CVector cp = ch.coupling(*cfg.psi);
                    ch.reflected_at(k - 1, cp, r);
                    for (std::size_t b = 0; b < B; ++b)
                    {
                        acc.gr += std::norm(r[b]);
                        h0[b] += r[b];
                    }
                    ch.reflected_at(k, cp, r);
                    for (std::size_t b = 0; b < B; ++b)
                        h1[b] += r[b];
                }
                const cplx u0 = psk_point(pick_label(rng), cfg.psk_order);
                const cplx s = psk_point(pick_label(rng), cfg.psk_order);
                const cplx u1 = u0 * s;
                gauss.fill(v0, rng);
                gauss.fill(v1, rng);
                for (std::size_t b = 0; b < B; ++b)
                {
                    v0[b] *= sigma;
                    v1[b] *= sigma;
                }
                const cplx i1 = cfg.px * s * inner(h0, h1);
                const cplx i2 = amp * std::conj(u0) * inner(h0, v1);
                const cplx i3 = amp * u1 * inner(v0, h1);
                const cplx i4 = inner(v0, v1);
                const cplx si1 = std::conj(s) * i1;
                acc.s1 += si1;
                acc.s1_sq += std::norm(si1);
                const double p[4] = {std::norm(i1), std::norm(i2), std::norm(i3), std::norm(i4)};
                for (int i = 0; i < 4; ++i)
                {
                    acc.m[i] += p[i];
                    acc.m_sq[i] += p[i] * p[i];
                }
                ++acc.n;
            } });

        detail::TermSums tot;
        for (const auto &p : parts)
            tot.add(p);
        const double n = static_cast<double>(tot.n);
        auto se = [n](double sum, double sum_sq)
        {
            const double mean = sum / n;
            return std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / (n - 1.0));
        };
        TermMoments out;
        out.n_trials = tot.n;
        out.mean.e_sI1 = tot.s1 / n;
        out.std_error.e_sI1 = se(std::abs(tot.s1), tot.s1_sq);
        double *mean[4] = {&out.mean.p_I1, &out.mean.p_I2, &out.mean.p_I3, &out.mean.p_I4};
        double *err[4] = {&out.std_error.p_I1, &out.std_error.p_I2, &out.std_error.p_I3, &out.std_error.p_I4};
        for (int i = 0; i < 4; ++i)
        {
            *mean[i] = tot.m[i] / n;
            *err[i] = se(tot.m[i], tot.m_sq[i]);
        }
        out.beta_d_sq = tot.gd / (n * static_cast<double>(B));
        out.beta_r_sq = tot.gr / (n * static_cast<double>(B));
        return out;
    }
}
