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

#include <cstdint>

namespace risdiff
{
    // Per-antenna channel gains and operating point of one link budget
    struct LinkBudget
    {
        double beta_d_sq = 0.0; // direct link, L_d sigma_d^2
        double beta_r_sq = 0.0; // reflective link, measured or bounded
        int n_bs = 1;           // B
        double px = 1.0;        // transmit power
        double noise_var = 0.0; // sigma_v^2

        void validate() const
        {
            if (!(beta_d_sq >= 0.0) || !(beta_r_sq >= 0.0) || !(px >= 0.0) || !(noise_var >= 0.0) || n_bs < 1)
                throw std::invalid_argument("LinkBudget: gains, power and noise must be nonnegative and B >= 1");
        }
    };

    // Statistics of the four decode terms of one differential link
    struct TermPowers
    {
        cplx e_sI1{0.0, 0.0}; // E[s* I1]
        double p_I1 = 0.0;    // E|I1|^2
        double p_I2 = 0.0;
        double p_I3 = 0.0;
        double p_I4 = 0.0;
    };

    // Closed-form moments for a Rayleigh direct link and a deterministic reflective link
    inline TermPowers term_powers_closed_form(const LinkBudget &b)
    {
        b.validate();
        const double B = b.n_bs, P = b.px, bd = b.beta_d_sq, br = b.beta_r_sq, s2 = b.noise_var;
        TermPowers t;
        t.e_sI1 = (bd + br) * B * P;
        t.p_I1 = (2.0 * bd * bd + br * br + 4.0 * bd * br) * B * B * P * P;
        t.p_I2 = s2 * (bd + br) * B * P;
        t.p_I3 = t.p_I2;
        t.p_I4 = B * s2 * s2;
        return t;
    }

    // Useful over residual power of z = (I1 + I2 + I3 + I4) / B with the useful part taken along E[s* I1]
    inline double sinr_from_terms(const TermPowers &t)
    {
        const double useful = std::norm(t.e_sI1);
        if (useful == 0.0)
            throw std::invalid_argument("sinr_from_terms: zero useful term");
        const double err = (t.p_I1 - useful) + t.p_I2 + t.p_I3 + t.p_I4;
        return useful / err;
    }

    // NCDS SINR with direct and reflective paths:
    //   1 / [ (beta_d^4 + 2 beta_d^2 beta_r^2) / beta^4 + 2 sigma^2 / (B beta^2 P) + sigma^4 / (B beta^4 P^2) ]
    // with beta^2 = beta_d^2 + beta_r^2
    inline double sinr_ncds(const LinkBudget &b)
    {
        b.validate();
        const double beta = b.beta_d_sq + b.beta_r_sq;
        if (beta == 0.0 || b.px == 0.0)
            throw std::invalid_argument("sinr_ncds: zero total gain or power");
        const double B = b.n_bs, P = b.px, s2 = b.noise_var, bd = b.beta_d_sq, br = b.beta_r_sq;
        const double inv = (bd * bd + 2.0 * bd * br) / (beta * beta) + 2.0 * s2 / (B * beta * P) +
                           s2 * s2 / (B * beta * beta * P * P);
        return 1.0 / inv;
    }

    // Direct link only: 1 / [1 + 2 sigma^2 / (B beta_d^2 P) + sigma^4 / (B beta_d^4 P^2)]
    inline double sinr_direct(const LinkBudget &b)
    {
        b.validate();
        if (b.beta_d_sq == 0.0 || b.px == 0.0)
            throw std::invalid_argument("sinr_direct: zero direct gain or power");
        const double B = b.n_bs, P = b.px, s2 = b.noise_var, bd = b.beta_d_sq;
        return 1.0 / (1.0 + 2.0 * s2 / (B * bd * P) + s2 * s2 / (B * bd * bd * P * P));
    }

    // Reflective link only: B beta_r^2 P / (2 sigma^2 + sigma^4 / (beta_r^2 P))
    inline double sinr_reflective(const LinkBudget &b)
    {
        b.validate();
        if (b.beta_r_sq == 0.0 || b.px == 0.0)
            throw std::invalid_argument("sinr_reflective: zero reflective gain or power");
        const double B = b.n_bs, P = b.px, s2 = b.noise_var, br = b.beta_r_sq;
        return B * br * P / (2.0 * s2 + s2 * s2 / (br * P));
    }

    // Noise-dominated linear approximation B beta_r^2 P / (2 sigma^2)
    inline double sinr_reflective_linear(const LinkBudget &b)
    {
        b.validate();
        if (b.noise_var == 0.0)
            throw std::invalid_argument("sinr_reflective_linear: zero noise");
        return b.n_bs * b.beta_r_sq * b.px / (2.0 * b.noise_var);
    }

    enum class Stage
    {
        one,
        two,
    };

    enum class Family
    {
        rs,
        cds,
        ncds,
    };

    // Fraction of the N K resources of a block that carry data in the given stage
    inline double efficiency(Stage stage, Family family, std::int64_t K, std::int64_t K_p, std::int64_t N,
                             std::int64_t N_l, std::int64_t N_h)
    {
        if (K <= 0 || N <= 0)
            throw std::invalid_argument("efficiency: K and N must be positive");
        const double NK = static_cast<double>(N) * static_cast<double>(K);
        if (stage == Stage::one)
        {
            const std::int64_t kp = family == Family::rs ? K : family == Family::cds ? K_p : 2;
            return static_cast<double>(N_l) * static_cast<double>(K - kp) / NK;
        }
        if (N_h < 1)
            return 0.0;
        switch (family)
        {
        case Family::cds:
            return static_cast<double>(N_h - 1) / static_cast<double>(N);
        case Family::ncds:
            return static_cast<double>(N_h * K - 2) / NK;
        default:
            return 0.0;
        }
    }

    struct ThroughputInputs
    {
        double subcarrier_spacing_hz = 30e3;
        std::int64_t K = 1024;
        int packet_bits = 20; // L_P
        int order_l = 4;      // Q_l
        int order_h = 16;     // Q_h
        double ber_l = 0.0;
        double ber_h = 0.0;
        std::int64_t N = 1000;
        std::int64_t N_l = 64;
        std::int64_t N_h = 936;
        std::int64_t K_p = 341;

        void validate() const
        {
            if (N != N_l + N_h)
                throw std::invalid_argument("ThroughputInputs: N must equal N_l + N_h");
            if (!(ber_l >= 0.0 && ber_l <= 1.0) || !(ber_h >= 0.0 && ber_h <= 1.0))
                throw std::invalid_argument("ThroughputInputs: BER outside [0, 1]");
            if (packet_bits < 1)
                throw std::invalid_argument("ThroughputInputs: packet length must be >= 1 bit");
        }
    };

    struct Throughput
    {
        double r_l = 0.0; // packets/s, stage one
        double r_h = 0.0; // packets/s, stage two
        double total = 0.0;
    };

    // R_stage = eta (df K / L_P) (1 - P_e)^{L_P} log2(Q)
    inline double stage_throughput(double eta, const ThroughputInputs &in, double ber, int order)
    {
        return eta * (in.subcarrier_spacing_hz * static_cast<double>(in.K) / in.packet_bits) *
               std::pow(1.0 - ber, in.packet_bits) * std::log2(static_cast<double>(order));
    }

    inline Throughput throughput(const ThroughputInputs &in, Family stage_one, Family stage_two)
    {
        in.validate();
        Throughput r;
        r.r_l = stage_throughput(efficiency(Stage::one, stage_one, in.K, in.K_p, in.N, in.N_l, in.N_h), in, in.ber_l, in.order_l);
        r.r_h = stage_throughput(efficiency(Stage::two, stage_two, in.K, in.K_p, in.N, in.N_l, in.N_h), in, in.ber_h, in.order_h);
        r.total = r.r_l + r.r_h;
        return r;
    }

    // Receiver complex products per block
    //   RS, stage one   0
    //   CDS, stage one  N_l (B K_p + B^2 (K - K_p) + C_I)
    //   NCDS, stage one 2 (K - 1) N_l
    //   CDS, stage two  B K ((B^2 + 1) + B (N_h - 1))
    //   NCDS, stage two 2 (K N_h - 1)
    inline std::int64_t complexity(Family family, Stage stage, std::int64_t B, std::int64_t K, std::int64_t K_p,
                                   std::int64_t N_l, std::int64_t N_h, std::int64_t C_I)
    {
        if (stage == Stage::one)
        {
            switch (family)
            {
            case Family::cds:
                return N_l * (B * K_p + B * B * (K - K_p) + C_I);
            case Family::ncds:
                return 2 * (K - 1) * N_l;
            default:
                return 0;
            }
        }
        switch (family)
        {
        case Family::cds:
            return B * K * ((B * B + 1) + B * (N_h - 1));
        case Family::ncds:
            return 2 * (K * N_h - 1);
        default:
            return 0;
        }
    }
}
