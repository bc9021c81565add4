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
#include <bit>
#include <cstdint>

namespace risdiff
{
    inline int bits_per_symbol(int order)
    {
        if (order < 2 || !std::has_single_bit(static_cast<unsigned>(order)))
            throw std::invalid_argument("modulation order must be a power of two >= 2");
        return std::countr_zero(static_cast<unsigned>(order));
    }

    namespace detail
    {
        inline unsigned gray_encode(unsigned v) { return v ^ (v >> 1); }

        inline unsigned gray_decode(unsigned g)
        {
            unsigned v = g;
            for (unsigned s = g >> 1; s; s >>= 1)
                v ^= s;
            return v;
        }

        // MSB-first label of `nbits` bits
        inline unsigned pack(std::span<const std::uint8_t> bits, std::size_t offset, int nbits)
        {
            unsigned v = 0;
            for (int i = 0; i < nbits; ++i)
                v = (v << 1) | (bits[offset + static_cast<std::size_t>(i)] & 1u);
            return v;
        }

        inline void unpack(unsigned v, int nbits, std::span<std::uint8_t> out, std::size_t offset)
        {
            for (int i = 0; i < nbits; ++i)
                out[offset + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((v >> (nbits - 1 - i)) & 1u);
        }
    }

    // Gray-mapped Q-PSK point for label `label`, phase 2 pi q / Q + pi / Q
    inline cplx psk_point(unsigned label, int order)
    {
        const unsigned q = detail::gray_decode(label);
        return std::polar(1.0, two_pi * q / order + pi / order);
    }

    inline unsigned psk_decide(cplx z, int order)
    {
        const double a = std::arg(z) - pi / order;
        long q = std::lround(a * order / two_pi);
        q %= order;
        if (q < 0)
            q += order;
        return detail::gray_encode(static_cast<unsigned>(q));
    }

    inline CVector psk_modulate(std::span<const std::uint8_t> bits, int order)
    {
        const int nb = bits_per_symbol(order);
        if (bits.size() % static_cast<std::size_t>(nb) != 0)
            throw std::invalid_argument("psk_modulate: bit count not a multiple of log2(Q)");
        CVector s(bits.size() / static_cast<std::size_t>(nb));
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = psk_point(detail::pack(bits, i * static_cast<std::size_t>(nb), nb), order);
        return s;
    }

    inline std::vector<std::uint8_t> psk_hard_demod(std::span<const cplx> z, int order)
    {
        const int nb = bits_per_symbol(order);
        std::vector<std::uint8_t> bits(z.size() * static_cast<std::size_t>(nb));
        for (std::size_t i = 0; i < z.size(); ++i)
            detail::unpack(psk_decide(z[i], order), nb, bits, i * static_cast<std::size_t>(nb));
        return bits;
    }

    // Square Gray QAM with unit average energy. The first half of each label drives the in-phase axis.
    inline int qam_side(int order)
    {
        const int nb = bits_per_symbol(order);
        if (nb % 2 != 0)
            throw std::invalid_argument("QAM order must be an even power of two");
        return 1 << (nb / 2);
    }

    inline double qam_scale(int order) { return 1.0 / std::sqrt(2.0 * (order - 1) / 3.0); }

    inline cplx qam_point(unsigned label, int order)
    {
        const int L = qam_side(order);
        const int half = bits_per_symbol(order) / 2;
        const unsigned li = label >> half, lq = label & ((1u << half) - 1u);
        const double xi = 2.0 * detail::gray_decode(li) - (L - 1);
        const double xq = 2.0 * detail::gray_decode(lq) - (L - 1);
        return cplx(xi, xq) * qam_scale(order);
    }

    inline unsigned qam_decide(cplx z, int order)
    {
        const int L = qam_side(order);
        const int half = bits_per_symbol(order) / 2;
        auto axis = [&](double v)
        {
            long i = std::lround((v / qam_scale(order) + (L - 1)) / 2.0);
            i = std::clamp<long>(i, 0, L - 1);
            return detail::gray_encode(static_cast<unsigned>(i));
        };
        return (axis(z.real()) << half) | axis(z.imag());
    }

    inline CVector qam_modulate(std::span<const std::uint8_t> bits, int order)
    {
        const int nb = bits_per_symbol(order);
        qam_side(order);
        if (bits.size() % static_cast<std::size_t>(nb) != 0)
            throw std::invalid_argument("qam_modulate: bit count not a multiple of log2(Q)");
        CVector s(bits.size() / static_cast<std::size_t>(nb));
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = qam_point(detail::pack(bits, i * static_cast<std::size_t>(nb), nb), order);
        return s;
    }

    inline std::vector<std::uint8_t> qam_hard_demod(std::span<const cplx> z, int order)
    {
        const int nb = bits_per_symbol(order);
        std::vector<std::uint8_t> bits(z.size() * static_cast<std::size_t>(nb));
        for (std::size_t i = 0; i < z.size(); ++i)
            detail::unpack(qam_decide(z[i], order), nb, bits, i * static_cast<std::size_t>(nb));
        return bits;
    }

    inline std::size_t count_bit_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
    {
        if (a.size() != b.size())
            throw std::invalid_argument("count_bit_errors: length mismatch");
        std::size_t n = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            n += (a[i] != b[i]);
        return n;
    }
}
