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

// Binary layout, all fields little-endian:
//   8 bytes   magic "RISCHNL1"
//   3 x u64   K, B, M
//   K*B       h_direct, row-major (k, b)
//   K*B*M     g_bs_ris, row-major (k, b, m)
//   K*M       g_ris_ue, row-major (k, m)
// Every complex entry is stored as two IEEE-754 float64 values (re, im).

#include "risdiff/channel.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

namespace risdiff
{
    namespace detail
    {
        inline constexpr std::array<char, 8> channel_magic{'R', 'I', 'S', 'C', 'H', 'N', 'L', '1'};

        inline void put_u64(std::ostream &os, std::uint64_t v)
        {
            unsigned char b[8];
            for (int i = 0; i < 8; ++i)
                b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
            os.write(reinterpret_cast<const char *>(b), 8);
        }

        inline std::uint64_t get_u64(std::istream &is)
        {
            unsigned char b[8];
            if (!is.read(reinterpret_cast<char *>(b), 8))
                throw std::runtime_error("channel dump: truncated input");
            std::uint64_t v = 0;
            for (int i = 0; i < 8; ++i)
                v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
            return v;
        }

        inline void put_values(std::ostream &os, const std::vector<cplx> &vals)
        {
            for (const auto &c : vals)
            {
                put_u64(os, std::bit_cast<std::uint64_t>(c.real()));
                put_u64(os, std::bit_cast<std::uint64_t>(c.imag()));
            }
        }

        inline void get_values(std::istream &is, std::vector<cplx> &vals)
        {
            for (auto &c : vals)
            {
                double re = std::bit_cast<double>(get_u64(is));
                double im = std::bit_cast<double>(get_u64(is));
                c = {re, im};
            }
        }
    }

    inline void write_channel(std::ostream &os, const ChannelRealization &ch)
    {
        os.write(detail::channel_magic.data(), 8);
        detail::put_u64(os, ch.n_subcarriers());
        detail::put_u64(os, ch.n_bs());
        detail::put_u64(os, ch.n_ris());
        detail::put_values(os, ch.h_direct.values());
        detail::put_values(os, ch.g_bs_ris.values());
        detail::put_values(os, ch.g_ris_ue.values());
        if (!os)
            throw std::runtime_error("channel dump: write failed");
    }

    inline ChannelRealization read_channel(std::istream &is)
    {
        std::array<char, 8> magic{};
        if (!is.read(magic.data(), 8) || magic != detail::channel_magic)
            throw std::runtime_error("channel dump: bad magic");
        const std::uint64_t K = detail::get_u64(is), B = detail::get_u64(is), M = detail::get_u64(is);
        CMatrix h(K, B);
        CTensor3 G(K, B, M);
        CMatrix g(K, M);
        detail::get_values(is, h.values());
        detail::get_values(is, G.values());
        detail::get_values(is, g.values());
        return ChannelRealization(std::move(h), std::move(G), std::move(g));
    }
}
