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
#include <random>

namespace risdiff
{
    using Engine = std::mt19937_64;

    // Purpose tags separating independent streams of one Monte Carlo block
    enum class StreamTag : std::uint32_t
    {
        channel = 1,
        bs_ris_frozen = 2,
        data = 3,
        noise = 4,
        oracle = 5,
        geometry = 6,
    };

    // Stream keyed by (master seed, block index, purpose, sub-index). Identical keys give identical
    // sequences on every run and for every worker count.
    inline Engine make_stream(std::uint64_t master_seed, std::uint64_t block, StreamTag tag, std::uint64_t sub = 0)
    {
        auto lo = [](std::uint64_t v)
        { return static_cast<std::uint32_t>(v & 0xffffffffu); };
        auto hi = [](std::uint64_t v)
        { return static_cast<std::uint32_t>(v >> 32); };
        std::seed_seq seq{lo(master_seed), hi(master_seed), lo(block), hi(block),
                          static_cast<std::uint32_t>(tag), lo(sub), hi(sub)};
        return Engine(seq);
    }

    // Circularly-symmetric complex Gaussian source
    class ComplexGaussian
    {
    public:
        explicit ComplexGaussian(double variance = 1.0) : dist_(0.0, std::sqrt(variance / 2.0)) {}

        cplx operator()(Engine &rng)
        {
            double re = dist_(rng);
            double im = dist_(rng);
            return {re, im};
        }

        void fill(std::span<cplx> out, Engine &rng)
        {
            for (auto &v : out)
                v = (*this)(rng);
        }

    private:
        std::normal_distribution<double> dist_;
    };

    inline double uniform(Engine &rng, double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    // Equiprobable bits, one per byte
    inline void random_bits(Engine &rng, std::span<std::uint8_t> out)
    {
        std::size_t i = 0;
        while (i < out.size())
        {
            std::uint64_t word = rng();
            for (int b = 0; b < 64 && i < out.size(); ++b, ++i)
                out[i] = static_cast<std::uint8_t>((word >> b) & 1u);
        }
    }

    inline std::vector<std::uint8_t> random_bits(Engine &rng, std::size_t n)
    {
        std::vector<std::uint8_t> bits(n);
        random_bits(rng, bits);
        return bits;
    }
}
