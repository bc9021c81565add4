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

#include "risdiff/modulation.hpp"

#include <algorithm>
#include <optional>

namespace risdiff
{
    // Transmitted symbols of a block, K x N, every entry scaled to power P_x
    struct ResourceGrid
    {
        CMatrix symbols;
        double power = 1.0;
    };

    // Unit-modulus data symbols preceded by two reference symbols
    struct PskFrame
    {
        CVector data;
        cplx pilot1{1.0, 0.0};
        cplx pilot2{1.0, 0.0};
        int order = 4;
    };

    // x_1 = p_1, x_2 = x_1 p_2, x_k = x_{k-1} s_k, scaled by sqrt(P_x)
    inline CVector diff_encode_fds(const PskFrame &frame, std::size_t K, double power)
    {
        if (K < 3)
            throw std::invalid_argument("diff_encode_fds: need at least 3 subcarriers");
        if (frame.data.size() != K - 2)
            throw std::invalid_argument("diff_encode_fds: expected K - 2 data symbols");
        CVector x(K);
        x[0] = frame.pilot1;
        x[1] = x[0] * frame.pilot2;
        for (std::size_t k = 2; k < K; ++k)
            x[k] = x[k - 1] * frame.data[k - 2];
        const double a = std::sqrt(power);
        for (auto &v : x)
            v *= a;
        return x;
    }

    // z_k = (1/B) y_{k-1}^H y_k e^{-j zeta_hat} for the K - 2 data subcarriers of one symbol (y is K x B)
    inline CVector diff_decode(const CMatrix &y, double zeta_hat)
    {
        const std::size_t K = y.rows();
        if (y.cols() < 1)
            throw std::invalid_argument("diff_decode: need at least one antenna");
        if (K < 3)
            return {};
        const cplx rot = std::polar(1.0 / static_cast<double>(y.cols()), -zeta_hat);
        CVector z(K - 2);
        for (std::size_t k = 2; k < K; ++k)
            z[k - 2] = inner(y.row(k - 1), y.row(k)) * rot;
        return z;
    }

    // Additive decomposition of y_{k-1}^H y_k for y = h x + v:
    //   i1 = x*_{k-1} x_k h_{k-1}^H h_k   (useful term)
    //   i2 = x*_{k-1} h_{k-1}^H v_k
    //   i3 = x_k v_{k-1}^H h_k
    //   i4 = v_{k-1}^H v_k
    struct DecodeTerms
    {
        CVector i1, i2, i3, i4;
    };

    inline DecodeTerms decode_terms(const CMatrix &h, std::span<const cplx> x, const CMatrix &v)
    {
        const std::size_t K = h.rows();
        if (x.size() != K || v.rows() != K || v.cols() != h.cols())
            throw std::invalid_argument("decode_terms: dimension mismatch");
        DecodeTerms t;
        const std::size_t n = K >= 3 ? K - 2 : 0;
        t.i1.resize(n);
        t.i2.resize(n);
        t.i3.resize(n);
        t.i4.resize(n);
        for (std::size_t k = 2; k < K; ++k)
        {
            const std::size_t j = k - 2;
            t.i1[j] = std::conj(x[k - 1]) * x[k] * inner(h.row(k - 1), h.row(k));
            t.i2[j] = std::conj(x[k - 1]) * inner(h.row(k - 1), v.row(k));
            t.i3[j] = x[k] * inner(v.row(k - 1), h.row(k));
            t.i4[j] = inner(v.row(k - 1), v.row(k));
        }
        return t;
    }

    struct ResidualPhase
    {
        double zeta = 0.0;
        bool degenerate = false; // y_1^H y_2 vanished; zeta reported as 0
    };

    // zeta = arg(y_1^H y_2) - arg(p_2 / p_1) for transmitted reference values p_1, p_2, wrapped to (-pi, pi]
    inline ResidualPhase estimate_residual_phase(std::span<const cplx> y1, std::span<const cplx> y2, cplx p1, cplx p2)
    {
        if (y1.size() != y2.size())
            throw std::invalid_argument("estimate_residual_phase: length mismatch");
        const cplx c = inner(y1, y2);
        if (c == cplx(0.0, 0.0))
            return {0.0, true};
        return {wrap_phase(std::arg(c) - std::arg(p2 / p1)), false};
    }

    // P_y = (1/K) sum_k ||y_k||^2
    inline double measure_power(const CMatrix &y)
    {
        if (y.rows() == 0)
            return 0.0;
        return norm_sq(y.values()) / static_cast<double>(y.rows());
    }

    // Codeword with the largest mean measured power; ties resolve to the lowest index.
    // schedule[n] is the codeword active during training symbol n.
    inline std::size_t select_codeword(std::span<const double> powers, std::span<const std::size_t> schedule)
    {
        if (schedule.empty() || powers.size() != schedule.size())
            throw std::invalid_argument("select_codeword: empty or mismatched schedule");
        const std::size_t n_cw = *std::max_element(schedule.begin(), schedule.end()) + 1;
        std::vector<double> sum(n_cw, 0.0);
        std::vector<std::size_t> count(n_cw, 0);
        for (std::size_t n = 0; n < powers.size(); ++n)
        {
            sum[schedule[n]] += powers[n];
            ++count[schedule[n]];
        }
        std::optional<std::size_t> best;
        double best_mean = 0.0;
        for (std::size_t c = 0; c < n_cw; ++c)
        {
            if (count[c] == 0)
                continue;
            const double mean = sum[c] / static_cast<double>(count[c]);
            if (!best || mean > best_mean)
            {
                best = c;
                best_mean = mean;
            }
        }
        return *best;
    }

    inline std::size_t select_codeword(std::span<const double> powers)
    {
        std::vector<std::size_t> schedule(powers.size());
        for (std::size_t n = 0; n < schedule.size(); ++n)
            schedule[n] = n;
        return select_codeword(powers, schedule);
    }

    struct Resource
    {
        std::size_t k = 0; // subcarrier
        std::size_t n = 0; // OFDM symbol within the block
    };

    enum class LinkDirection
    {
        ascending,  // (k-1, n) -> (k, n)
        descending, // (k+1, n) -> (k, n)
        time,       // (k, n-1) -> (k, n)
    };

    // Path through a K x N_h block visiting every resource once, each step to a neighbour in
    // frequency or in time. Positions 0 and 1 carry the reference symbols.
    class MdsMapping
    {
    public:
        MdsMapping(std::size_t K, std::size_t n_symbols, std::vector<Resource> path)
            : K_(K), N_(n_symbols), path_(std::move(path))
        {
            if (K_ == 0 || N_ == 0 || path_.size() != K_ * N_ || path_.size() < 3)
                throw std::invalid_argument("MdsMapping: path must cover a K x N block with at least 3 resources");
            std::vector<char> seen(path_.size(), 0);
            for (const auto &r : path_)
            {
                if (r.k >= K_ || r.n >= N_ || seen[r.n * K_ + r.k])
                    throw std::invalid_argument("MdsMapping: path is not a bijection");
                seen[r.n * K_ + r.k] = 1;
            }
            links_.resize(path_.size(), LinkDirection::ascending);
            for (std::size_t i = 1; i < path_.size(); ++i)
            {
                const Resource &a = path_[i - 1], &b = path_[i];
                if (a.n == b.n && b.k == a.k + 1)
                    links_[i] = LinkDirection::ascending;
                else if (a.n == b.n && a.k == b.k + 1)
                    links_[i] = LinkDirection::descending;
                else if (a.k == b.k && b.n == a.n + 1)
                    links_[i] = LinkDirection::time;
                else
                    throw std::invalid_argument("MdsMapping: consecutive resources are not adjacent");
            }
        }

        // Odd symbols (1-based) ascend in frequency, even symbols descend; symbols join at the edge subcarrier.
        static MdsMapping serpentine(std::size_t K, std::size_t n_symbols)
        {
            std::vector<Resource> path;
            path.reserve(K * n_symbols);
            for (std::size_t n = 0; n < n_symbols; ++n)
                for (std::size_t p = 0; p < K; ++p)
                    path.push_back({n % 2 == 0 ? p : K - 1 - p, n});
            return MdsMapping(K, n_symbols, std::move(path));
        }

        std::size_t n_subcarriers() const noexcept { return K_; }
        std::size_t n_symbols() const noexcept { return N_; }
        std::size_t size() const noexcept { return path_.size(); }
        std::size_t n_data() const noexcept { return path_.size() - 2; }
        const Resource &operator[](std::size_t i) const { return path_[i]; }
        LinkDirection link(std::size_t i) const { return links_.at(i); }

    private:
        std::size_t K_, N_;
        std::vector<Resource> path_;
        std::vector<LinkDirection> links_;
    };

    inline ResourceGrid mds_encode(const PskFrame &frame, const MdsMapping &map, double power)
    {
        if (frame.data.size() != map.n_data())
            throw std::invalid_argument("mds_encode: expected K * N_h - 2 data symbols");
        ResourceGrid g{CMatrix(map.n_subcarriers(), map.n_symbols()), power};
        const double a = std::sqrt(power);
        cplx x = frame.pilot1;
        g.symbols(map[0].k, map[0].n) = a * x;
        x *= frame.pilot2;
        g.symbols(map[1].k, map[1].n) = a * x;
        for (std::size_t i = 2; i < map.size(); ++i)
        {
            x *= frame.data[i - 2];
            g.symbols(map[i].k, map[i].n) = a * x;
        }
        return g;
    }

    // Decodes the link ending at path position i (i >= 2). Frequency links are derotated by the
    // residual phase, with opposite sign on descending runs; time links are left untouched.
    inline cplx mds_link(const MdsMapping &map, std::size_t i, std::span<const cplx> y_prev, std::span<const cplx> y_cur,
                         double zeta_hat)
    {
        const cplx c = inner(y_prev, y_cur) / static_cast<double>(y_cur.size());
        switch (map.link(i))
        {
        case LinkDirection::ascending:
            return c * std::polar(1.0, -zeta_hat);
        case LinkDirection::descending:
            return c * std::polar(1.0, zeta_hat);
        default:
            return c;
        }
    }

    // y[n] is the K x B received grid of block symbol n; returns the K * N_h - 2 soft data symbols
    inline CVector mds_decode(std::span<const CMatrix> y, double zeta_hat, const MdsMapping &map)
    {
        if (y.size() != map.n_symbols())
            throw std::invalid_argument("mds_decode: symbol count mismatch");
        CVector z(map.n_data());
        for (std::size_t i = 2; i < map.size(); ++i)
        {
            const Resource &a = map[i - 1], &b = map[i];
            z[i - 2] = mds_link(map, i, y[a.n].row(a.k), y[b.n].row(b.k), zeta_hat);
        }
        return z;
    }
}
