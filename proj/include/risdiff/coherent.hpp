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
#include <cstdint>

namespace risdiff
{
    // Comb of K_p pilot tones at floor(i K / K_p), i = 0 .. K_p - 1
    struct PilotPattern
    {
        std::size_t n_subcarriers = 0;
        std::vector<std::size_t> tones;
        cplx value{1.0, 0.0};

        static PilotPattern comb(std::size_t K, std::size_t K_p, cplx value = {1.0, 0.0})
        {
            if (K_p == 0 || K_p > K)
                throw std::invalid_argument("PilotPattern: need 0 < K_p <= K");
            if (std::abs(value) == 0.0)
                throw std::invalid_argument("PilotPattern: pilot value must be nonzero");
            PilotPattern p;
            p.n_subcarriers = K;
            p.value = value;
            p.tones.resize(K_p);
            for (std::size_t i = 0; i < K_p; ++i)
                p.tones[i] = (i * K) / K_p;
            return p;
        }

        std::size_t count() const noexcept { return tones.size(); }

        std::vector<std::size_t> data_tones() const
        {
            std::vector<char> is_pilot(n_subcarriers, 0);
            for (auto t : tones)
                is_pilot[t] = 1;
            std::vector<std::size_t> d;
            d.reserve(n_subcarriers - tones.size());
            for (std::size_t k = 0; k < n_subcarriers; ++k)
                if (!is_pilot[k])
                    d.push_back(k);
            return d;
        }
    };

    enum class EstimateSource
    {
        pilot_ls,
        interpolated,
        perfect,
    };

    struct ChannelEstimate
    {
        CMatrix h;
        EstimateSource source = EstimateSource::pilot_ls;
    };

    // h_k = y_k / x_k per antenna; y holds one row per pilot tone
    inline ChannelEstimate ls_estimate(const CMatrix &y_pilots, std::span<const cplx> pilot_values)
    {
        if (y_pilots.rows() != pilot_values.size())
            throw std::invalid_argument("ls_estimate: pilot count mismatch");
        ChannelEstimate e{CMatrix(y_pilots.rows(), y_pilots.cols()), EstimateSource::pilot_ls};
        for (std::size_t i = 0; i < y_pilots.rows(); ++i)
        {
            const cplx inv = 1.0 / pilot_values[i];
            for (std::size_t b = 0; b < y_pilots.cols(); ++b)
                e.h(i, b) = y_pilots(i, b) * inv;
        }
        return e;
    }

    struct Interpolation
    {
        ChannelEstimate estimate;
        std::uint64_t complex_products = 0; // B (K - K_p)
    };

    // Piecewise-linear per antenna between pilot tones; tones outside the comb hold the nearest edge value
    inline Interpolation interpolate(const ChannelEstimate &at_pilots, std::span<const std::size_t> tones, std::size_t K)
    {
        const std::size_t P = tones.size(), B = at_pilots.h.cols();
        if (P < 2)
            throw std::invalid_argument("interpolate: need at least 2 pilot tones");
        if (at_pilots.h.rows() != P)
            throw std::invalid_argument("interpolate: estimate/tone count mismatch");
        Interpolation out{{CMatrix(K, B), EstimateSource::interpolated}, static_cast<std::uint64_t>(B) * (K - P)};
        auto &h = out.estimate.h;
        for (std::size_t k = 0; k < K; ++k)
        {
            if (k <= tones.front())
            {
                std::copy_n(at_pilots.h.row(0).begin(), B, h.row(k).begin());
                continue;
            }
            if (k >= tones.back())
            {
                std::copy_n(at_pilots.h.row(P - 1).begin(), B, h.row(k).begin());
                continue;
            }
            const auto it = std::upper_bound(tones.begin(), tones.end(), k);
            const std::size_t j = static_cast<std::size_t>(it - tones.begin()) - 1;
            const double t = static_cast<double>(k - tones[j]) / static_cast<double>(tones[j + 1] - tones[j]);
            for (std::size_t b = 0; b < B; ++b)
                h(k, b) = at_pilots.h(j, b) + t * (at_pilots.h(j + 1, b) - at_pilots.h(j, b));
        }
        return out;
    }

    struct Equalized
    {
        CVector symbols;
        std::vector<std::uint8_t> erased;
    };

    // s_k = h_k^H y_k / ||h_k||^2, one row per tone
    inline Equalized mrc_combine(const CMatrix &y, const CMatrix &h_hat)
    {
        if (y.rows() != h_hat.rows() || y.cols() != h_hat.cols())
            throw std::invalid_argument("mrc_combine: dimension mismatch");
        Equalized e{CVector(y.rows()), std::vector<std::uint8_t>(y.rows(), 0)};
        for (std::size_t k = 0; k < y.rows(); ++k)
        {
            const double g = norm_sq(h_hat.row(k));
            if (g == 0.0)
            {
                e.erased[k] = 1;
                continue;
            }
            e.symbols[k] = inner(h_hat.row(k), y.row(k)) / g;
        }
        return e;
    }

    // Pseudo-inverse rows (h^H h)^{-1} h^H, designed once and applied to every data symbol of a block
    class ZfCombiner
    {
    public:
        explicit ZfCombiner(const CMatrix &h_hat) : w_(h_hat.rows(), h_hat.cols()), erased_(h_hat.rows(), 0)
        {
            for (std::size_t k = 0; k < h_hat.rows(); ++k)
            {
                const double g = norm_sq(h_hat.row(k));
                if (g == 0.0)
                {
                    erased_[k] = 1;
                    continue;
                }
                for (std::size_t b = 0; b < h_hat.cols(); ++b)
                    w_(k, b) = std::conj(h_hat(k, b)) / g;
            }
        }

        Equalized apply(const CMatrix &y) const
        {
            if (y.rows() != w_.rows() || y.cols() != w_.cols())
                throw std::invalid_argument("ZfCombiner: dimension mismatch");
            Equalized e{CVector(y.rows()), erased_};
            for (std::size_t k = 0; k < y.rows(); ++k)
            {
                if (erased_[k])
                    continue;
                cplx acc(0.0, 0.0);
                auto w = w_.row(k);
                auto yk = y.row(k);
                for (std::size_t b = 0; b < yk.size(); ++b)
                    acc += w[b] * yk[b];
                e.symbols[k] = acc;
            }
            return e;
        }

    private:
        CMatrix w_;
        std::vector<std::uint8_t> erased_;
    };

    inline Equalized zf_combine(const CMatrix &y, const CMatrix &h_hat)
    {
        if (y.rows() != h_hat.rows() || y.cols() != h_hat.cols())
            throw std::invalid_argument("zf_combine: dimension mismatch");
        return ZfCombiner(h_hat).apply(y);
    }

    // Transmitted stage-one symbol: pilots on the comb, QAM data elsewhere, every entry scaled by sqrt(P_x)
    inline CVector cds_stage_one_tx(std::span<const std::uint8_t> bits, const PilotPattern &pattern, int order, double power)
    {
        const auto data_tones = pattern.data_tones();
        const CVector s = qam_modulate(bits, order);
        if (s.size() != data_tones.size())
            throw std::invalid_argument("cds_stage_one_tx: bit count does not fill the data tones");
        const double a = std::sqrt(power);
        CVector x(pattern.n_subcarriers);
        for (auto t : pattern.tones)
            x[t] = a * pattern.value;
        for (std::size_t i = 0; i < data_tones.size(); ++i)
            x[data_tones[i]] = a * s[i];
        return x;
    }

    struct CoherentRx
    {
        std::vector<std::uint8_t> bits;
        std::uint64_t complex_products = 0;
    };

    // Equalizer output mapped back to unit-energy QAM; erased tones decide from the origin
    inline void qam_decide_into(const Equalized &eq, std::span<const std::size_t> tones, double power, int order,
                                std::vector<std::uint8_t> &bits)
    {
        const int nb = bits_per_symbol(order);
        const double inv = 1.0 / std::sqrt(power);
        for (auto t : tones)
        {
            const cplx s = eq.erased[t] ? cplx(0.0, 0.0) : eq.symbols[t] * inv;
            const unsigned label = qam_decide(s, order);
            for (int i = nb - 1; i >= 0; --i)
                bits.push_back(static_cast<std::uint8_t>((label >> i) & 1u));
        }
    }

    // One training symbol: LS at the comb, interpolation, MRC and QAM decisions on the data tones.
    // With `perfect` set, the true K x B channel replaces the estimate and nothing is charged.
    inline CoherentRx cds_stage_one_symbol(const CMatrix &y, const PilotPattern &pattern, int order, double power,
                                           const CMatrix *perfect = nullptr)
    {
        const std::size_t K = pattern.n_subcarriers, B = y.cols(), Kp = pattern.count();
        if (y.rows() != K)
            throw std::invalid_argument("cds_stage_one_symbol: subcarrier count mismatch");
        CoherentRx rx;
        const auto data_tones = pattern.data_tones();
        rx.bits.reserve(data_tones.size() * static_cast<std::size_t>(bits_per_symbol(order)));
        if (perfect)
        {
            qam_decide_into(mrc_combine(y, *perfect), data_tones, power, order, rx.bits);
            return rx;
        }
        CMatrix yp(Kp, B);
        for (std::size_t i = 0; i < Kp; ++i)
            std::copy_n(y.row(pattern.tones[i]).begin(), B, yp.row(i).begin());
        const CVector pv(Kp, std::sqrt(power) * pattern.value);
        const ChannelEstimate ls = ls_estimate(yp, pv);
        const Interpolation itp = interpolate(ls, pattern.tones, K);
        qam_decide_into(mrc_combine(y, itp.estimate.h), data_tones, power, order, rx.bits);
        const std::uint64_t b = B, dk = K - Kp;
        rx.complex_products = b * Kp + b * b * dk + itp.complex_products;
        return rx;
    }

    inline CoherentRx cds_stage_one_rx(std::span<const CMatrix> y, const PilotPattern &pattern, int order, double power,
                                       std::span<const CMatrix> perfect = {})
    {
        if (!perfect.empty() && perfect.size() != y.size())
            throw std::invalid_argument("cds_stage_one_rx: perfect channel count mismatch");
        CoherentRx total;
        for (std::size_t n = 0; n < y.size(); ++n)
        {
            CoherentRx s = cds_stage_one_symbol(y[n], pattern, order, power, perfect.empty() ? nullptr : &perfect[n]);
            total.bits.insert(total.bits.end(), s.bits.begin(), s.bits.end());
            total.complex_products += s.complex_products;
        }
        return total;
    }

    // Reference-signal-only training carries no data and costs no receiver products
    inline CoherentRx rs_stage_one_rx(std::span<const CMatrix>) { return {}; }

    // Stage two: symbol 0 carries pilots on every tone, symbols 1 .. N_h - 1 carry QAM data equalized
    // with a ZF combiner designed once from the symbol-0 estimate.
    class CdsStageTwoRx
    {
    public:
        CdsStageTwoRx(const CMatrix &y_pilot_symbol, cplx pilot, double power, int order, const CMatrix *perfect = nullptr)
            : order_(order), power_(power), B_(y_pilot_symbol.cols()), K_(y_pilot_symbol.rows()),
              zf_(perfect ? *perfect : ls_estimate(y_pilot_symbol, CVector(y_pilot_symbol.rows(), std::sqrt(power) * pilot)).h),
              tones_(K_)
        {
            for (std::size_t k = 0; k < K_; ++k)
                tones_[k] = k;
            charged_ = perfect == nullptr;
            if (charged_)
                complex_products_ = B_ * K_ + B_ * B_ * B_ * K_;
        }

        std::vector<std::uint8_t> data_symbol(const CMatrix &y)
        {
            std::vector<std::uint8_t> bits;
            bits.reserve(K_ * static_cast<std::size_t>(bits_per_symbol(order_)));
            qam_decide_into(zf_.apply(y), tones_, power_, order_, bits);
            if (charged_)
                complex_products_ += B_ * B_ * K_;
            return bits;
        }

        std::uint64_t complex_products() const noexcept { return complex_products_; }

    private:
        int order_;
        double power_;
        std::uint64_t B_, K_;
        ZfCombiner zf_;
        std::vector<std::size_t> tones_;
        std::uint64_t complex_products_ = 0;
        bool charged_ = false;
    };

    inline CVector cds_stage_two_tx(std::span<const std::uint8_t> bits, int order, double power)
    {
        CVector x = qam_modulate(bits, order);
        const double a = std::sqrt(power);
        for (auto &v : x)
            v *= a;
        return x;
    }

    inline CoherentRx cds_stage_two_rx(std::span<const CMatrix> y, cplx pilot, double power, int order,
                                       std::span<const CMatrix> perfect = {})
    {
        if (y.size() < 2)
            throw std::invalid_argument("cds_stage_two_rx: need N_h >= 2");
        CdsStageTwoRx rx(y[0], pilot, power, order, perfect.empty() ? nullptr : &perfect[0]);
        CoherentRx out;
        for (std::size_t n = 1; n < y.size(); ++n)
        {
            auto b = rx.data_symbol(y[n]);
            out.bits.insert(out.bits.end(), b.begin(), b.end());
        }
        out.complex_products = rx.complex_products();
        return out;
    }
}
