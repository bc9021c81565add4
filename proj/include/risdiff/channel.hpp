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

#include "risdiff/array.hpp"
#include "risdiff/rng.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace risdiff
{
    // OFDM numerology of the frequency-domain model
    struct SamplingGrid
    {
        int n_subcarriers = 1024;
        double subcarrier_spacing_hz = 30e3;
        int cp_len = 128;

        double sample_rate() const noexcept { return n_subcarriers * subcarrier_spacing_hz; }

        void validate() const
        {
            if (n_subcarriers < 3)
                throw ConfigError("scenario.n_subcarriers", "must be >= 3");
            if (!(subcarrier_spacing_hz > 0.0))
                throw ConfigError("scenario.subcarrier_spacing_hz", "must be positive");
            if (cp_len < 1 || cp_len >= n_subcarriers)
                throw ConfigError("scenario.cp_len", "must lie in [1, n_subcarriers)");
        }
    };

    // Large-scale and dispersion statistics of one link
    struct LinkStatistics
    {
        double gain_db = 0.0;       // large-scale gain, must be <= 0 dB
        double rician_factor = 0.0; // linear; +inf keeps the LoS component only
        int n_clusters = 1;
        double delay_spread_s = 30e-9;
        double asd_deg = 7.0, asa_deg = 12.0, zsd_deg = 15.0, zsa_deg = 20.0;
        Direction los_aod; // departure side
        Direction los_aoa; // arrival side
        int los_delay_samples = 0;

        double gain() const { return db_to_linear(gain_db); }

        void validate(const SamplingGrid &grid) const
        {
            if (!(gain_db <= 0.0) || !std::isfinite(gain_db))
                throw ConfigError("gain_db", "large-scale gain must be finite and <= 0 dB");
            if (!(rician_factor >= 0.0))
                throw ConfigError("rician_factor", "must be >= 0");
            if (n_clusters < 0)
                throw ConfigError("n_clusters", "must be >= 0");
            if (!(delay_spread_s >= 0.0))
                throw ConfigError("delay_spread_s", "must be >= 0");
            if (delay_spread_s * grid.sample_rate() >= grid.cp_len)
                throw ConfigError("delay_spread_s", "mean delay exceeds the cyclic prefix");
            if (los_delay_samples < 0 || los_delay_samples >= grid.cp_len)
                throw ConfigError("los_delay_samples", "must lie in [0, cp_len)");
        }
    };

    struct Cluster
    {
        int delay_samples = 0;
        cplx gain{1.0, 0.0};
        double power = 1.0; // mean power of `gain`
        Direction aod;
        Direction aoa;
    };

    using ClusterSet = std::vector<Cluster>;

    // Amplitude weights of the LoS and NLoS parts under large-scale gain `gain` and Rician factor `k`
    struct RicianWeights
    {
        double los = 0.0;
        double nlos = 0.0;
    };

    inline RicianWeights rician_weights(double gain, double k)
    {
        if (std::isinf(k))
            return {std::sqrt(gain), 0.0};
        return {std::sqrt(gain * k / (k + 1.0)), std::sqrt(gain / (k + 1.0))};
    }

    // Exponential PDP, wrapped-Gaussian azimuths, Laplacian zeniths, Rayleigh cluster gains.
    // Delays are relative to the earliest cluster and quantized to the sampling grid.
    inline ClusterSet sample_clusters(const LinkStatistics &stats, const SamplingGrid &grid, Engine &rng)
    {
        stats.validate(grid);
        const auto n = static_cast<std::size_t>(stats.n_clusters);
        ClusterSet out(n);
        if (n == 0)
            return out;

        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> tau(n, 0.0);
        if (stats.delay_spread_s > 0.0)
        {
            for (auto &t : tau)
                t = -stats.delay_spread_s * std::log(1.0 - unit(rng));
            std::sort(tau.begin(), tau.end());
            const double t0 = tau.front();
            for (auto &t : tau)
                t -= t0;
        }

        std::vector<double> power(n, 1.0);
        if (stats.delay_spread_s > 0.0)
            for (std::size_t c = 0; c < n; ++c)
                power[c] = std::exp(-tau[c] / stats.delay_spread_s);
        double total = 0.0;
        for (double p : power)
            total += p;

        std::normal_distribution<double> normal(0.0, 1.0);
        auto laplace = [&](double scale)
        {
            double u = unit(rng) - 0.5;
            return -scale * std::copysign(1.0, u) * std::log(1.0 - 2.0 * std::abs(u));
        };
        auto perturb = [&](const Direction &los, double as_deg, double zs_deg)
        {
            Direction d;
            d.azimuth = wrap_azimuth(los.azimuth + deg_to_rad(as_deg) * normal(rng));
            d.zenith = std::clamp(los.zenith + laplace(deg_to_rad(zs_deg)), 0.0, pi);
            return d;
        };

        const double fs = grid.sample_rate();
        for (std::size_t c = 0; c < n; ++c)
        {
            auto &cl = out[c];
            cl.delay_samples = static_cast<int>(std::lround(tau[c] * fs));
            if (cl.delay_samples >= grid.cp_len)
                throw ConfigError("delay_spread_s", "sampled cluster delay exceeds the cyclic prefix");
            cl.power = power[c] / total;
            cl.gain = ComplexGaussian(cl.power)(rng);
            cl.aoa = perturb(stats.los_aoa, stats.asa_deg, stats.zsa_deg);
            cl.aod = perturb(stats.los_aod, stats.asd_deg, stats.zsd_deg);
        }
        return out;
    }

    // Unit-magnitude LoS ray with uniformly random phase
    inline ClusterSet los_cluster(const LinkStatistics &stats, Engine &rng)
    {
        Cluster c;
        c.delay_samples = stats.los_delay_samples;
        c.gain = std::polar(1.0, uniform(rng, -pi, pi));
        c.power = 1.0;
        c.aod = stats.los_aod;
        c.aoa = stats.los_aoa;
        return {c};
    }

    // e^{-j 2 pi k tau / K} for integer k and tau
    class DelayPhasors
    {
    public:
        explicit DelayPhasors(int n_subcarriers) : table_(static_cast<std::size_t>(n_subcarriers))
        {
            for (int i = 0; i < n_subcarriers; ++i)
                table_[static_cast<std::size_t>(i)] = std::polar(1.0, -two_pi * i / n_subcarriers);
        }

        cplx operator()(std::size_t k, int tau) const
        {
            return table_[(k * static_cast<std::size_t>(tau)) % table_.size()];
        }

    private:
        CVector table_;
    };

    // BS <- UE frequency response, K x B
    inline CMatrix synth_direct(const ClusterSet &clusters, const ArrayGeometry &bs, const SamplingGrid &grid, double gain)
    {
        grid.validate();
        const auto K = static_cast<std::size_t>(grid.n_subcarriers);
        const std::size_t B = bs.size();
        const double amp = std::sqrt(gain);
        DelayPhasors ph(grid.n_subcarriers);
        CMatrix h(K, B);
        for (const auto &c : clusters)
        {
            const CVector a = steering_vector(bs, c.aoa);
            for (std::size_t k = 0; k < K; ++k)
            {
                const cplx w = amp * c.gain * ph(k, c.delay_samples);
                for (std::size_t b = 0; b < B; ++b)
                    h(k, b) += w * a[b];
            }
        }
        return h;
    }

    // BS <- RIS frequency response, K x B x M. Arrival angles are at the BS, departure angles at the RIS.
    inline CTensor3 synth_bs_ris(const ClusterSet &nlos, const ClusterSet &los, const ArrayGeometry &bs,
                                 const ArrayGeometry &ris, const SamplingGrid &grid, double gain, double rician)
    {
        grid.validate();
        const auto K = static_cast<std::size_t>(grid.n_subcarriers);
        const std::size_t B = bs.size(), M = ris.size();
        const RicianWeights w = rician_weights(gain, rician);
        DelayPhasors ph(grid.n_subcarriers);
        CTensor3 G(K, B, M);
        auto add = [&](const ClusterSet &set, double amp)
        {
            if (amp == 0.0)
                return;
            for (const auto &c : set)
            {
                const CVector a_bs = steering_vector(bs, c.aoa);
                const CVector a_ris = steering_vector(ris, c.aod);
                for (std::size_t k = 0; k < K; ++k)
                {
                    const cplx s = amp * c.gain * ph(k, c.delay_samples);
                    for (std::size_t b = 0; b < B; ++b)
                    {
                        const cplx sb = s * a_bs[b];
                        auto row = G.slice(k, b);
                        for (std::size_t m = 0; m < M; ++m)
                            row[m] += sb * a_ris[m];
                    }
                }
            }
        };
        add(los, w.los);
        add(nlos, w.nlos);
        return G;
    }

    // RIS <- UE frequency response, K x M. Arrival angles are at the RIS.
    inline CMatrix synth_ris_ue(const ClusterSet &nlos, const ClusterSet &los, const ArrayGeometry &ris,
                                const SamplingGrid &grid, double gain, double rician)
    {
        grid.validate();
        const auto K = static_cast<std::size_t>(grid.n_subcarriers);
        const std::size_t M = ris.size();
        const RicianWeights w = rician_weights(gain, rician);
        DelayPhasors ph(grid.n_subcarriers);
        CMatrix g(K, M);
        auto add = [&](const ClusterSet &set, double amp)
        {
            if (amp == 0.0)
                return;
            for (const auto &c : set)
            {
                const CVector a = steering_vector(ris, c.aoa);
                for (std::size_t k = 0; k < K; ++k)
                {
                    const cplx s = amp * c.gain * ph(k, c.delay_samples);
                    for (std::size_t m = 0; m < M; ++m)
                        g(k, m) += s * a[m];
                }
            }
        };
        add(los, w.los);
        add(nlos, w.nlos);
        return g;
    }

    // Cascaded response H[k](b, m) = G[k](b, m) * g[k](m)
    inline CTensor3 cascade(const CTensor3 &g_bs_ris, const CMatrix &g_ris_ue)
    {
        if (g_bs_ris.dim0() != g_ris_ue.rows() || g_bs_ris.dim2() != g_ris_ue.cols())
            throw std::invalid_argument("cascade: dimension mismatch");
        CTensor3 H(g_bs_ris.dim0(), g_bs_ris.dim1(), g_bs_ris.dim2());
        for (std::size_t k = 0; k < H.dim0(); ++k)
            for (std::size_t b = 0; b < H.dim1(); ++b)
            {
                auto dst = H.slice(k, b);
                auto src = g_bs_ris.slice(k, b);
                auto g = g_ris_ue.row(k);
                for (std::size_t m = 0; m < H.dim2(); ++m)
                    dst[m] = src[m] * g[m];
            }
        return H;
    }

    // Dense channel of one coherence block
    class ChannelRealization
    {
    public:
        ChannelRealization() = default;
        ChannelRealization(CMatrix h_direct, CTensor3 g_bs_ris, CMatrix g_ris_ue)
            : h_direct(std::move(h_direct)), g_bs_ris(std::move(g_bs_ris)), g_ris_ue(std::move(g_ris_ue))
        {
            if (this->h_direct.rows() != this->g_bs_ris.dim0() || this->h_direct.cols() != this->g_bs_ris.dim1() ||
                this->g_ris_ue.rows() != this->g_bs_ris.dim0() || this->g_ris_ue.cols() != this->g_bs_ris.dim2())
                throw std::invalid_argument("ChannelRealization: inconsistent dimensions");
        }

        std::size_t n_subcarriers() const noexcept { return h_direct.rows(); }
        std::size_t n_bs() const noexcept { return h_direct.cols(); }
        std::size_t n_ris() const noexcept { return g_ris_ue.cols(); }

        // Computed on first use and cached
        const CTensor3 &cascaded() const
        {
            if (!cascaded_)
                cascaded_ = cascade(g_bs_ris, g_ris_ue);
            return *cascaded_;
        }

        CMatrix h_direct;
        CTensor3 g_bs_ris;
        CMatrix g_ris_ue;

    private:
        mutable std::optional<CTensor3> cascaded_;
    };

    // h[k] = h_d[k] + H[k] psi at one subcarrier
    inline CVector effective_channel(const ChannelRealization &ch, std::span<const cplx> psi, std::size_t k)
    {
        if (psi.size() != ch.n_ris())
            throw std::invalid_argument("effective_channel: phase configuration length mismatch");
        if (k >= ch.n_subcarriers())
            throw std::out_of_range("effective_channel: subcarrier index");
        const auto &H = ch.cascaded();
        CVector h(ch.n_bs());
        for (std::size_t b = 0; b < h.size(); ++b)
        {
            cplx acc = ch.h_direct(k, b);
            auto row = H.slice(k, b);
            for (std::size_t m = 0; m < psi.size(); ++m)
                acc += row[m] * psi[m];
            h[b] = acc;
        }
        return h;
    }

    // All subcarriers, K x B
    inline CMatrix effective_channel(const ChannelRealization &ch, std::span<const cplx> psi)
    {
        CMatrix h(ch.n_subcarriers(), ch.n_bs());
        for (std::size_t k = 0; k < h.rows(); ++k)
        {
            CVector hk = effective_channel(ch, psi, k);
            std::copy(hk.begin(), hk.end(), h.row(k).begin());
        }
        return h;
    }

    // Complete description of the three links of a scenario
    struct ChannelScenario
    {
        SamplingGrid grid;
        ArrayGeometry bs;
        ArrayGeometry ris;
        LinkStatistics direct;
        LinkStatistics bs_ris; // aoa at the BS, aod at the RIS
        LinkStatistics ris_ue; // aoa at the RIS
        bool direct_enabled = true;

        void validate() const
        {
            grid.validate();
            bs.validate();
            ris.validate();
            direct.validate(grid);
            bs_ris.validate(grid);
            ris_ue.validate(grid);
        }
    };

    // Small-scale draws of one block
    struct LinkDraws
    {
        ClusterSet direct;
        ClusterSet bs_ris_nlos, bs_ris_los;
        ClusterSet ris_ue_nlos, ris_ue_los;
    };

    inline void draw_bs_ris(const ChannelScenario &sc, LinkDraws &d, Engine &rng)
    {
        d.bs_ris_nlos = sample_clusters(sc.bs_ris, sc.grid, rng);
        d.bs_ris_los = los_cluster(sc.bs_ris, rng);
    }

    inline LinkDraws draw_links(const ChannelScenario &sc, Engine &rng)
    {
        LinkDraws d;
        if (sc.direct_enabled)
            d.direct = sample_clusters(sc.direct, sc.grid, rng);
        draw_bs_ris(sc, d, rng);
        d.ris_ue_nlos = sample_clusters(sc.ris_ue, sc.grid, rng);
        d.ris_ue_los = los_cluster(sc.ris_ue, rng);
        return d;
    }

    inline ChannelRealization realize(const ChannelScenario &sc, const LinkDraws &d)
    {
        return ChannelRealization(
            synth_direct(d.direct, sc.bs, sc.grid, sc.direct_enabled ? sc.direct.gain() : 0.0),
            synth_bs_ris(d.bs_ris_nlos, d.bs_ris_los, sc.bs, sc.ris, sc.grid, sc.bs_ris.gain(), sc.bs_ris.rician_factor),
            synth_ris_ue(d.ris_ue_nlos, d.ris_ue_los, sc.ris, sc.grid, sc.ris_ue.gain(), sc.ris_ue.rician_factor));
    }

    // One propagation path with its scaled gain, delay and array responses
    struct PathTerm
    {
        cplx coef;
        int delay = 0;
        CVector bs;  // empty for the RIS <- UE link
        CVector ris; // empty for the direct link
    };

    // Path-wise channel. Evaluates H[k] psi without forming the K x B x M cascade.
    class FactoredChannel
    {
    public:
        FactoredChannel(int n_subcarriers, std::size_t n_bs, std::size_t n_ris)
            : K_(static_cast<std::size_t>(n_subcarriers)), B_(n_bs), M_(n_ris), phasors_(n_subcarriers) {}

        std::size_t n_subcarriers() const noexcept { return K_; }
        std::size_t n_bs() const noexcept { return B_; }
        std::size_t n_ris() const noexcept { return M_; }

        CMatrix direct_response() const
        {
            CMatrix h(K_, B_);
            for (std::size_t k = 0; k < K_; ++k)
                direct_at(k, h.row(k));
            return h;
        }

        // coupling[c * C_u + u] = sum_m a_ris,c[m] a_ris,u[m] psi[m] over BS-RIS path c and RIS-UE path u
        CVector coupling(std::span<const cplx> psi) const
        {
            if (psi.size() != M_)
                throw std::invalid_argument("FactoredChannel: phase configuration length mismatch");
            const std::size_t Ce = bs_ris.size(), Cu = ris_ue.size();
            CVector out(Ce * Cu);
            for (std::size_t c = 0; c < Ce; ++c)
                for (std::size_t u = 0; u < Cu; ++u)
                {
                    cplx acc(0.0, 0.0);
                    const auto &ae = bs_ris[c].ris;
                    const auto &au = ris_ue[u].ris;
                    for (std::size_t m = 0; m < M_; ++m)
                        acc += ae[m] * au[m] * psi[m];
                    out[c * Cu + u] = acc;
                }
            return out;
        }

        // h_d[k] into out (length B)
        void direct_at(std::size_t k, std::span<cplx> out) const
        {
            std::fill(out.begin(), out.end(), cplx(0.0, 0.0));
            for (const auto &p : direct)
            {
                const cplx w = p.coef * phasors_(k, p.delay);
                for (std::size_t b = 0; b < B_; ++b)
                    out[b] += w * p.bs[b];
            }
        }

        // H[k] psi into out (length B), given coupling(psi)
        void reflected_at(std::size_t k, std::span<const cplx> coupling, std::span<cplx> out) const
        {
            std::fill(out.begin(), out.end(), cplx(0.0, 0.0));
            const std::size_t Cu = ris_ue.size();
            for (std::size_t c = 0; c < bs_ris.size(); ++c)
            {
                cplx acc(0.0, 0.0);
                for (std::size_t u = 0; u < Cu; ++u)
                    acc += ris_ue[u].coef * phasors_(k, ris_ue[u].delay) * coupling[c * Cu + u];
                const cplx w = bs_ris[c].coef * phasors_(k, bs_ris[c].delay) * acc;
                for (std::size_t b = 0; b < B_; ++b)
                    out[b] += w * bs_ris[c].bs[b];
            }
        }

        // H[k] psi for every subcarrier, K x B
        CMatrix reflected_response(std::span<const cplx> psi) const
        {
            const CVector cp = coupling(psi);
            CMatrix r(K_, B_);
            for (std::size_t k = 0; k < K_; ++k)
                reflected_at(k, cp, r.row(k));
            return r;
        }

        // h_d[k] + H[k] psi, K x B
        CMatrix response(std::span<const cplx> psi) const
        {
            CMatrix h = direct_response();
            CMatrix r = reflected_response(psi);
            for (std::size_t i = 0; i < h.size(); ++i)
                h.values()[i] += r.values()[i];
            return h;
        }

        ChannelRealization densify() const
        {
            CTensor3 G(K_, B_, M_);
            CMatrix g(K_, M_);
            for (std::size_t k = 0; k < K_; ++k)
            {
                for (const auto &p : bs_ris)
                {
                    const cplx s = p.coef * phasors_(k, p.delay);
                    for (std::size_t b = 0; b < B_; ++b)
                    {
                        const cplx sb = s * p.bs[b];
                        auto row = G.slice(k, b);
                        for (std::size_t m = 0; m < M_; ++m)
                            row[m] += sb * p.ris[m];
                    }
                }
                auto row = g.row(k);
                for (const auto &p : ris_ue)
                {
                    const cplx s = p.coef * phasors_(k, p.delay);
                    for (std::size_t m = 0; m < M_; ++m)
                        row[m] += s * p.ris[m];
                }
            }
            return ChannelRealization(direct_response(), std::move(G), std::move(g));
        }

        std::vector<PathTerm> direct;
        std::vector<PathTerm> bs_ris;
        std::vector<PathTerm> ris_ue;

    private:
        std::size_t K_, B_, M_;
        DelayPhasors phasors_;
    };

    inline FactoredChannel factorize(const ChannelScenario &sc, const LinkDraws &d)
    {
        FactoredChannel f(sc.grid.n_subcarriers, sc.bs.size(), sc.ris.size());
        if (sc.direct_enabled)
        {
            const double amp = std::sqrt(sc.direct.gain());
            for (const auto &c : d.direct)
                f.direct.push_back({amp * c.gain, c.delay_samples, steering_vector(sc.bs, c.aoa), {}});
        }
        const RicianWeights we = rician_weights(sc.bs_ris.gain(), sc.bs_ris.rician_factor);
        auto add_e = [&](const ClusterSet &set, double amp)
        {
            if (amp == 0.0)
                return;
            for (const auto &c : set)
                f.bs_ris.push_back({amp * c.gain, c.delay_samples, steering_vector(sc.bs, c.aoa), steering_vector(sc.ris, c.aod)});
        };
        add_e(d.bs_ris_los, we.los);
        add_e(d.bs_ris_nlos, we.nlos);
        const RicianWeights wu = rician_weights(sc.ris_ue.gain(), sc.ris_ue.rician_factor);
        auto add_u = [&](const ClusterSet &set, double amp)
        {
            if (amp == 0.0)
                return;
            for (const auto &c : set)
                f.ris_ue.push_back({amp * c.gain, c.delay_samples, {}, steering_vector(sc.ris, c.aoa)});
        };
        add_u(d.ris_ue_los, wu.los);
        add_u(d.ris_ue_nlos, wu.nlos);
        return f;
    }
}
