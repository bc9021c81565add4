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
#include "risdiff/codebook.hpp"
#include "risdiff/coherent.hpp"
#include "risdiff/config.hpp"
#include "risdiff/csv.hpp"
#include "risdiff/differential.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace risdiff
{
    enum class StageOneMode
    {
        ncds,
        cds,
        cds_pce,
        rs,
    };

    enum class StageTwoMode
    {
        ncds,
        cds,
        cds_pce,
    };

    struct Scheme
    {
        std::string name;
        StageOneMode one = StageOneMode::ncds;
        StageTwoMode two = StageTwoMode::ncds;

        Family family_one() const
        {
            return one == StageOneMode::ncds ? Family::ncds : one == StageOneMode::rs ? Family::rs : Family::cds;
        }
        Family family_two() const { return two == StageTwoMode::ncds ? Family::ncds : Family::cds; }
    };

    // ncds | cds | cds-pce | rs-ncds | rs-cds | rs (alias of rs-cds)
    inline Scheme parse_scheme(const std::string &name)
    {
        if (name == "ncds")
            return {name, StageOneMode::ncds, StageTwoMode::ncds};
        if (name == "cds")
            return {name, StageOneMode::cds, StageTwoMode::cds};
        if (name == "cds-pce")
            return {name, StageOneMode::cds_pce, StageTwoMode::cds_pce};
        if (name == "rs-ncds")
            return {name, StageOneMode::rs, StageTwoMode::ncds};
        if (name == "rs-cds" || name == "rs")
            return {name, StageOneMode::rs, StageTwoMode::cds};
        throw ConfigError("campaign.schemes", "unknown scheme '" + name + "'");
    }

    // Per (scheme, P_x) counters of one block or a whole campaign
    struct SlotTally
    {
        std::uint64_t err1 = 0, bits1 = 0, err2 = 0, bits2 = 0;
        // SINR bookkeeping over NCDS soft symbols: sum g^2, sum |g s - z|^2, sum g^2 / rho_analytic
        double sig1 = 0.0, res1 = 0.0, an1 = 0.0;
        double sig2 = 0.0, res2 = 0.0, an2 = 0.0;
        std::uint64_t degenerate_phase = 0;

        void add(const SlotTally &o)
        {
            err1 += o.err1;
            bits1 += o.bits1;
            err2 += o.err2;
            bits2 += o.bits2;
            sig1 += o.sig1;
            res1 += o.res1;
            an1 += o.an1;
            sig2 += o.sig2;
            res2 += o.res2;
            an2 += o.an2;
            degenerate_phase += o.degenerate_phase;
        }
    };

    struct BlockResult
    {
        std::vector<SlotTally> slots;      // index scheme * n_px + point
        std::vector<std::size_t> selected; // chosen codeword per slot
    };

    struct BlockOptions
    {
        std::optional<double> noise_var; // replaces the configured noise power
    };

    struct MetricsReport
    {
        double px_dbw = 0.0;
        std::string scheme;
        double ber1 = 0.0, ber2 = 0.0;
        double ber1_se = 0.0, ber2_se = 0.0; // standard error across blocks
        std::uint64_t bits1 = 0, bits2 = 0;
        double sinr1_emp_db = 0.0, sinr1_analytic_db = 0.0;
        double sinr2_emp_db = 0.0, sinr2_analytic_db = 0.0;
        Throughput rate;
        std::int64_t cplx1 = 0, cplx2 = 0;
        std::vector<std::uint64_t> codeword_histogram;
        std::size_t codeword_mode = 0;
        int n_blocks = 0;
        std::uint64_t seed = 0;
        std::uint64_t degenerate_phase = 0;
    };

    // Campaign-invariant state: scenario, frame, codebook and transmit formats
    class Simulator
    {
    public:
        Simulator(const RunConfig &cfg, std::vector<Scheme> schemes, std::vector<double> px_dbw)
            : cfg_(cfg), schemes_(std::move(schemes)), px_dbw_(std::move(px_dbw))
        {
            validate(cfg_);
            if (schemes_.empty() || px_dbw_.empty())
                throw ConfigError("campaign", "need at least one scheme and one sweep point");
            scenario_ = channel_scenario(cfg_.scenario);
            scenario_.validate();
            plan_ = frame_plan(cfg_);
            codebook_ = build_codebook(scenario_.ris, scenario_.bs_ris.los_aod, cfg_.frame.codebook_azimuth,
                                       cfg_.frame.codebook_zenith, cfg_.scenario.phase_bits);
            for (const auto &e : codebook_.entries)
                codewords_.push_back(e.values());
            pattern_ = PilotPattern::comb(static_cast<std::size_t>(cfg_.scenario.n_subcarriers),
                                          static_cast<std::size_t>(cfg_.scenario.pilot_count));
            if (plan_.N_h >= 1)
                mapping_.emplace(MdsMapping::serpentine(static_cast<std::size_t>(cfg_.scenario.n_subcarriers),
                                                        static_cast<std::size_t>(plan_.N_h)));
        }

        const RunConfig &config() const noexcept { return cfg_; }
        const ChannelScenario &scenario() const noexcept { return scenario_; }
        const FramePlan &plan() const noexcept { return plan_; }
        const Codebook &codebook() const noexcept { return codebook_; }
        const std::vector<Scheme> &schemes() const noexcept { return schemes_; }
        const std::vector<double> &px_dbw() const noexcept { return px_dbw_; }
        std::size_t n_slots() const noexcept { return schemes_.size() * px_dbw_.size(); }

        // Channel of block `block`, drawn from the block's own stream
        FactoredChannel draw_channel(std::uint64_t seed, std::uint64_t block) const
        {
            Engine rng = make_stream(seed, block, StreamTag::channel);
            LinkDraws d = draw_links(scenario_, rng);
            if (cfg_.scenario.freeze_bs_ris)
            {
                Engine frozen = make_stream(seed, 0, StreamTag::bs_ris_frozen);
                draw_bs_ris(scenario_, d, frozen);
            }
            return factorize(scenario_, d);
        }

        BlockResult run_block(std::uint64_t seed, std::uint64_t block, const BlockOptions &opt = {}) const
        {
            return run_block_on(draw_channel(seed, block), seed, block, opt);
        }

        BlockResult run_block_on(const FactoredChannel &ch, std::uint64_t seed, std::uint64_t block,
                                 const BlockOptions &opt = {}) const;

    private:
        RunConfig cfg_;
        std::vector<Scheme> schemes_;
        std::vector<double> px_dbw_;
        ChannelScenario scenario_;
        FramePlan plan_;
        Codebook codebook_;
        std::vector<CVector> codewords_;
        PilotPattern pattern_;
        std::optional<MdsMapping> mapping_;
    };

    namespace detail
    {
        inline std::size_t count_psk_errors(std::span<const cplx> z, std::span<const std::uint8_t> bits, int order)
        {
            const auto dec = psk_hard_demod(z, order);
            return count_bit_errors(dec, bits);
        }

        // y = h (.) x sqrt(P) + sigma v, row-wise over subcarriers
        inline void receive(const CMatrix &h, std::span<const cplx> x, double amp, double sigma, const CMatrix &v, CMatrix &y)
        {
            const std::size_t K = h.rows(), B = h.cols();
            for (std::size_t k = 0; k < K; ++k)
            {
                const cplx xs = x[k] * amp;
                const cplx *hk = h.data() + k * B;
                const cplx *vk = v.data() + k * B;
                cplx *yk = y.data() + k * B;
                for (std::size_t b = 0; b < B; ++b)
                    yk[b] = hk[b] * xs + sigma * vk[b];
            }
        }
    }

    inline BlockResult Simulator::run_block_on(const FactoredChannel &ch, std::uint64_t seed, std::uint64_t block,
                                               const BlockOptions &opt) const
    {
        const auto &sc = cfg_.scenario;
        const std::size_t K = ch.n_subcarriers(), B = ch.n_bs();
        if (K != static_cast<std::size_t>(sc.n_subcarriers) || B != scenario_.bs.size() || ch.n_ris() != scenario_.ris.size())
            throw std::invalid_argument("run_block_on: channel dimensions do not match the configuration");
        const std::size_t n_px = px_dbw_.size(), n_slots = this->n_slots();
        const double noise_var = opt.noise_var ? *opt.noise_var : sc.noise_var();
        const double sigma = std::sqrt(noise_var);
        const double beta_d_sq = scenario_.direct_enabled ? scenario_.direct.gain() : 0.0;
        const std::size_t Nl = static_cast<std::size_t>(plan_.N_l), Nh = static_cast<std::size_t>(plan_.N_h);

        bool need_ncds1 = false, need_cds1 = false, need_ncds2 = false, need_cds2 = false;
        for (const auto &s : schemes_)
        {
            need_ncds1 |= s.one == StageOneMode::ncds;
            need_cds1 |= s.one == StageOneMode::cds || s.one == StageOneMode::cds_pce;
            need_ncds2 |= s.two == StageTwoMode::ncds;
            need_cds2 |= s.two != StageTwoMode::ncds;
        }

        // Channel per codeword, computed once per block on first use
        const CMatrix h_direct = ch.direct_response();
        std::vector<std::optional<CMatrix>> resp(codewords_.size());
        std::vector<double> beta_r_sq(codewords_.size(), 0.0);
        auto response = [&](std::size_t c) -> const CMatrix &
        {
            if (!resp[c])
            {
                CMatrix r = ch.reflected_response(codewords_[c]);
                beta_r_sq[c] = norm_sq(r.values()) / static_cast<double>(K * B);
                for (std::size_t i = 0; i < r.size(); ++i)
                    r.values()[i] += h_direct.values()[i];
                resp[c] = std::move(r);
            }
            return *resp[c];
        };

        Engine noise_rng = make_stream(seed, block, StreamTag::noise);
        // One data stream per transmit format keeps draws independent of the scheme set
        Engine data_ncds1 = make_stream(seed, block, StreamTag::data, 0);
        Engine data_cds1 = make_stream(seed, block, StreamTag::data, 1);
        Engine data_ncds2 = make_stream(seed, block, StreamTag::data, 2);
        Engine data_cds2 = make_stream(seed, block, StreamTag::data, 3);
        ComplexGaussian gauss(1.0);
        CMatrix v(K, B), y(K, B);

        BlockResult out;
        out.slots.assign(n_slots, {});
        out.selected.assign(n_slots, 0);
        std::vector<std::vector<double>> powers(n_slots, std::vector<double>(Nl, 0.0));

        auto budget = [&](double beta_r, double px)
        { return LinkBudget{beta_d_sq, beta_r, static_cast<int>(B), px, noise_var}; };
        auto analytic_term = [&](double g, double beta_r, double px)
        {
            if (g == 0.0)
                return 0.0;
            const double rho = sinr_ncds(budget(beta_r, px));
            return std::isinf(rho) ? 0.0 : g * g / rho;
        };

        // ---- stage one: beam training ---------------------------------
        const int q1n = sc.ncds_order_l, q1c = sc.cds_order_l;
        const std::size_t nb1n = (K - 2) * static_cast<std::size_t>(bits_per_symbol(q1n));
        const std::size_t nb1c = (K - pattern_.count()) * static_cast<std::size_t>(bits_per_symbol(q1c));
        std::vector<std::uint8_t> bits1n(nb1n), bits1c(nb1c);
        const CVector x_rs(K, cplx(1.0, 0.0));
        for (std::size_t n = 0; n < Nl; ++n)
        {
            const std::size_t cw = plan_.schedule[n];
            const CMatrix &h = response(cw);
            gauss.fill(v.values(), noise_rng);
            PskFrame frame1;
            CVector x_ncds, x_cds;
            if (need_ncds1)
            {
                random_bits(data_ncds1, bits1n);
                frame1.data = psk_modulate(bits1n, q1n);
                frame1.order = q1n;
                x_ncds = diff_encode_fds(frame1, K, 1.0);
            }
            if (need_cds1)
            {
                random_bits(data_cds1, bits1c);
                x_cds = cds_stage_one_tx(bits1c, pattern_, q1c, 1.0);
            }
            for (std::size_t si = 0; si < schemes_.size(); ++si)
            {
                const auto mode = schemes_[si].one;
                const CVector &x = mode == StageOneMode::ncds ? x_ncds : mode == StageOneMode::rs ? x_rs : x_cds;
                for (std::size_t p = 0; p < n_px; ++p)
                {
                    const std::size_t slot = si * n_px + p;
                    const double px = db_to_linear(px_dbw_[p]);
                    detail::receive(h, x, std::sqrt(px), sigma, v, y);
                    powers[slot][n] = measure_power(y);
                    auto &t = out.slots[slot];
                    if (mode == StageOneMode::ncds)
                    {
                        const ResidualPhase ph = estimate_residual_phase(y.row(0), y.row(1), frame1.pilot1, frame1.pilot1 * frame1.pilot2);
                        t.degenerate_phase += ph.degenerate;
                        const CVector z = diff_decode(y, ph.zeta);
                        t.err1 += detail::count_psk_errors(z, bits1n, q1n);
                        t.bits1 += nb1n;
                        const double g = (beta_d_sq + beta_r_sq[cw]) * px;
                        for (std::size_t i = 0; i < z.size(); ++i)
                            t.res1 += std::norm(g * frame1.data[i] - z[i]);
                        t.sig1 += g * g * static_cast<double>(z.size());
                        t.an1 += analytic_term(g, beta_r_sq[cw], px) * static_cast<double>(z.size());
                    }
                    else if (mode == StageOneMode::cds || mode == StageOneMode::cds_pce)
                    {
                        const CoherentRx rx = cds_stage_one_symbol(y, pattern_, q1c, px, mode == StageOneMode::cds_pce ? &h : nullptr);
                        t.err1 += count_bit_errors(rx.bits, bits1c);
                        t.bits1 += nb1c;
                    }
                }
            }
        }
        for (std::size_t slot = 0; slot < n_slots; ++slot)
            out.selected[slot] = select_codeword(powers[slot], plan_.schedule);

        if (Nh == 0)
            return out;

        // ---- stage two: data with the selected configuration -------------
        const int q2n = sc.ncds_order_h, q2c = sc.cds_order_h;
        PskFrame frame2;
        ResourceGrid grid2;
        std::vector<std::uint8_t> bits2n;
        const std::size_t nb2c = K * static_cast<std::size_t>(bits_per_symbol(q2c));
        std::vector<std::uint8_t> bits2c(nb2c);
        const int nbits2n = bits_per_symbol(q2n);
        if (need_ncds2)
        {
            bits2n.resize(mapping_->n_data() * static_cast<std::size_t>(nbits2n));
            random_bits(data_ncds2, bits2n);
            frame2.data = psk_modulate(bits2n, q2n);
            frame2.order = q2n;
            grid2 = mds_encode(frame2, *mapping_, 1.0);
        }
        std::vector<double> zeta2(n_slots, 0.0);
        std::vector<CVector> edge(n_slots, CVector(B));
        std::vector<std::optional<CdsStageTwoRx>> cds2(n_slots);
        CVector x2(K);
        for (std::size_t n = 0; n < Nh; ++n)
        {
            gauss.fill(v.values(), noise_rng);
            CVector x_cds2;
            if (need_cds2)
            {
                if (n == 0)
                    x_cds2.assign(K, cplx(1.0, 0.0));
                else
                {
                    random_bits(data_cds2, bits2c);
                    x_cds2 = cds_stage_two_tx(bits2c, q2c, 1.0);
                }
            }
            if (need_ncds2)
                for (std::size_t k = 0; k < K; ++k)
                    x2[k] = grid2.symbols(k, n);
            for (std::size_t si = 0; si < schemes_.size(); ++si)
            {
                const auto mode = schemes_[si].two;
                const CVector &x = mode == StageTwoMode::ncds ? x2 : x_cds2;
                for (std::size_t p = 0; p < n_px; ++p)
                {
                    const std::size_t slot = si * n_px + p;
                    const double px = db_to_linear(px_dbw_[p]);
                    const std::size_t cw = out.selected[slot];
                    const CMatrix &h = response(cw);
                    detail::receive(h, x, std::sqrt(px), sigma, v, y);
                    auto &t = out.slots[slot];
                    if (mode == StageTwoMode::ncds)
                    {
                        const MdsMapping &map = *mapping_;
                        if (n == 0)
                        {
                            const ResidualPhase ph = estimate_residual_phase(y.row(map[0].k), y.row(map[1].k),
                                                                             frame2.pilot1, frame2.pilot1 * frame2.pilot2);
                            t.degenerate_phase += ph.degenerate;
                            zeta2[slot] = ph.zeta;
                        }
                        const double g = (beta_d_sq + beta_r_sq[cw]) * px;
                        const double an = analytic_term(g, beta_r_sq[cw], px);
                        const std::size_t i0 = std::max<std::size_t>(n * K, 2), i1 = (n + 1) * K;
                        CVector z(i1 - i0);
                        for (std::size_t i = i0; i < i1; ++i)
                        {
                            const Resource &a = map[i - 1], &b = map[i];
                            std::span<const cplx> prev = a.n == n ? y.row(a.k) : std::span<const cplx>(edge[slot]);
                            z[i - i0] = mds_link(map, i, prev, y.row(b.k), zeta2[slot]);
                            t.res2 += std::norm(g * frame2.data[i - 2] - z[i - i0]);
                        }
                        const std::size_t nb = z.size() * static_cast<std::size_t>(nbits2n);
                        t.err2 += detail::count_psk_errors(
                            z, std::span<const std::uint8_t>(bits2n).subspan((i0 - 2) * static_cast<std::size_t>(nbits2n), nb), q2n);
                        t.bits2 += nb;
                        t.sig2 += g * g * static_cast<double>(z.size());
                        t.an2 += an * static_cast<double>(z.size());
                        const auto last = y.row(map[i1 - 1].k);
                        std::copy(last.begin(), last.end(), edge[slot].begin());
                    }
                    else
                    {
                        if (n == 0)
                            cds2[slot].emplace(y, cplx(1.0, 0.0), px, q2c, mode == StageTwoMode::cds_pce ? &h : nullptr);
                        else
                        {
                            const auto dec = cds2[slot]->data_symbol(y);
                            t.err2 += count_bit_errors(dec, bits2c);
                            t.bits2 += nb2c;
                        }
                    }
                }
            }
        }
        return out;
    }

    // Single-slot convenience wrapper
    inline BlockResult run_block(const RunConfig &cfg, const Scheme &scheme, double px_dbw, std::uint64_t seed,
                                 std::uint64_t block)
    {
        return Simulator(cfg, {scheme}, {px_dbw}).run_block(seed, block);
    }

    // Runs `task(i)` for i in [0, n) on up to `workers` threads; the first exception is rethrown
    inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)> &task)
    {
        const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n));
        if (w == 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                task(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < w; ++t)
            pool.emplace_back([&]
                              {
                for (std::size_t i = next++; i < n; i = next++)
                {
                    try
                    {
                        task(i);
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                    }
                } });
        for (auto &th : pool)
            th.join();
        if (error)
            std::rethrow_exception(error);
    }

    inline double ratio_db(double num, double den)
    {
        if (!(den > 0.0))
            return std::numeric_limits<double>::infinity();
        return linear_to_db(num / den);
    }

    // Reduces block results in block order into one report per (scheme, P_x)
    inline std::vector<MetricsReport> summarize(const Simulator &sim, const std::vector<BlockResult> &blocks, std::uint64_t seed)
    {
        const auto &cfg = sim.config();
        const auto &plan = sim.plan();
        const std::size_t n_px = sim.px_dbw().size();
        std::vector<MetricsReport> reports;
        for (std::size_t si = 0; si < sim.schemes().size(); ++si)
        {
            const Scheme &scheme = sim.schemes()[si];
            for (std::size_t p = 0; p < n_px; ++p)
            {
                const std::size_t slot = si * n_px + p;
                SlotTally t;
                std::vector<std::uint64_t> hist(sim.codebook().size(), 0);
                for (const auto &b : blocks)
                {
                    t.add(b.slots[slot]);
                    ++hist[b.selected[slot]];
                }
                MetricsReport r;
                r.px_dbw = sim.px_dbw()[p];
                r.scheme = scheme.name;
                r.bits1 = t.bits1;
                r.bits2 = t.bits2;
                const double nan = std::numeric_limits<double>::quiet_NaN();
                r.ber1 = t.bits1 ? static_cast<double>(t.err1) / static_cast<double>(t.bits1) : nan;
                r.ber2 = t.bits2 ? static_cast<double>(t.err2) / static_cast<double>(t.bits2) : nan;
                r.sinr1_emp_db = t.sig1 > 0.0 ? ratio_db(t.sig1, t.res1) : nan;
                r.sinr1_analytic_db = t.sig1 > 0.0 ? ratio_db(t.sig1, t.an1) : nan;
                r.sinr2_emp_db = t.sig2 > 0.0 ? ratio_db(t.sig2, t.res2) : nan;
                r.sinr2_analytic_db = t.sig2 > 0.0 ? ratio_db(t.sig2, t.an2) : nan;

                ThroughputInputs in;
                in.subcarrier_spacing_hz = cfg.scenario.subcarrier_spacing_hz;
                in.K = cfg.scenario.n_subcarriers;
                in.packet_bits = cfg.scenario.packet_bits;
                const bool n1 = scheme.family_one() == Family::ncds, n2 = scheme.family_two() == Family::ncds;
                in.order_l = n1 ? cfg.scenario.ncds_order_l : cfg.scenario.cds_order_l;
                in.order_h = n2 ? cfg.scenario.ncds_order_h : cfg.scenario.cds_order_h;
                in.ber_l = t.bits1 ? r.ber1 : 0.0;
                in.ber_h = t.bits2 ? r.ber2 : 0.0;
                in.N = plan.N;
                in.N_l = plan.N_l;
                in.N_h = plan.N_h;
                in.K_p = cfg.scenario.pilot_count;
                r.rate = throughput(in, scheme.family_one(), scheme.family_two());

                const std::int64_t B = static_cast<std::int64_t>(sim.scenario().bs.size());
                const std::int64_t C_I = B * (in.K - in.K_p);
                r.cplx1 = complexity(scheme.family_one(), Stage::one, B, in.K, in.K_p, in.N_l, in.N_h, C_I);
                r.cplx2 = plan.N_h >= 1 ? complexity(scheme.family_two(), Stage::two, B, in.K, in.K_p, in.N_l, in.N_h, C_I) : 0;
                auto block_se = [&](auto member_err, auto member_bits)
                {
                    if (blocks.size() < 2)
                        return 0.0;
                    double s1 = 0.0, s2 = 0.0;
                    for (const auto &b : blocks)
                    {
                        const auto &bt = b.slots[slot];
                        const double e = bt.*member_bits ? static_cast<double>(bt.*member_err) / static_cast<double>(bt.*member_bits) : 0.0;
                        s1 += e;
                        s2 += e * e;
                    }
                    const double n = static_cast<double>(blocks.size());
                    const double m = s1 / n;
                    return std::sqrt(std::max(0.0, s2 / n - m * m) / (n - 1.0));
                };
                r.ber1_se = block_se(&SlotTally::err1, &SlotTally::bits1);
                r.ber2_se = block_se(&SlotTally::err2, &SlotTally::bits2);
                r.codeword_histogram = hist;
                r.codeword_mode = static_cast<std::size_t>(std::max_element(hist.begin(), hist.end()) - hist.begin());
                r.n_blocks = static_cast<int>(blocks.size());
                r.seed = seed;
                r.degenerate_phase = t.degenerate_phase;
                reports.push_back(std::move(r));
            }
        }
        return reports;
    }

    inline std::vector<MetricsReport> run_campaign(const Simulator &sim, int n_blocks, std::uint64_t seed, int workers)
    {
        if (n_blocks < 1)
            throw ConfigError("campaign.n_blocks", "must be >= 1");
        std::vector<BlockResult> blocks(static_cast<std::size_t>(n_blocks));
        parallel_for(blocks.size(), workers, [&](std::size_t b)
                     { blocks[b] = sim.run_block(seed, b); });
        return summarize(sim, blocks, seed);
    }

    inline std::vector<Scheme> parse_schemes(const std::vector<std::string> &names)
    {
        std::vector<Scheme> s;
        for (const auto &n : names)
            s.push_back(parse_scheme(n));
        return s;
    }

    inline std::vector<MetricsReport> run_campaign(const RunConfig &cfg)
    {
        Simulator sim(cfg, parse_schemes(cfg.campaign.schemes), cfg.campaign.px_dbw);
        return run_campaign(sim, cfg.campaign.n_blocks, cfg.campaign.seed, cfg.campaign.workers);
    }

    inline void write_metrics_csv(std::ostream &os, const std::vector<MetricsReport> &reports)
    {
        CsvWriter w(os);
        w.units("px_dbw=dBW, ber1/ber2=bit error ratio, sinr_*_db=dB, r_l/r_h/r_total=packets/s, "
                "cplx1/cplx2=complex products per block, sel_codeword_mode=codebook index, n_blocks=blocks, seed=master seed");
        w.header({"px_dbw", "scheme", "ber1", "ber2", "sinr_emp_db", "sinr_analytic_db", "r_l", "r_h", "r_total", "cplx1",
                  "cplx2", "sel_codeword_mode", "n_blocks", "seed", "sinr1_emp_db", "sinr1_analytic_db"});
        for (const auto &r : reports)
            w.row({csv_number(r.px_dbw), r.scheme, csv_number(r.ber1), csv_number(r.ber2), csv_number(r.sinr2_emp_db),
                   csv_number(r.sinr2_analytic_db), csv_number(r.rate.r_l), csv_number(r.rate.r_h), csv_number(r.rate.total),
                   std::to_string(r.cplx1), std::to_string(r.cplx2), std::to_string(r.codeword_mode),
                   std::to_string(r.n_blocks), std::to_string(r.seed), csv_number(r.sinr1_emp_db),
                   csv_number(r.sinr1_analytic_db)});
    }
}
