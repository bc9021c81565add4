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

#include "risdiff/engine.hpp"
#include "risdiff/term_oracle.hpp"

#include <array>
#include <sstream>

namespace risdiff
{
    struct Expectation
    {
        std::string check;
        std::string expected;
        double measured = 0.0;
        double tolerance = 0.0;
        bool pass = false;
    };

    inline void write_expectations_csv(std::ostream &os, const std::vector<Expectation> &ex)
    {
        CsvWriter w(os);
        w.units("measured and tolerance share the unit named in the check");
        w.header({"check", "expected", "measured", "tolerance", "pass"});
        for (const auto &e : ex)
            w.row({e.check, e.expected, csv_number(e.measured), csv_number(e.tolerance), e.pass ? "1" : "0"});
    }

    inline std::vector<double> px_range(double first, double last, double step)
    {
        std::vector<double> v;
        const int n = static_cast<int>(std::lround((last - first) / step));
        for (int i = 0; i <= n; ++i)
            v.push_back(first + step * i);
        return v;
    }

    // ---- SINR validation: direct link only and genie RIS configuration --------

    enum class SinrCase
    {
        direct,   // RIS path absent
        best,     // direct + RIS with the LoS-aligned configuration
        codebook, // direct + RIS with the codeword chosen in training (data stage)
    };

    inline const char *to_string(SinrCase c)
    {
        switch (c)
        {
        case SinrCase::direct:
            return "direct";
        case SinrCase::best:
            return "best";
        case SinrCase::codebook:
            return "codebook";
        }
        return "?";
    }

    struct SinrPoint
    {
        double px_dbw = 0.0;
        SinrCase which = SinrCase::direct;
        double emp_db = 0.0;                 // residual phase from the noiseless pilot pair
        double emp_estimated_phase_db = 0.0; // residual phase estimated from the received pilot pair
        double closed_form_db = 0.0;
        double oracle_db = std::numeric_limits<double>::quiet_NaN();
        double beta_r_sq = 0.0;
        int n_blocks = 0;
    };

    struct SinrOptions
    {
        std::vector<double> px_dbw = px_range(-30.0, 0.0, 5.0);
        int n_blocks = 2000;
        int codebook_blocks = 100;
        std::uint64_t oracle_trials = 200000;
        std::uint64_t seed = 1;
        int workers = 1;
    };

    // LoS-aligned RIS configuration for the scenario geometry
    inline CVector genie_configuration(const ChannelScenario &sc, int phase_bits)
    {
        return quantize_phases(best_phase_config(sc.ris, sc.bs_ris.los_aod, sc.ris_ue.los_aoa), phase_bits).values();
    }

    namespace detail
    {
        struct SoftSums
        {
            double zz = 0.0;
            cplx sz{0.0, 0.0};
            double n = 0.0;

            void add(const SoftSums &o)
            {
                zz += o.zz;
                sz += o.sz;
                n += o.n;
            }

            // E|g s - z|^2 for a given reference gain g
            double error(double g) const { return (g * g * n - 2.0 * g * sz.real() + zz) / n; }
        };

        struct SinrBlock
        {
            // [case][P_x]; residual phase from the noiseless pilot pair or from the received one
            std::vector<SoftSums> genie[2], estimated[2];
            double reflected_gain = 0.0; // |H psi|^2 / (K B)
        };
    }

    inline std::vector<SinrPoint> sinr_validation(const RunConfig &cfg, const SinrOptions &opt)
    {
        validate(cfg);
        if (opt.n_blocks < 1)
            throw ConfigError("campaign.n_blocks", "must be >= 1");
        RunConfig direct_cfg = cfg;
        direct_cfg.scenario.direct_enabled = true;
        ChannelScenario sc = channel_scenario(direct_cfg.scenario);
        sc.validate();
        const Simulator draws(direct_cfg, {parse_scheme("ncds")}, opt.px_dbw);
        const CVector psi = genie_configuration(sc, cfg.scenario.phase_bits);
        const std::size_t K = static_cast<std::size_t>(sc.grid.n_subcarriers), B = sc.bs.size();
        const std::size_t n_px = opt.px_dbw.size();
        const double noise_var = cfg.scenario.noise_var(), sigma = std::sqrt(noise_var);
        const int order = cfg.scenario.ncds_order_l;
        const int nb = bits_per_symbol(order);

        std::vector<detail::SinrBlock> blocks(static_cast<std::size_t>(opt.n_blocks));
        parallel_for(blocks.size(), opt.workers, [&](std::size_t b)
                     {
            const FactoredChannel ch = draws.draw_channel(opt.seed, b);
            const CMatrix hd = ch.direct_response();
            CMatrix hb = ch.reflected_response(psi);
            auto &out = blocks[b];
            out.reflected_gain = norm_sq(hb.values()) / static_cast<double>(K * B);
            for (std::size_t i = 0; i < hb.size(); ++i)
                hb.values()[i] += hd.values()[i];

            Engine data_rng = make_stream(opt.seed, b, StreamTag::data);
            Engine noise_rng = make_stream(opt.seed, b, StreamTag::noise);
            PskFrame frame;
            frame.order = order;
            frame.data = psk_modulate(random_bits(data_rng, (K - 2) * static_cast<std::size_t>(nb)), order);
            const CVector x = diff_encode_fds(frame, K, 1.0);
            CMatrix v(K, B), y(K, B);
            ComplexGaussian(1.0).fill(v.values(), noise_rng);
            const CMatrix *h_case[2] = {&hd, &hb};
            for (int c = 0; c < 2; ++c)
            {
                out.genie[c].assign(n_px, {});
                out.estimated[c].assign(n_px, {});
                const CMatrix &h = *h_case[c];
                const double zeta_genie = std::arg(inner(h.row(0), h.row(1)));
                for (std::size_t p = 0; p < n_px; ++p)
                {
                    detail::receive(h, x, std::sqrt(db_to_linear(opt.px_dbw[p])), sigma, v, y);
                    const ResidualPhase ph = estimate_residual_phase(y.row(0), y.row(1), frame.pilot1, frame.pilot1 * frame.pilot2);
                    const CVector z = diff_decode(y, zeta_genie);
                    const cplx rot = std::polar(1.0, zeta_genie - ph.zeta);
                    auto &g = out.genie[c][p];
                    auto &e = out.estimated[c][p];
                    for (std::size_t i = 0; i < z.size(); ++i)
                    {
                        const cplx ze = z[i] * rot;
                        g.zz += std::norm(z[i]);
                        g.sz += std::conj(frame.data[i]) * z[i];
                        e.zz += std::norm(ze);
                        e.sz += std::conj(frame.data[i]) * ze;
                    }
                    g.n += static_cast<double>(z.size());
                    e.n += static_cast<double>(z.size());
                }
            } });

        double br = 0.0;
        std::vector<detail::SoftSums> gsum[2], esum[2];
        for (int c = 0; c < 2; ++c)
        {
            gsum[c].resize(n_px);
            esum[c].resize(n_px);
        }
        for (const auto &b : blocks)
        {
            br += b.reflected_gain;
            for (int c = 0; c < 2; ++c)
                for (std::size_t p = 0; p < n_px; ++p)
                {
                    gsum[c][p].add(b.genie[c][p]);
                    esum[c][p].add(b.estimated[c][p]);
                }
        }
        br /= static_cast<double>(blocks.size());
        const double bd = sc.direct.gain();

        // Decode-term moments at unit power; I1 scales with P^2, I2 and I3 with P
        TermOracleConfig oc{sc, std::nullopt, 1.0, noise_var, order};
        const TermMoments m_direct = term_powers_mc(oc, opt.oracle_trials, opt.seed, opt.workers);
        oc.psi = psi;
        const TermMoments m_best = term_powers_mc(oc, opt.oracle_trials, opt.seed + 1, opt.workers);
        auto oracle_sinr = [](const TermMoments &m, double px)
        {
            TermPowers t = m.mean;
            t.e_sI1 *= px;
            t.p_I1 *= px * px;
            t.p_I2 *= px;
            t.p_I3 *= px;
            return sinr_from_terms(t);
        };

        std::vector<SinrPoint> pts;
        for (std::size_t p = 0; p < n_px; ++p)
        {
            const double px = db_to_linear(opt.px_dbw[p]);
            SinrPoint d;
            d.px_dbw = opt.px_dbw[p];
            d.which = SinrCase::direct;
            const double gd = bd * px;
            d.emp_db = ratio_db(gd * gd, gsum[0][p].error(gd));
            d.emp_estimated_phase_db = ratio_db(gd * gd, esum[0][p].error(gd));
            d.closed_form_db = linear_to_db(sinr_ncds({bd, 0.0, static_cast<int>(B), px, noise_var}));
            d.oracle_db = linear_to_db(oracle_sinr(m_direct, px));
            d.n_blocks = opt.n_blocks;
            pts.push_back(d);

            SinrPoint s = d;
            s.which = SinrCase::best;
            const double gb = (bd + br) * px;
            s.emp_db = ratio_db(gb * gb, gsum[1][p].error(gb));
            s.emp_estimated_phase_db = ratio_db(gb * gb, esum[1][p].error(gb));
            s.closed_form_db = linear_to_db(sinr_ncds({bd, br, static_cast<int>(B), px, noise_var}));
            s.oracle_db = linear_to_db(oracle_sinr(m_best, px));
            s.beta_r_sq = br;
            pts.push_back(s);
        }

        if (opt.codebook_blocks > 0)
        {
            RunConfig cb_cfg = direct_cfg;
            cb_cfg.frame.speed_mps.reset();
            cb_cfg.frame.n_symbols = 2 * cb_cfg.frame.n_training;
            const Simulator sim(cb_cfg, {parse_scheme("ncds")}, opt.px_dbw);
            const auto reps = run_campaign(sim, opt.codebook_blocks, opt.seed, opt.workers);
            for (const auto &r : reps)
            {
                SinrPoint c;
                c.px_dbw = r.px_dbw;
                c.which = SinrCase::codebook;
                c.emp_db = std::numeric_limits<double>::quiet_NaN();
                c.emp_estimated_phase_db = r.sinr2_emp_db;
                c.closed_form_db = r.sinr2_analytic_db;
                c.n_blocks = r.n_blocks;
                pts.push_back(c);
            }
        }
        return pts;
    }

    inline void write_sinr_csv(std::ostream &os, const std::vector<SinrPoint> &pts)
    {
        CsvWriter w(os);
        w.units("px_dbw=dBW, sinr_*_db and gap_*_db=dB, beta_r_sq=linear power gain per antenna, n_blocks=blocks");
        w.header({"px_dbw", "case", "sinr_emp_db", "sinr_emp_estimated_phase_db", "sinr_closed_form_db", "sinr_oracle_db", "gap_closed_form_db",
                  "gap_oracle_db", "beta_r_sq", "n_blocks"});
        for (const auto &p : pts)
            w.row({csv_number(p.px_dbw), to_string(p.which), csv_number(p.emp_db), csv_number(p.emp_estimated_phase_db),
                   csv_number(p.closed_form_db),
                   csv_number(p.oracle_db), csv_number(p.emp_db - p.closed_form_db), csv_number(p.emp_db - p.oracle_db),
                   csv_number(p.beta_r_sq), std::to_string(p.n_blocks)});
    }

    inline std::vector<Expectation> sinr_expectations(const std::vector<SinrPoint> &pts)
    {
        std::vector<Expectation> ex;
        std::map<double, double> direct_emp;
        for (const auto &p : pts)
            if (p.which == SinrCase::direct)
                direct_emp[p.px_dbw] = p.emp_db;
        for (const auto &p : pts)
        {
            if (p.which == SinrCase::codebook)
                continue;
            const std::string tag = std::string(to_string(p.which)) + " @ " + csv_number(p.px_dbw) + " dBW";
            const double g1 = std::abs(p.emp_db - p.oracle_db), g2 = std::abs(p.emp_db - p.closed_form_db);
            ex.push_back({"sinr " + tag + ": |empirical - analytic (oracle moments)| dB", "< 0.5", g1, 0.5, g1 < 0.5});
            ex.push_back({"sinr " + tag + ": |empirical - closed form| dB", "< 0.5", g2, 0.5, g2 < 0.5});
            if (p.which == SinrCase::best)
            {
                const double gap = p.emp_db - direct_emp[p.px_dbw];
                ex.push_back({"reflective gain over direct @ " + csv_number(p.px_dbw) + " dBW (dB)", "[28, 34]", gap, 3.0,
                              gap >= 28.0 && gap <= 34.0});
            }
        }
        return ex;
    }

    // ---- BER and throughput campaigns -----------------------------------------

    struct CampaignOptions
    {
        std::vector<double> px_dbw = px_range(-30.0, 20.0, 2.5);
        int n_blocks = 40;
        std::uint64_t seed = 1;
        int workers = 1;
    };

    inline const std::vector<std::string> &comparison_schemes()
    {
        static const std::vector<std::string> s{"ncds", "cds", "cds-pce", "rs-ncds", "rs-cds"};
        return s;
    }

    // N = 2 N_l, every scheme on common random numbers
    inline std::vector<MetricsReport> ber_campaign(const RunConfig &cfg, const CampaignOptions &opt)
    {
        RunConfig c = cfg;
        c.frame.speed_mps.reset();
        c.frame.n_symbols = 2 * c.frame.n_training;
        const Simulator sim(c, parse_schemes(comparison_schemes()), opt.px_dbw);
        return run_campaign(sim, opt.n_blocks, opt.seed, opt.workers);
    }

    inline const MetricsReport *find_report(const std::vector<MetricsReport> &r, const std::string &scheme, double px)
    {
        for (const auto &m : r)
            if (m.scheme == scheme && std::abs(m.px_dbw - px) < 1e-9)
                return &m;
        return nullptr;
    }

    inline std::vector<const MetricsReport *> scheme_curve(const std::vector<MetricsReport> &r, const std::string &scheme)
    {
        std::vector<const MetricsReport *> c;
        for (const auto &m : r)
            if (m.scheme == scheme)
                c.push_back(&m);
        std::sort(c.begin(), c.end(), [](auto a, auto b)
                  { return a->px_dbw < b->px_dbw; });
        return c;
    }

    // First P_x where the BER curve falls to `target`, log-linear between sweep points; NaN when never reached
    inline double px_at_ber(const std::vector<const MetricsReport *> &curve, int stage, double target)
    {
        auto ber = [stage](const MetricsReport *m)
        { return stage == 1 ? m->ber1 : m->ber2; };
        for (std::size_t i = 0; i < curve.size(); ++i)
        {
            const double b = ber(curve[i]);
            if (!(b <= target))
                continue;
            if (i == 0)
                return curve[0]->px_dbw;
            const double b0 = ber(curve[i - 1]);
            if (b <= 0.0)
            {
                // zero errors: interpolate on a linear BER axis
                const double f = (b0 - target) / b0;
                return curve[i - 1]->px_dbw + f * (curve[i]->px_dbw - curve[i - 1]->px_dbw);
            }
            const double f = (std::log10(b0) - std::log10(target)) / (std::log10(b0) - std::log10(b));
            return curve[i - 1]->px_dbw + f * (curve[i]->px_dbw - curve[i - 1]->px_dbw);
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    struct BerChecks
    {
        std::vector<Expectation> monotone, pce_bound;
        Expectation penalty;
    };

    inline BerChecks ber_expectations(const std::vector<MetricsReport> &r)
    {
        BerChecks out;
        for (const std::string s : {"ncds", "cds", "cds-pce"})
            for (int stage : {1, 2})
            {
                const auto c = scheme_curve(r, s);
                double worst = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 1; i < c.size(); ++i)
                {
                    const double b0 = stage == 1 ? c[i - 1]->ber1 : c[i - 1]->ber2;
                    const double b1 = stage == 1 ? c[i]->ber1 : c[i]->ber2;
                    const double s0 = stage == 1 ? c[i - 1]->ber1_se : c[i - 1]->ber2_se;
                    const double s1 = stage == 1 ? c[i]->ber1_se : c[i]->ber2_se;
                    const double sd = std::sqrt(s0 * s0 + s1 * s1);
                    // rise in units of the combined standard error
                    const double z = b1 - b0 <= 0.0 ? 0.0 : (sd > 0.0 ? (b1 - b0) / sd : std::numeric_limits<double>::infinity());
                    worst = std::max(worst, z);
                }
                out.monotone.push_back({"stage " + std::to_string(stage) + " " + s + " BER nonincreasing in P_x (max rise, sigma)",
                                        "<= 2", worst, 2.0, worst <= 2.0});
            }
        for (int stage : {1, 2})
        {
            const auto pce = scheme_curve(r, "cds-pce"), est = scheme_curve(r, "cds");
            double worst = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < std::min(pce.size(), est.size()); ++i)
            {
                const double bp = stage == 1 ? pce[i]->ber1 : pce[i]->ber2;
                const double be = stage == 1 ? est[i]->ber1 : est[i]->ber2;
                const double sp = stage == 1 ? pce[i]->ber1_se : pce[i]->ber2_se;
                const double se = stage == 1 ? est[i]->ber1_se : est[i]->ber2_se;
                const double sd = std::sqrt(sp * sp + se * se);
                const double z = bp - be <= 0.0 ? 0.0 : (sd > 0.0 ? (bp - be) / sd : std::numeric_limits<double>::infinity());
                worst = std::max(worst, z);
            }
            out.pce_bound.push_back({"stage " + std::to_string(stage) + " CDS-PCE BER <= CDS BER (max excess, sigma)", "<= 2",
                                     worst, 2.0, worst <= 2.0});
        }
        const double pn = px_at_ber(scheme_curve(r, "ncds"), 2, 1e-3);
        const double pp = px_at_ber(scheme_curve(r, "cds-pce"), 2, 1e-3);
        const double pen = pn - pp;
        out.penalty = {"stage 2 non-coherent penalty vs CDS-PCE at BER 1e-3 (dB)", "[2, 4]", pen, 1.0, pen >= 2.0 && pen <= 4.0};
        return out;
    }

    inline std::vector<Expectation> throughput_expectations(const std::vector<MetricsReport> &r)
    {
        std::vector<Expectation> ex;
        if (r.empty())
            return ex;
        double top = r.front().px_dbw;
        for (const auto &m : r)
            top = std::max(top, m.px_dbw);
        auto total = [&](const std::string &s)
        {
            const auto *m = find_report(r, s, top);
            return m ? m->rate.total : std::numeric_limits<double>::quiet_NaN();
        };
        const double rn = total("ncds"), rc = total("cds"), rrn = total("rs-ncds"), rrc = total("rs-cds");
        ex.push_back({"total throughput NCDS / CDS @ " + csv_number(top) + " dBW", "> 1", rn / rc, 0.0, rn > rc});
        ex.push_back({"total throughput RS-NCDS / RS-CDS @ " + csv_number(top) + " dBW", "> 1", rrn / rrc, 0.0, rrn > rrc});
        ex.push_back({"total throughput NCDS / RS-NCDS @ " + csv_number(top) + " dBW", "> 1", rn / rrn, 0.0, rn > rrn});
        return ex;
    }

    // ---- Throughput table across mobility presets ----------------------------

    struct ThroughputCell
    {
        double speed_mps = 0.0;
        int N = 0;
        std::string scheme;
        int stage = 1;
        double measured = 0.0;  // packets/s with measured BER
        double zero_ber = 0.0;  // packets/s with P_e = 0
        double reference = 0.0; // published packets/s
        double ber = 0.0;
    };

    inline const std::array<double, 4> &mobility_speeds()
    {
        static const std::array<double, 4> s{7.3, 4.8, 3.6, 2.4};
        return s;
    }

    // Published table in 1e6 packets/s, indexed [scheme: cds, ncds][speed][stage]
    inline double throughput_reference(const std::string &scheme, std::size_t speed, int stage)
    {
        static const double cds[4][2] = {{2.04, 0.0}, {1.36, 2.04}, {1.02, 3.06}, {0.68, 4.09}};
        static const double ncds[4][2] = {{3.05, 0.0}, {2.04, 2.05}, {1.53, 3.07}, {1.02, 4.1}};
        const auto &t = scheme == "ncds" ? ncds : cds;
        return t[speed][stage - 1] * 1e6;
    }

    inline std::vector<ThroughputCell> throughput_table(const RunConfig &cfg, double px_dbw, int n_blocks, std::uint64_t seed,
                                                        int workers)
    {
        std::vector<ThroughputCell> cells;
        for (std::size_t si = 0; si < mobility_speeds().size(); ++si)
        {
            RunConfig c = cfg;
            c.frame.speed_mps = mobility_speeds()[si];
            const Simulator sim(c, parse_schemes({"cds", "ncds"}), {px_dbw});
            const auto reps = run_campaign(sim, n_blocks, seed, workers);
            for (const auto &r : reps)
            {
                const Scheme sch = parse_scheme(r.scheme);
                ThroughputInputs in;
                in.subcarrier_spacing_hz = c.scenario.subcarrier_spacing_hz;
                in.K = c.scenario.n_subcarriers;
                in.packet_bits = c.scenario.packet_bits;
                in.order_l = r.scheme == "ncds" ? c.scenario.ncds_order_l : c.scenario.cds_order_l;
                in.order_h = r.scheme == "ncds" ? c.scenario.ncds_order_h : c.scenario.cds_order_h;
                in.N = sim.plan().N;
                in.N_l = sim.plan().N_l;
                in.N_h = sim.plan().N_h;
                in.K_p = c.scenario.pilot_count;
                const Throughput ideal = throughput(in, sch.family_one(), sch.family_two());
                for (int stage : {1, 2})
                {
                    ThroughputCell cell;
                    cell.speed_mps = mobility_speeds()[si];
                    cell.N = sim.plan().N;
                    cell.scheme = r.scheme;
                    cell.stage = stage;
                    cell.measured = stage == 1 ? r.rate.r_l : r.rate.r_h;
                    cell.zero_ber = stage == 1 ? ideal.r_l : ideal.r_h;
                    cell.reference = throughput_reference(r.scheme, si, stage);
                    cell.ber = stage == 1 ? r.ber1 : r.ber2;
                    cells.push_back(cell);
                }
            }
        }
        return cells;
    }

    inline double relative_error(double measured, double reference)
    {
        if (reference == 0.0)
            return measured == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return std::abs(measured - reference) / std::abs(reference);
    }

    inline void write_throughput_table_csv(std::ostream &os, const std::vector<ThroughputCell> &cells)
    {
        CsvWriter w(os);
        w.units("speed_mps=m/s, N=OFDM symbols, r_*=packets/s, ber=bit error ratio, rel_err=relative");
        w.header({"speed_mps", "N", "scheme", "stage", "r_measured", "r_zero_ber", "r_reference", "rel_err", "ber"});
        for (const auto &c : cells)
            w.row({csv_number(c.speed_mps), std::to_string(c.N), c.scheme, std::to_string(c.stage), csv_number(c.measured),
                   csv_number(c.zero_ber), csv_number(c.reference), csv_number(relative_error(c.measured, c.reference)),
                   csv_number(c.ber)});
    }

    inline std::vector<Expectation> throughput_table_expectations(const std::vector<ThroughputCell> &cells)
    {
        std::vector<Expectation> ex;
        for (const auto &c : cells)
        {
            const double e = relative_error(c.measured, c.reference);
            ex.push_back({c.scheme + " stage " + std::to_string(c.stage) + " @ " + csv_number(c.speed_mps) +
                              " m/s: relative error vs reference",
                          "< 0.05 of " + csv_number(c.reference), e, 0.05, e < 0.05});
        }
        return ex;
    }

    // ---- RIS size and training length ----------------------------------------

    struct RisSizeCase
    {
        int ris_side = 8;       // square RIS, side x side elements
        int codebook_azimuth = 8;
        int codebook_zenith = 8;
        int n_training = 64;
        int n_data = 192;
        std::vector<MetricsReport> reports;
        std::vector<double> upper_bound; // zero-BER throughput per sweep point
    };

    // N = 4 U with U the default training length; codebooks of U or 2U entries trained over as many symbols
    inline std::vector<RisSizeCase> ris_size_campaign(const RunConfig &cfg, const CampaignOptions &opt)
    {
        const int U = cfg.frame.n_training;
        std::vector<RisSizeCase> cases;
        for (int side : {8, 16})
            for (int mult : {1, 2})
            {
                RisSizeCase rc;
                rc.ris_side = side;
                rc.codebook_azimuth = cfg.frame.codebook_azimuth * mult;
                rc.codebook_zenith = cfg.frame.codebook_zenith;
                rc.n_training = rc.codebook_azimuth * rc.codebook_zenith * cfg.frame.dwell;
                RunConfig c = cfg;
                c.scenario.ris_array.n_h = side;
                c.scenario.ris_array.n_v = side;
                c.frame.codebook_azimuth = rc.codebook_azimuth;
                c.frame.n_training = rc.n_training;
                c.frame.speed_mps.reset();
                c.frame.n_symbols = 4 * U;
                const Simulator sim(c, {parse_scheme("ncds")}, opt.px_dbw);
                rc.n_data = sim.plan().N_h;
                rc.reports = run_campaign(sim, opt.n_blocks, opt.seed, opt.workers);
                ThroughputInputs in;
                in.subcarrier_spacing_hz = c.scenario.subcarrier_spacing_hz;
                in.K = c.scenario.n_subcarriers;
                in.packet_bits = c.scenario.packet_bits;
                in.order_l = c.scenario.ncds_order_l;
                in.order_h = c.scenario.ncds_order_h;
                in.N = sim.plan().N;
                in.N_l = sim.plan().N_l;
                in.N_h = sim.plan().N_h;
                in.K_p = c.scenario.pilot_count;
                const double ub = throughput(in, Family::ncds, Family::ncds).total;
                rc.upper_bound.assign(rc.reports.size(), ub);
                cases.push_back(std::move(rc));
            }
        return cases;
    }

    inline void write_ris_size_csv(std::ostream &os, const std::vector<RisSizeCase> &cases)
    {
        CsvWriter w(os);
        w.units("px_dbw=dBW, ris_elements=elements, n_codewords=entries, n_training/n_data=OFDM symbols, "
                "ber=bit error ratio, r_*=packets/s");
        w.header({"px_dbw", "ris_elements", "n_codewords", "n_training", "n_data", "ber1", "ber2", "r_total", "r_upper_bound",
                  "sel_codeword_mode", "n_blocks", "seed"});
        for (const auto &c : cases)
        {
            const int n_cw = c.codebook_azimuth * c.codebook_zenith;
            for (std::size_t i = 0; i < c.reports.size(); ++i)
            {
                const auto &r = c.reports[i];
                w.row({csv_number(r.px_dbw), std::to_string(c.ris_side * c.ris_side), std::to_string(n_cw),
                       std::to_string(c.n_training), std::to_string(c.n_data),
                       csv_number(r.ber1), csv_number(r.ber2), csv_number(r.rate.total), csv_number(c.upper_bound[i]),
                       std::to_string(r.codeword_mode), std::to_string(r.n_blocks), std::to_string(r.seed)});
            }
        }
    }

    inline Expectation ris_size_expectation(const std::vector<RisSizeCase> &cases)
    {
        const RisSizeCase *small = nullptr, *large = nullptr;
        for (const auto &c : cases)
        {
            const int n_cw = c.codebook_azimuth * c.codebook_zenith;
            if (c.ris_side == 8 && (small == nullptr || n_cw < small->codebook_azimuth * small->codebook_zenith))
                small = &c;
            if (c.ris_side == 16 && (large == nullptr || n_cw > large->codebook_azimuth * large->codebook_zenith))
                large = &c;
        }
        double frac = 0.0;
        if (small && large && !small->reports.empty())
        {
            std::size_t wins = 0;
            for (std::size_t i = 0; i < small->reports.size(); ++i)
                wins += large->reports[i].rate.total < small->reports[i].rate.total;
            frac = static_cast<double>(wins) / static_cast<double>(small->reports.size());
        }
        return {"fraction of sweep points with R(16x16, 2U entries) < R(8x8, U entries)", ">= 0.8", frac, 0.0, frac >= 0.8};
    }

    // ---- Complexity table -----------------------------------------------------

    struct ComplexityRow
    {
        std::string scheme;
        int stage = 1;
        std::string formula;
        std::int64_t value = 0;
    };

    inline std::vector<ComplexityRow> complexity_table(std::int64_t B, std::int64_t K, std::int64_t K_p, std::int64_t N_l,
                                                       std::int64_t N_h)
    {
        const std::int64_t C_I = B * (K - K_p);
        return {
            {"rs", 1, "0", complexity(Family::rs, Stage::one, B, K, K_p, N_l, N_h, C_I)},
            {"cds", 1, "N_l (B K_p + B^2 (K - K_p) + C_I)", complexity(Family::cds, Stage::one, B, K, K_p, N_l, N_h, C_I)},
            {"ncds", 1, "2 (K - 1) N_l", complexity(Family::ncds, Stage::one, B, K, K_p, N_l, N_h, C_I)},
            {"cds", 2, "B K ((B^2 + 1) + B (N_h - 1))", complexity(Family::cds, Stage::two, B, K, K_p, N_l, N_h, C_I)},
            {"ncds", 2, "2 (K N_h - 1)", complexity(Family::ncds, Stage::two, B, K, K_p, N_l, N_h, C_I)},
        };
    }

    inline void write_complexity_csv(std::ostream &os, const std::vector<ComplexityRow> &rows, std::int64_t B, std::int64_t K,
                                     std::int64_t K_p, std::int64_t N_l, std::int64_t N_h)
    {
        CsvWriter w(os);
        w.units("complex_products=complex multiplications per coherence block");
        w.header({"scheme", "stage", "formula", "B", "K", "K_p", "N_l", "N_h", "C_I", "complex_products"});
        for (const auto &r : rows)
            w.row({r.scheme, std::to_string(r.stage), r.formula, std::to_string(B), std::to_string(K), std::to_string(K_p),
                   std::to_string(N_l), std::to_string(N_h), std::to_string(B * (K - K_p)), std::to_string(r.value)});
    }

    // ---- Target dispatch ------------------------------------------------------

    struct ReproduceOptions
    {
        std::optional<int> n_blocks;
        std::uint64_t seed = 1;
        int workers = 1;
        std::optional<std::vector<double>> px_dbw;
    };

    struct ReproduceOutput
    {
        std::vector<std::pair<std::string, std::string>> files; // file name, content
        std::vector<Expectation> expectations;
    };

    inline const std::vector<std::string> &reproduce_targets()
    {
        static const std::vector<std::string> t{"fig3", "fig4", "fig5", "fig6", "table1", "table3"};
        return t;
    }

    inline ReproduceOutput reproduce(const std::string &target, const RunConfig &cfg, const ReproduceOptions &opt)
    {
        ReproduceOutput out;
        std::ostringstream data;
        if (target == "fig3")
        {
            SinrOptions so;
            if (opt.px_dbw)
                so.px_dbw = *opt.px_dbw;
            if (opt.n_blocks)
                so.n_blocks = *opt.n_blocks;
            so.seed = opt.seed;
            so.workers = opt.workers;
            const auto pts = sinr_validation(cfg, so);
            write_sinr_csv(data, pts);
            out.expectations = sinr_expectations(pts);
        }
        else if (target == "fig4" || target == "fig5")
        {
            CampaignOptions co;
            if (opt.px_dbw)
                co.px_dbw = *opt.px_dbw;
            if (opt.n_blocks)
                co.n_blocks = *opt.n_blocks;
            co.seed = opt.seed;
            co.workers = opt.workers;
            const auto reps = ber_campaign(cfg, co);
            write_metrics_csv(data, reps);
            if (target == "fig4")
            {
                const BerChecks b = ber_expectations(reps);
                out.expectations = b.monotone;
                out.expectations.insert(out.expectations.end(), b.pce_bound.begin(), b.pce_bound.end());
                out.expectations.push_back(b.penalty);
            }
            else
                out.expectations = throughput_expectations(reps);
        }
        else if (target == "fig6")
        {
            CampaignOptions co;
            co.n_blocks = 20;
            if (opt.px_dbw)
                co.px_dbw = *opt.px_dbw;
            if (opt.n_blocks)
                co.n_blocks = *opt.n_blocks;
            co.seed = opt.seed;
            co.workers = opt.workers;
            const auto cases = ris_size_campaign(cfg, co);
            write_ris_size_csv(data, cases);
            out.expectations.push_back(ris_size_expectation(cases));
        }
        else if (target == "table1")
        {
            const FramePlan plan = frame_plan(cfg);
            const std::int64_t B = static_cast<std::int64_t>(cfg.scenario.bs_array.size());
            const std::int64_t K = cfg.scenario.n_subcarriers, K_p = cfg.scenario.pilot_count;
            const auto rows = complexity_table(B, K, K_p, plan.N_l, plan.N_h);
            write_complexity_csv(data, rows, B, K, K_p, plan.N_l, plan.N_h);
            const std::int64_t C_I = B * (K - K_p);
            const std::int64_t literal[5] = {0, plan.N_l * (B * K_p + B * B * (K - K_p) + C_I), 2 * (K - 1) * plan.N_l,
                                             B * K * ((B * B + 1) + B * (plan.N_h - 1)), 2 * (K * plan.N_h - 1)};
            for (std::size_t i = 0; i < rows.size(); ++i)
                out.expectations.push_back({rows[i].scheme + " stage " + std::to_string(rows[i].stage) + ": " + rows[i].formula,
                                            std::to_string(literal[i]), static_cast<double>(rows[i].value), 0.0,
                                            rows[i].value == literal[i]});
        }
        else if (target == "table3")
        {
            const double px = opt.px_dbw && !opt.px_dbw->empty() ? opt.px_dbw->front() : -8.0;
            const auto cells = throughput_table(cfg, px, opt.n_blocks.value_or(100), opt.seed, opt.workers);
            write_throughput_table_csv(data, cells);
            out.expectations = throughput_table_expectations(cells);
        }
        else
            throw ConfigError("target", "unknown reproduce target '" + target + "'");
        out.files.emplace_back(target + ".csv", data.str());
        std::ostringstream ex;
        write_expectations_csv(ex, out.expectations);
        out.files.emplace_back(target + "_expectations.csv", ex.str());
        return out;
    }
}
