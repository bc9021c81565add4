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

#include "risdiff/channel.hpp"

#include "json.hpp"

#include <bit>
#include <cstdint>
#include <optional>
#include <set>
#include <string>

namespace risdiff
{
    using ordered_json = nlohmann::ordered_json;

    // Physical scenario; defaults reproduce the reference simulation parameters
    struct ScenarioConfig
    {
        Position bs{0.0, 0.0, 3.0};
        Position ris{10.0, 0.0, 3.0};
        Position ue{10.0, 12.0, 1.0};
        double carrier_hz = 3.5e9;
        double subcarrier_spacing_hz = 30e3;
        int n_subcarriers = 1024;
        int cp_len = 128;
        ArrayGeometry bs_array{4, 4, 0.5, 0.5};
        ArrayGeometry ris_array{8, 8, 0.5, 0.5};
        double gain_direct_db = -86.0;
        double gain_bs_ris_db = -62.0;
        double gain_ris_ue_db = -60.0;
        bool direct_enabled = true;
        int clusters_direct = 20;
        int clusters_bs_ris = 10;
        int clusters_ris_ue = 10;
        double asd_deg = 7.0;
        double asa_deg = 12.0;
        double zsd_deg = 15.0;
        double zsa_deg = 20.0;
        double delay_spread_s = 30e-9;
        double rician_bs_ris = 10.0; // linear
        double rician_ris_ue = 10.0; // linear
        bool freeze_bs_ris = false;
        double noise_dbw = -90.0;
        int ncds_order_l = 4;
        int ncds_order_h = 16;
        int cds_order_l = 4;
        int cds_order_h = 16;
        int pilot_count = 341; // K_p
        int packet_bits = 20;  // L_P
        int phase_bits = 0;    // RIS phase quantization, 0 = continuous

        double noise_var() const { return db_to_linear(noise_dbw); }
        SamplingGrid grid() const { return {n_subcarriers, subcarrier_spacing_hz, cp_len}; }
    };

    struct FrameConfig
    {
        int n_training = 64; // N_l
        int dwell = 1;       // symbols per codeword
        int codebook_azimuth = 8;
        int codebook_zenith = 8;
        std::optional<double> speed_mps; // mobility preset, overrides n_symbols when set
        int n_symbols = 1000;            // N
    };

    struct CampaignConfig
    {
        std::vector<double> px_dbw{-30.0, -25.0, -20.0, -15.0, -10.0, -5.0, 0.0};
        int n_blocks = 10;
        std::uint64_t seed = 1;
        std::vector<std::string> schemes{"ncds", "cds"};
        int workers = 1;
    };

    struct OutputConfig
    {
        std::string directory = "results";
    };

    struct RunConfig
    {
        ScenarioConfig scenario;
        FrameConfig frame;
        CampaignConfig campaign;
        OutputConfig output;
    };

    // Link statistics and array geometry implied by node positions and scenario parameters
    inline ChannelScenario channel_scenario(const ScenarioConfig &s)
    {
        ChannelScenario c;
        c.grid = s.grid();
        c.bs = s.bs_array;
        c.ris = s.ris_array;
        c.direct_enabled = s.direct_enabled;
        auto base = [&](double gain_db, int clusters, double rician)
        {
            LinkStatistics l;
            l.gain_db = gain_db;
            l.n_clusters = clusters;
            l.rician_factor = rician;
            l.delay_spread_s = s.delay_spread_s;
            l.asd_deg = s.asd_deg;
            l.asa_deg = s.asa_deg;
            l.zsd_deg = s.zsd_deg;
            l.zsa_deg = s.zsa_deg;
            return l;
        };
        c.direct = base(s.gain_direct_db, s.clusters_direct, 0.0);
        c.direct.los_aoa = direction_to(s.bs, s.ue);
        c.direct.los_aod = direction_to(s.ue, s.bs);
        c.bs_ris = base(s.gain_bs_ris_db, s.clusters_bs_ris, s.rician_bs_ris);
        c.bs_ris.los_aoa = direction_to(s.bs, s.ris);
        c.bs_ris.los_aod = direction_to(s.ris, s.bs);
        c.ris_ue = base(s.gain_ris_ue_db, s.clusters_ris_ue, s.rician_ris_ue);
        c.ris_ue.los_aoa = direction_to(s.ris, s.ue);
        c.ris_ue.los_aod = direction_to(s.ue, s.ris);
        return c;
    }

    // Two-stage block layout
    struct FramePlan
    {
        int N = 0;      // OFDM symbols per coherence block
        int N_l = 0;    // beam-training symbols
        int N_h = 0;    // data symbols after training
        int dwell = 1;  // symbols per codeword
        int n_codewords = 0;
        std::vector<std::size_t> schedule; // codeword active in training symbol n
        double coherence_time_s = 0.0;     // N (K + L_CP) / (K df)
    };

    inline FramePlan make_frame(int N, int N_l, int dwell, int n_codewords, const SamplingGrid &grid)
    {
        if (dwell < 1)
            throw ConfigError("frame.dwell", "must be >= 1");
        if (n_codewords < 1)
            throw ConfigError("frame.codebook_azimuth", "codebook must hold at least one entry");
        if (N_l < n_codewords * dwell)
            throw ConfigError("frame.n_training", "training must visit every codeword for a full dwell");
        if (N < N_l)
            throw ConfigError("frame.n_symbols", "block shorter than the training stage");
        FramePlan p;
        p.N = N;
        p.N_l = N_l;
        p.N_h = N - N_l;
        p.dwell = dwell;
        p.n_codewords = n_codewords;
        p.schedule.resize(static_cast<std::size_t>(N_l));
        for (int n = 0; n < N_l; ++n)
            p.schedule[static_cast<std::size_t>(n)] = static_cast<std::size_t>((n / dwell) % n_codewords);
        p.coherence_time_s = N * static_cast<double>(grid.n_subcarriers + grid.cp_len) /
                             (grid.n_subcarriers * grid.subcarrier_spacing_hz);
        return p;
    }

    // Preset speeds and their block-length multiples of N_l
    inline double mobility_ratio(double speed_mps)
    {
        struct Preset
        {
            double speed, ratio;
        };
        static constexpr Preset presets[] = {{7.3, 1.0}, {4.8, 1.5}, {3.6, 2.0}, {2.4, 3.0}};
        for (const auto &p : presets)
            if (std::abs(p.speed - speed_mps) < 1e-9)
                return p.ratio;
        throw ConfigError("frame.speed_mps", "unsupported speed; use 7.3, 4.8, 3.6 or 2.4, or set frame.n_symbols");
    }

    inline FramePlan mobility_to_frame(std::optional<double> speed_mps, int explicit_N, int N_l, int dwell, int n_codewords,
                                       const SamplingGrid &grid)
    {
        int N = explicit_N;
        if (speed_mps)
            N = static_cast<int>(std::lround(mobility_ratio(*speed_mps) * N_l));
        return make_frame(N, N_l, dwell, n_codewords, grid);
    }

    inline FramePlan frame_plan(const RunConfig &c)
    {
        return mobility_to_frame(c.frame.speed_mps, c.frame.n_symbols, c.frame.n_training, c.frame.dwell,
                                 c.frame.codebook_azimuth * c.frame.codebook_zenith, c.scenario.grid());
    }

    // Checks everything a campaign needs before any block runs
    inline void validate(const RunConfig &c)
    {
        const auto &s = c.scenario;
        auto require = [](bool ok, const char *field, const char *what)
        {
            if (!ok)
                throw ConfigError(field, what);
        };
        require(s.n_subcarriers >= 3, "scenario.n_subcarriers", "must be >= 3");
        require(s.cp_len >= 1 && s.cp_len < s.n_subcarriers, "scenario.cp_len", "must lie in [1, n_subcarriers)");
        require(s.subcarrier_spacing_hz > 0.0, "scenario.subcarrier_spacing_hz", "must be positive");
        require(s.carrier_hz > 0.0, "scenario.carrier_hz", "must be positive");
        require(s.bs_array.n_h >= 1 && s.bs_array.n_v >= 1, "scenario.bs_array", "element counts must be >= 1");
        require(s.ris_array.n_h >= 1 && s.ris_array.n_v >= 1, "scenario.ris_array", "element counts must be >= 1");
        require(s.bs_array.spacing_h > 0.0 && s.bs_array.spacing_v > 0.0, "scenario.bs_array", "spacing must be positive");
        require(s.ris_array.spacing_h > 0.0 && s.ris_array.spacing_v > 0.0, "scenario.ris_array", "spacing must be positive");
        require(s.gain_direct_db <= 0.0, "scenario.gain_direct_db", "large-scale gain must be <= 0 dB");
        require(s.gain_bs_ris_db <= 0.0, "scenario.gain_bs_ris_db", "large-scale gain must be <= 0 dB");
        require(s.gain_ris_ue_db <= 0.0, "scenario.gain_ris_ue_db", "large-scale gain must be <= 0 dB");
        require(s.clusters_direct >= 1, "scenario.clusters_direct", "must be >= 1");
        require(s.clusters_bs_ris >= 0, "scenario.clusters_bs_ris", "must be >= 0");
        require(s.clusters_ris_ue >= 0, "scenario.clusters_ris_ue", "must be >= 0");
        require(s.delay_spread_s >= 0.0, "scenario.delay_spread_s", "must be >= 0");
        require(s.delay_spread_s * s.n_subcarriers * s.subcarrier_spacing_hz < s.cp_len, "scenario.delay_spread_s",
                "mean delay exceeds the cyclic prefix");
        require(s.rician_bs_ris >= 0.0, "scenario.rician_bs_ris", "must be >= 0");
        require(s.rician_ris_ue >= 0.0, "scenario.rician_ris_ue", "must be >= 0");
        auto psk_ok = [](int q)
        { return q >= 2 && (q & (q - 1)) == 0; };
        auto qam_ok = [&](int q)
        { return psk_ok(q) && (std::countr_zero(static_cast<unsigned>(q)) % 2 == 0); };
        require(psk_ok(s.ncds_order_l), "scenario.ncds_order_l", "PSK order must be a power of two >= 2");
        require(psk_ok(s.ncds_order_h), "scenario.ncds_order_h", "PSK order must be a power of two >= 2");
        require(qam_ok(s.cds_order_l), "scenario.cds_order_l", "QAM order must be an even power of two");
        require(qam_ok(s.cds_order_h), "scenario.cds_order_h", "QAM order must be an even power of two");
        require(s.pilot_count >= 2 && s.pilot_count < s.n_subcarriers, "scenario.pilot_count", "must lie in [2, n_subcarriers)");
        require(s.packet_bits >= 1, "scenario.packet_bits", "must be >= 1");
        require(s.phase_bits >= 0, "scenario.phase_bits", "must be >= 0");
        require(c.frame.n_training >= 1, "frame.n_training", "must be >= 1");
        require(c.frame.codebook_azimuth >= 1, "frame.codebook_azimuth", "must be >= 1");
        require(c.frame.codebook_zenith >= 1, "frame.codebook_zenith", "must be >= 1");
        require(!c.campaign.px_dbw.empty(), "campaign.px_dbw", "sweep must hold at least one point");
        require(c.campaign.n_blocks >= 1, "campaign.n_blocks", "must be >= 1");
        require(c.campaign.workers >= 1, "campaign.workers", "must be >= 1");
        require(!c.campaign.schemes.empty(), "campaign.schemes", "must name at least one scheme");
        frame_plan(c);
    }

    // ---- JSON schema -------------------------------------------------------

    inline ordered_json to_json(const Position &p) { return ordered_json::array({p.x, p.y, p.z}); }

    inline ordered_json to_json(const ArrayGeometry &g)
    {
        ordered_json j;
        j["n_h"] = g.n_h;
        j["n_v"] = g.n_v;
        j["spacing_h"] = g.spacing_h;
        j["spacing_v"] = g.spacing_v;
        return j;
    }

    inline ordered_json to_json(const RunConfig &c)
    {
        const auto &s = c.scenario;
        ordered_json sc;
        sc["bs_position_m"] = to_json(s.bs);
        sc["ris_position_m"] = to_json(s.ris);
        sc["ue_position_m"] = to_json(s.ue);
        sc["carrier_hz"] = s.carrier_hz;
        sc["subcarrier_spacing_hz"] = s.subcarrier_spacing_hz;
        sc["n_subcarriers"] = s.n_subcarriers;
        sc["cp_len"] = s.cp_len;
        sc["bs_array"] = to_json(s.bs_array);
        sc["ris_array"] = to_json(s.ris_array);
        sc["gain_direct_db"] = s.gain_direct_db;
        sc["gain_bs_ris_db"] = s.gain_bs_ris_db;
        sc["gain_ris_ue_db"] = s.gain_ris_ue_db;
        sc["direct_enabled"] = s.direct_enabled;
        sc["clusters_direct"] = s.clusters_direct;
        sc["clusters_bs_ris"] = s.clusters_bs_ris;
        sc["clusters_ris_ue"] = s.clusters_ris_ue;
        sc["asd_deg"] = s.asd_deg;
        sc["asa_deg"] = s.asa_deg;
        sc["zsd_deg"] = s.zsd_deg;
        sc["zsa_deg"] = s.zsa_deg;
        sc["delay_spread_s"] = s.delay_spread_s;
        sc["rician_bs_ris"] = s.rician_bs_ris;
        sc["rician_ris_ue"] = s.rician_ris_ue;
        sc["freeze_bs_ris"] = s.freeze_bs_ris;
        sc["noise_dbw"] = s.noise_dbw;
        sc["ncds_order_l"] = s.ncds_order_l;
        sc["ncds_order_h"] = s.ncds_order_h;
        sc["cds_order_l"] = s.cds_order_l;
        sc["cds_order_h"] = s.cds_order_h;
        sc["pilot_count"] = s.pilot_count;
        sc["packet_bits"] = s.packet_bits;
        sc["phase_bits"] = s.phase_bits;

        ordered_json fr;
        fr["n_training"] = c.frame.n_training;
        fr["dwell"] = c.frame.dwell;
        fr["codebook_azimuth"] = c.frame.codebook_azimuth;
        fr["codebook_zenith"] = c.frame.codebook_zenith;
        fr["speed_mps"] = c.frame.speed_mps ? ordered_json(*c.frame.speed_mps) : ordered_json(nullptr);
        fr["n_symbols"] = c.frame.n_symbols;

        ordered_json ca;
        ca["px_dbw"] = c.campaign.px_dbw;
        ca["n_blocks"] = c.campaign.n_blocks;
        ca["seed"] = c.campaign.seed;
        ca["schemes"] = c.campaign.schemes;
        ca["workers"] = c.campaign.workers;

        ordered_json out;
        out["directory"] = c.output.directory;

        ordered_json j;
        j["scenario"] = sc;
        j["frame"] = fr;
        j["campaign"] = ca;
        j["output"] = out;
        return j;
    }

    namespace detail
    {
        // Strict reader: every declared field must be present with the right type, unknown fields are rejected
        class FieldReader
        {
        public:
            FieldReader(const ordered_json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
            }

            std::string child(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

            const ordered_json &at(const std::string &key)
            {
                seen_.insert(key);
                auto it = j_.find(key);
                if (it == j_.end())
                    throw ConfigError(child(key), "missing field");
                return *it;
            }

            double number(const std::string &key)
            {
                const auto &v = at(key);
                if (!v.is_number())
                    throw ConfigError(child(key), "expected a number");
                return v.get<double>();
            }

            int integer(const std::string &key)
            {
                const auto &v = at(key);
                if (!v.is_number_integer())
                    throw ConfigError(child(key), "expected an integer");
                return v.get<int>();
            }

            std::uint64_t unsigned_integer(const std::string &key)
            {
                const auto &v = at(key);
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                    throw ConfigError(child(key), "expected a nonnegative integer");
                return v.get<std::uint64_t>();
            }

            bool boolean(const std::string &key)
            {
                const auto &v = at(key);
                if (!v.is_boolean())
                    throw ConfigError(child(key), "expected true or false");
                return v.get<bool>();
            }

            std::string string(const std::string &key)
            {
                const auto &v = at(key);
                if (!v.is_string())
                    throw ConfigError(child(key), "expected a string");
                return v.get<std::string>();
            }

            Position position(const std::string &key)
            {
                const auto &v = at(key);
                if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
                    throw ConfigError(child(key), "expected [x, y, z] in meters");
                return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
            }

            ArrayGeometry array(const std::string &key)
            {
                FieldReader r(at(key), child(key));
                ArrayGeometry g;
                g.n_h = r.integer("n_h");
                g.n_v = r.integer("n_v");
                g.spacing_h = r.number("spacing_h");
                g.spacing_v = r.number("spacing_v");
                r.finish();
                return g;
            }

            std::vector<double> numbers(const std::string &key)
            {
                const auto &v = at(key);
                if (!v.is_array())
                    throw ConfigError(child(key), "expected an array of numbers");
                std::vector<double> out;
                for (const auto &e : v)
                {
                    if (!e.is_number())
                        throw ConfigError(child(key), "expected an array of numbers");
                    out.push_back(e.get<double>());
                }
                return out;
            }

            std::vector<std::string> strings(const std::string &key)
            {
                const auto &v = at(key);
                if (!v.is_array())
                    throw ConfigError(child(key), "expected an array of strings");
                std::vector<std::string> out;
                for (const auto &e : v)
                {
                    if (!e.is_string())
                        throw ConfigError(child(key), "expected an array of strings");
                    out.push_back(e.get<std::string>());
                }
                return out;
            }

            void finish() const
            {
                for (auto it = j_.begin(); it != j_.end(); ++it)
                    if (!seen_.count(it.key()))
                        throw ConfigError(child(it.key()), "unknown field");
            }

        private:
            const ordered_json &j_;
            std::string path_;
            std::set<std::string> seen_;
        };
    }

    inline RunConfig run_config_from_json(const ordered_json &j)
    {
        RunConfig c;
        detail::FieldReader root(j, "");
        {
            detail::FieldReader r(root.at("scenario"), "scenario");
            auto &s = c.scenario;
            s.bs = r.position("bs_position_m");
            s.ris = r.position("ris_position_m");
            s.ue = r.position("ue_position_m");
            s.carrier_hz = r.number("carrier_hz");
            s.subcarrier_spacing_hz = r.number("subcarrier_spacing_hz");
            s.n_subcarriers = r.integer("n_subcarriers");
            s.cp_len = r.integer("cp_len");
            s.bs_array = r.array("bs_array");
            s.ris_array = r.array("ris_array");
            s.gain_direct_db = r.number("gain_direct_db");
            s.gain_bs_ris_db = r.number("gain_bs_ris_db");
            s.gain_ris_ue_db = r.number("gain_ris_ue_db");
            s.direct_enabled = r.boolean("direct_enabled");
            s.clusters_direct = r.integer("clusters_direct");
            s.clusters_bs_ris = r.integer("clusters_bs_ris");
            s.clusters_ris_ue = r.integer("clusters_ris_ue");
            s.asd_deg = r.number("asd_deg");
            s.asa_deg = r.number("asa_deg");
            s.zsd_deg = r.number("zsd_deg");
            s.zsa_deg = r.number("zsa_deg");
            s.delay_spread_s = r.number("delay_spread_s");
            s.rician_bs_ris = r.number("rician_bs_ris");
            s.rician_ris_ue = r.number("rician_ris_ue");
            s.freeze_bs_ris = r.boolean("freeze_bs_ris");
            s.noise_dbw = r.number("noise_dbw");
            s.ncds_order_l = r.integer("ncds_order_l");
            s.ncds_order_h = r.integer("ncds_order_h");
            s.cds_order_l = r.integer("cds_order_l");
            s.cds_order_h = r.integer("cds_order_h");
            s.pilot_count = r.integer("pilot_count");
            s.packet_bits = r.integer("packet_bits");
            s.phase_bits = r.integer("phase_bits");
            r.finish();
        }
        {
            detail::FieldReader r(root.at("frame"), "frame");
            c.frame.n_training = r.integer("n_training");
            c.frame.dwell = r.integer("dwell");
            c.frame.codebook_azimuth = r.integer("codebook_azimuth");
            c.frame.codebook_zenith = r.integer("codebook_zenith");
            const auto &sp = r.at("speed_mps");
            if (sp.is_null())
                c.frame.speed_mps.reset();
            else if (sp.is_number())
                c.frame.speed_mps = sp.get<double>();
            else
                throw ConfigError("frame.speed_mps", "expected a number or null");
            c.frame.n_symbols = r.integer("n_symbols");
            r.finish();
        }
        {
            detail::FieldReader r(root.at("campaign"), "campaign");
            c.campaign.px_dbw = r.numbers("px_dbw");
            c.campaign.n_blocks = r.integer("n_blocks");
            c.campaign.seed = r.unsigned_integer("seed");
            c.campaign.schemes = r.strings("schemes");
            c.campaign.workers = r.integer("workers");
            r.finish();
        }
        {
            detail::FieldReader r(root.at("output"), "output");
            c.output.directory = r.string("directory");
            r.finish();
        }
        root.finish();
        return c;
    }

    // Replaces the value at a dotted path such as "scenario.noise_dbw". The path must already exist.
    // `text` is read as JSON when it parses, otherwise as a plain string.
    inline void apply_override(ordered_json &j, const std::string &dotted, const std::string &text)
    {
        ordered_json *node = &j;
        std::size_t start = 0;
        while (true)
        {
            const std::size_t dot = dotted.find('.', start);
            const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (!node->is_object() || !node->contains(key))
                throw ConfigError(dotted, "no such configuration field");
            node = &(*node)[key];
            if (dot == std::string::npos)
                break;
            start = dot + 1;
        }
        ordered_json value = ordered_json::parse(text, nullptr, false);
        *node = value.is_discarded() ? ordered_json(text) : value;
    }
}
