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

// risdiff command-line front end: run | reproduce | analyze

#include "risdiff/reproduce.hpp"
#include "risdiff/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace fs = std::filesystem;
using namespace risdiff;

namespace
{
    struct Flags
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<int> workers;
        std::string out;
        std::vector<double> px;
        std::vector<std::string> schemes;
        std::vector<std::string> sets;
    };

    void add_common(CLI::App &cmd, Flags &f)
    {
        cmd.add_option("--config", f.config, "JSON configuration file (all fields required)");
        cmd.add_option("--seed", f.seed, "master seed");
        cmd.add_option("--workers", f.workers, "worker threads");
        cmd.add_option("--out", f.out, "output directory (overrides RISDIFF_OUT_DIR)");
        cmd.add_option("--px", f.px, "transmit powers in dBW, comma separated")->delimiter(',')->allow_extra_args(false);
        cmd.add_option("--set", f.sets, "override a configuration field, key.path=value");
    }

    std::string read_file(const std::string &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw ConfigError("--config", "cannot read '" + path + "'");
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    RunConfig resolve(const Flags &f)
    {
        ordered_json j;
        if (f.config.empty())
            j = to_json(RunConfig{});
        else
        {
            try
            {
                j = ordered_json::parse(read_file(f.config));
            }
            catch (const ordered_json::parse_error &e)
            {
                throw ConfigError("--config", e.what());
            }
        }
        for (const auto &s : f.sets)
        {
            const auto eq = s.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ConfigError("--set", "expected key.path=value, got '" + s + "'");
            apply_override(j, s.substr(0, eq), s.substr(eq + 1));
        }
        RunConfig c = run_config_from_json(j);
        if (f.seed)
            c.campaign.seed = *f.seed;
        if (f.workers)
            c.campaign.workers = *f.workers;
        if (!f.px.empty())
            c.campaign.px_dbw = f.px;
        if (!f.schemes.empty())
            c.campaign.schemes = f.schemes;
        if (!f.out.empty())
            c.output.directory = f.out;
        else if (const char *env = std::getenv("RISDIFF_OUT_DIR"); env && *env)
            c.output.directory = env;
        validate(c);
        return c;
    }

    std::uint64_t fnv1a(const std::string &s)
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char ch : s)
        {
            h ^= ch;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    void write_text(const fs::path &p, const std::string &text)
    {
        std::ofstream os(p, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot write " + p.string());
        os << text;
        if (!os)
            throw std::runtime_error("write failed for " + p.string());
    }

    // Output directory, frozen configuration and run manifest
    class Session
    {
    public:
        Session(std::string command, RunConfig cfg) : command_(std::move(command)), cfg_(std::move(cfg)),
                                                      start_(std::chrono::steady_clock::now())
        {
            dir_ = cfg_.output.directory;
            fs::create_directories(dir_);
            config_text_ = to_json(cfg_).dump(2) + "\n";
        }

        const RunConfig &config() const { return cfg_; }

        void write(const std::string &name, const std::string &text) const { write_text(dir_ / name, text); }

        void finish() const
        {
            write("resolved_config.json", config_text_);
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
            std::ostringstream m;
            m << "tool risdiff " << version << "\n"
              << "command " << command_ << "\n"
              << "config_hash fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(config_text_) << std::dec
              << "\n"
              << "seed " << cfg_.campaign.seed << "\n"
              << "workers " << cfg_.campaign.workers << "\n"
              << "wall_time_s " << std::fixed << std::setprecision(3) << wall << "\n";
            write("manifest.txt", m.str());
            std::cerr << "risdiff: wrote " << dir_.string() << "\n";
        }

    private:
        std::string command_;
        RunConfig cfg_;
        fs::path dir_;
        std::string config_text_;
        std::chrono::steady_clock::time_point start_;
    };

    void cmd_run(const Flags &f)
    {
        Session s("run", resolve(f));
        const auto reports = run_campaign(s.config());
        std::ostringstream csv;
        write_metrics_csv(csv, reports);
        s.write("results.csv", csv.str());
        s.finish();
    }

    void cmd_reproduce(const Flags &f, const std::string &target, std::optional<int> blocks)
    {
        if (std::find(reproduce_targets().begin(), reproduce_targets().end(), target) == reproduce_targets().end())
            throw ConfigError("target", "unknown reproduce target '" + target + "'");
        Session s("reproduce " + target, resolve(f));
        ReproduceOptions o;
        o.n_blocks = blocks;
        o.seed = s.config().campaign.seed;
        o.workers = s.config().campaign.workers;
        if (!f.px.empty())
            o.px_dbw = f.px;
        const ReproduceOutput out = reproduce(target, s.config(), o);
        for (const auto &[name, text] : out.files)
            s.write(name, text);
        std::size_t failed = 0;
        for (const auto &e : out.expectations)
            failed += !e.pass;
        std::cerr << "risdiff: " << target << ": " << out.expectations.size() - failed << "/" << out.expectations.size()
                  << " expectations met\n";
        s.finish();
    }

    void cmd_analyze(const Flags &f)
    {
        Session s("analyze", resolve(f));
        const auto &c = s.config();
        const ChannelScenario sc = channel_scenario(c.scenario);
        auto mu = [](double k)
        { return std::isinf(k) ? 1.0 : std::sqrt(k / (k + 1.0)); };
        const double br = upper_bound_reflective(sc.bs_ris.gain(), sc.ris_ue.gain(), mu(c.scenario.rician_bs_ris),
                                                 mu(c.scenario.rician_ris_ue), sc.ris.size());
        const double bd = c.scenario.direct_enabled ? sc.direct.gain() : 0.0;
        const int B = static_cast<int>(sc.bs.size());
        const double nv = c.scenario.noise_var();
        std::ostringstream csv;
        CsvWriter w(csv);
        w.units("px_dbw=dBW, rho_*_db=dB (SINR), beta_*_sq=linear power gain per antenna; rho_emp_db is empty without Monte Carlo");
        w.header({"px_dbw", "rho_ncds_db", "rho_d_db", "rho_r_db", "rho_r_linear_approx_db", "rho_emp_db", "beta_d_sq",
                  "beta_r_sq_bound"});
        for (double p : c.campaign.px_dbw)
        {
            const double px = db_to_linear(p);
            const LinkBudget all{bd, br, B, px, nv}, dir{bd, 0.0, B, px, nv}, refl{0.0, br, B, px, nv};
            w.row({csv_number(p), csv_number(linear_to_db(sinr_ncds(all))),
                   bd > 0.0 ? csv_number(linear_to_db(sinr_direct(dir))) : "nan", csv_number(linear_to_db(sinr_reflective(refl))),
                   csv_number(linear_to_db(sinr_reflective_linear(refl))), "nan", csv_number(bd), csv_number(br)});
        }
        s.write("analysis.csv", csv.str());

        const FramePlan plan = frame_plan(c);
        const std::int64_t K = c.scenario.n_subcarriers, K_p = c.scenario.pilot_count;
        std::ostringstream cx;
        write_complexity_csv(cx, complexity_table(B, K, K_p, plan.N_l, plan.N_h), B, K, K_p, plan.N_l, plan.N_h);
        s.write("complexity.csv", cx.str());
        s.finish();
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"risdiff: RIS-aided differential SIMO-OFDM link-level simulator"};
    app.set_version_flag("--version", std::string("risdiff ") + version);
    app.require_subcommand(1);

    Flags run_flags, rep_flags, an_flags;
    auto *run = app.add_subcommand("run", "run a Monte Carlo campaign");
    add_common(*run, run_flags);
    run->add_option("--scheme", run_flags.schemes, "schemes: ncds, cds, cds-pce, rs-ncds, rs-cds")->delimiter(',');

    std::string target;
    std::optional<int> blocks;
    auto *rep = app.add_subcommand("reproduce", "reproduce a figure or table as CSV");
    rep->add_option("target", target, "fig3 | fig4 | fig5 | fig6 | table1 | table3")->required();
    rep->add_option("--blocks", blocks, "Monte Carlo blocks per point (target default when omitted)");
    add_common(*rep, rep_flags);

    auto *an = app.add_subcommand("analyze", "closed-form SINR and complexity tables");
    add_common(*an, an_flags);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 2;
    }

    try
    {
        if (*run)
            cmd_run(run_flags);
        else if (*rep)
            cmd_reproduce(rep_flags, target, blocks);
        else if (*an)
            cmd_analyze(an_flags);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "risdiff: configuration error: " << e.what() << "\n";
        return 2;
    }
    catch (const ordered_json::exception &e)
    {
        std::cerr << "risdiff: configuration error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "risdiff: runtime error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
