// SPDX-License-Identifier: Apache-2.0
//
// thz-gbsm: stochastic terahertz channel simulation and analysis
// Copyright (C) 2026 The thz-gbsm Authors
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

#include "report.hpp"
#include "svg_plot.hpp"

#include "thz_gbsm/analysis.hpp"
#include "thz_gbsm/capacity.hpp"
#include "thz_gbsm/parallel.hpp"
#include "thz_gbsm/pathloss.hpp"
#include "thz_gbsm/roundtrip.hpp"
#include "thz_gbsm/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#ifndef THZ_GBSM_VERSION
#define THZ_GBSM_VERSION "0.0.0"
#endif

using namespace thz;
using namespace thz::cli;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace
{
    constexpr int exit_fail = 1;
    constexpr int exit_usage = 2;
    constexpr int exit_internal = 3;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    // ---- shared flag handling ----------------------------------------------

    struct Common
    {
        std::string params;
        std::string scenario = "office";
        std::string condition = "los";
        std::string source = "measured";
        std::uint64_t seed = 1;
        unsigned threads = 1;
        std::string out;
    };

    struct LoadedParams
    {
        fs::path file;
        std::vector<ScenarioParamSet> sets;
    };

    void add_selection(CLI::App *cmd, Common &c)
    {
        cmd->add_option("--params", c.params, "Parameter file (JSON); default: bundled file for --source");
        cmd->add_option("--scenario", c.scenario, "office | umi")
            ->check(CLI::IsMember({"office", "umi"}))
            ->capture_default_str();
        cmd->add_option("--condition", c.condition, "los | nlos")
            ->check(CLI::IsMember({"los", "nlos"}))
            ->capture_default_str();
        cmd->add_option("--source", c.source, "measured | 3gpp")
            ->check(CLI::IsMember({"measured", "3gpp"}))
            ->capture_default_str();
    }

    void add_run(CLI::App *cmd, Common &c)
    {
        cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
        cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores); results do not depend on it")
            ->capture_default_str();
        cmd->add_option("--out", c.out, "Output directory")->required();
    }

    LoadedParams load(const std::string &flag_value, Source source)
    {
        LoadedParams p;
        p.file = flag_value.empty() ? bundled_params_file(source) : fs::path(flag_value);
        if (!fs::is_regular_file(p.file))
            throw UsageError("--params: file '" + p.file.string() + "' not found");
        try
        {
            p.sets = load_params_file(p.file);
        }
        catch (const ParamError &e)
        {
            throw UsageError(std::string("--params: ") + e.what());
        }
        return p;
    }

    ScenarioParamSet choose(const LoadedParams &p, Scenario s, Condition c)
    {
        try
        {
            return select(p.sets, s, c);
        }
        catch (const ParamError &e)
        {
            throw UsageError(std::string("--scenario/--condition: ") + e.what());
        }
    }

    Manifest manifest_for(const std::string &command, const std::vector<std::string> &args,
                          const std::vector<fs::path> &files, std::uint64_t seed)
    {
        Manifest m;
        m.command = command;
        m.arguments = args;
        m.seed = seed;
        m.version = THZ_GBSM_VERSION;
        for (const auto &f : files)
        {
            if (!m.params_file.empty())
            {
                m.params_file += ";";
                m.params_sha256 += ";";
            }
            m.params_file += f.string();
            m.params_sha256 += sha256_file(f);
        }
        return m;
    }

    std::pair<int, int> parse_array(const std::string &flag, const std::string &v)
    {
        const auto x = v.find('x');
        try
        {
            if (x != std::string::npos)
            {
                std::size_t a = 0, b = 0;
                const int rows = std::stoi(v.substr(0, x), &a);
                const int cols = std::stoi(v.substr(x + 1), &b);
                if (a == x && b == v.size() - x - 1 && rows > 0 && cols > 0)
                    return {rows, cols};
            }
        }
        catch (const std::exception &)
        {
        }
        throw UsageError(flag + ": expected ROWSxCOLS with positive sizes, got '" + v + "'");
    }

    CirMode parse_mode(const std::string &m) { return m == "standard" ? CirMode::Standard : CirMode::ThzSimplified; }

    std::string k_cell(const KFactor &k) { return k.infinite() ? "inf" : fmt(*k.db); }

    // ---- simulate ----------------------------------------------------------

    struct SimulateArgs
    {
        Common c;
        std::size_t drops = 10;
        std::string mode = "thz";
        bool dump_clusters = false;
        bool dump_cir = false;
        std::string bs_array = "1x1";
        std::string mu_array = "1x1";
    };

    int run_simulate(const SimulateArgs &a, const std::vector<std::string> &argv)
    {
        const auto loaded = load(a.c.params, parse_source(a.c.source));
        const auto scenario = parse_scenario(a.c.scenario);
        const auto params = choose(loaded, scenario, parse_condition(a.c.condition));
        const auto [bs_r, bs_c] = parse_array("--bs-array", a.bs_array);
        const auto [mu_r, mu_c] = parse_array("--mu-array", a.mu_array);

        DropOptions o;
        o.placement = Placement::defaults(scenario);
        o.threads = a.c.threads;
        const auto drops = simulate_drops(params, a.drops, a.c.seed, o);

        OutputDir out(a.c.out);
        Table lsp{{"x_m", "y_m", "ds_s", "asa_deg", "sf_db", "k_db"}, {}};
        for (const auto &d : drops)
            lsp.rows.push_back({fmt(d.mu.x()), fmt(d.mu.y()), fmt(d.lsp.ds), fmt(d.lsp.asa), fmt(d.lsp.sf),
                                d.lsp.k ? fmt(*d.lsp.k) : ""});
        out.add("lsp.csv", lsp.str());

        if (a.dump_clusters)
        {
            Table t{{"drop", "cluster", "delay_ns", "power", "aoa_deg", "zoa_deg", "aod_deg", "zod_deg", "ray"}, {}};
            for (const auto &d : drops)
            {
                const auto &cs = d.clusters;
                if (cs.direct)
                {
                    const auto &g = cs.direct->geometry;
                    t.rows.push_back({std::to_string(d.index), "-1", fmt(cs.direct->delay * 1e9),
                                      fmt(cs.direct_share()), fmt(g.aoa), fmt(g.zoa), fmt(g.aod), fmt(g.zod), "0"});
                }
                for (std::size_t n = 0; n < cs.size(); ++n)
                {
                    const auto &cl = cs.clusters[n];
                    for (std::size_t m = 0; m < cl.rays.size(); ++m)
                    {
                        const auto &r = cl.rays[m];
                        t.rows.push_back({std::to_string(d.index), std::to_string(n), fmt(cl.delay * 1e9),
                                          fmt(cs.nlos_share() * cl.power * r.power_fraction), fmt(r.aoa),
                                          fmt(r.zoa), fmt(r.aod), fmt(r.zod), std::to_string(m)});
                    }
                }
            }
            out.add("clusters.csv", t.str());
        }

        if (a.dump_cir)
        {
            const double spacing = 0.5 * params.wavelength_m();
            LinkArrays link;
            link.tx = AntennaArray::ura(bs_r, bs_c, spacing);
            link.rx = AntennaArray::ura(mu_r, mu_c, spacing);
            link.wavelength = params.wavelength_m();
            CirOptions cir;
            cir.mode = parse_mode(a.mode);

            std::vector<std::vector<std::vector<std::string>>> rows(drops.size());
            parallel_for(drops.size(), a.c.threads,
                         [&](std::size_t i)
                         {
                             const auto cr = assemble_cir(drops[i].clusters, link, cir);
                             for (Eigen::Index u = 0; u < cr.n_rx; ++u)
                                 for (Eigen::Index s = 0; s < cr.n_tx; ++s)
                                     for (const auto &tap : cr.taps)
                                     {
                                         const cplx h = tap.h[0](u, s);
                                         rows[i].push_back({std::to_string(i), std::to_string(u), std::to_string(s),
                                                            fmt(tap.delay * 1e9), fmt(h.real()), fmt(h.imag())});
                                     }
                         });
            Table t{{"drop", "u", "s", "delay_ns", "re", "im"}, {}};
            for (auto &r : rows)
                for (auto &row : r)
                    t.rows.push_back(std::move(row));
            out.add("cir.csv", t.str());
        }

        out.finish(manifest_for("simulate", argv, {loaded.file}, a.c.seed));
        std::cout << "simulate: " << drops.size() << " drops of " << params.name << " written to " << a.c.out << "\n";
        return 0;
    }

    // ---- analyze -----------------------------------------------------------

    struct AnalyzeArgs
    {
        std::string input;
        std::string out;
        bool pathloss = false;
        std::optional<double> freq_ghz;
        std::optional<double> noise_floor;
        double margin_db = 10.0;
        double zeta = 8.0;
        int k_max = 10;
        std::uint64_t seed = 1;
    };

    struct DropRecord
    {
        std::string id;
        double ds = nan;
        double asa = nan;
        KFactor k;
        bool has_k = false;
        std::optional<ClusterStats> clusters;
        double distance = nan;
        std::optional<PathLossSample> pl_omni, pl_best;
    };

    struct Summary
    {
        double mu = nan;
        double sigma = nan;
        std::size_t n = 0;
    };

    Summary summarize(const std::vector<double> &v, bool log)
    {
        Summary s;
        s.n = v.size();
        if (v.empty())
            return s;
        if (v.size() == 1)
        {
            s.mu = log ? std::log10(v[0]) : v[0];
            s.sigma = 0.0;
            return s;
        }
        const auto g = log ? fit_lognormal(v) : fit_normal(v);
        s.mu = g.mu;
        s.sigma = g.sigma;
        return s;
    }

    ojson to_json(const Summary &s)
    {
        ojson j;
        j["mu"] = std::isfinite(s.mu) ? ojson(s.mu) : ojson(nullptr);
        j["sigma"] = std::isfinite(s.sigma) ? ojson(s.sigma) : ojson(nullptr);
        j["samples"] = s.n;
        return j;
    }

    // Rows grouped by the optional drop column, ordered numerically.
    std::map<double, std::vector<std::size_t>> group_rows(const CsvDocument &doc)
    {
        std::map<double, std::vector<std::size_t>> groups;
        const auto col = doc.column("drop");
        for (std::size_t r = 0; r < doc.rows.size(); ++r)
            groups[col ? doc.number(r, *col) : 0.0].push_back(r);
        return groups;
    }

    void check_columns(const CsvDocument &doc, const std::set<std::string> &required,
                       const std::set<std::string> &optional, const std::string &schema)
    {
        for (const auto &c : required)
            if (!doc.column(c))
                throw UsageError("--input: " + schema + " schema is missing column '" + c + "'");
        std::set<std::string> seen;
        for (const auto &h : doc.header)
        {
            if (!required.count(h) && !optional.count(h))
                throw UsageError("--input: column '" + h + "' is not part of the " + schema + " schema");
            if (!seen.insert(h).second)
                throw UsageError("--input: column '" + h + "' appears twice");
        }
    }

    std::optional<ClusterStats> cluster_drop(const std::vector<Mpc> &mpcs, const AnalyzeArgs &a)
    {
        if (mpcs.size() < 2)
            return std::nullopt;
        KpmOptions o;
        o.zeta = a.zeta;
        o.seed = a.seed;
        const int k_max = std::min<int>(a.k_max, static_cast<int>(mpcs.size()));
        const auto r = kpower_means_auto(mpcs, 2, k_max, o);
        return cluster_stats(MpcSet{mpcs, r.labels});
    }

    std::string drop_id(double v) { return fmt(v); }

    std::vector<DropRecord> analyze_mpc(const CsvDocument &doc, const AnalyzeArgs &a)
    {
        check_columns(doc, {"drop", "delay_ns", "power", "aoa_deg"},
                      {"zoa_deg", "aod_deg", "zod_deg", "cluster", "ray"}, "MPC");
        if (a.pathloss)
            throw UsageError("--pathloss: needs PDP input with a 'distance_m' column");
        const auto c_delay = *doc.column("delay_ns"), c_power = *doc.column("power"), c_aoa = *doc.column("aoa_deg");
        const auto c_zoa = doc.column("zoa_deg");

        std::vector<DropRecord> out;
        for (const auto &[id, rows] : group_rows(doc))
        {
            std::vector<Mpc> mpcs;
            for (auto r : rows)
            {
                Mpc m;
                m.delay = doc.number(r, c_delay) * 1e-9;
                m.power = doc.number(r, c_power);
                m.aoa = doc.number(r, c_aoa);
                m.zoa = c_zoa ? doc.number(r, *c_zoa) : 90.0;
                if (!(m.power > 0.0))
                    throw UsageError("--input: column 'power', row " + std::to_string(r + 1) + ": must be positive");
                if (m.delay < 0.0)
                    throw UsageError("--input: column 'delay_ns', row " + std::to_string(r + 1) +
                                     ": must be nonnegative");
                mpcs.push_back(m);
            }
            const auto e = extract(mpcs, {});
            DropRecord d;
            d.id = drop_id(id);
            d.ds = e.ds;
            d.asa = e.asa;
            d.k = e.k;
            d.has_k = true;
            d.clusters = cluster_drop(mpcs, a);
            out.push_back(std::move(d));
        }
        return out;
    }

    std::vector<DropRecord> analyze_pdp(const CsvDocument &doc, const AnalyzeArgs &a)
    {
        check_columns(doc, {"delay_ns", "power_linear"},
                      {"phi_tx_deg", "phi_rx_deg", "theta_rx_deg", "drop", "distance_m"}, "PDP");
        const int n_dir = (doc.column("phi_tx_deg") ? 1 : 0) + (doc.column("phi_rx_deg") ? 1 : 0) +
                          (doc.column("theta_rx_deg") ? 1 : 0);
        if (n_dir != 0 && n_dir != 3)
            for (const char *c : {"phi_tx_deg", "phi_rx_deg", "theta_rx_deg"})
                if (!doc.column(c))
                    throw UsageError(std::string("--input: direction columns are incomplete, missing '") + c + "'");
        const bool directional = n_dir == 3;
        const auto c_dist = doc.column("distance_m");
        if (a.pathloss && !c_dist)
            throw UsageError("--pathloss: input has no 'distance_m' column");

        const auto c_delay = *doc.column("delay_ns"), c_power = *doc.column("power_linear");
        std::vector<DropRecord> out;
        for (const auto &[id, rows] : group_rows(doc))
        {
            const std::string did = drop_id(id);
            using Key = std::tuple<double, double, double>;
            std::map<Key, std::vector<std::pair<double, double>>> by_dir;
            double distance = nan;
            for (auto r : rows)
            {
                Key key{0.0, 0.0, 90.0};
                if (directional)
                    key = {doc.number(r, *doc.column("phi_tx_deg")), doc.number(r, *doc.column("phi_rx_deg")),
                           doc.number(r, *doc.column("theta_rx_deg"))};
                const double p = doc.number(r, c_power);
                if (p < 0.0)
                    throw UsageError("--input: column 'power_linear', row " + std::to_string(r + 1) +
                                     ": must be nonnegative");
                by_dir[key].emplace_back(doc.number(r, c_delay) * 1e-9, p);
                if (c_dist)
                {
                    const double dd = doc.number(r, *c_dist);
                    if (std::isfinite(distance) && dd != distance)
                        throw UsageError("--input: column 'distance_m' varies within drop " + did);
                    distance = dd;
                }
            }

            std::vector<Pdp> pdps;
            for (auto &[key, bins] : by_dir)
            {
                std::sort(bins.begin(), bins.end());
                Pdp p;
                p.delay0 = bins.front().first;
                p.spacing = bins.size() > 1 ? bins[1].first - bins[0].first : 1e-9;
                for (std::size_t i = 0; i < bins.size(); ++i)
                {
                    if (std::abs(bins[i].first - p.delay(i)) > 1e-6 * p.spacing + 1e-18 || !(p.spacing > 0.0))
                        throw UsageError("--input: column 'delay_ns': drop " + did +
                                         " is not on a uniform delay grid");
                    p.power.push_back(bins[i].second);
                }
                if (directional)
                    p.direction = Direction{std::get<0>(key), std::get<1>(key), std::get<2>(key)};
                if (a.noise_floor)
                    p = threshold(p, a.margin_db, *a.noise_floor);
                pdps.push_back(std::move(p));
            }

            Pdp omni;
            try
            {
                omni = directional ? synth_omni(pdps) : pdps.front();
            }
            catch (const std::invalid_argument &)
            {
                throw UsageError("--input: column 'delay_ns': directions of drop " + did +
                                 " use different delay grids");
            }

            DropRecord d;
            d.id = did;
            d.distance = distance;
            if (omni.total() > 0.0)
            {
                d.ds = rms_ds(omni);
                d.k = k_factor(omni);
                d.has_k = true;
                if (directional)
                    d.asa = asa(dap_from_directional(pdps));

                std::vector<Mpc> mpcs;
                for (const auto &p : pdps)
                    for (std::size_t i = 0; i < p.power.size(); ++i)
                        if (p.power[i] > 0.0)
                        {
                            Mpc m;
                            m.delay = p.delay(i);
                            m.power = p.power[i];
                            if (p.direction)
                            {
                                m.aoa = p.direction->phi_rx;
                                m.zoa = p.direction->theta_rx;
                            }
                            mpcs.push_back(m);
                        }
                d.clusters = cluster_drop(mpcs, a);
                if (a.pathloss)
                {
                    d.pl_omni = pl_from_pdp(omni, distance, Condition::LoS);
                    if (directional)
                        d.pl_best = pl_best_direction(pdps, distance, Condition::LoS);
                }
            }
            out.push_back(std::move(d));
        }
        return out;
    }

    ojson fit_json(const std::vector<PathLossSample> &samples, double f_ghz)
    {
        ojson j;
        j["samples"] = samples.size();
        try
        {
            const auto fit = fit_ci(samples, f_ghz);
            j["ple"] = fit.n;
            j["sigma_db"] = fit.sigma_db;
        }
        catch (const std::invalid_argument &e)
        {
            j["ple"] = nullptr;
            j["sigma_db"] = nullptr;
            j["note"] = e.what();
        }
        return j;
    }

    int run_analyze(const AnalyzeArgs &a, const std::vector<std::string> &argv)
    {
        if (a.pathloss && !a.freq_ghz)
            throw UsageError("--pathloss: requires --freq-ghz");
        const auto doc = read_csv(a.input, "--input");
        const bool mpc = doc.column("power").has_value();
        if (!mpc && !doc.column("power_linear"))
            throw UsageError("--input: needs a 'power' column (MPC schema) or a 'power_linear' column (PDP schema)");
        const auto drops = mpc ? analyze_mpc(doc, a) : analyze_pdp(doc, a);

        std::vector<double> ds, asa_v, k_v, count, c_ds, c_asa, c_k;
        std::size_t k_inf = 0;
        std::vector<std::array<double, 3>> paired; // lgDS, lgASA, K for cross-correlations
        Table per_drop{{"drop", "ds_s", "asa_deg", "k_db", "n_clusters", "c_ds_ns", "c_asa_deg", "c_k_db"}, {}};
        Table pl{{"distance_m", "pl_db", "kind"}, {}};
        std::vector<PathLossSample> omni_samples, best_samples;
        for (const auto &d : drops)
        {
            if (d.ds > 0.0)
                ds.push_back(d.ds);
            if (d.asa > 0.0)
                asa_v.push_back(d.asa);
            if (d.has_k)
            {
                if (d.k.infinite())
                    ++k_inf;
                else
                    k_v.push_back(*d.k.db);
            }
            if (d.ds > 0.0 && d.asa > 0.0 && d.has_k && !d.k.infinite())
                paired.push_back({std::log10(d.ds), std::log10(d.asa), *d.k.db});
            std::vector<std::string> row{d.id, fmt(d.ds), fmt(d.asa), d.has_k ? k_cell(d.k) : ""};
            if (d.clusters)
            {
                count.push_back(d.clusters->count);
                c_ds.push_back(d.clusters->median_c_ds);
                c_asa.push_back(d.clusters->median_c_asa);
                if (d.clusters->median_c_k_db)
                    c_k.push_back(*d.clusters->median_c_k_db);
                row.insert(row.end(), {std::to_string(d.clusters->count), fmt(d.clusters->median_c_ds * 1e9),
                                       fmt(d.clusters->median_c_asa),
                                       d.clusters->median_c_k_db ? fmt(*d.clusters->median_c_k_db) : "inf"});
            }
            else
                row.insert(row.end(), {"", "", "", ""});
            per_drop.rows.push_back(std::move(row));
            if (d.pl_omni)
            {
                omni_samples.push_back(*d.pl_omni);
                pl.rows.push_back({fmt(d.distance), fmt(d.pl_omni->loss_db), "omnidirectional"});
            }
            if (d.pl_best)
            {
                best_samples.push_back(*d.pl_best);
                pl.rows.push_back({fmt(d.distance), fmt(d.pl_best->loss_db), "best_direction"});
            }
        }
        if (ds.empty())
            throw UsageError("--input: no drop carries any power above the threshold");

        ojson rep;
        rep["input"] = fs::path(a.input).filename().string();
        rep["schema"] = mpc ? "mpc" : "pdp";
        rep["drops"] = drops.size();
        ojson p;
        p["lgDS"] = to_json(summarize(ds, true));
        p["lgASA"] = to_json(summarize(asa_v, true));
        auto kj = to_json(summarize(k_v, false));
        kj["infinite"] = k_inf;
        p["K_dB"] = kj;
        ojson cl;
        cl["cluster_count_mean"] = count.empty() ? ojson(nullptr) : ojson(summarize(count, false).mu);
        cl["cluster_count_median"] = count.empty() ? ojson(nullptr) : ojson(median(count));
        cl["C_DS_ns_median"] = c_ds.empty() ? ojson(nullptr) : ojson(median(c_ds) * 1e9);
        cl["C_ASA_deg_median"] = c_asa.empty() ? ojson(nullptr) : ojson(median(c_asa));
        cl["C_K_dB_median"] = c_k.empty() ? ojson(nullptr) : ojson(median(c_k));
        p["clusters"] = cl;
        ojson xc;
        if (paired.size() >= 3)
        {
            Eigen::MatrixXd cols(static_cast<Eigen::Index>(paired.size()), 3);
            for (std::size_t i = 0; i < paired.size(); ++i)
                for (int j = 0; j < 3; ++j)
                    cols(static_cast<Eigen::Index>(i), j) = paired[i][static_cast<std::size_t>(j)];
            try
            {
                const auto r = cross_corr(cols);
                xc["ASA_vs_DS"] = r(1, 0);
                xc["K_vs_DS"] = r(2, 0);
                xc["K_vs_ASA"] = r(2, 1);
            }
            catch (const std::invalid_argument &e)
            {
                xc["note"] = e.what();
            }
        }
        else
            xc["note"] = "fewer than three drops with DS, ASA and finite K";
        p["cross_correlation"] = xc;
        rep["parameters"] = p;
        if (a.pathloss)
        {
            ojson plj;
            plj["frequency_ghz"] = *a.freq_ghz;
            plj["omnidirectional"] = fit_json(omni_samples, *a.freq_ghz);
            if (!best_samples.empty())
                plj["best_direction"] = fit_json(best_samples, *a.freq_ghz);
            rep["path_loss"] = plj;
        }

        OutputDir out(a.out);
        out.add("analysis.csv", per_drop.str());
        out.add("report.json", rep.dump(2) + "\n");
        if (a.pathloss)
            out.add("pathloss.csv", pl.str());
        out.finish(manifest_for("analyze", argv, {}, a.seed));

        std::cout << "analyze: " << drops.size() << " drops (" << rep["schema"].get<std::string>() << " input)\n";
        auto line = [](const std::string &name, const Summary &s) {
            std::cout << "  " << name << ": mu " << fmt(s.mu) << "  sigma " << fmt(s.sigma) << "  (" << s.n
                      << " samples)\n";
        };
        line("lgDS [log10 s]", summarize(ds, true));
        line("lgASA [log10 deg]", summarize(asa_v, true));
        line("K [dB]", summarize(k_v, false));
        return 0;
    }

    // ---- roundtrip ---------------------------------------------------------

    struct RoundTripArgs
    {
        Common c;
        std::size_t drops = 500;
        std::string mode = "thz";
        double tolerance_log10 = 0.15;
        double tolerance_k_db = 3.0;
        std::optional<double> forced_k;
    };

    int run_roundtrip_cmd(const RoundTripArgs &a, const std::vector<std::string> &argv)
    {
        const auto loaded = load(a.c.params, parse_source(a.c.source));
        const auto scenario = parse_scenario(a.c.scenario);
        const auto params = choose(loaded, scenario, parse_condition(a.c.condition));
        if (a.forced_k && params.condition != Condition::LoS)
            throw UsageError("--forced-k: only applies to --condition los");

        RoundTripOptions o;
        o.drops = a.drops;
        o.seed = a.c.seed;
        o.mode = parse_mode(a.mode);
        o.tolerance_log10 = a.tolerance_log10;
        o.tolerance_k_db = a.tolerance_k_db;
        o.drop.placement = Placement::defaults(scenario);
        o.drop.threads = a.c.threads;
        o.drop.clusters.forced_k_db = a.forced_k;
        const auto r = run_roundtrip(params, o);

        Table stats{{"statistic", "generated", "extracted", "delta", "tolerance", "pass"}, {}};
        for (const auto &s : r.stats)
            stats.rows.push_back({s.name, fmt(s.generated), fmt(s.extracted), fmt(s.delta()), fmt(s.tolerance),
                                  s.pass() ? "PASS" : "FAIL"});
        Table per{{"drop", "ds_drawn_s", "ds_s", "asa_drawn_deg", "asa_deg", "k_drawn_db", "k_db"}, {}};
        for (const auto &d : r.drops)
            per.rows.push_back({std::to_string(d.drop), fmt(d.drawn.ds), fmt(d.ds), fmt(d.drawn.asa), fmt(d.asa),
                                d.drawn.k ? fmt(*d.drawn.k) : "", d.drawn.k ? k_cell(d.k) : ""});

        OutputDir out(a.c.out);
        out.add("roundtrip.csv", stats.str());
        out.add("roundtrip_drops.csv", per.str());
        out.finish(manifest_for("roundtrip", argv, {loaded.file}, a.c.seed));

        std::cout << "roundtrip: " << params.name << ", " << r.drops.size() << " drops, seed " << a.c.seed << "\n";
        for (const auto &s : r.stats)
            std::cout << "  " << s.name << ": generated " << fmt(s.generated) << "  extracted " << fmt(s.extracted)
                      << "  delta " << fmt(s.delta()) << "  tolerance " << fmt(s.tolerance) << "  "
                      << (s.pass() ? "PASS" : "FAIL") << "\n";
        std::cout << (r.pass() ? "PASS" : "FAIL") << "\n";
        return r.pass() ? 0 : exit_fail;
    }

    // ---- capacity ----------------------------------------------------------

    struct CapacityArgs
    {
        std::string params;
        std::string scenario = "both";
        std::string source = "both";
        std::string condition = "los";
        double los_fraction = 0.5;
        std::size_t drops = 100;
        std::uint64_t seed = 1;
        unsigned threads = 1;
        std::string snr = "0:40:1";
        std::string mode = "thz";
        std::string normalization = "experiment";
        bool no_pathloss = false;
        std::string bs_array = "16x16";
        std::string mu_array = "2x2";
        int tones = 64;
        double bandwidth = 1e9;
        std::string out;
    };

    std::vector<double> parse_snr(const std::string &v)
    {
        auto number = [&](const std::string &s) {
            std::size_t used = 0;
            double x = nan;
            try
            {
                x = std::stod(s, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used == 0 || used != s.size() || !std::isfinite(x))
                throw UsageError("--snr: '" + s + "' is not a number");
            return x;
        };
        std::vector<double> out;
        if (v.find(':') != std::string::npos)
        {
            const auto a = v.find(':');
            const auto b = v.find(':', a + 1);
            if (b == std::string::npos)
                throw UsageError("--snr: expected START:STOP:STEP, got '" + v + "'");
            const double lo = number(v.substr(0, a)), hi = number(v.substr(a + 1, b - a - 1)),
                         step = number(v.substr(b + 1));
            if (!(step > 0.0) || hi < lo)
                throw UsageError("--snr: need STEP > 0 and STOP >= START");
            const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
            for (std::size_t i = 0; i <= n; ++i)
                out.push_back(lo + static_cast<double>(i) * step);
            return out;
        }
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(number(item));
        if (out.empty())
            throw UsageError("--snr: empty grid");
        for (std::size_t i = 1; i < out.size(); ++i)
            if (!(out[i] > out[i - 1]))
                throw UsageError("--snr: values must be strictly increasing");
        return out;
    }

    int run_capacity_cmd(const CapacityArgs &a, const std::vector<std::string> &argv)
    {
        std::vector<Source> sources;
        if (a.source == "both")
            sources = {Source::Measured, Source::ThreeGpp};
        else
            sources = {parse_source(a.source)};
        if (!a.params.empty() && sources.size() != 1)
            throw UsageError("--params: requires a single --source");
        std::vector<Scenario> scenarios;
        if (a.scenario == "both")
            scenarios = {Scenario::IndoorOffice, Scenario::UMi};
        else
            scenarios = {parse_scenario(a.scenario)};

        CapacityOptions o;
        o.snr_db = parse_snr(a.snr);
        o.n_drops = a.drops;
        o.seed = a.seed;
        o.n_tones = a.tones;
        o.bandwidth = a.bandwidth;
        std::tie(o.bs_rows, o.bs_cols) = parse_array("--bs-array", a.bs_array);
        std::tie(o.mu_rows, o.mu_cols) = parse_array("--mu-array", a.mu_array);
        o.mode = parse_mode(a.mode);
        o.condition = parse_condition_mode(a.condition);
        o.los_fraction = a.los_fraction;
        o.include_path_loss = !a.no_pathloss;
        o.normalization = a.normalization == "drop" ? Normalization::PerDrop : Normalization::PerExperiment;
        o.threads = a.threads;

        std::map<Source, LoadedParams> loaded;
        std::vector<fs::path> files;
        for (auto s : sources)
        {
            loaded[s] = load(a.params, s);
            files.push_back(loaded[s].file);
            for (auto sc : scenarios)
            {
                if (o.condition != ConditionMode::NLoS)
                    choose(loaded[s], sc, Condition::LoS);
                if (o.condition != ConditionMode::LoS)
                    choose(loaded[s], sc, Condition::NLoS);
            }
        }

        Table t{{"snr_db", "mean_capacity_bpshz", "source", "scenario"}, {}};
        std::vector<Series> series;
        std::map<std::pair<Scenario, Source>, CapacityCurve> curves;
        for (auto sc : scenarios)
            for (auto s : sources)
            {
                const auto curve = run_capacity_experiment(loaded[s].sets, sc, o);
                for (std::size_t i = 0; i < curve.snr_db.size(); ++i)
                    t.rows.push_back({fmt(curve.snr_db[i]), fmt(curve.capacity[i]), std::string(to_string(s)),
                                      std::string(to_string(sc))});
                Series se;
                se.label = std::string(sc == Scenario::IndoorOffice ? "Indoor office" : "UMi") + ", " +
                           (s == Source::Measured ? "measurement" : "3GPP");
                se.x = curve.snr_db;
                se.y = curve.capacity;
                se.color = sc == Scenario::IndoorOffice ? "#1f77b4" : "#d62728";
                se.dashed = s == Source::ThreeGpp;
                series.push_back(std::move(se));
                curves[{sc, s}] = curve;
            }

        PlotSpec plot;
        plot.title = "Channel capacity, " + std::to_string(o.bs_rows * o.bs_cols) + "x" +
                     std::to_string(o.mu_rows * o.mu_cols) + " MIMO, " + to_string(o.condition);
        plot.x_label = "SNR [dB]";
        plot.y_label = "Capacity [bps/Hz]";

        OutputDir out(a.out);
        out.add("capacity.csv", t.str());
        out.add("capacity.svg", render_svg(plot, series));
        out.finish(manifest_for("capacity", argv, files, a.seed));

        std::cout << "capacity: " << a.drops << " drops per curve, condition " << to_string(o.condition) << "\n";
        const double probe = 30.0;
        for (auto sc : scenarios)
            if (curves.count({sc, Source::Measured}) && curves.count({sc, Source::ThreeGpp}))
                std::cout << "  " << to_string(sc) << ": 3gpp - measured at " << probe << " dB = "
                          << fmt(curves[{sc, Source::ThreeGpp}].at(probe) - curves[{sc, Source::Measured}].at(probe))
                          << " bps/Hz\n";
        if (curves.count({Scenario::IndoorOffice, Source::Measured}) && curves.count({Scenario::UMi, Source::Measured}))
        {
            const auto x = crossover_snr(curves[{Scenario::IndoorOffice, Source::Measured}],
                                         curves[{Scenario::UMi, Source::Measured}]);
            std::cout << "  office vs umi (measured) crossover: " << (x ? fmt(*x) + " dB" : std::string("none"))
                      << "\n";
        }
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Stochastic terahertz channel simulation and analysis"};
    app.set_version_flag("--version", THZ_GBSM_VERSION);
    app.require_subcommand(1);
    std::vector<std::string> args(argv + 1, argv + argc);

    SimulateArgs sim;
    auto *c_sim = app.add_subcommand("simulate", "Draw drops: LSPs, clusters and impulse responses");
    add_selection(c_sim, sim.c);
    add_run(c_sim, sim.c);
    c_sim->add_option("--drops", sim.drops, "Number of drops")->check(CLI::Range(1, 100000000))->capture_default_str();
    c_sim->add_option("--mode", sim.mode, "standard | thz")
        ->check(CLI::IsMember({"standard", "thz"}))
        ->capture_default_str();
    c_sim->add_flag("--dump-clusters", sim.dump_clusters, "Write clusters.csv");
    c_sim->add_flag("--dump-cir", sim.dump_cir, "Write cir.csv");
    c_sim->add_option("--bs-array", sim.bs_array, "Base-station array ROWSxCOLS for --dump-cir")
        ->capture_default_str();
    c_sim->add_option("--mu-array", sim.mu_array, "User array ROWSxCOLS for --dump-cir")->capture_default_str();

    AnalyzeArgs an;
    auto *c_an = app.add_subcommand("analyze", "Extract channel statistics from PDP or MPC CSV input");
    c_an->add_option("--input", an.input, "PDP or MPC CSV file")->required();
    c_an->add_option("--out", an.out, "Output directory")->required();
    c_an->add_flag("--pathloss", an.pathloss, "Fit the close-in path-loss model (PDP input with distance_m)");
    c_an->add_option("--freq-ghz", an.freq_ghz, "Carrier frequency for --pathloss")->check(CLI::PositiveNumber);
    c_an->add_option("--noise-floor", an.noise_floor, "Average noise power per bin (linear)")
        ->check(CLI::NonNegativeNumber);
    c_an->add_option("--margin-db", an.margin_db, "Threshold margin above the noise floor")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_an->add_option("--zeta", an.zeta, "MCD delay weight")->check(CLI::PositiveNumber)->capture_default_str();
    c_an->add_option("--k-max", an.k_max, "Largest cluster count tried")
        ->check(CLI::Range(2, 100))
        ->capture_default_str();
    c_an->add_option("--seed", an.seed, "Clustering seed")->capture_default_str();

    RoundTripArgs rt;
    auto *c_rt = app.add_subcommand("roundtrip", "Simulate, sound and re-extract; compare with the drawn LSPs");
    add_selection(c_rt, rt.c);
    add_run(c_rt, rt.c);
    c_rt->add_option("--drops", rt.drops, "Number of drops")->check(CLI::Range(1, 100000000))->capture_default_str();
    c_rt->add_option("--mode", rt.mode, "standard | thz")
        ->check(CLI::IsMember({"standard", "thz"}))
        ->capture_default_str();
    c_rt->add_option("--tolerance-log10", rt.tolerance_log10, "DS/ASA median tolerance, log10 units")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    c_rt->add_option("--tolerance-k-db", rt.tolerance_k_db, "K median tolerance, dB")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    c_rt->add_option("--forced-k", rt.forced_k, "Replace every drawn K-factor (dB)");

    CapacityArgs cap;
    auto *c_cap = app.add_subcommand("capacity", "MIMO capacity versus SNR for measured and 3GPP parameters");
    c_cap->add_option("--params", cap.params, "Parameter file (JSON); needs a single --source");
    c_cap->add_option("--scenario", cap.scenario, "office | umi | both")
        ->check(CLI::IsMember({"office", "umi", "both"}))
        ->capture_default_str();
    c_cap->add_option("--source", cap.source, "measured | 3gpp | both")
        ->check(CLI::IsMember({"measured", "3gpp", "both"}))
        ->capture_default_str();
    c_cap->add_option("--condition", cap.condition, "los | nlos | mixed")
        ->check(CLI::IsMember({"los", "nlos", "mixed"}))
        ->capture_default_str();
    c_cap->add_option("--los-fraction", cap.los_fraction, "LoS share of drops for --condition mixed")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_cap->add_option("--drops", cap.drops, "Drops per curve")->check(CLI::Range(1, 100000000))->capture_default_str();
    c_cap->add_option("--seed", cap.seed, "Master seed")->capture_default_str();
    c_cap->add_option("--threads", cap.threads, "Worker threads (0 = all cores)")->capture_default_str();
    c_cap->add_option("--snr", cap.snr, "SNR grid in dB: START:STOP:STEP, a list A,B,C or one value")
        ->capture_default_str();
    c_cap->add_option("--mode", cap.mode, "standard | thz")
        ->check(CLI::IsMember({"standard", "thz"}))
        ->capture_default_str();
    c_cap->add_option("--normalization", cap.normalization, "experiment | drop")
        ->check(CLI::IsMember({"experiment", "drop"}))
        ->capture_default_str();
    c_cap->add_flag("--no-pathloss", cap.no_pathloss, "Leave path loss and shadowing out of H");
    c_cap->add_option("--bs-array", cap.bs_array, "Base-station array ROWSxCOLS")->capture_default_str();
    c_cap->add_option("--mu-array", cap.mu_array, "User array ROWSxCOLS")->capture_default_str();
    c_cap->add_option("--tones", cap.tones, "Frequency tones")->check(CLI::Range(1, 100000000))->capture_default_str();
    c_cap->add_option("--bandwidth-hz", cap.bandwidth, "Bandwidth")->check(CLI::PositiveNumber)->capture_default_str();
    c_cap->add_option("--out", cap.out, "Output directory")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try
    {
        if (c_sim->parsed())
            return run_simulate(sim, args);
        if (c_an->parsed())
            return run_analyze(an, args);
        if (c_rt->parsed())
            return run_roundtrip_cmd(rt, args);
        if (c_cap->parsed())
            return run_capacity_cmd(cap, args);
    }
    catch (const UsageError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const ParamError &e)
    {
        std::cerr << "error: --params: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const std::exception &e)
    {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
    return exit_internal;
}
