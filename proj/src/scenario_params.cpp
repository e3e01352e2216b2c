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

#include "thz_gbsm/scenario_params.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#ifndef THZ_GBSM_DATA_DIR
#define THZ_GBSM_DATA_DIR "data/params"
#endif

namespace thz
{
    namespace
    {
        using json = nlohmann::json;

        constexpr const char *schema_id = "thz-gbsm-params/1";

        // Strict object reader: tracks which keys were consumed so leftovers can be rejected.
        class Reader
        {
        public:
            Reader(const json &obj, std::string ctx) : obj_(obj), ctx_(std::move(ctx))
            {
                if (!obj_.is_object())
                    throw ParamError(ctx_ + ": expected an object");
            }

            bool has(const std::string &key) const { return obj_.contains(key); }

            const json &get(const std::string &key)
            {
                if (!obj_.contains(key))
                    throw ParamError(ctx_ + ": missing field '" + key + "'");
                seen_.insert(key);
                return obj_.at(key);
            }

            double number(const std::string &key)
            {
                const json &v = get(key);
                if (!v.is_number())
                    throw ParamError(ctx_ + ": field '" + key + "' must be a number");
                return v.get<double>();
            }

            int integer(const std::string &key)
            {
                const json &v = get(key);
                if (!v.is_number_integer())
                    throw ParamError(ctx_ + ": field '" + key + "' must be an integer");
                return v.get<int>();
            }

            std::string string(const std::string &key)
            {
                const json &v = get(key);
                if (!v.is_string())
                    throw ParamError(ctx_ + ": field '" + key + "' must be a string");
                return v.get<std::string>();
            }

            Gaussian gaussian(const std::string &key)
            {
                Reader r(get(key), ctx_ + "." + key);
                Gaussian g{r.number("mu"), r.number("sigma")};
                r.finish();
                return g;
            }

            const std::string &ctx() const { return ctx_; }

            void finish() const
            {
                for (const auto &[key, value] : obj_.items())
                    if (!seen_.contains(key))
                        throw ParamError(ctx_ + ": unknown key '" + key + "'");
            }

        private:
            const json &obj_;
            std::string ctx_;
            std::set<std::string> seen_;
        };

        const std::vector<std::string> lsp_names = {"ds", "asa", "sf", "k"};

        Eigen::MatrixXd read_xcorr(Reader &parent, int n_lsp)
        {
            Reader r(parent.get("xcorr"), parent.ctx() + ".xcorr");
            const json &order = r.get("order");
            const json &rows = r.get("matrix");
            r.finish();

            std::vector<std::string> expected(lsp_names.begin(), lsp_names.begin() + n_lsp);
            if (!order.is_array() || order.get<std::vector<std::string>>() != expected)
            {
                std::string want;
                for (const auto &e : expected)
                    want += (want.empty() ? "" : ",") + e;
                throw ParamError(r.ctx() + ": order must be [" + want + "]");
            }
            if (!rows.is_array() || static_cast<int>(rows.size()) != n_lsp)
                throw ParamError(r.ctx() + ": matrix must have " + std::to_string(n_lsp) + " rows");

            Eigen::MatrixXd m(n_lsp, n_lsp);
            for (int i = 0; i < n_lsp; ++i)
            {
                if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n_lsp)
                    throw ParamError(r.ctx() + ": row " + std::to_string(i) + " must have " + std::to_string(n_lsp) + " entries");
                for (int j = 0; j < n_lsp; ++j)
                {
                    if (!rows[i][j].is_number())
                        throw ParamError(r.ctx() + ": entry (" + std::to_string(i) + "," + std::to_string(j) + ") must be a number");
                    m(i, j) = rows[i][j].get<double>();
                }
            }
            return m;
        }

        ScenarioParamSet read_set(const json &obj, std::size_t index)
        {
            std::string ctx = "sets[" + std::to_string(index) + "]";
            if (obj.is_object() && obj.contains("name") && obj["name"].is_string())
                ctx = obj["name"].get<std::string>();
            Reader r(obj, ctx);

            ScenarioParamSet s;
            s.name = r.string("name");
            try
            {
                s.scenario = parse_scenario(r.string("scenario"));
                s.condition = parse_condition(r.string("condition"));
                s.source = parse_source(r.string("source"));
            }
            catch (const ParamError &)
            {
                throw;
            }
            catch (const std::invalid_argument &e)
            {
                throw ParamError(ctx + ": " + e.what());
            }
            s.carrier_frequency_ghz = r.number("carrier_frequency_ghz");
            s.ple = r.number("ple");
            s.sigma_sf_db = r.number("sigma_sf_db");
            s.ds = r.gaussian("ds_log10_s");
            s.asa = r.gaussian("asa_log10_deg");

            const bool los = s.condition == Condition::LoS;
            if (los)
                s.k = r.gaussian("k_db");
            else if (r.has("k_db"))
                throw ParamError(ctx + ": field 'k_db' is only valid for LoS sets");

            s.xcorr = read_xcorr(r, s.n_lsp());
            s.n_clusters = r.integer("n_clusters");
            s.n_rays = r.integer("n_rays");
            s.c_ds_ns = r.number("c_ds_ns");
            s.c_asa_deg = r.number("c_asa_deg");
            s.c_k_db = r.number("c_k_db");

            {
                Reader cd(r.get("corr_dist_m"), ctx + ".corr_dist_m");
                s.corr_dist.asa = cd.number("asa");
                s.corr_dist.ds = cd.number("ds");
                s.corr_dist.sf = cd.number("sf");
                if (los)
                    s.corr_dist.k = cd.number("k");
                cd.finish();
            }

            if (r.has("cluster_count_lognormal"))
                s.cluster_count_lognormal = r.gaussian("cluster_count_lognormal");

            {
                Reader sp(r.get("supplemental"), ctx + ".supplemental");
                auto &out = s.supplemental;
                out.r_tau = sp.number("r_tau");
                out.zeta_db = sp.number("zeta_db");
                out.xpr_db = sp.gaussian("xpr_db");
                out.asd = sp.gaussian("asd");
                out.zsa = sp.gaussian("zsa");
                out.zsd = sp.gaussian("zsd");
                out.c_zsa_deg = sp.number("c_zsa_deg");
                sp.finish();
            }
            r.finish();

            validate(s);
            return s;
        }

        json gaussian_json(const Gaussian &g) { return json{{"mu", g.mu}, {"sigma", g.sigma}}; }

        json set_json(const ScenarioParamSet &s)
        {
            json o;
            o["name"] = s.name;
            o["scenario"] = std::string(to_string(s.scenario));
            o["condition"] = std::string(to_string(s.condition));
            o["source"] = std::string(to_string(s.source));
            o["carrier_frequency_ghz"] = s.carrier_frequency_ghz;
            o["ple"] = s.ple;
            o["sigma_sf_db"] = s.sigma_sf_db;
            o["ds_log10_s"] = gaussian_json(s.ds);
            o["asa_log10_deg"] = gaussian_json(s.asa);
            if (s.k)
                o["k_db"] = gaussian_json(*s.k);

            json rows = json::array();
            for (Eigen::Index i = 0; i < s.xcorr.rows(); ++i)
            {
                json row = json::array();
                for (Eigen::Index j = 0; j < s.xcorr.cols(); ++j)
                    row.push_back(s.xcorr(i, j));
                rows.push_back(row);
            }
            o["xcorr"] = json{{"order", std::vector<std::string>(lsp_names.begin(), lsp_names.begin() + s.n_lsp())},
                              {"matrix", rows}};
            o["n_clusters"] = s.n_clusters;
            o["n_rays"] = s.n_rays;
            o["c_ds_ns"] = s.c_ds_ns;
            o["c_asa_deg"] = s.c_asa_deg;
            o["c_k_db"] = s.c_k_db;

            json cd{{"asa", s.corr_dist.asa}, {"ds", s.corr_dist.ds}, {"sf", s.corr_dist.sf}};
            if (s.corr_dist.k)
                cd["k"] = *s.corr_dist.k;
            o["corr_dist_m"] = cd;
            if (s.cluster_count_lognormal)
                o["cluster_count_lognormal"] = gaussian_json(*s.cluster_count_lognormal);

            const auto &sp = s.supplemental;
            o["supplemental"] = json{{"r_tau", sp.r_tau},
                                     {"zeta_db", sp.zeta_db},
                                     {"xpr_db", gaussian_json(sp.xpr_db)},
                                     {"asd", gaussian_json(sp.asd)},
                                     {"zsa", gaussian_json(sp.zsa)},
                                     {"zsd", gaussian_json(sp.zsd)},
                                     {"c_zsa_deg", sp.c_zsa_deg}};
            return o;
        }

        void require(bool ok, const ScenarioParamSet &s, const std::string &what)
        {
            if (!ok)
                throw ParamError(s.name + ": " + what);
        }
    }

    double CorrelationDistances::at(LspIndex i) const
    {
        switch (i)
        {
        case lsp_ds:
            return ds;
        case lsp_asa:
            return asa;
        case lsp_sf:
            return sf;
        case lsp_k:
            if (!k)
                throw std::invalid_argument("correlation distance for K is not defined");
            return *k;
        }
        return 0.0;
    }

    double CorrelationDistances::min() const
    {
        double m = std::min({asa, ds, sf});
        return k ? std::min(m, *k) : m;
    }

    bool ScenarioParamSet::operator==(const ScenarioParamSet &o) const
    {
        return name == o.name && scenario == o.scenario && condition == o.condition && source == o.source &&
               carrier_frequency_ghz == o.carrier_frequency_ghz && ple == o.ple && sigma_sf_db == o.sigma_sf_db &&
               ds == o.ds && asa == o.asa && k == o.k && xcorr.rows() == o.xcorr.rows() &&
               xcorr.cols() == o.xcorr.cols() && xcorr == o.xcorr && n_clusters == o.n_clusters &&
               n_rays == o.n_rays && c_ds_ns == o.c_ds_ns && c_asa_deg == o.c_asa_deg && c_k_db == o.c_k_db &&
               corr_dist == o.corr_dist && cluster_count_lognormal == o.cluster_count_lognormal &&
               supplemental == o.supplemental;
    }

    void validate(const ScenarioParamSet &s)
    {
        require(!s.name.empty(), s, "name must not be empty");
        require(s.carrier_frequency_ghz > 0.0, s, "carrier_frequency_ghz must be positive");
        require(std::isfinite(s.ple) && s.ple > 0.0, s, "ple must be positive");
        require(s.sigma_sf_db >= 0.0, s, "sigma_sf_db must be >= 0");
        require(s.ds.sigma >= 0.0, s, "ds_log10_s.sigma must be >= 0");
        require(s.asa.sigma >= 0.0, s, "asa_log10_deg.sigma must be >= 0");
        if (s.condition == Condition::LoS)
        {
            require(s.k.has_value(), s, "LoS set requires k_db");
            require(s.k->sigma >= 0.0, s, "k_db.sigma must be >= 0");
            require(s.corr_dist.k.has_value(), s, "LoS set requires corr_dist_m.k");
        }
        else
            require(!s.k.has_value(), s, "NLoS set must not define k_db");

        const int n = s.n_lsp();
        require(s.xcorr.rows() == n && s.xcorr.cols() == n, s,
                "xcorr must be " + std::to_string(n) + "x" + std::to_string(n));
        for (int i = 0; i < n; ++i)
        {
            require(s.xcorr(i, i) == 1.0, s, "xcorr diagonal must be 1");
            for (int j = 0; j < n; ++j)
            {
                require(std::isfinite(s.xcorr(i, j)) && s.xcorr(i, j) >= -1.0 && s.xcorr(i, j) <= 1.0, s,
                        "correlation out of range at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                require(s.xcorr(i, j) == s.xcorr(j, i), s,
                        "asymmetric matrix: xcorr(" + std::to_string(i) + "," + std::to_string(j) + ") != xcorr(" +
                            std::to_string(j) + "," + std::to_string(i) + ")");
            }
        }

        require(s.n_clusters >= 1, s, "n_clusters must be >= 1");
        require(s.n_rays >= 1, s, "n_rays must be >= 1");
        require(s.c_ds_ns >= 0.0, s, "c_ds_ns must be >= 0");
        require(s.c_asa_deg >= 0.0, s, "c_asa_deg must be >= 0");
        require(std::isfinite(s.c_k_db), s, "c_k_db must be finite");
        require(s.corr_dist.asa > 0.0 && s.corr_dist.ds > 0.0 && s.corr_dist.sf > 0.0 &&
                    (!s.corr_dist.k || *s.corr_dist.k > 0.0),
                s, "correlation distances must be positive");
        if (s.cluster_count_lognormal)
            require(s.cluster_count_lognormal->sigma >= 0.0, s, "cluster_count_lognormal.sigma must be >= 0");

        const auto &sp = s.supplemental;
        require(sp.r_tau >= 1.0, s, "supplemental.r_tau must be >= 1");
        require(sp.zeta_db >= 0.0, s, "supplemental.zeta_db must be >= 0");
        require(sp.xpr_db.sigma >= 0.0 && sp.asd.sigma >= 0.0 && sp.zsa.sigma >= 0.0 && sp.zsd.sigma >= 0.0, s,
                "supplemental sigmas must be >= 0");
        require(sp.c_zsa_deg >= 0.0, s, "supplemental.c_zsa_deg must be >= 0");
    }

    std::vector<ScenarioParamSet> load_params(const std::string &document)
    {
        json doc;
        try
        {
            doc = json::parse(document);
        }
        catch (const json::parse_error &e)
        {
            throw ParamError(std::string("parameter document does not parse: ") + e.what());
        }

        Reader r(doc, "document");
        const std::string schema = r.string("schema");
        if (schema != schema_id)
            throw ParamError("document: unsupported schema '" + schema + "'");
        const json &sets = r.get("sets");
        r.finish();
        if (!sets.is_array() || sets.empty())
            throw ParamError("document: 'sets' must be a non-empty array");

        std::vector<ScenarioParamSet> out;
        std::set<std::string> names;
        for (std::size_t i = 0; i < sets.size(); ++i)
        {
            out.push_back(read_set(sets[i], i));
            if (!names.insert(out.back().name).second)
                throw ParamError("document: duplicate set name '" + out.back().name + "'");
        }
        return out;
    }

    std::vector<ScenarioParamSet> load_params_file(const std::filesystem::path &file)
    {
        std::ifstream in(file);
        if (!in)
            throw ParamError("cannot open parameter file '" + file.string() + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        try
        {
            return load_params(ss.str());
        }
        catch (const ParamError &e)
        {
            throw ParamError(file.filename().string() + ": " + e.what());
        }
    }

    std::string save_params(const std::vector<ScenarioParamSet> &sets)
    {
        json doc;
        doc["schema"] = schema_id;
        doc["sets"] = json::array();
        for (const auto &s : sets)
            doc["sets"].push_back(set_json(s));
        return doc.dump(2) + "\n";
    }

    const ScenarioParamSet &select(const std::vector<ScenarioParamSet> &sets, Scenario scenario, Condition condition)
    {
        auto it = std::find_if(sets.begin(), sets.end(), [&](const ScenarioParamSet &s)
                               { return s.scenario == scenario && s.condition == condition; });
        if (it == sets.end())
            throw ParamError("no parameter set for scenario '" + std::string(to_string(scenario)) + "' condition '" +
                             std::string(to_string(condition)) + "'");
        return *it;
    }

    std::filesystem::path bundled_params_dir()
    {
        if (const char *env = std::getenv("THZ_GBSM_PARAMS_DIR"); env && *env)
            return env;
        return THZ_GBSM_DATA_DIR;
    }

    std::filesystem::path bundled_params_file(Source source)
    {
        return bundled_params_dir() / (source == Source::Measured ? "measured.json" : "3gpp.json");
    }

    ScenarioParamSet bundled_set(Scenario scenario, Condition condition, Source source)
    {
        return select(load_params_file(bundled_params_file(source)), scenario, condition);
    }

    Eigen::MatrixXd projected_xcorr(const ScenarioParamSet &set)
    {
        return nearest_psd(set.xcorr);
    }

    Eigen::MatrixXd semidefinite_cholesky(const Eigen::MatrixXd &c)
    {
        const Eigen::Index n = c.rows();
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
        constexpr double tiny = 1e-12;
        for (Eigen::Index j = 0; j < n; ++j)
        {
            double d = c(j, j) - l.row(j).head(j).squaredNorm();
            if (d <= tiny)
                continue; // dependent direction; column stays zero
            l(j, j) = std::sqrt(d);
            for (Eigen::Index i = j + 1; i < n; ++i)
                l(i, j) = (c(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
        }
        return l;
    }

    int draw_cluster_count(const ScenarioParamSet &set, ClusterCountMode mode, Rng &rng)
    {
        if (mode == ClusterCountMode::Fixed || !set.cluster_count_lognormal)
            return set.n_clusters;
        std::normal_distribution<double> n(set.cluster_count_lognormal->mu, set.cluster_count_lognormal->sigma);
        const double count = std::pow(10.0, n(rng));
        return std::max(1, static_cast<int>(std::lround(count)));
    }
}
