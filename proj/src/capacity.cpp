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

#include "thz_gbsm/capacity.hpp"

#include "thz_gbsm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thz
{
    namespace
    {
        void check_inputs(const Eigen::MatrixXcd &h, double rho, Eigen::Index mt)
        {
            if (!h.allFinite())
                throw std::invalid_argument("mimo_capacity: channel has non-finite entries");
            if (!(rho >= 0.0))
                throw std::invalid_argument("mimo_capacity: rho must be >= 0");
            if (mt < 1)
                throw std::invalid_argument("mimo_capacity: mt must be >= 1");
        }

        Eigen::VectorXd gram_eigenvalues(const Eigen::MatrixXcd &h)
        {
            const Eigen::MatrixXcd g = h * h.adjoint();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
            return es.eigenvalues().cwiseMax(0.0);
        }

        double capacity_from_eigenvalues(const Eigen::VectorXd &lambda, double scale)
        {
            double c = 0.0;
            for (Eigen::Index i = 0; i < lambda.size(); ++i)
                c += std::log2(1.0 + scale * lambda(i));
            return c;
        }
    }

    double mimo_capacity(const Eigen::MatrixXcd &h, double rho, Eigen::Index mt)
    {
        check_inputs(h, rho, mt);
        return capacity_from_eigenvalues(gram_eigenvalues(h), rho / static_cast<double>(mt));
    }

    double mimo_capacity_det(const Eigen::MatrixXcd &h, double rho, Eigen::Index mt)
    {
        check_inputs(h, rho, mt);
        const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(h.rows(), h.rows()) +
                                   (rho / static_cast<double>(mt)) * h * h.adjoint();
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            log_det += std::log2(std::abs(lu.matrixLU()(i, i)));
        return log_det;
    }

    double normalization_factor(const std::vector<Eigen::MatrixXcd> &set)
    {
        if (set.empty())
            throw std::domain_error("normalize_channel: empty set");
        double mean = 0.0;
        for (const auto &h : set)
            mean += h.squaredNorm();
        mean /= static_cast<double>(set.size());
        if (!(mean > 0.0))
            throw std::domain_error("normalize_channel: all-zero channel");
        return static_cast<double>(set.front().rows() * set.front().cols()) / mean;
    }

    std::vector<Eigen::MatrixXcd> normalize_channel(std::vector<Eigen::MatrixXcd> set)
    {
        const double a = std::sqrt(normalization_factor(set));
        for (auto &h : set)
            h *= a;
        return set;
    }

    std::vector<double> CapacityOptions::snr_grid() const
    {
        if (!snr_db.empty())
            return snr_db;
        std::vector<double> g;
        for (int s = 0; s <= 40; ++s)
            g.push_back(s);
        return g;
    }

    double CapacityCurve::at(double snr) const
    {
        if (snr_db.empty())
            throw std::domain_error("CapacityCurve::at: empty curve");
        if (snr <= snr_db.front())
            return capacity.front();
        for (std::size_t i = 1; i < snr_db.size(); ++i)
            if (snr <= snr_db[i])
            {
                const double w = (snr - snr_db[i - 1]) / (snr_db[i] - snr_db[i - 1]);
                return capacity[i - 1] + w * (capacity[i] - capacity[i - 1]);
            }
        return capacity.back();
    }

    CapacityCurve run_capacity_experiment(const std::vector<ScenarioParamSet> &sets, Scenario scenario,
                                          const CapacityOptions &options)
    {
        if (options.n_drops < 1)
            throw std::invalid_argument("run_capacity_experiment: n_drops must be >= 1");
        if (options.n_tones < 1 || !(options.bandwidth > 0.0))
            throw std::invalid_argument("run_capacity_experiment: invalid frequency grid");

        const bool want_los = options.condition != ConditionMode::NLoS;
        const bool want_nlos = options.condition != ConditionMode::LoS;
        const ScenarioParamSet *los = want_los ? &select(sets, scenario, Condition::LoS) : nullptr;
        const ScenarioParamSet *nlos = want_nlos ? &select(sets, scenario, Condition::NLoS) : nullptr;
        const ScenarioParamSet &any = los ? *los : *nlos;

        DropOptions drop_options;
        drop_options.placement = options.placement.value_or(Placement::defaults(scenario));
        drop_options.clusters = options.clusters;
        drop_options.threads = options.threads;
        const auto los_drops = los ? simulate_drops(*los, options.n_drops, options.seed, drop_options)
                                   : std::vector<Drop>{};
        const auto nlos_drops = nlos ? simulate_drops(*nlos, options.n_drops, options.seed, drop_options)
                                     : std::vector<Drop>{};

        // Condition per drop: pure, or a seeded Bernoulli draw for the mixed mode.
        std::vector<bool> is_los(options.n_drops, want_los);
        if (options.condition == ConditionMode::Mixed)
        {
            Rng rng(derive_seed(options.seed, 3));
            std::bernoulli_distribution b(std::clamp(options.los_fraction, 0.0, 1.0));
            for (std::size_t d = 0; d < options.n_drops; ++d)
                is_los[d] = b(rng);
        }

        std::vector<double> freqs(static_cast<std::size_t>(options.n_tones));
        for (int k = 0; k < options.n_tones; ++k)
            freqs[static_cast<std::size_t>(k)] = -0.5 * options.bandwidth + (k + 0.5) * options.bandwidth / options.n_tones;

        const double spacing = 0.5 * any.wavelength_m();
        LinkArrays link;
        link.tx = AntennaArray::ura(options.bs_rows, options.bs_cols, spacing);
        link.rx = AntennaArray::ura(options.mu_rows, options.mu_cols, spacing);
        link.wavelength = any.wavelength_m();
        const Eigen::Index mt = link.tx.size();
        const Eigen::Index mr = link.rx.size();
        CirOptions cir;
        cir.mode = options.mode;

        // eig[d] is mr x n_tones: Gram eigenvalues per tone, path loss applied.
        std::vector<Eigen::MatrixXd> eig(options.n_drops);
        parallel_for(options.n_drops, options.threads,
                     [&](std::size_t d)
                     {
                         const Drop &drop = is_los[d] ? los_drops[d] : nlos_drops[d];
                         const ScenarioParamSet &params = is_los[d] ? *los : *nlos;
                         const double gain = options.include_path_loss
                                                 ? std::pow(10.0, -drop_path_loss_db(params, drop) / 10.0)
                                                 : 1.0;
                         const auto h = cir_to_ctf(assemble_cir(drop.clusters, link, cir), freqs);
                         Eigen::MatrixXd e(mr, options.n_tones);
                         for (std::size_t k = 0; k < h.size(); ++k)
                             e.col(static_cast<Eigen::Index>(k)) = gain * gram_eigenvalues(h[k]);
                         eig[d] = std::move(e);
                     });

        // Mean squared Frobenius norm equals the eigenvalue sum.
        std::vector<double> scale(options.n_drops);
        if (options.normalization == Normalization::PerExperiment)
        {
            double mean = 0.0;
            for (const auto &e : eig)
                mean += e.sum() / static_cast<double>(options.n_tones);
            mean /= static_cast<double>(options.n_drops);
            if (!(mean > 0.0))
                throw std::domain_error("run_capacity_experiment: all-zero channel");
            std::fill(scale.begin(), scale.end(), static_cast<double>(mt * mr) / mean);
        }
        else
            for (std::size_t d = 0; d < options.n_drops; ++d)
                scale[d] = static_cast<double>(mt * mr) / (eig[d].sum() / static_cast<double>(options.n_tones));

        CapacityCurve curve;
        curve.snr_db = options.snr_grid();
        curve.drops = options.n_drops;
        curve.scenario = scenario;
        curve.source = any.source;
        curve.condition = options.condition;
        curve.capacity.assign(curve.snr_db.size(), 0.0);
        std::vector<double> previous(options.n_drops, 0.0);
        std::vector<std::size_t> order(curve.snr_db.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return curve.snr_db[a] < curve.snr_db[b]; });
        for (std::size_t i : order)
        {
            const double rho = std::pow(10.0, curve.snr_db[i] / 10.0);
            double total = 0.0;
            for (std::size_t d = 0; d < options.n_drops; ++d)
            {
                double c = 0.0;
                for (Eigen::Index k = 0; k < eig[d].cols(); ++k)
                    c += capacity_from_eigenvalues(eig[d].col(k), rho * scale[d] / static_cast<double>(mt));
                c /= static_cast<double>(eig[d].cols());
                if (c < previous[d] - 1e-12 * std::abs(previous[d]))
                    throw std::logic_error("run_capacity_experiment: capacity decreased with SNR");
                previous[d] = c;
                total += c;
            }
            curve.capacity[i] = total / static_cast<double>(options.n_drops);
        }
        return curve;
    }

    std::optional<double> crossover_snr(const CapacityCurve &a, const CapacityCurve &b)
    {
        if (a.snr_db != b.snr_db)
            throw std::invalid_argument("crossover_snr: curves use different SNR grids");
        // Strict sign change of a - b; touching without crossing does not count.
        std::optional<std::size_t> last; // index of the previous nonzero difference
        for (std::size_t i = 0; i < a.snr_db.size(); ++i)
        {
            const double d1 = a.capacity[i] - b.capacity[i];
            if (d1 == 0.0)
                continue;
            if (last)
            {
                const double d0 = a.capacity[*last] - b.capacity[*last];
                if ((d0 < 0.0) != (d1 < 0.0))
                {
                    if (i - *last > 1)
                        return a.snr_db[*last + 1]; // first exact zero between them
                    return a.snr_db[*last] + (a.snr_db[i] - a.snr_db[*last]) * d0 / (d0 - d1);
                }
            }
            last = i;
        }
        return std::nullopt;
    }

    std::string to_string(ConditionMode m)
    {
        switch (m)
        {
        case ConditionMode::LoS:
            return "los";
        case ConditionMode::NLoS:
            return "nlos";
        case ConditionMode::Mixed:
            return "mixed";
        }
        return "nlos";
    }

    ConditionMode parse_condition_mode(std::string_view s)
    {
        if (s == "los")
            return ConditionMode::LoS;
        if (s == "nlos")
            return ConditionMode::NLoS;
        if (s == "mixed")
            return ConditionMode::Mixed;
        throw std::invalid_argument("unknown condition '" + std::string(s) + "' (expected los|nlos|mixed)");
    }
}
