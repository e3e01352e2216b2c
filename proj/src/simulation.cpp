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

#include "thz_gbsm/simulation.hpp"

#include "thz_gbsm/parallel.hpp"
#include "thz_gbsm/pathloss.hpp"

#include <cmath>
#include <stdexcept>

namespace thz
{
    Placement Placement::defaults(Scenario s)
    {
        if (s == Scenario::UMi)
            return {10.0, 1.5, 10.0, 100.0};
        return {3.0, 1.5, 1.0, 15.0};
    }

    std::vector<Eigen::Vector3d> place_users(const Placement &p, std::size_t n, std::uint64_t master_seed)
    {
        if (!(p.r_min > 0.0) || !(p.r_max >= p.r_min))
            throw std::invalid_argument("place_users: need 0 < r_min <= r_max");
        Rng rng(derive_seed(master_seed, 0));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<Eigen::Vector3d> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            const double r = std::sqrt(p.r_min * p.r_min + u(rng) * (p.r_max * p.r_max - p.r_min * p.r_min));
            const double a = 2.0 * pi * u(rng);
            out.emplace_back(r * std::cos(a), r * std::sin(a), p.mu_height);
        }
        return out;
    }

    std::vector<Drop> simulate_drops(const ScenarioParamSet &params, std::size_t n, std::uint64_t master_seed,
                                     const DropOptions &options)
    {
        validate(params);
        const auto users = place_users(options.placement, n, master_seed);

        std::vector<LspRealization> lsp;
        if (options.spatially_consistent)
        {
            std::vector<Eigen::Vector2d> xy;
            xy.reserve(n);
            for (const auto &u : users)
                xy.emplace_back(u.head<2>());
            lsp = generate_lsp(params, xy, derive_seed(master_seed, 1), options.lsp);
        }
        else
        {
            lsp = draw_independent_lsp(params, n, derive_seed(master_seed, 1), options.lsp);
            for (std::size_t i = 0; i < n; ++i)
                lsp[i].location = users[i].head<2>();
        }

        const std::uint64_t drop_master = derive_seed(master_seed, 2);
        const Eigen::Vector3d bs(0.0, 0.0, options.placement.bs_height);
        std::vector<Drop> drops(n);
        parallel_for(n, options.threads,
                     [&](std::size_t i)
                     {
                         Drop &d = drops[i];
                         d.index = i;
                         d.seed = derive_seed(drop_master, i);
                         d.bs = bs;
                         d.mu = users[i];
                         d.geometry = LinkGeometry::between(bs, users[i]);
                         d.lsp = lsp[i];
                         Rng rng(d.seed);
                         d.clusters = generate_clusters(params, d.lsp, d.geometry, rng, options.clusters);
                     });
        return drops;
    }

    double drop_path_loss_db(const ScenarioParamSet &params, const Drop &drop)
    {
        return ci_pl(params.carrier_frequency_ghz, std::max(1.0, drop.geometry.distance_3d), params.ple, drop.lsp.sf);
    }
}
