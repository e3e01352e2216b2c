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

#pragma once

#include "thz_gbsm/clusters.hpp"
#include "thz_gbsm/coefficients.hpp"
#include "thz_gbsm/lsp.hpp"
#include "thz_gbsm/scenario_params.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace thz
{
    /// Link layout: base station at the origin, users uniform over an annulus.
    struct Placement
    {
        double bs_height = 3.0; // m
        double mu_height = 1.5; // m
        double r_min = 1.0;     // m, horizontal
        double r_max = 15.0;    // m, horizontal

        static Placement defaults(Scenario s);
    };

    struct DropOptions
    {
        Placement placement = Placement::defaults(Scenario::IndoorOffice);
        ClusterGenOptions clusters;
        LspOptions lsp;
        /// Spatially consistent LSPs from shared fields; otherwise independent draws per drop.
        bool spatially_consistent = true;
        unsigned threads = 1;
    };

    struct Drop
    {
        std::size_t index = 0;
        std::uint64_t seed = 0;
        Eigen::Vector3d bs = Eigen::Vector3d::Zero();
        Eigen::Vector3d mu = Eigen::Vector3d::Zero();
        LinkGeometry geometry;
        LspRealization lsp;
        ClusterSet clusters;
    };

    /// Seed streams of an experiment with master seed m:
    /// placement derive_seed(m, 0), LSP fields derive_seed(m, 1),
    /// small-scale draw of drop d derive_seed(derive_seed(m, 2), d).
    std::vector<Eigen::Vector3d> place_users(const Placement &p, std::size_t n, std::uint64_t master_seed);

    /// Placement, LSPs and cluster draws for `n` drops. Output order and content do not depend on
    /// `options.threads`.
    std::vector<Drop> simulate_drops(const ScenarioParamSet &params, std::size_t n, std::uint64_t master_seed,
                                     const DropOptions &options = {});

    /// Close-in path loss plus the drop's shadow fading, dB.
    double drop_path_loss_db(const ScenarioParamSet &params, const Drop &drop);
}
