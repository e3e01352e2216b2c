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

#include "thz_gbsm/analysis.hpp"
#include "thz_gbsm/common.hpp"

#include <optional>
#include <span>

namespace thz
{
    enum class PathLossKind
    {
        Omnidirectional,
        BestDirection
    };

    struct PathLossSample
    {
        double distance = 1.0; // m
        double loss_db = 0.0;
        Condition condition = Condition::LoS;
        PathLossKind kind = PathLossKind::Omnidirectional;
        std::optional<Direction> direction; // best-direction samples only
    };

    /// Free-space loss 20 log10(4 pi d f / c); f in GHz, d in m.
    double fspl(double f_ghz, double d_m);

    /// Close-in model with a 1 m reference: fspl(f, 1) + 10 n log10(d) + sf.
    /// Throws std::invalid_argument for d < 1 m.
    double ci_pl(double f_ghz, double d_m, double n, double sf_db = 0.0);

    /// 67.57 + 35.5 log10(d). Throws std::invalid_argument for d < 1 m.
    double umi_nlos_3gpp_pl(double d_m);

    struct CiFit
    {
        double n = 0.0;
        double sigma_db = 0.0; // population standard deviation of the residuals
    };

    /// Least-squares exponent with the intercept fixed at fspl(f, 1). Throws std::invalid_argument
    /// when fewer than two distinct distances are present.
    CiFit fit_ci(std::span<const PathLossSample> samples, double f_ghz);

    /// -10 log10 of the total received power of a calibrated PDP. Throws std::domain_error for an
    /// all-zero PDP.
    double pl_db(const Pdp &pdp);

    PathLossSample pl_from_pdp(const Pdp &pdp, double distance, Condition condition);

    /// Direction with the largest summed power; that PDP's loss.
    PathLossSample pl_best_direction(std::span<const Pdp> directional, double distance, Condition condition);
}
