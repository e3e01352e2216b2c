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
#include "thz_gbsm/coefficients.hpp"
#include "thz_gbsm/simulation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace thz
{
    struct RoundTripOptions
    {
        std::size_t drops = 500;
        std::uint64_t seed = 1;
        CirMode mode = CirMode::ThzSimplified;
        SounderOptions sounder;
        DropOptions drop;
        double tolerance_log10 = 0.15; // DS and ASA medians, log10 units
        double tolerance_k_db = 3.0;   // K median, dB
    };

    /// Estimates from one simulated drop next to the LSPs it was drawn with.
    struct DropExtraction
    {
        std::size_t drop = 0;
        LspRealization drawn;
        double ds = 0.0;  // s
        double asa = 0.0; // deg
        KFactor k;
    };

    struct RoundTripStat
    {
        std::string name; // lgDS, lgASA, K
        double generated = 0.0;
        double extracted = 0.0;
        double tolerance = 0.0;

        double delta() const { return extracted - generated; }
        bool pass() const { return std::abs(delta()) <= tolerance; }
    };

    struct RoundTripReport
    {
        std::vector<DropExtraction> drops;
        std::vector<RoundTripStat> stats;

        bool pass() const;
    };

    /// Simulate drops, assemble the impulse response, sound it with the virtual sounder and
    /// estimate DS, ASA and (LoS) K. Compares medians of the estimates with medians of the drawn
    /// LSPs.
    RoundTripReport run_roundtrip(const ScenarioParamSet &params, const RoundTripOptions &options = {});

    /// Estimates for a single realization's component list.
    DropExtraction extract(const std::vector<Mpc> &paths, const SounderOptions &sounder);
}
