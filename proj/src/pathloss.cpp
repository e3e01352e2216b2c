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

#include "thz_gbsm/pathloss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace thz
{
    double fspl(double f_ghz, double d_m)
    {
        if (!(f_ghz > 0.0) || !(d_m > 0.0))
            throw std::invalid_argument("fspl: frequency and distance must be positive");
        return 20.0 * std::log10(4.0 * pi * d_m * f_ghz * 1e9 / speed_of_light);
    }

    double ci_pl(double f_ghz, double d_m, double n, double sf_db)
    {
        if (!(d_m >= 1.0))
            throw std::invalid_argument("ci_pl: distance " + std::to_string(d_m) + " m is below the 1 m reference");
        return fspl(f_ghz, 1.0) + 10.0 * n * std::log10(d_m) + sf_db;
    }

    double umi_nlos_3gpp_pl(double d_m)
    {
        if (!(d_m >= 1.0))
            throw std::invalid_argument("umi_nlos_3gpp_pl: distance must be >= 1 m");
        return 67.57 + 35.5 * std::log10(d_m);
    }

    CiFit fit_ci(std::span<const PathLossSample> samples, double f_ghz)
    {
        if (samples.size() < 2)
            throw std::invalid_argument("fit_ci: at least two samples are required");
        const double anchor = fspl(f_ghz, 1.0);
        double sxx = 0.0, sxy = 0.0;
        bool distinct = false;
        for (const auto &s : samples)
        {
            if (!(s.distance > 0.0) || !std::isfinite(s.loss_db))
                throw std::invalid_argument("fit_ci: invalid sample");
            const double x = 10.0 * std::log10(s.distance);
            sxx += x * x;
            sxy += x * (s.loss_db - anchor);
            distinct = distinct || s.distance != samples.front().distance;
        }
        if (!distinct || sxx <= 0.0)
            throw std::invalid_argument("fit_ci: degenerate distances (need at least two distinct values)");

        CiFit fit;
        fit.n = sxy / sxx;
        double ss = 0.0;
        for (const auto &s : samples)
        {
            const double r = s.loss_db - anchor - fit.n * 10.0 * std::log10(s.distance);
            ss += r * r;
        }
        fit.sigma_db = std::sqrt(ss / static_cast<double>(samples.size()));
        return fit;
    }

    double pl_db(const Pdp &pdp)
    {
        const double total = pdp.total();
        if (!(total > 0.0))
            throw std::domain_error("pl_db: all-zero PDP");
        return -10.0 * std::log10(total);
    }

    PathLossSample pl_from_pdp(const Pdp &pdp, double distance, Condition condition)
    {
        return {distance, pl_db(pdp), condition, PathLossKind::Omnidirectional, std::nullopt};
    }

    PathLossSample pl_best_direction(std::span<const Pdp> directional, double distance, Condition condition)
    {
        if (directional.empty())
            throw std::invalid_argument("pl_best_direction: no directional PDPs");
        const Pdp *best = &directional.front();
        for (const auto &d : directional)
            if (d.total() > best->total())
                best = &d;
        return {distance, pl_db(*best), condition, PathLossKind::BestDirection, best->direction};
    }
}
