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

#include "thz_gbsm/common.hpp"

#include <stdexcept>

namespace thz
{
    std::string_view to_string(Scenario s)
    {
        return s == Scenario::IndoorOffice ? "office" : "umi";
    }

    std::string_view to_string(Condition c)
    {
        return c == Condition::LoS ? "los" : "nlos";
    }

    std::string_view to_string(Source s)
    {
        return s == Source::Measured ? "measured" : "3gpp";
    }

    Scenario parse_scenario(std::string_view s)
    {
        if (s == "office")
            return Scenario::IndoorOffice;
        if (s == "umi")
            return Scenario::UMi;
        throw std::invalid_argument("unknown scenario '" + std::string(s) + "' (expected office|umi)");
    }

    Condition parse_condition(std::string_view s)
    {
        if (s == "los")
            return Condition::LoS;
        if (s == "nlos")
            return Condition::NLoS;
        throw std::invalid_argument("unknown condition '" + std::string(s) + "' (expected los|nlos)");
    }

    Source parse_source(std::string_view s)
    {
        if (s == "measured")
            return Source::Measured;
        if (s == "3gpp")
            return Source::ThreeGpp;
        throw std::invalid_argument("unknown source '" + std::string(s) + "' (expected measured|3gpp)");
    }

    double wrap_azimuth_deg(double deg)
    {
        double w = std::fmod(deg + 180.0, 360.0);
        if (w < 0.0)
            w += 360.0;
        w -= 180.0;
        // fmod rounding can land exactly on +180
        return w >= 180.0 ? w - 360.0 : w;
    }

    double fold_zenith_deg(double deg)
    {
        double w = std::fmod(deg, 360.0);
        if (w < 0.0)
            w += 360.0;
        return w > 180.0 ? 360.0 - w : w;
    }

    Eigen::Vector3d spherical_unit(double zenith_deg, double azimuth_deg)
    {
        const double z = zenith_deg * deg2rad;
        const double a = azimuth_deg * deg2rad;
        return {std::sin(z) * std::cos(a), std::sin(z) * std::sin(a), std::cos(z)};
    }
}
