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

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>

namespace thz
{
    using cplx = std::complex<double>;

    inline constexpr double speed_of_light = 299792458.0; // m/s
    inline constexpr double pi = std::numbers::pi;
    inline constexpr double deg2rad = pi / 180.0;
    inline constexpr double rad2deg = 180.0 / pi;

    enum class Scenario
    {
        IndoorOffice,
        UMi
    };

    enum class Condition
    {
        LoS,
        NLoS
    };

    enum class Source
    {
        Measured,
        ThreeGpp
    };

    std::string_view to_string(Scenario s);
    std::string_view to_string(Condition c);
    std::string_view to_string(Source s);

    // Accepts the CLI/config spellings: office|umi, los|nlos, measured|3gpp.
    // Throws std::invalid_argument naming the offending value.
    Scenario parse_scenario(std::string_view s);
    Condition parse_condition(std::string_view s);
    Source parse_source(std::string_view s);

    // Random engine used everywhere. One engine per drop; never shared between threads.
    using Rng = std::mt19937_64;

    /// SplitMix64 finalizer. Used to derive independent stream seeds.
    constexpr std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    /// Seed splitting rule: child seed k of a master seed is
    /// splitmix64(splitmix64(master) ^ (k + 1) * golden).
    /// Drop d of an experiment uses derive_seed(master, d); sub-streams inside a drop
    /// use derive_seed(drop_seed, stream_id).
    constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k)
    {
        return splitmix64(splitmix64(master) ^ ((k + 1) * 0x9E3779B97F4A7C15ull));
    }

    /// Wrap an azimuth in degrees to [-180, 180).
    double wrap_azimuth_deg(double deg);

    /// Fold a zenith angle in degrees into [0, 180].
    double fold_zenith_deg(double deg);

    /// (sin z cos a, sin z sin a, cos z) for zenith z and azimuth a in degrees.
    Eigen::Vector3d spherical_unit(double zenith_deg, double azimuth_deg);

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

    /// One resolvable multipath component. Delay in s, power linear, angles in degrees.
    struct Mpc
    {
        double delay = 0.0;
        double power = 0.0;
        double aoa = 0.0;
        double zoa = 90.0;
        double aod = 0.0;
        double zod = 90.0;
    };
}
