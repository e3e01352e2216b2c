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

// Shared synthetic fixtures for the unit and acceptance tests.

#include "thz_gbsm/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fixture
{
    struct Planted
    {
        std::vector<thz::Mpc> mpcs;
        std::vector<int> labels;
    };

    // Three MPC groups 120 deg and 40 ns apart, each with a 1 deg / 0.4 ns internal spread, so the
    // between-group MCD is far more than ten times the within-group spread.
    inline Planted planted_clusters(std::uint64_t seed, int per_cluster = 12)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> jitter(0.0, 1.0);
        std::uniform_real_distribution<double> power(0.2, 1.0);
        std::uniform_real_distribution<double> rot(-180.0, 180.0);
        const double base = rot(rng);
        Planted p;
        for (int c = 0; c < 3; ++c)
            for (int i = 0; i < per_cluster; ++i)
            {
                thz::Mpc m;
                m.aoa = thz::wrap_azimuth_deg(base + 120.0 * c + jitter(rng));
                m.zoa = 90.0 + jitter(rng);
                m.delay = (10.0 + 40.0 * c + 0.4 * jitter(rng)) * 1e-9;
                m.power = power(rng);
                p.mpcs.push_back(m);
                p.labels.push_back(c);
            }
        // Interleave so labels are not trivially ordered by index.
        std::vector<std::size_t> order(p.mpcs.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        Planted out;
        for (auto i : order)
        {
            out.mpcs.push_back(p.mpcs[i]);
            out.labels.push_back(p.labels[i]);
        }
        return out;
    }

    // True when two labelings describe the same partition.
    inline bool same_partition(const std::vector<int> &a, const std::vector<int> &b)
    {
        if (a.size() != b.size())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = i + 1; j < a.size(); ++j)
                if ((a[i] == a[j]) != (b[i] == b[j]))
                    return false;
        return true;
    }

    // Exponentially correlated unit-variance track with the given correlation distance.
    inline std::vector<double> exponential_track(double corr_dist, double spacing, std::size_t n, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> w(0.0, 1.0);
        const double rho = std::exp(-spacing / corr_dist);
        std::vector<double> x(n);
        x[0] = w(rng);
        for (std::size_t i = 1; i < n; ++i)
            x[i] = rho * x[i - 1] + std::sqrt(1.0 - rho * rho) * w(rng);
        return x;
    }
}
