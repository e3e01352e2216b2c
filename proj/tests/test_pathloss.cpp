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

#include "oracles.hpp"

#include "thz_gbsm/pathloss.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace thz;
using Catch::Matchers::WithinAbs;

namespace
{
    PathLossSample sample(double d, double pl)
    {
        PathLossSample s;
        s.distance = d;
        s.loss_db = pl;
        return s;
    }

    std::vector<PathLossSample> synthetic(double f, double n, double sigma, int count, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> lg(0.0, std::log10(15.0));
        std::normal_distribution<double> sh(0.0, sigma);
        std::vector<PathLossSample> out;
        for (int i = 0; i < count; ++i)
        {
            const double d = std::pow(10.0, lg(rng));
            out.push_back(sample(d, oracle::fspl(f, 1.0) + 10.0 * n * std::log10(d) + sh(rng)));
        }
        return out;
    }
}

TEST_CASE("free-space loss", "[pathloss]")
{
    CHECK_THAT(fspl(100.0, 1.0), WithinAbs(72.45, 0.005));
    CHECK_THAT(fspl(132.0, 1.0), WithinAbs(74.86, 0.005));
    CHECK_THAT(fspl(100.0, 10.0) - fspl(100.0, 1.0), WithinAbs(20.0, 1e-12));
    for (double f : {28.0, 100.0, 140.0, 300.0})
        for (double d : {0.5, 1.0, 7.3, 120.0})
            CHECK_THAT(fspl(f, d), WithinAbs(oracle::fspl(f, d), 1e-10));
}

TEST_CASE("close-in model", "[pathloss]")
{
    CHECK_THAT(ci_pl(100.0, 10.0, 1.94), WithinAbs(91.85, 0.005));
    CHECK_THAT(ci_pl(132.0, 44.7, 1.98), WithinAbs(107.54, 0.005));
    CHECK(ci_pl(100.0, 1.0, 3.7) == fspl(100.0, 1.0));
    CHECK_THAT(ci_pl(100.0, 10.0, 2.0, 4.0) - ci_pl(100.0, 10.0, 2.0), WithinAbs(4.0, 1e-12));
    CHECK_THROWS_AS(ci_pl(100.0, 0.99, 2.0), std::invalid_argument);

    double prev = ci_pl(140.0, 1.5, 2.0);
    for (double d = 2.0; d < 200.0; d *= 1.3)
    {
        const double now = ci_pl(140.0, d, 2.0);
        CHECK(now > prev);
        CHECK(ci_pl(140.0, d, 2.1) > now);
        prev = now;
    }
}

TEST_CASE("3GPP UMi NLoS comparison curve", "[pathloss]")
{
    CHECK_THAT(umi_nlos_3gpp_pl(1.0), WithinAbs(67.57, 1e-12));
    CHECK_THAT(umi_nlos_3gpp_pl(100.0), WithinAbs(138.57, 1e-9));
    CHECK_THAT(umi_nlos_3gpp_pl(76.4), WithinAbs(134.42, 0.005));
    CHECK_THROWS_AS(umi_nlos_3gpp_pl(0.5), std::invalid_argument);
}

TEST_CASE("CI fitting", "[pathloss][fit]")
{
    std::vector<PathLossSample> exact;
    for (double d : {1.0, 2.0, 5.0, 9.0, 15.0})
        exact.push_back(sample(d, ci_pl(100.0, d, 2.0)));
    const auto a = fit_ci(exact, 100.0);
    CHECK_THAT(a.n, WithinAbs(2.0, 1e-12));
    CHECK_THAT(a.sigma_db, WithinAbs(0.0, 1e-9));

    // Two points on one anchored line: the fit recovers that slope exactly.
    const std::vector<PathLossSample> two{sample(3.0, fspl(140.0, 1.0) + 12.0), sample(8.0, fspl(140.0, 1.0) + 12.0 * std::log10(8.0) / std::log10(3.0))};
    const auto b = fit_ci(two, 140.0);
    CHECK_THAT(b.n, WithinAbs(1.2 / std::log10(3.0), 1e-12));
    CHECK_THAT(b.sigma_db, WithinAbs(0.0, 1e-9));

    const auto c = fit_ci(synthetic(140.0, 1.94, 2.43, 10000, 31), 140.0);
    CHECK_THAT(c.n, WithinAbs(1.94, 0.02));
    CHECK_THAT(c.sigma_db, WithinAbs(2.43, 0.05));

    const std::vector<PathLossSample> same{sample(4.0, 90.0), sample(4.0, 95.0)};
    CHECK_THROWS_AS(fit_ci(same, 100.0), std::invalid_argument);
}

TEST_CASE("CI fit is unbiased under the synthetic protocol", "[pathloss][fit]")
{
    double bias = 0.0;
    for (std::uint64_t r = 0; r < 100; ++r)
        bias += fit_ci(synthetic(140.0, 1.94, 2.43, 10000, derive_seed(32, r)), 140.0).n - 1.94;
    CHECK(std::abs(bias / 100.0) < 0.01);
}

TEST_CASE("loss from PDPs", "[pathloss][pdp]")
{
    Pdp one;
    one.power = {1e-9};
    CHECK_THAT(pl_db(one), WithinAbs(90.0, 1e-9));
    Pdp two;
    two.power = {1e-9, 0.0, 1e-9};
    const auto s = pl_from_pdp(two, 5.0, Condition::NLoS);
    CHECK_THAT(s.loss_db, WithinAbs(86.99, 0.005));
    CHECK(s.kind == PathLossKind::Omnidirectional);
    CHECK(s.distance == 5.0);

    Pdp zero;
    zero.power = {0.0, 0.0};
    CHECK_THROWS_AS(pl_db(zero), std::domain_error);
}

TEST_CASE("best direction never beats the omnidirectional loss", "[pathloss][pdp]")
{
    std::mt19937_64 rng(33);
    std::exponential_distribution<double> ex(1e9);
    for (int trial = 0; trial < 50; ++trial)
    {
        std::vector<Pdp> dirs;
        for (int k = 0; k < 8; ++k)
        {
            Pdp p;
            p.direction = Direction{0.0, 45.0 * k, 90.0};
            for (int i = 0; i < 16; ++i)
                p.power.push_back(ex(rng));
            dirs.push_back(p);
        }
        const auto best = pl_best_direction(dirs, 7.0, Condition::LoS);
        const auto omni = pl_from_pdp(synth_omni(dirs), 7.0, Condition::LoS);
        CHECK(best.kind == PathLossKind::BestDirection);
        REQUIRE(best.direction.has_value());
        CHECK(best.loss_db >= omni.loss_db);

        double top = 0.0;
        int arg = 0;
        for (int k = 0; k < 8; ++k)
            if (dirs[k].total() > top)
            {
                top = dirs[k].total();
                arg = k;
            }
        CHECK(best.direction->phi_rx == 45.0 * arg);
    }
}
