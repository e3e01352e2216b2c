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

#include "thz_gbsm/roundtrip.hpp"
#include "thz_gbsm/pathloss.hpp"
#include "thz_gbsm/simulation.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace thz;
using Catch::Matchers::WithinAbs;

TEST_CASE("users fill the annulus uniformly by area", "[simulation]")
{
    const auto p = Placement::defaults(Scenario::UMi);
    CHECK(p.bs_height == 10.0);
    CHECK(p.r_min == 10.0);
    CHECK(p.r_max == 100.0);
    const auto users = place_users(p, 20000, 61);
    std::size_t inner = 0;
    for (const auto &u : users)
    {
        const double r = u.head<2>().norm();
        CHECK(r >= p.r_min);
        CHECK(r <= p.r_max);
        CHECK(u.z() == p.mu_height);
        inner += r < 55.0 ? 1 : 0;
    }
    // Area share of r in [10, 55] within [10, 100].
    const double expect = (55.0 * 55.0 - 100.0) / (100.0 * 100.0 - 100.0);
    CHECK_THAT(static_cast<double>(inner) / 20000.0, WithinAbs(expect, 0.01));
    CHECK(place_users(p, 5, 61).front() == users.front());
}

TEST_CASE("drops do not depend on the worker count", "[simulation]")
{
    const auto params = bundled_set(Scenario::IndoorOffice, Condition::LoS, Source::Measured);
    DropOptions one;
    DropOptions many;
    many.threads = 4;
    const auto a = simulate_drops(params, 40, 7, one);
    const auto b = simulate_drops(params, 40, 7, many);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].index == i);
        CHECK(a[i].seed == b[i].seed);
        CHECK(a[i].mu == b[i].mu);
        CHECK(a[i].lsp.ds == b[i].lsp.ds);
        REQUIRE(a[i].clusters.size() == b[i].clusters.size());
        for (std::size_t n = 0; n < a[i].clusters.size(); ++n)
            CHECK(a[i].clusters.clusters[n].aoa == b[i].clusters.clusters[n].aoa);
    }
    const auto c = simulate_drops(params, 40, 8, one);
    CHECK(c[0].lsp.ds != a[0].lsp.ds);
}

TEST_CASE("drop geometry and path loss", "[simulation]")
{
    const auto params = bundled_set(Scenario::UMi, Condition::NLoS, Source::Measured);
    DropOptions o;
    o.placement = Placement::defaults(Scenario::UMi);
    const auto drops = simulate_drops(params, 10, 3, o);
    for (const auto &d : drops)
    {
        const double dist = (d.mu - d.bs).norm();
        CHECK_THAT(d.geometry.distance_3d, WithinAbs(dist, 1e-9));
        CHECK_THAT(drop_path_loss_db(params, d), WithinAbs(ci_pl(params.carrier_frequency_ghz, dist, params.ple, d.lsp.sf), 1e-9));
        CHECK_FALSE(d.clusters.direct.has_value());
    }
}

TEST_CASE("invalid parameters are rejected before any draw", "[simulation]")
{
    auto params = bundled_set(Scenario::UMi, Condition::NLoS, Source::Measured);
    params.ple = -1.0;
    CHECK_THROWS_AS(simulate_drops(params, 3, 1), ParamError);
}

TEST_CASE("round trip recovers the drawn parameters", "[roundtrip]")
{
    RoundTripOptions o;
    o.drops = 200;
    o.drop.threads = 0;
    for (auto sc : {Scenario::IndoorOffice, Scenario::UMi})
        for (auto c : {Condition::LoS, Condition::NLoS})
        {
            const auto params = bundled_set(sc, c, Source::Measured);
            o.drop.placement = Placement::defaults(sc);
            const auto r = run_roundtrip(params, o);
            CHECK(r.drops.size() == 200);
            CHECK(r.stats.size() == (c == Condition::LoS ? 3u : 2u));
            for (const auto &s : r.stats)
            {
                INFO(params.name << " " << s.name << " generated " << s.generated << " extracted " << s.extracted);
                // DS and K are calibrated exactly; ASA gets the round-trip tolerance.
                CHECK(std::abs(s.delta()) <= (s.name == "lgASA" ? 0.15 : 0.05));
            }
        }
}

TEST_CASE("forced K is recovered in order", "[roundtrip]")
{
    const auto params = bundled_set(Scenario::UMi, Condition::LoS, Source::Measured);
    RoundTripOptions o;
    o.drops = 100;
    o.drop.placement = Placement::defaults(Scenario::UMi);
    double prev = -1e9;
    for (double k : {0.0, 10.0, 20.0})
    {
        o.drop.clusters.forced_k_db = k;
        const auto r = run_roundtrip(params, o);
        const auto &stat = r.stats.back();
        REQUIRE(stat.name == "K");
        CHECK_THAT(stat.extracted, WithinAbs(k, 0.5));
        CHECK(stat.extracted > prev);
        prev = stat.extracted;
    }
}

TEST_CASE("extraction of a hand-built component list", "[roundtrip]")
{
    const std::vector<Mpc> paths{{0.0, 2.0, 0.0}, {10e-9, 1.0, 90.0}};
    const auto e = extract(paths, {});
    CHECK_THAT(e.ds, WithinAbs(4.714e-9, 1e-12));
    REQUIRE(e.k.db.has_value());
    CHECK_THAT(*e.k.db, WithinAbs(3.0103, 1e-4));
    CHECK(e.asa > 0.0);
}
