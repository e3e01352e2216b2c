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

#include "thz_gbsm/analysis.hpp"
#include "thz_gbsm/clusters.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

using namespace thz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    LinkGeometry office_link()
    {
        return LinkGeometry::between(Eigen::Vector3d(0, 0, 3), Eigen::Vector3d(6, 4, 1.5));
    }

    LspRealization median_lsp(const ScenarioParamSet &p)
    {
        LspRealization r;
        r.ds = std::pow(10.0, p.ds.mu);
        r.asa = std::pow(10.0, p.asa.mu);
        if (p.k)
            r.k = p.k->mu;
        return r;
    }

    std::vector<double> ranks(const std::vector<double> &v)
    {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            r[idx[i]] = static_cast<double>(i);
        return r;
    }
}

TEST_CASE("gen_delays basics", "[clusters][delays]")
{
    Rng rng(1);
    CHECK(gen_delays(1, 10e-9, 3.0, rng) == std::vector<double>{0.0});
    for (int i = 0; i < 100; ++i)
    {
        const auto d = gen_delays(8, 10e-9, 3.0, rng);
        CHECK(d.front() == 0.0);
        CHECK(std::is_sorted(d.begin(), d.end()));
    }
    const auto d = gen_delays(5, 10e-9, 3.0, rng, DelayOrigin::DirectPath);
    CHECK(d.front() > 0.0);
    CHECK(std::is_sorted(d.begin(), d.end()));

    CHECK_THROWS_AS(gen_delays(0, 1e-9, 3.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(gen_delays(2, 0.0, 3.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(gen_delays(2, 1e-9, 0.5, rng), std::invalid_argument);
}

TEST_CASE("gen_delays matches an independent sampler", "[clusters][delays]")
{
    Rng rng(2);
    std::minstd_rand orng(3);
    double lib = 0.0, ref = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
    {
        lib += gen_delays(10, 10e-9, 3.0, rng).back();
        const auto o = oracle::delays(10, 10e-9, 3.0, orng);
        ref += *std::max_element(o.begin(), o.end());
    }
    CHECK_THAT(lib / n, WithinRel(ref / n, 0.01));
}

TEST_CASE("gen_powers examples", "[clusters][powers]")
{
    Rng rng(4);
    const std::vector<double> equal{0.0, 0.0, 0.0};
    for (double p : gen_powers(equal, 10e-9, 3.0, 0.0, std::nullopt, rng).cluster)
        CHECK_THAT(p, WithinAbs(1.0 / 3.0, 1e-15));

    const std::vector<double> two{0.0, 10e-9};
    const auto p2 = gen_powers(two, 10e-9, 2.0, 0.0, std::nullopt, rng);
    CHECK_THAT(p2.cluster[1] / p2.cluster[0], WithinAbs(0.6065, 1e-4));
    CHECK(p2.direct_share == 0.0);

    const auto pk = gen_powers(two, 10e-9, 2.0, 3.0, 1e6, rng);
    CHECK(pk.nlos_share() < 1e-5);
    CHECK_THAT(std::accumulate(pk.cluster.begin(), pk.cluster.end(), 0.0), WithinAbs(1.0, 1e-12));
}

TEST_CASE("in-cluster K redistribution", "[clusters][rays]")
{
    for (double f : apply_in_cluster_k(4, 0.0))
        CHECK_THAT(f, WithinAbs(0.25, 1e-15));
    CHECK(apply_in_cluster_k(1, 7.0) == std::vector<double>{1.0});
    const auto f = apply_in_cluster_k(3, 13.49);
    CHECK_THAT(f[0], WithinAbs(0.9178, 1e-4));
    CHECK_THAT(f[0] + f[1] + f[2], WithinAbs(1.0, 1e-15));
    CHECK(f[1] == f[2]);
}

TEST_CASE("ray offsets are centred", "[clusters][rays]")
{
    const auto &table = canonical_ray_offsets();
    CHECK_THAT(std::accumulate(table.begin(), table.end(), 0.0), WithinAbs(0.0, 1e-12));
    for (int m = 1; m <= 20; ++m)
    {
        const auto o = ray_offsets(m);
        REQUIRE(o.size() == static_cast<std::size_t>(m));
        CHECK_THAT(std::accumulate(o.begin(), o.end(), 0.0), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("scaling constants", "[clusters][angles]")
{
    CHECK_THAT(azimuth_scaling_constant(4), WithinAbs(0.779, 1e-12));
    CHECK_THAT(azimuth_scaling_constant(20), WithinAbs(1.289, 1e-12));
    CHECK(azimuth_scaling_constant(3) < azimuth_scaling_constant(4));
    CHECK(azimuth_scaling_constant(3) > 0.0);
    CHECK_THAT(zenith_scaling_constant(3), WithinAbs(zenith_scaling_constant(8), 1e-15));
    // LoS correction polynomial at K = 0 dB is 1.1035.
    CHECK_THAT(azimuth_scaling_constant(12, 0.0), WithinAbs(1.146 * 1.1035, 1e-12));
}

TEST_CASE("XPR and phases", "[clusters][xpr]")
{
    Rng rng(5);
    const auto x = gen_xpr_and_phases(3, 4, 9.0, 0.0, rng);
    for (const auto &c : x.xpr)
        for (double k : c)
            CHECK_THAT(k, WithinRel(std::pow(10.0, 0.9), 1e-14));

    Rng a(6), b(6);
    const auto xa = gen_xpr_and_phases(5, 5, 9.0, 3.0, a);
    const auto xb = gen_xpr_and_phases(5, 5, 9.0, 3.0, b);
    CHECK(xa.phase == xb.phase);
    CHECK(xa.xpr == xb.xpr);

    const auto big = gen_xpr_and_phases(10000, 10, 9.0, 3.0, rng);
    std::array<std::complex<double>, 4> mean{};
    std::size_t count = 0;
    bool in_range = true;
    for (const auto &c : big.phase)
        for (const auto &r : c)
        {
            for (int k = 0; k < 4; ++k)
            {
                mean[k] += std::polar(1.0, r[k]);
                in_range = in_range && r[k] >= -oracle::pi && r[k] < oracle::pi;
            }
            ++count;
        }
    CHECK(in_range);
    for (const auto &m : mean)
        CHECK(std::abs(m) / static_cast<double>(count) < 0.01);
}

TEST_CASE("link geometry bearings", "[clusters][geometry]")
{
    const auto g = LinkGeometry::between(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(10, 0, 0));
    CHECK_THAT(g.aod, WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(g.aoa), WithinAbs(180.0, 1e-12));
    CHECK_THAT(g.zod, WithinAbs(90.0, 1e-12));
    CHECK_THAT(g.distance_3d, WithinAbs(10.0, 1e-12));
    const auto up = LinkGeometry::between(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, 0, 5));
    CHECK_THAT(up.zod, WithinAbs(0.0, 1e-12));
    CHECK_THAT(up.zoa, WithinAbs(180.0, 1e-12));
    CHECK_THROWS(LinkGeometry::between(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 2, 3)));
}

TEST_CASE("single cluster without in-cluster spread", "[clusters][angles]")
{
    auto p = bundled_set(Scenario::IndoorOffice, Condition::NLoS, Source::Measured);
    p.n_clusters = 1;
    p.c_asa_deg = 0.0;
    Rng rng(7);
    const auto cs = generate_clusters(p, median_lsp(p), office_link(), rng);
    REQUIRE(cs.size() == 1);
    for (const auto &r : cs.clusters[0].rays)
        CHECK(r.aoa == cs.clusters[0].aoa);
}

TEST_CASE("generated sets respect the structural invariants", "[clusters]")
{
    for (auto sc : {Scenario::IndoorOffice, Scenario::UMi})
        for (auto c : {Condition::LoS, Condition::NLoS})
            for (auto src : {Source::Measured, Source::ThreeGpp})
            {
                const auto p = bundled_set(sc, c, src);
                const auto lsps = draw_independent_lsp(p, 200, 8);
                for (std::size_t i = 0; i < lsps.size(); ++i)
                {
                    Rng rng(derive_seed(9, i));
                    const auto cs = generate_clusters(p, lsps[i], office_link(), rng);
                    INFO(p.name << " drop " << i);
                    REQUIRE(cs.total_power() == Catch::Approx(1.0).margin(1e-12));
                    CHECK(cs.direct.has_value() == (c == Condition::LoS));
                    double sum = 0.0;
                    double prev = -1.0;
                    for (const auto &cl : cs.clusters)
                    {
                        sum += cl.power;
                        CHECK(cl.delay >= prev);
                        prev = cl.delay;
                        double fsum = 0.0;
                        for (const auto &r : cl.rays)
                        {
                            fsum += r.power_fraction;
                            CHECK(r.aoa >= -180.0);
                            CHECK(r.aoa < 180.0);
                            CHECK(r.aod >= -180.0);
                            CHECK(r.aod < 180.0);
                            CHECK(r.zoa >= 0.0);
                            CHECK(r.zoa <= 180.0);
                        }
                        CHECK_THAT(fsum, WithinAbs(1.0, 1e-12));
                    }
                    CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
                    if (c == Condition::NLoS)
                        CHECK(cs.clusters.front().delay == 0.0);
                }
            }
}

TEST_CASE("composite delay spread tracks the drawn DS", "[clusters][delays]")
{
    const auto p = bundled_set(Scenario::UMi, Condition::NLoS, Source::Measured);
    const auto lsps = draw_independent_lsp(p, 1000, 10);
    std::vector<double> drawn, got;
    for (std::size_t i = 0; i < lsps.size(); ++i)
    {
        Rng rng(derive_seed(11, i));
        const auto cs = generate_clusters(p, lsps[i], office_link(), rng);
        drawn.push_back(lsps[i].ds);
        got.push_back(composite_delay_spread(cs));
    }
    CHECK(oracle::pearson(ranks(drawn), ranks(got)) > 0.8);
}

TEST_CASE("office NLoS arrival spread matches the drawn law", "[clusters][angles]")
{
    const auto p = bundled_set(Scenario::IndoorOffice, Condition::NLoS, Source::Measured);
    const auto lsps = draw_independent_lsp(p, 1000, 12);
    double acc = 0.0;
    for (std::size_t i = 0; i < lsps.size(); ++i)
    {
        Rng rng(derive_seed(13, i));
        const auto cs = generate_clusters(p, lsps[i], office_link(), rng);
        std::vector<double> az, pw;
        for (const auto &cl : cs.clusters)
            for (const auto &r : cl.rays)
            {
                az.push_back(r.aoa);
                pw.push_back(cl.power * r.power_fraction);
            }
        acc += std::log10(asa(az, pw));
    }
    CHECK_THAT(acc / 1000.0, WithinAbs(p.asa.mu, 0.15));
}

TEST_CASE("forced K overrides the drawn K-factor", "[clusters]")
{
    const auto p = bundled_set(Scenario::UMi, Condition::LoS, Source::Measured);
    ClusterGenOptions o;
    o.forced_k_db = 10.0;
    Rng rng(14);
    const auto cs = generate_clusters(p, median_lsp(p), office_link(), rng, o);
    CHECK_THAT(cs.direct_share(), WithinAbs(10.0 / 11.0, 1e-12));

    auto no_k = median_lsp(p);
    no_k.k.reset();
    CHECK_THROWS_AS(generate_clusters(p, no_k, office_link(), rng), ParamError);
}

TEST_CASE("cluster generation is deterministic per seed", "[clusters]")
{
    const auto p = bundled_set(Scenario::IndoorOffice, Condition::LoS, Source::Measured);
    Rng a(15), b(15);
    const auto x = generate_clusters(p, median_lsp(p), office_link(), a);
    const auto y = generate_clusters(p, median_lsp(p), office_link(), b);
    REQUIRE(x.size() == y.size());
    for (std::size_t n = 0; n < x.size(); ++n)
    {
        CHECK(x.clusters[n].delay == y.clusters[n].delay);
        CHECK(x.clusters[n].power == y.clusters[n].power);
        CHECK(x.clusters[n].aoa == y.clusters[n].aoa);
    }
}
