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

#include "fixtures.hpp"
#include "oracles.hpp"

#include "thz_gbsm/analysis.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace thz;
using Catch::Matchers::WithinAbs;

namespace
{
    Pdp pdp_of(std::vector<double> power, double spacing = 1e-9)
    {
        Pdp p;
        p.spacing = spacing;
        p.power = std::move(power);
        return p;
    }
}

TEST_CASE("omni synthesis", "[analysis][pdp]")
{
    const std::vector<Pdp> ab{pdp_of({4, 1}), pdp_of({2, 3})};
    CHECK(synth_omni(ab).power == std::vector<double>{4, 3});
    const std::vector<Pdp> one{pdp_of({1, 2, 0})};
    CHECK(synth_omni(one).power == one[0].power);
    const std::vector<Pdp> disjoint{pdp_of({5, 0, 0}), pdp_of({0, 0, 7})};
    CHECK(synth_omni(disjoint).power == std::vector<double>{5, 0, 7});

    const std::vector<Pdp> ba{ab[1], ab[0]};
    CHECK(synth_omni(ba).power == synth_omni(ab).power);
    const std::vector<Pdp> twice{synth_omni(ab), synth_omni(ab)};
    CHECK(synth_omni(twice).power == synth_omni(ab).power);

    const std::vector<Pdp> bad{pdp_of({1, 2}), pdp_of({1, 2, 3})};
    CHECK_THROWS_AS(synth_omni(bad), std::invalid_argument);
    const std::vector<Pdp> bad_spacing{pdp_of({1, 2}), pdp_of({1, 2}, 2e-9)};
    CHECK_THROWS_AS(synth_omni(bad_spacing), std::invalid_argument);
}

TEST_CASE("noise thresholding", "[analysis][pdp]")
{
    const auto p = pdp_of({1e-3, 5e-9, 2e-5, 1e-9});
    const auto all = threshold(p, 200.0, 1e-9);
    CHECK(all.below_noise);
    CHECK(all.total() == 0.0);

    const auto same = threshold(p, 1e-9, 0.0);
    CHECK(same.power == p.power);
    CHECK_FALSE(same.below_noise);

    // Noise at 1e-9 with a 10 dB margin keeps exactly the two injected taps above 1e-8.
    const auto kept = threshold(p, 10.0, 1e-9);
    CHECK(kept.power == std::vector<double>{1e-3, 0.0, 2e-5, 0.0});
}

TEST_CASE("RMS delay spread", "[analysis][ds]")
{
    CHECK_THAT(rms_ds(pdp_of({1, 0, 0, 0, 1}, 2e-9)), WithinAbs(4e-9, 1e-20));
    CHECK(rms_ds(pdp_of({0, 3, 0})) == 0.0);
    const std::vector<double> d{0.0, 10e-9}, w{1.0, 0.5};
    CHECK_THAT(rms_ds(d, w), WithinAbs(4.714e-9, 1e-12));
    CHECK_THAT(rms_ds(d, w), WithinAbs(oracle::weighted_std(d, w), 1e-20));
    const std::vector<double> w2{3.0, 1.5};
    CHECK(rms_ds(d, w2) == Catch::Approx(rms_ds(d, w)).epsilon(1e-15));
    CHECK_THROWS_AS(rms_ds(pdp_of({0, 0})), std::domain_error);
}

TEST_CASE("angular spread", "[analysis][asa]")
{
    const std::vector<double> one_az{33.0}, one_p{2.0};
    CHECK(asa(one_az, one_p) == 0.0);
    CHECK(asa(std::vector<double>{-171.3, -171.3}, std::vector<double>{0.7, 2.9}) == 0.0);
    const std::vector<double> two_az{0.0, 90.0}, two_p{1.0, 1.0};
    CHECK_THAT(asa(two_az, two_p), WithinAbs(40.51, 0.005));
    std::vector<double> ring, flat;
    for (int i = 0; i < 360; ++i)
    {
        ring.push_back(i);
        flat.push_back(1.0);
    }
    CHECK_THAT(asa(ring, flat), WithinAbs(57.2958, 1e-3));

    const std::vector<double> scaled{5.0, 5.0};
    CHECK(asa(two_az, scaled) == Catch::Approx(asa(two_az, two_p)).epsilon(1e-14));
    const std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS_AS(asa(two_az, zero), std::domain_error);

    // The circular estimator agrees for small spreads.
    Dap dap{{-2.0, 0.0, 2.0}, {1.0, 2.0, 1.0}};
    CHECK_THAT(asa_circular(dap), WithinAbs(asa(dap), 0.01));
}

TEST_CASE("K-factor", "[analysis][k]")
{
    const std::vector<double> eq{1.0, 1.0}, two_one{2.0, 1.0}, three{1.0, 1.0, 1.0}, single{0.0, 4.0, 0.0};
    CHECK_THAT(*k_factor(eq).db, WithinAbs(0.0, 1e-12));
    CHECK_THAT(*k_factor(two_one).db, WithinAbs(3.0103, 1e-4));
    CHECK_THAT(*k_factor(three).db, WithinAbs(-3.0103, 1e-4));
    CHECK(k_factor(single).infinite());
    CHECK(k_factor(pdp_of({0, 4, 0})).infinite());
}

TEST_CASE("virtual sounder", "[analysis][sounder]")
{
    const std::vector<Mpc> mpcs{{1e-9, 1.0, 10.2}, {1.02e-9, 0.5, 10.4}, {20e-9, 0.25, -90.0}};
    const auto s = virtual_sounder(mpcs);
    CHECK_THAT(s.omni.total(), WithinAbs(1.75, 1e-12));
    CHECK(s.dap.azimuth.size() == 2);
    CHECK_THAT(s.dap.power[0] + s.dap.power[1], WithinAbs(1.75, 1e-12));
    const std::vector<Mpc> none;
    CHECK_THROWS_AS(virtual_sounder(none), std::invalid_argument);
}

TEST_CASE("K-power-means basics", "[analysis][kpm]")
{
    const auto f = fixture::planted_clusters(1);
    const auto one = kpower_means(f.mpcs, 1);
    for (int l : one.labels)
        CHECK(l == 0);
    CHECK_THROWS_AS(kpower_means(f.mpcs, 0), std::invalid_argument);
    CHECK_THROWS_AS(kpower_means(f.mpcs, static_cast<int>(f.mpcs.size()) + 1), std::invalid_argument);

    auto dup = f.mpcs;
    dup.push_back(dup[3]);
    for (std::uint64_t s = 1; s <= 10; ++s)
    {
        KpmOptions o;
        o.seed = s;
        const auto r = kpower_means(dup, 4, o);
        CHECK(r.labels.back() == r.labels[3]);
    }
}

TEST_CASE("K-power-means recovers planted clusters", "[analysis][kpm]")
{
    int recovered = 0;
    for (std::uint64_t s = 1; s <= 100; ++s)
    {
        const auto f = fixture::planted_clusters(s);
        KpmOptions o;
        o.seed = s;
        const auto r = kpower_means(f.mpcs, 3, o);
        recovered += fixture::same_partition(r.labels, f.labels) ? 1 : 0;
        for (std::size_t i = 1; i < r.trace.size(); ++i)
            REQUIRE(r.trace[i] <= r.trace[i - 1] + 1e-12 * std::abs(r.trace[i - 1]));
    }
    CHECK(recovered == 100);
}

TEST_CASE("automatic cluster count", "[analysis][kpm]")
{
    const auto f = fixture::planted_clusters(7);
    const auto r = kpower_means_auto(f.mpcs);
    CHECK(fixture::same_partition(r.labels, f.labels));
}

TEST_CASE("MCD", "[analysis][kpm]")
{
    const std::vector<Mpc> m{{0.0, 1.0, 0.0, 90.0}, {10e-9, 1.0, 180.0, 90.0}};
    const auto scale = McdScale::of(m);
    // Opposite directions: |r_i - r_j| / 2 = 1; delay term zeta * (dt/dtmax) * (std/dtmax) = 8 * 0.5.
    CHECK_THAT(mcd(m[0], m[1], scale), WithinAbs(std::sqrt(1.0 + 16.0), 1e-12));
    CHECK(mcd(m[0], m[0], scale) == 0.0);
}

TEST_CASE("in-cluster statistics", "[analysis][stats]")
{
    MpcSet singles{{{0.0, 1.0, 0.0}, {5e-9, 1.0, 90.0}}, {0, 1}};
    const auto a = cluster_stats(singles);
    CHECK(a.count == 2);
    CHECK(a.c_ds[0] == 0.0);
    CHECK(a.c_k[0].infinite());
    CHECK_FALSE(a.median_c_k_db.has_value());

    MpcSet pair{{{0.0, 1.0, 10.0}, {1e-9, 1.0, 10.0}}, {0, 0}};
    CHECK_THAT(cluster_stats(pair).c_ds[0], WithinAbs(0.5e-9, 1e-20));

    MpcSet kset{{{0.0, 10.0, 0.0}, {1e-9, 1.0, 1.0}, {2e-9, 1.0, -1.0}}, {0, 0, 0}};
    CHECK_THAT(*cluster_stats(kset).c_k[0].db, WithinAbs(6.9897, 1e-4));

    MpcSet gap{{{0.0, 1.0, 0.0}, {1e-9, 1.0, 0.0}}, {0, 2}};
    CHECK_THROWS_AS(cluster_stats(gap), std::invalid_argument);
    MpcSet unlabeled{{{0.0, 1.0, 0.0}}, {}};
    CHECK_THROWS_AS(cluster_stats(unlabeled), std::invalid_argument);
}

TEST_CASE("distribution fits", "[analysis][fit]")
{
    const std::vector<double> c{3.0, 3.0, 3.0};
    CHECK(fit_normal(c).sigma == 0.0);
    CHECK(fit_lognormal(c).sigma == 0.0);
    const std::vector<double> two{1e-9, 1e-7};
    CHECK_THAT(fit_lognormal(two).mu, WithinAbs(-8.0, 1e-12));
    CHECK_THAT(fit_lognormal(two).sigma, WithinAbs(1.0, 1e-12));

    std::mt19937_64 rng(41);
    std::normal_distribution<double> g(-8.82, 0.15);
    std::vector<double> x;
    for (int i = 0; i < 10000; ++i)
        x.push_back(std::pow(10.0, g(rng)));
    const auto fit = fit_lognormal(x);
    CHECK_THAT(fit.mu, WithinAbs(-8.82, 0.01));
    CHECK_THAT(fit.sigma, WithinAbs(0.15, 0.01));

    const std::vector<double> neg{1.0, -1.0};
    CHECK_THROWS_AS(fit_lognormal(neg), std::invalid_argument);
    const std::vector<double> lone{1.0};
    CHECK_THROWS_AS(fit_normal(lone), std::invalid_argument);
}

TEST_CASE("cross-correlation", "[analysis][fit]")
{
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd cols(10000, 3);
    for (Eigen::Index i = 0; i < cols.rows(); ++i)
    {
        cols(i, 0) = g(rng);
        cols(i, 1) = g(rng);
        cols(i, 2) = cols(i, 0);
    }
    const auto r = cross_corr(cols);
    CHECK_THAT(r(0, 2), WithinAbs(1.0, 1e-12));
    CHECK(std::abs(r(0, 1)) < 0.05);
    CHECK(r(1, 1) == 1.0);

    Eigen::MatrixXd flat = cols;
    flat.col(1).setConstant(2.0);
    CHECK_THROWS_AS(cross_corr(flat), std::invalid_argument);
    CHECK_THROWS_AS(cross_corr(Eigen::MatrixXd::Random(2, 2)), std::invalid_argument);
}

TEST_CASE("correlation distance", "[analysis][fit]")
{
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s)
        acc += correlation_distance(fixture::exponential_track(5.0, 0.5, 4000, s), 0.5);
    CHECK_THAT(acc / 10.0, WithinAbs(5.0, 0.5));

    std::mt19937_64 rng(43);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> white(2000);
    for (auto &v : white)
        v = g(rng);
    CHECK(correlation_distance(white, 0.5) <= 0.5);

    const std::vector<double> constant(100, 1.0);
    CHECK_THROWS_AS(correlation_distance(constant, 1.0), std::invalid_argument);
    const std::vector<double> shorty(10, 0.0);
    CHECK_THROWS_AS(correlation_distance(shorty, 1.0), std::invalid_argument);
}

TEST_CASE("two-sample KS and median", "[analysis][fit]")
{
    const std::vector<double> a{1, 2, 3, 4}, b{1, 2, 3, 4}, c{10, 11, 12, 13};
    CHECK(ks_statistic(a, b) == 0.0);
    CHECK(ks_statistic(a, c) == 1.0);
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}
