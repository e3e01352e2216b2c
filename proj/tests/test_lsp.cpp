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
#include "thz_gbsm/lsp.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace thz;
using Catch::Matchers::WithinAbs;

namespace
{
    // Correlation of field values at pairs (p, p + (lag, 0)) over a grid of anchor points.
    template <typename Sample>
    double lag_correlation(const Extent &e, double lag, double anchor_step, Sample &&sample)
    {
        std::vector<double> a, b;
        for (double y = e.y0; y <= e.y0 + e.height; y += anchor_step)
            for (double x = e.x0; x + lag <= e.x0 + e.width; x += anchor_step)
            {
                a.push_back(sample(Eigen::Vector2d(x, y)));
                b.push_back(sample(Eigen::Vector2d(x + lag, y)));
            }
        return oracle::pearson(a, b);
    }

    double normal_cdf(double x, double mu, double sigma) { return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0))); }

    double ks_one_sample(std::vector<double> x, double mu, double sigma)
    {
        std::sort(x.begin(), x.end());
        const double n = static_cast<double>(x.size());
        double d = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            const double f = normal_cdf(x[i], mu, sigma);
            d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
        }
        return d;
    }
}

TEST_CASE("field autocorrelation at the correlation distance is 1/e", "[lsp][field]")
{
    const Extent e{0.0, 0.0, 200.0, 200.0};
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        const auto f = generate_field(5.0, e, 1.0, derive_seed(11, s));
        // Node lag of five steps along x.
        std::vector<double> a, b;
        for (Eigen::Index iy = 0; iy < f.ny(); ++iy)
            for (Eigen::Index ix = 0; ix + 5 < f.nx(); ++ix)
            {
                a.push_back(f.node(ix, iy));
                b.push_back(f.node(ix + 5, iy));
            }
        acc += oracle::pearson(a, b);
    }
    CHECK_THAT(acc / 10.0, WithinAbs(std::exp(-1.0), 0.1));
}

TEST_CASE("field marginal is standard normal and seeds reproduce", "[lsp][field]")
{
    const Extent e{-50.0, -50.0, 100.0, 100.0};
    const auto f1 = generate_field(3.0, e, 0.5, 99);
    const auto f2 = generate_field(3.0, e, 0.5, 99);
    CHECK(f1.values() == f2.values());
    const auto f3 = generate_field(3.0, e, 0.5, 100);
    CHECK(f1.values() != f3.values());

    const double mean = f1.values().mean();
    const double var = (f1.values().array() - mean).square().mean();
    CHECK_THAT(mean, WithinAbs(0.0, 0.15));
    CHECK_THAT(var, WithinAbs(1.0, 0.2));
}

TEST_CASE("interpolated samples keep unit variance between nodes", "[lsp][field]")
{
    const Extent e{0.0, 0.0, 400.0, 400.0};
    const auto f = generate_field(4.0, e, 2.0, 5);
    std::vector<double> v;
    for (double y = 1.0; y < 399.0; y += 4.0)
        for (double x = 1.0; x < 399.0; x += 4.0)
            v.push_back(f.sample(Eigen::Vector2d(x, y))); // cell centres
    const auto g = fit_normal(v);
    CHECK_THAT(g.sigma, WithinAbs(1.0, 0.06));
}

TEST_CASE("distant samples decorrelate", "[lsp][field]")
{
    const Extent e{0.0, 0.0, 200.0, 120.0};
    const double dc = 1.0;
    double r = 0.0;
    int fields = 0;
    for (std::uint64_t s = 0; s < 2; ++s, ++fields)
    {
        const auto f = generate_field(dc, e, 0.5, derive_seed(3, s));
        r += lag_correlation(e, 50.0 * dc, 1.45, [&](const Eigen::Vector2d &p) { return f.sample(p); });
    }
    CHECK_THAT(r / fields, WithinAbs(0.0, 0.05));
}

TEST_CASE("field generation rejects bad geometry", "[lsp][field]")
{
    CHECK_THROWS_AS(generate_field(5.0, Extent{0, 0, 0, 10}, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_field(5.0, Extent{0, 0, 10, 10}, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_field(5.0, Extent{0, 0, 10, 10}, 3.0, 1), std::invalid_argument);
    const auto f = generate_field(5.0, Extent{0, 0, 10, 10}, 1.0, 1);
    CHECK_THROWS_AS(f.sample(Eigen::Vector2d(11.0, 1.0)), std::out_of_range);
}

TEST_CASE("degenerate laws give the medians everywhere", "[lsp]")
{
    auto p = bundled_set(Scenario::IndoorOffice, Condition::LoS, Source::Measured);
    p.ds.sigma = p.asa.sigma = p.sigma_sf_db = 0.0;
    p.k->sigma = 0.0;
    const std::vector<Eigen::Vector2d> locs{{0, 0}, {3, 4}, {-2, 7}};
    for (const auto &r : generate_lsp(p, locs, 1))
    {
        CHECK(r.ds == std::pow(10.0, -8.82));
        CHECK(r.asa == std::pow(10.0, 1.37));
        CHECK(r.sf == 0.0);
        CHECK(*r.k == 8.8);
    }
}

TEST_CASE("office LoS marginal of lgDS", "[lsp]")
{
    const auto p = bundled_set(Scenario::IndoorOffice, Condition::LoS, Source::Measured);
    const auto r = draw_independent_lsp(p, 10000, 42);
    std::vector<double> ds;
    for (const auto &x : r)
        ds.push_back(x.ds);
    const auto g = fit_lognormal(ds);
    CHECK_THAT(g.mu, WithinAbs(-8.82, 0.03));
    CHECK_THAT(g.sigma, WithinAbs(0.15, 0.02));
}

TEST_CASE("UMi LoS DS-K correlation follows the projected matrix", "[lsp]")
{
    const auto p = bundled_set(Scenario::UMi, Condition::LoS, Source::Measured);
    const auto r = draw_independent_lsp(p, 10000, 43);
    std::vector<double> ds, k;
    for (const auto &x : r)
    {
        ds.push_back(std::log10(x.ds));
        k.push_back(*x.k);
    }
    CHECK_THAT(oracle::pearson(ds, k), WithinAbs(projected_xcorr(p)(lsp_ds, lsp_k), 0.05));
    CHECK_THAT(oracle::pearson(ds, k), WithinAbs(-0.66, 0.05));
}

TEST_CASE("marginals pass a 1% Kolmogorov-Smirnov test", "[lsp]")
{
    const double critical = 1.628 / std::sqrt(10000.0); // alpha = 0.01
    for (auto c : {Condition::LoS, Condition::NLoS})
    {
        const auto p = bundled_set(Scenario::UMi, c, Source::Measured);
        const auto r = draw_independent_lsp(p, 10000, 44);
        for (int i = 0; i < p.n_lsp(); ++i)
        {
            std::vector<double> v;
            for (const auto &x : r)
                v.push_back(lsp_transformed(x, static_cast<LspIndex>(i)));
            const double mu = i == lsp_ds ? p.ds.mu : i == lsp_asa ? p.asa.mu : i == lsp_sf ? 0.0 : p.k->mu;
            const double sigma = i == lsp_ds    ? p.ds.sigma
                                 : i == lsp_asa ? p.asa.sigma
                                 : i == lsp_sf  ? p.sigma_sf_db
                                                : p.k->sigma;
            INFO(p.name << " parameter " << i);
            CHECK(ks_one_sample(v, mu, sigma) < critical);
        }
    }
}

TEST_CASE("spatial autocorrelation of each LSP at its correlation distance", "[lsp][spatial]")
{
    for (auto c : {Condition::LoS, Condition::NLoS})
    {
        const auto p = bundled_set(Scenario::IndoorOffice, c, Source::Measured);
        for (int i = 0; i < p.n_lsp(); ++i)
        {
            const auto idx = static_cast<LspIndex>(i);
            const double dc = p.corr_dist.at(idx);
            const Extent e{0.0, 0.0, 80.0 * dc, 80.0 * dc};
            double r = 0.0;
            for (std::uint64_t s = 0; s < 4; ++s)
            {
                const LspFieldSet fields(p, e, derive_seed(77, s));
                r += lag_correlation(e, dc, 0.5 * dc,
                                     [&](const Eigen::Vector2d &q) { return lsp_transformed(fields.sample(q), idx); });
            }
            INFO(p.name << " parameter " << i);
            CHECK_THAT(r / 4.0, WithinAbs(std::exp(-1.0), 0.1));
        }
    }
}

TEST_CASE("LoS generation without K parameters is rejected", "[lsp]")
{
    auto p = bundled_set(Scenario::UMi, Condition::LoS, Source::Measured);
    p.k.reset();
    const std::vector<Eigen::Vector2d> locs{{0, 0}};
    CHECK_THROWS_AS(generate_lsp(p, locs, 1), ParamError);
}

TEST_CASE("ASA respects the cap", "[lsp]")
{
    auto p = bundled_set(Scenario::IndoorOffice, Condition::NLoS, Source::Measured);
    p.asa = {2.0, 0.3};
    LspOptions o;
    o.asa_cap_deg = 104.0;
    for (const auto &r : draw_independent_lsp(p, 2000, 9, o))
        CHECK(r.asa <= 104.0);
}
