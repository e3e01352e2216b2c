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

#include "thz_gbsm/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace thz
{
    namespace
    {
        // Cluster-count keyed scaling tables of the inverse-Gaussian angle construction.
        constexpr std::array<std::pair<int, double>, 12> c_phi_table{{{4, 0.779},
                                                                      {5, 0.860},
                                                                      {8, 1.018},
                                                                      {10, 1.090},
                                                                      {11, 1.123},
                                                                      {12, 1.146},
                                                                      {14, 1.190},
                                                                      {15, 1.211},
                                                                      {16, 1.226},
                                                                      {19, 1.273},
                                                                      {20, 1.289},
                                                                      {25, 1.358}}};

        constexpr std::array<std::pair<int, double>, 8> c_theta_table{{{8, 0.889},
                                                                       {10, 0.957},
                                                                       {11, 1.031},
                                                                       {12, 1.104},
                                                                       {15, 1.1088},
                                                                       {19, 1.184},
                                                                       {20, 1.178},
                                                                       {25, 1.282}}};

        template <std::size_t N>
        double interpolate_table(const std::array<std::pair<int, double>, N> &t, double n, bool extrapolate_low)
        {
            if (n <= t.front().first)
            {
                if (!extrapolate_low)
                    return t.front().second;
                const double slope = (t[1].second - t[0].second) / (t[1].first - t[0].first);
                return t[0].second + slope * (n - t[0].first);
            }
            if (n >= t.back().first)
                return t.back().second;
            for (std::size_t i = 1; i < N; ++i)
                if (n <= t[i].first)
                {
                    const double w = (n - t[i - 1].first) / (t[i].first - t[i - 1].first);
                    return t[i - 1].second + w * (t[i].second - t[i - 1].second);
                }
            return t.back().second;
        }

        double spread_deg(std::span<const double> power, std::span<const double> angle_deg)
        {
            cplx acc = 0.0;
            double total = 0.0;
            for (std::size_t i = 0; i < power.size(); ++i)
            {
                acc += power[i] * std::polar(1.0, angle_deg[i] * deg2rad);
                total += power[i];
            }
            if (total <= 0.0)
                return 0.0;
            const double r2 = std::norm(acc / total);
            return std::sqrt(std::max(0.0, 1.0 - r2)) * rad2deg;
        }

        double draw_spread(const Gaussian &law, double cap, Rng &rng)
        {
            std::normal_distribution<double> n(law.mu, law.sigma);
            return std::min(std::pow(10.0, n(rng)), cap);
        }

        // Power of each ray (including the direct path, last) and arrival azimuths for a given
        // scale of the cluster offsets.
        struct ArrivalLayout
        {
            std::vector<double> power;
            std::vector<double> base;    // per-ray: centre + in-cluster offset (without cluster offset)
            std::vector<double> offset;  // per-ray: cluster offset to be scaled

            double spread(double scale, std::vector<double> &scratch) const
            {
                scratch.resize(base.size());
                for (std::size_t i = 0; i < base.size(); ++i)
                    scratch[i] = base[i] + scale * offset[i];
                return spread_deg(power, scratch);
            }
        };

        double solve_offset_scale(const ArrivalLayout &layout, double target_deg, double max_offset)
        {
            if (max_offset <= 0.0)
                return 1.0;
            std::vector<double> scratch;
            constexpr int steps = 400;
            const double s_hi = 180.0 / max_offset;

            double best_s = 0.0, best_v = -1.0, prev_s = 0.0;
            for (int k = 0; k <= steps; ++k)
            {
                const double s = s_hi * k / steps;
                const double v = layout.spread(s, scratch);
                if (v >= target_deg)
                {
                    if (k == 0)
                        return 0.0;
                    double lo = prev_s, hi = s;
                    for (int it = 0; it < 60; ++it)
                    {
                        const double mid = 0.5 * (lo + hi);
                        (layout.spread(mid, scratch) >= target_deg ? hi : lo) = mid;
                    }
                    return 0.5 * (lo + hi);
                }
                if (v > best_v)
                {
                    best_v = v;
                    best_s = s;
                }
                prev_s = s;
            }
            return best_s; // target unattainable: widest achievable layout
        }
    }

    LinkGeometry LinkGeometry::between(const Eigen::Vector3d &tx, const Eigen::Vector3d &rx)
    {
        const Eigen::Vector3d d = rx - tx;
        const double r = d.norm();
        if (!(r > 0.0))
            throw std::invalid_argument("LinkGeometry::between: coincident end points");
        LinkGeometry g;
        g.distance_3d = r;
        g.aod = wrap_azimuth_deg(std::atan2(d.y(), d.x()) * rad2deg);
        g.zod = std::acos(std::clamp(d.z() / r, -1.0, 1.0)) * rad2deg;
        g.aoa = wrap_azimuth_deg(std::atan2(-d.y(), -d.x()) * rad2deg);
        g.zoa = std::acos(std::clamp(-d.z() / r, -1.0, 1.0)) * rad2deg;
        return g;
    }

    double ClusterSet::total_power() const
    {
        double nlos = 0.0;
        for (const auto &c : clusters)
        {
            double f = 0.0;
            for (const auto &r : c.rays)
                f += r.power_fraction;
            nlos += c.power * f;
        }
        return direct_share() + nlos_share() * nlos;
    }

    std::vector<double> gen_delays(int n_clusters, double ds, double r_tau, Rng &rng, DelayOrigin origin)
    {
        if (n_clusters < 1)
            throw std::invalid_argument("gen_delays: n_clusters must be >= 1");
        if (!(ds > 0.0))
            throw std::invalid_argument("gen_delays: delay spread must be positive");
        if (!(r_tau >= 1.0))
            throw std::invalid_argument("gen_delays: r_tau must be >= 1");

        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> tau(static_cast<std::size_t>(n_clusters));
        for (auto &t : tau)
            t = -r_tau * ds * std::log(1.0 - u(rng)); // 1 - u lies in (0, 1]
        std::sort(tau.begin(), tau.end());
        if (origin == DelayOrigin::FirstCluster)
        {
            const double first = tau.front();
            for (auto &t : tau)
                t -= first;
        }
        return tau;
    }

    ClusterPowers gen_powers(std::span<const double> delays, double ds, double r_tau, double zeta_db,
                             std::optional<double> k_linear, Rng &rng)
    {
        std::normal_distribution<double> shadow(0.0, 1.0);
        ClusterPowers out;
        out.cluster.resize(delays.size());
        const double decay = (r_tau - 1.0) / (r_tau * ds);
        // Relative to the first delay so the exponent stays bounded for direct-path origins.
        const double t0 = delays.empty() ? 0.0 : delays.front();
        double total = 0.0;
        for (std::size_t n = 0; n < delays.size(); ++n)
        {
            const double z = zeta_db * shadow(rng);
            out.cluster[n] = std::exp(-(delays[n] - t0) * decay) * std::pow(10.0, -z / 10.0);
            total += out.cluster[n];
        }
        for (auto &p : out.cluster)
            p /= total;
        if (k_linear)
            out.direct_share = *k_linear / (*k_linear + 1.0);
        return out;
    }

    std::vector<double> apply_in_cluster_k(int n_rays, double c_k_db)
    {
        if (n_rays < 1)
            throw std::invalid_argument("apply_in_cluster_k: n_rays must be >= 1");
        const double kc = std::pow(10.0, c_k_db / 10.0);
        const double denom = kc + static_cast<double>(n_rays) - 1.0;
        std::vector<double> f(static_cast<std::size_t>(n_rays), 1.0 / denom);
        f.front() = kc / denom;
        return f;
    }

    const std::array<double, 20> &canonical_ray_offsets()
    {
        static constexpr std::array<double, 20> table{0.0447, -0.0447, 0.1413, -0.1413, 0.2492, -0.2492, 0.3715,
                                                      -0.3715, 0.5129, -0.5129, 0.6797, -0.6797, 0.8844, -0.8844,
                                                      1.1481, -1.1481, 1.5195, -1.5195, 2.1551, -2.1551};
        return table;
    }

    std::vector<double> ray_offsets(int n_rays)
    {
        if (n_rays < 1 || n_rays > 20)
            throw std::invalid_argument("ray_offsets: n_rays must be in [1, 20]");
        const auto &t = canonical_ray_offsets();
        std::vector<double> out(t.begin(), t.begin() + n_rays);
        const double mean = std::accumulate(out.begin(), out.end(), 0.0) / n_rays;
        for (auto &o : out)
            o -= mean;
        return out;
    }

    double azimuth_scaling_constant(int n_clusters, std::optional<double> k_db)
    {
        double c = interpolate_table(c_phi_table, static_cast<double>(n_clusters), true);
        if (k_db)
        {
            const double k = *k_db;
            c *= 1.1035 - 0.028 * k - 0.002 * k * k + 0.0001 * k * k * k;
        }
        return c;
    }

    double zenith_scaling_constant(int n_clusters, std::optional<double> k_db)
    {
        double c = interpolate_table(c_theta_table, static_cast<double>(n_clusters), false);
        if (k_db)
        {
            const double k = *k_db;
            c *= 1.3086 + 0.0339 * k - 0.0077 * k * k + 0.0002 * k * k * k;
        }
        return c;
    }

    ClusterAngles gen_angles(const ClusterPowers &powers, const LspRealization &lsp, const ScenarioParamSet &params,
                             const LinkGeometry &los, Rng &rng, AngleSpreadMatching matching)
    {
        const auto n = powers.cluster.size();
        if (n == 0)
            throw std::invalid_argument("gen_angles: no clusters");
        if (!(lsp.asa > 0.0))
            throw std::invalid_argument("gen_angles: ASA must be positive");

        const auto &sp = params.supplemental;
        const double asd = draw_spread(sp.asd, 104.0, rng);
        const double zsa = draw_spread(sp.zsa, 52.0, rng);
        const double zsd = draw_spread(sp.zsd, 52.0, rng);

        const std::optional<double> k_db =
            powers.direct_share > 0.0 ? std::optional(10.0 * std::log10(powers.direct_share / powers.nlos_share()))
                                      : std::nullopt;
        const int ni = static_cast<int>(n);
        const double c_phi = azimuth_scaling_constant(ni, k_db);
        const double c_theta = zenith_scaling_constant(ni, k_db);
        // Power ratios are taken against the strongest component, which in LoS is the direct path.
        std::vector<double> p_abs(n);
        for (std::size_t i = 0; i < n; ++i)
            p_abs[i] = powers.nlos_share() * powers.cluster[i];
        const double p_max = std::max(powers.direct_share, *std::max_element(p_abs.begin(), p_abs.end()));

        std::uniform_int_distribution<int> coin(0, 1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        auto sign = [&] { return coin(rng) ? 1.0 : -1.0; };

        // Offsets relative to the LoS bearings, before wrapping.
        std::vector<double> u_aoa(n), u_aod(n), u_zoa(n), u_zod(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            const double lnp = std::log(std::max(p_abs[i] / p_max, 1e-300));
            const double az_shape = 2.0 * std::sqrt(-lnp) / (1.4 * c_phi);
            const double ze_shape = -lnp / c_theta;
            u_aoa[i] = sign() * lsp.asa * az_shape + gauss(rng) * lsp.asa / 7.0;
            u_aod[i] = sign() * asd * az_shape + gauss(rng) * asd / 7.0;
            u_zoa[i] = sign() * zsa * ze_shape + gauss(rng) * zsa / 7.0;
            u_zod[i] = sign() * zsd * ze_shape + gauss(rng) * zsd / 7.0;
        }

        const auto offsets = ray_offsets(params.n_rays);
        const auto fractions = apply_in_cluster_k(params.n_rays, params.c_k_db);
        const double zod_ray_spread = 3.0 / 8.0 * std::pow(10.0, sp.zsd.mu);

        double aoa_scale = 1.0;
        if (matching == AngleSpreadMatching::Calibrated)
        {
            ArrivalLayout layout;
            double max_off = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                max_off = std::max(max_off, std::abs(u_aoa[i]));
                for (std::size_t m = 0; m < offsets.size(); ++m)
                {
                    layout.power.push_back(powers.nlos_share() * powers.cluster[i] * fractions[m]);
                    layout.base.push_back(los.aoa + params.c_asa_deg * offsets[m]);
                    layout.offset.push_back(u_aoa[i]);
                }
            }
            if (powers.direct_share > 0.0)
            {
                layout.power.push_back(powers.direct_share);
                layout.base.push_back(los.aoa);
                layout.offset.push_back(0.0);
            }
            aoa_scale = solve_offset_scale(layout, lsp.asa, max_off);
        }

        ClusterAngles a;
        a.aoa.resize(n);
        a.aod.resize(n);
        a.zoa.resize(n);
        a.zod.resize(n);
        a.ray_aoa.assign(n, std::vector<double>(offsets.size()));
        a.ray_aod = a.ray_zoa = a.ray_zod = a.ray_aoa;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double aoa = los.aoa + aoa_scale * u_aoa[i];
            const double aod = los.aod + u_aod[i];
            const double zoa = los.zoa + u_zoa[i];
            const double zod = los.zod + u_zod[i];
            a.aoa[i] = wrap_azimuth_deg(aoa);
            a.aod[i] = wrap_azimuth_deg(aod);
            a.zoa[i] = fold_zenith_deg(zoa);
            a.zod[i] = fold_zenith_deg(zod);
            for (std::size_t m = 0; m < offsets.size(); ++m)
            {
                a.ray_aoa[i][m] = wrap_azimuth_deg(aoa + params.c_asa_deg * offsets[m]);
                a.ray_aod[i][m] = wrap_azimuth_deg(aod + params.c_asa_deg * offsets[m]);
                a.ray_zoa[i][m] = fold_zenith_deg(zoa + sp.c_zsa_deg * offsets[m]);
                a.ray_zod[i][m] = fold_zenith_deg(zod + zod_ray_spread * offsets[m]);
            }
        }
        return a;
    }

    XprPhases gen_xpr_and_phases(int n_clusters, int n_rays, double xpr_mu_db, double xpr_sigma_db, Rng &rng)
    {
        if (n_rays < 1 || n_clusters < 0)
            throw std::invalid_argument("gen_xpr_and_phases: invalid dimensions");
        std::normal_distribution<double> x(0.0, 1.0);
        std::uniform_real_distribution<double> ph(-pi, pi);
        XprPhases out;
        out.xpr.assign(static_cast<std::size_t>(n_clusters), std::vector<double>(static_cast<std::size_t>(n_rays)));
        out.phase.assign(static_cast<std::size_t>(n_clusters),
                         std::vector<std::array<double, 4>>(static_cast<std::size_t>(n_rays)));
        for (int n = 0; n < n_clusters; ++n)
            for (int m = 0; m < n_rays; ++m)
            {
                out.xpr[n][m] = std::pow(10.0, (xpr_mu_db + xpr_sigma_db * x(rng)) / 10.0);
                for (auto &p : out.phase[n][m])
                    p = ph(rng);
            }
        return out;
    }

    double composite_delay_spread(const ClusterSet &cs)
    {
        double p_sum = 0.0, t1 = 0.0, t2 = 0.0;
        auto add = [&](double p, double t)
        {
            p_sum += p;
            t1 += p * t;
            t2 += p * t * t;
        };
        for (const auto &c : cs.clusters)
            add(cs.nlos_share() * c.power, c.delay);
        if (cs.direct)
            add(cs.direct_share(), cs.direct->delay);
        if (p_sum <= 0.0)
            return 0.0;
        const double mean = t1 / p_sum;
        return std::sqrt(std::max(0.0, t2 / p_sum - mean * mean));
    }

    double composite_arrival_spread(const ClusterSet &cs)
    {
        std::vector<double> p, a;
        for (const auto &c : cs.clusters)
            for (const auto &r : c.rays)
            {
                p.push_back(cs.nlos_share() * c.power * r.power_fraction);
                a.push_back(r.aoa);
            }
        if (cs.direct)
        {
            p.push_back(cs.direct_share());
            a.push_back(cs.direct->geometry.aoa);
        }
        return spread_deg(p, a);
    }

    void match_delay_spread(ClusterSet &cs, double target_ds)
    {
        const double current = composite_delay_spread(cs);
        if (!(current > 0.0))
            return;
        const double s = target_ds / current;
        // Scaling about the direct path (tau = 0) or the first cluster keeps the origin fixed.
        for (auto &c : cs.clusters)
            c.delay *= s;
    }

    ClusterSet generate_clusters(const ScenarioParamSet &params, const LspRealization &lsp, const LinkGeometry &los,
                                 Rng &rng, const ClusterGenOptions &options)
    {
        const bool is_los = params.condition == Condition::LoS;
        const int n = draw_cluster_count(params, options.count_mode, rng);
        const auto &sp = params.supplemental;

        std::optional<double> k_lin;
        if (is_los)
        {
            const auto k_db = options.forced_k_db ? options.forced_k_db : lsp.k;
            if (!k_db)
                throw ParamError(params.name + ": LoS link without a K-factor");
            k_lin = std::pow(10.0, *k_db / 10.0);
        }

        const auto delays =
            gen_delays(n, lsp.ds, sp.r_tau, rng, is_los ? DelayOrigin::DirectPath : DelayOrigin::FirstCluster);
        const auto powers = gen_powers(delays, lsp.ds, sp.r_tau, sp.zeta_db, k_lin, rng);
        const auto angles = gen_angles(powers, lsp, params, los, rng, options.angle_matching);
        const auto xp = gen_xpr_and_phases(n, params.n_rays, sp.xpr_db.mu, sp.xpr_db.sigma, rng);
        const auto fractions = apply_in_cluster_k(params.n_rays, params.c_k_db);

        ClusterSet cs;
        cs.clusters.resize(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < cs.clusters.size(); ++i)
        {
            auto &c = cs.clusters[i];
            c.delay = delays[i];
            c.power = powers.cluster[i];
            c.aoa = angles.aoa[i];
            c.zoa = angles.zoa[i];
            c.aod = angles.aod[i];
            c.zod = angles.zod[i];
            c.rays.resize(fractions.size());
            for (std::size_t m = 0; m < fractions.size(); ++m)
            {
                auto &r = c.rays[m];
                r.aoa = angles.ray_aoa[i][m];
                r.zoa = angles.ray_zoa[i][m];
                r.aod = angles.ray_aod[i][m];
                r.zod = angles.ray_zod[i][m];
                r.xpr = xp.xpr[i][m];
                r.phase = xp.phase[i][m];
                r.power_fraction = fractions[m];
            }
        }
        if (k_lin)
            cs.direct = DirectPath{*k_lin, los, 0.0};

        if (options.delay_matching == DelaySpreadMatching::Calibrated)
            match_delay_spread(cs, lsp.ds);
        return cs;
    }
}
