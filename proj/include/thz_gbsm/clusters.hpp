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

#include "thz_gbsm/lsp.hpp"
#include "thz_gbsm/scenario_params.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace thz
{
    // Polarization phase slots: theta-theta, theta-phi, phi-theta, phi-phi.
    enum PolPhase : int
    {
        pol_tt = 0,
        pol_tp = 1,
        pol_pt = 2,
        pol_pp = 3
    };

    struct Ray
    {
        double aoa = 0.0; // deg, [-180, 180)
        double zoa = 90.0; // deg, [0, 180]
        double aod = 0.0;
        double zod = 90.0;
        double xpr = 1.0;                     // kappa, linear
        std::array<double, 4> phase{};        // rad, [-pi, pi)
        double power_fraction = 1.0;          // share of the cluster power
    };

    struct Cluster
    {
        double delay = 0.0; // s
        double power = 0.0; // linear, clusters sum to 1
        double aoa = 0.0;   // cluster centre angles, deg
        double zoa = 90.0;
        double aod = 0.0;
        double zod = 90.0;
        std::vector<Ray> rays;
    };

    /// Line-of-sight geometry of a link. Angles in degrees.
    struct LinkGeometry
    {
        double aoa = 0.0;
        double zoa = 90.0;
        double aod = 0.0;
        double zod = 90.0;
        double distance_3d = 1.0; // m

        /// Bearings from a transmitter at `tx` to a receiver at `rx` (3D positions, m).
        static LinkGeometry between(const Eigen::Vector3d &tx, const Eigen::Vector3d &rx);
    };

    /// Specular direct path of a LoS link. It carries K/(K+1) of the total power.
    struct DirectPath
    {
        double k_linear = 0.0;
        LinkGeometry geometry;
        double delay = 0.0; // s

        double share() const { return k_linear / (k_linear + 1.0); }
    };

    struct ClusterSet
    {
        std::vector<Cluster> clusters;
        std::optional<DirectPath> direct;

        std::size_t size() const { return clusters.size(); }
        double direct_share() const { return direct ? direct->share() : 0.0; }
        double nlos_share() const { return 1.0 - direct_share(); }

        /// direct share + sum_n nlos_share * P_n * sum_m fraction_{n,m}; 1 for a well-formed set.
        double total_power() const;
    };

    /// Delay origin. FirstCluster subtracts the minimum so tau_1 = 0. DirectPath keeps the drawn
    /// excess delays, so every cluster arrives after a direct path at tau = 0.
    enum class DelayOrigin
    {
        FirstCluster,
        DirectPath
    };

    /// tau'_n = -r_tau * ds * ln(U_n), sorted ascending, shifted according to `origin`.
    /// Throws std::invalid_argument if n < 1, ds <= 0 or r_tau < 1.
    std::vector<double> gen_delays(int n_clusters, double ds, double r_tau, Rng &rng,
                                   DelayOrigin origin = DelayOrigin::FirstCluster);

    struct ClusterPowers
    {
        std::vector<double> cluster; // sums to 1
        double direct_share = 0.0;   // K/(K+1) when a K-factor is supplied, else 0
        double nlos_share() const { return 1.0 - direct_share; }
    };

    /// Exponential power-delay profile with per-cluster lognormal shadowing:
    /// P'_n = exp(-tau_n (r_tau - 1) / (r_tau ds)) * 10^(-Z_n / 10), Z_n ~ N(0, zeta^2), normalized.
    ClusterPowers gen_powers(std::span<const double> delays, double ds, double r_tau, double zeta_db,
                             std::optional<double> k_linear, Rng &rng);

    /// Per-ray power fractions with an in-cluster K-factor: the first (strongest) ray receives
    /// kc / (kc + M - 1), every other ray 1 / (kc + M - 1), kc = 10^(c_k / 10).
    std::vector<double> apply_in_cluster_k(int n_rays, double c_k_db);

    /// Canonical 20-entry intra-cluster offset table (unit spread, zero mean over all 20).
    const std::array<double, 20> &canonical_ray_offsets();

    /// First `n_rays` entries of the canonical table, re-centred to zero mean.
    std::vector<double> ray_offsets(int n_rays);

    /// Azimuth scaling constant C_phi for the inverse-Gaussian cluster construction.
    /// Table values for the listed cluster counts, linear interpolation between them and linear
    /// extrapolation below 4. With a K-factor (dB) the LoS correction polynomial is applied.
    double azimuth_scaling_constant(int n_clusters, std::optional<double> k_db = std::nullopt);

    /// Zenith scaling constant C_theta; counts below 8 use the 8-cluster value.
    double zenith_scaling_constant(int n_clusters, std::optional<double> k_db = std::nullopt);

    enum class AngleSpreadMatching
    {
        /// Plain inverse-Gaussian construction.
        ThreeGpp,
        /// Same shape; the cluster azimuth offsets are scaled so the composite arrival spread
        /// (power-weighted circular spread, direct path included) equals the drawn ASA.
        Calibrated
    };

    struct ClusterAngles
    {
        // per cluster centre, deg
        std::vector<double> aoa, zoa, aod, zod;
        // per cluster, per ray, deg
        std::vector<std::vector<double>> ray_aoa, ray_zoa, ray_aod, ray_zod;
    };

    /// Cluster and ray angles. Ray offsets use c_asa for both arrival and departure azimuth,
    /// c_zsa for arrival zenith and 3/8 * 10^zsd_mu for departure zenith. Azimuths are wrapped to
    /// [-180, 180), zeniths folded into [0, 180].
    ClusterAngles gen_angles(const ClusterPowers &powers, const LspRealization &lsp, const ScenarioParamSet &params,
                             const LinkGeometry &los, Rng &rng,
                             AngleSpreadMatching matching = AngleSpreadMatching::Calibrated);

    struct XprPhases
    {
        std::vector<std::vector<double>> xpr;                   // kappa, linear
        std::vector<std::vector<std::array<double, 4>>> phase;  // rad
    };

    /// kappa = 10^(X/10), X ~ N(mu, sigma^2); four i.i.d. uniform phases on [-pi, pi) per ray.
    XprPhases gen_xpr_and_phases(int n_clusters, int n_rays, double xpr_mu_db, double xpr_sigma_db, Rng &rng);

    /// Power-weighted RMS delay spread of the cluster taps (direct path included).
    double composite_delay_spread(const ClusterSet &cs);

    /// Power-weighted circular arrival spread of all rays (direct path included), degrees.
    double composite_arrival_spread(const ClusterSet &cs);

    /// Scale all cluster delays so composite_delay_spread equals `target_ds`. No-op when the
    /// spread is zero (single tap).
    void match_delay_spread(ClusterSet &cs, double target_ds);

    enum class DelaySpreadMatching
    {
        None,
        Calibrated
    };

    struct ClusterGenOptions
    {
        ClusterCountMode count_mode = ClusterCountMode::Fixed;
        AngleSpreadMatching angle_matching = AngleSpreadMatching::Calibrated;
        DelaySpreadMatching delay_matching = DelaySpreadMatching::Calibrated;
        std::optional<double> forced_k_db; // overrides lsp.k for LoS sets
    };

    /// Full small-scale draw for one link: count, delays, powers, in-cluster fractions, angles,
    /// XPR and phases. LoS sets attach a direct path along `los` with the LSP K-factor.
    ClusterSet generate_clusters(const ScenarioParamSet &params, const LspRealization &lsp, const LinkGeometry &los,
                                 Rng &rng, const ClusterGenOptions &options = {});
}
