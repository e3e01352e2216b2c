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

#include "thz_gbsm/common.hpp"
#include "thz_gbsm/scenario_params.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace thz
{
    /// Pointing of a directional measurement, degrees.
    struct Direction
    {
        double phi_tx = 0.0;
        double phi_rx = 0.0;
        double theta_rx = 90.0;
    };

    /// Power-delay profile on a uniform delay grid: bin i sits at delay0 + i * spacing.
    struct Pdp
    {
        double delay0 = 0.0;  // s
        double spacing = 1e-9; // s
        std::vector<double> power;
        std::optional<Direction> direction;
        bool below_noise = false; // set by threshold() when nothing survives

        double delay(std::size_t i) const { return delay0 + static_cast<double>(i) * spacing; }
        double total() const;
    };

    /// Azimuthal power profile; azimuths in degrees.
    struct Dap
    {
        std::vector<double> azimuth;
        std::vector<double> power;
    };

    struct MpcSet
    {
        std::vector<Mpc> mpcs;
        std::vector<int> labels; // empty until clustered
    };

    /// Per-bin maximum over directional PDPs. Throws std::invalid_argument on mismatched grids.
    Pdp synth_omni(std::span<const Pdp> directional);

    /// Zero every bin below noise_floor * 10^(margin/10). Flags an all-zero result.
    Pdp threshold(const Pdp &pdp, double margin_db, double noise_floor);

    /// Power-weighted standard deviation of delay. Throws std::domain_error for zero power.
    double rms_ds(const Pdp &pdp);
    double rms_ds(std::span<const double> delay, std::span<const double> power);

    /// sqrt(sum p |e^{j phi} - mu|^2 / sum p), mu = sum p e^{j phi} / sum p, read as radians and
    /// returned in degrees. Throws std::domain_error for zero power.
    double asa(const Dap &dap);
    double asa(std::span<const double> azimuth_deg, std::span<const double> power);

    /// Circular angular spread sqrt(-2 ln |mu|) in degrees.
    double asa_circular(const Dap &dap);

    struct KFactor
    {
        std::optional<double> db; // empty: a single component, K is infinite

        bool infinite() const { return !db.has_value(); }
    };

    /// Strongest bin over the rest. Throws std::domain_error for zero power.
    KFactor k_factor(const Pdp &pdp);
    KFactor k_factor(std::span<const double> power);

    /// Azimuth profile: per azimuth, the maximum over elevations of the delay-summed power.
    Dap dap_from_directional(std::span<const Pdp> directional);

    enum class OmniSynthesis
    {
        /// Sum over ideal non-overlapping sectors.
        Sum,
        /// Per-bin maximum over sectors.
        MaxOverDirections
    };

    struct SounderOptions
    {
        double delay_bin = 0.05e-9; // s
        double azimuth_bin = 1.0;   // deg
        OmniSynthesis omni = OmniSynthesis::Sum;
    };

    struct Sounding
    {
        Pdp omni;
        Dap dap; // occupied sectors only, at sector centres
    };

    /// Bin a ray-level component list onto a delay/azimuth grid, the way a rotating-horn sounder
    /// with ideal sectors would. Throws std::invalid_argument on an empty or zero-power list.
    Sounding virtual_sounder(std::span<const Mpc> mpcs, const SounderOptions &options = {});

    // ---- clustering -------------------------------------------------------

    struct McdScale
    {
        double zeta = 8.0;
        double delta_tau_max = 0.0; // s, delay range of the set
        double tau_std = 0.0;       // s, delay standard deviation of the set

        static McdScale of(std::span<const Mpc> mpcs, double zeta = 8.0);
        /// Weight on |tau_i - tau_j|: zeta * tau_std / delta_tau_max^2 (0 for a single delay).
        double delay_weight() const;
    };

    /// sqrt(MCD_angle^2 + MCD_delay^2); MCD_angle = |r_i - r_j| / 2 on (AoA, ZoA) unit vectors.
    double mcd(const Mpc &a, const Mpc &b, const McdScale &scale);

    /// Cluster-count selection for kpower_means_auto.
    enum class KSelection
    {
        /// Largest relative objective drop J(k-1) / J(k); robust to ray-structured clusters.
        ObjectiveDrop,
        /// Largest Calinski-Harabasz ratio (power-weighted between / within dispersion).
        CalinskiHarabasz
    };

    struct KpmOptions
    {
        double zeta = 8.0;
        int max_iterations = 100;
        int restarts = 10;
        std::uint64_t seed = 1;
        KSelection selection = KSelection::ObjectiveDrop;
    };

    struct KpmResult
    {
        std::vector<int> labels;
        Eigen::MatrixXd centroids;      // k x 4 in the MCD embedding (r/2, w * tau)
        double objective = 0.0;         // sum_i p_i * MCD(i, centroid)^2
        std::vector<double> trace;      // objective after every half step of the winning restart
        int iterations = 0;
    };

    /// K-power-means. MPCs are embedded so Euclidean distance equals the MCD; centroids are
    /// power-weighted means in that embedding; the best of `restarts` seeded runs is kept.
    /// Throws std::invalid_argument when k < 1 or k > |mpcs|.
    KpmResult kpower_means(std::span<const Mpc> mpcs, int k, const KpmOptions &options = {});

    /// Sweep k over [k_min, k_max] and keep the best score under `options.selection`.
    KpmResult kpower_means_auto(std::span<const Mpc> mpcs, int k_min = 2, int k_max = 10,
                                const KpmOptions &options = {});

    struct ClusterStats
    {
        int count = 0;
        std::vector<double> c_ds;                 // s
        std::vector<double> c_asa;                // deg
        std::vector<KFactor> c_k;
        double median_c_ds = 0.0;                 // s
        double median_c_asa = 0.0;                // deg
        std::optional<double> median_c_k_db;      // empty when every cluster is a single MPC
    };

    /// Throws std::invalid_argument for missing labels or an empty cluster.
    ClusterStats cluster_stats(const MpcSet &set);

    // ---- statistics -------------------------------------------------------

    /// Mean and population standard deviation of log10(samples).
    /// Throws std::invalid_argument for n < 2 or a nonpositive sample.
    Gaussian fit_lognormal(std::span<const double> samples);
    /// Mean and population standard deviation. Throws std::invalid_argument for n < 2.
    Gaussian fit_normal(std::span<const double> samples);

    /// Pearson correlation of the columns. Throws std::invalid_argument for fewer than three rows
    /// or a zero-variance column.
    Eigen::MatrixXd cross_corr(const Eigen::MatrixXd &columns);

    /// Smallest lag at which the empirical autocorrelation of a uniformly spaced track drops to
    /// 1/e, linearly interpolated. Throws std::invalid_argument for fewer than 20 samples,
    /// zero variance, or a track that never decorrelates.
    double correlation_distance(std::span<const double> values, double spacing);

    /// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
    double ks_statistic(std::vector<double> a, std::vector<double> b);

    double median(std::vector<double> v);
}
