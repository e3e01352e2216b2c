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

#include "thz_gbsm/clusters.hpp"
#include "thz_gbsm/common.hpp"

#include <Eigen/Dense>

#include <vector>

namespace thz
{
    /// Dual-polarized element field pattern (F_theta, F_phi) in the element frame.
    struct ElementPattern
    {
        enum class Kind
        {
            Isotropic,
            Directional
        };

        Kind kind = Kind::Isotropic;
        Eigen::Vector2d polarization{1.0, 0.0}; // (theta, phi) weights; (1, 0) is vertical
        double hpbw_deg = 60.0;                 // directional main lobe half-power width
        double boresight_zenith_deg = 90.0;
        double boresight_azimuth_deg = 0.0;
        double floor_db = -30.0; // directional back/side lobe level

        static ElementPattern isotropic(Eigen::Vector2d pol = {1.0, 0.0});
        /// Cosine-power main lobe |F|^2 = cos^q(psi), q chosen so the half-power angle is hpbw / 2.
        static ElementPattern directional(double hpbw_deg, double zenith_deg = 90.0, double azimuth_deg = 0.0);

        Eigen::Vector2d operator()(double zenith_deg, double azimuth_deg) const;
    };

    /// Element positions (columns, m) sharing one element pattern.
    struct AntennaArray
    {
        Eigen::Matrix3Xd positions = Eigen::Matrix3Xd::Zero(3, 1);
        ElementPattern pattern;

        Eigen::Index size() const { return positions.cols(); }

        static AntennaArray single(ElementPattern pattern = {});
        /// rows x cols uniform rectangular array in the y-z plane centred on the origin.
        static AntennaArray ura(int rows, int cols, double spacing_m, ElementPattern pattern = {});
    };

    /// Per-element pattern (2-vector) times the plane-wave phase exp(j 2 pi r.d / lambda).
    Eigen::Matrix<cplx, Eigen::Dynamic, 2> array_response(const AntennaArray &array, double zenith_deg,
                                                          double azimuth_deg, double wavelength);

    struct LinkArrays
    {
        AntennaArray rx;
        AntennaArray tx;
        double wavelength = 1.0;                             // m
        Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // receiver velocity, m/s
    };

    /// Complex coefficient of one ray between rx element u and tx element s at time t (s).
    /// sqrt(P_n * fraction) * F_rx^T * [[e^{j tt}, k^{-1/2} e^{j tp}], [k^{-1/2} e^{j pt}, e^{j pp}]] * F_tx
    /// * rx and tx array phases * Doppler phase.
    cplx nlos_ray_coeff(const Ray &ray, const Cluster &cluster, const LinkArrays &link, Eigen::Index u,
                        Eigen::Index s, double t);

    /// Direct-path coefficient with polarization matrix diag(1, -1) and phase exp(-j 2 pi d / lambda).
    /// Throws std::invalid_argument when d <= 0.
    cplx los_coeff(const LinkGeometry &geometry, const LinkArrays &link, Eigen::Index u, Eigen::Index s, double d,
                   double t);

    enum class CirMode
    {
        /// The two strongest clusters are split into three delayed sub-clusters.
        Standard,
        /// One tap per cluster.
        ThzSimplified
    };

    struct CirOptions
    {
        CirMode mode = CirMode::ThzSimplified;
        double c_ds = 3.91e-9;          // sub-cluster delay unit, s
        std::vector<double> t_samples{0.0};
    };

    struct Tap
    {
        double delay = 0.0;              // s
        std::vector<Eigen::MatrixXcd> h; // per time sample, n_rx x n_tx
    };

    struct ChannelRealization
    {
        std::vector<Tap> taps; // ascending delay
        std::vector<double> t_samples;
        double wavelength = 1.0;
        Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
        Eigen::Index n_rx = 0;
        Eigen::Index n_tx = 0;
        std::vector<Mpc> paths; // ray-level components with their tap delays (direct path included)

        /// Sum over taps of |h_{u,s}(t)|^2.
        double tap_power(Eigen::Index u, Eigen::Index s, std::size_t t = 0) const;
        /// Sum of path powers (independent of phases and arrays).
        double path_power() const;
    };

    /// Sub-cluster ray groups (0-based) for an M-ray cluster; empty groups are dropped.
    std::vector<std::vector<int>> subcluster_rays(int n_rays);

    /// NLoS taps weighted by sqrt(1 / (K + 1)), the direct tap by sqrt(K / (K + 1)). Taps that land
    /// on the same delay are merged. A set with fewer than two clusters is emitted unsplit.
    ChannelRealization assemble_cir(const ClusterSet &cs, const LinkArrays &link, const CirOptions &options = {});

    /// H(f) = sum_taps a exp(-j 2 pi f tau) for baseband offsets `freqs` (Hz) at time sample `t_index`.
    std::vector<Eigen::MatrixXcd> cir_to_ctf(const ChannelRealization &cr, const std::vector<double> &freqs,
                                             std::size_t t_index = 0);
}
