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

#include "thz_gbsm/coefficients.hpp"
#include "thz_gbsm/scenario_params.hpp"
#include "thz_gbsm/simulation.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace thz
{
    /// log2 det(I + rho / mt * H H^H) from the eigenvalues of the Hermitian Gram matrix.
    /// Throws std::invalid_argument for non-finite H, rho < 0 or mt < 1.
    double mimo_capacity(const Eigen::MatrixXcd &h, double rho, Eigen::Index mt);

    /// Same quantity through an LU log-determinant; used as an independent cross-check.
    double mimo_capacity_det(const Eigen::MatrixXcd &h, double rho, Eigen::Index mt);

    /// Factor that brings the mean squared Frobenius norm of the set to rows * cols.
    /// Throws std::domain_error for an all-zero set.
    double normalization_factor(const std::vector<Eigen::MatrixXcd> &set);

    /// Scales every matrix by sqrt(normalization_factor(set)).
    std::vector<Eigen::MatrixXcd> normalize_channel(std::vector<Eigen::MatrixXcd> set);

    enum class ConditionMode
    {
        LoS,
        NLoS,
        Mixed
    };

    enum class Normalization
    {
        PerExperiment,
        PerDrop
    };

    struct CapacityOptions
    {
        std::vector<double> snr_db;     // default: 0..40 dB in 1 dB steps
        std::size_t n_drops = 100;
        std::uint64_t seed = 1;
        int n_tones = 64;
        double bandwidth = 1e9; // Hz
        int bs_rows = 16, bs_cols = 16;
        int mu_rows = 2, mu_cols = 2;
        CirMode mode = CirMode::ThzSimplified;
        ConditionMode condition = ConditionMode::LoS;
        double los_fraction = 0.5;      // Mixed only
        bool include_path_loss = true;  // carry CI path loss and shadow fading into H before normalization
        Normalization normalization = Normalization::PerExperiment;
        std::optional<Placement> placement; // default: Placement::defaults(scenario)
        ClusterGenOptions clusters;
        unsigned threads = 1;

        std::vector<double> snr_grid() const;
    };

    struct CapacityCurve
    {
        std::vector<double> snr_db;
        std::vector<double> capacity; // mean bps/Hz
        std::size_t drops = 0;
        Scenario scenario = Scenario::IndoorOffice;
        Source source = Source::Measured;
        ConditionMode condition = ConditionMode::LoS;

        /// Linear interpolation of the curve at `snr` (clamped to the grid ends).
        double at(double snr) const;
    };

    /// Drops of the selected scenario/condition; per drop a CIR between a rows x cols base-station
    /// array (transmitter) and the user array, tones evenly spread over the bandwidth, Gram
    /// eigenvalues per tone; normalization per experiment (or per drop); capacity averaged over
    /// tones, then drops. Sets are looked up by scenario and condition in `sets`.
    CapacityCurve run_capacity_experiment(const std::vector<ScenarioParamSet> &sets, Scenario scenario,
                                          const CapacityOptions &options = {});

    /// First SNR at which a - b strictly changes sign, linearly interpolated; empty if it never does.
    std::optional<double> crossover_snr(const CapacityCurve &a, const CapacityCurve &b);

    std::string to_string(ConditionMode m);
    ConditionMode parse_condition_mode(std::string_view s);
}
