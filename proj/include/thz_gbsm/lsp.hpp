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

#include "thz_gbsm/scenario_params.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace thz
{
    /// Axis-aligned rectangle in the horizontal plane, meters.
    struct Extent
    {
        double x0 = 0.0;
        double y0 = 0.0;
        double width = 0.0;
        double height = 0.0;

        bool contains(const Eigen::Vector2d &p) const;
        static Extent bounding(std::span<const Eigen::Vector2d> points, double margin);
    };

    /// Standard-normal field on a regular grid with separable exponential autocorrelation
    /// exp(-|dx|/d) * exp(-|dy|/d). Along either axis the autocorrelation at lag d is exp(-d/d_corr).
    class GaussianField
    {
    public:
        GaussianField() = default;
        GaussianField(Extent extent, double step, double corr_dist, Eigen::MatrixXd values);

        const Extent &extent() const { return extent_; }
        double step() const { return step_; }
        double correlation_distance() const { return corr_dist_; }
        Eigen::Index nx() const { return values_.rows(); }
        Eigen::Index ny() const { return values_.cols(); }

        /// Node value; ix along x, iy along y.
        double node(Eigen::Index ix, Eigen::Index iy) const { return values_(ix, iy); }
        const Eigen::MatrixXd &values() const { return values_; }

        /// Bilinear interpolation, rescaled so the interpolated value keeps unit variance.
        /// Throws std::out_of_range outside the field extent.
        double sample(const Eigen::Vector2d &p) const;

    private:
        Extent extent_;
        double step_ = 1.0;
        double corr_dist_ = 1.0;
        Eigen::MatrixXd values_;
    };

    /// White noise filtered by a first-order recursive (exponential) kernel along x, then y.
    /// Deterministic for a fixed seed.
    /// Throws std::invalid_argument for non-positive extent/step/corr_dist or step > corr_dist / 2.
    GaussianField generate_field(double corr_dist, const Extent &extent, double grid_step, std::uint64_t seed);

    /// Correlated large-scale parameters at one location.
    struct LspRealization
    {
        Eigen::Vector2d location = Eigen::Vector2d::Zero();
        double ds = 0.0;          // s
        double asa = 0.0;         // deg
        double sf = 0.0;          // dB
        std::optional<double> k;  // dB, LoS only
    };

    struct LspOptions
    {
        double asa_cap_deg = 104.0;
        std::optional<double> grid_step; // default: min correlation distance / 4
    };

    /// One independent field per parameter, all over the same extent.
    class LspFieldSet
    {
    public:
        LspFieldSet(const ScenarioParamSet &params, const Extent &extent, std::uint64_t seed,
                    const LspOptions &options = {});

        /// Throws std::out_of_range if `p` lies outside the fields.
        LspRealization sample(const Eigen::Vector2d &p) const;

        const GaussianField &field(LspIndex i) const { return fields_.at(static_cast<std::size_t>(i)); }
        const Eigen::MatrixXd &mixing() const { return mixing_; }

    private:
        ScenarioParamSet params_;
        LspOptions options_;
        std::vector<GaussianField> fields_;
        Eigen::MatrixXd mixing_; // lower-triangular factor of nearest_psd(xcorr)
    };

    /// Spatially consistent LSPs for every location. The fields cover the locations' bounding box.
    /// Per location: a standard-normal vector is read from the per-parameter fields in the fixed
    /// order (DS, ASA, SF, K), mixed by the triangular factor of the projected correlation matrix,
    /// and mapped to DS = 10^(mu + sigma x) s, ASA = min(10^(...), cap) deg, SF = sigma x dB,
    /// K = mu + sigma x dB.
    std::vector<LspRealization> generate_lsp(const ScenarioParamSet &params,
                                             std::span<const Eigen::Vector2d> locations, std::uint64_t seed,
                                             const LspOptions &options = {});

    /// Independent LSP draws (no spatial correlation between samples); sample i uses
    /// derive_seed(seed, i).
    std::vector<LspRealization> draw_independent_lsp(const ScenarioParamSet &params, std::size_t n,
                                                     std::uint64_t seed, const LspOptions &options = {});

    /// Transformed-domain value used for statistics: log10 DS, log10 ASA, SF dB, K dB.
    double lsp_transformed(const LspRealization &r, LspIndex i);
}
