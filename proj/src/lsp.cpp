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

#include "thz_gbsm/lsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace thz
{
    bool Extent::contains(const Eigen::Vector2d &p) const
    {
        return p.x() >= x0 && p.x() <= x0 + width && p.y() >= y0 && p.y() <= y0 + height;
    }

    Extent Extent::bounding(std::span<const Eigen::Vector2d> points, double margin)
    {
        if (points.empty())
            throw std::invalid_argument("Extent::bounding: no points");
        Eigen::Vector2d lo = points.front(), hi = points.front();
        for (const auto &p : points)
        {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        return {lo.x() - margin, lo.y() - margin, hi.x() - lo.x() + 2.0 * margin, hi.y() - lo.y() + 2.0 * margin};
    }

    GaussianField::GaussianField(Extent extent, double step, double corr_dist, Eigen::MatrixXd values)
        : extent_(extent), step_(step), corr_dist_(corr_dist), values_(std::move(values))
    {
    }

    double GaussianField::sample(const Eigen::Vector2d &p) const
    {
        if (!extent_.contains(p))
            throw std::out_of_range("location (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                                    ") is outside the field");

        const double fx = (p.x() - extent_.x0) / step_;
        const double fy = (p.y() - extent_.y0) / step_;
        const Eigen::Index ix = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(fx)), 0, nx() - 2);
        const Eigen::Index iy = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(fy)), 0, ny() - 2);
        const double a = std::clamp(fx - static_cast<double>(ix), 0.0, 1.0);
        const double b = std::clamp(fy - static_cast<double>(iy), 0.0, 1.0);

        const double v = (1 - a) * (1 - b) * values_(ix, iy) + a * (1 - b) * values_(ix + 1, iy) +
                         (1 - a) * b * values_(ix, iy + 1) + a * b * values_(ix + 1, iy + 1);

        // Variance of the weighted sum under the separable node correlation rho^|di| rho^|dj|.
        const double rho = std::exp(-step_ / corr_dist_);
        const double vx = (1 - a) * (1 - a) + a * a + 2.0 * a * (1 - a) * rho;
        const double vy = (1 - b) * (1 - b) + b * b + 2.0 * b * (1 - b) * rho;
        return v / std::sqrt(vx * vy);
    }

    GaussianField generate_field(double corr_dist, const Extent &extent, double grid_step, std::uint64_t seed)
    {
        if (!(extent.width > 0.0) || !(extent.height > 0.0))
            throw std::invalid_argument("generate_field: extent must be positive");
        if (!(grid_step > 0.0))
            throw std::invalid_argument("generate_field: grid step must be positive");
        if (!(corr_dist > 0.0))
            throw std::invalid_argument("generate_field: correlation distance must be positive");
        if (grid_step > corr_dist / 2.0)
            throw std::invalid_argument("generate_field: grid step must not exceed half the correlation distance");

        const auto nx = static_cast<Eigen::Index>(std::ceil(extent.width / grid_step)) + 1;
        const auto ny = static_cast<Eigen::Index>(std::ceil(extent.height / grid_step)) + 1;

        Rng rng(seed);
        std::normal_distribution<double> white(0.0, 1.0);
        Eigen::MatrixXd v(nx, ny);
        for (Eigen::Index iy = 0; iy < ny; ++iy)
            for (Eigen::Index ix = 0; ix < nx; ++ix)
                v(ix, iy) = white(rng);

        // AR(1) recursion with stationary start keeps unit variance at every node.
        const double rho = std::exp(-grid_step / corr_dist);
        const double innov = std::sqrt(1.0 - rho * rho);
        for (Eigen::Index iy = 0; iy < ny; ++iy)
            for (Eigen::Index ix = 1; ix < nx; ++ix)
                v(ix, iy) = rho * v(ix - 1, iy) + innov * v(ix, iy);
        for (Eigen::Index iy = 1; iy < ny; ++iy)
            v.col(iy) = rho * v.col(iy - 1) + innov * v.col(iy);

        Extent grid = extent;
        grid.width = static_cast<double>(nx - 1) * grid_step;
        grid.height = static_cast<double>(ny - 1) * grid_step;
        return GaussianField(grid, grid_step, corr_dist, std::move(v));
    }

    LspFieldSet::LspFieldSet(const ScenarioParamSet &params, const Extent &extent, std::uint64_t seed,
                             const LspOptions &options)
        : params_(params), options_(options)
    {
        if (params.condition == Condition::LoS && (!params.k || !params.corr_dist.k))
            throw ParamError(params.name + ": LoS generation requires K-factor parameters");
        if (params.xcorr.rows() != params.n_lsp())
            throw ParamError(params.name + ": xcorr size does not match the parameter count");

        const double step = options.grid_step.value_or(params.corr_dist.min() / 4.0);
        for (int i = 0; i < params.n_lsp(); ++i)
        {
            const double dc = params.corr_dist.at(static_cast<LspIndex>(i));
            fields_.push_back(generate_field(dc, extent, std::min(step, dc / 2.0),
                                             derive_seed(seed, static_cast<std::uint64_t>(i))));
        }
        mixing_ = semidefinite_cholesky(projected_xcorr(params));
    }

    LspRealization LspFieldSet::sample(const Eigen::Vector2d &p) const
    {
        const int n = params_.n_lsp();
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i)
            z(i) = fields_[static_cast<std::size_t>(i)].sample(p);
        const Eigen::VectorXd x = mixing_ * z;

        LspRealization r;
        r.location = p;
        r.ds = std::pow(10.0, params_.ds.mu + params_.ds.sigma * x(lsp_ds));
        r.asa = std::min(std::pow(10.0, params_.asa.mu + params_.asa.sigma * x(lsp_asa)), options_.asa_cap_deg);
        r.sf = params_.sigma_sf_db * x(lsp_sf);
        if (params_.k)
            r.k = params_.k->mu + params_.k->sigma * x(lsp_k);
        return r;
    }

    std::vector<LspRealization> generate_lsp(const ScenarioParamSet &params,
                                             std::span<const Eigen::Vector2d> locations, std::uint64_t seed,
                                             const LspOptions &options)
    {
        if (locations.empty())
            return {};
        const double step = options.grid_step.value_or(params.corr_dist.min() / 4.0);
        const LspFieldSet fields(params, Extent::bounding(locations, step), seed, options);

        std::vector<LspRealization> out;
        out.reserve(locations.size());
        for (const auto &p : locations)
            out.push_back(fields.sample(p));
        return out;
    }

    std::vector<LspRealization> draw_independent_lsp(const ScenarioParamSet &params, std::size_t n,
                                                     std::uint64_t seed, const LspOptions &options)
    {
        std::vector<LspRealization> out;
        out.reserve(n);
        const Eigen::Vector2d origin = Eigen::Vector2d::Zero();
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(generate_lsp(params, std::span(&origin, 1), derive_seed(seed, i), options).front());
        return out;
    }

    double lsp_transformed(const LspRealization &r, LspIndex i)
    {
        switch (i)
        {
        case lsp_ds:
            return std::log10(r.ds);
        case lsp_asa:
            return std::log10(r.asa);
        case lsp_sf:
            return r.sf;
        case lsp_k:
            return r.k.value_or(std::numeric_limits<double>::quiet_NaN());
        }
        return std::numeric_limits<double>::quiet_NaN();
    }
}
