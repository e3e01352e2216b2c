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

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace thz
{
    /// Raised for any malformed or out-of-range parameter document. The message names the
    /// set and the field.
    class ParamError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Mean and standard deviation of a normal law. For spreads the law lives in the log10 domain.
    struct Gaussian
    {
        double mu = 0.0;
        double sigma = 0.0;
        bool operator==(const Gaussian &) const = default;
    };

    /// Large-scale parameter index inside the cross-correlation matrix. The order is fixed:
    /// the LSP mixing factorization is triangular and therefore order dependent.
    enum LspIndex : int
    {
        lsp_ds = 0,
        lsp_asa = 1,
        lsp_sf = 2,
        lsp_k = 3
    };

    struct CorrelationDistances
    {
        double asa = 0.0; // m
        double ds = 0.0;
        double sf = 0.0;
        std::optional<double> k;
        bool operator==(const CorrelationDistances &) const = default;

        double at(LspIndex i) const;
        double min() const;
    };

    /// Generation constants not measured by the THz campaign. The bundled files populate them
    /// from 3GPP TR 38.901 defaults; logic never hard-codes them.
    struct SupplementalParams
    {
        double r_tau = 3.0;     // delay proportionality factor
        double zeta_db = 3.0;   // per-cluster shadowing std
        Gaussian xpr_db;        // cross-polarization ratio, dB
        Gaussian asd;           // departure azimuth spread, log10(deg)
        Gaussian zsa;           // arrival zenith spread, log10(deg)
        Gaussian zsd;           // departure zenith spread, log10(deg)
        double c_zsa_deg = 7.0; // in-cluster zenith spread of arrival
        bool operator==(const SupplementalParams &) const = default;
    };

    /// One scenario/condition column of the channel parameter table.
    struct ScenarioParamSet
    {
        std::string name;
        Scenario scenario = Scenario::IndoorOffice;
        Condition condition = Condition::LoS;
        Source source = Source::Measured;

        double carrier_frequency_ghz = 100.0;
        double ple = 2.0;
        double sigma_sf_db = 0.0;
        Gaussian ds;                // log10(s)
        Gaussian asa;               // log10(deg)
        std::optional<Gaussian> k;  // dB, LoS only

        Eigen::MatrixXd xcorr;      // (DS, ASA, SF[, K]), unit diagonal

        int n_clusters = 1;
        int n_rays = 1;
        double c_ds_ns = 0.0;
        double c_asa_deg = 0.0;
        double c_k_db = 0.0;
        CorrelationDistances corr_dist;
        std::optional<Gaussian> cluster_count_lognormal; // log10(count)
        SupplementalParams supplemental;

        bool has_k() const { return k.has_value(); }
        int n_lsp() const { return has_k() ? 4 : 3; }
        double wavelength_m() const { return speed_of_light / (carrier_frequency_ghz * 1e9); }

        bool operator==(const ScenarioParamSet &o) const;
    };

    /// Parse a parameter document (JSON text). Every set is validated; unknown keys are rejected.
    std::vector<ScenarioParamSet> load_params(const std::string &document);
    std::vector<ScenarioParamSet> load_params_file(const std::filesystem::path &file);

    /// Serialize to the same document schema `load_params` reads.
    std::string save_params(const std::vector<ScenarioParamSet> &sets);

    /// Throws ParamError on the first violated invariant.
    void validate(const ScenarioParamSet &set);

    /// Lookup by (scenario, condition); throws ParamError if absent.
    const ScenarioParamSet &select(const std::vector<ScenarioParamSet> &sets, Scenario scenario,
                                   Condition condition);

    /// Directory holding measured.json and 3gpp.json. THZ_GBSM_PARAMS_DIR overrides the
    /// location compiled into the library.
    std::filesystem::path bundled_params_dir();

    /// Bundled file for a parameter source.
    std::filesystem::path bundled_params_file(Source source);

    /// Convenience: load the bundled file for `source` and select one set.
    ScenarioParamSet bundled_set(Scenario scenario, Condition condition, Source source);

    /// Nearest correlation matrix by eigenvalue clipping. Negative eigenvalues are set to zero
    /// and the diagonal is rescaled back to one. A PSD input is returned unchanged, bit for bit.
    /// Throws std::invalid_argument on a non-square or non-symmetric input.
    template <typename Derived>
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
    nearest_psd(const Eigen::MatrixBase<Derived> &c)
    {
        using Scalar = typename Derived::Scalar;
        using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

        if (c.rows() != c.cols())
            throw std::invalid_argument("nearest_psd: matrix is not square");
        const Mat m = c;
        if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12))
            throw std::invalid_argument("nearest_psd: matrix is not symmetric");

        Eigen::SelfAdjointEigenSolver<Mat> es(m);
        if (es.eigenvalues().minCoeff() >= Scalar(0))
            return m;

        const auto clipped = es.eigenvalues().cwiseMax(Scalar(0));
        Mat b = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
        const auto d = b.diagonal().cwiseSqrt().eval();
        for (Eigen::Index i = 0; i < b.rows(); ++i)
            for (Eigen::Index j = 0; j < b.cols(); ++j)
                b(i, j) = (i == j) ? Scalar(1) : b(i, j) / (d(i) * d(j));
        return b;
    }

    /// Cross-correlation matrix that generation consumes: nearest_psd(set.xcorr).
    Eigen::MatrixXd projected_xcorr(const ScenarioParamSet &set);

    /// Lower-triangular factor L with L * L^T = c for a positive semidefinite c.
    /// Zero pivots (rank deficiency after projection) produce zero columns instead of failing.
    Eigen::MatrixXd semidefinite_cholesky(const Eigen::MatrixXd &c);

    enum class ClusterCountMode
    {
        Fixed,    // table integer
        LogNormal // draw 10^N(mu, sigma), round to nearest integer >= 1
    };

    /// Number of clusters for one drop. LogNormal mode falls back to the fixed count when the
    /// set has no lognormal law.
    int draw_cluster_count(const ScenarioParamSet &set, ClusterCountMode mode, Rng &rng);
}
