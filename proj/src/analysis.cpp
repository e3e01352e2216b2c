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

#include "thz_gbsm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace thz
{
    namespace
    {
        double checked_total(std::span<const double> power)
        {
            double total = 0.0;
            for (double p : power)
            {
                if (p < 0.0 || !std::isfinite(p))
                    throw std::invalid_argument("power values must be finite and nonnegative");
                total += p;
            }
            if (!(total > 0.0))
                throw std::domain_error("zero total power");
            return total;
        }

        cplx circular_mean(std::span<const double> azimuth_deg, std::span<const double> power, double total)
        {
            cplx mu = 0.0;
            for (std::size_t i = 0; i < power.size(); ++i)
                mu += power[i] * std::polar(1.0, azimuth_deg[i] * deg2rad);
            return mu / total;
        }

        void require_same_size(std::size_t a, std::size_t b, const char *what)
        {
            if (a != b)
                throw std::invalid_argument(std::string(what) + ": length mismatch");
        }
    }

    double Pdp::total() const { return std::accumulate(power.begin(), power.end(), 0.0); }

    Pdp synth_omni(std::span<const Pdp> directional)
    {
        if (directional.empty())
            throw std::invalid_argument("synth_omni: no directional PDPs");
        const Pdp &first = directional.front();
        Pdp out;
        out.delay0 = first.delay0;
        out.spacing = first.spacing;
        out.power.assign(first.power.size(), 0.0);
        for (const auto &d : directional)
        {
            if (d.power.size() != first.power.size() || d.delay0 != first.delay0 || d.spacing != first.spacing)
                throw std::invalid_argument("synth_omni: directional PDPs do not share a delay grid");
            for (std::size_t i = 0; i < d.power.size(); ++i)
                out.power[i] = std::max(out.power[i], d.power[i]);
        }
        return out;
    }

    Pdp threshold(const Pdp &pdp, double margin_db, double noise_floor)
    {
        if (!(margin_db > 0.0))
            throw std::invalid_argument("threshold: margin must be positive");
        const double level = noise_floor * db_to_linear(margin_db);
        Pdp out = pdp;
        bool any = false;
        for (auto &p : out.power)
        {
            if (p < level || p <= 0.0)
                p = 0.0;
            else
                any = true;
        }
        out.below_noise = !any;
        return out;
    }

    double rms_ds(std::span<const double> delay, std::span<const double> power)
    {
        require_same_size(delay.size(), power.size(), "rms_ds");
        const double total = checked_total(power);
        double mean = 0.0;
        for (std::size_t i = 0; i < power.size(); ++i)
            mean += power[i] * delay[i];
        mean /= total;
        double var = 0.0;
        for (std::size_t i = 0; i < power.size(); ++i)
            var += power[i] * (delay[i] - mean) * (delay[i] - mean);
        return std::sqrt(var / total);
    }

    double rms_ds(const Pdp &pdp)
    {
        std::vector<double> delay(pdp.power.size());
        for (std::size_t i = 0; i < delay.size(); ++i)
            delay[i] = pdp.delay(i);
        return rms_ds(delay, pdp.power);
    }

    double asa(std::span<const double> azimuth_deg, std::span<const double> power)
    {
        require_same_size(azimuth_deg.size(), power.size(), "asa");
        const double total = checked_total(power);
        // Angles are taken relative to the strongest component, so a single direction maps to
        // exactly 1 + 0j and its spread is exactly zero.
        const double ref = azimuth_deg[static_cast<std::size_t>(
            std::max_element(power.begin(), power.end()) - power.begin())];
        std::vector<cplx> r(power.size());
        cplx mu = 0.0;
        for (std::size_t i = 0; i < power.size(); ++i)
        {
            r[i] = std::polar(1.0, (azimuth_deg[i] - ref) * deg2rad);
            mu += power[i] * r[i];
        }
        mu /= total;
        double acc = 0.0;
        for (std::size_t i = 0; i < power.size(); ++i)
            acc += power[i] * std::norm(r[i] - mu);
        return std::sqrt(acc / total) * rad2deg;
    }

    double asa(const Dap &dap) { return asa(dap.azimuth, dap.power); }

    double asa_circular(const Dap &dap)
    {
        require_same_size(dap.azimuth.size(), dap.power.size(), "asa_circular");
        const double total = checked_total(dap.power);
        const double r = std::min(1.0, std::abs(circular_mean(dap.azimuth, dap.power, total)));
        if (r <= 0.0)
            return std::numeric_limits<double>::infinity();
        return std::sqrt(-2.0 * std::log(r)) * rad2deg;
    }

    KFactor k_factor(std::span<const double> power)
    {
        const double total = checked_total(power);
        const double peak = *std::max_element(power.begin(), power.end());
        const double rest = total - peak;
        if (rest <= 0.0)
            return {};
        return {10.0 * std::log10(peak / rest)};
    }

    KFactor k_factor(const Pdp &pdp) { return k_factor(pdp.power); }

    Dap dap_from_directional(std::span<const Pdp> directional)
    {
        std::map<double, double> best;
        for (const auto &d : directional)
        {
            if (!d.direction)
                throw std::invalid_argument("dap_from_directional: PDP without a direction label");
            const double p = d.total();
            auto [it, fresh] = best.emplace(d.direction->phi_rx, p);
            if (!fresh)
                it->second = std::max(it->second, p);
        }
        Dap dap;
        for (const auto &[az, p] : best)
        {
            dap.azimuth.push_back(az);
            dap.power.push_back(p);
        }
        return dap;
    }

    Sounding virtual_sounder(std::span<const Mpc> mpcs, const SounderOptions &options)
    {
        if (mpcs.empty())
            throw std::invalid_argument("virtual_sounder: no components");
        if (!(options.delay_bin > 0.0) || !(options.azimuth_bin > 0.0))
            throw std::invalid_argument("virtual_sounder: bin widths must be positive");

        double t0 = std::numeric_limits<double>::infinity(), t1 = -t0;
        for (const auto &m : mpcs)
        {
            t0 = std::min(t0, m.delay);
            t1 = std::max(t1, m.delay);
        }
        const auto n_bins = static_cast<std::size_t>(std::llround((t1 - t0) / options.delay_bin)) + 1;
        const auto n_sectors = static_cast<int>(std::lround(360.0 / options.azimuth_bin));

        Sounding out;
        out.omni.delay0 = t0;
        out.omni.spacing = options.delay_bin;
        out.omni.power.assign(n_bins, 0.0);

        std::vector<double> sector_power(static_cast<std::size_t>(n_sectors), 0.0);
        std::map<std::pair<std::size_t, int>, double> cells;
        for (const auto &m : mpcs)
        {
            const auto bin = static_cast<std::size_t>(std::llround((m.delay - t0) / options.delay_bin));
            const double az = wrap_azimuth_deg(m.aoa) + 180.0; // [0, 360)
            const int sector = std::min(n_sectors - 1, static_cast<int>(std::floor(az / options.azimuth_bin)));
            sector_power[static_cast<std::size_t>(sector)] += m.power;
            if (options.omni == OmniSynthesis::Sum)
                out.omni.power[bin] += m.power;
            else
                cells[{bin, sector}] += m.power;
        }
        for (const auto &[key, p] : cells)
            out.omni.power[key.first] = std::max(out.omni.power[key.first], p);

        for (int s = 0; s < n_sectors; ++s)
            if (sector_power[static_cast<std::size_t>(s)] > 0.0)
            {
                out.dap.azimuth.push_back((s + 0.5) * options.azimuth_bin - 180.0);
                out.dap.power.push_back(sector_power[static_cast<std::size_t>(s)]);
            }
        if (out.dap.power.empty())
            throw std::invalid_argument("virtual_sounder: zero total power");
        return out;
    }

    // ---- clustering -------------------------------------------------------

    McdScale McdScale::of(std::span<const Mpc> mpcs, double zeta)
    {
        McdScale s;
        s.zeta = zeta;
        if (mpcs.empty())
            return s;
        double lo = mpcs.front().delay, hi = lo, mean = 0.0;
        for (const auto &m : mpcs)
        {
            lo = std::min(lo, m.delay);
            hi = std::max(hi, m.delay);
            mean += m.delay;
        }
        mean /= static_cast<double>(mpcs.size());
        double var = 0.0;
        for (const auto &m : mpcs)
            var += (m.delay - mean) * (m.delay - mean);
        s.delta_tau_max = hi - lo;
        s.tau_std = std::sqrt(var / static_cast<double>(mpcs.size()));
        return s;
    }

    double McdScale::delay_weight() const
    {
        return delta_tau_max > 0.0 ? zeta * tau_std / (delta_tau_max * delta_tau_max) : 0.0;
    }

    namespace
    {
        Eigen::RowVector4d embed(const Mpc &m, double w)
        {
            Eigen::RowVector4d e;
            e.head<3>() = 0.5 * spherical_unit(m.zoa, m.aoa).transpose();
            e(3) = w * m.delay;
            return e;
        }

        struct Embedded
        {
            Eigen::MatrixXd x; // n x 4
            Eigen::VectorXd w; // power weights
        };

        Embedded embed_all(std::span<const Mpc> mpcs, double zeta)
        {
            const double dw = McdScale::of(mpcs, zeta).delay_weight();
            Embedded e;
            e.x.resize(static_cast<Eigen::Index>(mpcs.size()), 4);
            e.w.resize(static_cast<Eigen::Index>(mpcs.size()));
            for (std::size_t i = 0; i < mpcs.size(); ++i)
            {
                if (!(mpcs[i].power > 0.0))
                    throw std::invalid_argument("kpower_means: MPC powers must be positive");
                e.x.row(static_cast<Eigen::Index>(i)) = embed(mpcs[i], dw);
                e.w(static_cast<Eigen::Index>(i)) = mpcs[i].power;
            }
            return e;
        }

        std::size_t weighted_pick(const Eigen::VectorXd &weight, Rng &rng)
        {
            const double total = weight.sum();
            std::uniform_real_distribution<double> u(0.0, total);
            const double r = u(rng);
            double acc = 0.0;
            for (Eigen::Index i = 0; i < weight.size(); ++i)
            {
                acc += weight(i);
                if (r < acc)
                    return static_cast<std::size_t>(i);
            }
            return static_cast<std::size_t>(weight.size() - 1);
        }

        Eigen::MatrixXd seed_centroids(const Embedded &e, int k, Rng &rng)
        {
            Eigen::MatrixXd c(k, 4);
            c.row(0) = e.x.row(static_cast<Eigen::Index>(weighted_pick(e.w, rng)));
            Eigen::VectorXd d2 = (e.x.rowwise() - c.row(0)).rowwise().squaredNorm();
            for (int j = 1; j < k; ++j)
            {
                const Eigen::VectorXd score = e.w.cwiseProduct(d2);
                const auto pick = score.sum() > 0.0 ? weighted_pick(score, rng) : weighted_pick(e.w, rng);
                c.row(j) = e.x.row(static_cast<Eigen::Index>(pick));
                d2 = d2.cwiseMin((e.x.rowwise() - c.row(j)).rowwise().squaredNorm());
            }
            return c;
        }

        // Nearest centroid, keeping the current label on ties. Returns the objective.
        double assign(const Embedded &e, const Eigen::MatrixXd &c, std::vector<int> &labels)
        {
            double objective = 0.0;
            for (Eigen::Index i = 0; i < e.x.rows(); ++i)
            {
                int best = labels[static_cast<std::size_t>(i)];
                double best_d = best >= 0 ? (e.x.row(i) - c.row(best)).squaredNorm()
                                          : std::numeric_limits<double>::infinity();
                for (Eigen::Index j = 0; j < c.rows(); ++j)
                {
                    const double d = (e.x.row(i) - c.row(j)).squaredNorm();
                    if (d < best_d)
                    {
                        best_d = d;
                        best = static_cast<int>(j);
                    }
                }
                labels[static_cast<std::size_t>(i)] = best;
                objective += e.w(i) * best_d;
            }
            return objective;
        }

        double objective_of(const Embedded &e, const Eigen::MatrixXd &c, const std::vector<int> &labels)
        {
            double objective = 0.0;
            for (Eigen::Index i = 0; i < e.x.rows(); ++i)
                objective += e.w(i) * (e.x.row(i) - c.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
            return objective;
        }

        // Power-weighted means; an emptied cluster keeps its previous centroid.
        void update(const Embedded &e, Eigen::MatrixXd &c, const std::vector<int> &labels)
        {
            Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(c.rows(), 4);
            Eigen::VectorXd mass = Eigen::VectorXd::Zero(c.rows());
            for (Eigen::Index i = 0; i < e.x.rows(); ++i)
            {
                const int l = labels[static_cast<std::size_t>(i)];
                sum.row(l) += e.w(i) * e.x.row(i);
                mass(l) += e.w(i);
            }
            for (Eigen::Index j = 0; j < c.rows(); ++j)
                if (mass(j) > 0.0)
                    c.row(j) = sum.row(j) / mass(j);
        }

        KpmResult run_once(const Embedded &e, int k, int max_iterations, Rng &rng)
        {
            KpmResult r;
            r.centroids = seed_centroids(e, k, rng);
            r.labels.assign(static_cast<std::size_t>(e.x.rows()), -1);
            for (int it = 0; it < max_iterations; ++it)
            {
                const auto before = r.labels;
                r.trace.push_back(assign(e, r.centroids, r.labels));
                r.iterations = it + 1;
                if (it > 0 && r.labels == before)
                    break;
                update(e, r.centroids, r.labels);
                r.trace.push_back(objective_of(e, r.centroids, r.labels));
            }
            r.objective = r.trace.back();
            return r;
        }

        // Relabel clusters by first appearance so equal partitions compare equal.
        void canonicalize(KpmResult &r)
        {
            std::vector<int> map(static_cast<std::size_t>(r.centroids.rows()), -1);
            int next = 0;
            for (int &l : r.labels)
            {
                if (map[static_cast<std::size_t>(l)] < 0)
                    map[static_cast<std::size_t>(l)] = next++;
                l = map[static_cast<std::size_t>(l)];
            }
            Eigen::MatrixXd c = r.centroids;
            for (std::size_t j = 0, extra = static_cast<std::size_t>(next); j < map.size(); ++j)
            {
                const auto dest = map[j] >= 0 ? static_cast<Eigen::Index>(map[j]) : static_cast<Eigen::Index>(extra++);
                c.row(dest) = r.centroids.row(static_cast<Eigen::Index>(j));
            }
            r.centroids = c;
        }

        double calinski_harabasz(const Embedded &e, const KpmResult &r)
        {
            const Eigen::Index n = e.x.rows();
            const auto k = r.centroids.rows();
            const double total_w = e.w.sum();
            const Eigen::RowVector4d mean = (e.w.transpose() * e.x) / total_w;
            double between = 0.0;
            std::vector<double> mass(static_cast<std::size_t>(k), 0.0);
            for (Eigen::Index i = 0; i < n; ++i)
                mass[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])] += e.w(i);
            for (Eigen::Index j = 0; j < k; ++j)
                between += mass[static_cast<std::size_t>(j)] * (r.centroids.row(j) - mean).squaredNorm();
            if (r.objective <= 0.0)
                return std::numeric_limits<double>::infinity();
            return (between / static_cast<double>(k - 1)) / (r.objective / static_cast<double>(n - k));
        }
    }

    double mcd(const Mpc &a, const Mpc &b, const McdScale &scale)
    {
        const double angle = 0.5 * (spherical_unit(a.zoa, a.aoa) - spherical_unit(b.zoa, b.aoa)).norm();
        const double delay = scale.delay_weight() * std::abs(a.delay - b.delay);
        return std::hypot(angle, delay);
    }

    KpmResult kpower_means(std::span<const Mpc> mpcs, int k, const KpmOptions &options)
    {
        if (k < 1)
            throw std::invalid_argument("kpower_means: k must be >= 1");
        if (static_cast<std::size_t>(k) > mpcs.size())
            throw std::invalid_argument("kpower_means: k = " + std::to_string(k) + " exceeds the number of MPCs (" +
                                        std::to_string(mpcs.size()) + ")");
        const Embedded e = embed_all(mpcs, options.zeta);
        KpmResult best;
        best.objective = std::numeric_limits<double>::infinity();
        for (int restart = 0; restart < std::max(1, options.restarts); ++restart)
        {
            Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(restart)));
            KpmResult r = run_once(e, k, options.max_iterations, rng);
            if (r.objective < best.objective)
                best = std::move(r);
        }
        canonicalize(best);
        return best;
    }

    KpmResult kpower_means_auto(std::span<const Mpc> mpcs, int k_min, int k_max, const KpmOptions &options)
    {
        const int n = static_cast<int>(mpcs.size());
        k_min = std::max(k_min, 2);
        k_max = std::min(k_max, n - 1);
        if (k_max < k_min)
            return kpower_means(mpcs, std::min(n, 1), options);
        const Embedded e = embed_all(mpcs, options.zeta);
        const bool by_drop = options.selection == KSelection::ObjectiveDrop;
        double previous = by_drop ? kpower_means(mpcs, k_min - 1, options).objective : 0.0;
        KpmResult best;
        double best_score = -1.0;
        for (int k = k_min; k <= k_max; ++k)
        {
            KpmResult r = kpower_means(mpcs, k, options);
            double score = 0.0;
            if (by_drop)
                score = r.objective > 0.0 ? previous / r.objective : std::numeric_limits<double>::infinity();
            else
                score = calinski_harabasz(e, r);
            previous = r.objective;
            if (score > best_score)
            {
                best_score = score;
                best = std::move(r);
            }
            if (std::isinf(score))
                break; // a perfect partition: more clusters cannot improve on it
        }
        return best;
    }

    ClusterStats cluster_stats(const MpcSet &set)
    {
        if (set.labels.size() != set.mpcs.size() || set.mpcs.empty())
            throw std::invalid_argument("cluster_stats: every MPC needs a label");
        const int k = *std::max_element(set.labels.begin(), set.labels.end()) + 1;
        if (*std::min_element(set.labels.begin(), set.labels.end()) < 0)
            throw std::invalid_argument("cluster_stats: negative label");

        std::vector<std::vector<const Mpc *>> members(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < set.mpcs.size(); ++i)
            members[static_cast<std::size_t>(set.labels[i])].push_back(&set.mpcs[i]);

        ClusterStats s;
        s.count = k;
        std::vector<double> finite_k;
        for (int c = 0; c < k; ++c)
        {
            const auto &m = members[static_cast<std::size_t>(c)];
            if (m.empty())
                throw std::invalid_argument("cluster_stats: cluster " + std::to_string(c) + " is empty");
            std::vector<double> delay, power, az;
            for (const Mpc *p : m)
            {
                delay.push_back(p->delay);
                power.push_back(p->power);
                az.push_back(p->aoa);
            }
            s.c_ds.push_back(rms_ds(delay, power));
            s.c_asa.push_back(asa(az, power));
            s.c_k.push_back(k_factor(power));
            if (s.c_k.back().db)
                finite_k.push_back(*s.c_k.back().db);
        }
        s.median_c_ds = median(s.c_ds);
        s.median_c_asa = median(s.c_asa);
        if (!finite_k.empty())
            s.median_c_k_db = median(finite_k);
        return s;
    }

    // ---- statistics -------------------------------------------------------

    Gaussian fit_normal(std::span<const double> samples)
    {
        if (samples.size() < 2)
            throw std::invalid_argument("fit_normal: at least two samples are required");
        const double n = static_cast<double>(samples.size());
        const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
        double var = 0.0;
        for (double x : samples)
            var += (x - mean) * (x - mean);
        return {mean, std::sqrt(var / n)};
    }

    Gaussian fit_lognormal(std::span<const double> samples)
    {
        std::vector<double> lg(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            if (!(samples[i] > 0.0))
                throw std::invalid_argument("fit_lognormal: sample " + std::to_string(i) + " is not positive");
            lg[i] = std::log10(samples[i]);
        }
        return fit_normal(lg);
    }

    Eigen::MatrixXd cross_corr(const Eigen::MatrixXd &columns)
    {
        if (columns.rows() < 3)
            throw std::invalid_argument("cross_corr: at least three rows are required");
        const Eigen::MatrixXd centred = columns.rowwise() - columns.colwise().mean();
        const Eigen::VectorXd sd = centred.colwise().norm();
        for (Eigen::Index j = 0; j < sd.size(); ++j)
            if (!(sd(j) > 0.0))
                throw std::invalid_argument("cross_corr: column " + std::to_string(j) + " has zero variance");
        const Eigen::MatrixXd unit = centred * sd.cwiseInverse().asDiagonal();
        Eigen::MatrixXd r = unit.transpose() * unit;
        r.diagonal().setOnes();
        return r;
    }

    double correlation_distance(std::span<const double> values, double spacing)
    {
        const std::size_t n = values.size();
        if (n < 20)
            throw std::invalid_argument("correlation_distance: at least 20 positions are required");
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
        double var = 0.0;
        for (double v : values)
            var += (v - mean) * (v - mean);
        var /= static_cast<double>(n);
        if (!(var > 0.0))
            throw std::invalid_argument("correlation_distance: zero variance");

        const double target = std::exp(-1.0);
        double prev = 1.0;
        for (std::size_t lag = 1; lag <= n / 2; ++lag)
        {
            double acc = 0.0;
            for (std::size_t i = 0; i + lag < n; ++i)
                acc += (values[i] - mean) * (values[i + lag] - mean);
            const double rho = acc / static_cast<double>(n - lag) / var;
            if (rho <= target)
            {
                const double frac = (prev - target) / (prev - rho);
                return (static_cast<double>(lag - 1) + frac) * spacing;
            }
            prev = rho;
        }
        throw std::invalid_argument("correlation_distance: track too short to decorrelate");
    }

    double ks_statistic(std::vector<double> a, std::vector<double> b)
    {
        if (a.empty() || b.empty())
            throw std::invalid_argument("ks_statistic: empty sample");
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        std::size_t i = 0, j = 0;
        double d = 0.0;
        while (i < a.size() && j < b.size())
        {
            const double x = std::min(a[i], b[j]);
            while (i < a.size() && a[i] <= x)
                ++i;
            while (j < b.size() && b[j] <= x)
                ++j;
            d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
        }
        return d;
    }

    double median(std::vector<double> v)
    {
        if (v.empty())
            throw std::invalid_argument("median: empty sample");
        const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
        std::nth_element(v.begin(), mid, v.end());
        if (v.size() % 2 == 1)
            return *mid;
        return 0.5 * (*mid + *std::max_element(v.begin(), mid));
    }
}
