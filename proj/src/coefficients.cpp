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

#include "thz_gbsm/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace thz
{
    ElementPattern ElementPattern::isotropic(Eigen::Vector2d pol)
    {
        ElementPattern p;
        p.polarization = pol;
        return p;
    }

    ElementPattern ElementPattern::directional(double hpbw_deg, double zenith_deg, double azimuth_deg)
    {
        if (!(hpbw_deg > 0.0 && hpbw_deg < 180.0))
            throw std::invalid_argument("ElementPattern::directional: hpbw must lie in (0, 180) deg");
        ElementPattern p;
        p.kind = Kind::Directional;
        p.hpbw_deg = hpbw_deg;
        p.boresight_zenith_deg = zenith_deg;
        p.boresight_azimuth_deg = azimuth_deg;
        return p;
    }

    Eigen::Vector2d ElementPattern::operator()(double zenith_deg, double azimuth_deg) const
    {
        if (kind == Kind::Isotropic)
            return polarization;
        const double c = spherical_unit(zenith_deg, azimuth_deg)
                             .dot(spherical_unit(boresight_zenith_deg, boresight_azimuth_deg));
        const double q = std::log(0.5) / std::log(std::cos(0.5 * hpbw_deg * deg2rad));
        const double floor = db_to_linear(floor_db);
        const double power = c > 0.0 ? std::max(std::pow(c, q), floor) : floor;
        return std::sqrt(power) * polarization;
    }

    AntennaArray AntennaArray::single(ElementPattern pattern)
    {
        AntennaArray a;
        a.pattern = pattern;
        return a;
    }

    AntennaArray AntennaArray::ura(int rows, int cols, double spacing_m, ElementPattern pattern)
    {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("AntennaArray::ura: rows and cols must be >= 1");
        AntennaArray a;
        a.pattern = pattern;
        a.positions.resize(3, rows * cols);
        const double yc = 0.5 * (cols - 1), zc = 0.5 * (rows - 1);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                a.positions.col(r * cols + c) = Eigen::Vector3d(0.0, (c - yc) * spacing_m, (r - zc) * spacing_m);
        return a;
    }

    Eigen::Matrix<cplx, Eigen::Dynamic, 2> array_response(const AntennaArray &array, double zenith_deg,
                                                          double azimuth_deg, double wavelength)
    {
        const Eigen::Vector3d r = spherical_unit(zenith_deg, azimuth_deg);
        const Eigen::Vector2d f = array.pattern(zenith_deg, azimuth_deg);
        const Eigen::RowVectorXd proj = r.transpose() * array.positions;
        Eigen::Matrix<cplx, Eigen::Dynamic, 2> out(array.size(), 2);
        for (Eigen::Index i = 0; i < array.size(); ++i)
        {
            const cplx ph = std::polar(1.0, 2.0 * pi * proj(i) / wavelength);
            out(i, 0) = f(0) * ph;
            out(i, 1) = f(1) * ph;
        }
        return out;
    }

    namespace
    {
        Eigen::Matrix2cd polarization_matrix(const Ray &ray)
        {
            const double x = 1.0 / std::sqrt(ray.xpr);
            Eigen::Matrix2cd m;
            m << std::polar(1.0, ray.phase[pol_tt]), x * std::polar(1.0, ray.phase[pol_tp]),
                x * std::polar(1.0, ray.phase[pol_pt]), std::polar(1.0, ray.phase[pol_pp]);
            return m;
        }

        Eigen::Matrix2cd los_polarization()
        {
            Eigen::Matrix2cd m;
            m << 1.0, 0.0, 0.0, -1.0;
            return m;
        }

        cplx doppler(double zoa, double aoa, const LinkArrays &link, double t)
        {
            if (t == 0.0 || link.velocity.isZero())
                return 1.0;
            return std::polar(1.0, 2.0 * pi * spherical_unit(zoa, aoa).dot(link.velocity) * t / link.wavelength);
        }

        cplx element_coeff(const Eigen::Matrix2cd &pol, double zoa, double aoa, double zod, double aod,
                           const LinkArrays &link, Eigen::Index u, Eigen::Index s)
        {
            const Eigen::Vector2d frx = link.rx.pattern(zoa, aoa);
            const Eigen::Vector2d ftx = link.tx.pattern(zod, aod);
            const cplx g = frx.cast<cplx>().dot(pol * ftx.cast<cplx>()); // dot conjugates a real vector: no-op
            const double prx = spherical_unit(zoa, aoa).dot(link.rx.positions.col(u));
            const double ptx = spherical_unit(zod, aod).dot(link.tx.positions.col(s));
            return g * std::polar(1.0, 2.0 * pi * (prx + ptx) / link.wavelength);
        }

        // Mr x Mt contribution of one plane wave: A_rx * P * A_tx^T.
        Eigen::MatrixXcd plane_wave(const Eigen::Matrix2cd &pol, double zoa, double aoa, double zod, double aod,
                                    const LinkArrays &link)
        {
            const auto arx = array_response(link.rx, zoa, aoa, link.wavelength);
            const auto atx = array_response(link.tx, zod, aod, link.wavelength);
            return arx * pol * atx.transpose();
        }
    }

    cplx nlos_ray_coeff(const Ray &ray, const Cluster &cluster, const LinkArrays &link, Eigen::Index u,
                        Eigen::Index s, double t)
    {
        const double amp = std::sqrt(cluster.power * ray.power_fraction);
        return amp * element_coeff(polarization_matrix(ray), ray.zoa, ray.aoa, ray.zod, ray.aod, link, u, s) *
               doppler(ray.zoa, ray.aoa, link, t);
    }

    cplx los_coeff(const LinkGeometry &g, const LinkArrays &link, Eigen::Index u, Eigen::Index s, double d, double t)
    {
        if (!(d > 0.0))
            throw std::invalid_argument("los_coeff: distance must be positive");
        return std::polar(1.0, -2.0 * pi * d / link.wavelength) *
               element_coeff(los_polarization(), g.zoa, g.aoa, g.zod, g.aod, link, u, s) *
               doppler(g.zoa, g.aoa, link, t);
    }

    double ChannelRealization::tap_power(Eigen::Index u, Eigen::Index s, std::size_t t) const
    {
        double p = 0.0;
        for (const auto &tap : taps)
            p += std::norm(tap.h.at(t)(u, s));
        return p;
    }

    double ChannelRealization::path_power() const
    {
        return std::accumulate(paths.begin(), paths.end(), 0.0,
                               [](double acc, const Mpc &m) { return acc + m.power; });
    }

    std::vector<std::vector<int>> subcluster_rays(int n_rays)
    {
        static const std::vector<std::vector<int>> groups{
            {0, 1, 2, 3, 4, 5, 6, 7, 18, 19}, {8, 9, 10, 11, 16, 17}, {12, 13, 14, 15}};
        std::vector<std::vector<int>> out;
        for (const auto &g : groups)
        {
            std::vector<int> kept;
            std::copy_if(g.begin(), g.end(), std::back_inserter(kept), [&](int m) { return m < n_rays; });
            if (!kept.empty())
                out.push_back(std::move(kept));
        }
        return out;
    }

    ChannelRealization assemble_cir(const ClusterSet &cs, const LinkArrays &link, const CirOptions &options)
    {
        if (options.t_samples.empty())
            throw std::invalid_argument("assemble_cir: at least one time sample is required");

        ChannelRealization cr;
        cr.t_samples = options.t_samples;
        cr.wavelength = link.wavelength;
        cr.velocity = link.velocity;
        cr.n_rx = link.rx.size();
        cr.n_tx = link.tx.size();

        const std::size_t nt = options.t_samples.size();
        std::map<double, std::vector<Eigen::MatrixXcd>> taps;
        auto tap_at = [&](double delay) -> std::vector<Eigen::MatrixXcd> &
        {
            auto it = taps.find(delay);
            if (it == taps.end())
                it = taps.emplace(delay, std::vector<Eigen::MatrixXcd>(
                                             nt, Eigen::MatrixXcd::Zero(cr.n_rx, cr.n_tx)))
                         .first;
            return it->second;
        };

        // Sub-cluster split targets: the two strongest clusters.
        std::vector<std::size_t> order(cs.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return cs.clusters[a].power > cs.clusters[b].power; });
        std::vector<bool> split(cs.size(), false);
        if (options.mode == CirMode::Standard && cs.size() >= 2)
            split[order[0]] = split[order[1]] = true;

        const double nlos_amp = std::sqrt(cs.nlos_share());
        for (std::size_t n = 0; n < cs.size(); ++n)
        {
            const Cluster &c = cs.clusters[n];
            const int m_rays = static_cast<int>(c.rays.size());
            std::vector<std::vector<int>> groups;
            if (split[n])
                groups = subcluster_rays(m_rays);
            else
            {
                groups.emplace_back(static_cast<std::size_t>(m_rays));
                std::iota(groups.back().begin(), groups.back().end(), 0);
            }
            static constexpr double offsets[3] = {0.0, 1.28, 2.56};
            for (std::size_t g = 0; g < groups.size(); ++g)
            {
                const double delay = c.delay + offsets[g] * options.c_ds;
                auto &h = tap_at(delay);
                for (int m : groups[g])
                {
                    const Ray &r = c.rays[static_cast<std::size_t>(m)];
                    const double amp = nlos_amp * std::sqrt(c.power * r.power_fraction);
                    const Eigen::MatrixXcd w = plane_wave(polarization_matrix(r), r.zoa, r.aoa, r.zod, r.aod, link);
                    for (std::size_t t = 0; t < nt; ++t)
                        h[t] += (amp * doppler(r.zoa, r.aoa, link, options.t_samples[t])) * w;
                    cr.paths.push_back({delay, cs.nlos_share() * c.power * r.power_fraction, r.aoa, r.zoa, r.aod,
                                        r.zod});
                }
            }
        }

        if (cs.direct)
        {
            const auto &d = *cs.direct;
            const auto &g = d.geometry;
            auto &h = tap_at(d.delay);
            const cplx phase = std::polar(std::sqrt(d.share()), -2.0 * pi * g.distance_3d / link.wavelength);
            const Eigen::MatrixXcd w = plane_wave(los_polarization(), g.zoa, g.aoa, g.zod, g.aod, link);
            for (std::size_t t = 0; t < nt; ++t)
                h[t] += (phase * doppler(g.zoa, g.aoa, link, options.t_samples[t])) * w;
            cr.paths.push_back({d.delay, d.share(), g.aoa, g.zoa, g.aod, g.zod});
        }

        cr.taps.reserve(taps.size());
        for (auto &[delay, h] : taps)
            cr.taps.push_back({delay, std::move(h)});
        std::stable_sort(cr.paths.begin(), cr.paths.end(),
                         [](const Mpc &a, const Mpc &b) { return a.delay < b.delay; });
        return cr;
    }

    std::vector<Eigen::MatrixXcd> cir_to_ctf(const ChannelRealization &cr, const std::vector<double> &freqs,
                                             std::size_t t_index)
    {
        std::vector<Eigen::MatrixXcd> out(freqs.size(), Eigen::MatrixXcd::Zero(cr.n_rx, cr.n_tx));
        for (std::size_t k = 0; k < freqs.size(); ++k)
            for (const auto &tap : cr.taps)
                out[k] += std::polar(1.0, -2.0 * pi * freqs[k] * tap.delay) * tap.h.at(t_index);
        return out;
    }
}
