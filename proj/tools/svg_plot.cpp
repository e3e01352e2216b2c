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

#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace thz::cli
{
    namespace
    {
        std::string num(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", v);
            return buf;
        }

        std::string tick_label(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", v);
            return buf;
        }

        std::string escape(const std::string &s)
        {
            std::string out;
            for (char c : s)
            {
                switch (c)
                {
                case '&':
                    out += "&amp;";
                    break;
                case '<':
                    out += "&lt;";
                    break;
                case '>':
                    out += "&gt;";
                    break;
                case '"':
                    out += "&quot;";
                    break;
                default:
                    out += c;
                }
            }
            return out;
        }

        // Round step of roughly `target` ticks over [lo, hi].
        double nice_step(double lo, double hi, int target)
        {
            const double raw = (hi - lo) / target;
            const double mag = std::pow(10.0, std::floor(std::log10(raw)));
            for (double m : {1.0, 2.0, 5.0, 10.0})
                if (raw <= m * mag)
                    return m * mag;
            return 10.0 * mag;
        }
    }

    std::string render_svg(const PlotSpec &plot, const std::vector<Series> &series)
    {
        const double left = 70, right = 20, top = 40, bottom = 55;
        const double pw = plot.width - left - right;
        const double ph = plot.height - top - bottom;
        auto ty = [&](double y) { return plot.log_y ? std::log10(y) : y; };
        auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!plot.log_y || y > 0); };

        double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
        for (const auto &s : series)
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
                if (usable(s.x[i], s.y[i]))
                {
                    x0 = std::min(x0, s.x[i]);
                    x1 = std::max(x1, s.x[i]);
                    y0 = std::min(y0, ty(s.y[i]));
                    y1 = std::max(y1, ty(s.y[i]));
                }
        if (!std::isfinite(x0))
        {
            x0 = 0;
            x1 = 1;
            y0 = 0;
            y1 = 1;
        }
        if (x1 == x0)
            x1 = x0 + 1;
        if (y1 == y0)
            y1 = y0 + 1;
        const double xs = nice_step(x0, x1, 8), ys = plot.log_y ? 1.0 : nice_step(y0, y1, 6);
        x0 = std::floor(x0 / xs) * xs;
        x1 = std::ceil(x1 / xs) * xs;
        y0 = std::floor(y0 / ys) * ys;
        y1 = std::ceil(y1 / ys) * ys;

        auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
        auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };
        auto py_raw = [&](double t) { return top + (1.0 - (t - y0) / (y1 - y0)) * ph; };

        std::ostringstream o;
        o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
          << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        o << "<text x=\"" << num(plot.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
          << escape(plot.title) << "</text>\n";

        for (double x = x0; x <= x1 + 1e-9 * xs; x += xs)
        {
            o << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(px(x)) << "\" y2=\""
              << num(top + ph) << "\" stroke=\"#ddd\"/>\n";
            o << "<text x=\"" << num(px(x)) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">"
              << tick_label(std::abs(x) < 1e-12 ? 0.0 : x) << "</text>\n";
        }
        for (double t = y0; t <= y1 + 1e-9 * ys; t += ys)
        {
            o << "<line x1=\"" << num(left) << "\" y1=\"" << num(py_raw(t)) << "\" x2=\"" << num(left + pw)
              << "\" y2=\"" << num(py_raw(t)) << "\" stroke=\"#ddd\"/>\n";
            const double label = plot.log_y ? std::pow(10.0, t) : (std::abs(t) < 1e-12 ? 0.0 : t);
            o << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py_raw(t) + 4) << "\" text-anchor=\"end\">"
              << tick_label(label) << "</text>\n";
        }
        o << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\""
          << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
        o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(plot.height - 12.0)
          << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
        o << "<text transform=\"translate(18," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
          << escape(plot.y_label) << "</text>\n";

        for (const auto &s : series)
        {
            std::string pts;
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
                if (usable(s.x[i], s.y[i]))
                    pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
            if (!pts.empty())
                pts.pop_back();
            o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\""
              << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << pts << "\"/>\n";
        }

        double ly = top + 14;
        for (const auto &s : series)
        {
            const double lx = left + 12;
            o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 26) << "\" y2=\""
              << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
              << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
            o << "<text x=\"" << num(lx + 32) << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
            ly += 16;
        }
        o << "</svg>\n";
        return o.str();
    }
}
