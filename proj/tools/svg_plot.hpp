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

#include <string>
#include <vector>

namespace thz::cli
{
    struct Series
    {
        std::string label;
        std::vector<double> x;
        std::vector<double> y;
        std::string color = "#1f77b4";
        bool dashed = false;
    };

    struct PlotSpec
    {
        std::string title;
        std::string x_label;
        std::string y_label;
        bool log_y = false;
        int width = 640;
        int height = 440;
    };

    /// Line plot with axes, ticks, grid and a legend. Non-finite points (and non-positive ones on
    /// a log axis) are skipped.
    std::string render_svg(const PlotSpec &plot, const std::vector<Series> &series);
}
