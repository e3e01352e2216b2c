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

#include "report.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace thz::cli
{
    namespace
    {
        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        std::vector<std::string> split(const std::string &line)
        {
            std::vector<std::string> out;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                out.push_back(trim(cell));
            if (!line.empty() && line.back() == ',')
                out.emplace_back();
            return out;
        }

        std::string utc_timestamp()
        {
            const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            std::tm tm{};
            gmtime_r(&now, &tm);
            std::array<char, 32> buf{};
            std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
            return buf.data();
        }
    }

    std::string fmt(double v)
    {
        if (!std::isfinite(v))
            return {};
        std::array<char, 40> buf{};
        std::snprintf(buf.data(), buf.size(), "%.12g", v);
        return buf.data();
    }

    std::string Table::str() const
    {
        std::string out;
        auto line = [&](const std::vector<std::string> &cells) {
            for (std::size_t i = 0; i < cells.size(); ++i)
            {
                if (i)
                    out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header);
        for (const auto &r : rows)
            line(r);
        return out;
    }

    std::optional<std::size_t> CsvDocument::column(const std::string &name) const
    {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    }

    double CsvDocument::number(std::size_t row, std::size_t col) const
    {
        const auto &cell = rows.at(row).at(col);
        try
        {
            std::size_t used = 0;
            const double v = std::stod(cell, &used);
            if (used == cell.size() && std::isfinite(v))
                return v;
        }
        catch (const std::exception &)
        {
        }
        throw UsageError("column '" + header.at(col) + "', row " + std::to_string(row + 1) + ": '" + cell +
                         "' is not a finite number");
    }

    CsvDocument read_csv(const std::filesystem::path &file, const std::string &flag)
    {
        std::ifstream in(file);
        if (!in)
            throw UsageError(flag + ": cannot read '" + file.string() + "'");
        CsvDocument doc;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            if (trim(line).empty())
                continue;
            auto cells = split(line);
            if (doc.header.empty())
            {
                doc.header = std::move(cells);
                continue;
            }
            if (cells.size() != doc.header.size())
                throw UsageError(flag + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                 " cells, header has " + std::to_string(doc.header.size()));
            doc.rows.push_back(std::move(cells));
        }
        if (doc.header.empty())
            throw UsageError(flag + ": '" + file.string() + "' is empty");
        if (doc.rows.empty())
            throw UsageError(flag + ": '" + file.string() + "' has a header but no data rows");
        return doc;
    }

    std::string sha256_file(const std::filesystem::path &file)
    {
        std::ifstream in(file, std::ios::binary);
        if (!in)
            throw UsageError("cannot read '" + file.string() + "'");
        const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256 failed");
        std::string hex;
        constexpr char digits[] = "0123456789abcdef";
        for (unsigned int i = 0; i < len; ++i)
        {
            hex += digits[md[i] >> 4];
            hex += digits[md[i] & 0xF];
        }
        return hex;
    }

    OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {}

    void OutputDir::add(const std::string &name, std::string content)
    {
        const std::filesystem::path p(name);
        if (name.empty() || p.has_parent_path() || name == "." || name == ".." || name == "manifest.json")
            throw std::logic_error("invalid output name '" + name + "'");
        files_[name] = std::move(content);
    }

    void OutputDir::finish(const Manifest &manifest) const
    {
        std::error_code ec;
        std::filesystem::create_directories(root_, ec);
        if (ec || !std::filesystem::is_directory(root_))
            throw UsageError("--out: cannot create directory '" + root_.string() + "'");

        nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
        for (const auto &[name, content] : files_)
        {
            std::ofstream out(root_ / name, std::ios::binary);
            out << content;
            if (!out)
                throw std::runtime_error("failed to write '" + (root_ / name).string() + "'");
            outputs.push_back(name);
        }

        nlohmann::ordered_json j;
        j["command"] = manifest.command;
        j["arguments"] = manifest.arguments;
        j["params_file"] = manifest.params_file;
        j["params_sha256"] = manifest.params_sha256;
        j["seed"] = manifest.seed;
        j["timestamp"] = utc_timestamp();
        j["version"] = manifest.version;
        j["outputs"] = outputs;
        std::ofstream out(root_ / "manifest.json", std::ios::binary);
        out << j.dump(2) << '\n';
        if (!out)
            throw std::runtime_error("failed to write the manifest");
    }
}
