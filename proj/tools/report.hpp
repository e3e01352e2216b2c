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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace thz::cli
{
    /// Bad user input (flags, files). Reported with exit code 2.
    class UsageError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Fixed-format number for CSV cells; NaN and infinities become an empty cell.
    std::string fmt(double v);

    struct Table
    {
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;

        std::string str() const;
    };

    /// Comma-separated file with a header row. Cells are trimmed; blank lines are skipped.
    struct CsvDocument
    {
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;

        std::optional<std::size_t> column(const std::string &name) const;
        /// Numeric cell; throws UsageError naming the column and the 1-based data row.
        double number(std::size_t row, std::size_t col) const;
    };

    /// Throws UsageError (prefixed with `flag`) when the file is missing, unreadable or malformed.
    CsvDocument read_csv(const std::filesystem::path &file, const std::string &flag);

    /// Hex SHA-256 of a file's bytes.
    std::string sha256_file(const std::filesystem::path &file);

    struct Manifest
    {
        std::string command;
        std::vector<std::string> arguments;
        std::string params_file;
        std::string params_sha256;
        std::uint64_t seed = 0;
        std::string version;
    };

    /// Collects the files of one run and writes them under `root` only. Names must be plain file
    /// names. finish() adds manifest.json listing every output.
    class OutputDir
    {
    public:
        explicit OutputDir(std::filesystem::path root);

        void add(const std::string &name, std::string content);
        /// Creates the directory, writes every file, then the manifest.
        void finish(const Manifest &manifest) const;

        const std::filesystem::path &root() const { return root_; }

    private:
        std::filesystem::path root_;
        std::map<std::string, std::string> files_;
    };
}
