// SPDX-License-Identifier: Apache-2.0
//
// beamsim: two-step beam management simulator for mm-wave downlinks
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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace beamsim::csv
{

/// Rows of a comma-separated file with a mandatory header line. No quoting:
/// every format in this project is purely numeric.
struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based source line of each row, for diagnostics.
    std::vector<std::size_t> line_numbers;
};

std::vector<std::string> split(std::string_view line);

/// Throws IoError when the file cannot be opened, DataError when it is empty
/// or a row has a different field count than the header.
Table read(const std::filesystem::path& path);

/// Throws DataError unless the header equals `expected` exactly.
void expect_header(const Table& t, const std::vector<std::string>& expected, const std::filesystem::path& path);

double to_double(const std::string& field, const std::filesystem::path& path, std::size_t line);
long long to_int(const std::string& field, const std::filesystem::path& path, std::size_t line);

/// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v);

} // namespace beamsim::csv
