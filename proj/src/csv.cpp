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

#include "beamsim/csv.hpp"

#include "beamsim/errors.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fstream>

namespace beamsim::csv
{

std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos)
        {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

Table read(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw IoError(fmt::format("cannot open '{}'", path.string()));
    }
    Table t;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
        {
            line.pop_back();
        }
        if (line.empty())
        {
            continue;
        }
        auto fields = split(line);
        if (!have_header)
        {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size())
        {
            throw DataError(fmt::format("{}:{}: expected {} fields, got {}", path.string(), line_no,
                                        t.header.size(), fields.size()));
        }
        t.rows.push_back(std::move(fields));
        t.line_numbers.push_back(line_no);
    }
    if (!have_header)
    {
        throw DataError(fmt::format("{}: empty file", path.string()));
    }
    return t;
}

void expect_header(const Table& t, const std::vector<std::string>& expected, const std::filesystem::path& path)
{
    if (t.header != expected)
    {
        throw DataError(fmt::format("{}: unexpected header '{}', want '{}'", path.string(),
                                    fmt::join(t.header, ","), fmt::join(expected, ",")));
    }
}

double to_double(const std::string& field, const std::filesystem::path& path, std::size_t line)
{
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end)
    {
        throw DataError(fmt::format("{}:{}: '{}' is not a number", path.string(), line, field));
    }
    return v;
}

long long to_int(const std::string& field, const std::filesystem::path& path, std::size_t line)
{
    long long v = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end)
    {
        throw DataError(fmt::format("{}:{}: '{}' is not an integer", path.string(), line, field));
    }
    return v;
}

std::string format_double(double v)
{
    return fmt::format("{}", v);
}

} // namespace beamsim::csv
