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

#include <stdexcept>
#include <string>

namespace beamsim
{

// Error families raised by the library. The CLI maps ConfigError/DataError
// to exit code 2 and IoError to exit code 3.

struct ConfigError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct IndexError : std::out_of_range
{
    using std::out_of_range::out_of_range;
};

struct DomainError : std::domain_error
{
    using std::domain_error::domain_error;
};

struct AssignmentError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct DataError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct StateError : std::logic_error
{
    using std::logic_error::logic_error;
};

struct NumericError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

} // namespace beamsim
