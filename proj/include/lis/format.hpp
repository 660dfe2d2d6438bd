// SPDX-License-Identifier: Apache-2.0
//
// liscap: uplink capacity analysis for large intelligent surfaces
// Copyright (C) 2026 liscap developers
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

#ifndef LIS_FORMAT_HPP
#define LIS_FORMAT_HPP

#include <charconv>
#include <cstdio>
#include <string>

namespace lis
{

/// Shortest decimal string that parses back to exactly the same double.
/// All CSV / text emitters go through here so outputs are reproducible
/// byte for byte across runs and platforms with the same FP behavior.
inline std::string fmt_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec == std::errc())
        return std::string(buf, res.ptr);
    std::snprintf(buf, sizeof(buf), "%.17g", v); // unreachable fallback
    return std::string(buf);
}

} // namespace lis

#endif
