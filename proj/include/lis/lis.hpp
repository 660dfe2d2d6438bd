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

#ifndef LIS_LIS_HPP
#define LIS_LIS_HPP

#include <lis/capacity.hpp>
#include <lis/experiments.hpp>
#include <lis/fields.hpp>
#include <lis/format.hpp>
#include <lis/gram.hpp>
#include <lis/parallel.hpp>
#include <lis/quadrature.hpp>
#include <lis/rng.hpp>
#include <lis/types.hpp>

#endif
