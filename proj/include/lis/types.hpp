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

#ifndef LIS_TYPES_HPP
#define LIS_TYPES_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lis
{

constexpr double infinity = std::numeric_limits<double>::infinity();

/// Carrier wavelength in meters. Strictly positive and finite.
struct Wavelength
{
    double meters;

    explicit Wavelength(double m) : meters(m)
    {
        if (!(m > 0.0) || !std::isfinite(m))
            throw std::invalid_argument("Wavelength must be positive and finite, got " + std::to_string(m));
    }
};

/// Rectangular receive surface occupying -A <= x <= A, -B <= y <= B at z = 0.
/// Either half-extent may be lis::infinity; formulas then switch to the
/// analytic limits instead of pushing huge floats through arctans.
struct SurfaceSpec
{
    double half_width_A;
    double half_height_B;

    SurfaceSpec(double A, double B) : half_width_A(A), half_height_B(B)
    {
        if (!(A > 0.0) || !(B > 0.0))
            throw std::invalid_argument("Surface half-extents must be positive");
    }

    static SurfaceSpec infinite() { return SurfaceSpec(infinity, infinity); }

    bool finite() const { return std::isfinite(half_width_A) && std::isfinite(half_height_B); }
};

/// Single-antenna transmitter at (x, y, z), z > 0, with linear transmit power.
struct Terminal
{
    double x = 0.0;
    double y = 0.0;
    double z = 1.0;
    double power_P = 1.0;

    Terminal() = default;
    Terminal(double x_, double y_, double z_, double power = 1.0) : x(x_), y(y_), z(z_), power_P(power)
    {
        if (!(z > 0.0))
            throw std::invalid_argument("Terminal must be in front of the surface (z > 0)");
        if (!(power_P >= 0.0))
            throw std::invalid_argument("Terminal power must be non-negative");
    }
};

/// Spatial noise power spectral density (linear units).
struct NoiseModel
{
    double n0;

    explicit NoiseModel(double n0_) : n0(n0_)
    {
        if (!(n0 > 0.0))
            throw std::invalid_argument("Noise PSD N0 must be positive");
    }
};

/// Thrown when an adaptive quadrature cannot reach the requested tolerance
/// within its panel budget. Carries the error actually achieved so callers
/// can decide whether the partial answer is still usable.
class budget_error : public std::runtime_error
{
  public:
    budget_error(const std::string &what, double achieved, double requested)
        : std::runtime_error(what + " (achieved error " + std::to_string(achieved) + ", requested " +
                             std::to_string(requested) + ")"),
          achieved_error(achieved), requested_tolerance(requested)
    {
    }

    double achieved_error;
    double requested_tolerance;
};

/// sin(pi x) / (pi x), with sinc(0) = 1.
inline double sinc(double x)
{
    double px = M_PI * x;
    if (std::abs(px) < 1e-6)
        return 1.0 - px * px / 6.0;
    return std::sin(px) / px;
}

} // namespace lis

#endif
