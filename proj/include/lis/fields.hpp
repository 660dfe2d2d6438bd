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

#ifndef LIS_FIELDS_HPP
#define LIS_FIELDS_HPP

#include <complex>

#include <lis/types.hpp>

namespace lis
{

/// Normalized free-space field of a terminal at (x0, y0, z0), sampled at the
/// surface point (x, y, 0):
///
///   s(x, y) = 1/(2 sqrt(pi)) * sqrt(z0) / d^(3/2) * exp(-2 pi j d / lambda),
///   d = sqrt(z0^2 + (x - x0)^2 + (y - y0)^2).
///
/// The square magnitude integrates to 1/2 over the whole plane: half of a
/// unit of transmit power reaches an infinitely large surface.
inline std::complex<double> field_amplitude(const Terminal &t, Wavelength lambda, double x, double y)
{
    double dx = x - t.x;
    double dy = y - t.y;
    double d2 = t.z * t.z + dx * dx + dy * dy;
    double d = std::sqrt(d2);
    double mag = 0.5 / std::sqrt(M_PI) * std::sqrt(t.z) / std::pow(d2, 0.75);
    double phase = -2.0 * M_PI * d / lambda.meters;
    return std::polar(mag, phase);
}

/// Fraction nu of a terminal's radiated power captured by the surface, for a
/// terminal on the central axis at height z0:
///
///   nu = (1/pi) * atan( A B / (z0 sqrt(A^2 + B^2 + z0^2)) ).
///
/// Closed under the infinite limits: A -> inf gives (1/pi) atan(B / z0),
/// both infinite give the half-plane maximum 1/2. Always in (0, 1/2].
inline double fraction_nu(const SurfaceSpec &surface, double z0)
{
    if (!(z0 > 0.0) || !std::isfinite(z0))
        throw std::invalid_argument("fraction_nu: terminal height z0 must be positive and finite");

    double A = surface.half_width_A;
    double B = surface.half_height_B;
    bool a_inf = std::isinf(A);
    bool b_inf = std::isinf(B);

    if (a_inf && b_inf)
        return 0.5;
    if (a_inf)
        return std::atan(B / z0) / M_PI;
    if (b_inf)
        return std::atan(A / z0) / M_PI;
    return std::atan(A * B / (z0 * std::sqrt(A * A + B * B + z0 * z0))) / M_PI;
}

/// Received-power comparison between a surface acting as a continuous
/// aperture and a single lossless isotropic antenna at the surface center.
struct ArrayGainComparison
{
    double nu;              ///< captured fraction for the surface
    double isotropic_gain;  ///< (lambda / (4 pi z0))^2, classic free-space point pickup
    double ratio;           ///< nu / isotropic_gain
};

inline ArrayGainComparison array_gain_comparison(const SurfaceSpec &surface, double z0, Wavelength lambda)
{
    double nu = fraction_nu(surface, z0);
    double g = lambda.meters / (4.0 * M_PI * z0);
    ArrayGainComparison cmp;
    cmp.nu = nu;
    cmp.isotropic_gain = g * g;
    cmp.ratio = nu / cmp.isotropic_gain;
    return cmp;
}

} // namespace lis

#endif
