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

#ifndef LIS_CAPACITY_HPP
#define LIS_CAPACITY_HPP

#include <ostream>
#include <vector>

#include <lis/format.hpp>
#include <lis/gram.hpp>
#include <lis/types.hpp>

namespace lis
{

enum class Receiver
{
    Optimal,       ///< joint (log-det) processing
    MatchedFilter  ///< per-user matched filtering, interference as noise
};

inline const char *to_string(Receiver r) { return r == Receiver::Optimal ? "optimal" : "mf"; }

/// Densely deployed terminals on a line parallel to an infinitely long
/// surface: spacing delta_x, common captured fraction nu, common power.
///
/// theta = lambda / (2 delta_x) is the bandwidth of the sinc correlation
/// relative to the sampling rate; 1/theta = beta + alpha is split into its
/// integer and fractional parts. When 1/theta sits within 1e-12 of an
/// integer it is snapped exactly, so analytically integer setups keep their
/// closed-form behavior (zero interference, flat folded spectrum) despite
/// floating-point division.
struct LineConfig
{
    double lambda = 0.0;
    double delta_x = 0.0;
    double nu = 0.0;
    double n0 = 0.0;
    double power_P = 0.0;  ///< per-terminal transmit power
    double p_bar = 0.0;    ///< power per meter of line, P / delta_x

    double theta = 0.0;
    long beta = 0;
    double alpha = 0.0;

    static LineConfig from_power_density(Wavelength lambda, double delta_x, double nu, double n0, double p_bar)
    {
        if (!(p_bar >= 0.0) || !std::isfinite(p_bar))
            throw std::invalid_argument("LineConfig: power density must be non-negative");
        LineConfig c;
        c.lambda = lambda.meters;
        c.delta_x = delta_x;
        c.nu = nu;
        c.n0 = n0;
        c.p_bar = p_bar;
        c.power_P = p_bar * delta_x;
        c.finalize();
        return c;
    }

    static LineConfig from_terminal_power(Wavelength lambda, double delta_x, double nu, double n0, double P)
    {
        if (!(P >= 0.0) || !std::isfinite(P))
            throw std::invalid_argument("LineConfig: terminal power must be non-negative");
        LineConfig c;
        c.lambda = lambda.meters;
        c.delta_x = delta_x;
        c.nu = nu;
        c.n0 = n0;
        c.power_P = P;
        c.p_bar = P / delta_x;
        c.finalize();
        return c;
    }

  private:
    void finalize()
    {
        if (!(delta_x > 0.0) || !std::isfinite(delta_x))
            throw std::invalid_argument("LineConfig: delta_x must be positive and finite");
        if (!(nu > 0.0) || !(nu <= 0.5))
            throw std::invalid_argument("LineConfig: nu must lie in (0, 1/2]");
        if (!(n0 > 0.0))
            throw std::invalid_argument("LineConfig: N0 must be positive");

        theta = lambda / (2.0 * delta_x);
        double inv = 1.0 / theta;
        double n = std::round(inv);
        if (n >= 1.0 && std::abs(inv - n) <= 1e-12 * std::max(1.0, inv))
        {
            beta = long(n);
            alpha = 0.0;
        }
        else
        {
            beta = long(std::floor(inv));
            alpha = inv - double(beta);
        }
    }
};

/// Power spectral density of the received signal across the surface
/// wavenumber band, after aliasing the sinc spectrum of the terminal line
/// onto [-theta/2, theta/2) and rescaling to the unit band. Piecewise
/// constant: amplitude (beta+1) theta P nu over a fraction alpha of the
/// band and beta theta P nu over the rest.
struct FoldedPsd
{
    struct Level
    {
        double amplitude;
        double band_fraction;
    };
    std::vector<Level> levels;
    double theta = 0.0;
};

inline FoldedPsd folded_psd(const LineConfig &c)
{
    FoldedPsd psd;
    psd.theta = c.theta;
    double unit = c.theta * c.power_P * c.nu;
    if (c.alpha > 0.0)
        psd.levels.push_back({(double(c.beta) + 1.0) * unit, c.alpha});
    psd.levels.push_back({double(c.beta) * unit, 1.0 - c.alpha});
    return psd;
}

/// Capacity figure in nats/s/Hz, reported both per terminal and per meter
/// of deployed line (per_meter = per_terminal / delta_x).
struct CapacityValue
{
    double per_terminal = 0.0;
    double per_meter = 0.0;
};

/// Optimal-receiver capacity per terminal of the infinite uniform line:
/// water-less log over the two-level folded spectrum,
///
///   C = alpha log(1 + (beta+1) theta P nu / N0)
///     + (1-alpha) log(1 + beta theta P nu / N0).
inline CapacityValue capacity_1d_optimal(const LineConfig &c)
{
    double unit = c.theta * c.power_P * c.nu / c.n0;
    double C = c.alpha * std::log1p((double(c.beta) + 1.0) * unit) +
               (1.0 - c.alpha) * std::log1p(double(c.beta) * unit);
    return {C, C / c.delta_x};
}

/// Residual inter-terminal interference power seen by a matched filter on
/// the uniform line: P nu (theta^2 (beta^2 + 2 alpha beta + alpha) - 1).
/// Exactly zero whenever 1/theta is an integer (orthogonal spacing).
inline double interference_power(const LineConfig &c)
{
    double b = double(c.beta);
    double s = c.theta * c.theta * (b * b + 2.0 * c.alpha * b + c.alpha) - 1.0;
    double I = c.power_P * c.nu * s;
    return c.alpha == 0.0 ? 0.0 : I;
}

/// Matched-filter capacity per terminal, treating the residual
/// interference as additional noise.
inline CapacityValue capacity_1d_mf(const LineConfig &c)
{
    double I = interference_power(c);
    double C = std::log1p(c.power_P * c.nu / (c.n0 + I));
    return {C, C / c.delta_x};
}

/// Spatial degrees of freedom per meter offered by the line deployment:
/// 2/lambda once theta >= 1 (spacing at or below lambda/2), else the
/// terminals themselves are the bottleneck at 2 theta / lambda = 1/delta_x.
inline double dims_1d(Wavelength lambda, double theta)
{
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::invalid_argument("dims_1d: theta must be positive and finite");
    return theta >= 1.0 ? 2.0 / lambda.meters : 2.0 * theta / lambda.meters;
}

/// Spatial degrees of freedom per square meter of a planar deployment
/// front: pi / lambda^2.
inline double dims_2d(Wavelength lambda) { return M_PI / (lambda.meters * lambda.meters); }

/// Isotropic spatial PSD of the field process over a planar surface, as a
/// function of radial spatial frequency s (cycles per meter):
///
///   G(s) = (lambda / 4 pi) / sqrt(1/lambda^2 - s^2)   for s < 1/lambda,
///   G(s) = 0                                          for s > 1/lambda,
///
/// with an integrable singularity at s = 1/lambda (reported as +inf).
inline double psd_2d(double s, Wavelength lambda)
{
    if (!(s >= 0.0))
        throw std::invalid_argument("psd_2d: spatial frequency must be non-negative");
    double edge = 1.0 / lambda.meters;
    if (s > edge)
        return 0.0;
    if (s == edge)
        return infinity;
    return (lambda.meters / (4.0 * M_PI)) / std::sqrt(edge * edge - s * s);
}

/// Space-normalized capacity (nats/s/Hz per square meter) of a dense
/// planar deployment in front of an infinite surface, power density p_bar
/// per square meter. Closed form of the radial log integral over psd_2d;
/// with N = lambda p_bar / (4 pi N0),
///
///   C = (pi/lambda^2) log(1 + lambda N)
///     + pi N^2 (log(lambda N) - log(1 + lambda N)) + pi N / lambda.
inline double capacity_2d(Wavelength lambda, double p_bar, double n0)
{
    if (!(p_bar >= 0.0) || !std::isfinite(p_bar))
        throw std::invalid_argument("capacity_2d: power density must be non-negative");
    if (!(n0 > 0.0))
        throw std::invalid_argument("capacity_2d: N0 must be positive");
    if (p_bar == 0.0)
        return 0.0;
    double lam = lambda.meters;
    double N = lam * p_bar / (4.0 * M_PI * n0);
    return M_PI / (lam * lam) * std::log1p(lam * N) + M_PI * N * N * (std::log(lam * N) - std::log1p(lam * N)) +
           M_PI * N / lam;
}

/// Capacity summary for one finite deployment.
struct CapacityReport
{
    Receiver receiver = Receiver::Optimal;
    double sum = 0.0;       ///< nats/s/Hz over all terminals
    double per_user = 0.0;  ///< sum / K
    double per_volume = 0.0;  ///< sum / deployment volume, 0 when volume unknown
    double volume = 0.0;
    std::vector<double> per_user_each;  ///< individual rates (matched filter only)
};

/// Joint-processing sum capacity log det(I + G / N0), evaluated through the
/// Gram eigenvalues. Eigenvalues pushed slightly negative by finite
/// precision are clamped to zero.
inline CapacityReport sum_capacity_logdet(const GramMatrix &g, const NoiseModel &noise, double volume = 0.0)
{
    Eigen::VectorXd ev = gram_eigenvalues(g);
    CapacityReport rep;
    rep.receiver = Receiver::Optimal;
    rep.volume = volume;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        rep.sum += std::log1p(std::max(ev(i), 0.0) / noise.n0);
    rep.per_user = rep.sum / double(ev.size());
    rep.per_volume = volume > 0.0 ? rep.sum / volume : 0.0;
    return rep;
}

/// Per-user rates of the matched-filter bank: user k decodes against noise
/// N0 G_kk plus the leakage sum of |G_kl|^2 from every other terminal.
inline std::vector<double> mf_per_user_capacity(const GramMatrix &g, const NoiseModel &noise)
{
    const int K = g.size();
    std::vector<double> rates(K);
    for (int k = 0; k < K; ++k)
    {
        double gkk = g.entries(k, k).real();
        if (!(gkk > 0.0))
            throw std::invalid_argument("mf_per_user_capacity: Gram diagonal must be positive");
        double leak = 0.0;
        for (int l = 0; l < K; ++l)
            if (l != k)
                leak += std::norm(g.entries(k, l));
        rates[k] = std::log1p(gkk * gkk / (noise.n0 * gkk + leak));
    }
    return rates;
}

inline CapacityReport mf_capacity_report(const GramMatrix &g, const NoiseModel &noise, double volume = 0.0)
{
    CapacityReport rep;
    rep.receiver = Receiver::MatchedFilter;
    rep.volume = volume;
    rep.per_user_each = mf_per_user_capacity(g, noise);
    for (double r : rep.per_user_each)
        rep.sum += r;
    rep.per_user = rep.sum / double(rep.per_user_each.size());
    rep.per_volume = volume > 0.0 ? rep.sum / volume : 0.0;
    return rep;
}

/// Least-squares slope of capacity against ln(SNR) over the top decade of
/// the supplied SNR grid. The grid must reach SNR >= 1e6 so the fit sits in
/// the true high-SNR regime; the slope estimates the spatial
/// degrees-of-freedom prefactor.
template <class F>
double highsnr_slope(F &&capacity_of_snr, const std::vector<double> &snr_grid)
{
    if (snr_grid.size() < 2)
        throw std::invalid_argument("highsnr_slope: need at least two SNR points");
    double top = 0.0;
    for (double s : snr_grid)
    {
        if (!(s > 0.0))
            throw std::invalid_argument("highsnr_slope: SNR values must be positive");
        top = std::max(top, s);
    }
    if (top < 1e6)
        throw std::invalid_argument("highsnr_slope: grid must reach SNR >= 1e6 for a high-SNR fit");

    double lo = top / 10.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (double s : snr_grid)
    {
        if (s < lo)
            continue;
        double x = std::log(s);
        double y = capacity_of_snr(s);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2)
        throw std::invalid_argument("highsnr_slope: top decade of the grid holds fewer than two points");
    double denom = double(n) * sxx - sx * sx;
    if (denom == 0.0)
        throw std::invalid_argument("highsnr_slope: degenerate grid (repeated SNR)");
    return (double(n) * sxy - sx * sy) / denom;
}

/// One row of a line-deployment sweep.
struct Sweep1DRow
{
    double theta, lambda, delta_x;
    double c_opt, c_mf;
    double c_bar_opt, c_bar_mf;
};

inline Sweep1DRow sweep_row(const LineConfig &c)
{
    CapacityValue opt = capacity_1d_optimal(c);
    CapacityValue mf = capacity_1d_mf(c);
    return {c.theta, c.lambda, c.delta_x, opt.per_terminal, mf.per_terminal, opt.per_meter, mf.per_meter};
}

inline void write_sweep_1d_csv(const std::vector<Sweep1DRow> &rows, std::ostream &os)
{
    os << "theta,lambda,delta_x,c_opt,c_mf,c_bar_opt,c_bar_mf\n";
    for (const Sweep1DRow &r : rows)
        os << fmt_double(r.theta) << ',' << fmt_double(r.lambda) << ',' << fmt_double(r.delta_x) << ','
           << fmt_double(r.c_opt) << ',' << fmt_double(r.c_mf) << ',' << fmt_double(r.c_bar_opt) << ','
           << fmt_double(r.c_bar_mf) << '\n';
}

/// One row of a planar-deployment SNR sweep. `slope` is the local change
/// of c_bar_2d per unit of ln(p_bar/n0), backward-differenced against the
/// previous row (the first row copies the second's value).
struct Sweep2DRow
{
    double lambda, p_bar_over_n0, c_bar_2d, slope;
};

inline void write_sweep_2d_csv(const std::vector<Sweep2DRow> &rows, std::ostream &os)
{
    os << "lambda,p_bar_over_n0,c_bar_2d,slope\n";
    for (const Sweep2DRow &r : rows)
        os << fmt_double(r.lambda) << ',' << fmt_double(r.p_bar_over_n0) << ',' << fmt_double(r.c_bar_2d) << ','
           << fmt_double(r.slope) << '\n';
}

/// Builds an SNR sweep for the planar closed form at one wavelength.
inline std::vector<Sweep2DRow> sweep_2d(Wavelength lambda, const std::vector<double> &snr_grid, double n0 = 1.0)
{
    if (snr_grid.size() < 2)
        throw std::invalid_argument("sweep_2d: need at least two SNR points");
    std::vector<Sweep2DRow> rows;
    rows.reserve(snr_grid.size());
    for (double snr : snr_grid)
    {
        if (!(snr > 0.0))
            throw std::invalid_argument("sweep_2d: SNR values must be positive");
        rows.push_back({lambda.meters, snr, capacity_2d(lambda, snr * n0, n0), 0.0});
    }
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        double dlog = std::log(rows[i].p_bar_over_n0) - std::log(rows[i - 1].p_bar_over_n0);
        if (dlog == 0.0)
            throw std::invalid_argument("sweep_2d: repeated SNR value");
        rows[i].slope = (rows[i].c_bar_2d - rows[i - 1].c_bar_2d) / dlog;
    }
    rows[0].slope = rows[1].slope;
    return rows;
}

} // namespace lis

#endif
