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

#ifndef LIS_GRAM_HPP
#define LIS_GRAM_HPP

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include <lis/format.hpp>
#include <lis/parallel.hpp>
#include <lis/quadrature.hpp>

namespace lis
{

enum class GramMode
{
    Numeric,    ///< entries from adaptive field correlation integrals
    SincApprox  ///< entries from the closed-form nu * sinc(2 r / lambda) model
};

inline const char *to_string(GramMode m) { return m == GramMode::Numeric ? "numeric" : "sinc-approx"; }

inline GramMode gram_mode_from_string(std::string_view s)
{
    if (s == "numeric")
        return GramMode::Numeric;
    if (s == "sinc-approx")
        return GramMode::SincApprox;
    throw std::invalid_argument("unknown gram mode '" + std::string(s) + "' (expected numeric or sinc-approx)");
}

struct GramOptions
{
    GramMode mode = GramMode::Numeric;

    // Numeric fast path: all entries share one tensor Gauss-Legendre grid
    // (panel width <= max_panel_fraction_of_lambda * lambda, `grid_order`
    // points per panel axis). The phase of any field rotates at most
    // 2 pi / lambda per meter, so the per-panel rotation stays below
    // pi / 2 regardless of geometry and the grid converges at the same
    // rate everywhere. Falls back to per-pair adaptive integrals when the
    // grid would be too large or the terminal count too small to amortize.
    int grid_order = 6;
    std::size_t grid_node_limit = 4000000;
    std::size_t min_terminals_for_grid = 8;
};

/// Gram matrix G of a deployment: G[l,k] = sqrt(P_l P_k) * phi_lk with
/// phi_lk the field correlation over the surface. Hermitian positive
/// semi-definite by construction.
struct GramMatrix
{
    Eigen::MatrixXcd entries;
    double lambda = 0.0;
    GramMode mode = GramMode::Numeric;
    double est_entry_error = 0.0;  ///< worst per-entry quadrature estimate (numeric mode)

    int size() const { return int(entries.rows()); }
};

namespace detail
{

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double> &x, std::vector<double> &w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 64; ++iter)
        {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k)
            {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n == 1 ? 1.0 : n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15)
                break;
        }
        x[n - 1 - i] = t;
        x[i] = -t;
        double wv = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = w[n - 1 - i] = wv;
    }
}

struct GridAxis
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GridAxis panelized_axis(double lo, double hi, double max_panel, int order)
{
    int n_panels = int(std::ceil((hi - lo) / max_panel));
    if (n_panels < 1)
        n_panels = 1;
    double h = (hi - lo) / n_panels;
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    GridAxis axis;
    axis.nodes.reserve(std::size_t(n_panels) * order);
    axis.weights.reserve(std::size_t(n_panels) * order);
    for (int p = 0; p < n_panels; ++p)
    {
        double c = lo + (p + 0.5) * h;
        for (int j = 0; j < order; ++j)
        {
            axis.nodes.push_back(c + 0.5 * h * gx[j]);
            axis.weights.push_back(0.5 * h * gw[j]);
        }
    }
    return axis;
}

inline Eigen::MatrixXcd gram_correlations_grid(const std::vector<Terminal> &terminals, double A, double B,
                                               Wavelength lambda, const QuadratureConfig &cfg,
                                               const GramOptions &opt)
{
    const int K = int(terminals.size());
    double max_panel = cfg.max_panel_fraction_of_lambda * lambda.meters;
    GridAxis ax = panelized_axis(-A, A, max_panel, opt.grid_order);
    GridAxis ay = panelized_axis(-B, B, max_panel, opt.grid_order);

    const std::size_t nx = ax.nodes.size(), ny = ay.nodes.size();
    const std::size_t total = nx * ny;
    const std::size_t chunk_rows = std::max<std::size_t>(256, (32u << 20) / (16 * std::size_t(K)));

    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(K, K);
    Eigen::MatrixXcd F(chunk_rows, K);

    std::size_t done = 0;
    while (done < total)
    {
        std::size_t rows = std::min(chunk_rows, total - done);
        parallel_for(rows, [&](std::size_t r) {
            std::size_t n = done + r;
            double x = ax.nodes[n / ny];
            double y = ay.nodes[n % ny];
            double wt = std::sqrt(ax.weights[n / ny] * ay.weights[n % ny]);
            for (int k = 0; k < K; ++k)
                F(Eigen::Index(r), k) = wt * field_amplitude(terminals[k], lambda, x, y);
        });
        // rankUpdate forms u u^H; u = F^T gives phi_lk = sum_r F_rl conj(F_rk),
        // matching the s_l * conj(s_k) convention of correlation_integral().
        phi.selfadjointView<Eigen::Lower>().rankUpdate(F.topRows(Eigen::Index(rows)).transpose(), 1.0);
        done += rows;
    }
    return phi.selfadjointView<Eigen::Lower>();
}

} // namespace detail

/// Builds the Gram matrix of a deployment over a surface.
///
/// Sinc-approx mode requires every terminal at the same height z (the model
/// is only defined there) and produces a real matrix
/// sqrt(P_l P_k) * nu * sinc(2 r_lk / lambda). Numeric mode integrates the
/// fields; infinite surface extents are truncated per
/// effective_half_extent().
inline GramMatrix build_gram(const std::vector<Terminal> &terminals, const SurfaceSpec &surface, Wavelength lambda,
                             const QuadratureConfig &cfg = {}, const GramOptions &opt = {})
{
    if (terminals.empty())
        throw std::invalid_argument("build_gram: need at least one terminal");
    cfg.validate();
    if (opt.grid_order < 2 || opt.grid_order > 32)
        throw std::invalid_argument("build_gram: grid_order must lie in [2, 32]");

    const int K = int(terminals.size());
    GramMatrix g;
    g.lambda = lambda.meters;
    g.mode = opt.mode;

    if (opt.mode == GramMode::SincApprox)
    {
        double z0 = terminals[0].z;
        for (const Terminal &t : terminals)
            if (std::abs(t.z - z0) > 1e-9 * std::max(1.0, z0))
                throw std::invalid_argument("build_gram: sinc-approx mode requires a common terminal height z");
        double nu = fraction_nu(surface, z0);
        g.entries.resize(K, K);
        for (int l = 0; l < K; ++l)
            for (int k = 0; k < K; ++k)
            {
                double dx = terminals[l].x - terminals[k].x;
                double dy = terminals[l].y - terminals[k].y;
                double r = std::sqrt(dx * dx + dy * dy);
                double val = std::sqrt(terminals[l].power_P * terminals[k].power_P) * nu *
                             sinc(2.0 * r / lambda.meters);
                g.entries(l, k) = val;
            }
        g.est_entry_error = 0.0;
        return g;
    }

    double zmax = 0.0;
    for (const Terminal &t : terminals)
        zmax = std::max(zmax, t.z);
    double A = effective_half_extent(surface.half_width_A, zmax, lambda, cfg);
    double B = effective_half_extent(surface.half_height_B, zmax, lambda, cfg);
    SurfaceSpec trunc(A, B);

    double max_panel = cfg.max_panel_fraction_of_lambda * lambda.meters;
    double nodes_x = std::ceil(2.0 * A / max_panel) * opt.grid_order;
    double nodes_y = std::ceil(2.0 * B / max_panel) * opt.grid_order;
    bool grid_ok = std::size_t(terminals.size()) >= opt.min_terminals_for_grid &&
                   nodes_x * nodes_y <= double(opt.grid_node_limit);

    if (grid_ok)
    {
        Eigen::MatrixXcd phi = detail::gram_correlations_grid(terminals, A, B, lambda, cfg, opt);

        // spot-check the shared grid against the adaptive integrator
        double probe_err = 0.0;
        int probes[3][2] = {{0, 0}, {0, K - 1}, {K / 2, K - 1}};
        for (auto &pr : probes)
        {
            CorrelationValue cv = correlation_integral(terminals[pr[0]], terminals[pr[1]], trunc, lambda, cfg);
            probe_err = std::max(probe_err, std::abs(cv.value - phi(pr[0], pr[1])) + cv.est_error);
        }
        g.est_entry_error = probe_err;

        g.entries.resize(K, K);
        for (int l = 0; l < K; ++l)
            for (int k = 0; k < K; ++k)
                g.entries(l, k) = std::sqrt(terminals[l].power_P * terminals[k].power_P) * phi(l, k);
        return g;
    }

    // pairwise adaptive path
    std::vector<std::pair<int, int>> pairs;
    for (int l = 0; l < K; ++l)
        for (int k = l; k < K; ++k)
            pairs.emplace_back(l, k);

    std::vector<CorrelationValue> values(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        values[i] = correlation_integral(terminals[pairs[i].first], terminals[pairs[i].second], trunc, lambda, cfg);
    });

    g.entries.resize(K, K);
    double worst = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i)
    {
        auto [l, k] = pairs[i];
        double scale = std::sqrt(terminals[l].power_P * terminals[k].power_P);
        g.entries(l, k) = scale * values[i].value;
        if (k != l)
            g.entries(k, l) = std::conj(g.entries(l, k));
        worst = std::max(worst, values[i].est_error);
    }
    g.est_entry_error = worst;
    return g;
}

/// Eigenvalues of the Gram matrix in ascending order. Purely real matrices
/// (sinc mode) take the cheaper real-symmetric path.
inline Eigen::VectorXd gram_eigenvalues(const GramMatrix &g)
{
    if (g.size() == 0)
        throw std::invalid_argument("gram_eigenvalues: empty matrix");
    bool real_only = (g.entries.imag().array() == 0.0).all();
    if (real_only)
    {
        Eigen::MatrixXd M = g.entries.real();
        M = 0.5 * (M + M.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }
    Eigen::MatrixXcd M = 0.5 * (g.entries + g.entries.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Spatial degrees of freedom actually expressed by a deployment: the
/// number of Gram eigenvalues above `threshold` times the largest one.
struct DimensionEstimate
{
    int rank = 0;
    double threshold = 0.0;
    double max_eigenvalue = 0.0;
};

inline DimensionEstimate effective_rank(const GramMatrix &g, double threshold = 1e-3)
{
    if (!(threshold > 0.0) || !(threshold < 1.0))
        throw std::invalid_argument("effective_rank: threshold must lie in (0, 1)");
    Eigen::VectorXd ev = gram_eigenvalues(g);
    DimensionEstimate est;
    est.threshold = threshold;
    est.max_eigenvalue = ev.size() > 0 ? ev(ev.size() - 1) : 0.0;
    if (est.max_eigenvalue <= 0.0)
        return est;
    double cut = threshold * est.max_eigenvalue;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > cut)
            ++est.rank;
    return est;
}

/// Plain text serialization. First line "K lambda mode", then K*K lines
/// "i j re im" in row-major order, doubles in shortest round-trip form.
inline void write_gram_text(const GramMatrix &g, std::ostream &os)
{
    os << g.size() << ' ' << fmt_double(g.lambda) << ' ' << to_string(g.mode) << '\n';
    for (int i = 0; i < g.size(); ++i)
        for (int j = 0; j < g.size(); ++j)
            os << i << ' ' << j << ' ' << fmt_double(g.entries(i, j).real()) << ' '
               << fmt_double(g.entries(i, j).imag()) << '\n';
}

inline GramMatrix read_gram_text(std::istream &is)
{
    int K = 0;
    double lambda = 0.0;
    std::string mode;
    if (!(is >> K >> lambda >> mode))
        throw std::invalid_argument("gram text: malformed header (expected 'K lambda mode')");
    if (K < 1 || !(lambda > 0.0))
        throw std::invalid_argument("gram text: header values out of range");

    GramMatrix g;
    g.lambda = lambda;
    g.mode = gram_mode_from_string(mode);
    g.entries.resize(K, K);
    for (long n = 0; n < long(K) * K; ++n)
    {
        int i = 0, j = 0;
        double re = 0.0, im = 0.0;
        if (!(is >> i >> j >> re >> im))
            throw std::invalid_argument("gram text: truncated entry list");
        if (i < 0 || i >= K || j < 0 || j >= K)
            throw std::invalid_argument("gram text: entry index out of range");
        g.entries(i, j) = std::complex<double>(re, im);
    }
    return g;
}

} // namespace lis

#endif
