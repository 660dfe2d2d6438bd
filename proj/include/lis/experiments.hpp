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

#ifndef LIS_EXPERIMENTS_HPP
#define LIS_EXPERIMENTS_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include <lis/capacity.hpp>
#include <lis/gram.hpp>
#include <lis/parallel.hpp>
#include <lis/rng.hpp>

namespace lis
{

enum class GeometryKind
{
    Line,   ///< segment parallel to the surface x-axis at height z0
    Plane,  ///< rectangle parallel to the surface at height z0
    Cube    ///< axis-aligned box, z from z0 to z0 + extent_z
};

inline const char *to_string(GeometryKind k)
{
    switch (k)
    {
    case GeometryKind::Line:
        return "line";
    case GeometryKind::Plane:
        return "plane";
    default:
        return "cube";
    }
}

inline GeometryKind geometry_kind_from_string(std::string_view s)
{
    if (s == "line")
        return GeometryKind::Line;
    if (s == "plane")
        return GeometryKind::Plane;
    if (s == "cube")
        return GeometryKind::Cube;
    throw std::invalid_argument("unknown geometry kind '" + std::string(s) + "' (expected line, plane or cube)");
}

/// Deployment region, centered on the surface normal through the origin.
struct Geometry
{
    GeometryKind kind = GeometryKind::Line;
    double extent_x = 0.0;
    double extent_y = 0.0;  ///< plane / cube only
    double extent_z = 0.0;  ///< cube only
    double z0 = 1.0;        ///< line/plane: terminal height; cube: nearest-face height

    /// deployment measure: meters, square meters or cubic meters
    double measure() const
    {
        switch (kind)
        {
        case GeometryKind::Line:
            return extent_x;
        case GeometryKind::Plane:
            return extent_x * extent_y;
        default:
            return extent_x * extent_y * extent_z;
        }
    }

    void validate() const
    {
        if (!(z0 > 0.0))
            throw std::invalid_argument("Geometry: z0 must be positive");
        bool need_y = kind != GeometryKind::Line;
        bool need_z = kind == GeometryKind::Cube;
        if (!(extent_x > 0.0) || (need_y && !(extent_y > 0.0)) || (need_z && !(extent_z > 0.0)))
            throw std::invalid_argument("Geometry: extents must be positive for the chosen kind");
    }
};

inline Geometry line_geometry(double length, double z0 = 1.0)
{
    Geometry g;
    g.kind = GeometryKind::Line;
    g.extent_x = length;
    g.z0 = z0;
    g.validate();
    return g;
}

inline Geometry plane_geometry(double width, double height, double z0 = 1.0)
{
    Geometry g;
    g.kind = GeometryKind::Plane;
    g.extent_x = width;
    g.extent_y = height;
    g.z0 = z0;
    g.validate();
    return g;
}

inline Geometry cube_geometry(double wx, double wy, double wz, double z_near)
{
    Geometry g;
    g.kind = GeometryKind::Cube;
    g.extent_x = wx;
    g.extent_y = wy;
    g.extent_z = wz;
    g.z0 = z_near;
    g.validate();
    return g;
}

enum class PowerMode
{
    PerTerminal,  ///< every terminal transmits `power`
    PerVolume     ///< total power per unit measure is `power`; per-terminal power = power / density
};

inline const char *to_string(PowerMode m) { return m == PowerMode::PerTerminal ? "per-terminal" : "per-volume"; }

inline PowerMode power_mode_from_string(std::string_view s)
{
    if (s == "per-terminal")
        return PowerMode::PerTerminal;
    if (s == "per-volume")
        return PowerMode::PerVolume;
    throw std::invalid_argument("unknown power mode '" + std::string(s) +
                                "' (expected per-terminal or per-volume)");
}

/// Full description of one Monte-Carlo experiment: random Poisson
/// deployments in a region, capacities of both receivers per trial.
struct ExperimentConfig
{
    Geometry geometry;
    double density = 1.0;  ///< expected terminals per unit measure
    SurfaceSpec surface = SurfaceSpec::infinite();
    double lambda = 0.4;
    double n0 = 1.0;
    PowerMode power_mode = PowerMode::PerTerminal;
    double power = 1.0;
    int trials = 100;
    std::uint64_t seed = 1;
    GramOptions gram;
    QuadratureConfig quad;
    double rank_threshold = 1e-3;

    void validate() const
    {
        geometry.validate();
        if (!(density > 0.0) || !std::isfinite(density))
            throw std::invalid_argument("ExperimentConfig: density must be positive and finite");
        Wavelength check(lambda);
        (void)check;
        if (!(n0 > 0.0))
            throw std::invalid_argument("ExperimentConfig: N0 must be positive");
        if (!(power >= 0.0) || !std::isfinite(power))
            throw std::invalid_argument("ExperimentConfig: power must be non-negative");
        if (trials < 1)
            throw std::invalid_argument("ExperimentConfig: need at least one trial");
        if (!(rank_threshold > 0.0) || !(rank_threshold < 1.0))
            throw std::invalid_argument("ExperimentConfig: rank_threshold must lie in (0, 1)");
        quad.validate();
    }
};

struct Deployment
{
    std::vector<Terminal> terminals;
    double measure = 0.0;
};

/// Draws one Poisson deployment. Reproducible: the trial index selects an
/// independent substream of the base seed, and draws happen in a fixed
/// order (count, then x/y/z per terminal).
inline Deployment sample_deployment(const ExperimentConfig &cfg, int trial)
{
    cfg.validate();
    TrialRng rng(trial_seed(cfg.seed, std::uint64_t(trial)));
    Deployment dep;
    dep.measure = cfg.geometry.measure();

    long K = rng.poisson(cfg.density * dep.measure);
    double P = cfg.power_mode == PowerMode::PerTerminal ? cfg.power : cfg.power / cfg.density;

    const Geometry &geo = cfg.geometry;
    dep.terminals.reserve(std::size_t(K));
    for (long k = 0; k < K; ++k)
    {
        double x = rng.uniform(-0.5 * geo.extent_x, 0.5 * geo.extent_x);
        double y = geo.kind == GeometryKind::Line ? 0.0 : rng.uniform(-0.5 * geo.extent_y, 0.5 * geo.extent_y);
        double z = geo.kind == GeometryKind::Cube ? geo.z0 + rng.uniform(0.0, geo.extent_z) : geo.z0;
        dep.terminals.emplace_back(x, y, z, P);
    }
    return dep;
}

/// Equi-spaced deterministic variant of the line deployment: K terminals
/// at spacing delta_x, centered, all at height z0 with power P.
inline std::vector<Terminal> make_equispaced_line(int K, double delta_x, double z0, double P)
{
    if (K < 1 || !(delta_x > 0.0))
        throw std::invalid_argument("make_equispaced_line: K >= 1 and delta_x > 0 required");
    std::vector<Terminal> ts;
    ts.reserve(std::size_t(K));
    double x0 = -0.5 * double(K - 1) * delta_x;
    for (int k = 0; k < K; ++k)
        ts.emplace_back(x0 + k * delta_x, 0.0, z0, P);
    return ts;
}

/// Per-trial outcomes. c_bar_* are normalized by the deployment measure,
/// c_per_user_* by the realized terminal count.
struct TrialRow
{
    int trial = 0;
    long k = 0;
    double c_bar_opt = 0.0;
    double c_bar_mf = 0.0;
    double c_per_user_opt = 0.0;
    double c_per_user_mf = 0.0;
    int eff_rank = 0;
};

struct MetricStats
{
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation (n - 1)
};

struct ExperimentResult
{
    ExperimentConfig config;
    std::vector<TrialRow> rows;
    MetricStats k, c_bar_opt, c_bar_mf, c_per_user_opt, c_per_user_mf, eff_rank;
};

namespace detail
{
template <class Get>
MetricStats stats_over(const std::vector<TrialRow> &rows, Get get)
{
    MetricStats s;
    if (rows.empty())
        return s;
    double sum = 0.0;
    for (const TrialRow &r : rows)
        sum += get(r);
    s.mean = sum / double(rows.size());
    if (rows.size() > 1)
    {
        double ss = 0.0;
        for (const TrialRow &r : rows)
        {
            double d = get(r) - s.mean;
            ss += d * d;
        }
        s.stddev = std::sqrt(ss / double(rows.size() - 1));
    }
    return s;
}
} // namespace detail

/// Runs all trials of an experiment. One Gram eigendecomposition per trial
/// feeds the log-det capacity and the effective rank; the matched-filter
/// rates come straight from the Gram entries.
inline ExperimentResult run_experiment(const ExperimentConfig &cfg)
{
    cfg.validate();
    ExperimentResult res;
    res.config = cfg;
    res.rows.resize(std::size_t(cfg.trials));

    Wavelength lambda(cfg.lambda);
    NoiseModel noise(cfg.n0);

    parallel_for(std::size_t(cfg.trials), [&](std::size_t t) {
        TrialRow row;
        row.trial = int(t);
        Deployment dep = sample_deployment(cfg, int(t));
        row.k = long(dep.terminals.size());
        if (row.k > 0)
        {
            GramMatrix g = build_gram(dep.terminals, cfg.surface, lambda, cfg.quad, cfg.gram);
            Eigen::VectorXd ev = gram_eigenvalues(g);

            double c_opt = 0.0;
            for (Eigen::Index i = 0; i < ev.size(); ++i)
                c_opt += std::log1p(std::max(ev(i), 0.0) / noise.n0);

            double lmax = ev(ev.size() - 1);
            int rank = 0;
            if (lmax > 0.0)
                for (Eigen::Index i = 0; i < ev.size(); ++i)
                    if (ev(i) > cfg.rank_threshold * lmax)
                        ++rank;

            double c_mf = 0.0;
            for (double r : mf_per_user_capacity(g, noise))
                c_mf += r;

            row.c_bar_opt = c_opt / dep.measure;
            row.c_bar_mf = c_mf / dep.measure;
            row.c_per_user_opt = c_opt / double(row.k);
            row.c_per_user_mf = c_mf / double(row.k);
            row.eff_rank = rank;
        }
        res.rows[t] = row;
    });

    res.k = detail::stats_over(res.rows, [](const TrialRow &r) { return double(r.k); });
    res.c_bar_opt = detail::stats_over(res.rows, [](const TrialRow &r) { return r.c_bar_opt; });
    res.c_bar_mf = detail::stats_over(res.rows, [](const TrialRow &r) { return r.c_bar_mf; });
    res.c_per_user_opt = detail::stats_over(res.rows, [](const TrialRow &r) { return r.c_per_user_opt; });
    res.c_per_user_mf = detail::stats_over(res.rows, [](const TrialRow &r) { return r.c_per_user_mf; });
    res.eff_rank = detail::stats_over(res.rows, [](const TrialRow &r) { return double(r.eff_rank); });
    return res;
}

inline void write_trials_csv(const ExperimentResult &res, std::ostream &os)
{
    os << "trial,K,c_bar_opt,c_bar_mf,c_per_user_opt,c_per_user_mf,eff_rank\n";
    for (const TrialRow &r : res.rows)
        os << r.trial << ',' << r.k << ',' << fmt_double(r.c_bar_opt) << ',' << fmt_double(r.c_bar_mf) << ','
           << fmt_double(r.c_per_user_opt) << ',' << fmt_double(r.c_per_user_mf) << ',' << r.eff_rank << '\n';
}

namespace detail
{
inline nlohmann::ordered_json extent_or_inf(double v)
{
    if (std::isinf(v))
        return "inf";
    return v;
}
} // namespace detail

inline nlohmann::ordered_json config_json(const ExperimentConfig &cfg)
{
    nlohmann::ordered_json j;
    j["geometry"] = {{"kind", to_string(cfg.geometry.kind)},
                     {"extent_x", cfg.geometry.extent_x},
                     {"extent_y", cfg.geometry.extent_y},
                     {"extent_z", cfg.geometry.extent_z},
                     {"z0", cfg.geometry.z0}};
    j["surface"] = {{"half_width_A", detail::extent_or_inf(cfg.surface.half_width_A)},
                    {"half_height_B", detail::extent_or_inf(cfg.surface.half_height_B)}};
    j["lambda"] = cfg.lambda;
    j["n0"] = cfg.n0;
    j["power_mode"] = to_string(cfg.power_mode);
    j["power"] = cfg.power;
    j["density"] = cfg.density;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["gram_mode"] = to_string(cfg.gram.mode);
    j["rank_threshold"] = cfg.rank_threshold;
    j["quadrature"] = {{"rel_tol", cfg.quad.rel_tol},
                       {"max_panel_fraction_of_lambda", cfg.quad.max_panel_fraction_of_lambda},
                       {"line_truncation_tol", cfg.quad.line_truncation_tol},
                       {"panel_budget", cfg.quad.panel_budget},
                       {"infinite_extent_factor", cfg.quad.infinite_extent_factor}};
    return j;
}

inline nlohmann::ordered_json summary_json(const ExperimentResult &res)
{
    auto stat = [](const MetricStats &s) {
        return nlohmann::ordered_json{{"mean", s.mean}, {"stddev", s.stddev}};
    };
    nlohmann::ordered_json j;
    j["config"] = config_json(res.config);
    j["metrics"] = {{"k", stat(res.k)},
                    {"c_bar_opt", stat(res.c_bar_opt)},
                    {"c_bar_mf", stat(res.c_bar_mf)},
                    {"c_per_user_opt", stat(res.c_per_user_opt)},
                    {"c_per_user_mf", stat(res.c_per_user_mf)},
                    {"eff_rank", stat(res.eff_rank)}};
    return j;
}

/// Mean metrics of several experiment runs indexed by terminal density.
inline void write_density_summary_csv(const std::vector<std::pair<double, ExperimentResult>> &runs,
                                      std::ostream &os)
{
    os << "density,mean_k,mean_c_bar_opt,std_c_bar_opt,mean_c_bar_mf,std_c_bar_mf,"
          "mean_c_per_user_opt,mean_c_per_user_mf,mean_eff_rank\n";
    for (const auto &[density, res] : runs)
        os << fmt_double(density) << ',' << fmt_double(res.k.mean) << ',' << fmt_double(res.c_bar_opt.mean) << ','
           << fmt_double(res.c_bar_opt.stddev) << ',' << fmt_double(res.c_bar_mf.mean) << ','
           << fmt_double(res.c_bar_mf.stddev) << ',' << fmt_double(res.c_per_user_opt.mean) << ','
           << fmt_double(res.c_per_user_mf.mean) << ',' << fmt_double(res.eff_rank.mean) << '\n';
}

/// A named, ready-to-run study: either a deterministic closed-form sweep
/// of the line formulas, or a Monte-Carlo density sweep.
struct FigurePreset
{
    enum class Kind
    {
        LineSweep,
        MonteCarloDensity
    };

    std::string name;
    Kind kind = Kind::LineSweep;

    std::vector<LineConfig> sweep;  ///< LineSweep: ordered rows

    ExperimentConfig base;           ///< MonteCarloDensity: config template
    std::vector<double> densities;   ///< MonteCarloDensity: density grid
};

namespace detail
{
// Linear grid with a set of exact values merged in (replacing their nearest
// neighbors), so sweeps hit analytically special points dead-on.
inline std::vector<double> grid_with_exact(double lo, double hi, int n, const std::vector<double> &exact)
{
    std::vector<double> g;
    g.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i)
        g.push_back(lo + (hi - lo) * double(i) / double(n - 1));
    for (double e : exact)
    {
        if (e < lo || e > hi)
            continue;
        std::size_t nearest = 0;
        double best = infinity;
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            double d = std::abs(g[i] - e);
            if (d < best)
            {
                best = d;
                nearest = i;
            }
        }
        g[nearest] = e;
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}
} // namespace detail

/// Named studies mirroring the reference sweeps. Sweep grids and
/// Monte-Carlo defaults (z0, trial counts, density lists) are this
/// library's documented choices; physical parameters (nu, N0, powers,
/// wavelengths, geometries and surface sizes) follow the named setups.
inline FigurePreset figure_preset(const std::string &name)
{
    FigurePreset p;
    p.name = name;

    if (name == "fig4")
    {
        // theta sweep of the optimal receiver at nu=0.1, N0=1, p_bar=10,
        // one curve per wavelength; shows the lambda -> 0 limit of 1
        p.kind = FigurePreset::Kind::LineSweep;
        std::vector<double> thetas = detail::grid_with_exact(0.05, 5.0, 500, {0.2, 0.25, 1.0 / 3.0, 0.5, 1.0});
        for (double lam : {0.001, 0.01, 0.1, 0.5})
            for (double th : thetas)
                p.sweep.push_back(
                    LineConfig::from_power_density(Wavelength(lam), lam / (2.0 * th), 0.1, 1.0, 10.0));
        return p;
    }
    if (name == "fig6")
    {
        // wavelength sweep at fixed spacing 0.25 m, nu=0.5, N0=0.05,
        // p_bar=40; optimal and MF coincide at lambda = 0.5/n
        p.kind = FigurePreset::Kind::LineSweep;
        std::vector<double> exact;
        for (int n = 1; n <= 25; ++n)
            exact.push_back(0.5 / double(n));
        std::vector<double> lams = detail::grid_with_exact(0.02, 1.25, 1000, exact);
        for (double lam : lams)
            p.sweep.push_back(LineConfig::from_power_density(Wavelength(lam), 0.25, 0.5, 0.05, 40.0));
        return p;
    }
    if (name == "fig7")
    {
        // spacing sweep at nu=0.5, N0=0.05, p_bar=40 for three wavelengths;
        // MF peaks sit at spacings n lambda / 2
        p.kind = FigurePreset::Kind::LineSweep;
        for (double lam : {0.2, 0.3, 0.4})
        {
            std::vector<double> exact;
            for (int n = 1; n * lam / 2.0 <= 1.2; ++n)
                exact.push_back(double(n) * lam / 2.0);
            std::vector<double> dxs = detail::grid_with_exact(0.02, 1.2, 1000, exact);
            for (double dx : dxs)
                p.sweep.push_back(LineConfig::from_power_density(Wavelength(lam), dx, 0.5, 0.05, 40.0));
        }
        return p;
    }
    if (name == "fig8")
    {
        // random line deployments, 10 m, infinite surface: normalized
        // capacity vs density, saturating at density 2/lambda = 10
        p.kind = FigurePreset::Kind::MonteCarloDensity;
        p.base.geometry = line_geometry(10.0, 1.0);
        p.base.surface = SurfaceSpec::infinite();
        p.base.lambda = 0.2;
        p.base.n0 = 1.0;
        p.base.power_mode = PowerMode::PerVolume;
        p.base.power = 10.0;
        p.base.gram.mode = GramMode::SincApprox;
        p.base.trials = 100;
        p.base.seed = 1;
        p.densities = {1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 15.0, 20.0, 30.0, 40.0};
        return p;
    }
    if (name == "fig9")
    {
        // random plane deployments, 20 m x 20 m, infinite surface. The
        // default density list stays well below the saturation density
        // pi/lambda^2 = 19.6 so the preset finishes in seconds; push
        // --densities higher (or shrink the plane) to chase saturation.
        p.kind = FigurePreset::Kind::MonteCarloDensity;
        p.base.geometry = plane_geometry(20.0, 20.0, 1.0);
        p.base.surface = SurfaceSpec::infinite();
        p.base.lambda = 0.4;
        p.base.n0 = 1.0;
        p.base.power_mode = PowerMode::PerVolume;
        p.base.power = 10.0;
        p.base.gram.mode = GramMode::SincApprox;
        p.base.trials = 100;
        p.base.seed = 1;
        p.densities = {0.25, 0.5, 1.0, 2.0};
        return p;
    }
    if (name == "fig11")
    {
        // random deployments in a 4x4x4 m cube in front of a finite
        // 4 m x 2 m surface (half-extents A=2, B=1), numeric Gram;
        // per-terminal power 10. Density 0.5..5 spans E[K] = 32..320.
        p.kind = FigurePreset::Kind::MonteCarloDensity;
        p.base.geometry = cube_geometry(4.0, 4.0, 4.0, 0.2);
        p.base.surface = SurfaceSpec(2.0, 1.0);
        p.base.lambda = 0.5;
        p.base.n0 = 1.0;
        p.base.power_mode = PowerMode::PerTerminal;
        p.base.power = 10.0;
        p.base.gram.mode = GramMode::Numeric;
        p.base.trials = 10;
        p.base.seed = 1;
        p.densities = {0.5, 1.0, 2.0, 5.0};
        return p;
    }
    throw std::invalid_argument("unknown preset '" + name +
                                "' (expected fig4, fig6, fig7, fig8, fig9 or fig11)");
}

} // namespace lis

#endif
