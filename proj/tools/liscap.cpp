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
//
// liscap — command line front end.
//
// Subcommands: sinc-audit | gram | capacity-1d | capacity-2d | dims |
//              simulate | preset
//
// Every subcommand prints a JSON summary to stdout that echoes its fully
// resolved configuration (defaults, config-file values and flags merged,
// flags winning), so runs are self-describing. All file output is
// deterministic for a fixed invocation and seed. Exit codes: 0 success,
// 2 usage or validation error, 3 quadrature budget exhausted, 4 I/O
// failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <lis/lis.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace
{

struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path &path)
{
    if (path.has_parent_path())
    {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec)
            throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot open output file: " + path.string());
    return os;
}

void finish_output(std::ofstream &os, const fs::path &path)
{
    os.flush();
    if (!os)
        throw IoError("write failure on: " + path.string());
}

// Flat JSON config file merged under the CLI flags: defaults < file < flag.
// Keys are the long option names with dashes replaced by underscores; keys
// no option of the subcommand claims are rejected.
class ConfigMerge
{
  public:
    void load(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw IoError("cannot open config file: " + path);
        json parsed = json::parse(is, nullptr, true, true);
        if (!parsed.is_object())
            throw std::invalid_argument("config file must hold a flat JSON object");
        data_ = std::move(parsed);
    }

    template <class T>
    void apply(const CLI::Option *opt, const std::string &key, T &var)
    {
        known_.insert(key);
        if (!data_.contains(key))
            return;
        if (opt != nullptr && opt->count() > 0)
            return; // flag wins
        var = data_.at(key).get<T>();
    }

    // string options that also accept bare numbers in the file ("inf" extents)
    void apply_numeric_or_string(const CLI::Option *opt, const std::string &key, std::string &var)
    {
        known_.insert(key);
        if (!data_.contains(key))
            return;
        if (opt != nullptr && opt->count() > 0)
            return;
        const json &v = data_.at(key);
        var = v.is_string() ? v.get<std::string>() : lis::fmt_double(v.get<double>());
    }

    void reject_unknown() const
    {
        for (auto it = data_.begin(); it != data_.end(); ++it)
            if (!known_.count(it.key()))
                throw std::invalid_argument("unknown config key '" + it.key() + "'");
    }

  private:
    json data_ = json::object();
    std::set<std::string> known_;
};

double parse_extent(const std::string &s)
{
    if (s == "inf" || s == "INF" || s == "infinity")
        return lis::infinity;
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size())
        throw std::invalid_argument("cannot parse surface extent '" + s + "'");
    return v;
}

struct Range
{
    double lo = 0.0, hi = 0.0;
    int n = 0;
};

Range parse_range(const std::string &s)
{
    Range r;
    char c1 = 0, c2 = 0;
    std::istringstream is(s);
    if (!(is >> r.lo >> c1 >> r.hi >> c2 >> r.n) || c1 != ':' || c2 != ':' || !(is >> std::ws).eof())
        throw std::invalid_argument("range must have the form lo:hi:count, got '" + s + "'");
    if (r.n < 2 || !(r.hi > r.lo))
        throw std::invalid_argument("range needs hi > lo and count >= 2");
    return r;
}

std::vector<double> parse_double_list(const std::string &s)
{
    std::vector<double> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ','))
    {
        if (item.empty())
            continue;
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size())
            throw std::invalid_argument("cannot parse number '" + item + "' in list");
    }
    if (out.empty())
        throw std::invalid_argument("expected a comma-separated list of numbers, got '" + s + "'");
    return out;
}

std::vector<lis::Terminal> read_terminals(const fs::path &path)
{
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open terminals file: " + path.string());
    std::vector<lis::Terminal> ts;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos)
            line.erase(pos);
        for (char &c : line)
            if (c == ',' || c == '\t')
                c = ' ';
        std::istringstream ls(line);
        double x, y, z;
        if (!(ls >> x))
            continue; // blank line
        if (!(ls >> y >> z))
            throw std::invalid_argument("terminals file line " + std::to_string(lineno) +
                                        ": expected 'x y z [power]'");
        double p = 1.0;
        ls >> p;
        std::string extra;
        if (ls >> extra)
            throw std::invalid_argument("terminals file line " + std::to_string(lineno) + ": trailing tokens");
        ts.emplace_back(x, y, z, p);
    }
    if (ts.empty())
        throw std::invalid_argument("terminals file holds no terminals: " + path.string());
    return ts;
}

// --- shared option blocks ---------------------------------------------

struct CommonFlags
{
    std::string config_path;
    unsigned threads = 0;
    CLI::Option *o_threads = nullptr;

    void attach(CLI::App *cmd)
    {
        cmd->add_option("--config", config_path, "Flat JSON config file (flags override file values)");
        o_threads = cmd->add_option("--threads", threads, "Cap worker threads (default: LIS_THREADS or hardware)");
    }

    ConfigMerge merge_begin() const
    {
        ConfigMerge m;
        if (!config_path.empty())
            m.load(config_path);
        return m;
    }

    void merge(ConfigMerge &m)
    {
        m.apply(o_threads, "threads", threads);
        if (threads > 0)
            lis::set_thread_cap(threads);
    }

    unsigned resolved_threads() const { return threads > 0 ? threads : lis::thread_cap(); }
};

struct QuadFlags
{
    double rel_tol = 1e-8;
    double panel_fraction = 0.125;
    double truncation_tol = 1e-9;
    std::uint64_t panel_budget = 250000;
    double extent_factor = 50.0;
    CLI::Option *o_rel = nullptr, *o_frac = nullptr, *o_trunc = nullptr, *o_budget = nullptr, *o_ext = nullptr;

    void attach(CLI::App *cmd)
    {
        o_rel = cmd->add_option("--rel-tol", rel_tol, "Quadrature relative tolerance");
        o_frac = cmd->add_option("--panel-fraction", panel_fraction,
                                 "Max panel width as a fraction of lambda at full oscillation rate");
        o_trunc = cmd->add_option("--truncation-tol", truncation_tol, "Line-integral tail truncation tolerance");
        o_budget = cmd->add_option("--panel-budget", panel_budget, "Max panels per adaptive integral");
        o_ext = cmd->add_option("--extent-factor", extent_factor,
                                "Half-extent, in units of max(z, lambda), replacing infinite surface dims");
    }

    void merge(ConfigMerge &m)
    {
        m.apply(o_rel, "rel_tol", rel_tol);
        m.apply(o_frac, "panel_fraction", panel_fraction);
        m.apply(o_trunc, "truncation_tol", truncation_tol);
        m.apply(o_budget, "panel_budget", panel_budget);
        m.apply(o_ext, "extent_factor", extent_factor);
    }

    lis::QuadratureConfig to_config() const
    {
        lis::QuadratureConfig q;
        q.rel_tol = rel_tol;
        q.max_panel_fraction_of_lambda = panel_fraction;
        q.line_truncation_tol = truncation_tol;
        q.panel_budget = std::size_t(panel_budget);
        q.infinite_extent_factor = extent_factor;
        q.validate();
        return q;
    }

    ordered_json to_json() const
    {
        return {{"rel_tol", rel_tol},
                {"panel_fraction", panel_fraction},
                {"truncation_tol", truncation_tol},
                {"panel_budget", panel_budget},
                {"extent_factor", extent_factor}};
    }
};

// one line: greppable, and still a complete JSON record
void emit(const ordered_json &j) { std::cout << j.dump() << '\n'; }

ordered_json json_or_null(const std::string &s)
{
    if (s.empty())
        return nullptr;
    return s;
}

// --- sinc-audit ---------------------------------------------------------

struct SincAuditCmd
{
    CommonFlags common;
    QuadFlags quad;
    double z = 2.0, lambda = 0.4, dx_min = 0.0, dx_max = 2.0;
    int points = 801;
    std::string out;
    CLI::Option *o_z = nullptr, *o_lam = nullptr, *o_min = nullptr, *o_max = nullptr, *o_pts = nullptr,
                *o_out = nullptr;

    void attach(CLI::App *cmd)
    {
        o_z = cmd->add_option("--z", z, "Terminal height above the surface [m]");
        o_lam = cmd->add_option("--lambda", lambda, "Wavelength [m]");
        o_min = cmd->add_option("--dx-min", dx_min, "Smallest audited spacing [m]");
        o_max = cmd->add_option("--dx-max", dx_max, "Largest audited spacing [m]");
        o_pts = cmd->add_option("--points", points, "Grid size");
        o_out = cmd->add_option("--out", out, "CSV output path (delta_x,numeric_value,sinc_value,abs_error)");
        common.attach(cmd);
        quad.attach(cmd);
    }

    void run()
    {
        ConfigMerge m = common.merge_begin();
        m.apply(o_z, "z", z);
        m.apply(o_lam, "lambda", lambda);
        m.apply(o_min, "dx_min", dx_min);
        m.apply(o_max, "dx_max", dx_max);
        m.apply(o_pts, "points", points);
        m.apply(o_out, "out", out);
        quad.merge(m);
        common.merge(m);
        m.reject_unknown();

        if (points < 2 || !(dx_max > dx_min) || !(dx_min >= 0.0))
            throw std::invalid_argument("sinc-audit: need points >= 2 and 0 <= dx_min < dx_max");

        std::vector<double> grid;
        grid.reserve(std::size_t(points));
        for (int i = 0; i < points; ++i)
            grid.push_back(dx_min + (dx_max - dx_min) * double(i) / double(points - 1));

        lis::AuditReport rep = lis::approximation_audit(z, lis::Wavelength(lambda), grid, quad.to_config());

        if (!out.empty())
        {
            std::ofstream os = open_output(out);
            lis::write_audit_csv(rep, os);
            finish_output(os, out);
        }

        ordered_json nulls = ordered_json::array();
        for (const auto &n : rep.nulls)
            nulls.push_back({{"located", n.located}, {"nearest_multiple", n.nearest_multiple}, {"offset", n.offset}});

        emit({{"command", "sinc-audit"},
              {"config",
               {{"z", z},
                {"lambda", lambda},
                {"dx_min", dx_min},
                {"dx_max", dx_max},
                {"points", points},
                {"threads", common.resolved_threads()},
                {"quadrature", quad.to_json()}}},
              {"results",
               {{"peak", rep.peak},
                {"max_abs_deviation", rep.max_abs_deviation},
                {"max_rel_deviation", rep.max_rel_deviation},
                {"rms_rel_deviation", rep.rms_rel_deviation},
                {"max_est_error", rep.max_est_error},
                {"nulls", nulls}}},
              {"outputs", {{"csv", json_or_null(out)}}}});
    }
};

// --- gram ---------------------------------------------------------------

struct GramCmd
{
    CommonFlags common;
    QuadFlags quad;
    std::string terminals_path;
    std::string surface_a = "inf", surface_b = "inf";
    double lambda = 0.4;
    std::string mode = "numeric";
    double rank_threshold = 1e-3;
    int grid_order = 6;
    std::string out;
    CLI::Option *o_terms = nullptr, *o_a = nullptr, *o_b = nullptr, *o_lam = nullptr, *o_mode = nullptr,
                *o_rank = nullptr, *o_order = nullptr, *o_out = nullptr;

    void attach(CLI::App *cmd)
    {
        o_terms = cmd->add_option("--terminals", terminals_path, "Terminal list file: lines 'x y z [power]'")
                      ->required();
        o_a = cmd->add_option("--surface-a", surface_a, "Surface half-width A [m] or 'inf'");
        o_b = cmd->add_option("--surface-b", surface_b, "Surface half-height B [m] or 'inf'");
        o_lam = cmd->add_option("--lambda", lambda, "Wavelength [m]");
        o_mode = cmd->add_option("--mode", mode, "Gram mode: numeric or sinc-approx");
        o_rank = cmd->add_option("--rank-threshold", rank_threshold, "Relative eigenvalue cut for effective rank");
        o_order = cmd->add_option("--grid-order", grid_order, "Gauss-Legendre order per panel axis (numeric grid)");
        o_out = cmd->add_option("--out", out, "Gram text output path ('K lambda mode' header, 'i j re im' rows)");
        common.attach(cmd);
        quad.attach(cmd);
    }

    void run()
    {
        ConfigMerge m = common.merge_begin();
        m.apply(o_terms, "terminals", terminals_path);
        m.apply_numeric_or_string(o_a, "surface_a", surface_a);
        m.apply_numeric_or_string(o_b, "surface_b", surface_b);
        m.apply(o_lam, "lambda", lambda);
        m.apply(o_mode, "mode", mode);
        m.apply(o_rank, "rank_threshold", rank_threshold);
        m.apply(o_order, "grid_order", grid_order);
        m.apply(o_out, "out", out);
        quad.merge(m);
        common.merge(m);
        m.reject_unknown();

        std::vector<lis::Terminal> ts = read_terminals(terminals_path);
        lis::SurfaceSpec surf(parse_extent(surface_a), parse_extent(surface_b));
        lis::GramOptions gopt;
        gopt.mode = lis::gram_mode_from_string(mode);
        gopt.grid_order = grid_order;

        lis::GramMatrix g = lis::build_gram(ts, surf, lis::Wavelength(lambda), quad.to_config(), gopt);
        Eigen::VectorXd ev = lis::gram_eigenvalues(g);
        lis::DimensionEstimate rank = lis::effective_rank(g, rank_threshold);

        if (!out.empty())
        {
            std::ofstream os = open_output(out);
            lis::write_gram_text(g, os);
            finish_output(os, out);
        }

        emit({{"command", "gram"},
              {"config",
               {{"terminals", terminals_path},
                {"surface_a", surface_a},
                {"surface_b", surface_b},
                {"lambda", lambda},
                {"mode", mode},
                {"rank_threshold", rank_threshold},
                {"grid_order", grid_order},
                {"threads", common.resolved_threads()},
                {"quadrature", quad.to_json()}}},
              {"results",
               {{"k", g.size()},
                {"est_entry_error", g.est_entry_error},
                {"min_eigenvalue", ev(0)},
                {"max_eigenvalue", ev(ev.size() - 1)},
                {"effective_rank", rank.rank}}},
              {"outputs", {{"gram", json_or_null(out)}}}});
    }
};

// --- capacity-1d ----------------------------------------------------------

struct Capacity1DCmd
{
    CommonFlags common;
    // NaN marks "not provided" so config-file values count as provided too
    double lambda = 0.4, delta_x = 0.0, theta = 0.0, nu = 0.5, n0 = 1.0;
    double p = std::numeric_limits<double>::quiet_NaN();
    double p_bar = std::numeric_limits<double>::quiet_NaN();
    std::string sweep_theta, sweep_dx, out;
    CLI::Option *o_lam = nullptr, *o_dx = nullptr, *o_th = nullptr, *o_nu = nullptr, *o_n0 = nullptr,
                *o_p = nullptr, *o_pbar = nullptr, *o_sw_th = nullptr, *o_sw_dx = nullptr, *o_out = nullptr;

    void attach(CLI::App *cmd)
    {
        o_lam = cmd->add_option("--lambda", lambda, "Wavelength [m]");
        o_dx = cmd->add_option("--delta-x", delta_x, "Terminal spacing [m]");
        o_th = cmd->add_option("--theta", theta, "Normalized bandwidth lambda/(2 delta_x)");
        o_nu = cmd->add_option("--nu", nu, "Captured power fraction, in (0, 1/2]");
        o_n0 = cmd->add_option("--n0", n0, "Noise spatial PSD");
        o_p = cmd->add_option("--p", p, "Per-terminal power (alternative to --p-bar)");
        o_pbar = cmd->add_option("--p-bar,--pbar", p_bar, "Power per meter of line");
        o_sw_th = cmd->add_option("--sweep-theta", sweep_theta, "Sweep theta over lo:hi:count (CSV to --out)");
        o_sw_dx = cmd->add_option("--sweep-dx", sweep_dx, "Sweep delta_x over lo:hi:count (CSV to --out)");
        o_out = cmd->add_option("--out", out, "Sweep CSV output path");
        common.attach(cmd);
    }

    lis::LineConfig make_config(double dx) const
    {
        if (!std::isnan(p))
            return lis::LineConfig::from_terminal_power(lis::Wavelength(lambda), dx, nu, n0, p);
        return lis::LineConfig::from_power_density(lis::Wavelength(lambda), dx, nu, n0, p_bar);
    }

    void run()
    {
        ConfigMerge m = common.merge_begin();
        m.apply(o_lam, "lambda", lambda);
        m.apply(o_dx, "delta_x", delta_x);
        m.apply(o_th, "theta", theta);
        m.apply(o_nu, "nu", nu);
        m.apply(o_n0, "n0", n0);
        m.apply(o_p, "p", p);
        m.apply(o_pbar, "p_bar", p_bar);
        m.apply(o_sw_th, "sweep_theta", sweep_theta);
        m.apply(o_sw_dx, "sweep_dx", sweep_dx);
        m.apply(o_out, "out", out);
        common.merge(m);
        m.reject_unknown();

        bool has_dx = delta_x > 0.0, has_theta = theta > 0.0;
        if (!std::isnan(p) && !std::isnan(p_bar))
            throw std::invalid_argument("capacity-1d: give --p or --p-bar, not both");
        if (std::isnan(p_bar))
            p_bar = 10.0;

        if (!sweep_theta.empty() || !sweep_dx.empty())
        {
            if (!sweep_theta.empty() && !sweep_dx.empty())
                throw std::invalid_argument("capacity-1d: give one of --sweep-theta / --sweep-dx");
            if (out.empty())
                throw std::invalid_argument("capacity-1d: sweeps need --out for the CSV");
            if (!std::isnan(p))
                throw std::invalid_argument("capacity-1d: sweeps hold p_bar fixed; --p is not supported here");

            std::vector<lis::Sweep1DRow> rows;
            if (!sweep_theta.empty())
            {
                Range r = parse_range(sweep_theta);
                for (int i = 0; i < r.n; ++i)
                {
                    double th = r.lo + (r.hi - r.lo) * double(i) / double(r.n - 1);
                    rows.push_back(lis::sweep_row(make_config(lambda / (2.0 * th))));
                }
            }
            else
            {
                Range r = parse_range(sweep_dx);
                for (int i = 0; i < r.n; ++i)
                {
                    double dx = r.lo + (r.hi - r.lo) * double(i) / double(r.n - 1);
                    rows.push_back(lis::sweep_row(make_config(dx)));
                }
            }
            std::ofstream os = open_output(out);
            lis::write_sweep_1d_csv(rows, os);
            finish_output(os, out);

            emit({{"command", "capacity-1d"},
                  {"config",
                   {{"lambda", lambda},
                    {"nu", nu},
                    {"n0", n0},
                    {"p_bar", p_bar},
                    {"sweep_theta", json_or_null(sweep_theta)},
                    {"sweep_dx", json_or_null(sweep_dx)},
                    {"threads", common.resolved_threads()}}},
                  {"results", {{"rows", rows.size()}}},
                  {"outputs", {{"csv", out}}}});
            return;
        }

        if (has_dx == has_theta)
            throw std::invalid_argument("capacity-1d: give exactly one of --delta-x / --theta");
        double dx = has_dx ? delta_x : lambda / (2.0 * theta);

        lis::LineConfig cfg = make_config(dx);
        lis::CapacityValue opt = lis::capacity_1d_optimal(cfg);
        lis::CapacityValue mf = lis::capacity_1d_mf(cfg);
        lis::FoldedPsd psd = lis::folded_psd(cfg);

        ordered_json levels = ordered_json::array();
        for (const auto &lv : psd.levels)
            levels.push_back({{"amplitude", lv.amplitude}, {"band_fraction", lv.band_fraction}});

        emit({{"command", "capacity-1d"},
              {"config",
               {{"lambda", cfg.lambda},
                {"delta_x", cfg.delta_x},
                {"nu", cfg.nu},
                {"n0", cfg.n0},
                {"p", cfg.power_P},
                {"p_bar", cfg.p_bar},
                {"threads", common.resolved_threads()}}},
              {"results",
               {{"theta", cfg.theta},
                {"beta", cfg.beta},
                {"alpha", cfg.alpha},
                {"c_opt", opt.per_terminal},
                {"c_mf", mf.per_terminal},
                {"c_bar_opt", opt.per_meter},
                {"c_bar_mf", mf.per_meter},
                {"interference_power", lis::interference_power(cfg)},
                {"dims_per_meter", lis::dims_1d(lis::Wavelength(cfg.lambda), cfg.theta)},
                {"folded_psd", levels}}}});
    }
};

// --- capacity-2d ----------------------------------------------------------

struct Capacity2DCmd
{
    CommonFlags common;
    double lambda = 0.4, p_bar = 10.0, n0 = 1.0;
    std::string snr_sweep, out;
    CLI::Option *o_lam = nullptr, *o_pbar = nullptr, *o_n0 = nullptr, *o_sweep = nullptr, *o_out = nullptr;

    void attach(CLI::App *cmd)
    {
        o_lam = cmd->add_option("--lambda", lambda, "Wavelength [m]");
        o_pbar = cmd->add_option("--p-bar,--pbar", p_bar, "Power per square meter of deployment");
        o_n0 = cmd->add_option("--n0", n0, "Noise spatial PSD");
        o_sweep = cmd->add_option("--snr-sweep", snr_sweep,
                                  "Sweep p_bar/n0 over lo:hi:count, log-spaced (CSV to --out)");
        o_out = cmd->add_option("--out", out, "Sweep CSV output path");
        common.attach(cmd);
    }

    void run()
    {
        ConfigMerge m = common.merge_begin();
        m.apply(o_lam, "lambda", lambda);
        m.apply(o_pbar, "p_bar", p_bar);
        m.apply(o_n0, "n0", n0);
        m.apply(o_sweep, "snr_sweep", snr_sweep);
        m.apply(o_out, "out", out);
        common.merge(m);
        m.reject_unknown();

        lis::Wavelength lam(lambda);

        if (!snr_sweep.empty())
        {
            if (out.empty())
                throw std::invalid_argument("capacity-2d: sweeps need --out for the CSV");
            Range r = parse_range(snr_sweep);
            if (!(r.lo > 0.0))
                throw std::invalid_argument("capacity-2d: SNR sweep bounds must be positive");
            std::vector<double> grid;
            for (int i = 0; i < r.n; ++i)
                grid.push_back(r.lo * std::pow(r.hi / r.lo, double(i) / double(r.n - 1)));
            std::vector<lis::Sweep2DRow> rows = lis::sweep_2d(lam, grid, n0);
            std::ofstream os = open_output(out);
            lis::write_sweep_2d_csv(rows, os);
            finish_output(os, out);

            emit({{"command", "capacity-2d"},
                  {"config",
                   {{"lambda", lambda},
                    {"n0", n0},
                    {"snr_sweep", snr_sweep},
                    {"threads", common.resolved_threads()}}},
                  {"results", {{"rows", rows.size()}}},
                  {"outputs", {{"csv", out}}}});
            return;
        }

        emit({{"command", "capacity-2d"},
              {"config",
               {{"lambda", lambda}, {"p_bar", p_bar}, {"n0", n0}, {"threads", common.resolved_threads()}}},
              {"results",
               {{"c_bar_2d", lis::capacity_2d(lam, p_bar, n0)},
                {"dims_per_square_meter", lis::dims_2d(lam)}}}});
    }
};

// --- dims -----------------------------------------------------------------

struct DimsCmd
{
    CommonFlags common;
    double lambda = 0.4, theta = 1.0;
    std::string geometry = "line";
    CLI::Option *o_lam = nullptr, *o_th = nullptr, *o_geo = nullptr;

    void attach(CLI::App *cmd)
    {
        o_lam = cmd->add_option("--lambda", lambda, "Wavelength [m]");
        o_geo = cmd->add_option("--geometry", geometry, "line or plane");
        o_th = cmd->add_option("--theta", theta, "Normalized bandwidth (line only)");
        common.attach(cmd);
    }

    void run()
    {
        ConfigMerge m = common.merge_begin();
        m.apply(o_lam, "lambda", lambda);
        m.apply(o_geo, "geometry", geometry);
        m.apply(o_th, "theta", theta);
        common.merge(m);
        m.reject_unknown();

        lis::Wavelength lam(lambda);
        ordered_json results;
        if (geometry == "line")
        {
            results["dims_per_meter"] = lis::dims_1d(lam, theta);
            results["units"] = "1/m";
        }
        else if (geometry == "plane")
        {
            results["dims_per_square_meter"] = lis::dims_2d(lam);
            results["units"] = "1/m^2";
        }
        else
        {
            throw std::invalid_argument("dims: geometry must be line or plane");
        }

        emit({{"command", "dims"},
              {"config",
               {{"lambda", lambda},
                {"geometry", geometry},
                {"theta", theta},
                {"threads", common.resolved_threads()}}},
              {"results", results}});
    }
};

// --- simulate ---------------------------------------------------------------

struct SimulateCmd
{
    CommonFlags common;
    QuadFlags quad;
    std::string geometry = "line";
    double extent_x = 10.0, extent_y = 0.0, extent_z = 0.0, z0 = 1.0;
    double density = 10.0;
    std::string surface_a = "inf", surface_b = "inf";
    double lambda = 0.4, n0 = 1.0;
    std::string power_mode = "per-volume";
    double power = 10.0;
    std::string gram_mode = "sinc-approx";
    int grid_order = 6;
    int trials = 100;
    std::uint64_t seed = 1;
    double rank_threshold = 1e-3;
    std::string out;

    CLI::Option *o_geo = nullptr, *o_ex = nullptr, *o_ey = nullptr, *o_ez = nullptr, *o_z0 = nullptr,
                *o_density = nullptr, *o_a = nullptr, *o_b = nullptr, *o_lam = nullptr, *o_n0 = nullptr,
                *o_pm = nullptr, *o_power = nullptr, *o_gm = nullptr, *o_order = nullptr, *o_trials = nullptr,
                *o_seed = nullptr, *o_rank = nullptr, *o_out = nullptr;

    void attach(CLI::App *cmd)
    {
        o_geo = cmd->add_option("--geometry", geometry, "line, plane or cube");
        o_ex = cmd->add_option("--extent-x", extent_x, "Deployment extent along x [m]");
        o_ey = cmd->add_option("--extent-y", extent_y, "Deployment extent along y [m] (plane/cube)");
        o_ez = cmd->add_option("--extent-z", extent_z, "Deployment extent along z [m] (cube)");
        o_z0 = cmd->add_option("--z0", z0, "Terminal height (line/plane) or nearest-face height (cube) [m]");
        o_density = cmd->add_option("--density", density, "Expected terminals per unit measure");
        o_a = cmd->add_option("--surface-a", surface_a, "Surface half-width A [m] or 'inf'");
        o_b = cmd->add_option("--surface-b", surface_b, "Surface half-height B [m] or 'inf'");
        o_lam = cmd->add_option("--lambda", lambda, "Wavelength [m]");
        o_n0 = cmd->add_option("--n0", n0, "Noise spatial PSD");
        o_pm = cmd->add_option("--power-mode", power_mode, "per-terminal or per-volume");
        o_power = cmd->add_option("--power", power, "Per-terminal power, or power per unit measure");
        o_gm = cmd->add_option("--gram-mode", gram_mode, "numeric or sinc-approx");
        o_order = cmd->add_option("--grid-order", grid_order, "Gauss-Legendre order per panel axis (numeric)");
        o_trials = cmd->add_option("--trials", trials, "Monte-Carlo trial count");
        o_seed = cmd->add_option("--seed", seed, "Base RNG seed");
        o_rank = cmd->add_option("--rank-threshold", rank_threshold, "Relative eigenvalue cut for effective rank");
        o_out = cmd->add_option("--out", out, "Per-trial CSV output path");
        common.attach(cmd);
        quad.attach(cmd);
    }

    lis::ExperimentConfig to_config() const
    {
        lis::ExperimentConfig cfg;
        lis::GeometryKind kind = lis::geometry_kind_from_string(geometry);
        switch (kind)
        {
        case lis::GeometryKind::Line:
            cfg.geometry = lis::line_geometry(extent_x, z0);
            break;
        case lis::GeometryKind::Plane:
            cfg.geometry = lis::plane_geometry(extent_x, extent_y, z0);
            break;
        default:
            cfg.geometry = lis::cube_geometry(extent_x, extent_y, extent_z, z0);
            break;
        }
        cfg.density = density;
        cfg.surface = lis::SurfaceSpec(parse_extent(surface_a), parse_extent(surface_b));
        cfg.lambda = lambda;
        cfg.n0 = n0;
        cfg.power_mode = lis::power_mode_from_string(power_mode);
        cfg.power = power;
        cfg.gram.mode = lis::gram_mode_from_string(gram_mode);
        cfg.gram.grid_order = grid_order;
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.quad = quad.to_config();
        cfg.rank_threshold = rank_threshold;
        cfg.validate();
        return cfg;
    }

    void run()
    {
        ConfigMerge m = common.merge_begin();
        m.apply(o_geo, "geometry", geometry);
        m.apply(o_ex, "extent_x", extent_x);
        m.apply(o_ey, "extent_y", extent_y);
        m.apply(o_ez, "extent_z", extent_z);
        m.apply(o_z0, "z0", z0);
        m.apply(o_density, "density", density);
        m.apply_numeric_or_string(o_a, "surface_a", surface_a);
        m.apply_numeric_or_string(o_b, "surface_b", surface_b);
        m.apply(o_lam, "lambda", lambda);
        m.apply(o_n0, "n0", n0);
        m.apply(o_pm, "power_mode", power_mode);
        m.apply(o_power, "power", power);
        m.apply(o_gm, "gram_mode", gram_mode);
        m.apply(o_order, "grid_order", grid_order);
        m.apply(o_trials, "trials", trials);
        m.apply(o_seed, "seed", seed);
        m.apply(o_rank, "rank_threshold", rank_threshold);
        m.apply(o_out, "out", out);
        quad.merge(m);
        common.merge(m);
        m.reject_unknown();

        lis::ExperimentConfig cfg = to_config();
        lis::ExperimentResult res = lis::run_experiment(cfg);

        if (!out.empty())
        {
            std::ofstream os = open_output(out);
            lis::write_trials_csv(res, os);
            finish_output(os, out);
        }

        ordered_json j = lis::summary_json(res);
        emit({{"command", "simulate"},
              {"config", j["config"]},
              {"threads", common.resolved_threads()},
              {"metrics", j["metrics"]},
              {"outputs", {{"csv", json_or_null(out)}}}});
    }
};

// --- preset -----------------------------------------------------------------

struct PresetCmd
{
    CommonFlags common;
    std::string name;
    std::uint64_t seed = 0;
    int trials = 0;
    std::string out_dir = ".";
    std::string densities;
    std::string power_mode;
    double power = 0.0;
    CLI::Option *o_seed = nullptr, *o_trials = nullptr, *o_dir = nullptr, *o_dens = nullptr, *o_pm = nullptr,
                *o_power = nullptr;

    void attach(CLI::App *cmd)
    {
        cmd->add_option("name", name, "fig4 | fig6 | fig7 | fig8 | fig9 | fig11")->required();
        o_seed = cmd->add_option("--seed", seed, "Base RNG seed override (Monte-Carlo presets)");
        o_trials = cmd->add_option("--trials", trials, "Trial count override (Monte-Carlo presets)");
        o_dir = cmd->add_option("--out-dir", out_dir, "Directory for output files");
        o_dens = cmd->add_option("--densities", densities, "Comma-separated density override");
        o_pm = cmd->add_option("--power-mode", power_mode, "per-terminal or per-volume override");
        o_power = cmd->add_option("--power", power, "Power override");
        common.attach(cmd);
    }

    void run()
    {
        ConfigMerge m = common.merge_begin();
        m.apply(o_seed, "seed", seed);
        m.apply(o_trials, "trials", trials);
        m.apply(o_dir, "out_dir", out_dir);
        m.apply(o_dens, "densities", densities);
        m.apply(o_pm, "power_mode", power_mode);
        m.apply(o_power, "power", power);
        common.merge(m);
        m.reject_unknown();

        lis::FigurePreset preset = lis::figure_preset(name);
        fs::path dir(out_dir);

        if (preset.kind == lis::FigurePreset::Kind::LineSweep)
        {
            std::vector<lis::Sweep1DRow> rows;
            rows.reserve(preset.sweep.size());
            for (const lis::LineConfig &c : preset.sweep)
                rows.push_back(lis::sweep_row(c));
            fs::path csv = dir / (name + "_sweep.csv");
            std::ofstream os = open_output(csv);
            lis::write_sweep_1d_csv(rows, os);
            finish_output(os, csv);

            const lis::LineConfig &first = preset.sweep.front();
            emit({{"command", "preset"},
                  {"name", name},
                  {"kind", "line-sweep"},
                  {"config",
                   {{"nu", first.nu},
                    {"n0", first.n0},
                    {"p_bar", first.p_bar},
                    {"rows", rows.size()},
                    {"threads", common.resolved_threads()}}},
                  {"outputs", {csv.string()}}});
            return;
        }

        lis::ExperimentConfig base = preset.base;
        if (o_seed->count() > 0 || seed != 0)
            base.seed = seed;
        if (trials > 0)
            base.trials = trials;
        if (!power_mode.empty())
            base.power_mode = lis::power_mode_from_string(power_mode);
        if (power > 0.0)
            base.power = power;
        std::vector<double> dens = preset.densities;
        if (!densities.empty())
            dens = parse_double_list(densities);

        std::vector<std::pair<double, lis::ExperimentResult>> runs;
        ordered_json outputs = ordered_json::array();
        ordered_json by_density = ordered_json::array();
        for (std::size_t i = 0; i < dens.size(); ++i)
        {
            lis::ExperimentConfig cfg = base;
            cfg.density = dens[i];
            lis::ExperimentResult res = lis::run_experiment(cfg);

            fs::path csv = dir / (name + "_trials_d" + std::to_string(i) + ".csv");
            std::ofstream os = open_output(csv);
            lis::write_trials_csv(res, os);
            finish_output(os, csv);
            outputs.push_back(csv.string());

            by_density.push_back({{"density", dens[i]},
                                  {"mean_k", res.k.mean},
                                  {"mean_c_bar_opt", res.c_bar_opt.mean},
                                  {"mean_c_bar_mf", res.c_bar_mf.mean},
                                  {"mean_c_per_user_opt", res.c_per_user_opt.mean},
                                  {"mean_c_per_user_mf", res.c_per_user_mf.mean},
                                  {"mean_eff_rank", res.eff_rank.mean}});
            runs.emplace_back(dens[i], std::move(res));
        }

        fs::path summary_csv = dir / (name + "_summary.csv");
        std::ofstream os = open_output(summary_csv);
        lis::write_density_summary_csv(runs, os);
        finish_output(os, summary_csv);
        outputs.push_back(summary_csv.string());

        base.density = dens.front();
        ordered_json cfg_json = lis::config_json(base);
        cfg_json.erase("density");
        cfg_json["densities"] = dens;

        emit({{"command", "preset"},
              {"name", name},
              {"kind", "monte-carlo"},
              {"config", cfg_json},
              {"threads", common.resolved_threads()},
              {"metrics_by_density", by_density},
              {"outputs", outputs}});
    }
};

void emit_error(const char *type, const std::string &message)
{
    ordered_json j = {{"error", {{"type", type}, {"message", message}}}};
    std::cerr << j.dump() << '\n';
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"liscap — uplink capacity analysis for large antenna surfaces"};
    app.require_subcommand(1);

    auto sinc = std::make_shared<SincAuditCmd>();
    auto gram = std::make_shared<GramCmd>();
    auto c1d = std::make_shared<Capacity1DCmd>();
    auto c2d = std::make_shared<Capacity2DCmd>();
    auto dims = std::make_shared<DimsCmd>();
    auto sim = std::make_shared<SimulateCmd>();
    auto preset = std::make_shared<PresetCmd>();

    CLI::App *cmd;
    cmd = app.add_subcommand("sinc-audit", "Audit the sinc model of the line correlation kernel");
    sinc->attach(cmd);
    cmd->callback([sinc] { sinc->run(); });

    cmd = app.add_subcommand("gram", "Build and serialize a Gram matrix from a terminal list");
    gram->attach(cmd);
    cmd->callback([gram] { gram->run(); });

    cmd = app.add_subcommand("capacity-1d", "Closed-form line capacities (optimal and matched filter)");
    c1d->attach(cmd);
    cmd->callback([c1d] { c1d->run(); });

    cmd = app.add_subcommand("capacity-2d", "Closed-form planar capacity density");
    c2d->attach(cmd);
    cmd->callback([c2d] { c2d->run(); });

    cmd = app.add_subcommand("dims", "Spatial degrees of freedom per meter / square meter");
    dims->attach(cmd);
    cmd->callback([dims] { dims->run(); });

    cmd = app.add_subcommand("simulate", "Monte-Carlo random-deployment experiment");
    sim->attach(cmd);
    cmd->callback([sim] { sim->run(); });

    cmd = app.add_subcommand("preset", "Run a named figure-style study");
    preset->attach(cmd);
    cmd->callback([preset] { preset->run(); });

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        emit_error("usage", e.what());
        return 2;
    }
    catch (const nlohmann::json::exception &e)
    {
        emit_error("config", e.what());
        return 2;
    }
    catch (const lis::budget_error &e)
    {
        emit_error("budget", e.what());
        return 3;
    }
    catch (const IoError &e)
    {
        emit_error("io", e.what());
        return 4;
    }
    catch (const std::invalid_argument &e)
    {
        emit_error("usage", e.what());
        return 2;
    }
    catch (const std::exception &e)
    {
        emit_error("internal", e.what());
        return 1;
    }
    return 0;
}
