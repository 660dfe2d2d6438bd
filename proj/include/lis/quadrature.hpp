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

#ifndef LIS_QUADRATURE_HPP
#define LIS_QUADRATURE_HPP

#include <algorithm>
#include <complex>
#include <cstddef>
#include <ostream>
#include <queue>
#include <vector>

#include <lis/fields.hpp>
#include <lis/format.hpp>
#include <lis/types.hpp>

namespace lis
{

/// Knobs for the adaptive correlation integrals.
///
/// max_panel_fraction_of_lambda caps panel size against the local phase
/// rotation: a panel may span at most 4*pi*fraction radians of integrand
/// phase (a bound on the rotation rate is computed per panel from the
/// geometry). Where the oscillation runs at its maximum possible rate the
/// cap degenerates to the plain length cap fraction*lambda; far away from
/// the stationary region panels are allowed to grow so that half-plane
/// sized domains stay tractable.
struct QuadratureConfig
{
    double rel_tol = 1e-8;
    double max_panel_fraction_of_lambda = 0.125;
    double line_truncation_tol = 1e-9;

    std::size_t panel_budget = 250000;     ///< max panels per integral before budget_error
    double infinite_extent_factor = 50.0;  ///< truncated half-extent = factor * max(z, lambda)

    void validate() const
    {
        if (!(rel_tol > 0.0) || !(rel_tol < 1.0))
            throw std::invalid_argument("QuadratureConfig: rel_tol must lie in (0, 1)");
        if (!(max_panel_fraction_of_lambda > 0.0) || !(max_panel_fraction_of_lambda <= 1.0))
            throw std::invalid_argument("QuadratureConfig: max_panel_fraction_of_lambda must lie in (0, 1]");
        if (!(line_truncation_tol > 0.0))
            throw std::invalid_argument("QuadratureConfig: line_truncation_tol must be positive");
        if (panel_budget < 4)
            throw std::invalid_argument("QuadratureConfig: panel_budget too small");
        if (!(infinite_extent_factor >= 1.0))
            throw std::invalid_argument("QuadratureConfig: infinite_extent_factor must be >= 1");
    }
};

/// Result of one adaptive integration.
struct CorrelationValue
{
    std::complex<double> value;
    double est_error = 0.0;  ///< Kronrod-Gauss error estimate plus tail bound
    std::size_t panels = 0;
};

namespace detail
{

// Gauss-7 / Kronrod-15 nodes and weights on [-1, 1] (QUADPACK dqk15).
// Laid out as 15 signed positions so a tensor sweep can use one flat loop;
// gauss_w is zero at the Kronrod-only positions.
struct GK15
{
    double pos[15];
    double kron_w[15];
    double gauss_w[15];

    GK15()
    {
        static const double xgk[8] = {
            0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
            0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
            0.207784955007898467600689403773245, 0.0};
        static const double wgk[8] = {
            0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
        static const double wg[4] = {
            0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
            0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

        for (int i = 0; i < 7; ++i)
        {
            pos[i] = -xgk[i];
            pos[14 - i] = xgk[i];
            kron_w[i] = kron_w[14 - i] = wgk[i];
            gauss_w[i] = gauss_w[14 - i] = (i % 2 == 1) ? wg[(i - 1) / 2] : 0.0;
        }
        pos[7] = 0.0;
        kron_w[7] = wgk[7];
        gauss_w[7] = wg[3];
    }
};

inline const GK15 &gk15()
{
    static const GK15 rule;
    return rule;
}

struct Panel1D
{
    double a, b;
    std::complex<double> value;
    double err;
    bool alive;
};

// F : double -> complex<double>
template <class F>
void eval_panel_1d(F &f, Panel1D &p)
{
    const GK15 &r = gk15();
    double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
    std::complex<double> kron(0.0), gauss(0.0);
    for (int i = 0; i < 15; ++i)
    {
        std::complex<double> fv = f(c + h * r.pos[i]);
        kron += r.kron_w[i] * fv;
        gauss += r.gauss_w[i] * fv;
    }
    p.value = h * kron;
    p.err = std::abs(h * (kron - gauss));
}

struct Panel2D
{
    double ax, bx, ay, by;
    std::complex<double> value;
    double err;
    bool alive;
};

// F : (double, double) -> complex<double>. The error estimate compares the
// full Kronrod tensor against the two mixed Gauss/Kronrod tensors, which
// catches one-directional roughness that a plain diagonal embedding misses.
template <class F>
void eval_panel_2d(F &f, Panel2D &p)
{
    const GK15 &r = gk15();
    double cx = 0.5 * (p.ax + p.bx), hx = 0.5 * (p.bx - p.ax);
    double cy = 0.5 * (p.ay + p.by), hy = 0.5 * (p.by - p.ay);

    std::complex<double> kk(0.0), gk(0.0), kg(0.0);
    for (int ix = 0; ix < 15; ++ix)
    {
        double x = cx + hx * r.pos[ix];
        std::complex<double> row_k(0.0), row_g(0.0);
        for (int iy = 0; iy < 15; ++iy)
        {
            std::complex<double> fv = f(x, cy + hy * r.pos[iy]);
            row_k += r.kron_w[iy] * fv;
            row_g += r.gauss_w[iy] * fv;
        }
        kk += r.kron_w[ix] * row_k;
        kg += r.kron_w[ix] * row_g;
        gk += r.gauss_w[ix] * row_k;
    }
    double area = hx * hy;
    p.value = area * kk;
    p.err = area * std::max(std::abs(kk - gk), std::abs(kk - kg));
}

// Worst-first refinement over a panel vector with a stale-entry heap.
// Heap keys are (error, insertion id); everything is serial, and the final
// value is re-summed in geometric order so it does not depend on the
// refinement history at all.
struct HeapEntry
{
    double err;
    std::size_t id;
    bool operator<(const HeapEntry &o) const { return err < o.err || (err == o.err && id < o.id); }
};

template <class F, class Cap>
CorrelationValue integrate_1d(F f, double a, double b, Cap cap, double abs_tol, std::size_t budget)
{
    std::vector<Panel1D> panels;
    std::priority_queue<HeapEntry> heap;
    double total_err = 0.0;

    auto add_split_to_cap = [&](double lo, double hi) {
        std::vector<std::pair<double, double>> work{{lo, hi}};
        while (!work.empty())
        {
            auto [pa, pb] = work.back();
            work.pop_back();
            double w = pb - pa;
            if (w > cap(pa, pb) && panels.size() + work.size() + 2 <= budget && w > 1e-14 * (std::abs(pa) + 1.0))
            {
                double mid = 0.5 * (pa + pb);
                work.emplace_back(pa, mid);
                work.emplace_back(mid, pb);
                continue;
            }
            Panel1D p{pa, pb, {}, 0.0, true};
            eval_panel_1d(f, p);
            total_err += p.err;
            heap.push({p.err, panels.size()});
            panels.push_back(p);
        }
    };

    add_split_to_cap(a, b);

    while (total_err > abs_tol && panels.size() + 1 < budget && !heap.empty())
    {
        HeapEntry top = heap.top();
        heap.pop();
        if (top.id >= panels.size() || !panels[top.id].alive || panels[top.id].err != top.err)
            continue; // stale
        Panel1D parent = panels[top.id];
        if (parent.err <= 0.0 || parent.b - parent.a < 1e-14 * (std::abs(parent.a) + 1.0))
            break; // cannot refine further
        panels[top.id].alive = false;
        total_err -= parent.err;
        double mid = 0.5 * (parent.a + parent.b);
        add_split_to_cap(parent.a, mid);
        add_split_to_cap(mid, parent.b);
    }

    // exact re-sum in spatial order
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < panels.size(); ++i)
        if (panels[i].alive)
            order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return panels[i].a < panels[j].a; });

    CorrelationValue out;
    double err = 0.0;
    for (std::size_t i : order)
    {
        out.value += panels[i].value;
        err += panels[i].err;
    }
    out.est_error = err;
    out.panels = order.size();
    if (err > abs_tol && panels.size() + 1 >= budget)
        throw budget_error("adaptive 1-D integral exceeded its panel budget", err, abs_tol);
    return out;
}

template <class F, class Cap>
CorrelationValue integrate_2d(F f, double ax, double bx, double ay, double by, Cap cap, double abs_tol,
                              std::size_t budget)
{
    std::vector<Panel2D> panels;
    std::priority_queue<HeapEntry> heap;
    double total_err = 0.0;

    auto add_split_to_cap = [&](double pax, double pbx, double pay, double pby) {
        std::vector<Panel2D> work;
        work.push_back({pax, pbx, pay, pby, {}, 0.0, true});
        while (!work.empty())
        {
            Panel2D p = work.back();
            work.pop_back();
            double wx = p.bx - p.ax, wy = p.by - p.ay;
            double c = cap(p.ax, p.bx, p.ay, p.by);
            bool splittable = panels.size() + work.size() + 2 <= budget;
            if (splittable && (wx > c || wy > c) && std::max(wx, wy) > 1e-12)
            {
                if (wx >= wy)
                {
                    double mid = 0.5 * (p.ax + p.bx);
                    work.push_back({p.ax, mid, p.ay, p.by, {}, 0.0, true});
                    work.push_back({mid, p.bx, p.ay, p.by, {}, 0.0, true});
                }
                else
                {
                    double mid = 0.5 * (p.ay + p.by);
                    work.push_back({p.ax, p.bx, p.ay, mid, {}, 0.0, true});
                    work.push_back({p.ax, p.bx, mid, p.by, {}, 0.0, true});
                }
                continue;
            }
            eval_panel_2d(f, p);
            total_err += p.err;
            heap.push({p.err, panels.size()});
            panels.push_back(p);
        }
    };

    add_split_to_cap(ax, bx, ay, by);

    while (total_err > abs_tol && panels.size() + 1 < budget && !heap.empty())
    {
        HeapEntry top = heap.top();
        heap.pop();
        if (top.id >= panels.size() || !panels[top.id].alive || panels[top.id].err != top.err)
            continue;
        Panel2D parent = panels[top.id];
        double wx = parent.bx - parent.ax, wy = parent.by - parent.ay;
        if (parent.err <= 0.0 || std::max(wx, wy) < 1e-12)
            break;
        panels[top.id].alive = false;
        total_err -= parent.err;
        if (wx >= wy)
        {
            double mid = 0.5 * (parent.ax + parent.bx);
            add_split_to_cap(parent.ax, mid, parent.ay, parent.by);
            add_split_to_cap(mid, parent.bx, parent.ay, parent.by);
        }
        else
        {
            double mid = 0.5 * (parent.ay + parent.by);
            add_split_to_cap(parent.ax, parent.bx, parent.ay, mid);
            add_split_to_cap(parent.ax, parent.bx, mid, parent.by);
        }
    }

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < panels.size(); ++i)
        if (panels[i].alive)
            order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (panels[i].ax != panels[j].ax)
            return panels[i].ax < panels[j].ax;
        return panels[i].ay < panels[j].ay;
    });

    CorrelationValue out;
    double err = 0.0;
    for (std::size_t i : order)
    {
        out.value += panels[i].value;
        err += panels[i].err;
    }
    out.est_error = err;
    out.panels = order.size();
    if (err > abs_tol && panels.size() + 1 >= budget)
        throw budget_error("adaptive 2-D integral exceeded its panel budget", err, abs_tol);
    return out;
}

// distance from the interval [lo, hi] to the point p
inline double interval_distance(double lo, double hi, double p)
{
    if (p < lo)
        return lo - p;
    if (p > hi)
        return p - hi;
    return 0.0;
}

} // namespace detail

/// Effective half-extent used when a surface dimension is infinite: the
/// integrands decay like 1/R^3 in amplitude, so a box of 50 heights leaves
/// a relative tail around 1 percent before phase cancellation, far less
/// after. The factor is configurable for studies that need tighter tails.
inline double effective_half_extent(double declared, double z_scale, Wavelength lambda,
                                    const QuadratureConfig &cfg)
{
    if (std::isfinite(declared))
        return declared;
    return cfg.infinite_extent_factor * std::max(z_scale, lambda.meters);
}

/// Cross-correlation of the normalized fields of two terminals over the
/// surface:  phi = integral s_a(x,y) * conj(s_b(x,y)) dx dy.
/// For a == b this is the captured power fraction of the (truncated)
/// surface. The error estimate covers the quadrature on the truncated
/// domain; the truncation policy for infinite surfaces is documented at
/// effective_half_extent().
inline CorrelationValue correlation_integral(const Terminal &ta, const Terminal &tb, const SurfaceSpec &surface,
                                             Wavelength lambda, const QuadratureConfig &cfg = {})
{
    cfg.validate();

    double zmax = std::max(ta.z, tb.z);
    double A = effective_half_extent(surface.half_width_A, zmax, lambda, cfg);
    double B = effective_half_extent(surface.half_height_B, zmax, lambda, cfg);

    double sep_x = ta.x - tb.x, sep_y = ta.y - tb.y, sep_z = ta.z - tb.z;
    double sep3 = std::sqrt(sep_x * sep_x + sep_y * sep_y + sep_z * sep_z);
    double phase_allowance = 4.0 * M_PI * cfg.max_panel_fraction_of_lambda;
    double k0 = 2.0 * M_PI / lambda.meters;

    auto f = [&](double x, double y) {
        return field_amplitude(ta, lambda, x, y) * std::conj(field_amplitude(tb, lambda, x, y));
    };

    // Panel cap: phase rate of d_a - d_b is bounded by min(2, 2*sep/dmin)*k0
    // where dmin is the closest 3-D approach of the panel to either
    // terminal; the same dmin also caps panel size against the 1/d^3
    // amplitude variation.
    auto cap = [&](double pax, double pbx, double pay, double pby) {
        double dxa = detail::interval_distance(pax, pbx, ta.x);
        double dya = detail::interval_distance(pay, pby, ta.y);
        double da = std::sqrt(ta.z * ta.z + dxa * dxa + dya * dya);
        double dxb = detail::interval_distance(pax, pbx, tb.x);
        double dyb = detail::interval_distance(pay, pby, tb.y);
        double db = std::sqrt(tb.z * tb.z + dxb * dxb + dyb * dyb);
        double dmin = std::min(da, db);
        double rate = k0 * std::min(2.0, 2.0 * sep3 / dmin);
        double cap_osc = rate > 0.0 ? phase_allowance / rate : infinity;
        return std::min(cap_osc, dmin);
    };

    // tolerance relative to the natural scale sqrt(nu_a * nu_b) so that
    // near-orthogonal pairs stay well-posed
    SurfaceSpec trunc(A, B);
    double scale = std::sqrt(fraction_nu(trunc, ta.z) * fraction_nu(trunc, tb.z));
    double abs_tol = cfg.rel_tol * scale;

    return detail::integrate_2d(f, -A, A, -B, B, cap, abs_tol, cfg.panel_budget);
}

/// One-dimensional correlation kernel for terminals deployed along a line
/// parallel to the x-axis of an infinitely long surface strip:
///
///   g(dx) = integral (z^2+x^2)^(-3/4) (z^2+(x+dx)^2)^(-3/4)
///           * exp(-2 pi j / lambda * (sqrt(z^2+x^2) - sqrt(z^2+(x+dx)^2))) dx
///
/// over the whole real line. g(0) = 2/z^2 exactly. The domain is truncated
/// where the algebraic tail bound 2*sqrt(2)/X^2 drops below
/// line_truncation_tol * (2/z^2); the bound is added to est_error.
inline CorrelationValue line_correlation(double z, Wavelength lambda, double delta_x,
                                         const QuadratureConfig &cfg = {})
{
    cfg.validate();
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::invalid_argument("line_correlation: z must be positive and finite");
    if (!std::isfinite(delta_x))
        throw std::invalid_argument("line_correlation: delta_x must be finite");

    double peak = 2.0 / (z * z);
    double adx = std::abs(delta_x);
    double k0 = 2.0 * M_PI / lambda.meters;
    double phase_allowance = 4.0 * M_PI * cfg.max_panel_fraction_of_lambda;

    // tail: for |x| >= max(2*adx, z), |integrand| <= 2^(3/2) |x|^(-3)
    double x_tail = z * std::sqrt(std::sqrt(2.0) / cfg.line_truncation_tol);
    double x_max = std::max({x_tail, 2.0 * adx, 4.0 * z}) + adx;
    double tail_bound = 2.0 * std::sqrt(2.0) / (x_max * x_max);

    auto f = [&](double x) {
        double ra2 = z * z + x * x;
        double xb = x + delta_x;
        double rb2 = z * z + xb * xb;
        double mag = std::pow(ra2, -0.75) * std::pow(rb2, -0.75);
        double phase = -k0 * (std::sqrt(ra2) - std::sqrt(rb2));
        return std::polar(mag, phase);
    };

    // phase rate: |d/dx (r_a - r_b)| <= min(2, adx * z^2 / (z^2 + m^2)^(3/2))
    // with m the closest approach of the hull of both feet to the panel
    auto cap = [&](double lo, double hi) {
        double hull_lo = std::min(lo, lo + delta_x);
        double hull_hi = std::max(hi, hi + delta_x);
        double m = (hull_lo <= 0.0 && 0.0 <= hull_hi) ? 0.0 : std::min(std::abs(hull_lo), std::abs(hull_hi));
        double slope = adx * z * z / std::pow(z * z + m * m, 1.5);
        double rate = k0 * std::min(2.0, slope);
        double cap_osc = rate > 0.0 ? phase_allowance / rate : infinity;
        double d0 = detail::interval_distance(lo, hi, 0.0);
        double d1 = detail::interval_distance(lo, hi, -delta_x);
        double cap_amp = z + std::min(d0, d1);
        return std::min(cap_osc, cap_amp);
    };

    CorrelationValue out = detail::integrate_1d(f, -x_max, x_max, cap, cfg.rel_tol * peak, cfg.panel_budget);
    out.est_error += tail_bound;
    return out;
}

/// Narrowband model of the line correlation: (2/z^2) * sinc(2 dx / lambda),
/// exact at dx = 0 and increasingly accurate as lambda / z shrinks.
inline double sinc_model(double z, Wavelength lambda, double delta_x)
{
    if (!(z > 0.0))
        throw std::invalid_argument("sinc_model: z must be positive");
    return 2.0 / (z * z) * sinc(2.0 * delta_x / lambda.meters);
}

/// One audited spacing: numeric kernel vs the sinc model.
struct AuditRow
{
    double delta_x;
    double numeric_value;  ///< real part of g(delta_x); the imaginary part cancels
    double sinc_value;
    double abs_error;  ///< |numeric - sinc|
};

/// Numeric zero crossing of the correlation kernel, paired with the closest
/// half-wavelength multiple predicted by the sinc model.
struct NullLocation
{
    double located;
    double nearest_multiple;
    double offset;  ///< |located - nearest_multiple|
};

struct AuditReport
{
    double z = 0.0;
    double lambda = 0.0;
    double peak = 0.0;  ///< 2/z^2 reference scale
    std::vector<AuditRow> rows;
    std::vector<NullLocation> nulls;
    double max_abs_deviation = 0.0;   ///< max |numeric - sinc| over the grid
    double max_rel_deviation = 0.0;   ///< same, relative to the peak
    double rms_rel_deviation = 0.0;
    double max_est_error = 0.0;       ///< worst per-point quadrature estimate
};

/// Sweeps the numeric kernel over the given spacings, reports its deviation
/// envelope from the sinc model, and locates the zero crossings bracketed
/// by the grid (refined by bisection to about 1e-6 * lambda).
inline AuditReport approximation_audit(double z, Wavelength lambda, const std::vector<double> &spacings,
                                       const QuadratureConfig &cfg = {})
{
    if (spacings.empty())
        throw std::invalid_argument("approximation_audit: need at least one spacing");

    AuditReport rep;
    rep.z = z;
    rep.lambda = lambda.meters;
    rep.peak = 2.0 / (z * z);

    double sum_sq = 0.0;
    for (double dx : spacings)
    {
        CorrelationValue cv = line_correlation(z, lambda, dx, cfg);
        AuditRow row;
        row.delta_x = dx;
        row.numeric_value = cv.value.real();
        row.sinc_value = sinc_model(z, lambda, dx);
        row.abs_error = std::abs(row.numeric_value - row.sinc_value);
        rep.rows.push_back(row);
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, row.abs_error);
        rep.max_est_error = std::max(rep.max_est_error, cv.est_error);
        sum_sq += row.abs_error * row.abs_error;
    }
    rep.max_rel_deviation = rep.max_abs_deviation / rep.peak;
    rep.rms_rel_deviation = std::sqrt(sum_sq / double(spacings.size())) / rep.peak;

    // bisect every sign change of the numeric kernel bracketed by the grid
    auto numeric = [&](double dx) { return line_correlation(z, lambda, dx, cfg).value.real(); };
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
    {
        double fa = rep.rows[i - 1].numeric_value, fb = rep.rows[i].numeric_value;
        if (!(fa * fb < 0.0))
            continue;
        double a = rep.rows[i - 1].delta_x, b = rep.rows[i].delta_x;
        for (int iter = 0; iter < 60 && (b - a) > 1e-6 * lambda.meters; ++iter)
        {
            double mid = 0.5 * (a + b);
            double fm = numeric(mid);
            if (fa * fm <= 0.0)
            {
                b = mid;
                fb = fm;
            }
            else
            {
                a = mid;
                fa = fm;
            }
        }
        NullLocation nl;
        nl.located = 0.5 * (a + b);
        double half = 0.5 * lambda.meters;
        nl.nearest_multiple = std::round(nl.located / half) * half;
        nl.offset = std::abs(nl.located - nl.nearest_multiple);
        rep.nulls.push_back(nl);
    }
    return rep;
}

/// CSV dump of an audit, one row per spacing.
inline void write_audit_csv(const AuditReport &rep, std::ostream &os)
{
    os << "delta_x,numeric_value,sinc_value,abs_error\n";
    for (const AuditRow &r : rep.rows)
        os << fmt_double(r.delta_x) << ',' << fmt_double(r.numeric_value) << ',' << fmt_double(r.sinc_value)
           << ',' << fmt_double(r.abs_error) << '\n';
}

} // namespace lis

#endif
