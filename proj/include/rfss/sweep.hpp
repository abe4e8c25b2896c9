// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rfss/lna.hpp"
#include "rfss/mna.hpp"
#include "rfss/models.hpp"
#include "rfss/noise.hpp"
#include "rfss/params.hpp"

// Frequency / control-voltage / corner sweeps over the two-stage model and
// extraction of the scalar figures a datasheet would quote.  Interpolation
// happens in x = log10(f): the peak is refined with a parabola through the
// three samples around the maximum, band edges by linear crossing search.

namespace rfss
{

enum class GridSpacing
{
    Linear,
    Log,
};

struct FrequencyGrid
{
    double start = 0.0;  // Hz
    double stop = 0.0;   // Hz
    int points = 0;
    GridSpacing spacing = GridSpacing::Linear;

    std::vector<double> frequencies() const
    {
        if (!(start > 0.0) || !(start < stop))
            throw std::invalid_argument("frequency grid needs 0 < start < stop");
        if (points < 2)
            throw std::invalid_argument("frequency grid needs at least 2 points");
        std::vector<double> f(points);
        if (spacing == GridSpacing::Log)
        {
            const double lo = std::log10(start), hi = std::log10(stop);
            for (int i = 0; i < points; ++i)
                f[i] = std::pow(10.0, lo + (hi - lo) * i / (points - 1));
        }
        else
        {
            for (int i = 0; i < points; ++i)
                f[i] = start + (stop - start) * i / (points - 1);
        }
        f.front() = start;
        f.back() = stop;
        return f;
    }
};

struct SweepRow
{
    double f_hz = 0.0;
    TwoPort s;          // S-parameters at the model's reference impedance
    double nf_db = 0.0;
};

struct LinearityInputs
{
    double iip3_dbm = 0.0;
    double pdc_mw = 0.0;
};

struct SweepMetrics
{
    double f0_hz = 0.0;         // peak-|S21| frequency
    double peak_gain_db = 0.0;
    double bw_low_hz = 0.0;     // -3 dB band edges around the peak
    double bw_high_hz = 0.0;
    bool bw_low_clipped = false;   // edge ran into the grid boundary
    bool bw_high_clipped = false;
    double bw_3db_hz = 0.0;
    double s11_min_db = 0.0;
    double f_s11_min_hz = 0.0;
    bool matched = false;       // S11 dips below -10 dB somewhere
    double match_low_hz = 0.0;  // widest contiguous sub-10 dB band around the minimum
    double match_high_hz = 0.0;
    bool match_low_clipped = false;
    bool match_high_clipped = false;
    double matching_band_hz = 0.0;
    double nf_at_f0_db = 0.0;
    double phase_at_f0_deg = 0.0;  // unwrapped S21 phase read at f0
    std::optional<double> fom_db;
};

namespace detail
{

inline unsigned thread_budget(std::size_t jobs)
{
    unsigned cap = std::thread::hardware_concurrency();
    if (cap == 0)
        cap = 1;
    if (const char* env = std::getenv("RFSS_THREADS"))
    {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0 && static_cast<unsigned long>(v) < cap)
            cap = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(cap, jobs));
}

// Runs body(0..n-1) across a small thread pool.  Work is claimed by index,
// so results land in deterministic slots no matter the completion order;
// the first exception wins and is rethrown on the calling thread.
template <typename F>
inline void parallel_for(std::size_t n, F&& body)
{
    const unsigned workers = thread_budget(n);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::exception_ptr first;
    auto run = [&] {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load())
                return;
            try
            {
                body(i);
            }
            catch (...)
            {
                const std::lock_guard<std::mutex> lock(mu);
                if (!first)
                    first = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back(run);
    for (auto& t : pool)
        t.join();
    if (first)
        std::rethrow_exception(first);
}

inline double db20(std::complex<double> v)
{
    return 20.0 * std::log10(std::max(std::abs(v), 1e-300));
}

// Copy of the model with a 0 V sense source shorting the output port; its
// branch current is the short-circuit output the noise sums refer to.  The
// noise factor itself is load-invariant, so shorting loses nothing.
inline Netlist noise_view(const Netlist& model)
{
    Netlist n = model;
    n.add(ElementKind::VoltageSource, "__nmeas", n.ports.at(1).node, kGround, 0.0);
    return n;
}

// Vertex of the parabola through three (x, y) samples with any spacing.
// Falls back to the middle sample when the triple is not strictly concave.
inline void parabolic_peak(const double* x, const double* y, double& x_peak, double& y_peak)
{
    const double d01 = (y[1] - y[0]) / (x[1] - x[0]);
    const double d12 = (y[2] - y[1]) / (x[2] - x[1]);
    const double c = (d12 - d01) / (x[2] - x[0]);
    if (!(c < 0.0))
    {
        x_peak = x[1];
        y_peak = y[1];
        return;
    }
    double xv = 0.5 * (x[0] + x[1]) - d01 / (2.0 * c);
    xv = std::clamp(xv, x[0], x[2]);
    x_peak = xv;
    y_peak = y[0] + d01 * (xv - x[0]) + c * (xv - x[0]) * (xv - x[1]);
}

inline double interp_at(const std::vector<double>& x, const std::vector<double>& y, double xq)
{
    if (xq <= x.front())
        return y.front();
    if (xq >= x.back())
        return y.back();
    const auto hi = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t i = static_cast<std::size_t>(hi - x.begin());
    const double t = (xq - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
}

inline std::vector<double> unwrapped_phase_rad(const std::vector<SweepRow>& rows)
{
    std::vector<double> ph(rows.size());
    double offset = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const double raw = std::arg(rows[i].s.m(1, 0));
        if (i > 0)
        {
            const double d = raw - prev;
            if (d > M_PI)
                offset -= 2.0 * M_PI;
            else if (d < -M_PI)
                offset += 2.0 * M_PI;
        }
        ph[i] = raw + offset;
        prev = raw;
    }
    return ph;
}

// Sorted, exact-duplicate-free copy; metrics must not care how often a row
// was supplied.
inline std::vector<SweepRow> canonical_table(const std::vector<SweepRow>& table)
{
    std::vector<SweepRow> rows = table;
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.f_hz < b.f_hz; });
    rows.erase(std::unique(rows.begin(), rows.end(),
                           [](const SweepRow& a, const SweepRow& b) { return a.f_hz == b.f_hz; }),
               rows.end());
    return rows;
}

} // namespace detail

// One row per grid point on the two-stage model: S-parameters at z0 = rs
// plus the 50-ohm-driven noise figure.  Rows are evaluated in parallel but
// always returned in grid order; solver failures carry the frequency.
inline std::vector<SweepRow> frequency_sweep(const DesignParams& p, double vctrl,
                                             const FrequencyGrid& grid,
                                             const NoiseOptions& opt = {})
{
    const std::vector<double> freqs = grid.frequencies();
    const Netlist model = build_two_stage_model(p, vctrl, opt);
    const Netlist nview = detail::noise_view(model);
    const OutputSpec out = OutputSpec::branch_current("__nmeas");

    std::vector<SweepRow> rows(freqs.size());
    detail::parallel_for(freqs.size(), [&](std::size_t i) {
        const double f = freqs[i];
        try
        {
            rows[i].f_hz = f;
            rows[i].s = port_parameters(model, f, ParamKind::S, p.rs);
            rows[i].nf_db = output_noise(nview, out, f).nf_db;
        }
        catch (const SolverError& e)
        {
            throw SolverError("at " + std::to_string(f) + " Hz: " + e.what(), e.suspects);
        }
    });
    return rows;
}

// Scalar figures from a sweep table.  Peak gain via parabolic refinement of
// the dB samples, band edges via linear crossing interpolation, everything
// in x = log10(f).  Edges that run off the table are reported at the grid
// boundary with the matching clipped flag set.
inline SweepMetrics extract_metrics(const std::vector<SweepRow>& table,
                                    const std::optional<LinearityInputs>& lin = {})
{
    const std::vector<SweepRow> rows = detail::canonical_table(table);
    if (rows.empty())
        throw std::invalid_argument("extract_metrics needs a non-empty table");
    const std::size_t n = rows.size();
    for (const auto& r : rows)
        if (r.s.m.rows() != 2 || r.s.m.cols() != 2)
            throw std::invalid_argument("extract_metrics needs two-port rows");

    std::vector<double> x(n), gain(n), s11(n), nf(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        x[i] = std::log10(rows[i].f_hz);
        gain[i] = detail::db20(rows[i].s.m(1, 0));
        s11[i] = detail::db20(rows[i].s.m(0, 0));
        nf[i] = rows[i].nf_db;
    }
    const std::vector<double> phase = detail::unwrapped_phase_rad(rows);

    SweepMetrics m;

    // Peak gain and f0.
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (gain[i] > gain[imax])
            imax = i;
    double xpk = x[imax], ypk = gain[imax];
    if (imax > 0 && imax + 1 < n)
        detail::parabolic_peak(&x[imax - 1], &gain[imax - 1], xpk, ypk);
    m.f0_hz = std::pow(10.0, xpk);
    m.peak_gain_db = ypk;
    m.nf_at_f0_db = detail::interp_at(x, nf, xpk);
    m.phase_at_f0_deg = detail::interp_at(x, phase, xpk) * 180.0 / M_PI;

    // -3 dB band edges, walking outward from the peak sample.
    const double thr = m.peak_gain_db - 3.0;
    m.bw_low_clipped = true;
    m.bw_low_hz = rows.front().f_hz;
    for (std::size_t i = imax; i > 0; --i)
        if (gain[i - 1] < thr)
        {
            const double t = (thr - gain[i]) / (gain[i - 1] - gain[i]);
            m.bw_low_hz = std::pow(10.0, x[i] + t * (x[i - 1] - x[i]));
            m.bw_low_clipped = false;
            break;
        }
    m.bw_high_clipped = true;
    m.bw_high_hz = rows.back().f_hz;
    for (std::size_t i = imax; i + 1 < n; ++i)
        if (gain[i + 1] < thr)
        {
            const double t = (thr - gain[i]) / (gain[i + 1] - gain[i]);
            m.bw_high_hz = std::pow(10.0, x[i] + t * (x[i + 1] - x[i]));
            m.bw_high_clipped = false;
            break;
        }
    m.bw_3db_hz = m.bw_high_hz - m.bw_low_hz;

    // S11 minimum (refined the same way, sign flipped).
    std::size_t imin = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (s11[i] < s11[imin])
            imin = i;
    double xm = x[imin], ym = s11[imin];
    if (imin > 0 && imin + 1 < n)
    {
        std::vector<double> neg{-s11[imin - 1], -s11[imin], -s11[imin + 1]};
        detail::parabolic_peak(&x[imin - 1], neg.data(), xm, ym);
        ym = -ym;
    }
    m.f_s11_min_hz = std::pow(10.0, xm);
    m.s11_min_db = ym;

    // Widest contiguous band below -10 dB containing the minimum.
    m.matched = s11[imin] < -10.0;
    if (m.matched)
    {
        m.match_low_clipped = true;
        m.match_low_hz = rows.front().f_hz;
        for (std::size_t i = imin; i > 0; --i)
            if (s11[i - 1] >= -10.0)
            {
                const double t = (-10.0 - s11[i]) / (s11[i - 1] - s11[i]);
                m.match_low_hz = std::pow(10.0, x[i] + t * (x[i - 1] - x[i]));
                m.match_low_clipped = false;
                break;
            }
        m.match_high_clipped = true;
        m.match_high_hz = rows.back().f_hz;
        for (std::size_t i = imin; i + 1 < n; ++i)
            if (s11[i + 1] >= -10.0)
            {
                const double t = (-10.0 - s11[i]) / (s11[i + 1] - s11[i]);
                m.match_high_hz = std::pow(10.0, x[i] + t * (x[i + 1] - x[i]));
                m.match_high_clipped = false;
                break;
            }
        m.matching_band_hz = m.match_high_hz - m.match_low_hz;
    }

    if (lin)
        m.fom_db = fom({m.peak_gain_db, m.bw_3db_hz / 1e9, m.f0_hz / 1e9, lin->iip3_dbm,
                        m.nf_at_f0_db, lin->pdc_mw});
    return m;
}

struct VctrlEntry
{
    double vctrl = 0.0;
    SweepMetrics metrics;
    double phase_dev_deg = 0.0;  // vs. the lowest-vctrl entry, at its f0
};

struct VctrlSweepResult
{
    std::vector<VctrlEntry> entries;
    double peak_gain_spread_db = 0.0;
    double f0_spread_hz = 0.0;
};

// Metrics per control voltage, plus the spreads across the set and the
// unwrapped-phase deviation relative to the lowest control voltage, read at
// that reference entry's f0.
inline VctrlSweepResult vctrl_sweep(const DesignParams& p, const std::vector<double>& vgrid,
                                    const FrequencyGrid& fgrid, const NoiseOptions& opt = {},
                                    const std::optional<LinearityInputs>& lin = {})
{
    if (vgrid.empty())
        throw std::invalid_argument("vctrl_sweep needs at least one control voltage");

    std::vector<std::vector<SweepRow>> tables(vgrid.size());
    for (std::size_t i = 0; i < vgrid.size(); ++i)
        tables[i] = frequency_sweep(p, vgrid[i], fgrid, opt);

    VctrlSweepResult out;
    std::size_t iref = 0;
    for (std::size_t i = 1; i < vgrid.size(); ++i)
        if (vgrid[i] < vgrid[iref])
            iref = i;

    std::vector<double> xref;
    for (const auto& r : tables[iref])
        xref.push_back(std::log10(r.f_hz));

    out.entries.resize(vgrid.size());
    for (std::size_t i = 0; i < vgrid.size(); ++i)
    {
        out.entries[i].vctrl = vgrid[i];
        out.entries[i].metrics = extract_metrics(tables[i], lin);
    }

    const double x0 = std::log10(out.entries[iref].metrics.f0_hz);
    const std::vector<double> ph_ref = detail::unwrapped_phase_rad(tables[iref]);
    const double ref_phase = detail::interp_at(xref, ph_ref, x0);
    for (std::size_t i = 0; i < vgrid.size(); ++i)
    {
        const std::vector<double> ph = detail::unwrapped_phase_rad(tables[i]);
        const double at = detail::interp_at(xref, ph, x0);
        out.entries[i].phase_dev_deg = std::abs(at - ref_phase) * 180.0 / M_PI;
    }

    double gmin = out.entries.front().metrics.peak_gain_db, gmax = gmin;
    double fmin = out.entries.front().metrics.f0_hz, fmax = fmin;
    for (const auto& e : out.entries)
    {
        gmin = std::min(gmin, e.metrics.peak_gain_db);
        gmax = std::max(gmax, e.metrics.peak_gain_db);
        fmin = std::min(fmin, e.metrics.f0_hz);
        fmax = std::max(fmax, e.metrics.f0_hz);
    }
    out.peak_gain_spread_db = gmax - gmin;
    out.f0_spread_hz = fmax - fmin;
    return out;
}

// Process corner applied to the electrical parameters: transconductances and
// Cgs scale, the VG device threshold shifts.  The matching inductors stay at
// their nominal values, so corners detune the design the way silicon would.
inline DesignParams apply_corner(const DesignParams& p, const CornerFactors& c)
{
    if (!(c.gm_scale > 0.0) || !(c.cgs_scale > 0.0))
        throw std::domain_error("corner scale factors must be positive");
    DesignParams q = p;
    q.gm1 *= c.gm_scale;
    q.gm2 *= c.gm_scale;
    q.cgs *= c.cgs_scale;
    q.vg_device.vth += c.vt_shift;
    q.corner_scale = c;
    return q;
}

struct CornerEntry
{
    CornerFactors corner;
    SweepMetrics metrics;
};

inline std::vector<CornerEntry> corner_sweep(const DesignParams& p,
                                             const std::vector<CornerFactors>& corners,
                                             const FrequencyGrid& fgrid, double vctrl,
                                             const NoiseOptions& opt = {},
                                             const std::optional<LinearityInputs>& lin = {})
{
    std::vector<CornerEntry> out(corners.size());
    for (std::size_t i = 0; i < corners.size(); ++i)
    {
        out[i].corner = corners[i];
        out[i].metrics = extract_metrics(frequency_sweep(apply_corner(p, corners[i]), vctrl,
                                                         fgrid, opt),
                                         lin);
    }
    return out;
}

} // namespace rfss
