// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "rfss/params.hpp"

// Closed-form small-signal results for the inductively degenerated cascode
// LNA with coupled Lg/Ls and a series C0-r_oVG variable-gain branch.  The
// numeric MNA engine (mna.hpp) is the independent cross-check for all of
// these; they must agree wherever both apply.

namespace rfss
{

inline double mutual_inductance(const DesignParams& p)
{
    return p.k * std::sqrt(p.lg * p.ls);
}

inline void require_valid(const DesignParams& p)
{
    auto issues = validate(p);
    if (!issues.empty())
        throw std::invalid_argument("invalid design parameters: " + issues.front());
}

inline void require_rf_frequency(double f_hz)
{
    if (!(f_hz > 0.0))
        throw std::domain_error("frequency must be positive");
}

// Impedance looking into the gate inductor with the cascode point at AC
// ground: Zin = gm1(Ls+M)/Cgs + 1/(sCgs) + s(Lg+Ls+2M).  The magnetic
// feedback raises the real part without extra degeneration inductance.
inline std::complex<double> input_impedance_cf(const DesignParams& p, double f_hz)
{
    require_valid(p);
    require_rf_frequency(f_hz);
    const double m = mutual_inductance(p);
    const std::complex<double> s(0.0, 2.0 * M_PI * f_hz);
    return p.gm1 * (p.ls + m) / p.cgs + 1.0 / (s * p.cgs) + s * (p.lg + p.ls + 2.0 * m);
}

// Denominator shared by the feedback-current and noise-transfer expressions.
inline std::complex<double> detail_loop_denominator(const DesignParams& p, std::complex<double> s)
{
    const double m = mutual_inductance(p);
    const double ltot = p.lg + p.ls + 2.0 * m;
    return s * s * p.cgs * ltot + s * (p.gm1 * (p.ls + m) + p.cgs * p.rs) + 1.0;
}

// Gate-branch current per unit M1 channel-noise current, with the current
// measured flowing from the gate node back into the source network, so the
// low-frequency real part is negative (negative feedback).
inline std::complex<double> feedback_noise_current_cf(const DesignParams& p, double f_hz)
{
    require_valid(p);
    require_rf_frequency(f_hz);
    const double m = mutual_inductance(p);
    const std::complex<double> s(0.0, 2.0 * M_PI * f_hz);
    return s * s * p.cgs * (m + p.ls) / detail_loop_denominator(p, s);
}

// |H|^2 from the M1 channel-noise current to the short-circuit drain current.
// The numerator lacks the gm1(Ls+M) loop term: the feedback subtracts noise.
inline double m1_noise_transfer_cf(const DesignParams& p, double f_hz)
{
    require_valid(p);
    require_rf_frequency(f_hz);
    const double m = mutual_inductance(p);
    const double ltot = p.lg + p.ls + 2.0 * m;
    const std::complex<double> s(0.0, 2.0 * M_PI * f_hz);
    const std::complex<double> num = s * s * p.cgs * ltot + s * p.cgs * p.rs + 1.0;
    return std::norm(num / detail_loop_denominator(p, s));
}

// Noise factor of the degenerated stage with only the M1 channel noise and
// the source resistor counted: F = 1 + gamma*eta*|1 + sCgsRs + s^2Cgs(Lg+
// Ls+2M)|^2 / (gm1 Rs), evaluated on the jw axis.
inline double noise_factor_cf(const DesignParams& p, double f_hz)
{
    require_valid(p);
    require_rf_frequency(f_hz);
    const double m = mutual_inductance(p);
    const double ltot = p.lg + p.ls + 2.0 * m;
    const std::complex<double> s(0.0, 2.0 * M_PI * f_hz);
    const std::complex<double> poly = s * s * p.cgs * ltot + s * p.cgs * p.rs + 1.0;
    return 1.0 + p.gamma_noise * p.eta * std::norm(poly) / (p.gm1 * p.rs);
}

// Analytic f -> 0 limit of noise_factor_cf.
inline double noise_factor_cf_dc_limit(const DesignParams& p)
{
    require_valid(p);
    return 1.0 + p.gamma_noise * p.eta / (p.gm1 * p.rs);
}

// First-stage voltage gain with the input network idealized (voltage drive
// at the gate, no Cgs loading): gm1/(1+s gm1 Ls) * (ro1 || Zc0) * (1+gm2
// ro2) with Zc0 = ro_vg + 1/(sC0).  Exact for the stage only when the
// cascode output is unloaded; the MNA model is the reference elsewhere.
inline std::complex<double> stage_gain_cf(const DesignParams& p, double ro_vg_ohms, double f_hz)
{
    require_valid(p);
    require_rf_frequency(f_hz);
    if (!(ro_vg_ohms > 0.0))
        throw std::domain_error("ro_vg must be positive");
    const std::complex<double> s(0.0, 2.0 * M_PI * f_hz);
    const std::complex<double> gm_eff = p.gm1 / (1.0 + s * p.gm1 * p.ls);
    const std::complex<double> zc0 = ro_vg_ohms + 1.0 / (s * p.c0);
    const std::complex<double> zpar = p.ro1 * zc0 / (p.ro1 + zc0);
    return gm_eff * zpar * (1.0 + p.gm2 * p.ro2);
}

// Control-voltage to channel-resistance map for M_VG: triode law 1/(beta*
// (v-vth)) softened over blend_v and saturating at r_off below threshold.
// Strictly decreasing and smooth in vctrl.
inline double ro_vg(const RoVgCalibration& c, double vctrl)
{
    if (!(vctrl >= 0.0) || vctrl > kVctrlMax)
        throw std::domain_error("vctrl outside the calibrated range [0, 0.7]");
    const double x = (vctrl - c.vth) / c.blend_v;
    // softplus with overflow guard; blend_v * log(1 + e^x)
    const double sp = c.blend_v * (x > 40.0 ? x : std::log1p(std::exp(std::min(x, 40.0))));
    return 1.0 / (c.beta * sp + 1.0 / c.r_off);
}

// Solves beta so that ro_vg(v_anchor) equals r_anchor exactly.
inline RoVgCalibration calibrate_ro_vg(double vth, double r_off, double v_anchor, double r_anchor,
                                       double blend_v = 0.02)
{
    if (!(r_anchor > 0.0) || !(r_off > r_anchor) || !(v_anchor > vth))
        throw std::invalid_argument("ro_vg calibration requires r_off > r_anchor > 0 and v_anchor > vth");
    RoVgCalibration c{vth, 1.0, r_off, blend_v};
    const double x = (v_anchor - vth) / blend_v;
    const double sp = blend_v * (x > 40.0 ? x : std::log1p(std::exp(x)));
    c.beta = (1.0 / r_anchor - 1.0 / r_off) / sp;
    return c;
}

// VT(VSB) = VT0 + gamma_body (sqrt(2 phi_f + VSB) - sqrt(2 phi_f)).
inline double threshold_voltage(const BodyBiasParams& b, double vsb)
{
    const double arg = 2.0 * b.phi_f + vsb;
    if (arg < 0.0)
        throw std::domain_error("2*phi_f + vsb must be non-negative");
    return b.vt0 + b.gamma_body * (std::sqrt(arg) - std::sqrt(2.0 * b.phi_f));
}

// Fits gamma_body so the threshold lands on vt_target at the given body bias.
inline BodyBiasParams fit_body_bias(double vt0, double vt_target, double vsb, double phi_f = 0.40)
{
    const double arg = 2.0 * phi_f + vsb;
    if (arg < 0.0)
        throw std::invalid_argument("2*phi_f + vsb must be non-negative");
    const double denom = std::sqrt(arg) - std::sqrt(2.0 * phi_f);
    if (denom == 0.0)
        throw std::invalid_argument("vsb = 0 cannot fix gamma_body");
    return BodyBiasParams{vt0, (vt_target - vt0) / denom, phi_f};
}

struct MatchResult
{
    double lg = 0.0;
    double ls = 0.0;
    double residual_real = 0.0;  // (gm1(ls+M)/cgs - rs)/rs
    double residual_res = 0.0;   // w0^2 cgs (lg+ls+2M) - 1
    int iterations = 0;
};

// Synthesizes (lg, ls) so that Re{Zin(f0)} = rs and Im{Zin(f0)} = 0.
// Damped Newton on the normalized residual pair, started from the k = 0
// closed form ls = rs*cgs/gm1, lg = 1/(w0^2 cgs) - ls.
inline MatchResult design_input_match(double gm1, double cgs, double k, double f0_hz, double rs)
{
    if (!(gm1 > 0.0) || !(cgs > 0.0) || !(f0_hz > 0.0) || !(rs > 0.0))
        throw std::invalid_argument("design_input_match requires positive gm1, cgs, f0, rs");
    if (k < 0.0 || k >= 1.0)
        throw std::invalid_argument("k must lie in [0, 1)");
    const double w0 = 2.0 * M_PI * f0_hz;
    const double budget = 1.0 / (w0 * w0 * cgs);  // lg + ls + 2M
    const double degen = rs * cgs / gm1;          // ls + M
    if (budget <= degen)
        throw std::runtime_error("no positive-inductance match: resonance budget below degeneration need");

    double ls = degen;
    double lg = budget - ls;
    if (k == 0.0)
        return {lg, ls, (gm1 * ls / cgs - rs) / rs, w0 * w0 * cgs * (lg + ls) - 1.0, 0};

    auto residuals = [&](double lgv, double lsv, double& r1, double& r2) {
        const double m = k * std::sqrt(lgv * lsv);
        r1 = (gm1 * (lsv + m) / cgs - rs) / rs;
        r2 = w0 * w0 * cgs * (lgv + lsv + 2.0 * m) - 1.0;
    };

    double r1, r2;
    residuals(lg, ls, r1, r2);
    int iter = 0;
    for (; iter < 50; ++iter)
    {
        const double err = std::max(std::abs(r1), std::abs(r2));
        if (err < 1e-13)
            break;
        const double dm_dlg = 0.5 * k * std::sqrt(ls / lg);
        const double dm_dls = 0.5 * k * std::sqrt(lg / ls);
        const double a11 = gm1 / (cgs * rs) * dm_dlg;
        const double a12 = gm1 / (cgs * rs) * (1.0 + dm_dls);
        const double a21 = w0 * w0 * cgs * (1.0 + 2.0 * dm_dlg);
        const double a22 = w0 * w0 * cgs * (1.0 + 2.0 * dm_dls);
        const double det = a11 * a22 - a12 * a21;
        if (det == 0.0)
            throw std::runtime_error("design_input_match: singular Jacobian");
        double dlg = -(a22 * r1 - a12 * r2) / det;
        double dls = -(-a21 * r1 + a11 * r2) / det;
        double scale = 1.0;
        for (int halve = 0; halve < 40; ++halve)
        {
            const double lgn = lg + scale * dlg;
            const double lsn = ls + scale * dls;
            if (lgn > 0.0 && lsn > 0.0)
            {
                double n1, n2;
                residuals(lgn, lsn, n1, n2);
                if (std::max(std::abs(n1), std::abs(n2)) < err)
                {
                    lg = lgn;
                    ls = lsn;
                    r1 = n1;
                    r2 = n2;
                    break;
                }
            }
            scale *= 0.5;
            if (halve == 39)
                throw std::runtime_error("design_input_match: line search failed");
        }
    }
    if (std::max(std::abs(r1), std::abs(r2)) >= 1e-12)
        throw std::runtime_error("design_input_match: no convergence in 50 iterations");
    return {lg, ls, r1, r2, iter};
}

struct DcBlockCheck
{
    double corner_hz = 0.0;
    double ratio = 0.0;
    bool pass = false;
};

// The VG branch must act as a through at f0: its high-pass corner
// 1/(2 pi r c0) at the minimum channel resistance has to sit well below
// the operating frequency.  Pass threshold: ratio >= 8.
inline DcBlockCheck dc_block_check(double ro_vg_min, double c0, double f0_hz)
{
    if (!(ro_vg_min > 0.0) || !(c0 > 0.0) || !(f0_hz > 0.0))
        throw std::invalid_argument("dc_block_check requires positive inputs");
    DcBlockCheck out;
    out.corner_hz = 1.0 / (2.0 * M_PI * ro_vg_min * c0);
    out.ratio = f0_hz / out.corner_hz;
    out.pass = out.ratio >= 8.0;
    return out;
}

// FoM = 20 log10[ G_abs * BW_GHz * f0_GHz * IIP3_mW / ((F-1) * Pdc_mW) ]
// with G_abs the power-ratio form 10^(gain_db/10).
inline double fom(const FomInputs& in)
{
    if (!(in.nf_db > 0.0))
        throw std::domain_error("fom requires nf_db > 0 (F - 1 must be positive)");
    if (!(in.bw_ghz > 0.0) || !(in.f0_ghz > 0.0) || !(in.pdc_mw > 0.0))
        throw std::domain_error("fom requires positive bw_ghz, f0_ghz, pdc_mw");
    const double gain_abs = std::pow(10.0, in.gain_db / 10.0);
    const double iip3_mw = std::pow(10.0, in.iip3_dbm / 10.0);
    const double f_minus_1 = std::pow(10.0, in.nf_db / 10.0) - 1.0;
    return 20.0 * std::log10(gain_abs * in.bw_ghz * in.f0_ghz * iip3_mw / (f_minus_1 * in.pdc_mw));
}

constexpr double kReferenceF0 = 40e9;  // Hz, center of the bundled design

// The bundled reference point: 20 mS / 20 fF devices, k = 0.3 coupling,
// input matched to 50 ohms at 40 GHz, VG branch calibrated to 45 ohms at
// vctrl = 0.7 V with the body-biased 0.41 V threshold.
inline DesignParams make_reference_design()
{
    DesignParams p;
    p.gm1 = 0.020;
    p.gm2 = 0.020;
    p.cgs = 20e-15;
    p.k = 0.3;
    p.c0 = 0.75e-12;
    p.ro1 = 2e3;
    p.ro2 = 2e3;
    p.rs = 50.0;
    p.gamma_noise = 1.0;
    p.eta = 1.0;
    p.temperature = kT0;
    const MatchResult m = design_input_match(p.gm1, p.cgs, p.k, kReferenceF0, p.rs);
    p.lg = m.lg;
    p.ls = m.ls;
    p.body = fit_body_bias(0.46, 0.41, -0.55, 0.40);
    p.vg_device = calibrate_ro_vg(threshold_voltage(p.body, -0.55), 50e3, 0.7, 45.0);
    return p;
}

} // namespace rfss
