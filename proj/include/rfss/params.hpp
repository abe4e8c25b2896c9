// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

// All quantities are SI unless a field name says otherwise:
// ohms, farads, henries, siemens, hertz, volts, kelvin.

namespace rfss
{

constexpr double kBoltzmann = 1.380649e-23;  // J/K
constexpr double kT0 = 290.0;                // noise reference temperature, K
constexpr double kVctrlMax = 0.7;            // V, supply rail = calibrated range end

// Smooth triode model for the variable-gain device M_VG seen as a resistor.
struct RoVgCalibration
{
    double vth = 0.41;       // effective threshold after body bias, V
    double beta = 0.0766;    // triode conductance slope, S/V
    double r_off = 50e3;     // off-state plateau, ohms
    double blend_v = 0.02;   // softplus blend width, V

    bool operator==(const RoVgCalibration&) const = default;
};

// Body-effect parameters for VT(VSB); forward body bias has VSB < 0.
struct BodyBiasParams
{
    double vt0 = 0.46;        // zero-bias threshold, V
    double gamma_body = 0.0;  // body-effect coefficient, sqrt(V)
    double phi_f = 0.40;      // surface potential parameter (2*phi_f used), V

    bool operator==(const BodyBiasParams&) const = default;
};

// Multiplicative/additive process-corner factors applied to a DesignParams.
struct CornerFactors
{
    std::string name = "TT";
    double gm_scale = 1.0;
    double cgs_scale = 1.0;
    double vt_shift = 0.0;  // V, applied to the VG device threshold

    bool operator==(const CornerFactors&) const = default;
};

inline std::vector<CornerFactors> standard_corners()
{
    return {{"TT", 1.0, 1.0, 0.0}, {"FF", 1.15, 0.95, -0.030}, {"SS", 0.87, 1.05, 0.030}};
}

// Small-signal design values for one cascode stage plus its input match.
struct DesignParams
{
    double gm1 = 0.020;   // main device transconductance, S
    double gm2 = 0.020;   // cascode device transconductance, S
    double cgs = 20e-15;  // main device gate-source capacitance, F
    double lg = 0.0;      // gate inductance, H
    double ls = 0.0;      // source (degeneration) inductance, H; 0 disables
    double k = 0.0;       // Lg-Ls coupling coefficient, [0, 1)
    double c0 = 0.75e-12; // series capacitor of the variable-gain branch, F
    double ro1 = 2e3;     // main device output resistance, ohms
    double ro2 = 2e3;     // cascode device output resistance, ohms
    double rs = 50.0;     // source resistance / port reference, ohms
    double gamma_noise = 1.0;  // channel thermal noise gamma
    double eta = 1.0;          // channel noise excess factor
    double temperature = kT0;  // K
    RoVgCalibration vg_device{};
    BodyBiasParams body{};
    CornerFactors corner_scale{};

    bool operator==(const DesignParams&) const = default;
};

// Returns human-readable problems; empty means usable by the model builders.
inline std::vector<std::string> validate(const DesignParams& p)
{
    std::vector<std::string> issues;
    auto positive = [&](double v, const char* what) {
        if (!(v > 0.0))
            issues.push_back(std::string(what) + " must be positive");
    };
    positive(p.gm1, "gm1");
    positive(p.gm2, "gm2");
    positive(p.cgs, "cgs");
    positive(p.lg, "lg");
    positive(p.c0, "c0");
    positive(p.ro1, "ro1");
    positive(p.ro2, "ro2");
    positive(p.rs, "rs");
    positive(p.temperature, "temperature");
    if (p.ls < 0.0)
        issues.push_back("ls must be non-negative");
    if (p.k < 0.0 || p.k >= 1.0)
        issues.push_back("k must lie in [0, 1)");
    if (p.k > 0.0 && p.ls == 0.0)
        issues.push_back("k requires a non-zero ls");
    if (!(p.gamma_noise > 0.0) || !(p.eta > 0.0))
        issues.push_back("gamma_noise and eta must be positive");
    if (!(p.vg_device.beta > 0.0) || !(p.vg_device.r_off > 0.0) || !(p.vg_device.blend_v > 0.0))
        issues.push_back("vg_device calibration must have positive beta, r_off, blend_v");
    return issues;
}

// Inputs for the figure-of-merit; all already normalized to the stated units.
struct FomInputs
{
    double gain_db = 0.0;
    double bw_ghz = 0.0;
    double f0_ghz = 0.0;
    double iip3_dbm = 0.0;
    double nf_db = 0.0;
    double pdc_mw = 0.0;

    bool operator==(const FomInputs&) const = default;
};

} // namespace rfss
