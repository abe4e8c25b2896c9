// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "rfss/lna.hpp"
#include "rfss/netlist.hpp"
#include "rfss/params.hpp"

// Factories for the specific LNA small-signal netlists.  Element values come
// straight from DesignParams; zero-valued optional parts (ls, k) are omitted
// rather than stamped at zero.  Excitation convention: every model carries a
// 1 V source "Vs" behind "Rs", and port 1 declares that pair as its source
// branch so network-parameter extraction unplugs it.

namespace rfss
{

constexpr double kInterstageCap = 10e-12;  // F, transparent DC block at RF

struct NoiseOptions
{
    bool include_cascode_noise = false;  // channel noise of the cascode devices
    bool include_vg_noise = false;       // thermal noise of the VG channel resistance

    bool operator==(const NoiseOptions&) const = default;
};

namespace detail
{

// Source branch: ground - Vs - src - Rs - in; thermal noise of Rs is the
// reference input-source noise.
inline void append_source(Netlist& n, const DesignParams& p)
{
    n.add(ElementKind::VoltageSource, "Vs", "src", kGround, 1.0);
    n.add(ElementKind::Resistor, "Rs", "src", "in", p.rs);
    n.noise_sources.push_back({NoiseKind::ThermalResistor, "Rs_noise", "Rs", "", "", 0.0, 1.0, 1.0,
                               p.temperature, true});
    n.ports.push_back({"p1", "in", p.rs, {"Vs", "Rs"}});
}

// Matched input network and main device of one stage; returns the drain node.
inline std::string append_input_device(Netlist& n, const DesignParams& p, const std::string& sfx,
                                       const std::string& in_node)
{
    const std::string gate = "g" + sfx;
    const std::string source = p.ls > 0.0 ? "s" + sfx : kGround;
    const std::string drain = "d" + sfx;
    n.add(ElementKind::Inductor, "Lg" + sfx, in_node, gate, p.lg);
    n.add(ElementKind::Capacitor, "Cgs" + sfx, gate, source, p.cgs);
    if (p.ls > 0.0)
    {
        n.add(ElementKind::Inductor, "Ls" + sfx, source, kGround, p.ls);
        if (p.k > 0.0)
            n.couplings.push_back({"Lg" + sfx, "Ls" + sfx, p.k});
    }
    n.add_vccs("M" + sfx, drain, source, gate, source, p.gm1);
    n.noise_sources.push_back({NoiseKind::ChannelThermal, "M" + sfx + "_noise", "M" + sfx, "", "",
                               0.0, p.gamma_noise, p.eta, p.temperature, false});
    return drain;
}

// Cascode on top of the given drain node, with ro1 and (optionally) the
// series C0-ro_vg branch loading that node; returns the stage output node.
inline std::string append_cascode(Netlist& n, const DesignParams& p, const std::string& sfx,
                                  const std::string& drain, std::optional<double> ro_vg_ohms,
                                  const NoiseOptions& opt)
{
    const std::string out = "out" + sfx;
    n.add(ElementKind::Resistor, "Ro1" + sfx, drain, kGround, p.ro1);
    if (ro_vg_ohms)
    {
        const std::string tap = "vg" + sfx;
        n.add(ElementKind::Capacitor, "C0" + sfx, drain, tap, p.c0);
        n.add(ElementKind::Resistor, "Rvg" + sfx, tap, kGround, *ro_vg_ohms);
        if (opt.include_vg_noise)
            n.noise_sources.push_back({NoiseKind::ThermalResistor, "Rvg" + sfx + "_noise",
                                       "Rvg" + sfx, "", "", 0.0, 1.0, 1.0, p.temperature, false});
    }
    n.add_vccs("Mc" + sfx, out, drain, kGround, drain, p.gm2);
    n.add(ElementKind::Resistor, "Ro2" + sfx, out, drain, p.ro2);
    if (opt.include_cascode_noise)
        n.noise_sources.push_back({NoiseKind::ChannelThermal, "Mc" + sfx + "_noise", "Mc" + sfx,
                                   "", "", 0.0, p.gamma_noise, p.eta, p.temperature, false});
    return out;
}

} // namespace detail

// Input/noise model: matched input network and main device with the cascode
// point held at AC ground by a 0 V measuring source, whose branch current is
// the short-circuit output current.
inline Netlist build_input_model(const DesignParams& p)
{
    require_valid(p);
    Netlist n;
    detail::append_source(n, p);
    const std::string drain = detail::append_input_device(n, p, "1", "in");
    n.add(ElementKind::VoltageSource, "Vmeas", drain, kGround, 0.0);
    return n;
}

// One full stage: matched input, main device, cascode, ro1 and the series
// C0-ro_vg branch at the main-device drain.  Port 2 is the cascode output.
inline Netlist build_first_stage_model(const DesignParams& p, double ro_vg_ohms,
                                       const NoiseOptions& opt = {})
{
    require_valid(p);
    if (!(ro_vg_ohms > 0.0))
        throw std::domain_error("ro_vg must be positive");
    Netlist n;
    detail::append_source(n, p);
    const std::string drain = detail::append_input_device(n, p, "1", "in");
    const std::string out = detail::append_cascode(n, p, "1", drain, ro_vg_ohms, opt);
    n.ports.push_back({"p2", out, p.rs, {}});
    return n;
}

// Two cascode stages: the variable-gain first stage DC-blocked into an
// identical replica without the VG branch.  ro_vg follows vctrl through the
// calibrated channel-resistance map.
inline Netlist build_two_stage_model(const DesignParams& p, double vctrl,
                                     const NoiseOptions& opt = {})
{
    require_valid(p);
    if (!(vctrl >= 0.0) || vctrl > kVctrlMax)
        throw std::domain_error("vctrl outside the calibrated range [0, 0.7]");
    const double rvg = ro_vg(p.vg_device, vctrl);
    Netlist n;
    detail::append_source(n, p);
    const std::string d1 = detail::append_input_device(n, p, "1", "in");
    const std::string out1 = detail::append_cascode(n, p, "1", d1, rvg, opt);
    n.add(ElementKind::Capacitor, "Cc", out1, "in2", kInterstageCap);
    const std::string d2 = detail::append_input_device(n, p, "2", "in2");
    const std::string out2 = detail::append_cascode(n, p, "2", d2, std::nullopt, opt);
    n.ports.push_back({"p2", out2, p.rs, {}});
    return n;
}

} // namespace rfss
