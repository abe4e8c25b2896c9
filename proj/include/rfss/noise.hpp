// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfss/mna.hpp"
#include "rfss/netlist.hpp"
#include "rfss/params.hpp"

// Stationary noise by superposition: every source is replaced in turn by a
// unit deterministic current at its injection pair, the complex transfer to
// the chosen output is solved, and per-source output PSDs |H|^2 * S_in add
// up (sources are uncorrelated).  The noise factor is total output noise
// over the part caused by the flagged input source.

namespace rfss
{

// Output quantity: voltage between two nodes, or current through an element.
struct OutputSpec
{
    bool is_current = false;
    std::string a;        // voltage nodes (b may be ground)
    std::string b = kGround;
    std::string element;  // current through this element

    static OutputSpec node_voltage(std::string p, std::string m = kGround)
    {
        OutputSpec o;
        o.a = std::move(p);
        o.b = std::move(m);
        return o;
    }

    static OutputSpec branch_current(std::string element)
    {
        OutputSpec o;
        o.is_current = true;
        o.element = std::move(element);
        return o;
    }
};

inline std::complex<double> output_value(const Netlist& n, const AcSolution& sol,
                                         const OutputSpec& out)
{
    if (out.is_current)
        return element_current(n, sol, out.element);
    return sol.voltage(out.a) - sol.voltage(out.b);
}

namespace detail
{

inline const NoiseSource& find_noise_source(const Netlist& n, const std::string& name)
{
    for (const auto& s : n.noise_sources)
        if (s.name == name)
            return s;
    throw std::invalid_argument("no noise source named '" + name + "'");
}

// Injection terminals: the referenced element's pair, oriented like the
// element itself, or the standalone node pair.
inline std::pair<std::string, std::string> injection_pair(const Netlist& n, const NoiseSource& s)
{
    if (s.element.empty())
        return {s.a, s.b};
    const Element* e = n.find(s.element);
    if (e == nullptr)
        throw std::invalid_argument("noise source '" + s.name + "' references missing element");
    return {e->a, e->b};
}

// One-sided current PSD in A^2/Hz.
inline double source_psd(const Netlist& n, const NoiseSource& s)
{
    switch (s.kind)
    {
        case NoiseKind::WhiteCurrent:
            return s.psd;
        case NoiseKind::ThermalResistor:
        {
            const Element* e = n.find(s.element);
            return 4.0 * kBoltzmann * s.temperature / e->value;
        }
        case NoiseKind::ChannelThermal:
        {
            const Element* e = n.find(s.element);
            return 4.0 * kBoltzmann * s.temperature * s.gamma * s.eta * e->value;
        }
    }
    return 0.0;
}

} // namespace detail

// Complex transfer from a unit current at the named source's location to
// the output quantity, with all independent sources zeroed.
inline std::complex<double> noise_transfer(const Netlist& n, const std::string& source,
                                           const OutputSpec& out, double f_hz)
{
    const NoiseSource& s = detail::find_noise_source(n, source);
    const auto [a, b] = detail::injection_pair(n, s);
    const AcSolution sol = solve_with_injection(n, f_hz, a, b);
    return output_value(n, sol, out);
}

struct NoiseContribution
{
    std::string source;
    double psd_in = 0.0;   // A^2/Hz at the injection point
    double psd_out = 0.0;  // output units squared per Hz
    bool is_input = false;
};

struct NoiseReport
{
    double f_hz = 0.0;
    std::vector<NoiseContribution> contributions;
    double total_psd = 0.0;
    double input_psd = 0.0;  // output noise caused by the input source alone
    double noise_factor = 1.0;
    double nf_db = 0.0;
};

// Superposition over every attached noise source.  Exactly one source must
// be flagged as the input reference, and it must reach the output.
inline NoiseReport output_noise(const Netlist& n, const OutputSpec& out, double f_hz)
{
    detail::require_clean(n);
    detail::require_ac(f_hz);
    int inputs = 0;
    for (const auto& s : n.noise_sources)
        inputs += s.is_input ? 1 : 0;
    if (inputs != 1)
        throw std::invalid_argument("noise analysis needs exactly one input-flagged source, found " +
                                    std::to_string(inputs));

    NoiseReport rep;
    rep.f_hz = f_hz;
    for (const auto& s : n.noise_sources)
    {
        const auto [a, b] = detail::injection_pair(n, s);
        const AcSolution sol = solve_with_injection(n, f_hz, a, b);
        const double h2 = std::norm(output_value(n, sol, out));
        const double pin = detail::source_psd(n, s);
        NoiseContribution c{s.name, pin, h2 * pin, s.is_input};
        rep.total_psd += c.psd_out;
        if (s.is_input)
            rep.input_psd = c.psd_out;
        rep.contributions.push_back(std::move(c));
    }
    if (!(rep.input_psd > 0.0))
        throw SolverError("input noise source does not reach the output; noise factor undefined");
    rep.noise_factor = rep.total_psd / rep.input_psd;
    rep.nf_db = 10.0 * std::log10(rep.noise_factor);
    return rep;
}

} // namespace rfss
