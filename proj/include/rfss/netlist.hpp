// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

// Immutable small-signal netlist model.  Netlists are value types built
// once (single-threaded) and shared read-only afterwards; every analysis
// takes a const reference.  The ground node is named "0".

namespace rfss
{

inline const std::string kGround = "0";

enum class ElementKind
{
    Resistor,
    Capacitor,
    Inductor,
    Vccs,
    VoltageSource,
    CurrentSource,
};

inline const char* to_string(ElementKind k)
{
    switch (k)
    {
        case ElementKind::Resistor: return "resistor";
        case ElementKind::Capacitor: return "capacitor";
        case ElementKind::Inductor: return "inductor";
        case ElementKind::Vccs: return "vccs";
        case ElementKind::VoltageSource: return "independent-voltage-source";
        case ElementKind::CurrentSource: return "independent-current-source";
    }
    return "?";
}

// Two-terminal element between nodes a and b.  For sources and the vccs,
// positive current flows from a through the element into b.  A vccs drives
// value * v(cp, cm) that way (SPICE G convention: a = drain, b = source).
struct Element
{
    ElementKind kind = ElementKind::Resistor;
    std::string name;
    std::string a;
    std::string b;
    std::string cp;  // vccs control +, empty otherwise
    std::string cm;  // vccs control -, empty otherwise
    double value = 0.0;

    bool operator==(const Element&) const = default;
};

// Coupling between two named inductors; M = k sqrt(La Lb), same-sign dots.
struct MutualCoupling
{
    std::string a;
    std::string b;
    double k = 0.0;

    bool operator==(const MutualCoupling&) const = default;
};

enum class NoiseKind
{
    WhiteCurrent,     // fixed PSD, A^2/Hz
    ThermalResistor,  // 4 k T / R across the named resistor
    ChannelThermal,   // 4 k T gamma eta gm across the named vccs
};

// Stationary noise source.  Either attached to a named element (thermal /
// channel, injected across its terminals with the element's orientation)
// or standing alone across a node pair (white).  Exactly one source in a
// netlist used for noise figures must be flagged as the input source.
struct NoiseSource
{
    NoiseKind kind = NoiseKind::WhiteCurrent;
    std::string name;
    std::string element;  // referenced element, empty for standalone
    std::string a;        // standalone injection nodes
    std::string b;
    double psd = 0.0;     // A^2/Hz, WhiteCurrent only
    double gamma = 1.0;   // ChannelThermal only
    double eta = 1.0;     // ChannelThermal only
    double temperature = 290.0;  // K, thermal kinds
    bool is_input = false;

    bool operator==(const NoiseSource&) const = default;
};

// Ground-referenced port.  source_elements name the Thevenin branch
// (e.g. excitation source plus source resistor) that network-parameter
// extraction unplugs before driving the port.
struct Port
{
    std::string name;
    std::string node;
    double z0 = 50.0;
    std::vector<std::string> source_elements;

    bool operator==(const Port&) const = default;
};

struct Netlist
{
    std::vector<std::string> nodes;  // insertion order, ground excluded
    std::vector<Element> elements;
    std::vector<MutualCoupling> couplings;
    std::vector<Port> ports;
    std::vector<NoiseSource> noise_sources;

    bool operator==(const Netlist&) const = default;

    void add_node(const std::string& n)
    {
        if (n != kGround && std::find(nodes.begin(), nodes.end(), n) == nodes.end())
            nodes.push_back(n);
    }

    Element& add(ElementKind kind, std::string name, std::string a, std::string b, double value)
    {
        add_node(a);
        add_node(b);
        elements.push_back({kind, std::move(name), std::move(a), std::move(b), "", "", value});
        return elements.back();
    }

    Element& add_vccs(std::string name, std::string a, std::string b, std::string cp,
                      std::string cm, double gm)
    {
        add_node(a);
        add_node(b);
        add_node(cp);
        add_node(cm);
        elements.push_back({ElementKind::Vccs, std::move(name), std::move(a), std::move(b),
                            std::move(cp), std::move(cm), gm});
        return elements.back();
    }

    const Element* find(const std::string& name) const
    {
        for (const auto& e : elements)
            if (e.name == name)
                return &e;
        return nullptr;
    }
};

struct Diagnostic
{
    std::string code;
    std::string subject;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

// Structural checks; an empty result is the precondition for every solver
// entry point.  Conduction edges are all element terminal pairs except the
// vccs control pair, which only has to reference existing nodes.
inline std::vector<Diagnostic> validate(const Netlist& n)
{
    std::vector<Diagnostic> out;
    std::set<std::string> known(n.nodes.begin(), n.nodes.end());
    known.insert(kGround);

    std::set<std::string> names;
    for (const auto& e : n.elements)
    {
        if (!names.insert(e.name).second)
            out.push_back({"duplicate-element-name", e.name, "element name reused"});
        for (const std::string* t : {&e.a, &e.b})
            if (!known.count(*t))
                out.push_back({"dangling-terminal", e.name, "terminal node '" + *t + "' not declared"});
        if (e.kind == ElementKind::Vccs)
        {
            for (const std::string* t : {&e.cp, &e.cm})
                if (!known.count(*t))
                    out.push_back({"dangling-terminal", e.name,
                                   "control node '" + *t + "' not declared"});
        }
        const bool passive = e.kind == ElementKind::Resistor || e.kind == ElementKind::Capacitor ||
                             e.kind == ElementKind::Inductor;
        if (passive && !(e.value > 0.0))
            out.push_back({"nonpositive-value", e.name, "passive element value must be positive"});
        if (e.kind == ElementKind::Vccs && !(e.value > 0.0))
            out.push_back({"nonpositive-value", e.name, "vccs transconductance must be positive"});
        if (e.a == e.b)
            out.push_back({"self-loop", e.name, "element terminals coincide"});
    }

    for (const auto& c : n.couplings)
    {
        const Element* ea = n.find(c.a);
        const Element* eb = n.find(c.b);
        if (c.a == c.b)
            out.push_back({"coupling-self", c.a, "coupling references one inductor twice"});
        for (auto [label, el] : {std::pair{c.a, ea}, std::pair{c.b, eb}})
        {
            if (el == nullptr)
                out.push_back({"coupling-unknown-inductor", label, "coupled element does not exist"});
            else if (el->kind != ElementKind::Inductor)
                out.push_back({"coupling-not-inductor", label, "coupled element is not an inductor"});
        }
        if (!(std::abs(c.k) < 1.0))
            out.push_back({"coupling-out-of-range", c.a + "/" + c.b, "|k| must be below 1"});
    }

    for (const auto& p : n.ports)
    {
        if (!known.count(p.node))
            out.push_back({"port-unknown-node", p.name, "port node '" + p.node + "' not declared"});
        if (!(p.z0 > 0.0))
            out.push_back({"port-bad-z0", p.name, "port reference impedance must be positive"});
        for (const auto& se : p.source_elements)
            if (n.find(se) == nullptr)
                out.push_back({"port-source-unknown-element", p.name,
                               "port source element '" + se + "' does not exist"});
    }
    std::set<std::string> port_names;
    for (const auto& p : n.ports)
        if (!port_names.insert(p.name).second)
            out.push_back({"duplicate-port", p.name, "port name reused"});

    for (const auto& s : n.noise_sources)
    {
        if (!s.element.empty())
        {
            const Element* e = n.find(s.element);
            if (e == nullptr)
                out.push_back({"noise-unknown-element", s.name,
                               "noise source references missing element '" + s.element + "'"});
            else if (s.kind == NoiseKind::ThermalResistor && e->kind != ElementKind::Resistor)
                out.push_back({"noise-kind-mismatch", s.name, "thermal source must name a resistor"});
            else if (s.kind == NoiseKind::ChannelThermal && e->kind != ElementKind::Vccs)
                out.push_back({"noise-kind-mismatch", s.name, "channel source must name a vccs"});
        }
        else
        {
            for (const std::string* t : {&s.a, &s.b})
                if (!known.count(*t))
                    out.push_back({"noise-unknown-node", s.name,
                                   "noise injection node '" + *t + "' not declared"});
        }
    }

    // Every node must conduct to ground, or its KCL row is singular.
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& e : n.elements)
    {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    std::set<std::string> reached{kGround};
    std::vector<std::string> stack{kGround};
    while (!stack.empty())
    {
        std::string at = stack.back();
        stack.pop_back();
        for (const auto& next : adj[at])
            if (reached.insert(next).second)
                stack.push_back(next);
    }
    for (const auto& node : n.nodes)
        if (!reached.count(node))
            out.push_back({"floating-node", node, "node has no conduction path to ground"});

    return out;
}

} // namespace rfss
