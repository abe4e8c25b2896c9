// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "rfss/lna.hpp"
#include "rfss/netlist.hpp"
#include "rfss/params.hpp"
#include "rfss/sweep.hpp"

// JSON front door for the CLI: netlists and design-parameter files.  Field
// names here are a public contract (documented in the README); parsing is
// strict about shapes and loud about locations, so a schema mistake points
// at the offending entry instead of a generic type error.

namespace rfss
{

namespace detail
{

[[noreturn]] inline void schema_fail(const std::string& where, const std::string& what)
{
    throw std::invalid_argument(where + ": " + what);
}

inline const nlohmann::json& need(const nlohmann::json& j, const char* key,
                                  const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
        schema_fail(where, std::string("missing key '") + key + "'");
    return j.at(key);
}

inline std::string need_string(const nlohmann::json& j, const char* key,
                               const std::string& where)
{
    const auto& v = need(j, key, where);
    if (!v.is_string())
        schema_fail(where, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

inline double need_number(const nlohmann::json& j, const char* key, const std::string& where)
{
    const auto& v = need(j, key, where);
    if (!v.is_number())
        schema_fail(where, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

inline double opt_number(const nlohmann::json& j, const char* key, double fallback,
                         const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
        return fallback;
    const auto& v = j.at(key);
    if (!v.is_number())
        schema_fail(where, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

inline ElementKind element_kind_from(const std::string& s, const std::string& where)
{
    for (ElementKind k : {ElementKind::Resistor, ElementKind::Capacitor, ElementKind::Inductor,
                          ElementKind::Vccs, ElementKind::VoltageSource,
                          ElementKind::CurrentSource})
        if (s == to_string(k))
            return k;
    schema_fail(where, "unknown element kind '" + s +
                           "' (expected resistor | capacitor | inductor | vccs | "
                           "independent-voltage-source | independent-current-source)");
}

inline NoiseKind noise_kind_from(const std::string& s, const std::string& where)
{
    if (s == "white-current")
        return NoiseKind::WhiteCurrent;
    if (s == "thermal-resistor")
        return NoiseKind::ThermalResistor;
    if (s == "channel-thermal")
        return NoiseKind::ChannelThermal;
    schema_fail(where, "unknown noise kind '" + s +
                           "' (expected white-current | thermal-resistor | channel-thermal)");
}

} // namespace detail

inline Netlist netlist_from_json(const nlohmann::json& j)
{
    using detail::need;
    using detail::need_number;
    using detail::need_string;
    using detail::schema_fail;

    if (!j.is_object())
        throw std::invalid_argument("netlist json: top level must be an object");

    Netlist n;
    if (j.contains("nodes"))
    {
        const auto& nodes = j.at("nodes");
        if (!nodes.is_array())
            schema_fail("netlist json", "'nodes' must be an array of strings");
        for (const auto& v : nodes)
        {
            if (!v.is_string())
                schema_fail("netlist json", "'nodes' must be an array of strings");
            n.add_node(v.get<std::string>());
        }
    }

    const auto& elements = need(j, "elements", "netlist json");
    if (!elements.is_array())
        schema_fail("netlist json", "'elements' must be an array");
    for (std::size_t i = 0; i < elements.size(); ++i)
    {
        const std::string where = "elements[" + std::to_string(i) + "]";
        const auto& e = elements.at(i);
        const ElementKind kind = detail::element_kind_from(need_string(e, "kind", where), where);
        const std::string name = need_string(e, "name", where);
        const auto& nodes = need(e, "nodes", where);
        const std::size_t want = kind == ElementKind::Vccs ? 4 : 2;
        if (!nodes.is_array() || nodes.size() != want)
            schema_fail(where, "'nodes' must list " + std::to_string(want) + " node names");
        for (const auto& v : nodes)
            if (!v.is_string())
                schema_fail(where, "'nodes' entries must be strings");
        const double value = need_number(e, "value", where);
        if (kind == ElementKind::Vccs)
            n.add_vccs(name, nodes.at(0).get<std::string>(), nodes.at(1).get<std::string>(),
                       nodes.at(2).get<std::string>(), nodes.at(3).get<std::string>(), value);
        else
            n.add(kind, name, nodes.at(0).get<std::string>(), nodes.at(1).get<std::string>(),
                  value);
    }

    if (j.contains("couplings"))
    {
        const auto& cs = j.at("couplings");
        if (!cs.is_array())
            schema_fail("netlist json", "'couplings' must be an array");
        for (std::size_t i = 0; i < cs.size(); ++i)
        {
            const std::string where = "couplings[" + std::to_string(i) + "]";
            const auto& c = cs.at(i);
            n.couplings.push_back({need_string(c, "a", where), need_string(c, "b", where),
                                   need_number(c, "k", where)});
        }
    }

    if (j.contains("ports"))
    {
        const auto& ps = j.at("ports");
        if (!ps.is_array())
            schema_fail("netlist json", "'ports' must be an array");
        for (std::size_t i = 0; i < ps.size(); ++i)
        {
            const std::string where = "ports[" + std::to_string(i) + "]";
            const auto& p = ps.at(i);
            Port port;
            port.name = need_string(p, "name", where);
            port.node = need_string(p, "node", where);
            port.z0 = detail::opt_number(p, "z0", 50.0, where);
            if (p.contains("sources"))
            {
                const auto& src = p.at("sources");
                if (!src.is_array())
                    schema_fail(where, "'sources' must be an array of element names");
                for (const auto& v : src)
                {
                    if (!v.is_string())
                        schema_fail(where, "'sources' entries must be strings");
                    port.source_elements.push_back(v.get<std::string>());
                }
            }
            n.ports.push_back(std::move(port));
        }
    }

    if (j.contains("noise_sources"))
    {
        const auto& ns = j.at("noise_sources");
        if (!ns.is_array())
            schema_fail("netlist json", "'noise_sources' must be an array");
        for (std::size_t i = 0; i < ns.size(); ++i)
        {
            const std::string where = "noise_sources[" + std::to_string(i) + "]";
            const auto& s = ns.at(i);
            NoiseSource src;
            src.kind = detail::noise_kind_from(need_string(s, "kind", where), where);
            src.name = need_string(s, "name", where);
            if (s.contains("element"))
                src.element = need_string(s, "element", where);
            if (s.contains("nodes"))
            {
                const auto& nn = s.at("nodes");
                if (!nn.is_array() || nn.size() != 2 || !nn.at(0).is_string() ||
                    !nn.at(1).is_string())
                    schema_fail(where, "'nodes' must list 2 node names");
                src.a = nn.at(0).get<std::string>();
                src.b = nn.at(1).get<std::string>();
            }
            if (src.element.empty() == src.a.empty())
                schema_fail(where, "give exactly one of 'element' or 'nodes'");
            src.psd = detail::opt_number(s, "psd", 0.0, where);
            src.gamma = detail::opt_number(s, "gamma", 1.0, where);
            src.eta = detail::opt_number(s, "eta", 1.0, where);
            src.temperature = detail::opt_number(s, "temperature", kT0, where);
            if (s.contains("is_input"))
            {
                if (!s.at("is_input").is_boolean())
                    schema_fail(where, "'is_input' must be a boolean");
                src.is_input = s.at("is_input").get<bool>();
            }
            n.noise_sources.push_back(std::move(src));
        }
    }

    return n;
}

inline Netlist netlist_from_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "'");
    return netlist_from_json(nlohmann::json::parse(f));
}

namespace detail
{

inline const char* to_string(NoiseKind k)
{
    switch (k)
    {
        case NoiseKind::WhiteCurrent: return "white-current";
        case NoiseKind::ThermalResistor: return "thermal-resistor";
        case NoiseKind::ChannelThermal: return "channel-thermal";
    }
    return "?";
}

} // namespace detail

// Inverse of netlist_from_json: parsing the result reproduces the netlist
// exactly, including node declaration order.
inline nlohmann::ordered_json netlist_to_json(const Netlist& n)
{
    nlohmann::ordered_json j;
    j["nodes"] = n.nodes;

    j["elements"] = nlohmann::ordered_json::array();
    for (const auto& e : n.elements)
    {
        nlohmann::ordered_json je;
        je["kind"] = to_string(e.kind);
        je["name"] = e.name;
        if (e.kind == ElementKind::Vccs)
            je["nodes"] = {e.a, e.b, e.cp, e.cm};
        else
            je["nodes"] = {e.a, e.b};
        je["value"] = e.value;
        j["elements"].push_back(std::move(je));
    }

    if (!n.couplings.empty())
    {
        j["couplings"] = nlohmann::ordered_json::array();
        for (const auto& c : n.couplings)
            j["couplings"].push_back({{"a", c.a}, {"b", c.b}, {"k", c.k}});
    }

    if (!n.ports.empty())
    {
        j["ports"] = nlohmann::ordered_json::array();
        for (const auto& p : n.ports)
        {
            nlohmann::ordered_json jp;
            jp["name"] = p.name;
            jp["node"] = p.node;
            jp["z0"] = p.z0;
            if (!p.source_elements.empty())
                jp["sources"] = p.source_elements;
            j["ports"].push_back(std::move(jp));
        }
    }

    if (!n.noise_sources.empty())
    {
        j["noise_sources"] = nlohmann::ordered_json::array();
        for (const auto& s : n.noise_sources)
        {
            nlohmann::ordered_json js;
            js["kind"] = detail::to_string(s.kind);
            js["name"] = s.name;
            if (!s.element.empty())
                js["element"] = s.element;
            else
                js["nodes"] = {s.a, s.b};
            js["psd"] = s.psd;
            js["gamma"] = s.gamma;
            js["eta"] = s.eta;
            js["temperature"] = s.temperature;
            js["is_input"] = s.is_input;
            j["noise_sources"].push_back(std::move(js));
        }
    }

    return j;
}

// A parsed design-parameter file: the electrical parameters, the sweep
// center frequency, and (optionally) the linearity numbers that unlock the
// FoM column in reports.
struct ParamsFile
{
    DesignParams params;
    double f0_hz = kReferenceF0;
    std::optional<LinearityInputs> linearity;
};

// Every key is optional and falls back to the reference design.  When the
// matching-relevant electricals (gm1, cgs, k, rs, f0_hz) are overridden
// without explicit lg/ls, the input match is re-synthesized at f0 so the
// file stays self-consistent.
inline ParamsFile params_from_json(const nlohmann::json& j)
{
    using detail::opt_number;
    if (!j.is_object())
        throw std::invalid_argument("params json: top level must be an object");

    ParamsFile out;
    DesignParams& p = out.params;
    p = make_reference_design();
    const std::string where = "params json";

    p.gm1 = opt_number(j, "gm1", p.gm1, where);
    p.gm2 = opt_number(j, "gm2", p.gm2, where);
    p.cgs = opt_number(j, "cgs", p.cgs, where);
    p.k = opt_number(j, "k", p.k, where);
    p.c0 = opt_number(j, "c0", p.c0, where);
    p.ro1 = opt_number(j, "ro1", p.ro1, where);
    p.ro2 = opt_number(j, "ro2", p.ro2, where);
    p.rs = opt_number(j, "rs", p.rs, where);
    p.gamma_noise = opt_number(j, "gamma_noise", p.gamma_noise, where);
    p.eta = opt_number(j, "eta", p.eta, where);
    p.temperature = opt_number(j, "temperature", p.temperature, where);
    out.f0_hz = opt_number(j, "f0_hz", out.f0_hz, where);

    if (j.contains("vg_device"))
    {
        const auto& d = j.at("vg_device");
        const std::string w2 = "params json vg_device";
        p.vg_device.vth = opt_number(d, "vth", p.vg_device.vth, w2);
        p.vg_device.beta = opt_number(d, "beta", p.vg_device.beta, w2);
        p.vg_device.r_off = opt_number(d, "r_off", p.vg_device.r_off, w2);
        p.vg_device.blend_v = opt_number(d, "blend_v", p.vg_device.blend_v, w2);
    }
    if (j.contains("body"))
    {
        const auto& d = j.at("body");
        const std::string w2 = "params json body";
        p.body.vt0 = opt_number(d, "vt0", p.body.vt0, w2);
        p.body.gamma_body = opt_number(d, "gamma_body", p.body.gamma_body, w2);
        p.body.phi_f = opt_number(d, "phi_f", p.body.phi_f, w2);
    }

    const bool lg_given = j.contains("lg") || j.contains("ls");
    if (lg_given)
    {
        p.lg = opt_number(j, "lg", p.lg, where);
        p.ls = opt_number(j, "ls", p.ls, where);
    }
    else
    {
        const bool rematch = j.contains("gm1") || j.contains("cgs") || j.contains("k") ||
                             j.contains("rs") || j.contains("f0_hz");
        if (rematch)
        {
            const MatchResult mr = design_input_match(p.gm1, p.cgs, p.k, out.f0_hz, p.rs);
            p.lg = mr.lg;
            p.ls = mr.ls;
        }
    }

    if (j.contains("linearity"))
    {
        const auto& d = j.at("linearity");
        const std::string w2 = "params json linearity";
        out.linearity = LinearityInputs{detail::need_number(d, "iip3_dbm", w2),
                                        detail::need_number(d, "pdc_mw", w2)};
    }

    const auto issues = validate(p);
    if (!issues.empty())
        throw std::invalid_argument("params json: " + issues.front());
    return out;
}

inline ParamsFile params_from_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "'");
    return params_from_json(nlohmann::json::parse(f));
}

} // namespace rfss
