// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rfss/lna.hpp"
#include "rfss/netlist.hpp"
#include "rfss/params.hpp"

namespace rfss_test
{

inline double rel_err(std::complex<double> a, std::complex<double> b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

inline double rel_err(double a, double b)
{
    return rel_err(std::complex<double>(a), std::complex<double>(b));
}

// Thin wrapper so every randomized test pins its seed in one obvious place.
struct Draw
{
    std::mt19937 gen;

    explicit Draw(unsigned seed) : gen(seed) {}

    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen); }
};

// Free parameter draw: element values land in ranges where the reference
// topology stays well conditioned, but no input-match relation is imposed.
inline rfss::DesignParams random_design(Draw& d)
{
    rfss::DesignParams p = rfss::make_reference_design();
    p.gm1 = d.uniform(0.015, 0.050);
    p.gm2 = d.uniform(0.015, 0.050);
    p.cgs = d.uniform(10e-15, 30e-15);
    p.lg = d.uniform(100e-12, 1000e-12);
    p.ls = d.uniform(10e-12, 100e-12);
    p.k = d.uniform(0.0, 0.6);
    p.c0 = d.uniform(0.2e-12, 2.0e-12);
    p.ro1 = d.uniform(500.0, 5000.0);
    p.ro2 = d.uniform(500.0, 5000.0);
    p.rs = 50.0;
    p.gamma_noise = d.uniform(0.5, 1.5);
    p.eta = d.uniform(0.5, 1.5);
    return p;
}

// Random lossy reciprocal two-port: a ladder over {p1, m1, m2, p2} with shunt
// resistors at both ports so the network is strictly passive and every
// parameter family (S, Z, Y) exists.
inline rfss::Netlist random_passive_two_port(Draw& d)
{
    using rfss::ElementKind;
    rfss::Netlist n;
    n.add(ElementKind::Resistor, "Rp1", "p1", rfss::kGround, d.uniform(10.0, 200.0));
    n.add(ElementKind::Resistor, "Rp2", "p2", rfss::kGround, d.uniform(10.0, 200.0));

    std::vector<std::string> inductors;
    int idx = 0;
    auto add_random = [&](const std::string& a, const std::string& b) {
        const std::string name = "E" + std::to_string(idx++);
        switch (d.pick(3))
        {
        case 0: n.add(ElementKind::Resistor, name, a, b, d.uniform(1.0, 500.0)); break;
        case 1: n.add(ElementKind::Capacitor, name, a, b, d.uniform(0.05e-12, 5e-12)); break;
        default:
            n.add(ElementKind::Inductor, name, a, b, d.uniform(0.05e-9, 5e-9));
            inductors.push_back(name);
        }
    };

    add_random("p1", "m1");
    add_random("m1", "m2");
    add_random("m2", "p2");

    const std::vector<std::string> nodes = {"p1", "p2", "m1", "m2", rfss::kGround};
    const int extra = 2 + d.pick(3);
    for (int i = 0; i < extra; ++i)
    {
        const std::string& a = nodes[static_cast<size_t>(d.pick(4))];
        std::string b = nodes[static_cast<size_t>(d.pick(5))];
        if (a == b)
            b = (b == rfss::kGround) ? "p1" : rfss::kGround;
        if (a == b)
            continue;
        add_random(a, b);
    }

    if (inductors.size() >= 2 && d.pick(2) == 0)
        n.couplings.push_back({inductors[0], inductors[1], d.uniform(-0.8, 0.8)});

    n.ports.push_back({"p1", "p1", 50.0, {}});
    n.ports.push_back({"p2", "p2", 50.0, {}});
    return n;
}

// Matched resistive pi attenuator with `loss_db` of attenuation between equal
// terminations z0.  Thermal sources are attached to the pad resistors; the
// source resistor carries the reference (input) noise.
inline rfss::Netlist matched_attenuator(double loss_db, double z0)
{
    using rfss::ElementKind;
    const double big_l = std::pow(10.0, loss_db / 10.0);
    const double root = std::sqrt(big_l);
    const double r_shunt = z0 * (root + 1.0) / (root - 1.0);
    const double r_series = z0 * (big_l - 1.0) / (2.0 * root);

    rfss::Netlist n;
    n.add(ElementKind::VoltageSource, "Vs", "src", rfss::kGround, 1.0);
    n.add(ElementKind::Resistor, "Rs", "src", "in", z0);
    n.add(ElementKind::Resistor, "Rpad1", "in", rfss::kGround, r_shunt);
    n.add(ElementKind::Resistor, "Rser", "in", "out", r_series);
    n.add(ElementKind::Resistor, "Rpad2", "out", rfss::kGround, r_shunt);
    n.add(ElementKind::VoltageSource, "Vm", "out", rfss::kGround, 0.0);

    auto thermal = [&](const std::string& name, const std::string& element, bool is_input) {
        rfss::NoiseSource s;
        s.kind = rfss::NoiseKind::ThermalResistor;
        s.name = name;
        s.element = element;
        s.temperature = rfss::kT0;
        s.is_input = is_input;
        n.noise_sources.push_back(s);
    };
    thermal("Rs_noise", "Rs", true);
    thermal("Rpad1_noise", "Rpad1", false);
    thermal("Rser_noise", "Rser", false);
    thermal("Rpad2_noise", "Rpad2", false);
    return n;
}

#ifdef RFSS_CLI_PATH
struct CliResult
{
    int code = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the installed binary with output capture; `scratch` also hosts any
// files the invocation writes.
inline CliResult run_cli(const std::string& args, const std::filesystem::path& scratch)
{
    namespace fs = std::filesystem;
    fs::create_directories(scratch);
    const fs::path out_path = scratch / "stdout.txt";
    const fs::path err_path = scratch / "stderr.txt";
    const std::string cmd = std::string(RFSS_CLI_PATH) + " " + args + " >" + out_path.string() +
                            " 2>" + err_path.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = (status >= 0 && (status & 0x7f) == 0) ? ((status >> 8) & 0xff) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}
#endif

} // namespace rfss_test
