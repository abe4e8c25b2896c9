// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "rfss/netlist.hpp"

// Complex AC modified nodal analysis.  Unknowns are the node voltages plus
// one branch current per inductor and per independent voltage source; the
// explicit inductor currents carry the mutual-coupling stamps and keep the
// formulation exact at any frequency.  Systems here are tiny (tens of
// unknowns), so a dense partial-pivot LU is the right tool.

namespace rfss
{

constexpr double kConditionLimit = 1e12;

struct SolverError : std::runtime_error
{
    std::vector<std::string> suspects;  // node / branch names implicated

    explicit SolverError(const std::string& what, std::vector<std::string> s = {})
        : std::runtime_error(what), suspects(std::move(s))
    {
    }
};

struct AcSolution
{
    double f_hz = 0.0;
    std::string excitation;  // active source, empty for injection drives
    std::vector<std::string> node_names;
    std::vector<std::complex<double>> node_v;  // aligned with node_names
    std::vector<std::string> branch_names;     // inductors then voltage sources
    std::vector<std::complex<double>> branch_i;

    std::complex<double> voltage(const std::string& node) const
    {
        if (node == kGround)
            return {0.0, 0.0};
        for (size_t i = 0; i < node_names.size(); ++i)
            if (node_names[i] == node)
                return node_v[i];
        throw std::invalid_argument("unknown node '" + node + "'");
    }

    std::complex<double> branch_current(const std::string& element) const
    {
        for (size_t i = 0; i < branch_names.size(); ++i)
            if (branch_names[i] == element)
                return branch_i[i];
        throw std::invalid_argument("no branch current recorded for '" + element + "'");
    }
};

namespace detail
{

struct Injection
{
    std::string a;
    std::string b;
    std::complex<double> amps{1.0, 0.0};  // flows a -> b through the stand-in source
};

struct Workspace
{
    std::map<std::string, int> node_index;
    std::vector<std::string> branch_names;
    std::map<std::string, int> branch_index;  // offset by node count
    int dim = 0;
};

inline Workspace layout(const Netlist& n)
{
    Workspace w;
    for (const auto& node : n.nodes)
        w.node_index.emplace(node, static_cast<int>(w.node_index.size()));
    const int nn = static_cast<int>(w.node_index.size());
    for (const auto& e : n.elements)
        if (e.kind == ElementKind::Inductor || e.kind == ElementKind::VoltageSource)
        {
            w.branch_index.emplace(e.name, nn + static_cast<int>(w.branch_names.size()));
            w.branch_names.push_back(e.name);
        }
    w.dim = nn + static_cast<int>(w.branch_names.size());
    return w;
}

// Assembles A x = rhs at s = j w.  source_scale multiplies each independent
// source's stored value; absent names count as zero (source disabled).
inline void assemble(const Netlist& n, const Workspace& w, double f_hz,
                     const std::map<std::string, double>& source_scale,
                     const std::vector<Injection>& injections, Eigen::MatrixXcd& A,
                     Eigen::VectorXcd& rhs)
{
    const std::complex<double> s(0.0, 2.0 * M_PI * f_hz);
    A.setZero(w.dim, w.dim);
    rhs.setZero(w.dim);

    auto idx = [&](const std::string& node) -> int {
        if (node == kGround)
            return -1;
        return w.node_index.at(node);
    };
    auto stamp = [&](int r, int c, std::complex<double> v) {
        if (r >= 0 && c >= 0)
            A(r, c) += v;
    };
    auto scale_of = [&](const std::string& name) {
        auto it = source_scale.find(name);
        return it == source_scale.end() ? 0.0 : it->second;
    };

    for (const auto& e : n.elements)
    {
        const int ia = idx(e.a);
        const int ib = idx(e.b);
        switch (e.kind)
        {
            case ElementKind::Resistor:
            case ElementKind::Capacitor:
            {
                const std::complex<double> y =
                    e.kind == ElementKind::Resistor ? 1.0 / e.value : s * e.value;
                stamp(ia, ia, y);
                stamp(ib, ib, y);
                stamp(ia, ib, -y);
                stamp(ib, ia, -y);
                break;
            }
            case ElementKind::Inductor:
            {
                const int k = w.branch_index.at(e.name);
                stamp(ia, k, 1.0);
                stamp(ib, k, -1.0);
                stamp(k, ia, 1.0);
                stamp(k, ib, -1.0);
                A(k, k) -= s * e.value;
                break;
            }
            case ElementKind::VoltageSource:
            {
                const int k = w.branch_index.at(e.name);
                stamp(ia, k, 1.0);
                stamp(ib, k, -1.0);
                stamp(k, ia, 1.0);
                stamp(k, ib, -1.0);
                rhs(k) = e.value * scale_of(e.name);
                break;
            }
            case ElementKind::CurrentSource:
            {
                const std::complex<double> j = e.value * scale_of(e.name);
                if (ia >= 0)
                    rhs(ia) -= j;
                if (ib >= 0)
                    rhs(ib) += j;
                break;
            }
            case ElementKind::Vccs:
            {
                const int ic = idx(e.cp);
                const int im = idx(e.cm);
                stamp(ia, ic, e.value);
                stamp(ia, im, -e.value);
                stamp(ib, ic, -e.value);
                stamp(ib, im, e.value);
                break;
            }
        }
    }

    for (const auto& c : n.couplings)
    {
        const Element* la = n.find(c.a);
        const Element* lb = n.find(c.b);
        const std::complex<double> sm = s * c.k * std::sqrt(la->value * lb->value);
        const int ka = w.branch_index.at(c.a);
        const int kb = w.branch_index.at(c.b);
        A(ka, kb) -= sm;
        A(kb, ka) -= sm;
    }

    for (const auto& inj : injections)
    {
        const int ia = idx(inj.a);
        const int ib = idx(inj.b);
        if (ia >= 0)
            rhs(ia) -= inj.amps;
        if (ib >= 0)
            rhs(ib) += inj.amps;
    }
}

// Maps the near-null direction of A onto node / branch names for reporting.
inline std::vector<std::string> suspect_names(const Workspace& w, const Eigen::MatrixXcd& A)
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
    const Eigen::VectorXcd dir = svd.matrixV().col(w.dim - 1);
    const double peak = dir.cwiseAbs().maxCoeff();
    std::vector<std::string> out;
    for (const auto& [node, i] : w.node_index)
        if (std::abs(dir(i)) > 0.3 * peak)
            out.push_back(node);
    for (size_t i = 0; i < w.branch_names.size(); ++i)
        if (std::abs(dir(static_cast<int>(w.node_index.size() + i))) > 0.3 * peak)
            out.push_back("branch:" + w.branch_names[i]);
    return out;
}

inline AcSolution solve_assembled(const Netlist& n, const Workspace& w, double f_hz,
                                  const std::map<std::string, double>& source_scale,
                                  const std::vector<Injection>& injections,
                                  const std::string& excitation)
{
    Eigen::MatrixXcd A;
    Eigen::VectorXcd rhs;
    assemble(n, w, f_hz, source_scale, injections, A, rhs);

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const double norm_a = A.cwiseAbs().colwise().sum().maxCoeff();
    const Eigen::MatrixXcd inv = lu.inverse();
    const double norm_inv = inv.cwiseAbs().colwise().sum().maxCoeff();
    const double cond = norm_a * norm_inv;
    if (!std::isfinite(cond) || cond > kConditionLimit)
        throw SolverError("singular or near-singular system (condition estimate " +
                              std::to_string(cond) + ")",
                          suspect_names(w, A));

    const Eigen::VectorXcd x = lu.solve(rhs);
    AcSolution sol;
    sol.f_hz = f_hz;
    sol.excitation = excitation;
    sol.node_names = n.nodes;
    sol.node_v.resize(n.nodes.size());
    for (size_t i = 0; i < n.nodes.size(); ++i)
        sol.node_v[i] = x(w.node_index.at(n.nodes[i]));
    sol.branch_names = w.branch_names;
    sol.branch_i.resize(w.branch_names.size());
    for (size_t i = 0; i < w.branch_names.size(); ++i)
        sol.branch_i[i] = x(static_cast<int>(w.node_index.size() + i));
    return sol;
}

inline void require_clean(const Netlist& n)
{
    auto issues = validate(n);
    if (!issues.empty())
        throw std::invalid_argument("netlist fails validation: [" + issues.front().code + "] " +
                                    issues.front().subject + ": " + issues.front().message);
}

inline void require_ac(double f_hz)
{
    if (!(f_hz > 0.0))
        throw std::domain_error("AC analysis requires f > 0 (DC is not supported)");
}

} // namespace detail

// Solves the netlist at f with only the named independent source active, at
// its stored amplitude; every other independent source is zeroed.
inline AcSolution solve_ac(const Netlist& n, double f_hz, const std::string& excitation)
{
    detail::require_clean(n);
    detail::require_ac(f_hz);
    const Element* src = n.find(excitation);
    if (src == nullptr || (src->kind != ElementKind::VoltageSource &&
                           src->kind != ElementKind::CurrentSource))
        throw std::invalid_argument("excitation '" + excitation +
                                    "' is not an independent source in this netlist");
    return detail::solve_assembled(n, detail::layout(n), f_hz, {{excitation, 1.0}}, {},
                                   excitation);
}

// All independent sources zeroed, unit current injected a -> b; used as the
// deterministic stand-in for a noise source.
inline AcSolution solve_with_injection(const Netlist& n, double f_hz, const std::string& a,
                                       const std::string& b)
{
    detail::require_clean(n);
    detail::require_ac(f_hz);
    return detail::solve_assembled(n, detail::layout(n), f_hz, {}, {{a, b, {1.0, 0.0}}}, "");
}

// Current flowing a -> b through the named element, reconstructed from the
// solution (branch unknowns are used where they exist).
inline std::complex<double> element_current(const Netlist& n, const AcSolution& sol,
                                            const std::string& name)
{
    const Element* e = n.find(name);
    if (e == nullptr)
        throw std::invalid_argument("no element named '" + name + "'");
    const std::complex<double> vab = sol.voltage(e->a) - sol.voltage(e->b);
    const std::complex<double> s(0.0, 2.0 * M_PI * sol.f_hz);
    switch (e->kind)
    {
        case ElementKind::Resistor: return vab / e->value;
        case ElementKind::Capacitor: return vab * s * e->value;
        case ElementKind::Inductor:
        case ElementKind::VoltageSource: return sol.branch_current(name);
        case ElementKind::CurrentSource:
            return e->name == sol.excitation ? std::complex<double>(e->value, 0.0)
                                             : std::complex<double>(0.0, 0.0);
        case ElementKind::Vccs:
            return e->value * (sol.voltage(e->cp) - sol.voltage(e->cm));
    }
    return {};
}

// Largest per-node KCL current imbalance, normalized by the largest element
// current magnitude.  Sanity metric for tests; excludes injection drives.
inline double kcl_residual(const Netlist& n, const AcSolution& sol)
{
    std::map<std::string, std::complex<double>> sum;
    double peak = 0.0;
    for (const auto& e : n.elements)
    {
        const std::complex<double> i = element_current(n, sol, e.name);
        peak = std::max(peak, std::abs(i));
        if (e.a != kGround)
            sum[e.a] += i;
        if (e.b != kGround)
            sum[e.b] -= i;
    }
    double worst = 0.0;
    for (const auto& [node, total] : sum)
        worst = std::max(worst, std::abs(total));
    return peak > 0.0 ? worst / peak : worst;
}

enum class ParamKind
{
    S,
    Y,
    Z,
};

// n-port network parameters; m is kind-dependent, z0 meaningful for S only.
struct TwoPort
{
    ParamKind kind = ParamKind::S;
    double f_hz = 0.0;
    double z0 = 50.0;
    Eigen::MatrixXcd m;
};

namespace detail
{

// Removes the ports' Thevenin source branches and any node or noise source
// left dangling, yielding the bare network the ports look into.
inline Netlist strip_port_sources(const Netlist& n)
{
    std::set<std::string> drop;
    for (const auto& p : n.ports)
        drop.insert(p.source_elements.begin(), p.source_elements.end());
    Netlist out;
    out.couplings = n.couplings;
    out.ports = n.ports;
    for (const auto& e : n.elements)
        if (!drop.count(e.name))
        {
            out.add_node(e.a);
            out.add_node(e.b);
            if (e.kind == ElementKind::Vccs)
            {
                out.add_node(e.cp);
                out.add_node(e.cm);
            }
            out.elements.push_back(e);
        }
    for (const auto& s : n.noise_sources)
        if (s.element.empty() || !drop.count(s.element))
            out.noise_sources.push_back(s);
    for (auto& p : out.ports)
    {
        p.source_elements.clear();
        out.add_node(p.node);
    }
    return out;
}

inline Eigen::MatrixXcd invert_checked(const Eigen::MatrixXcd& m, const char* what)
{
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
    if (!lu.isInvertible())
        throw SolverError(std::string("matrix inversion failed: ") + what);
    return lu.inverse();
}

} // namespace detail

// Network parameters by direct drive.  S: each port driven in turn by a 2 V
// source behind z0 with every other port terminated in z0 (incident wave 1).
// Z: unit current drive, other ports open.  Y: unit voltage drive, other
// ports shorted.  Requires equal real z0 at all ports.
inline TwoPort port_parameters(const Netlist& n, double f_hz, ParamKind kind, double z0)
{
    detail::require_clean(n);
    detail::require_ac(f_hz);
    if (!(z0 > 0.0))
        throw std::invalid_argument("z0 must be positive");
    const int np = static_cast<int>(n.ports.size());
    if (np < 1 || np > 2)
        throw std::invalid_argument("port_parameters supports 1- and 2-port netlists");

    const Netlist bare = detail::strip_port_sources(n);
    TwoPort tp;
    tp.kind = kind;
    tp.f_hz = f_hz;
    tp.z0 = z0;
    tp.m.setZero(np, np);

    for (int j = 0; j < np; ++j)
    {
        Netlist drv = bare;
        std::string excitation;
        if (kind == ParamKind::S)
        {
            for (int i = 0; i < np; ++i)
            {
                if (i == j)
                {
                    drv.add(ElementKind::VoltageSource, "__vdrv", "__drv", kGround, 2.0);
                    drv.add(ElementKind::Resistor, "__rdrv", "__drv", drv.ports[i].node, z0);
                    excitation = "__vdrv";
                }
                else
                {
                    drv.add(ElementKind::Resistor, "__term" + std::to_string(i),
                            drv.ports[i].node, kGround, z0);
                }
            }
        }
        else if (kind == ParamKind::Z)
        {
            drv.add(ElementKind::CurrentSource, "__idrv", kGround, drv.ports[j].node, 1.0);
            excitation = "__idrv";
        }
        else
        {
            for (int i = 0; i < np; ++i)
                drv.add(ElementKind::VoltageSource, "__vdrv" + std::to_string(i),
                        drv.ports[i].node, kGround, i == j ? 1.0 : 0.0);
            excitation = "__vdrv" + std::to_string(j);
        }
        const AcSolution sol = solve_ac(drv, f_hz, excitation);
        for (int i = 0; i < np; ++i)
        {
            const std::complex<double> vi = sol.voltage(drv.ports[i].node);
            if (kind == ParamKind::S)
                tp.m(i, j) = i == j ? vi - 1.0 : vi;
            else if (kind == ParamKind::Z)
                tp.m(i, j) = vi;
            else
                tp.m(i, j) = -sol.branch_current("__vdrv" + std::to_string(i));
        }
    }
    return tp;
}

// Bilinear parameter conversions for equal real z0.  Identity conversions
// return the input unchanged.
inline TwoPort convert(const TwoPort& tp, ParamKind target, double z0)
{
    if (target == tp.kind && (tp.kind != ParamKind::S || z0 == tp.z0))
        return tp;
    const int np = static_cast<int>(tp.m.rows());
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(np, np);

    Eigen::MatrixXcd z;
    switch (tp.kind)
    {
        case ParamKind::Z: z = tp.m; break;
        case ParamKind::Y: z = detail::invert_checked(tp.m, "Y matrix is singular"); break;
        case ParamKind::S:
            z = tp.z0 * (eye + tp.m) * detail::invert_checked(eye - tp.m, "I - S is singular: Z does not exist");
            break;
    }

    TwoPort out;
    out.kind = target;
    out.f_hz = tp.f_hz;
    out.z0 = z0;
    switch (target)
    {
        case ParamKind::Z: out.m = z; break;
        case ParamKind::Y: out.m = detail::invert_checked(z, "Z matrix is singular: Y does not exist"); break;
        case ParamKind::S:
            out.m = (z - z0 * eye) * detail::invert_checked(z + z0 * eye, "Z + z0 I is singular");
            break;
    }
    return out;
}

// Largest singular value of an S matrix; passive networks stay at or below 1.
inline double max_singular_value(const TwoPort& s)
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s.m);
    return svd.singularValues()(0);
}

} // namespace rfss
