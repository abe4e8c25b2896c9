// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <numbers>

#include <catch2/catch_amalgamated.hpp>

#include "rfss/lna.hpp"
#include "rfss/mna.hpp"
#include "rfss/models.hpp"
#include "rfss/netlist.hpp"

#include "support.hpp"

using namespace rfss;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using std::complex;

namespace
{

Netlist one_port(double z0 = 50.0)
{
    Netlist n;
    n.ports.push_back({"p1", "p1", z0, {}});
    return n;
}

Netlist two_port(double z0 = 50.0)
{
    Netlist n;
    n.ports.push_back({"p1", "p1", z0, {}});
    n.ports.push_back({"p2", "p2", z0, {}});
    return n;
}

} // namespace

TEST_CASE("series resistor carries V/R at any frequency")
{
    Netlist n;
    n.add(ElementKind::VoltageSource, "V1", "n1", kGround, 1.0);
    n.add(ElementKind::Resistor, "R1", "n1", kGround, 50.0);

    for (double f : {1e3, 1e6, 40e9})
    {
        const AcSolution sol = solve_ac(n, f, "V1");
        CHECK_THAT(element_current(n, sol, "R1").real(), WithinRel(0.02, 1e-12));
        CHECK_THAT(std::abs(element_current(n, sol, "R1").imag()), WithinAbs(0.0, 1e-15));
        // The source supplies what the resistor draws, with a-to-b orientation.
        CHECK_THAT(std::abs(sol.branch_current("V1") + 0.02), WithinAbs(0.0, 1e-12));
        CHECK(sol.voltage(kGround) == complex<double>(0.0));
        CHECK(kcl_residual(n, sol) < 1e-9);
    }
}

TEST_CASE("series LC branch is a short at its resonance")
{
    Netlist n;
    n.add(ElementKind::CurrentSource, "I1", kGround, "n1", 1.0);
    n.add(ElementKind::Inductor, "L1", "n1", "n2", 1e-9);
    n.add(ElementKind::Capacitor, "C1", "n2", kGround, 1e-12);

    const double f0 = 1.0 / (2.0 * std::numbers::pi * std::sqrt(1e-9 * 1e-12));
    const AcSolution sol = solve_ac(n, f0, "I1");
    // 1 A through a branch whose impedance magnitude is below a micro-ohm.
    CHECK(std::abs(sol.voltage("n1")) < 1e-6);
    CHECK(std::abs(element_current(n, sol, "L1") - 1.0) < 1e-9);
}

TEST_CASE("mutual coupling transfers energy between otherwise isolated loops")
{
    Netlist n;
    n.add(ElementKind::VoltageSource, "V1", "a", kGround, 1.0);
    n.add(ElementKind::Inductor, "L1", "a", kGround, 1e-9);
    n.add(ElementKind::Inductor, "L2", "b", kGround, 1e-9);
    n.add(ElementKind::Resistor, "RL", "b", kGround, 50.0);

    const double f = 10e9;
    Netlist uncoupled = n;
    const AcSolution cold = solve_ac(uncoupled, f, "V1");
    CHECK(std::abs(cold.voltage("b")) < 1e-15);

    n.couplings.push_back({"L1", "L2", 0.5});
    const AcSolution hot = solve_ac(n, f, "V1");
    CHECK(std::abs(hot.voltage("b")) > 0.01);

    // Flipping the sign of k flips the induced voltage.
    n.couplings[0].k = -0.5;
    const AcSolution flipped = solve_ac(n, f, "V1");
    CHECK(rfss_test::rel_err(flipped.voltage("b"), -hot.voltage("b")) < 1e-12);
}

TEST_CASE("solutions scale linearly with the excitation value")
{
    Netlist n;
    n.add(ElementKind::VoltageSource, "V1", "n1", kGround, 1.0);
    n.add(ElementKind::Resistor, "R1", "n1", "n2", 25.0);
    n.add(ElementKind::Capacitor, "C1", "n2", kGround, 1e-12);

    const AcSolution unit = solve_ac(n, 5e9, "V1");
    n.elements[0].value = 2.0;
    const AcSolution twice = solve_ac(n, 5e9, "V1");
    CHECK(rfss_test::rel_err(twice.voltage("n2"), 2.0 * unit.voltage("n2")) < 1e-12);
}

TEST_CASE("gate-source voltage follows the series-loop divider at the matched design")
{
    const DesignParams p = make_reference_design();
    const Netlist n = build_input_model(p);
    const double f = kReferenceF0;
    const complex<double> s(0.0, 2.0 * std::numbers::pi * f);

    const AcSolution sol = solve_ac(n, f, "Vs");
    const complex<double> vgs = sol.voltage("g1") - sol.voltage("s1");

    // All drive current flows through Cgs, so vgs = i_in / (s Cgs) with
    // i_in set by the source resistance in series with the input impedance.
    const complex<double> i_in = 1.0 / (p.rs + input_impedance_cf(p, f));
    const complex<double> predicted = i_in / (s * p.cgs);
    CHECK(rfss_test::rel_err(vgs, predicted) < 1e-9);
    CHECK(rfss_test::rel_err(element_current(n, sol, "Cgs1"), i_in) < 1e-9);
}

TEST_CASE("nonpositive frequency and unknown excitation are rejected")
{
    Netlist n;
    n.add(ElementKind::VoltageSource, "V1", "n1", kGround, 1.0);
    n.add(ElementKind::Resistor, "R1", "n1", kGround, 50.0);
    CHECK_THROWS_AS(solve_ac(n, 0.0, "V1"), std::domain_error);
    CHECK_THROWS_AS(solve_ac(n, -1e9, "V1"), std::domain_error);
    CHECK_THROWS_AS(solve_ac(n, 1e9, "R1"), std::invalid_argument);
    CHECK_THROWS_AS(solve_ac(n, 1e9, "nope"), std::invalid_argument);
}

TEST_CASE("invalid netlists are refused before assembly")
{
    Netlist n;
    n.add(ElementKind::VoltageSource, "V1", "n1", kGround, 1.0);
    n.add(ElementKind::Resistor, "R1", "n1", "orphan_a", 50.0);
    n.elements[1].b = "nowhere";
    CHECK_THROWS_AS(solve_ac(n, 1e9, "V1"), std::invalid_argument);
}

TEST_CASE("singular systems raise SolverError with suspect names")
{
    // Two ideal voltage sources forcing the same node to different values.
    Netlist n;
    n.add(ElementKind::VoltageSource, "V1", "n1", kGround, 1.0);
    n.add(ElementKind::VoltageSource, "V2", "n1", kGround, 2.0);
    n.add(ElementKind::Resistor, "R1", "n1", kGround, 50.0);

    try
    {
        solve_ac(n, 1e9, "V1");
        FAIL("expected SolverError");
    }
    catch (const SolverError& e)
    {
        CHECK(!e.suspects.empty());
    }
}

TEST_CASE("through connection scatters as an ideal transmission")
{
    // Teraohm shunts satisfy the conduct-to-ground rule without loading the
    // 50-ohm environment measurably.
    Netlist n = two_port();
    n.add(ElementKind::Resistor, "Rtie", "p1", "p2", 1e-6);
    n.add(ElementKind::Resistor, "Rref1", "p1", kGround, 1e12);
    n.add(ElementKind::Resistor, "Rref2", "p2", kGround, 1e12);

    const TwoPort s = port_parameters(n, 10e9, ParamKind::S, 50.0);
    CHECK(std::abs(s.m(0, 0)) < 1e-7);
    CHECK(std::abs(s.m(1, 1)) < 1e-7);
    CHECK(std::abs(s.m(1, 0) - 1.0) < 1e-7);
    CHECK(std::abs(s.m(0, 1) - 1.0) < 1e-7);
}

TEST_CASE("matched shunt load reflects nothing")
{
    Netlist n = one_port();
    n.add(ElementKind::Resistor, "R1", "p1", kGround, 50.0);
    const TwoPort s = port_parameters(n, 1e9, ParamKind::S, 50.0);
    REQUIRE(s.m.rows() == 1);
    CHECK(std::abs(s.m(0, 0)) < 1e-12);
}

TEST_CASE("series 50-ohm between equal terminations gives the textbook S-matrix")
{
    Netlist n = two_port();
    n.add(ElementKind::Resistor, "Rser", "p1", "p2", 50.0);
    n.add(ElementKind::Resistor, "Rref1", "p1", kGround, 1e12);
    n.add(ElementKind::Resistor, "Rref2", "p2", kGround, 1e12);
    const TwoPort s = port_parameters(n, 1e9, ParamKind::S, 50.0);
    CHECK(rfss_test::rel_err(s.m(0, 0), complex<double>(1.0 / 3.0)) < 1e-9);
    CHECK(rfss_test::rel_err(s.m(1, 0), complex<double>(2.0 / 3.0)) < 1e-9);
    CHECK(rfss_test::rel_err(s.m(0, 1), complex<double>(2.0 / 3.0)) < 1e-9);
    CHECK(rfss_test::rel_err(s.m(1, 1), complex<double>(1.0 / 3.0)) < 1e-9);
}

TEST_CASE("Z and Y extraction agree with hand values for a resistive tee")
{
    // Tee: 10 ohm in each arm, 20 ohm to ground from the middle.
    Netlist n = two_port();
    n.add(ElementKind::Resistor, "Ra", "p1", "m", 10.0);
    n.add(ElementKind::Resistor, "Rb", "m", "p2", 10.0);
    n.add(ElementKind::Resistor, "Rc", "m", kGround, 20.0);

    const TwoPort z = port_parameters(n, 1e9, ParamKind::Z, 50.0);
    CHECK(rfss_test::rel_err(z.m(0, 0), complex<double>(30.0)) < 1e-9);
    CHECK(rfss_test::rel_err(z.m(0, 1), complex<double>(20.0)) < 1e-9);
    CHECK(rfss_test::rel_err(z.m(1, 0), complex<double>(20.0)) < 1e-9);
    CHECK(rfss_test::rel_err(z.m(1, 1), complex<double>(30.0)) < 1e-9);

    const TwoPort y = port_parameters(n, 1e9, ParamKind::Y, 50.0);
    const Eigen::MatrixXcd ident = y.m * z.m;
    CHECK(std::abs(ident(0, 0) - 1.0) < 1e-9);
    CHECK(std::abs(ident(0, 1)) < 1e-9);
    CHECK(std::abs(ident(1, 1) - 1.0) < 1e-9);
}

TEST_CASE("port extraction strips the named source elements")
{
    // A driven port: Thevenin source listed on the port must be removed, so
    // the remaining shunt resistor is all the extraction sees.
    Netlist n;
    n.add(ElementKind::VoltageSource, "Vs", "src", kGround, 1.0);
    n.add(ElementKind::Resistor, "Rs", "src", "p1", 50.0);
    n.add(ElementKind::Resistor, "Rload", "p1", kGround, 50.0);
    n.ports.push_back({"p1", "p1", 50.0, {"Vs", "Rs"}});

    const TwoPort s = port_parameters(n, 1e9, ParamKind::S, 50.0);
    CHECK(std::abs(s.m(0, 0)) < 1e-12);
}

TEST_CASE("conversions are identities and exact on diagonal matches")
{
    Netlist n = two_port();
    n.add(ElementKind::Resistor, "Ra", "p1", "m", 10.0);
    n.add(ElementKind::Resistor, "Rb", "m", "p2", 10.0);
    n.add(ElementKind::Resistor, "Rc", "m", kGround, 20.0);
    const TwoPort s = port_parameters(n, 1e9, ParamKind::S, 50.0);

    const TwoPort same = convert(s, ParamKind::S, 50.0);
    CHECK(same.m == s.m);

    TwoPort z;
    z.kind = ParamKind::Z;
    z.f_hz = 1e9;
    z.z0 = 50.0;
    z.m = Eigen::MatrixXcd::Zero(2, 2);
    z.m(0, 0) = 50.0;
    z.m(1, 1) = 50.0;
    const TwoPort s_from_z = convert(z, ParamKind::S, 50.0);
    CHECK(s_from_z.m.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("random passive two-ports are reciprocal, passive, and convert round-trip")
{
    rfss_test::Draw d(20260823);
    for (int i = 0; i < 25; ++i)
    {
        const Netlist n = rfss_test::random_passive_two_port(d);
        REQUIRE(validate(n).empty());
        const double f = d.uniform(0.5e9, 60e9);
        const TwoPort s = port_parameters(n, f, ParamKind::S, 50.0);

        CHECK(std::abs(s.m(0, 1) - s.m(1, 0)) < 1e-9);
        CHECK(max_singular_value(s) <= 1.0 + 1e-9);

        const TwoPort z = convert(s, ParamKind::Z, 50.0);
        const TwoPort y = convert(z, ParamKind::Y, 50.0);
        const TwoPort s2 = convert(y, ParamKind::S, 50.0);
        CHECK((s2.m - s.m).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("solve_with_injection matches a hand-built current source")
{
    Netlist n;
    n.add(ElementKind::Resistor, "R1", "n1", kGround, 100.0);
    n.add(ElementKind::Capacitor, "C1", "n1", kGround, 1e-12);

    const AcSolution inj = solve_with_injection(n, 2e9, kGround, "n1");

    Netlist m = n;
    m.add(ElementKind::CurrentSource, "Iref", kGround, "n1", 1.0);
    const AcSolution ref = solve_ac(m, 2e9, "Iref");
    CHECK(rfss_test::rel_err(inj.voltage("n1"), ref.voltage("n1")) < 1e-12);
}
