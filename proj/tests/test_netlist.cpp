// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "rfss/lna.hpp"
#include "rfss/models.hpp"
#include "rfss/netlist.hpp"

#include "support.hpp"

using namespace rfss;

namespace
{

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code,
              const std::string& subject)
{
    return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) {
        return d.code == code && d.subject == subject;
    });
}

Netlist divider()
{
    Netlist n;
    n.add(ElementKind::VoltageSource, "V1", "in", kGround, 1.0);
    n.add(ElementKind::Resistor, "R1", "in", "mid", 50.0);
    n.add(ElementKind::Resistor, "R2", "mid", kGround, 50.0);
    return n;
}

} // namespace

TEST_CASE("ground node name is the SPICE convention")
{
    CHECK(std::string(kGround) == "0");
}

TEST_CASE("element kinds have stable names")
{
    CHECK(std::string(to_string(ElementKind::Resistor)) == "resistor");
    CHECK(std::string(to_string(ElementKind::Capacitor)) == "capacitor");
    CHECK(std::string(to_string(ElementKind::Inductor)) == "inductor");
    CHECK(std::string(to_string(ElementKind::Vccs)) == "vccs");
    CHECK(std::string(to_string(ElementKind::VoltageSource)) ==
          "independent-voltage-source");
    CHECK(std::string(to_string(ElementKind::CurrentSource)) ==
          "independent-current-source");
}

TEST_CASE("well-formed divider validates clean")
{
    CHECK(validate(divider()).empty());
}

TEST_CASE("dangling terminal is diagnosed")
{
    Netlist n = divider();
    n.elements[1].b = "nowhere";
    CHECK(has_code(validate(n), "dangling-terminal", "R1"));
}

TEST_CASE("coupling coefficient at or above one is rejected")
{
    Netlist n;
    n.add(ElementKind::VoltageSource, "V1", "a", kGround, 1.0);
    n.add(ElementKind::Inductor, "L1", "a", "b", 1e-9);
    n.add(ElementKind::Inductor, "L2", "b", kGround, 1e-9);
    n.couplings.push_back({"L1", "L2", 1.2});
    CHECK(has_code(validate(n), "coupling-out-of-range", "L1/L2"));

    n.couplings[0].k = 0.99;
    CHECK(validate(n).empty());
}

TEST_CASE("coupling must reference two distinct inductors")
{
    Netlist n;
    n.add(ElementKind::VoltageSource, "V1", "a", kGround, 1.0);
    n.add(ElementKind::Inductor, "L1", "a", "b", 1e-9);
    n.add(ElementKind::Resistor, "R1", "b", kGround, 10.0);
    n.couplings.push_back({"L1", "L1", 0.5});
    CHECK(has_code(validate(n), "coupling-self", "L1"));

    n.couplings[0] = {"L1", "R1", 0.5};
    CHECK(has_code(validate(n), "coupling-not-inductor", "R1"));

    n.couplings[0] = {"L1", "L9", 0.5};
    CHECK(has_code(validate(n), "coupling-unknown-inductor", "L9"));
}

TEST_CASE("duplicate element names are diagnosed")
{
    Netlist n = divider();
    n.add(ElementKind::Resistor, "R1", "mid", kGround, 10.0);
    CHECK(has_code(validate(n), "duplicate-element-name", "R1"));
}

TEST_CASE("passive and vccs values must be positive, source values need not be")
{
    Netlist n = divider();
    n.elements[1].value = 0.0;
    CHECK(has_code(validate(n), "nonpositive-value", "R1"));

    n = divider();
    n.elements[0].value = 0.0; // a 0 V sense source is legal
    CHECK(validate(n).empty());

    n = divider();
    n.add_vccs("G1", "mid", kGround, "in", kGround, -0.01);
    CHECK(has_code(validate(n), "nonpositive-value", "G1"));
}

TEST_CASE("self loops and floating nodes are diagnosed")
{
    Netlist n = divider();
    n.add(ElementKind::Resistor, "R3", "mid", "mid", 10.0);
    CHECK(has_code(validate(n), "self-loop", "R3"));

    n = divider();
    n.add(ElementKind::Resistor, "R3", "island_a", "island_b", 10.0);
    const auto ds = validate(n);
    CHECK(has_code(ds, "floating-node", "island_a"));
    CHECK(has_code(ds, "floating-node", "island_b"));
}

TEST_CASE("port and noise references are checked")
{
    Netlist n = divider();
    n.ports.push_back({"p1", "ghost", 50.0, {"V1"}});
    CHECK(has_code(validate(n), "port-unknown-node", "p1"));

    n.ports[0] = {"p1", "in", -50.0, {}};
    CHECK(has_code(validate(n), "port-bad-z0", "p1"));

    n.ports[0] = {"p1", "in", 50.0, {"Vmissing"}};
    CHECK(has_code(validate(n), "port-source-unknown-element", "p1"));

    n.ports[0] = {"p1", "in", 50.0, {"V1"}};
    n.ports.push_back({"p1", "mid", 50.0, {}});
    CHECK(has_code(validate(n), "duplicate-port", "p1"));

    n = divider();
    NoiseSource s;
    s.kind = NoiseKind::ThermalResistor;
    s.name = "bad";
    s.element = "R9";
    n.noise_sources.push_back(s);
    CHECK(has_code(validate(n), "noise-unknown-element", "bad"));

    n.noise_sources[0].element = "V1";
    CHECK(has_code(validate(n), "noise-kind-mismatch", "bad"));

    n.noise_sources[0].element.clear();
    n.noise_sources[0].a = "ghost";
    n.noise_sources[0].b = kGround;
    CHECK(has_code(validate(n), "noise-unknown-node", "bad"));
}

TEST_CASE("input model is clean and carries exactly one input-reference noise source")
{
    const Netlist n = build_input_model(make_reference_design());
    CHECK(validate(n).empty());

    int inputs = 0;
    for (const auto& s : n.noise_sources)
    {
        if (s.is_input)
            ++inputs;
        if (!s.element.empty())
            CHECK(n.find(s.element) != nullptr);
    }
    CHECK(inputs == 1);
    REQUIRE(n.find("Vmeas") != nullptr);
    CHECK(n.find("Vmeas")->value == 0.0);
    REQUIRE(n.ports.size() == 1);
    CHECK(n.ports[0].name == "p1");
}

TEST_CASE("first-stage model validates clean and is deterministic")
{
    const DesignParams p = make_reference_design();
    const Netlist a = build_first_stage_model(p, 200.0);
    const Netlist b = build_first_stage_model(p, 200.0);
    CHECK(validate(a).empty());
    CHECK(a == b);
    REQUIRE(a.ports.size() == 2);
    CHECK(a.ports[1].node == "out1");
}

TEST_CASE("zero coupling leaves the element list unchanged and drops the coupling entry")
{
    DesignParams p = make_reference_design();
    const Netlist coupled = build_first_stage_model(p, 200.0);
    p.k = 0.0;
    const Netlist plain = build_first_stage_model(p, 200.0);

    CHECK(coupled.couplings.size() == 1);
    CHECK(plain.couplings.empty());
    CHECK(coupled.elements == plain.elements);
    CHECK(coupled.nodes == plain.nodes);
}

TEST_CASE("two-stage model realizes the control resistance for the requested vctrl")
{
    const DesignParams p = make_reference_design();

    const Netlist low = build_two_stage_model(p, 0.0);
    CHECK(validate(low).empty());
    REQUIRE(low.find("Rvg1") != nullptr);
    CHECK(low.find("Rvg1")->value == ro_vg(p.vg_device, 0.0));
    CHECK(low.find("Rvg1")->value > 0.999 * p.vg_device.r_off);

    const Netlist high = build_two_stage_model(p, kVctrlMax);
    REQUIRE(high.find("Rvg1") != nullptr);
    CHECK_THAT(high.find("Rvg1")->value, Catch::Matchers::WithinRel(45.0, 0.01));

    // The second stage is a fixed-gain replica: no control branch.
    CHECK(high.find("Rvg2") == nullptr);
    CHECK(high.find("C02") == nullptr);
    REQUIRE(high.ports.size() == 2);
    CHECK(high.ports[1].node == "out2");

    CHECK_THROWS_AS(build_two_stage_model(p, 0.75), std::domain_error);
    CHECK_THROWS_AS(build_two_stage_model(p, -0.01), std::domain_error);
}

TEST_CASE("randomized parameter draws always produce clean netlists")
{
    rfss_test::Draw d(417);
    for (int i = 0; i < 50; ++i)
    {
        const DesignParams p = rfss_test::random_design(d);
        CHECK(validate(p).empty());
        CHECK(validate(build_two_stage_model(p, d.uniform(0.0, kVctrlMax))).empty());
    }
}
