// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rfss/json_io.hpp"
#include "rfss/lna.hpp"
#include "rfss/mna.hpp"
#include "rfss/models.hpp"
#include "rfss/noise.hpp"
#include "rfss/sweep.hpp"
#include "rfss/touchstone.hpp"

// Command-line front end.  Every failure leaves a single-line JSON
// diagnostic {"code","message","context"} on stderr; exit codes are 0 for
// success, 1 for numeric (solver) failures, 2 for input problems.  Outputs
// are byte-deterministic: fixed field order, fixed float formatting, no
// timestamps.

namespace
{

using nlohmann::ordered_json;

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    f << content;
    if (!f)
        throw std::runtime_error("write to '" + path + "' failed");
    std::cout << "wrote " << path << "\n";
}

struct GridFlags
{
    double fmin = 0.0;
    double fmax = 0.0;
    int points = 0;
    bool log = false;
};

void add_grid_flags(CLI::App* sub, GridFlags& g)
{
    sub->add_option("--fmin", g.fmin, "sweep start frequency, Hz");
    sub->add_option("--fmax", g.fmax, "sweep stop frequency, Hz");
    sub->add_option("--points", g.points, "number of grid points");
    sub->add_flag("--log", g.log, "log-spaced grid (default linear)");
}

rfss::FrequencyGrid make_grid(const GridFlags& g, double def_start, double def_stop)
{
    rfss::FrequencyGrid grid;
    grid.start = g.fmin > 0.0 ? g.fmin : def_start;
    grid.stop = g.fmax > 0.0 ? g.fmax : def_stop;
    grid.points = g.points > 0 ? g.points : 201;
    grid.spacing = g.log ? rfss::GridSpacing::Log : rfss::GridSpacing::Linear;
    return grid;
}

void require_valid_netlist(const rfss::Netlist& n)
{
    const auto issues = rfss::validate(n);
    if (issues.empty())
        return;
    ordered_json list = ordered_json::array();
    for (const auto& d : issues)
        list.push_back({{"code", d.code}, {"subject", d.subject}, {"message", d.message}});
    throw std::invalid_argument("netlist fails validation: " + list.dump());
}

std::string stem_of(const std::string& path)
{
    std::string s = path;
    if (const auto dot = s.rfind(".json"); dot != std::string::npos && dot == s.size() - 5)
        s.erase(dot);
    return s;
}

ordered_json metrics_json(const rfss::SweepMetrics& m)
{
    ordered_json j;
    j["f0_hz"] = m.f0_hz;
    j["peak_gain_db"] = m.peak_gain_db;
    j["bw_low_hz"] = m.bw_low_hz;
    j["bw_high_hz"] = m.bw_high_hz;
    j["bw_low_clipped"] = m.bw_low_clipped;
    j["bw_high_clipped"] = m.bw_high_clipped;
    j["bw_3db_hz"] = m.bw_3db_hz;
    j["s11_min_db"] = m.s11_min_db;
    j["f_s11_min_hz"] = m.f_s11_min_hz;
    j["matched"] = m.matched;
    if (m.matched)
    {
        j["match_low_hz"] = m.match_low_hz;
        j["match_high_hz"] = m.match_high_hz;
        j["match_low_clipped"] = m.match_low_clipped;
        j["match_high_clipped"] = m.match_high_clipped;
        j["matching_band_hz"] = m.matching_band_hz;
    }
    j["nf_at_f0_db"] = m.nf_at_f0_db;
    j["phase_at_f0_deg"] = m.phase_at_f0_deg;
    if (m.fom_db)
        j["fom_db"] = *m.fom_db;
    return j;
}

// Shared metric columns for the report CSVs; the FoM column only appears
// when linearity inputs were supplied.
std::string metrics_csv_header(bool with_fom)
{
    std::string h =
        "f0_hz,peak_gain_db,bw_low_hz,bw_high_hz,bw_3db_hz,bw_low_clipped,bw_high_clipped,"
        "s11_min_db,f_s11_min_hz,match_low_hz,match_high_hz,matching_band_hz,nf_at_f0_db,"
        "phase_at_f0_deg";
    if (with_fom)
        h += ",fom_db";
    return h;
}

std::string metrics_csv_row(const rfss::SweepMetrics& m, bool with_fom)
{
    std::string r = num(m.f0_hz) + "," + num(m.peak_gain_db) + "," + num(m.bw_low_hz) + "," +
                    num(m.bw_high_hz) + "," + num(m.bw_3db_hz) + "," +
                    (m.bw_low_clipped ? "1" : "0") + "," + (m.bw_high_clipped ? "1" : "0") + "," +
                    num(m.s11_min_db) + "," + num(m.f_s11_min_hz) + ",";
    if (m.matched)
        r += num(m.match_low_hz) + "," + num(m.match_high_hz) + "," + num(m.matching_band_hz);
    else
        r += ",,";
    r += "," + num(m.nf_at_f0_db) + "," + num(m.phase_at_f0_deg);
    if (with_fom)
        r += "," + (m.fom_db ? num(*m.fom_db) : std::string());
    return r;
}

ordered_json params_json(const rfss::DesignParams& p)
{
    ordered_json j;
    j["gm1"] = p.gm1;
    j["gm2"] = p.gm2;
    j["cgs"] = p.cgs;
    j["lg"] = p.lg;
    j["ls"] = p.ls;
    j["k"] = p.k;
    j["c0"] = p.c0;
    j["ro1"] = p.ro1;
    j["ro2"] = p.ro2;
    j["rs"] = p.rs;
    j["gamma_noise"] = p.gamma_noise;
    j["eta"] = p.eta;
    j["temperature"] = p.temperature;
    j["vg_device"] = {{"vth", p.vg_device.vth},
                      {"beta", p.vg_device.beta},
                      {"r_off", p.vg_device.r_off},
                      {"blend_v", p.vg_device.blend_v}};
    j["body"] = {{"vt0", p.body.vt0},
                 {"gamma_body", p.body.gamma_body},
                 {"phi_f", p.body.phi_f}};
    return j;
}

std::vector<rfss::TwoPort> s_column(const std::vector<rfss::SweepRow>& rows)
{
    std::vector<rfss::TwoPort> s;
    s.reserve(rows.size());
    for (const auto& r : rows)
        s.push_back(r.s);
    return s;
}

rfss::ParamsFile load_params(const std::string& path)
{
    if (path.empty())
        return rfss::ParamsFile{rfss::make_reference_design(), rfss::kReferenceF0, {}};
    return rfss::params_from_file(path);
}

void cmd_analyze(const std::string& input, std::string output, const GridFlags& gf, double z0)
{
    const rfss::Netlist n = rfss::netlist_from_file(input);
    require_valid_netlist(n);
    const std::size_t np = n.ports.size();
    if (np < 1 || np > 2)
        throw std::invalid_argument("analyze needs a netlist with 1 or 2 ports, found " +
                                    std::to_string(np));
    if (output.empty())
        output = stem_of(input);

    const rfss::FrequencyGrid grid = make_grid(gf, 1e9, 100e9);
    const std::vector<double> freqs = grid.frequencies();

    std::vector<rfss::TwoPort> table(freqs.size());
    rfss::detail::parallel_for(freqs.size(), [&](std::size_t i) {
        try
        {
            table[i] = rfss::port_parameters(n, freqs[i], rfss::ParamKind::S, z0);
        }
        catch (const rfss::SolverError& e)
        {
            throw rfss::SolverError("at " + std::to_string(freqs[i]) + " Hz: " + e.what(),
                                    e.suspects);
        }
    });

    std::ostringstream s2p;
    rfss::touchstone_write(table, z0, s2p);
    write_file(output + (np == 2 ? ".s2p" : ".s1p"), s2p.str());

    // NF is emitted when the netlist is set up for it: two ports and exactly
    // one input-flagged noise source.
    int inputs = 0;
    for (const auto& src : n.noise_sources)
        inputs += src.is_input ? 1 : 0;
    if (np == 2 && inputs == 1)
    {
        rfss::Netlist nview = n;
        nview.add(rfss::ElementKind::VoltageSource, "__nmeas", nview.ports.at(1).node,
                  rfss::kGround, 0.0);
        const rfss::OutputSpec out = rfss::OutputSpec::branch_current("__nmeas");
        std::vector<double> nf(freqs.size());
        rfss::detail::parallel_for(freqs.size(), [&](std::size_t i) {
            nf[i] = rfss::output_noise(nview, out, freqs[i]).nf_db;
        });
        std::string csv = "frequency_hz,nf_db\n";
        for (std::size_t i = 0; i < freqs.size(); ++i)
            csv += num(freqs[i]) + "," + num(nf[i]) + "\n";
        write_file(output + "_nf.csv", csv);
    }
}

void cmd_sweep(const std::string& input, const std::string& output, const GridFlags& gf,
               double vctrl)
{
    const rfss::ParamsFile pf = load_params(input);
    const rfss::FrequencyGrid grid = make_grid(gf, 0.75 * pf.f0_hz, 1.25 * pf.f0_hz);
    const std::vector<rfss::SweepRow> rows = rfss::frequency_sweep(pf.params, vctrl, grid);

    std::ostringstream s2p;
    rfss::touchstone_write(s_column(rows), pf.params.rs, s2p);
    write_file(output + ".s2p", s2p.str());

    const std::vector<double> phase = rfss::detail::unwrapped_phase_rad(rows);
    std::string csv = "frequency_hz,s11_db,s21_db,s21_phase_deg,nf_db\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const auto& r = rows[i];
        csv += num(r.f_hz) + "," + num(rfss::detail::db20(r.s.m(0, 0))) + "," +
               num(rfss::detail::db20(r.s.m(1, 0))) + "," + num(phase[i] * 180.0 / M_PI) + "," +
               num(r.nf_db) + "\n";
    }
    write_file(output + ".csv", csv);
}

void cmd_report(const std::string& input, const std::string& output, const GridFlags& gf,
                std::vector<double> vctrls, const std::vector<std::string>& corner_names)
{
    const rfss::ParamsFile pf = load_params(input);
    const rfss::DesignParams& p = pf.params;
    const rfss::FrequencyGrid grid = make_grid(gf, 0.75 * pf.f0_hz, 1.25 * pf.f0_hz);
    if (vctrls.empty())
        vctrls = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};

    std::vector<rfss::CornerFactors> corners;
    for (const auto& name : corner_names)
    {
        bool found = false;
        for (const auto& c : rfss::standard_corners())
            if (c.name == name)
            {
                corners.push_back(c);
                found = true;
            }
        if (!found)
            throw std::invalid_argument("unknown corner '" + name + "' (expected TT, FF, or SS)");
    }

    const rfss::VctrlSweepResult vs = rfss::vctrl_sweep(p, vctrls, grid, {}, pf.linearity);
    const std::vector<rfss::CornerEntry> ce =
        corners.empty() ? std::vector<rfss::CornerEntry>{}
                        : rfss::corner_sweep(p, corners, grid, vctrls.front(), {}, pf.linearity);

    // Header blocks: the DC-block corner at the strongest control setting
    // and the input-match residuals of the parameters as loaded.
    const double ro_vg_min = rfss::ro_vg(p.vg_device, rfss::kVctrlMax);
    const rfss::DcBlockCheck dc = rfss::dc_block_check(ro_vg_min, p.c0, pf.f0_hz);

    const double m = rfss::mutual_inductance(p);
    const double w0 = 2.0 * M_PI * pf.f0_hz;
    const double res_real = (p.gm1 * (p.ls + m) / p.cgs - p.rs) / p.rs;
    const double res_res = w0 * w0 * p.cgs * (p.lg + p.ls + 2.0 * m) - 1.0;
    const std::complex<double> zin = rfss::input_impedance_cf(p, pf.f0_hz);

    ordered_json rep;
    rep["params"] = params_json(p);
    rep["f0_hz"] = pf.f0_hz;
    rep["grid"] = {{"start_hz", grid.start},
                   {"stop_hz", grid.stop},
                   {"points", grid.points},
                   {"spacing", grid.spacing == rfss::GridSpacing::Log ? "log" : "linear"}};
    rep["dc_block"] = {{"corner_hz", dc.corner_hz},
                       {"ratio", dc.ratio},
                       {"pass", dc.pass},
                       {"ro_vg_min_ohms", ro_vg_min}};
    rep["input_match"] = {{"lg", p.lg},
                          {"ls", p.ls},
                          {"residual_real", res_real},
                          {"residual_resonance", res_res},
                          {"zin_re_ohms", zin.real()},
                          {"zin_im_ohms", zin.imag()}};
    ordered_json ventries = ordered_json::array();
    for (const auto& e : vs.entries)
    {
        ordered_json je;
        je["vctrl"] = e.vctrl;
        je["phase_dev_deg"] = e.phase_dev_deg;
        je["metrics"] = metrics_json(e.metrics);
        ventries.push_back(std::move(je));
    }
    rep["vctrl_entries"] = std::move(ventries);
    rep["peak_gain_spread_db"] = vs.peak_gain_spread_db;
    rep["f0_spread_hz"] = vs.f0_spread_hz;
    if (!ce.empty())
    {
        ordered_json centries = ordered_json::array();
        for (const auto& e : ce)
        {
            ordered_json je;
            je["corner"] = e.corner.name;
            je["gm_scale"] = e.corner.gm_scale;
            je["cgs_scale"] = e.corner.cgs_scale;
            je["vt_shift"] = e.corner.vt_shift;
            je["metrics"] = metrics_json(e.metrics);
            centries.push_back(std::move(je));
        }
        rep["corner_entries"] = std::move(centries);
    }
    write_file(output + ".json", rep.dump(2) + "\n");

    const bool with_fom = pf.linearity.has_value();
    std::string csv = "vctrl," + metrics_csv_header(with_fom) + ",phase_dev_deg\n";
    for (const auto& e : vs.entries)
        csv += num(e.vctrl) + "," + metrics_csv_row(e.metrics, with_fom) + "," +
               num(e.phase_dev_deg) + "\n";
    write_file(output + "_metrics.csv", csv);

    if (!ce.empty())
    {
        std::string ccsv = "corner," + metrics_csv_header(with_fom) + "\n";
        for (const auto& e : ce)
            ccsv += e.corner.name + "," + metrics_csv_row(e.metrics, with_fom) + "\n";
        write_file(output + "_corners.csv", ccsv);
    }
}

void cmd_design_match(double gm1, double cgs, double k, double f0, double rs,
                      const std::string& output)
{
    const rfss::MatchResult mr = rfss::design_input_match(gm1, cgs, k, f0, rs);
    rfss::DesignParams p = rfss::make_reference_design();
    p.gm1 = gm1;
    p.cgs = cgs;
    p.k = k;
    p.rs = rs;
    p.lg = mr.lg;
    p.ls = mr.ls;
    const std::complex<double> zin = rfss::input_impedance_cf(p, f0);

    ordered_json j;
    j["inputs"] = {{"gm1", gm1}, {"cgs", cgs}, {"k", k}, {"f0_hz", f0}, {"rs", rs}};
    j["lg"] = mr.lg;
    j["ls"] = mr.ls;
    j["iterations"] = mr.iterations;
    j["residual_real"] = mr.residual_real;
    j["residual_resonance"] = mr.residual_res;
    j["zin_at_f0"] = {{"re_ohms", zin.real()}, {"im_ohms", zin.imag()}};
    const std::string text = j.dump(2) + "\n";
    if (output.empty())
        std::cout << text;
    else
        write_file(output, text);
}

void cmd_fom(const rfss::FomInputs& in, bool explain)
{
    const double value = rfss::fom(in);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    std::cout << buf << "\n";
    if (explain)
    {
        const double gain_abs = std::pow(10.0, in.gain_db / 10.0);
        const double iip3_mw = std::pow(10.0, in.iip3_dbm / 10.0);
        const double f_minus_1 = std::pow(10.0, in.nf_db / 10.0) - 1.0;
        std::cout << "gain " << num(in.gain_db) << " dB -> " << num(gain_abs)
                  << " (power ratio 10^(dB/10))\n"
                  << "iip3 " << num(in.iip3_dbm) << " dBm -> " << num(iip3_mw) << " mW\n"
                  << "nf " << num(in.nf_db) << " dB -> F-1 = " << num(f_minus_1) << "\n"
                  << "numerator: " << num(gain_abs) << " * " << num(in.bw_ghz) << " GHz * "
                  << num(in.f0_ghz) << " GHz * " << num(iip3_mw) << " mW = "
                  << num(gain_abs * in.bw_ghz * in.f0_ghz * iip3_mw) << "\n"
                  << "denominator: " << num(f_minus_1) << " * " << num(in.pdc_mw) << " mW = "
                  << num(f_minus_1 * in.pdc_mw) << "\n"
                  << "fom = 20*log10(numerator/denominator) = " << num(value) << " dB\n"
                  << "note: gain and IIP3 enter as power ratios; published figures computed\n"
                  << "      from datasheet-rounded inputs can differ by a few tenths of a dB.\n";
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rfss: small-signal RF amplifier analysis toolkit"};
    app.require_subcommand(1);

    // analyze
    std::string an_input, an_output;
    GridFlags an_grid;
    double an_z0 = 50.0;
    CLI::App* an = app.add_subcommand("analyze", "S-parameters (and NF) of a JSON netlist");
    an->add_option("--input", an_input, "netlist JSON file")->required();
    an->add_option("--output", an_output, "output prefix (default: input stem)");
    an->add_option("--z0", an_z0, "reference impedance, ohms");
    add_grid_flags(an, an_grid);
    an->callback([&] { cmd_analyze(an_input, an_output, an_grid, an_z0); });

    // sweep
    std::string sw_input, sw_output = "sweep";
    GridFlags sw_grid;
    double sw_vctrl = 0.0;
    CLI::App* sw = app.add_subcommand("sweep", "frequency sweep of the two-stage design");
    sw->add_option("--input", sw_input, "design parameter JSON file (default: built-in design)");
    sw->add_option("--output", sw_output, "output prefix");
    sw->add_option("--vctrl", sw_vctrl, "gain control voltage, V");
    add_grid_flags(sw, sw_grid);
    sw->callback([&] { cmd_sweep(sw_input, sw_output, sw_grid, sw_vctrl); });

    // report
    std::string rp_input, rp_output = "report";
    GridFlags rp_grid;
    std::vector<double> rp_vctrls;
    std::vector<std::string> rp_corners;
    CLI::App* rp = app.add_subcommand("report", "per-vctrl metrics report of the design");
    rp->add_option("--input", rp_input, "design parameter JSON file (default: built-in design)");
    rp->add_option("--output", rp_output, "output prefix");
    rp->add_option("--vctrl", rp_vctrls, "control voltages, V")->delimiter(',');
    rp->add_option("--corners", rp_corners, "process corners (TT,FF,SS)")->delimiter(',');
    add_grid_flags(rp, rp_grid);
    rp->callback([&] { cmd_report(rp_input, rp_output, rp_grid, rp_vctrls, rp_corners); });

    // design-match
    double dm_gm1 = 0.020, dm_cgs = 20e-15, dm_k = 0.3, dm_f0 = rfss::kReferenceF0,
           dm_rs = 50.0;
    std::string dm_output;
    CLI::App* dm = app.add_subcommand("design-match", "solve the input matching network");
    dm->add_option("--gm1", dm_gm1, "transconductance, S");
    dm->add_option("--cgs", dm_cgs, "gate-source capacitance, F");
    dm->add_option("--k", dm_k, "Lg-Ls coupling coefficient");
    dm->add_option("--f0", dm_f0, "match frequency, Hz");
    dm->add_option("--rs", dm_rs, "source resistance, ohms");
    dm->add_option("--output", dm_output, "write JSON here instead of stdout");
    dm->callback([&] { cmd_design_match(dm_gm1, dm_cgs, dm_k, dm_f0, dm_rs, dm_output); });

    // fom
    rfss::FomInputs fi;
    bool fom_explain = false;
    CLI::App* fm = app.add_subcommand("fom", "figure of merit from six scalar inputs");
    fm->add_option("--gain-db", fi.gain_db, "peak gain, dB")->required();
    fm->add_option("--bw-ghz", fi.bw_ghz, "3-dB bandwidth, GHz")->required();
    fm->add_option("--f0-ghz", fi.f0_ghz, "center frequency, GHz")->required();
    fm->add_option("--iip3-dbm", fi.iip3_dbm, "input IP3, dBm")->required();
    fm->add_option("--nf-db", fi.nf_db, "noise figure, dB")->required();
    fm->add_option("--pdc-mw", fi.pdc_mw, "DC power, mW")->required();
    fm->add_flag("--explain", fom_explain, "print the factor-by-factor breakdown");
    fm->callback([&] { cmd_fom(fi, fom_explain); });

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        ordered_json d;
        d["code"] = "cli-usage";
        d["message"] = e.what();
        d["context"] = ordered_json::object();
        std::cerr << d.dump() << "\n";
        return 2;
    }
    catch (const nlohmann::json::parse_error& e)
    {
        ordered_json d;
        d["code"] = "json-parse";
        d["message"] = e.what();
        d["context"] = {{"byte", e.byte}};
        std::cerr << d.dump() << "\n";
        return 2;
    }
    catch (const rfss::SolverError& e)
    {
        ordered_json d;
        d["code"] = "solver-failure";
        d["message"] = e.what();
        d["context"] = {{"suspects", e.suspects}};
        std::cerr << d.dump() << "\n";
        return 1;
    }
    catch (const std::exception& e)
    {
        ordered_json d;
        d["code"] = "input-error";
        d["message"] = e.what();
        d["context"] = ordered_json::object();
        std::cerr << d.dump() << "\n";
        return 2;
    }
    return 0;
}
