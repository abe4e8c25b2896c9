// Copyright (c) 2026 the rfss developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfss/mna.hpp"

// Touchstone v1 text I/O for S-parameter tables.  The writer emits GHz / RI
// rows only (lossless round-trip); the reader is deliberately wider — all
// v1 frequency units and RI/MA/DB formats — so files from other tools load
// too.  Two-port rows follow the v1 column order S11 S21 S12 S22.

namespace rfss
{

namespace detail
{

inline std::string fmt_sig8(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.8g", v);
    return buf;
}

inline std::string lower(std::string s)
{
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace detail

inline void touchstone_write(const std::vector<TwoPort>& table, double z0, std::ostream& os)
{
    if (table.empty())
        throw std::invalid_argument("touchstone_write: empty table");
    if (!(z0 > 0.0))
        throw std::invalid_argument("touchstone_write: z0 must be positive");
    const auto np = table.front().m.rows();
    if (np < 1 || np > 2)
        throw std::invalid_argument("touchstone_write: only 1- and 2-port tables supported");
    double prev = 0.0;
    for (const auto& tp : table)
    {
        if (tp.kind != ParamKind::S)
            throw std::invalid_argument("touchstone_write: table must hold S-parameters");
        if (tp.m.rows() != np || tp.m.cols() != np)
            throw std::invalid_argument("touchstone_write: inconsistent port counts");
        if (!(tp.f_hz > prev))
            throw std::invalid_argument("touchstone_write: frequencies must increase strictly");
        prev = tp.f_hz;
        for (Eigen::Index i = 0; i < np; ++i)
            for (Eigen::Index j = 0; j < np; ++j)
                if (!std::isfinite(tp.m(i, j).real()) || !std::isfinite(tp.m(i, j).imag()))
                    throw std::invalid_argument("touchstone_write: non-finite entry");
    }

    os << "# GHz S RI R " << detail::fmt_sig8(z0) << "\n";
    for (const auto& tp : table)
    {
        os << detail::fmt_sig8(tp.f_hz / 1e9);
        // v1 two-port order: S11 S21 S12 S22 (column-major walk).
        for (Eigen::Index j = 0; j < np; ++j)
            for (Eigen::Index i = 0; i < np; ++i)
                os << ' ' << detail::fmt_sig8(tp.m(i, j).real()) << ' '
                   << detail::fmt_sig8(tp.m(i, j).imag());
        os << '\n';
    }
}

// Validates before touching the filesystem, so a bad table never leaves a
// partial file behind.
inline void touchstone_write(const std::vector<TwoPort>& table, double z0,
                             const std::string& path)
{
    std::ostringstream body;
    touchstone_write(table, z0, body);
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    f << body.str();
    if (!f)
        throw std::runtime_error("write to '" + path + "' failed");
}

struct TouchstoneData
{
    double z0 = 50.0;
    std::vector<TwoPort> points;
};

// Port count is fixed by the first data line: 3 numbers mean a one-port
// file, anything else a two-port whose rows may wrap across lines.
inline TouchstoneData touchstone_read(std::istream& is)
{
    TouchstoneData data;
    double funit = 1e9;
    enum class Fmt
    {
        RI,
        MA,
        DB
    } fmt = Fmt::MA;  // v1 defaults: GHz S MA R 50
    bool saw_option = false;
    int np = 0;

    std::string line;
    int lineno = 0;
    std::vector<double> pending;

    auto flush_row = [&]() {
        TwoPort tp;
        tp.kind = ParamKind::S;
        tp.f_hz = pending[0] * funit;
        tp.m.setZero(np, np);
        std::size_t k = 1;
        for (int j = 0; j < np; ++j)
            for (int i = 0; i < np; ++i)
            {
                const double u = pending[k], v = pending[k + 1];
                k += 2;
                switch (fmt)
                {
                    case Fmt::RI: tp.m(i, j) = {u, v}; break;
                    case Fmt::MA: tp.m(i, j) = std::polar(u, v * M_PI / 180.0); break;
                    case Fmt::DB:
                        tp.m(i, j) = std::polar(std::pow(10.0, u / 20.0), v * M_PI / 180.0);
                        break;
                }
            }
        if (!data.points.empty() && !(tp.f_hz > data.points.back().f_hz))
            throw std::runtime_error("touchstone: line " + std::to_string(lineno) +
                                     ": frequencies must increase strictly");
        data.points.push_back(std::move(tp));
        pending.clear();
    };

    while (std::getline(is, line))
    {
        ++lineno;
        if (const auto bang = line.find('!'); bang != std::string::npos)
            line.erase(bang);
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first))
            continue;
        if (first == "#")
        {
            if (saw_option)
                continue;  // v1: only the first option line counts
            saw_option = true;
            std::string tok;
            while (ss >> tok)
            {
                const std::string t = detail::lower(tok);
                if (t == "hz")
                    funit = 1.0;
                else if (t == "khz")
                    funit = 1e3;
                else if (t == "mhz")
                    funit = 1e6;
                else if (t == "ghz")
                    funit = 1e9;
                else if (t == "ri")
                    fmt = Fmt::RI;
                else if (t == "ma")
                    fmt = Fmt::MA;
                else if (t == "db")
                    fmt = Fmt::DB;
                else if (t == "s")
                    ;  // parameter type; only S supported
                else if (t == "y" || t == "z" || t == "h" || t == "g")
                    throw std::runtime_error("touchstone: only S-parameter files supported");
                else if (t == "r")
                {
                    if (!(ss >> data.z0) || !(data.z0 > 0.0))
                        throw std::runtime_error("touchstone: bad reference impedance");
                }
                else
                    throw std::runtime_error("touchstone: unknown option token '" + tok + "'");
            }
            continue;
        }

        std::istringstream ns(line);
        std::vector<double> nums;
        double v = 0.0;
        while (ns >> v)
            nums.push_back(v);
        if (!ns.eof())
        {
            ns.clear();
            std::string bad;
            ns >> bad;
            throw std::runtime_error("touchstone: line " + std::to_string(lineno) +
                                     ": unexpected token '" + bad + "'");
        }
        if (nums.empty())
            continue;
        if (np == 0)
            np = nums.size() == 3 ? 1 : 2;
        const std::size_t row_len = np == 1 ? 3 : 9;
        pending.insert(pending.end(), nums.begin(), nums.end());
        if (pending.size() > row_len)
            throw std::runtime_error("touchstone: line " + std::to_string(lineno) +
                                     ": row has more than " + std::to_string(row_len) +
                                     " numbers");
        if (pending.size() == row_len)
            flush_row();
    }
    if (!pending.empty())
        throw std::runtime_error("touchstone: truncated final row");
    if (data.points.empty())
        throw std::runtime_error("touchstone: no data rows");
    for (auto& p : data.points)
        p.z0 = data.z0;
    return data;
}

inline TouchstoneData touchstone_read(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "'");
    return touchstone_read(f);
}

} // namespace rfss
