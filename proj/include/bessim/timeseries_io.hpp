#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bessim/errors.hpp"
#include "bessim/simulation.hpp"

namespace bessim {

/// Fixed CSV column order: t, s_1..s_N, p_1..p_N, phat_1..phat_N,
/// xhat_1..xhat_N, pstar, psum, V1, V2, floor_active.
inline std::string timeseries_header(std::size_t n) {
    std::string h = "t";
    const auto block = [&](const char* prefix) {
        for (std::size_t i = 1; i <= n; ++i) h += "," + std::string(prefix) + std::to_string(i);
    };
    block("s_");
    block("p_");
    block("phat_");
    block("xhat_");
    h += ",pstar,psum,V1,V2,floor_active";
    return h;
}

namespace detail {

inline void append_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace detail

inline std::string timeseries_to_csv(const TimeSeries& series) {
    std::string out = timeseries_header(series.n);
    out += '\n';
    for (const TimeSeriesRow& row : series.rows) {
        detail::append_number(out, row.t);
        const auto block = [&](const Vector& v) {
            for (double x : v) {
                out += ',';
                detail::append_number(out, x);
            }
        };
        block(row.soc);
        block(row.p);
        block(row.p_hat);
        block(row.x_hat);
        for (double x : {row.p_star, row.p_sum, row.v1, row.v2}) {
            out += ',';
            detail::append_number(out, x);
        }
        out += ',' + std::to_string(row.floor_active);
        out += '\n';
    }
    return out;
}

inline void write_timeseries_csv(const std::string& path, const TimeSeries& series) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    const std::string csv = timeseries_to_csv(series);
    f.write(csv.data(), std::streamsize(csv.size()));
    if (!f) throw Error("failed writing " + path);
}

inline TimeSeries timeseries_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw MalformedInput("time series CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::size_t columns = std::size_t(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 10 || (columns - 6) % 4 != 0)
        throw MalformedInput("header has " + std::to_string(columns) +
                             " columns; expected 4*N+6");
    const std::size_t n = (columns - 6) / 4;
    if (line != timeseries_header(n))
        throw MalformedInput("unexpected CSV header: " + line);

    TimeSeries series;
    series.n = n;
    std::size_t line_no = 1;
    std::vector<double> fields(columns);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const char* p = line.c_str();
        for (std::size_t c = 0; c < columns; ++c) {
            char* endp = nullptr;
            fields[c] = std::strtod(p, &endp);
            if (endp == p)
                throw MalformedInput("line " + std::to_string(line_no) + ": bad number in column " +
                                     std::to_string(c + 1));
            p = endp;
            if (c + 1 < columns) {
                if (*p != ',')
                    throw MalformedInput("line " + std::to_string(line_no) +
                                         ": expected ',' after column " + std::to_string(c + 1));
                ++p;
            }
        }
        if (*p != '\0')
            throw MalformedInput("line " + std::to_string(line_no) + ": trailing characters");

        TimeSeriesRow row;
        std::size_t c = 0;
        row.t = fields[c++];
        const auto block = [&](Vector& v) {
            v.assign(fields.begin() + long(c), fields.begin() + long(c + n));
            c += n;
        };
        block(row.soc);
        block(row.p);
        block(row.p_hat);
        block(row.x_hat);
        row.p_star = fields[c++];
        row.p_sum = fields[c++];
        row.v1 = fields[c++];
        row.v2 = fields[c++];
        row.floor_active = int(fields[c++]);
        series.rows.push_back(std::move(row));
    }
    if (series.rows.empty()) throw MalformedInput("time series CSV has no data rows");
    return series;
}

inline TimeSeries read_timeseries_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MalformedInput("cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return timeseries_from_csv(buf.str());
}

} // namespace bessim
