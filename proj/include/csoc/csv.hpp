#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "csoc/game.hpp"

namespace csoc {

inline constexpr const char* kTraceCsvHeader = "hour,b_pre,d,a,b_post,x,y,stage_cost";

// One trace row: integers exact, stage cost at six decimal places.
inline void write_trace_row(std::ostream& out, const HourRecord& h) {
    char cost[32];
    std::snprintf(cost, sizeof(cost), "%.6f", h.stage_cost);
    out << h.hour << ',' << h.backlog_pre << ',' << h.defender_action << ','
        << h.attacker_action << ',' << h.backlog_post << ',' << h.defender_remaining << ','
        << h.attacker_remaining << ',' << cost << '\n';
}

inline void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    out << kTraceCsvHeader << '\n';
    for (const auto& h : trace.hours) write_trace_row(out, h);
}

inline void write_trace_csv(const std::string& path, const RunTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_trace_csv(out, trace);
}

// Bulk form with a leading run column.
inline void write_traces_csv(const std::string& path, const std::vector<RunTrace>& traces) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "run," << kTraceCsvHeader << '\n';
    for (std::size_t r = 0; r < traces.size(); ++r) {
        for (const auto& h : traces[r].hours) {
            out << r << ',';
            write_trace_row(out, h);
        }
    }
}

struct StatsRow {
    std::string label;
    double mean_sup_cost = 0.0;
    std::array<double, 4> proportions{};
    std::size_t worst_run_index = 0;
    long long worst_run_max_backlog = 0;
    int runs = 0;
};

inline void write_stats_csv(const std::string& path, const std::vector<StatsRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "label,mean_sup_cost,green,yellow,orange,red,worst_run,worst_run_max_backlog,runs\n";
    for (const auto& r : rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f", r.mean_sup_cost,
                      r.proportions[0], r.proportions[1], r.proportions[2], r.proportions[3]);
        out << r.label << ',' << buf << ',' << r.worst_run_index << ','
            << r.worst_run_max_backlog << ',' << r.runs << '\n';
    }
}

} // namespace csoc
