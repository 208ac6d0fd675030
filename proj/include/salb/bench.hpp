#ifndef SALB_BENCH_HPP
#define SALB_BENCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "salb/instance.hpp"

namespace salb {

/// One row of the reduction / timing report. Sizes are sums of |S_j|.
struct BenchRow {
    std::string name;
    int n = 0;
    int ct = 0;
    int m = 0;
    long initial = 0;
    long after_cp = 0;
    std::optional<long> after_lp_standard;
    std::optional<long> after_lp_all;
    double cp_ms = 0.0;
    double cut_ms = 0.0;
    double total_ms = 0.0;
};

/// Tab-separated header matching format_row.
std::string bench_header();
/// Tab-separated; columns that did not run are "-".
std::string format_row(const BenchRow& row);
/// Inverse of format_row; throws std::invalid_argument.
BenchRow parse_row(const std::string& line);
/// Broken BenchRow invariants, empty when fine.
std::vector<std::string> row_violations(const BenchRow& row);

/// "m:ss" with tenths of a second below ten minutes, e.g. "0:03.2".
std::string format_min_sec(double ms);

/// Runs the standard and/or all-cuts reductions; the all-cuts run starts
/// from the standard domains when both run. cp_ms and initial/after_cp come
/// from the first run, cut_ms sums the LP stages, total_ms is wall time.
BenchRow reduce_row(const Instance& inst, const std::string& name, bool standard, bool all);

struct GenOptions {
    int tasks = 10;
    double density = 0.2;
    std::uint64_t seed = 1;
    int time_lo = 1;
    int time_hi = 9;
    int cycle_time = 0;  // 0: twice the largest task time
    int stations = 0;    // 0: first-fit upper bound
};

/// Edges (j1, j2), j1 < j2, each with probability `density`; no transitive
/// closure. Throws std::invalid_argument on bad options.
Instance generate_instance(const GenOptions& opt);

struct ManifestEntry {
    std::string name;  // file name relative to the manifest directory
    InstanceFormat format = InstanceFormat::native;
    std::optional<int> cycle_time;
    std::optional<int> stations;
};

/// Lines "name format CT m"; '#' comments; "-" leaves a field unset.
/// Throws ParseError with the line number.
std::vector<ManifestEntry> parse_manifest(const std::string& text);

}  // namespace salb

#endif  // SALB_BENCH_HPP
