#include "salb/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "salb/hybrid.hpp"

namespace salb {

namespace {

const char* const kColumns[] = {"instance", "n",         "CT",       "m",        "initial",  "after_cp",
                                "after_lp_standard", "after_lp_all", "cp_ms", "cut_ms", "total_ms"};

std::string fmt_ms(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string opt_long(const std::optional<long>& v) { return v ? std::to_string(*v) : "-"; }

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == '\t') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

long to_long(const std::string& s) {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
    return v;
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
}

}  // namespace

std::string bench_header() {
    std::string out;
    for (const char* c : kColumns) {
        if (!out.empty()) out += '\t';
        out += c;
    }
    return out;
}

std::string format_row(const BenchRow& r) {
    std::ostringstream os;
    os << r.name << '\t' << r.n << '\t' << r.ct << '\t' << r.m << '\t' << r.initial << '\t' << r.after_cp << '\t'
       << opt_long(r.after_lp_standard) << '\t' << opt_long(r.after_lp_all) << '\t' << fmt_ms(r.cp_ms) << '\t'
       << fmt_ms(r.cut_ms) << '\t' << fmt_ms(r.total_ms);
    return os.str();
}

BenchRow parse_row(const std::string& line) {
    const auto f = split_tabs(line);
    if (f.size() != std::size(kColumns)) throw std::invalid_argument("expected 11 columns");
    try {
        BenchRow r;
        r.name = f[0];
        r.n = static_cast<int>(to_long(f[1]));
        r.ct = static_cast<int>(to_long(f[2]));
        r.m = static_cast<int>(to_long(f[3]));
        r.initial = to_long(f[4]);
        r.after_cp = to_long(f[5]);
        if (f[6] != "-") r.after_lp_standard = to_long(f[6]);
        if (f[7] != "-") r.after_lp_all = to_long(f[7]);
        r.cp_ms = to_double(f[8]);
        r.cut_ms = to_double(f[9]);
        r.total_ms = to_double(f[10]);
        return r;
    } catch (const std::logic_error& e) {
        throw std::invalid_argument(std::string("bad row: ") + e.what());
    }
}

std::vector<std::string> row_violations(const BenchRow& r) {
    std::vector<std::string> v;
    if (r.after_cp > r.initial) v.push_back("after_cp > initial");
    if (r.after_lp_standard && *r.after_lp_standard > r.after_cp) v.push_back("after_lp_standard > after_cp");
    if (r.after_lp_all && *r.after_lp_all > r.after_cp) v.push_back("after_lp_all > after_cp");
    if (r.after_lp_standard && r.after_lp_all && *r.after_lp_all > *r.after_lp_standard)
        v.push_back("after_lp_all > after_lp_standard");
    if (r.cp_ms < 0 || r.cut_ms < 0 || r.total_ms < 0) v.push_back("negative time");
    return v;
}

std::string format_min_sec(double ms) {
    if (ms < 0) ms = 0;
    const double sec = ms / 1000.0;
    const long minutes = static_cast<long>(sec / 60.0);
    const double rest = sec - 60.0 * static_cast<double>(minutes);
    char buf[64];
    if (minutes < 10) std::snprintf(buf, sizeof buf, "%ld:%04.1f", minutes, std::floor(rest * 10.0) / 10.0);
    else std::snprintf(buf, sizeof buf, "%ld:%02ld", minutes, static_cast<long>(rest));
    return buf;
}

BenchRow reduce_row(const Instance& inst, const std::string& name, bool standard, bool all) {
    const auto t0 = std::chrono::steady_clock::now();
    BenchRow row;
    row.name = name;
    row.n = inst.n;
    row.ct = inst.max_capacity();
    row.m = inst.m;
    long initial = 0;
    for (const auto& s : inst.eligible) initial += static_cast<long>(s.size());
    row.initial = initial;
    row.after_cp = initial;

    bool first = true;
    auto take = [&](const ReductionResult& r) {
        if (first) {
            row.initial = r.report.initial_size;
            row.after_cp = r.feasible || r.failed_stage == "lp" ? r.report.after_cp : 0;
            row.cp_ms = r.report.cp_ms;
            first = false;
        }
        row.cut_ms += r.report.lp_ms;
    };

    std::optional<ReductionResult> std_run;
    if (standard || !all) {
        ReductionOptions o;
        o.cuts.mode = standard ? CutMode::standard : CutMode::none;
        std_run = reduce_problem(inst, o);
        take(*std_run);
        if (standard) row.after_lp_standard = std_run->report.after_lp;
    }
    if (all) {
        ReductionOptions o;
        o.cuts.mode = CutMode::all;
        if (std_run && std_run->feasible) o.seed = &std_run->domains;
        if (std_run && !std_run->feasible) {
            row.after_lp_all = 0;
        } else {
            auto r = reduce_problem(inst, o);
            if (!std_run) take(r);
            else row.cut_ms += r.report.lp_ms;
            row.after_lp_all = r.report.after_lp;
        }
    }
    row.total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

Instance generate_instance(const GenOptions& opt) {
    if (opt.tasks < 1) throw std::invalid_argument("--tasks must be at least 1");
    if (!(opt.density >= 0.0 && opt.density <= 1.0)) throw std::invalid_argument("--density must be in [0, 1]");
    if (opt.time_lo < 1 || opt.time_hi < opt.time_lo) throw std::invalid_argument("bad --time-range");
    if (opt.cycle_time < 0 || opt.stations < 0) throw std::invalid_argument("negative cycle time or stations");

    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> time(opt.time_lo, opt.time_hi);
    std::bernoulli_distribution coin(opt.density);

    Instance inst;
    inst.n = opt.tasks;
    for (int j = 0; j < opt.tasks; ++j) inst.task_time.push_back(time(rng));
    for (int a = 0; a < opt.tasks; ++a)
        for (int b = a + 1; b < opt.tasks; ++b)
            if (coin(rng)) inst.edges.push_back({a, b});
    int tmax = 0;
    for (int t : inst.task_time) tmax = std::max(tmax, t);
    const int ct = opt.cycle_time > 0 ? opt.cycle_time : 2 * tmax;
    if (ct < tmax) throw std::invalid_argument("cycle time below the largest task time");
    inst.m = 1;
    inst.capacity.assign(1, ct);
    inst.eligible.assign(static_cast<std::size_t>(inst.n), {1});
    inst.m = opt.stations > 0 ? opt.stations : first_fit_upper_bound(inst, ct);
    inst.capacity.assign(static_cast<std::size_t>(inst.m), ct);
    std::vector<int> all;
    for (int i = 1; i <= inst.m; ++i) all.push_back(i);
    inst.eligible.assign(static_cast<std::size_t>(inst.n), all);
    return inst;
}

std::vector<ManifestEntry> parse_manifest(const std::string& text) {
    std::vector<ManifestEntry> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::vector<std::string> f;
        for (std::string w; ls >> w;) f.push_back(w);
        if (f.empty()) continue;
        if (f.size() != 4) throw ParseError(lineno, "expected: name format CT m");
        ManifestEntry e;
        e.name = f[0];
        if (f[1] == "native") e.format = InstanceFormat::native;
        else if (f[1] == "scholl" || f[1] == "precedence_list") e.format = InstanceFormat::precedence_list;
        else throw ParseError(lineno, "unknown format '" + f[1] + "'");
        auto opt_int = [&](const std::string& s) -> std::optional<int> {
            if (s == "-") return std::nullopt;
            try {
                long v = to_long(s);
                if (v < 1) throw std::invalid_argument("");
                return static_cast<int>(v);
            } catch (const std::exception&) {
                throw ParseError(lineno, "bad number '" + s + "'");
            }
        };
        e.cycle_time = opt_int(f[2]);
        e.stations = opt_int(f[3]);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace salb
