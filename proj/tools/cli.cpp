#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "salb/bench.hpp"
#include "salb/bnc.hpp"

namespace salb::cli {

namespace {

namespace fs = std::filesystem;

struct InputOptions {
    std::string file;
    std::string format = "native";
    int cycle_time = 0;
    int stations = 0;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("file", in.file, "instance file")->required();
    cmd->add_option("--format", in.format, "native or scholl")
        ->check(CLI::IsMember({"native", "scholl", "precedence_list"}));
    cmd->add_option("--cycle-time", in.cycle_time, "cycle time override")->check(CLI::PositiveNumber);
    cmd->add_option("--stations", in.stations, "station count override")->check(CLI::PositiveNumber);
}

InstanceFormat format_of(const std::string& s) {
    return s == "native" ? InstanceFormat::native : InstanceFormat::precedence_list;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Instance load(const fs::path& path, InstanceFormat format, std::optional<int> ct, std::optional<int> m) {
    ParseOverrides ov;
    ov.cycle_time = ct;
    ov.stations = m;
    return parse_instance(read_file(path), format, ov);
}

Instance load(const InputOptions& in) {
    return load(in.file, format_of(in.format), in.cycle_time > 0 ? std::optional(in.cycle_time) : std::nullopt,
                in.stations > 0 ? std::optional(in.stations) : std::nullopt);
}

CutMode cut_mode_of(const std::string& s) {
    if (s == "none") return CutMode::none;
    if (s == "standard") return CutMode::standard;
    return CutMode::all;
}

/// Serialises log output from concurrent solves.
struct Logger {
    explicit Logger(std::ostream& e) : err(e) {}

    std::ostream& err;
    bool info = false;
    bool trace = false;
    std::mutex mu;

    void line(const std::string& s) {
        std::lock_guard lock(mu);
        err << s << '\n';
    }

    void attach(SolverConfig& cfg, const std::string& tag) {
        if (info) cfg.log = [this, tag](const std::string& s) { line(tag + s); };
        if (trace) {
            cfg.on_prune = [this, tag](int task, int station, PruneRule rule) {
                line(tag + format_prune(task, station, rule));
            };
            cfg.on_cut = [this, tag](const Cut& c) { line(tag + "cut " + c.to_string()); };
        }
    }
};

SolverConfig config_for(const std::string& mode, const std::string& cuts, double time_limit) {
    SolverConfig cfg;
    cfg.cut_mode = cut_mode_of(cuts);
    if (mode == "ip") {
        cfg.node_propagation = false;
        cfg.rounding = false;
    } else if (mode == "cp") {
        cfg.engine = Engine::labeling;
    }
    if (time_limit > 0) cfg.time_limit = std::chrono::milliseconds(static_cast<long>(time_limit * 1000.0));
    return cfg;
}

int exit_for(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return exit_ok;
        case SolveStatus::infeasible: return exit_infeasible;
        default: return exit_limit;
    }
}

int cmd_solve(const InputOptions& in, const std::string& mode, const std::string& cuts, double time_limit,
              const std::string& out_path, std::ostream& out, Logger& log) {
    const Instance inst = load(in);
    SolverConfig cfg = config_for(mode, cuts, time_limit);
    log.attach(cfg, "");
    const auto r = minimize_stations(inst, cfg);
    const int code = exit_for(r.status);
    if (r.status == SolveStatus::infeasible) {
        out << "infeasible\n";
        return code;
    }
    if (r.report.assignment.station_of.empty()) {
        out << "status=" << solve_status_name(r.status) << " no solution found\n";
        return code;
    }
    if (out_path.empty()) {
        write_solution(out, r.report);
    } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot write " + out_path);
        write_solution(f, r.report);
        std::ostringstream summary;
        write_solution(summary, r.report);
        const std::string s = summary.str();
        const auto pos = s.rfind("stations=");
        out << s.substr(pos);
    }
    out << "status=" << solve_status_name(r.status) << '\n';
    return code;
}

int cmd_reduce(const InputOptions& in, const std::string& cuts, bool header, std::ostream& out, Logger& log) {
    const Instance inst = load(in);
    if (log.trace) {
        // Trace the CP stage once; the rows themselves are computed below.
        ReductionOptions o;
        o.cuts.mode = CutMode::none;
        o.max_passes = 0;
        o.on_prune = [&](int task, int station, PruneRule rule) { log.line(format_prune(task, station, rule)); };
        reduce_problem(inst, o);
    }
    const bool standard = cuts == "standard" || cuts == "both";
    const bool all = cuts == "all" || cuts == "both";
    BenchRow row = reduce_row(inst, fs::path(in.file).filename().string(), standard, all);
    if (header) out << bench_header() << '\n';
    out << format_row(row) << '\n';
    return exit_ok;
}

struct BenchResult {
    bool ok = false;
    BenchRow row;
    int stations = 0;
    std::string status;
    std::string warning;
};

int cmd_bench(const std::string& dir, const std::string& manifest_name, const std::string& mode,
              const std::string& cuts, double time_limit, int jobs, std::ostream& out, Logger& log) {
    const fs::path base(dir);
    const auto entries = parse_manifest(read_file(base / manifest_name));
    std::vector<BenchResult> results(entries.size());
    std::atomic<std::size_t> next{0};

    auto work = [&]() {
        for (std::size_t k = next++; k < entries.size(); k = next++) {
            const auto& e = entries[k];
            auto& res = results[k];
            const fs::path p = base / e.name;
            if (!fs::exists(p)) {
                res.warning = "skipping " + e.name + ": file not found";
                continue;
            }
            try {
                const Instance inst = load(p, e.format, e.cycle_time, e.stations);
                SolverConfig cfg = config_for(mode, cuts, time_limit);
                log.attach(cfg, e.name + ": ");
                const auto r = minimize_stations(inst, cfg);
                if (r.report.assignment.station_of.empty()) {
                    res.warning = "skipping " + e.name + ": " + solve_status_name(r.status);
                    continue;
                }
                res.stations = r.report.stations_used;
                res.status = solve_status_name(r.status);
                res.row = reduce_row(restrict_stations(inst, res.stations), e.name, true, true);
                res.row.total_ms = static_cast<double>(r.report.elapsed.count());
                res.ok = true;
            } catch (const std::exception& ex) {
                res.warning = "skipping " + e.name + ": " + ex.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::max(1, jobs); ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    int done = 0;
    for (const auto& r : results) {
        if (!r.warning.empty()) log.line("warning: " + r.warning);
        if (r.ok) ++done;
    }
    if (done == 0) {
        log.line("error: every manifest entry was skipped");
        return exit_error;
    }

    out << "# Reducing problem size\n";
    out << "instance\tn\tCT\tm\tinitial\tafter CP\tafter LP (standard)\tafter LP (all)\tstatus\n";
    for (const auto& r : results) {
        if (!r.ok) continue;
        const auto& b = r.row;
        out << b.name << '\t' << b.n << '\t' << b.ct << '\t' << b.m << '\t' << b.initial << '\t' << b.after_cp << '\t'
            << (b.after_lp_standard ? std::to_string(*b.after_lp_standard) : "-") << '\t'
            << (b.after_lp_all ? std::to_string(*b.after_lp_all) : "-") << '\t' << r.status << '\n';
    }
    out << "\n# Running time (min:sec)\n";
    out << "instance\tCT\tm\tCP\tcuts\ttotal\n";
    for (const auto& r : results) {
        if (!r.ok) continue;
        const auto& b = r.row;
        out << b.name << '\t' << b.ct << '\t' << b.m << '\t' << format_min_sec(b.cp_ms) << '\t'
            << format_min_sec(b.cut_ms) << '\t' << format_min_sec(b.total_ms) << '\n';
    }
    out << "\n# Rows\n" << bench_header() << '\n';
    int bad = 0;
    for (const auto& r : results) {
        if (!r.ok) continue;
        out << format_row(r.row) << '\n';
        for (const auto& v : row_violations(r.row)) {
            log.line("warning: " + r.row.name + ": " + v);
            ++bad;
        }
    }
    return bad == 0 ? exit_ok : exit_error;
}

std::pair<int, int> parse_range(const std::string& s) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) throw std::invalid_argument("--time-range expects LO..HI");
    try {
        std::size_t a = 0, b = 0;
        const std::string lo = s.substr(0, dots), hi = s.substr(dots + 2);
        const int l = std::stoi(lo, &a), h = std::stoi(hi, &b);
        if (a != lo.size() || b != hi.size()) throw std::invalid_argument("");
        return {l, h};
    } catch (const std::exception&) {
        throw std::invalid_argument("--time-range expects LO..HI");
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const std::string& log_level) {
    std::string level = log_level;
    if (level.empty())
        if (const char* env = std::getenv("SALB_LOG")) level = env;
    Logger log(err);
    log.trace = level == "trace";
    log.info = log.trace || level == "info";

    CLI::App app{"Simple assembly line balancing solver", "salb"};
    app.require_subcommand(1);

    InputOptions solve_in;
    std::string mode = "hybrid", cuts = "all", out_path;
    double time_limit = 0.0;
    auto* solve = app.add_subcommand("solve", "minimise the number of stations");
    add_input_options(solve, solve_in);
    solve->add_option("--mode", mode, "hybrid, ip or cp")->check(CLI::IsMember({"hybrid", "ip", "cp"}));
    solve->add_option("--cuts", cuts, "none, standard or all")->check(CLI::IsMember({"none", "standard", "all"}));
    solve->add_option("--time-limit", time_limit, "seconds")->check(CLI::NonNegativeNumber);
    solve->add_option("--out", out_path, "solution file");

    InputOptions reduce_in;
    std::string reduce_cuts = "both";
    bool header = false;
    auto* reduce = app.add_subcommand("reduce", "report domain sizes after each reduction stage");
    add_input_options(reduce, reduce_in);
    reduce->add_option("--cuts", reduce_cuts, "standard, all or both")
        ->check(CLI::IsMember({"none", "standard", "all", "both"}));
    reduce->add_flag("--header", header, "print the column header first");

    std::string bench_dir, manifest = "manifest.txt", bench_mode = "hybrid", bench_cuts = "all";
    double bench_limit = 300.0;
    int jobs = 1;
    auto* bench = app.add_subcommand("bench", "solve and reduce every instance of a manifest");
    bench->add_option("dir", bench_dir, "instance directory")->required();
    bench->add_option("--manifest", manifest, "manifest file inside dir");
    bench->add_option("--mode", bench_mode)->check(CLI::IsMember({"hybrid", "ip", "cp"}));
    bench->add_option("--cuts", bench_cuts)->check(CLI::IsMember({"none", "standard", "all"}));
    bench->add_option("--time-limit", bench_limit, "seconds per instance")->check(CLI::NonNegativeNumber);
    bench->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

    GenOptions gen_opt;
    std::string range = "1..9", gen_out;
    auto* gen = app.add_subcommand("gen", "write a random instance in native format");
    gen->add_option("--tasks", gen_opt.tasks)->required();
    gen->add_option("--density", gen_opt.density);
    gen->add_option("--seed", gen_opt.seed);
    gen->add_option("--time-range", range, "LO..HI");
    gen->add_option("--cycle-time", gen_opt.cycle_time, "default twice the largest time");
    gen->add_option("--stations", gen_opt.stations, "default first-fit bound");
    gen->add_option("--out", gen_out);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        if (*solve) return cmd_solve(solve_in, mode, cuts, time_limit, out_path, out, log);
        if (*reduce) return cmd_reduce(reduce_in, reduce_cuts, header, out, log);
        if (*bench) return cmd_bench(bench_dir, manifest, bench_mode, bench_cuts, bench_limit, jobs, out, log);
        if (*gen) {
            std::tie(gen_opt.time_lo, gen_opt.time_hi) = parse_range(range);
            const std::string text = serialize_native(generate_instance(gen_opt));
            if (gen_out.empty()) {
                out << text;
            } else {
                std::ofstream f(gen_out);
                if (!f) throw std::runtime_error("cannot write " + gen_out);
                f << text;
            }
            return exit_ok;
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return exit_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}

}  // namespace salb::cli
