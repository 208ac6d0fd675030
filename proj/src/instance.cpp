#include "salb/instance.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <istream>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace salb {

int Instance::max_capacity() const {
    return capacity.empty() ? 0 : *std::max_element(capacity.begin(), capacity.end());
}

bool Instance::uniform_capacity() const {
    return std::adjacent_find(capacity.begin(), capacity.end(), std::not_equal_to<>()) == capacity.end();
}

long Instance::total_time() const {
    return std::accumulate(task_time.begin(), task_time.end(), 0L);
}

std::vector<int> Instance::station_tasks(int station) const {
    std::vector<int> out;
    for (int j = 0; j < n; ++j) {
        const auto& s = eligible[static_cast<std::size_t>(j)];
        if (std::binary_search(s.begin(), s.end(), station)) out.push_back(j);
    }
    return out;
}

long Instance::domain_size() const {
    long total = 0;
    for (const auto& s : eligible) total += static_cast<long>(s.size());
    return total;
}

int Assignment::highest_station() const {
    return station_of.empty() ? 0 : *std::max_element(station_of.begin(), station_of.end());
}

Precedence::Precedence(const Instance& inst)
    : n_(inst.n),
      succ_(static_cast<std::size_t>(inst.n)),
      pred_(static_cast<std::size_t>(inst.n)),
      reach_(static_cast<std::size_t>(inst.n) * static_cast<std::size_t>(inst.n), 0) {
    std::vector<int> indeg(static_cast<std::size_t>(n_), 0);
    for (const auto& e : inst.edges) {
        if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_) continue;
        succ_[static_cast<std::size_t>(e.from)].push_back(e.to);
        pred_[static_cast<std::size_t>(e.to)].push_back(e.from);
        ++indeg[static_cast<std::size_t>(e.to)];
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int j = 0; j < n_; ++j)
        if (indeg[static_cast<std::size_t>(j)] == 0) ready.push(j);
    while (!ready.empty()) {
        int j = ready.top();
        ready.pop();
        topo_.push_back(j);
        for (int s : succ_[static_cast<std::size_t>(j)])
            if (--indeg[static_cast<std::size_t>(s)] == 0) ready.push(s);
    }
    if (static_cast<int>(topo_.size()) != n_) {
        acyclic_ = false;
        topo_.clear();
        return;
    }
    // Reverse topological sweep: reach(a) = succ(a) plus their reach.
    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
        int a = *it;
        for (int s : succ_[static_cast<std::size_t>(a)]) {
            reach_[idx(a, s)] = 1;
            for (int b = 0; b < n_; ++b)
                if (reach_[idx(s, b)]) reach_[idx(a, b)] = 1;
        }
    }
}

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

struct Line {
    int number;
    std::string text;
};

std::vector<Line> content_lines(std::istream& in) {
    std::vector<Line> out;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        auto first = raw.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = raw.find_last_not_of(" \t\r");
        out.push_back({number, raw.substr(first, last - first + 1)});
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> tokens;
    for (std::string t; is >> t;) tokens.push_back(t);
    return tokens;
}

int to_int(const std::string& token, int line) {
    int value = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw ParseError(line, "expected integer, got '" + token + "'");
    return value;
}

std::vector<int> all_stations(int m) {
    std::vector<int> s(static_cast<std::size_t>(std::max(m, 0)));
    std::iota(s.begin(), s.end(), 1);
    return s;
}

void throw_if_invalid(const Instance& inst) {
    auto violations = validate(inst);
    if (violations.empty()) return;
    std::string msg = "invalid instance: " + violations.front();
    for (std::size_t i = 1; i < violations.size(); ++i) msg += "; " + violations[i];
    throw InstanceError(msg);
}

Instance parse_native(const std::vector<Line>& lines, const ParseOverrides& ov) {
    std::size_t pos = 0;
    auto next = [&](const char* what) -> const Line& {
        if (pos >= lines.size()) {
            int last = lines.empty() ? 0 : lines.back().number;
            throw ParseError(last + 1, std::string("unexpected end of input, expected ") + what);
        }
        return lines[pos++];
    };

    const Line& header = next("'n m'");
    auto head = split_ws(header.text);
    if (head.size() != 2) throw ParseError(header.number, "expected 'n m'");
    Instance inst;
    inst.n = to_int(head[0], header.number);
    int file_m = to_int(head[1], header.number);
    if (inst.n < 1) throw ParseError(header.number, "task count must be positive");
    if (file_m < 1) throw ParseError(header.number, "station count must be positive");

    const Line& caps = next("station capacities");
    auto cap_tokens = split_ws(caps.text);
    if (static_cast<int>(cap_tokens.size()) != file_m)
        throw ParseError(caps.number, "expected " + std::to_string(file_m) + " capacities");
    std::vector<int> file_caps;
    for (const auto& t : cap_tokens) file_caps.push_back(to_int(t, caps.number));

    inst.m = ov.stations.value_or(file_m);
    if (inst.m < 1) throw InstanceError("station count override must be positive");
    if (ov.cycle_time) {
        inst.capacity.assign(static_cast<std::size_t>(inst.m), *ov.cycle_time);
    } else if (inst.m == file_m) {
        inst.capacity = file_caps;
    } else {
        if (std::adjacent_find(file_caps.begin(), file_caps.end(), std::not_equal_to<>()) != file_caps.end())
            throw InstanceError("station override needs uniform capacities or a cycle-time override");
        inst.capacity.assign(static_cast<std::size_t>(inst.m), file_caps.front());
    }

    for (int j = 0; j < inst.n; ++j) {
        const Line& l = next("task line 't S'");
        auto tok = split_ws(l.text);
        if (tok.size() < 2) throw ParseError(l.number, "expected 't S'");
        inst.task_time.push_back(to_int(tok[0], l.number));
        std::vector<int> stations;
        if (tok[1] == "*") {
            if (tok.size() != 2) throw ParseError(l.number, "unexpected tokens after '*'");
            stations = all_stations(inst.m);
        } else {
            int k = to_int(tok[1], l.number);
            if (k < 0 || static_cast<int>(tok.size()) != k + 2)
                throw ParseError(l.number, "eligible list length does not match its count");
            for (int q = 0; q < k; ++q) {
                int s = to_int(tok[static_cast<std::size_t>(q + 2)], l.number);
                if (s > inst.m && ov.stations && *ov.stations < file_m) continue;  // truncated away
                stations.push_back(s);
            }
            std::sort(stations.begin(), stations.end());
            stations.erase(std::unique(stations.begin(), stations.end()), stations.end());
        }
        inst.eligible.push_back(std::move(stations));
    }

    const Line& pl = next("edge count");
    auto ptok = split_ws(pl.text);
    if (ptok.size() != 1) throw ParseError(pl.number, "expected edge count");
    int p = to_int(ptok[0], pl.number);
    if (p < 0) throw ParseError(pl.number, "edge count must be non-negative");
    for (int e = 0; e < p; ++e) {
        const Line& l = next("edge 'j1 j2'");
        auto tok = split_ws(l.text);
        if (tok.size() != 2) throw ParseError(l.number, "expected 'j1 j2'");
        int a = to_int(tok[0], l.number);
        int b = to_int(tok[1], l.number);
        if (a < 1 || a > inst.n || b < 1 || b > inst.n) throw ParseError(l.number, "edge references unknown task");
        inst.edges.push_back({a - 1, b - 1});
    }
    if (pos != lines.size()) throw ParseError(lines[pos].number, "trailing content");
    return inst;
}

Instance parse_precedence_list(const std::vector<Line>& lines, const ParseOverrides& ov) {
    if (lines.empty()) throw ParseError(1, "empty input");
    auto head = split_ws(lines[0].text);
    if (head.size() != 1) throw ParseError(lines[0].number, "expected task count");
    Instance inst;
    inst.n = to_int(head[0], lines[0].number);
    if (inst.n < 1) throw ParseError(lines[0].number, "task count must be positive");
    if (lines.size() < static_cast<std::size_t>(inst.n) + 1)
        throw ParseError(lines.back().number + 1, "unexpected end of input, expected task time");
    for (int j = 0; j < inst.n; ++j) {
        const Line& l = lines[static_cast<std::size_t>(j + 1)];
        auto tok = split_ws(l.text);
        if (tok.size() != 1) throw ParseError(l.number, "expected one task time");
        inst.task_time.push_back(to_int(tok[0], l.number));
    }
    bool terminated = false;
    for (std::size_t q = static_cast<std::size_t>(inst.n) + 1; q < lines.size() && !terminated; ++q) {
        const Line& l = lines[q];
        auto comma = l.text.find(',');
        if (comma == std::string::npos) throw ParseError(l.number, "expected 'a,b'");
        auto lhs = split_ws(l.text.substr(0, comma));
        auto rhs = split_ws(l.text.substr(comma + 1));
        if (lhs.size() != 1 || rhs.size() != 1) throw ParseError(l.number, "expected 'a,b'");
        int a = to_int(lhs[0], l.number);
        int b = to_int(rhs[0], l.number);
        if (a == -1 && b == -1) {
            terminated = true;
            break;
        }
        if (a < 1 || a > inst.n || b < 1 || b > inst.n) throw ParseError(l.number, "edge references unknown task");
        inst.edges.push_back({a - 1, b - 1});
    }
    if (!terminated) throw ParseError(lines.back().number + 1, "missing '-1,-1' terminator");

    if (!ov.cycle_time) throw InstanceError("precedence_list format requires a cycle-time override");
    int ct = *ov.cycle_time;
    if (ct < 1) throw InstanceError("cycle time must be positive");
    Precedence prec(inst);
    if (!prec.acyclic()) throw InstanceError("invalid instance: precedence cycle detected");
    int tmax = *std::max_element(inst.task_time.begin(), inst.task_time.end());
    if (tmax > ct) throw InstanceError("invalid instance: a task time exceeds the cycle time");
    inst.m = ov.stations ? *ov.stations : first_fit_upper_bound(inst, ct);
    if (inst.m < 1) throw InstanceError("station count override must be positive");
    inst.capacity.assign(static_cast<std::size_t>(inst.m), ct);
    inst.eligible.assign(static_cast<std::size_t>(inst.n), all_stations(inst.m));
    return inst;
}

}  // namespace

Instance parse_instance(std::istream& in, InstanceFormat format, const ParseOverrides& overrides) {
    auto lines = content_lines(in);
    Instance inst = format == InstanceFormat::native ? parse_native(lines, overrides)
                                                     : parse_precedence_list(lines, overrides);
    throw_if_invalid(inst);
    return inst;
}

Instance parse_instance(std::string_view text, InstanceFormat format, const ParseOverrides& overrides) {
    std::istringstream in{std::string(text)};
    return parse_instance(in, format, overrides);
}

std::string serialize_native(const Instance& inst) {
    std::ostringstream os;
    os << inst.n << ' ' << inst.m << '\n';
    for (int i = 0; i < inst.m; ++i) os << (i ? " " : "") << inst.capacity[static_cast<std::size_t>(i)];
    os << '\n';
    const auto all = all_stations(inst.m);
    for (int j = 0; j < inst.n; ++j) {
        const auto& s = inst.eligible[static_cast<std::size_t>(j)];
        os << inst.task_time[static_cast<std::size_t>(j)];
        if (s == all) {
            os << " *";
        } else {
            os << ' ' << s.size();
            for (int i : s) os << ' ' << i;
        }
        os << '\n';
    }
    os << inst.edges.size() << '\n';
    for (const auto& e : inst.edges) os << e.from + 1 << ' ' << e.to + 1 << '\n';
    return os.str();
}

std::vector<std::string> validate(const Instance& inst) {
    std::vector<std::string> out;
    if (inst.n < 1) out.emplace_back("task count must be positive");
    if (inst.m < 1) out.emplace_back("station count must be positive");
    if (static_cast<int>(inst.task_time.size()) != inst.n) out.emplace_back("task time count differs from n");
    if (static_cast<int>(inst.eligible.size()) != inst.n) out.emplace_back("eligible set count differs from n");
    if (static_cast<int>(inst.capacity.size()) != inst.m) out.emplace_back("capacity count differs from m");
    if (!out.empty()) return out;

    for (int i = 1; i <= inst.m; ++i)
        if (inst.cap(i) < 1) out.push_back("station " + std::to_string(i) + " has non-positive capacity");
    for (int j = 0; j < inst.n; ++j) {
        const std::string task = "task " + std::to_string(j + 1);
        const int t = inst.task_time[static_cast<std::size_t>(j)];
        const auto& s = inst.eligible[static_cast<std::size_t>(j)];
        if (t < 1) out.push_back(task + " has non-positive time");
        if (s.empty()) {
            out.push_back(task + ": empty eligible set");
            continue;
        }
        bool in_range = true;
        for (int i : s)
            if (i < 1 || i > inst.m) {
                out.push_back(task + ": station " + std::to_string(i) + " out of range");
                in_range = false;
            }
        if (!std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end())
            out.push_back(task + ": eligible set not sorted and unique");
        if (in_range && std::none_of(s.begin(), s.end(), [&](int i) { return t <= inst.cap(i); }))
            out.push_back(task + " fits no station");
    }
    bool edges_ok = true;
    for (const auto& e : inst.edges)
        if (e.from < 0 || e.from >= inst.n || e.to < 0 || e.to >= inst.n) {
            out.push_back("edge references unknown task");
            edges_ok = false;
        }
    if (edges_ok && !Precedence(inst).acyclic()) out.emplace_back("precedence cycle detected");
    return out;
}

std::vector<std::string> check_assignment(const Instance& inst, const Assignment& a) {
    std::vector<std::string> out;
    if (static_cast<int>(a.station_of.size()) != inst.n) {
        out.emplace_back("assignment size differs from n");
        return out;
    }
    std::vector<long> load(static_cast<std::size_t>(inst.m) + 1, 0);
    for (int j = 0; j < inst.n; ++j) {
        int i = a.station_of[static_cast<std::size_t>(j)];
        const auto& s = inst.eligible[static_cast<std::size_t>(j)];
        if (!std::binary_search(s.begin(), s.end(), i)) {
            out.push_back("task " + std::to_string(j + 1) + " on ineligible station " + std::to_string(i));
            continue;
        }
        load[static_cast<std::size_t>(i)] += inst.task_time[static_cast<std::size_t>(j)];
    }
    for (int i = 1; i <= inst.m; ++i)
        if (load[static_cast<std::size_t>(i)] > inst.cap(i))
            out.push_back("station " + std::to_string(i) + " over capacity");
    for (const auto& e : inst.edges)
        if (a.station_of[static_cast<std::size_t>(e.from)] > a.station_of[static_cast<std::size_t>(e.to)])
            out.push_back("precedence " + std::to_string(e.from + 1) + "->" + std::to_string(e.to + 1) + " violated");
    return out;
}

Assignment first_fit_assignment(const Instance& inst, int cycle_time) {
    Precedence prec(inst);
    if (!prec.acyclic()) throw InstanceError("precedence cycle detected");
    for (int t : inst.task_time)
        if (t > cycle_time) throw std::invalid_argument("cycle time below the largest task time");
    Assignment a;
    a.station_of.assign(static_cast<std::size_t>(inst.n), 0);
    std::vector<long> load;
    for (int j : prec.topological_order()) {
        int earliest = 1;
        for (int p : prec.predecessors(j)) earliest = std::max(earliest, a.station_of[static_cast<std::size_t>(p)]);
        int i = earliest;
        const int t = inst.task_time[static_cast<std::size_t>(j)];
        while (true) {
            if (static_cast<int>(load.size()) < i) load.resize(static_cast<std::size_t>(i), 0);
            if (load[static_cast<std::size_t>(i - 1)] + t <= cycle_time) break;
            ++i;
        }
        load[static_cast<std::size_t>(i - 1)] += t;
        a.station_of[static_cast<std::size_t>(j)] = i;
    }
    return a;
}

int first_fit_upper_bound(const Instance& inst, int cycle_time) {
    return first_fit_assignment(inst, cycle_time).highest_station();
}

int first_fit_upper_bound(const Instance& inst) {
    if (!inst.uniform_capacity() || inst.capacity.empty())
        throw std::invalid_argument("first_fit_upper_bound needs a uniform cycle time");
    return first_fit_upper_bound(inst, inst.capacity.front());
}

std::optional<Assignment> first_fit(const Instance& inst) {
    Precedence prec(inst);
    if (!prec.acyclic()) return std::nullopt;
    Assignment a;
    a.station_of.assign(static_cast<std::size_t>(inst.n), 0);
    std::vector<long> load(static_cast<std::size_t>(inst.m) + 1, 0);
    for (int j : prec.topological_order()) {
        int earliest = 1;
        for (int p : prec.predecessors(j)) earliest = std::max(earliest, a.station_of[static_cast<std::size_t>(p)]);
        const int t = inst.task_time[static_cast<std::size_t>(j)];
        int chosen = 0;
        for (int i : inst.eligible[static_cast<std::size_t>(j)]) {
            if (i < earliest) continue;
            if (load[static_cast<std::size_t>(i)] + t <= inst.cap(i)) {
                chosen = i;
                break;
            }
        }
        if (chosen == 0) return std::nullopt;
        load[static_cast<std::size_t>(chosen)] += t;
        a.station_of[static_cast<std::size_t>(j)] = chosen;
    }
    return a;
}

int station_lower_bound(const Instance& inst) {
    const long ct = inst.max_capacity();
    if (ct <= 0) return 0;
    return static_cast<int>((inst.total_time() + ct - 1) / ct);
}

Instance restrict_stations(const Instance& inst, int m) {
    Instance out = inst;
    out.m = m;
    out.capacity.resize(static_cast<std::size_t>(m), inst.capacity.empty() ? 1 : inst.capacity.back());
    for (auto& s : out.eligible) s.erase(std::upper_bound(s.begin(), s.end(), m), s.end());
    return out;
}

Instance with_eligible(const Instance& inst, std::vector<std::vector<int>> eligible) {
    if (static_cast<int>(eligible.size()) != inst.n) throw std::invalid_argument("domain count differs from n");
    Instance out = inst;
    for (int j = 0; j < inst.n; ++j) {
        auto& s = eligible[static_cast<std::size_t>(j)];
        std::sort(s.begin(), s.end());
        const auto& orig = inst.eligible[static_cast<std::size_t>(j)];
        if (!std::includes(orig.begin(), orig.end(), s.begin(), s.end()))
            throw std::invalid_argument("domain of task " + std::to_string(j + 1) + " is not a subset");
    }
    out.eligible = std::move(eligible);
    return out;
}

namespace {

// Station-by-station search: either add a ready task to the open station or
// close it. Every feasible assignment is reachable this way, and failed
// (placed set, station, load) states are memoised.
class StationSearch {
public:
    StationSearch(const Instance& inst, long node_limit)
        : inst_(inst), prec_(inst), node_limit_(node_limit) {
        pred_mask_.assign(static_cast<std::size_t>(inst.n), 0);
        for (const auto& e : inst.edges) pred_mask_[static_cast<std::size_t>(e.to)] |= bit(e.from);
        full_ = inst.n == 64 ? ~0ULL : (bit(inst.n) - 1);
    }

    // 1 feasible, 0 infeasible, -1 budget
    int feasible(int stations, std::vector<int>& station_of) {
        limit_ = stations;
        failed_.clear();
        station_of.assign(static_cast<std::size_t>(inst_.n), 0);
        place_ = &station_of;
        long remaining_cap = 0;
        for (int i = 1; i <= stations; ++i) remaining_cap += inst_.cap(i);
        suffix_cap_.assign(static_cast<std::size_t>(stations) + 2, 0);
        for (int i = stations; i >= 1; --i)
            suffix_cap_[static_cast<std::size_t>(i)] = suffix_cap_[static_cast<std::size_t>(i + 1)] + inst_.cap(i);
        try {
            return dfs(0, 1, 0, inst_.total_time()) ? 1 : 0;
        } catch (const Budget&) {
            return -1;
        }
    }

    long nodes() const { return nodes_; }

private:
    struct Budget {};
    struct Key {
        std::uint64_t mask;
        int station;
        int load;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::size_t h = std::hash<std::uint64_t>()(k.mask);
            h ^= std::hash<long long>()((static_cast<long long>(k.station) << 32) ^ k.load) + 0x9e3779b97f4a7c15ULL +
                 (h << 6) + (h >> 2);
            return h;
        }
    };

    static std::uint64_t bit(int j) { return 1ULL << j; }

    bool dfs(std::uint64_t mask, int station, int load, long remaining) {
        if (++nodes_ > node_limit_) throw Budget{};
        if (mask == full_) return true;
        if (remaining > suffix_cap_[static_cast<std::size_t>(station)] - load) return false;
        Key key{mask, station, load};
        if (failed_.count(key)) return false;
        for (int j = 0; j < inst_.n; ++j) {
            if (mask & bit(j)) continue;
            if ((pred_mask_[static_cast<std::size_t>(j)] & mask) != pred_mask_[static_cast<std::size_t>(j)]) continue;
            const int t = inst_.task_time[static_cast<std::size_t>(j)];
            if (load + t > inst_.cap(station)) continue;
            const auto& s = inst_.eligible[static_cast<std::size_t>(j)];
            if (!std::binary_search(s.begin(), s.end(), station)) continue;
            (*place_)[static_cast<std::size_t>(j)] = station;
            if (dfs(mask | bit(j), station, load + t, remaining - t)) return true;
        }
        if (station < limit_ && dfs(mask, station + 1, 0, remaining)) return true;
        failed_.insert(key);
        return false;
    }

    const Instance& inst_;
    Precedence prec_;
    long node_limit_;
    long nodes_ = 0;
    int limit_ = 0;
    std::uint64_t full_ = 0;
    std::vector<std::uint64_t> pred_mask_;
    std::vector<long> suffix_cap_;
    std::vector<int>* place_ = nullptr;
    std::unordered_set<Key, KeyHash> failed_;
};

}  // namespace

OracleResult oracle_optimum(const Instance& inst, long node_limit) {
    if (inst.n > 64) throw std::invalid_argument("oracle_optimum supports at most 64 tasks");
    auto start = std::chrono::steady_clock::now();
    OracleResult result;
    if (!validate(inst).empty()) return result;
    StationSearch search(inst, node_limit);
    const int lb = std::max(1, station_lower_bound(inst));
    for (int k = lb; k <= inst.m; ++k) {
        std::vector<int> station_of;
        int r = search.feasible(k, station_of);
        if (r < 0) {
            result.status = OracleStatus::budget_exceeded;
            break;
        }
        if (r == 1) {
            result.status = OracleStatus::optimal;
            result.report.assignment.station_of = std::move(station_of);
            result.report.stations_used = result.report.assignment.highest_station();
            result.report.proven_optimal = true;
            break;
        }
    }
    result.report.node_count = search.nodes();
    result.report.elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return result;
}

}  // namespace salb
