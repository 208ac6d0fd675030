#ifndef SALB_INSTANCE_HPP
#define SALB_INSTANCE_HPP

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace salb {

// Tasks are 0-based internally and 1-based in every file format and message.
// Stations are 1-based everywhere.

struct Edge {
    int from;
    int to;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// A simple assembly line balancing instance. Immutable after parsing.
struct Instance {
    int n = 0;
    int m = 0;
    std::vector<int> task_time;            // t_j, size n
    std::vector<std::vector<int>> eligible;  // S_j, sorted station ids in 1..m
    std::vector<int> capacity;             // CT_i stored at [i - 1]
    std::vector<Edge> edges;               // immediate precedences

    int cap(int station) const { return capacity[static_cast<std::size_t>(station - 1)]; }
    int max_capacity() const;
    bool uniform_capacity() const;
    long total_time() const;

    /// T_i: tasks that may run on the station, ascending.
    std::vector<int> station_tasks(int station) const;

    /// Sum of |S_j|, the size measure reported for reductions.
    long domain_size() const;

    friend bool operator==(const Instance&, const Instance&) = default;
};

/// station_of[j] is a station id in 1..m for every task.
struct Assignment {
    std::vector<int> station_of;

    int highest_station() const;
    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct OptimumReport {
    int stations_used = 0;
    Assignment assignment;
    long node_count = 0;
    long cut_count = 0;
    std::chrono::milliseconds elapsed{0};
    bool proven_optimal = false;
};

/// Reachability and ordering derived from the precedence edges.
class Precedence {
public:
    explicit Precedence(const Instance& inst);

    bool acyclic() const { return acyclic_; }
    /// Kahn order with lowest index first among ready tasks; empty when cyclic.
    const std::vector<int>& topological_order() const { return topo_; }
    const std::vector<int>& successors(int j) const { return succ_[static_cast<std::size_t>(j)]; }
    const std::vector<int>& predecessors(int j) const { return pred_[static_cast<std::size_t>(j)]; }

    /// True when a precedes b through a non-empty path.
    bool precedes(int a, int b) const { return reach_[idx(a, b)] != 0; }
    bool comparable(int a, int b) const { return a == b || precedes(a, b) || precedes(b, a); }

private:
    std::size_t idx(int a, int b) const {
        return static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(b);
    }

    int n_;
    bool acyclic_ = true;
    std::vector<int> topo_;
    std::vector<std::vector<int>> succ_;
    std::vector<std::vector<int>> pred_;
    std::vector<std::uint8_t> reach_;
};

enum class InstanceFormat { native, precedence_list };

struct ParseOverrides {
    std::optional<int> cycle_time;
    std::optional<int> stations;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

/// Raised for instances that parse but violate a structural invariant.
class InstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Instance parse_instance(std::istream& in, InstanceFormat format, const ParseOverrides& overrides = {});
Instance parse_instance(std::string_view text, InstanceFormat format, const ParseOverrides& overrides = {});
std::string serialize_native(const Instance& inst);

/// Every violated invariant, in a stable order. Empty means valid.
std::vector<std::string> validate(const Instance& inst);

/// Violations of the assignment invariants against the instance.
std::vector<std::string> check_assignment(const Instance& inst, const Assignment& a);

/// Lowest-station-first placement in topological order under a uniform cycle time.
/// Station ids grow without bound; the result never exceeds the task count.
Assignment first_fit_assignment(const Instance& inst, int cycle_time);
int first_fit_upper_bound(const Instance& inst, int cycle_time);
int first_fit_upper_bound(const Instance& inst);

/// First fit honouring eligibility and per-station capacity within 1..m.
std::optional<Assignment> first_fit(const Instance& inst);

/// ceil(sum t_j / max CT_i).
int station_lower_bound(const Instance& inst);

/// Keeps stations 1..m only: eligible sets and capacities are truncated.
Instance restrict_stations(const Instance& inst, int m);

/// Replaces eligible sets; each domain must be a subset of the original.
Instance with_eligible(const Instance& inst, std::vector<std::vector<int>> eligible);

enum class OracleStatus { optimal, infeasible, budget_exceeded };

struct OracleResult {
    OracleStatus status = OracleStatus::infeasible;
    OptimumReport report;
};

/// Exhaustive minimum of the highest used station over stations 1..m.
/// The search places tasks station by station, so no symmetry assumption on
/// capacities or eligibility is needed.
OracleResult oracle_optimum(const Instance& inst, long node_limit = 50'000'000);

}  // namespace salb

#endif  // SALB_INSTANCE_HPP
