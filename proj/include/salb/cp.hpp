#ifndef SALB_CP_HPP
#define SALB_CP_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "salb/instance.hpp"

namespace salb {

/// Candidate stations per task with an undo trail.
///
/// Covers real tasks 0..n-1 and, in a CP model, the artificial tasks
/// n..n+m-1. Emptying any domain marks the store failed; undoing past that
/// point clears the flag.
class DomainStore {
public:
    DomainStore() = default;
    DomainStore(int tasks, int stations);

    /// Real-task domains from the instance's eligible sets.
    static DomainStore from_instance(const Instance& inst);

    int tasks() const { return tasks_; }
    int stations() const { return stations_; }

    bool contains(int j, int i) const {
        return i >= 1 && i <= stations_ && bits_[slot(j, i)] != 0;
    }
    int size(int j) const { return size_[static_cast<std::size_t>(j)]; }
    bool fixed(int j) const { return size(j) == 1; }
    int min(int j) const;
    int max(int j) const;
    std::vector<int> values(int j) const;

    /// Adds a value without trailing; for building a store.
    void insert(int j, int i);
    /// Returns true when the value was present.
    bool remove(int j, int i);
    /// Removes every other value.
    void assign(int j, int i);

    bool failed() const { return failed_; }
    std::size_t checkpoint() const { return trail_.size(); }
    void undo(std::size_t mark);

    /// Sum of |dom(j)| over tasks 0..count-1.
    long total_size(int count) const;

    friend bool operator==(const DomainStore& a, const DomainStore& b) {
        return a.tasks_ == b.tasks_ && a.stations_ == b.stations_ && a.bits_ == b.bits_;
    }

private:
    std::size_t slot(int j, int i) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(stations_ + 1) + static_cast<std::size_t>(i);
    }

    int tasks_ = 0;
    int stations_ = 0;
    std::vector<std::uint8_t> bits_;
    std::vector<int> size_;
    std::vector<std::pair<int, int>> trail_;
    bool failed_ = false;
    std::size_t failed_at_ = 0;
};

/// Cumulative model with unit durations: stations are the time points,
/// task times the resource amounts, and one fixed artificial task per station
/// absorbs CT_max - CT_i so a single capacity serves every station.
struct CpModel {
    int n = 0;                 // real tasks
    int m = 0;                 // stations
    int n_bar = 0;             // n + m
    std::vector<int> res;      // per task, artificial ones included
    std::vector<int> dur;      // all 1
    int v_cap = 0;             // CT_max
    int horizon = 0;           // m + 1
    std::vector<Edge> edges;   // real tasks only
    DomainStore initial;

    int artificial(int station) const { return n + station - 1; }
};

/// Uses `domains` for the real tasks when given, else the eligible sets.
CpModel build_cp(const Instance& inst, const DomainStore* domains = nullptr);

enum class PruneRule { timetable, precedence };

/// Receives every removal made by propagation.
using PruneObserver = std::function<void(int task, int station, PruneRule rule)>;

/// "prune task=J station=I rule=..." with 1-based task ids.
std::string format_prune(int task, int station, PruneRule rule);

/// Time-tabling plus precedence bounds to a fixpoint. Returns false when a
/// domain empties or a station's fixed load exceeds the capacity.
bool propagate(const CpModel& model, DomainStore& store, const PruneObserver& observer = {});

/// True if the artificial-task encoding accepts the assignment: unit
/// durations, load per station including artificial tasks within v_cap.
bool cumulative_satisfied(const CpModel& model, const Assignment& a);

enum class LabelStatus { found, infeasible, budget_exceeded };

struct LabelBudget {
    long nodes = 10'000;                   // <= 0 means unlimited
    std::chrono::milliseconds time{200};   // <= 0 means unlimited
};

struct LabelResult {
    LabelStatus status = LabelStatus::infeasible;
    Assignment assignment;  // real tasks only
    long nodes = 0;
};

/// Depth-first labeling: smallest domain first (ties: larger task time, then
/// lower index), stations in increasing order, propagation after each choice.
LabelResult label(const CpModel& model, DomainStore store, const LabelBudget& budget = {});

}  // namespace salb

#endif  // SALB_CP_HPP
