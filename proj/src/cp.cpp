#include "salb/cp.hpp"

#include <algorithm>
#include <stdexcept>

namespace salb {

DomainStore::DomainStore(int tasks, int stations)
    : tasks_(tasks),
      stations_(stations),
      bits_(static_cast<std::size_t>(tasks) * static_cast<std::size_t>(stations + 1), 0),
      size_(static_cast<std::size_t>(tasks), 0) {}

DomainStore DomainStore::from_instance(const Instance& inst) {
    DomainStore s(inst.n, inst.m);
    for (int j = 0; j < inst.n; ++j)
        for (int i : inst.eligible[static_cast<std::size_t>(j)]) s.insert(j, i);
    return s;
}

int DomainStore::min(int j) const {
    for (int i = 1; i <= stations_; ++i)
        if (bits_[slot(j, i)]) return i;
    return 0;
}

int DomainStore::max(int j) const {
    for (int i = stations_; i >= 1; --i)
        if (bits_[slot(j, i)]) return i;
    return 0;
}

std::vector<int> DomainStore::values(int j) const {
    std::vector<int> out;
    for (int i = 1; i <= stations_; ++i)
        if (bits_[slot(j, i)]) out.push_back(i);
    return out;
}

void DomainStore::insert(int j, int i) {
    if (i < 1 || i > stations_) throw std::out_of_range("station outside the store");
    auto& b = bits_[slot(j, i)];
    if (!b) {
        b = 1;
        ++size_[static_cast<std::size_t>(j)];
    }
}

bool DomainStore::remove(int j, int i) {
    if (!contains(j, i)) return false;
    bits_[slot(j, i)] = 0;
    trail_.emplace_back(j, i);
    if (--size_[static_cast<std::size_t>(j)] == 0 && !failed_) {
        failed_ = true;
        failed_at_ = trail_.size();
    }
    return true;
}

void DomainStore::assign(int j, int i) {
    for (int q = 1; q <= stations_; ++q)
        if (q != i) remove(j, q);
}

void DomainStore::undo(std::size_t mark) {
    while (trail_.size() > mark) {
        auto [j, i] = trail_.back();
        trail_.pop_back();
        bits_[slot(j, i)] = 1;
        ++size_[static_cast<std::size_t>(j)];
    }
    if (failed_ && trail_.size() < failed_at_) failed_ = false;
}

long DomainStore::total_size(int count) const {
    long total = 0;
    for (int j = 0; j < count; ++j) total += size_[static_cast<std::size_t>(j)];
    return total;
}

CpModel build_cp(const Instance& inst, const DomainStore* domains) {
    CpModel model;
    model.n = inst.n;
    model.m = inst.m;
    model.n_bar = inst.n + inst.m;
    model.v_cap = inst.max_capacity();
    model.horizon = inst.m + 1;
    model.edges = inst.edges;
    model.res = inst.task_time;
    for (int i = 1; i <= inst.m; ++i) model.res.push_back(model.v_cap - inst.cap(i));
    model.dur.assign(static_cast<std::size_t>(model.n_bar), 1);

    model.initial = DomainStore(model.n_bar, inst.m);
    for (int j = 0; j < inst.n; ++j) {
        if (domains) {
            for (int i = 1; i <= inst.m; ++i)
                if (domains->contains(j, i)) model.initial.insert(j, i);
        } else {
            for (int i : inst.eligible[static_cast<std::size_t>(j)]) model.initial.insert(j, i);
        }
    }
    for (int i = 1; i <= inst.m; ++i) model.initial.insert(model.artificial(i), i);
    // An empty real domain is a failed store from the start.
    for (int j = 0; j < inst.n; ++j)
        if (model.initial.size(j) == 0) {
            model.initial.insert(j, 1);
            model.initial.remove(j, 1);
        }
    return model;
}

std::string format_prune(int task, int station, PruneRule rule) {
    return "prune task=" + std::to_string(task + 1) + " station=" + std::to_string(station) +
           " rule=" + (rule == PruneRule::timetable ? "timetable" : "precedence");
}

bool propagate(const CpModel& model, DomainStore& store, const PruneObserver& observer) {
    if (store.failed()) return false;
    const int m = model.m;
    std::vector<long> load(static_cast<std::size_t>(m) + 1);
    auto prune = [&](int j, int i, PruneRule rule) {
        if (store.remove(j, i) && observer) observer(j, i, rule);
    };
    bool changed = true;
    while (changed) {
        changed = false;

        // Time-table: compulsory load of fixed tasks per station.
        std::fill(load.begin(), load.end(), 0);
        for (int j = 0; j < model.n_bar; ++j)
            if (store.fixed(j)) load[static_cast<std::size_t>(store.min(j))] += model.res[static_cast<std::size_t>(j)];
        for (int i = 1; i <= m; ++i)
            if (load[static_cast<std::size_t>(i)] > model.v_cap) return false;
        for (int j = 0; j < model.n_bar; ++j) {
            if (store.fixed(j)) continue;
            const long r = model.res[static_cast<std::size_t>(j)];
            for (int i = 1; i <= m; ++i) {
                if (!store.contains(j, i)) continue;
                if (load[static_cast<std::size_t>(i)] + r > model.v_cap) {
                    prune(j, i, PruneRule::timetable);
                    changed = true;
                }
            }
            if (store.failed()) return false;
        }

        // Precedence bounds: start_a <= start_b.
        for (const auto& e : model.edges) {
            const int lo = store.min(e.from);
            for (int i = 1; i < lo; ++i)
                if (store.contains(e.to, i)) {
                    prune(e.to, i, PruneRule::precedence);
                    changed = true;
                }
            const int hi = store.max(e.to);
            for (int i = hi + 1; i <= m; ++i)
                if (store.contains(e.from, i)) {
                    prune(e.from, i, PruneRule::precedence);
                    changed = true;
                }
            if (store.failed()) return false;
        }
    }
    return true;
}

bool cumulative_satisfied(const CpModel& model, const Assignment& a) {
    if (static_cast<int>(a.station_of.size()) != model.n) return false;
    std::vector<long> usage(static_cast<std::size_t>(model.horizon) + 1, 0);
    for (int j = 0; j < model.n_bar; ++j) {
        const int start = j < model.n ? a.station_of[static_cast<std::size_t>(j)] : j - model.n + 1;
        if (start < 1 || start + model.dur[static_cast<std::size_t>(j)] > model.horizon) return false;
        for (int t = start; t < start + model.dur[static_cast<std::size_t>(j)]; ++t)
            usage[static_cast<std::size_t>(t)] += model.res[static_cast<std::size_t>(j)];
    }
    for (long u : usage)
        if (u > model.v_cap) return false;
    for (const auto& e : model.edges)
        if (a.station_of[static_cast<std::size_t>(e.from)] > a.station_of[static_cast<std::size_t>(e.to)]) return false;
    return true;
}

namespace {

class Labeler {
public:
    Labeler(const CpModel& model, const LabelBudget& budget)
        : model_(model), budget_(budget), start_(std::chrono::steady_clock::now()) {}

    LabelStatus run(DomainStore& store) {
        if (!propagate(model_, store)) return LabelStatus::infeasible;
        return dfs(store);
    }

    long nodes() const { return nodes_; }

private:
    bool out_of_budget() {
        if (budget_.nodes > 0 && nodes_ >= budget_.nodes) return true;
        if (budget_.time.count() > 0 && (nodes_ & 63) == 0 &&
            std::chrono::steady_clock::now() - start_ > budget_.time)
            timed_out_ = true;
        return timed_out_;
    }

    int select(const DomainStore& store) const {
        int best = -1;
        for (int j = 0; j < model_.n; ++j) {
            if (store.fixed(j)) continue;
            if (best < 0) {
                best = j;
                continue;
            }
            const int sj = store.size(j), sb = store.size(best);
            if (sj < sb || (sj == sb && model_.res[static_cast<std::size_t>(j)] > model_.res[static_cast<std::size_t>(best)]))
                best = j;
        }
        return best;
    }

    LabelStatus dfs(DomainStore& store) {
        const int j = select(store);
        if (j < 0) return LabelStatus::found;
        bool exhausted = true;
        for (int i : store.values(j)) {
            if (out_of_budget()) return LabelStatus::budget_exceeded;
            ++nodes_;
            const auto mark = store.checkpoint();
            store.assign(j, i);
            if (propagate(model_, store)) {
                auto r = dfs(store);
                if (r == LabelStatus::found) return r;
                if (r == LabelStatus::budget_exceeded) exhausted = false;
            }
            store.undo(mark);
            if (!exhausted) return LabelStatus::budget_exceeded;
        }
        return LabelStatus::infeasible;
    }

    const CpModel& model_;
    LabelBudget budget_;
    std::chrono::steady_clock::time_point start_;
    long nodes_ = 0;
    bool timed_out_ = false;
};

}  // namespace

LabelResult label(const CpModel& model, DomainStore store, const LabelBudget& budget) {
    LabelResult result;
    Labeler labeler(model, budget);
    result.status = labeler.run(store);
    result.nodes = labeler.nodes();
    if (result.status == LabelStatus::found) {
        result.assignment.station_of.resize(static_cast<std::size_t>(model.n));
        for (int j = 0; j < model.n; ++j) result.assignment.station_of[static_cast<std::size_t>(j)] = store.min(j);
    }
    return result;
}

}  // namespace salb
