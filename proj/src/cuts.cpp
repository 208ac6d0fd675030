#include "salb/cuts.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace salb {

namespace {

constexpr double kPositive = 1e-9;

long time_of(const Instance& inst, int j) { return inst.task_time[static_cast<std::size_t>(j)]; }

double xv(const Point& x, int i, int j) {
    if (i < 0 || static_cast<std::size_t>(i) >= x.size()) return 0.0;
    const auto& row = x[static_cast<std::size_t>(i)];
    return static_cast<std::size_t>(j) < row.size() ? row[static_cast<std::size_t>(j)] : 0.0;
}

long sum_times(const Instance& inst, const std::vector<int>& set) {
    long s = 0;
    for (int j : set) s += time_of(inst, j);
    return s;
}

bool eligible(const Instance& inst, int i, int j) {
    const auto& s = inst.eligible[static_cast<std::size_t>(j)];
    return std::binary_search(s.begin(), s.end(), i);
}

bool subset_of_station(const Instance& inst, int i, const std::vector<int>& set) {
    return std::all_of(set.begin(), set.end(), [&](int j) { return eligible(inst, i, j); });
}

bool contains(const std::vector<int>& set, int j) { return std::find(set.begin(), set.end(), j) != set.end(); }

/// Items ordered by decreasing x, ties by lower index.
std::vector<int> by_decreasing_x(std::vector<int> items, const std::function<double(int)>& value) {
    std::stable_sort(items.begin(), items.end(), [&](int a, int b) { return value(a) > value(b) + 1e-12; });
    return items;
}

/// Drops items while the remaining total still reaches the threshold,
/// lowest x first.
void minimalize(std::vector<int>& set, const Instance& inst, long threshold, const std::function<double(int)>& value) {
    long total = sum_times(inst, set);
    bool changed = true;
    while (changed) {
        changed = false;
        int best = -1;
        for (int j : set) {
            if (total - time_of(inst, j) < threshold) continue;
            if (best < 0 || value(j) < value(best) - 1e-12) best = j;
        }
        if (best >= 0) {
            set.erase(std::find(set.begin(), set.end(), best));
            total -= time_of(inst, best);
            changed = true;
        }
    }
    std::sort(set.begin(), set.end());
}

Cut make_cut(CutKind kind, long rhs) {
    Cut c;
    c.kind = kind;
    c.origin = kind;
    c.rhs = rhs;
    return c;
}

/// Extreme-case test for the heterogeneous two-cover condition: every swap of
/// q items of C for q items of D leaves a cover of capacity cap. The worst
/// swap removes the q largest of C and adds the q smallest of D.
bool hetero_condition(const Instance& inst, const std::vector<int>& C, const std::vector<int>& D, long cap) {
    std::vector<long> tc, td;
    for (int j : C) tc.push_back(time_of(inst, j));
    for (int j : D) td.push_back(time_of(inst, j));
    std::sort(tc.begin(), tc.end());  // ascending
    std::sort(td.begin(), td.end());
    long base = std::accumulate(tc.begin(), tc.end(), 0L);
    const std::size_t qmax = std::min(tc.size(), td.size());
    long removed = 0, added = 0;
    for (std::size_t q = 0; q <= qmax; ++q) {
        if (q > 0) {
            removed += tc[tc.size() - q];
            added += td[q - 1];
        }
        if (base - removed + added <= cap) return false;
    }
    return true;
}

}  // namespace

const char* cut_kind_name(CutKind k) {
    switch (k) {
        case CutKind::cover: return "cover";
        case CutKind::one_d_config: return "one_d_config";
        case CutKind::mic: return "mic";
        case CutKind::four_cycle: return "four_cycle";
        case CutKind::extended_cover: return "extended_cover";
        case CutKind::hetero_two_cover: return "hetero_two_cover";
        case CutKind::lifted: return "lifted";
    }
    return "?";
}

double Cut::lhs(const Point& x) const {
    double s = 0.0;
    for (const auto& t : terms) s += static_cast<double>(t.coef) * xv(x, t.station, t.task);
    return s;
}

long Cut::coef(int station, int task) const {
    for (const auto& t : terms)
        if (t.station == station && t.task == task) return t.coef;
    return 0;
}

bool Cut::satisfied_by(const Assignment& a) const {
    long s = 0;
    for (const auto& t : terms)
        if (a.station_of[static_cast<std::size_t>(t.task)] == t.station) s += t.coef;
    return s <= rhs;
}

std::string Cut::to_string() const {
    std::ostringstream os;
    os << cut_kind_name(kind);
    if (kind == CutKind::lifted) os << "(" << cut_kind_name(origin) << ")";
    os << ":";
    for (const auto& t : terms) os << " " << (t.coef >= 0 ? "+" : "") << t.coef << "x[" << t.station << "," << t.task + 1 << "]";
    os << " <= " << rhs;
    return os.str();
}

void normalize(Cut& cut) {
    std::sort(cut.terms.begin(), cut.terms.end(), [](const CutTerm& a, const CutTerm& b) {
        return std::tie(a.station, a.task) < std::tie(b.station, b.task);
    });
    std::vector<CutTerm> merged;
    for (const auto& t : cut.terms) {
        if (!merged.empty() && merged.back().station == t.station && merged.back().task == t.task)
            merged.back().coef += t.coef;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const CutTerm& t) { return t.coef == 0; }),
                 merged.end());
    cut.terms = std::move(merged);
}

bool verify_certificate(const Instance& inst, const Precedence& prec, const Cut& cut) {
    const auto& c = cut.cert;
    switch (cut.origin) {
        case CutKind::cover:
            return !c.C.empty() && subset_of_station(inst, c.k, c.C) && sum_times(inst, c.C) > inst.cap(c.k);
        case CutKind::one_d_config: {
            const int h = static_cast<int>(c.H.size());
            if (c.d < 2 || c.d > h || contains(c.H, c.z) || sum_times(inst, c.H) > inst.cap(c.k)) return false;
            std::vector<long> t;
            for (int j : c.H) t.push_back(time_of(inst, j));
            std::sort(t.begin(), t.end());
            const long tz = time_of(inst, c.z);
            const long smallest_d = std::accumulate(t.begin(), t.begin() + c.d, 0L);
            const long largest_d1 = std::accumulate(t.end() - (c.d - 1), t.end(), 0L);
            return smallest_d + tz > inst.cap(c.k) && largest_d1 + tz <= inst.cap(c.k);
        }
        case CutKind::mic: {
            if (!subset_of_station(inst, c.k, c.C) || sum_times(inst, c.C) <= inst.cap(c.k)) return false;
            for (int a : c.C)
                for (int b : c.C)
                    if (a != b && prec.comparable(a, b)) return false;
            for (int a : c.C)
                if (sum_times(inst, c.C) - time_of(inst, a) > inst.cap(c.k)) return false;
            std::vector<int> closure;
            for (int j = 0; j < inst.n; ++j) {
                if (contains(c.C, j)) continue;
                for (int j1 : c.C)
                    if (prec.precedes(j, j1)) {
                        closure.push_back(j);
                        break;
                    }
            }
            return closure == c.closure;
        }
        case CutKind::four_cycle: {
            if (time_of(inst, c.u) > time_of(inst, c.v) || c.k == c.l) return false;
            if (!contains(c.Ck, c.u) || !contains(c.Ck, c.v)) return false;              // a)
            if (!contains(c.Cl, c.u) || contains(c.Cl, c.v)) return false;               // b)
            for (int j : c.Ck)                                                            // c)
                if (j != c.u && contains(c.Cl, j)) return false;
            return subset_of_station(inst, c.k, c.Ck) && subset_of_station(inst, c.l, c.Cl) &&
                   sum_times(inst, c.Ck) > inst.cap(c.k) && sum_times(inst, c.Cl) > inst.cap(c.l);
        }
        case CutKind::extended_cover: {
            if (c.C.empty() || c.k == c.l || sum_times(inst, c.C) <= inst.cap(c.k)) return false;
            long tmin = std::numeric_limits<long>::max();
            for (int j : c.C) {
                if (contains(c.D, j)) return false;
                tmin = std::min(tmin, time_of(inst, j));
            }
            return sum_times(inst, c.D) + tmin > inst.cap(c.l);
        }
        case CutKind::hetero_two_cover: {
            if (c.C.size() < 2 || c.k == c.l || !subset_of_station(inst, c.k, c.C)) return false;
            if (sum_times(inst, c.C) <= inst.cap(c.k)) return false;
            for (int j : c.D)
                if (contains(c.C, j) || !eligible(inst, c.l, j)) return false;
            return hetero_condition(inst, c.C, c.D, inst.cap(c.l));
        }
        case CutKind::lifted:
            return false;
    }
    return false;
}

std::optional<std::vector<int>> min_cover(const std::vector<int>& items, const std::vector<int>& times,
                                          const std::vector<double>& xval, long threshold) {
    if (threshold <= 0) return std::vector<int>{};
    const std::size_t W = static_cast<std::size_t>(threshold);
    const double inf = std::numeric_limits<double>::infinity();
    // dp[q][w]: least cost using the first q items with total min(sum, W) = w.
    std::vector<std::vector<double>> dp(items.size() + 1, std::vector<double>(W + 1, inf));
    dp[0][0] = 0.0;
    for (std::size_t q = 0; q < items.size(); ++q) {
        dp[q + 1] = dp[q];
        const long t = times[q];
        if (t <= 0) continue;
        const double cost = 1.0 - xval[q];
        for (std::size_t w = 0; w < W; ++w) {
            if (dp[q][w] == inf) continue;
            const std::size_t to = std::min(W, w + static_cast<std::size_t>(t));
            if (dp[q][w] + cost < dp[q + 1][to] - 1e-12) dp[q + 1][to] = dp[q][w] + cost;
        }
    }
    if (dp[items.size()][W] == inf) return std::nullopt;
    std::vector<int> chosen;
    std::size_t w = W;
    for (std::size_t q = items.size(); q > 0; --q) {
        if (dp[q][w] == dp[q - 1][w]) continue;  // item not needed
        // Find the source state that item q-1 extended.
        const long t = times[q - 1];
        const double cost = 1.0 - xval[q - 1];
        bool found = false;
        for (std::size_t src = 0; src < W && !found; ++src) {
            if (std::min(W, src + static_cast<std::size_t>(t)) != w) continue;
            if (dp[q - 1][src] != inf && std::abs(dp[q - 1][src] + cost - dp[q][w]) <= 1e-12) {
                chosen.push_back(items[q - 1]);
                w = src;
                found = true;
            }
        }
        if (!found) return std::nullopt;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<Cut> separate_cover(const Instance& inst, int k, const Point& x, double tol) {
    std::vector<Cut> out;
    const auto items = inst.station_tasks(k);
    if (sum_times(inst, items) <= inst.cap(k)) return out;
    std::vector<int> times;
    std::vector<double> vals;
    for (int j : items) {
        times.push_back(static_cast<int>(time_of(inst, j)));
        vals.push_back(std::clamp(xv(x, k, j), 0.0, 1.0));
    }
    auto C = min_cover(items, times, vals, inst.cap(k) + 1L);
    if (!C) return out;
    auto value = [&](int j) { return xv(x, k, j); };
    minimalize(*C, inst, inst.cap(k) + 1L, value);
    Cut cut = make_cut(CutKind::cover, static_cast<long>(C->size()) - 1);
    for (int j : *C) cut.terms.push_back({k, j, 1});
    cut.cert.C = *C;
    cut.cert.k = k;
    normalize(cut);
    if (cut.violation(x) > tol) out.push_back(std::move(cut));
    return out;
}

std::vector<Cut> separate_one_d_config(const Instance& inst, int k, const Point& x, double tol) {
    std::vector<Cut> out;
    const long cap = inst.cap(k);
    const auto items = inst.station_tasks(k);
    auto value = [&](int j) { return xv(x, k, j); };
    for (int z : items) {
        const double xz = value(z);
        if (xz <= kPositive || xz >= 1.0 - kPositive) continue;
        std::vector<int> cand;
        for (int j : items)
            if (j != z && time_of(inst, j) + time_of(inst, z) <= cap) cand.push_back(j);
        std::vector<int> H;
        long load = 0;
        for (int j : by_decreasing_x(cand, value)) {
            if (load + time_of(inst, j) > cap) continue;
            H.push_back(j);
            load += time_of(inst, j);
        }
        if (H.size() < 2) continue;
        std::sort(H.begin(), H.end());
        std::vector<long> t;
        for (int j : H) t.push_back(time_of(inst, j));
        std::sort(t.begin(), t.end());
        const long tz = time_of(inst, z);
        const int h = static_cast<int>(H.size());
        int d = 0;
        for (int dd = 2; dd <= h && d == 0; ++dd) {
            const long smallest = std::accumulate(t.begin(), t.begin() + dd, 0L);
            const long largest = std::accumulate(t.end() - (dd - 1), t.end(), 0L);
            if (smallest + tz > cap && largest + tz <= cap) d = dd;
        }
        if (d == 0) continue;
        Cut cut = make_cut(CutKind::one_d_config, h);
        for (int j : H) cut.terms.push_back({k, j, 1});
        cut.terms.push_back({k, z, h - d + 1});
        cut.cert.H = H;
        cut.cert.z = z;
        cut.cert.d = d;
        cut.cert.k = k;
        normalize(cut);
        if (cut.violation(x) > tol) out.push_back(std::move(cut));
    }
    return out;
}

std::vector<Cut> separate_mic(const Instance& inst, const Precedence& prec, int k, const Point& x, double tol) {
    std::vector<Cut> out;
    const long cap = inst.cap(k);
    auto value = [&](int j) { return xv(x, k, j); };
    std::vector<int> cand;
    for (int j : inst.station_tasks(k))
        if (value(j) > kPositive) cand.push_back(j);
    cand = by_decreasing_x(cand, value);
    std::set<std::vector<int>> seen;
    const std::size_t seeds = std::min<std::size_t>(5, cand.size());
    for (std::size_t s = 0; s < seeds; ++s) {
        std::vector<int> C{cand[s]};
        long load = time_of(inst, cand[s]);
        for (int j : cand) {
            if (load > cap) break;
            if (contains(C, j)) continue;
            bool ok = true;
            for (int c : C)
                if (prec.comparable(c, j)) ok = false;
            if (!ok) continue;
            C.push_back(j);
            load += time_of(inst, j);
        }
        if (load <= cap) continue;
        minimalize(C, inst, cap + 1, value);
        if (!seen.insert(C).second) continue;

        Cut cut = make_cut(CutKind::mic, static_cast<long>(C.size()) - 1);
        for (int j : C) cut.terms.push_back({k, j, 1});
        std::vector<int> closure;
        for (int j = 0; j < inst.n; ++j) {
            if (contains(C, j)) continue;
            for (int j1 : C)
                if (prec.precedes(j, j1)) {
                    closure.push_back(j);
                    break;
                }
        }
        for (int j : closure)
            for (int i : inst.eligible[static_cast<std::size_t>(j)])
                if (i < k) cut.terms.push_back({i, j, -1});
        cut.cert.C = C;
        cut.cert.closure = closure;
        cut.cert.k = k;
        normalize(cut);
        if (cut.violation(x) > tol) out.push_back(std::move(cut));
    }
    return out;
}

std::vector<Cut> separate_four_cycle(const Instance& inst, const Point& x, double tol) {
    std::vector<Cut> out;
    for (int k = 1; k <= inst.m; ++k)
        for (int l = 1; l <= inst.m; ++l) {
            if (k == l) continue;
            const auto Tk = inst.station_tasks(k);
            const auto Tl = inst.station_tasks(l);
            for (int u : Tk)
                for (int v : Tk) {
                    if (u == v || !eligible(inst, l, u) || !eligible(inst, l, v)) continue;
                    // t_u <= t_v; equal times keep the lower index as u.
                    if (time_of(inst, u) > time_of(inst, v) || (time_of(inst, u) == time_of(inst, v) && u > v)) continue;
                    if (xv(x, k, u) <= kPositive || xv(x, l, u) <= kPositive || xv(x, k, v) <= kPositive ||
                        xv(x, l, v) <= kPositive)
                        continue;

                    std::vector<int> items;
                    std::vector<int> times;
                    std::vector<double> vals;
                    for (int j : Tk)
                        if (j != u && j != v) {
                            items.push_back(j);
                            times.push_back(static_cast<int>(time_of(inst, j)));
                            vals.push_back(std::clamp(xv(x, k, j), 0.0, 1.0));
                        }
                    const long thr_k = inst.cap(k) - time_of(inst, u) - time_of(inst, v) + 1;
                    auto ck = min_cover(items, times, vals, thr_k);
                    if (!ck) continue;
                    minimalize(*ck, inst, thr_k, [&](int j) { return xv(x, k, j); });
                    std::vector<int> Ck = *ck;
                    Ck.push_back(u);
                    Ck.push_back(v);
                    std::sort(Ck.begin(), Ck.end());

                    items.clear();
                    times.clear();
                    vals.clear();
                    for (int j : Tl)
                        if (!contains(Ck, j)) {
                            items.push_back(j);
                            times.push_back(static_cast<int>(time_of(inst, j)));
                            vals.push_back(std::clamp(xv(x, l, j), 0.0, 1.0));
                        }
                    const long thr_l = inst.cap(l) - time_of(inst, u) + 1;
                    auto cl = min_cover(items, times, vals, thr_l);
                    if (!cl) continue;
                    minimalize(*cl, inst, thr_l, [&](int j) { return xv(x, l, j); });
                    std::vector<int> Cl = *cl;
                    Cl.push_back(u);
                    std::sort(Cl.begin(), Cl.end());

                    Cut cut = make_cut(CutKind::four_cycle, static_cast<long>(Ck.size() + Cl.size()) - 2);
                    for (int j : Ck) cut.terms.push_back({k, j, 1});
                    for (int j : Cl) cut.terms.push_back({l, j, 1});
                    cut.terms.push_back({l, v, 1});
                    cut.cert.Ck = Ck;
                    cut.cert.Cl = Cl;
                    cut.cert.u = u;
                    cut.cert.v = v;
                    cut.cert.k = k;
                    cut.cert.l = l;
                    normalize(cut);
                    if (cut.violation(x) > tol) out.push_back(std::move(cut));
                }
        }
    return out;
}

namespace {

/// Station-k covers used as seeds for the two-knapsack families: the exact
/// min-cover even when it is not violated.
std::optional<std::vector<int>> seed_cover(const Instance& inst, int k, const Point& x) {
    const auto items = inst.station_tasks(k);
    if (sum_times(inst, items) <= inst.cap(k)) return std::nullopt;
    std::vector<int> times;
    std::vector<double> vals;
    for (int j : items) {
        times.push_back(static_cast<int>(time_of(inst, j)));
        vals.push_back(std::clamp(xv(x, k, j), 0.0, 1.0));
    }
    auto C = min_cover(items, times, vals, inst.cap(k) + 1L);
    if (C) minimalize(*C, inst, inst.cap(k) + 1L, [&](int j) { return xv(x, k, j); });
    return C;
}

}  // namespace

// Stand-in heuristic for the extended cover family: grow D greedily at the
// second station until every D + {i}, i in C, overflows it.
std::vector<Cut> separate_extended_cover(const Instance& inst, const Point& x, double tol) {
    std::vector<Cut> out;
    if (inst.m < 2) return out;
    for (int k = 1; k <= inst.m; ++k) {
        auto C = seed_cover(inst, k, x);
        if (!C || C->empty()) continue;
        long tmin = std::numeric_limits<long>::max();
        for (int j : *C) tmin = std::min(tmin, time_of(inst, j));
        for (int l = 1; l <= inst.m; ++l) {
            if (l == k) continue;
            std::vector<int> cand;
            for (int j : inst.station_tasks(l))
                if (!contains(*C, j)) cand.push_back(j);
            std::vector<int> D;
            long load = 0;
            for (int j : by_decreasing_x(cand, [&](int j) { return xv(x, l, j); })) {
                if (load + tmin > inst.cap(l)) break;
                D.push_back(j);
                load += time_of(inst, j);
            }
            if (load + tmin <= inst.cap(l)) continue;
            std::sort(D.begin(), D.end());
            Cut cut = make_cut(CutKind::extended_cover, static_cast<long>(C->size() + D.size()) - 1);
            for (int j : *C) {
                cut.terms.push_back({k, j, 1});
                if (eligible(inst, l, j)) cut.terms.push_back({l, j, 1});
            }
            for (int j : D) cut.terms.push_back({l, j, 1});
            cut.cert.C = *C;
            cut.cert.D = D;
            cut.cert.k = k;
            cut.cert.l = l;
            normalize(cut);
            if (cut.violation(x) > tol) out.push_back(std::move(cut));
        }
    }
    return out;
}

// Stand-in heuristic for the heterogeneous two-cover family: C is the exact
// min-cover of k; D grows greedily at l while the swap condition holds.
std::vector<Cut> separate_hetero_two_cover(const Instance& inst, const Point& x, double tol) {
    std::vector<Cut> out;
    if (inst.m < 2) return out;
    for (int k = 1; k <= inst.m; ++k) {
        auto C = seed_cover(inst, k, x);
        if (!C || C->size() < 2) continue;
        for (int l = 1; l <= inst.m; ++l) {
            if (l == k || !hetero_condition(inst, *C, {}, inst.cap(l))) continue;
            std::vector<int> cand;
            for (int j : inst.station_tasks(l))
                if (!contains(*C, j) && xv(x, l, j) > kPositive) cand.push_back(j);
            std::vector<int> D;
            for (int j : by_decreasing_x(cand, [&](int j) { return xv(x, l, j); })) {
                D.push_back(j);
                if (!hetero_condition(inst, *C, D, inst.cap(l))) D.pop_back();
            }
            std::sort(D.begin(), D.end());
            const long c = static_cast<long>(C->size());
            Cut cut = make_cut(CutKind::hetero_two_cover, c * (c - 1));
            for (int j : *C) {
                cut.terms.push_back({k, j, 1});
                if (eligible(inst, l, j)) cut.terms.push_back({l, j, c - 1});
            }
            for (int j : D) cut.terms.push_back({l, j, c - 1});
            cut.cert.C = *C;
            cut.cert.D = D;
            cut.cert.k = k;
            cut.cert.l = l;
            normalize(cut);
            if (cut.violation(x) > tol) out.push_back(std::move(cut));
        }
    }
    return out;
}

std::vector<int> prefix_capacity(const std::vector<int>& times_in_order, long capacity) {
    std::vector<int> v;
    std::vector<int> sorted;
    for (int t : times_in_order) {
        sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), t), t);
        long load = 0;
        int count = 0;
        for (int s : sorted) {
            if (load + s > capacity) break;
            load += s;
            ++count;
        }
        v.push_back(count);
    }
    return v;
}

namespace {

/// Successive shortest paths with Bellman-Ford; costs may be negative.
class MinCostFlow {
public:
    explicit MinCostFlow(int nodes) : adj_(static_cast<std::size_t>(nodes)) {}

    void add_arc(int from, int to, long cap, long cost) {
        adj_[static_cast<std::size_t>(from)].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({to, cap, cost});
        adj_[static_cast<std::size_t>(to)].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({from, 0, -cost});
    }

    /// Augments along cheapest paths while they have negative cost; returns
    /// the total cost.
    long run(int s, int t) {
        const long inf = std::numeric_limits<long>::max() / 4;
        const std::size_t n = adj_.size();
        long total = 0;
        for (;;) {
            std::vector<long> dist(n, inf);
            std::vector<int> via(n, -1);
            dist[static_cast<std::size_t>(s)] = 0;
            for (std::size_t round = 0; round < n; ++round) {
                bool changed = false;
                for (std::size_t a = 0; a < n; ++a) {
                    if (dist[a] == inf) continue;
                    for (int e : adj_[a]) {
                        const auto& arc = arcs_[static_cast<std::size_t>(e)];
                        if (arc.cap <= 0) continue;
                        if (dist[a] + arc.cost < dist[static_cast<std::size_t>(arc.to)]) {
                            dist[static_cast<std::size_t>(arc.to)] = dist[a] + arc.cost;
                            via[static_cast<std::size_t>(arc.to)] = e;
                            changed = true;
                        }
                    }
                }
                if (!changed) break;
            }
            if (dist[static_cast<std::size_t>(t)] >= 0) return total;
            long push = inf;
            for (int v = t; v != s;) {
                const int e = via[static_cast<std::size_t>(v)];
                push = std::min(push, arcs_[static_cast<std::size_t>(e)].cap);
                v = arcs_[static_cast<std::size_t>(e ^ 1)].to;
            }
            for (int v = t; v != s;) {
                const int e = via[static_cast<std::size_t>(v)];
                arcs_[static_cast<std::size_t>(e)].cap -= push;
                arcs_[static_cast<std::size_t>(e ^ 1)].cap += push;
                v = arcs_[static_cast<std::size_t>(e ^ 1)].to;
            }
            total += push * dist[static_cast<std::size_t>(t)];
        }
    }

private:
    struct Arc {
        int to;
        long cap;
        long cost;
    };
    std::vector<std::vector<int>> adj_;
    std::vector<Arc> arcs_;
};

int position_in(const std::vector<int>& perm, int task) {
    auto it = std::find(perm.begin(), perm.end(), task);
    return it == perm.end() ? -1 : static_cast<int>(it - perm.begin());
}

}  // namespace

long lift_gamma(const LiftContext& ctx) {
    // Nodes: source, sink, one per task, one per (station, position).
    const int source = 0, sink = 1;
    std::vector<int> task_node(static_cast<std::size_t>(ctx.n), -1);
    std::vector<int> pos_base(static_cast<std::size_t>(ctx.m) + 1, 0);
    int next = 2;
    for (const auto& t : ctx.a_star)
        if (t.coef > 0 && task_node[static_cast<std::size_t>(t.task)] < 0) task_node[static_cast<std::size_t>(t.task)] = next++;
    for (int i = 1; i <= ctx.m; ++i) {
        pos_base[static_cast<std::size_t>(i)] = next;
        next += static_cast<int>(ctx.perm[static_cast<std::size_t>(i)].size());
    }
    MinCostFlow flow(next);
    for (int j = 0; j < ctx.n; ++j)
        if (task_node[static_cast<std::size_t>(j)] >= 0) flow.add_arc(source, task_node[static_cast<std::size_t>(j)], 1, 0);
    for (const auto& t : ctx.a_star) {
        if (t.coef <= 0) continue;
        const int p = position_in(ctx.perm[static_cast<std::size_t>(t.station)], t.task);
        if (p < 0) continue;
        flow.add_arc(task_node[static_cast<std::size_t>(t.task)], pos_base[static_cast<std::size_t>(t.station)] + p, 1, -t.coef);
    }
    // Chain: position s feeds s+1 through an arc bounded by v_{i,s}.
    for (int i = 1; i <= ctx.m; ++i) {
        const auto& caps = ctx.caps[static_cast<std::size_t>(i)];
        const int len = static_cast<int>(caps.size());
        for (int s = 0; s < len; ++s) {
            const int from = pos_base[static_cast<std::size_t>(i)] + s;
            const int to = s + 1 < len ? from + 1 : sink;
            flow.add_arc(from, to, caps[static_cast<std::size_t>(s)], 0);
        }
    }
    return -flow.run(source, sink);
}

long lift_gamma_exhaustive(const LiftContext& ctx) {
    // Group candidate stations per task.
    std::vector<int> tasks;
    std::vector<std::vector<std::pair<int, long>>> options(static_cast<std::size_t>(ctx.n));
    for (const auto& t : ctx.a_star) {
        if (options[static_cast<std::size_t>(t.task)].empty()) tasks.push_back(t.task);
        options[static_cast<std::size_t>(t.task)].push_back({t.station, t.coef});
    }
    std::vector<std::vector<int>> count(static_cast<std::size_t>(ctx.m) + 1);
    for (int i = 1; i <= ctx.m; ++i) count[static_cast<std::size_t>(i)].assign(ctx.caps[static_cast<std::size_t>(i)].size(), 0);
    long best = 0;
    std::function<void(std::size_t, long)> rec = [&](std::size_t q, long value) {
        if (q == tasks.size()) {
            best = std::max(best, value);
            return;
        }
        rec(q + 1, value);
        const int j = tasks[q];
        for (auto [i, a] : options[static_cast<std::size_t>(j)]) {
            const int p = position_in(ctx.perm[static_cast<std::size_t>(i)], j);
            if (p < 0) continue;
            auto& cnt = count[static_cast<std::size_t>(i)];
            const auto& caps = ctx.caps[static_cast<std::size_t>(i)];
            bool ok = true;
            for (std::size_t s = static_cast<std::size_t>(p); s < cnt.size(); ++s)
                if (cnt[s] + 1 > caps[s]) ok = false;
            if (!ok) continue;
            for (std::size_t s = static_cast<std::size_t>(p); s < cnt.size(); ++s) ++cnt[s];
            rec(q + 1, value + a);
            for (std::size_t s = static_cast<std::size_t>(p); s < cnt.size(); ++s) --cnt[s];
        }
    };
    rec(0, 0);
    return best;
}

LiftContext make_lift_context(const Instance& inst, const Cut& cut, int i0, int j0) {
    LiftContext ctx;
    ctx.n = inst.n;
    ctx.m = inst.m;
    auto edge = [&](int a, int b) {
        return std::any_of(inst.edges.begin(), inst.edges.end(), [&](const Edge& e) { return e.from == a && e.to == b; });
    };
    for (const auto& t : cut.terms) {
        if (t.task == j0) continue;
        if (i0 < t.station && edge(t.task, j0)) continue;
        if (i0 > t.station && edge(j0, t.task)) continue;
        ctx.a_star.push_back(t);
    }
    ctx.perm.resize(static_cast<std::size_t>(inst.m) + 1);
    ctx.caps.resize(static_cast<std::size_t>(inst.m) + 1);
    for (int i = 1; i <= inst.m; ++i) {
        std::vector<int> in_cut, rest;
        for (int j : inst.station_tasks(i)) {
            if (i == i0 && j == j0) continue;
            (cut.coef(i, j) != 0 ? in_cut : rest).push_back(j);
        }
        std::stable_sort(in_cut.begin(), in_cut.end(),
                         [&](int a, int b) { return std::abs(cut.coef(i, a)) > std::abs(cut.coef(i, b)); });
        std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) { return time_of(inst, a) > time_of(inst, b); });
        auto& perm = ctx.perm[static_cast<std::size_t>(i)];
        perm = in_cut;
        perm.insert(perm.end(), rest.begin(), rest.end());
        std::vector<int> times;
        for (int j : perm) times.push_back(static_cast<int>(time_of(inst, j)));
        const long cap = inst.cap(i) - (i == i0 ? time_of(inst, j0) : 0);
        ctx.caps[static_cast<std::size_t>(i)] = prefix_capacity(times, cap);
    }
    return ctx;
}

Cut lift_inequality(const Cut& cut, int i0, int j0, const Instance& inst) {
    if (cut.coef(i0, j0) != 0 || !eligible(inst, i0, j0)) return cut;
    const long gamma = lift_gamma(make_lift_context(inst, cut, i0, j0));
    const long alpha = std::max(0L, cut.rhs - gamma);
    if (alpha == 0) return cut;
    Cut lifted = cut;
    lifted.kind = CutKind::lifted;
    lifted.terms.push_back({i0, j0, alpha});
    normalize(lifted);
    return lifted;
}

Cut lift_cut(const Cut& cut, const std::vector<std::pair<int, int>>& targets, const Instance& inst) {
    Cut out = cut;
    for (auto [i, j] : targets) out = lift_inequality(out, i, j, inst);
    return out;
}

const char* cut_mode_name(CutMode mode) {
    switch (mode) {
        case CutMode::none: return "none";
        case CutMode::standard: return "standard";
        case CutMode::all: return "all";
    }
    return "?";
}

std::vector<Cut> separate_all(const Instance& inst, const Precedence& prec, const Point& x, CutMode mode, double tol,
                              bool lift, const CutObserver& observer) {
    std::vector<Cut> cuts;
    if (mode == CutMode::none) return cuts;
    auto take = [&](std::vector<Cut>&& found) {
        for (auto& c : found) cuts.push_back(std::move(c));
    };
    for (int k = 1; k <= inst.m; ++k) {
        take(separate_cover(inst, k, x, tol));
        take(separate_one_d_config(inst, k, x, tol));
        if (mode == CutMode::all) take(separate_mic(inst, prec, k, x, tol));
    }
    if (mode == CutMode::all) {
        take(separate_four_cycle(inst, x, tol));
        take(separate_extended_cover(inst, x, tol));
        take(separate_hetero_two_cover(inst, x, tol));
    }
    for (auto& c : cuts) {
        if (observer) observer(c);
        if (!lift) continue;
        std::vector<std::pair<int, int>> targets;
        for (int i = 1; i <= inst.m; ++i)
            for (int j = 0; j < inst.n; ++j)
                if (xv(x, i, j) > kPositive && c.coef(i, j) == 0 && eligible(inst, i, j)) targets.emplace_back(i, j);
        Cut lifted = lift_cut(c, targets, inst);
        if (lifted.kind == CutKind::lifted) {
            if (observer) observer(lifted);
            c = std::move(lifted);
        }
    }
    std::stable_sort(cuts.begin(), cuts.end(),
                     [&](const Cut& a, const Cut& b) { return a.violation(x) > b.violation(x) + 1e-12; });
    return cuts;
}

CutPool::Key CutPool::key(const Cut& cut) {
    std::vector<std::tuple<int, int, long>> support;
    for (const auto& t : cut.terms) support.emplace_back(t.station, t.task, t.coef);
    return {static_cast<int>(cut.kind), std::move(support), cut.rhs};
}

bool CutPool::insert(const Cut& cut) {
    if (!seen_.insert(key(cut)).second) return false;
    cuts_.push_back(cut);
    return true;
}

bool CutPool::contains(const Cut& cut) const { return seen_.count(key(cut)) != 0; }

}  // namespace salb
