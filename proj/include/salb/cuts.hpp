#ifndef SALB_CUTS_HPP
#define SALB_CUTS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "salb/instance.hpp"

namespace salb {

/// LP values indexed [station][task]; row 0 unused.
using Point = std::vector<std::vector<double>>;

enum class CutKind { cover, one_d_config, mic, four_cycle, extended_cover, hetero_two_cover, lifted };

const char* cut_kind_name(CutKind k);

struct CutTerm {
    int station;
    int task;
    long coef;

    friend bool operator==(const CutTerm&, const CutTerm&) = default;
};

/// Data needed to re-check the defining conditions of a cut family.
struct CoverCertificate {
    std::vector<int> C;
    std::vector<int> H;        // (1,d)-configuration
    int z = -1;
    int d = 0;
    std::vector<int> closure;  // MIC: C<= \ C
    std::vector<int> Ck, Cl;   // 4-cycle
    int u = -1, v = -1;
    std::vector<int> D;        // extended / hetero two-cover
    int k = 0, l = 0;          // stations
};

/// sum coef * x[station][task] <= rhs.
struct Cut {
    CutKind kind = CutKind::cover;
    CutKind origin = CutKind::cover;  // family before lifting
    std::vector<CutTerm> terms;       // sorted by (station, task), nonzero coefficients
    long rhs = 0;
    CoverCertificate cert;

    double lhs(const Point& x) const;
    double violation(const Point& x) const { return lhs(x) - static_cast<double>(rhs); }
    long coef(int station, int task) const;
    /// Exact check at an integral assignment.
    bool satisfied_by(const Assignment& a) const;
    std::string to_string() const;
};

/// Sorts terms, merges duplicates and drops zeros.
void normalize(Cut& cut);

/// Re-checks the defining conditions recorded in the certificate.
bool verify_certificate(const Instance& inst, const Precedence& prec, const Cut& cut);

// Separators. Each returns only cuts violated at x by more than `tol`.
// Task sets T_k come from the instance's eligible sets.

/// Exact min-cover DP: minimise sum (1 - x_j) subject to sum t_j >= CT_k + 1,
/// then drop redundant items.
std::vector<Cut> separate_cover(const Instance& inst, int k, const Point& x, double tol = 1e-4);

std::vector<Cut> separate_one_d_config(const Instance& inst, int k, const Point& x, double tol = 1e-4);

/// At most five greedy incomparable candidate sets per station.
std::vector<Cut> separate_mic(const Instance& inst, const Precedence& prec, int k, const Point& x, double tol = 1e-4);

std::vector<Cut> separate_four_cycle(const Instance& inst, const Point& x, double tol = 1e-4);

std::vector<Cut> separate_extended_cover(const Instance& inst, const Point& x, double tol = 1e-4);

std::vector<Cut> separate_hetero_two_cover(const Instance& inst, const Point& x, double tol = 1e-4);

/// Families per mode: standard = cover and (1,d)-configuration; all adds
/// MIC, 4-cycle, extended cover and heterogeneous two-cover.
enum class CutMode { none, standard, all };

const char* cut_mode_name(CutMode mode);

/// Called with every separated cut, and again with its lifted form.
using CutObserver = std::function<void(const Cut&)>;

/// Runs the separators of `mode` at x. With `lift`, each cut is lifted over
/// the variables with positive x that it does not contain. Sorted by
/// decreasing violation.
std::vector<Cut> separate_all(const Instance& inst, const Precedence& prec, const Point& x, CutMode mode,
                              double tol = 1e-4, bool lift = true, const CutObserver& observer = {});

/// Smallest-weight item set with total time >= threshold, minimising
/// sum (1 - x_j). Empty optional when the items cannot reach it.
std::optional<std::vector<int>> min_cover(const std::vector<int>& items, const std::vector<int>& times,
                                          const std::vector<double>& xval, long threshold);

// Lifting.

/// v[s-1] = largest number of the first s items (in the given order) that fit
/// together within the capacity, for s = 1..size.
std::vector<int> prefix_capacity(const std::vector<int>& times_in_order, long capacity);

struct LiftContext {
    int n = 0;
    int m = 0;
    std::vector<CutTerm> a_star;             // (station, task, alpha)
    std::vector<std::vector<int>> perm;      // [station] task order; index 0 unused
    std::vector<std::vector<int>> caps;      // [station][s-1] = v_{i,s}
};

/// Max sum alpha z over one-station-per-task and prefix cardinality rows,
/// by successive shortest paths on a chain network.
long lift_gamma(const LiftContext& ctx);
/// Same optimum by enumeration; meant for |A*| <= 16.
long lift_gamma_exhaustive(const LiftContext& ctx);

/// Builds the context for lifting (i0, j0) into `cut`: exclusion step over
/// immediate edges, permutations (cut variables by decreasing |alpha|, then
/// the rest of T_i by decreasing time), and prefix caps where station i0
/// loses t_j0 of its capacity.
LiftContext make_lift_context(const Instance& inst, const Cut& cut, int i0, int j0);

/// Adds alpha_{i0 j0} = max(0, beta - gamma). Returns the cut unchanged
/// when the coefficient is zero or (i0, j0) is already present.
Cut lift_inequality(const Cut& cut, int i0, int j0, const Instance& inst);

/// Sequential lifting over the targets in order.
Cut lift_cut(const Cut& cut, const std::vector<std::pair<int, int>>& targets, const Instance& inst);

/// Deduplicates by (kind, support with coefficients, rhs).
class CutPool {
public:
    /// True if the cut was new.
    bool insert(const Cut& cut);
    bool contains(const Cut& cut) const;
    const std::vector<Cut>& cuts() const { return cuts_; }
    std::size_t size() const { return cuts_.size(); }

private:
    using Key = std::tuple<int, std::vector<std::tuple<int, int, long>>, long>;
    static Key key(const Cut& cut);
    std::set<Key> seen_;
    std::vector<Cut> cuts_;
};

}  // namespace salb

#endif  // SALB_CUTS_HPP
