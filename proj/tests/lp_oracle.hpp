// Test-only LP oracle: random LPs built as products of small blocks, each
// solved by brute-force vertex enumeration.
#ifndef SALB_TESTS_LP_ORACLE_HPP
#define SALB_TESTS_LP_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "salb/lp.hpp"

namespace salb::testing {

struct DenseRow {
    std::vector<double> a;
    RowSense sense;
    double rhs;
};

struct Block {
    int cols = 0;
    std::vector<DenseRow> rows;
    std::vector<double> cost;
};

inline bool solve_dense(std::vector<std::vector<double>> A, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::abs(A[i][c]) > std::abs(A[p][c])) p = i;
        if (std::abs(A[p][c]) < 1e-10) return false;
        std::swap(A[p], A[c]);
        std::swap(b[p], b[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c) continue;
            double f = A[i][c] / A[c][c];
            for (std::size_t k = c; k < n; ++k) A[i][k] -= f * A[c][k];
            b[i] -= f * b[c];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
    return true;
}

/// Minimum of cost.x over the block polytope, nullopt when empty.
inline std::optional<double> enumerate_vertices(const Block& blk) {
    const int k = blk.cols;
    // Candidate hyperplanes: every row, plus x_c = 0 and x_c = 1.
    std::vector<std::vector<double>> planes;
    std::vector<double> rhs;
    std::vector<bool> mandatory;
    for (const auto& r : blk.rows) {
        planes.push_back(r.a);
        rhs.push_back(r.rhs);
        mandatory.push_back(r.sense == RowSense::equal);
    }
    for (int c = 0; c < k; ++c)
        for (double bound : {0.0, 1.0}) {
            std::vector<double> e(static_cast<std::size_t>(k), 0.0);
            e[static_cast<std::size_t>(c)] = 1.0;
            planes.push_back(e);
            rhs.push_back(bound);
            mandatory.push_back(false);
        }
    auto feasible = [&](const std::vector<double>& x) {
        for (double v : x)
            if (v < -1e-9 || v > 1 + 1e-9) return false;
        for (const auto& r : blk.rows) {
            double act = 0;
            for (int c = 0; c < k; ++c) act += r.a[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
            if (r.sense == RowSense::less_equal && act > r.rhs + 1e-9) return false;
            if (r.sense == RowSense::greater_equal && act < r.rhs - 1e-9) return false;
            if (r.sense == RowSense::equal && std::abs(act - r.rhs) > 1e-9) return false;
        }
        return true;
    };
    std::optional<double> best;
    const auto P = planes.size();
    // Iterate over k-subsets of hyperplanes.
    std::vector<bool> sel(P, false);
    std::fill(sel.begin(), sel.begin() + std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(P)), true);
    do {
        bool ok = true;
        for (std::size_t i = 0; i < P; ++i)
            if (mandatory[i] && !sel[i]) ok = false;
        if (!ok) continue;
        std::vector<std::vector<double>> A;
        std::vector<double> b;
        for (std::size_t i = 0; i < P; ++i)
            if (sel[i]) {
                A.push_back(planes[i]);
                b.push_back(rhs[i]);
            }
        std::vector<double> x;
        if (!solve_dense(A, b, x) || !feasible(x)) continue;
        double z = 0;
        for (int c = 0; c < k; ++c) z += blk.cost[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
        if (!best || z < *best) best = z;
    } while (std::prev_permutation(sel.begin(), sel.end()));
    return best;
}

inline Block random_block(std::mt19937& rng, int cols) {
    Block b;
    b.cols = cols;
    std::uniform_int_distribution<int> coin(0, 2);
    std::uniform_int_distribution<int> w(1, 9);
    std::uniform_int_distribution<int> c(-5, 5);
    for (int q = 0; q < cols; ++q) b.cost.push_back(c(rng));
    const int nrows = 1 + static_cast<int>(rng() % 2);
    bool has_simplex = false;
    for (int r = 0; r < nrows; ++r) {
        DenseRow row;
        row.a.assign(static_cast<std::size_t>(cols), 0.0);
        int kind = coin(rng);
        // A repeated simplex row would make the mandatory equalities singular.
        if (kind == 0 && has_simplex) kind = 1;
        has_simplex = has_simplex || kind == 0;
        switch (kind) {
            case 0:  // simplex, equality or packing
                for (auto& a : row.a) a = 1.0;
                row.sense = rng() % 2 ? RowSense::equal : RowSense::less_equal;
                row.rhs = 1.0;
                break;
            case 1: {  // knapsack
                double total = 0;
                for (auto& a : row.a) total += (a = w(rng));
                row.sense = RowSense::less_equal;
                row.rhs = std::floor(total * (0.3 + 0.5 * (rng() % 100) / 100.0));
                break;
            }
            default: {  // covering row
                double total = 0;
                for (auto& a : row.a) total += (a = w(rng));
                row.sense = RowSense::greater_equal;
                row.rhs = std::floor(total * (0.1 + 0.6 * (rng() % 100) / 100.0));
                break;
            }
        }
        b.rows.push_back(std::move(row));
    }
    return b;
}

/// Builds the LP into `lp` with shuffled columns and rows; returns the
/// enumerated optimum (nullopt when infeasible).
inline std::optional<double> random_block_lp(std::mt19937& rng, LpProblem& lp, int max_cols = 20) {
    std::uniform_int_distribution<int> total_cols(2, max_cols);
    int remaining = total_cols(rng);
    std::vector<Block> blocks;
    while (remaining > 0) {
        int k = std::min(remaining, 1 + static_cast<int>(rng() % 5));
        blocks.push_back(random_block(rng, k));
        remaining -= k;
    }
    int n = 0;
    for (const auto& b : blocks) n += b.cols;
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int c = 0; c < n; ++c) lp.add_column(0.0, 1.0);
    std::vector<LpTerm> obj;
    struct PendingRow {
        std::vector<LpTerm> terms;
        RowSense sense;
        double rhs;
    };
    std::vector<PendingRow> pending;
    int offset = 0;
    std::optional<double> total = 0.0;
    for (const auto& b : blocks) {
        for (int q = 0; q < b.cols; ++q)
            obj.push_back({perm[static_cast<std::size_t>(offset + q)], b.cost[static_cast<std::size_t>(q)]});
        for (const auto& r : b.rows) {
            PendingRow pr{{}, r.sense, r.rhs};
            for (int q = 0; q < b.cols; ++q)
                pr.terms.push_back({perm[static_cast<std::size_t>(offset + q)], r.a[static_cast<std::size_t>(q)]});
            pending.push_back(std::move(pr));
        }
        auto z = enumerate_vertices(b);
        if (!z) total.reset();
        else if (total) *total += *z;
        offset += b.cols;
    }
    std::shuffle(pending.begin(), pending.end(), rng);
    for (const auto& pr : pending) lp.add_row(pr.terms, pr.sense, pr.rhs);
    lp.set_objective(obj, ObjSense::minimize);
    return total;
}

}  // namespace salb::testing

#endif  // SALB_TESTS_LP_ORACLE_HPP
