#include "salb/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace salb {

namespace {
constexpr double kPivotTol = 1e-9;
constexpr double kSingularTol = 1e-11;
constexpr double kShiftLimit = 1e-5;
}  // namespace

int LpProblem::add_column(double lo, double hi, double cost) {
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) throw std::invalid_argument("column bounds must satisfy 0 <= lo <= hi <= 1");
    const int col = ncols_;
    // Slack variable ids shift by one.
    for (int& h : head_)
        if (h >= ncols_) ++h;
    status_.insert(status_.begin() + ncols_, kLower);
    lo_.push_back(lo);
    hi_.push_back(hi);
    user_cost_.push_back(cost);
    cols_.emplace_back();
    ++ncols_;
    return col;
}

void LpProblem::slack_range(const Row& row, double& lo, double& hi) const {
    double amin = 0.0, amax = 0.0;
    for (const auto& t : row.terms) {
        amin += std::min(0.0, t.coef);
        amax += std::max(0.0, t.coef);
    }
    switch (row.sense) {
        case RowSense::less_equal:
            lo = 0.0;
            hi = std::max(0.0, row.rhs - amin);
            break;
        case RowSense::greater_equal:
            lo = std::min(0.0, row.rhs - amax);
            hi = 0.0;
            break;
        case RowSense::equal:
            lo = hi = 0.0;
            break;
    }
}

int LpProblem::add_row(std::span<const LpTerm> terms, RowSense sense, double rhs) {
    std::map<int, double> merged;
    for (const auto& t : terms) {
        if (t.col < 0 || t.col >= ncols_) throw std::out_of_range("row references unknown column");
        merged[t.col] += t.coef;
    }
    Row row{{}, sense, rhs};
    for (auto [c, v] : merged)
        if (v != 0.0) row.terms.push_back({c, v});

    const int r = num_rows();
    for (const auto& t : row.terms) cols_[static_cast<std::size_t>(t.col)].push_back({r, t.coef});
    double slo = 0.0, shi = 0.0;
    slack_range(row, slo, shi);
    slack_lo_.push_back(slo);
    slack_hi_.push_back(shi);

    const int slack = ncols_ + r;
    if (factor_valid_ && factored_rows_ == r) {
        // [B 0; u 1]^-1 = [Binv 0; -u Binv 1] where u holds the new row's
        // coefficients on the current basic columns.
        const auto R = static_cast<std::size_t>(r);
        std::vector<double> grown((R + 1) * (R + 1), 0.0);
        for (std::size_t i = 0; i < R; ++i)
            std::copy_n(binv_.begin() + static_cast<std::ptrdiff_t>(i * R), R,
                        grown.begin() + static_cast<std::ptrdiff_t>(i * (R + 1)));
        std::vector<double> coef_of(static_cast<std::size_t>(ncols_), 0.0);
        for (const auto& t : row.terms) coef_of[static_cast<std::size_t>(t.col)] = t.coef;
        double* last = grown.data() + R * (R + 1);
        for (std::size_t p = 0; p < R; ++p) {
            const int h = head_[p];
            if (h >= ncols_) continue;
            const double u = coef_of[static_cast<std::size_t>(h)];
            if (u == 0.0) continue;
            for (std::size_t k = 0; k < R; ++k) last[k] -= u * binv_[p * R + k];
        }
        last[R] = 1.0;
        binv_ = std::move(grown);
        factored_rows_ = r + 1;
    } else {
        factor_valid_ = false;
    }
    rows_.push_back(std::move(row));
    head_.push_back(slack);
    status_.push_back(kBasic);
    return r;
}

std::vector<int> LpProblem::remove_rows(std::span<const int> rows) {
    const int R = num_rows();
    std::vector<int> row_map(static_cast<std::size_t>(R), 0);
    for (int r : rows) {
        if (r < 0 || r >= R) throw std::out_of_range("unknown row");
        row_map[static_cast<std::size_t>(r)] = -1;
    }
    int next = 0;
    for (auto& v : row_map)
        if (v == 0) v = next++;
    if (next == R) return row_map;

    bool keep_basis = static_cast<int>(status_.size()) == nvars() && static_cast<int>(head_.size()) == R;
    for (int r : rows)
        if (keep_basis && status_[static_cast<std::size_t>(ncols_ + r)] != kBasic) keep_basis = false;

    std::vector<Row> kept_rows;
    std::vector<double> kept_lo, kept_hi;
    for (int r = 0; r < R; ++r) {
        if (row_map[static_cast<std::size_t>(r)] < 0) continue;
        kept_rows.push_back(std::move(rows_[static_cast<std::size_t>(r)]));
        kept_lo.push_back(slack_lo_[static_cast<std::size_t>(r)]);
        kept_hi.push_back(slack_hi_[static_cast<std::size_t>(r)]);
    }
    rows_ = std::move(kept_rows);
    slack_lo_ = std::move(kept_lo);
    slack_hi_ = std::move(kept_hi);
    for (auto& col : cols_) {
        std::vector<ColEntry> kept;
        for (const auto& e : col)
            if (row_map[static_cast<std::size_t>(e.row)] >= 0) kept.push_back({row_map[static_cast<std::size_t>(e.row)], e.coef});
        col = std::move(kept);
    }

    if (keep_basis) {
        std::vector<int> head;
        std::vector<double> xb;
        for (std::size_t p = 0; p < head_.size(); ++p) {
            const int h = head_[p];
            if (!is_slack(h)) head.push_back(h);
            else if (row_map[static_cast<std::size_t>(h - ncols_)] >= 0) head.push_back(ncols_ + row_map[static_cast<std::size_t>(h - ncols_)]);
            else continue;
            if (xb_.size() == head_.size()) xb.push_back(xb_[p]);
        }
        std::vector<std::int8_t> status(status_.begin(), status_.begin() + ncols_);
        for (int r = 0; r < R; ++r)
            if (row_map[static_cast<std::size_t>(r)] >= 0) status.push_back(status_[static_cast<std::size_t>(ncols_ + r)]);
        head_ = std::move(head);
        status_ = std::move(status);
        xb_ = std::move(xb);
    } else {
        head_.clear();
        status_.clear();
    }
    factor_valid_ = false;
    primal_valid_ = false;
    perturb_.clear();
    dj_.clear();
    return row_map;
}

LpBasis LpProblem::remap_basis(const LpBasis& b, std::span<const int> row_map) const {
    if (b.cols != ncols_ || b.rows > static_cast<int>(row_map.size()) || static_cast<int>(b.head.size()) != b.rows ||
        static_cast<int>(b.status.size()) != b.cols + b.rows)
        return {};
    LpBasis out;
    out.cols = b.cols;
    out.status.assign(b.status.begin(), b.status.begin() + b.cols);
    for (int r = 0; r < b.rows; ++r) {
        if (row_map[static_cast<std::size_t>(r)] >= 0) {
            out.status.push_back(b.status[static_cast<std::size_t>(b.cols + r)]);
            ++out.rows;
        } else if (b.status[static_cast<std::size_t>(b.cols + r)] != kBasic) {
            return {};
        }
    }
    for (int h : b.head) {
        if (h < b.cols) out.head.push_back(h);
        else if (row_map[static_cast<std::size_t>(h - b.cols)] >= 0) out.head.push_back(b.cols + row_map[static_cast<std::size_t>(h - b.cols)]);
    }
    return out;
}

void LpProblem::set_bounds(int col, double lo, double hi) {
    if (col < 0 || col >= ncols_) throw std::out_of_range("unknown column");
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) throw std::invalid_argument("bounds must satisfy 0 <= lo <= hi <= 1");
    lo_[static_cast<std::size_t>(col)] = lo;
    hi_[static_cast<std::size_t>(col)] = hi;
}

void LpProblem::set_objective(std::span<const LpTerm> terms, ObjSense sense) {
    std::fill(user_cost_.begin(), user_cost_.end(), 0.0);
    for (const auto& t : terms) {
        if (t.col < 0 || t.col >= ncols_) throw std::out_of_range("objective references unknown column");
        user_cost_[static_cast<std::size_t>(t.col)] += t.coef;
    }
    sense_ = sense;
}

double LpProblem::var_lo(int v) const {
    return is_slack(v) ? slack_lo_[static_cast<std::size_t>(v - ncols_)] : lo_[static_cast<std::size_t>(v)];
}

double LpProblem::var_hi(int v) const {
    return is_slack(v) ? slack_hi_[static_cast<std::size_t>(v - ncols_)] : hi_[static_cast<std::size_t>(v)];
}

double LpProblem::nb_value(int v) const {
    return status_[static_cast<std::size_t>(v)] == kUpper ? var_hi(v) : var_lo(v);
}

LpBasis LpProblem::basis() const {
    LpBasis b;
    b.cols = ncols_;
    b.rows = num_rows();
    b.head = head_;
    b.status = status_;
    return b;
}

void LpProblem::reset_to_slack_basis() {
    const int R = num_rows();
    head_.resize(static_cast<std::size_t>(R));
    status_.assign(static_cast<std::size_t>(nvars()), kLower);
    for (int r = 0; r < R; ++r) {
        head_[static_cast<std::size_t>(r)] = ncols_ + r;
        status_[static_cast<std::size_t>(ncols_ + r)] = kBasic;
    }
    binv_.assign(static_cast<std::size_t>(R) * static_cast<std::size_t>(R), 0.0);
    for (int r = 0; r < R; ++r) binv_[static_cast<std::size_t>(r) * static_cast<std::size_t>(R) + static_cast<std::size_t>(r)] = 1.0;
    factored_rows_ = R;
    factor_valid_ = true;
    pivots_since_refactor_ = 0;
    primal_valid_ = false;
}

void LpProblem::install_basis(const LpBasis& warm) {
    const int R = num_rows();
    bool usable = warm.cols == ncols_ && warm.rows <= R &&
                  static_cast<int>(warm.head.size()) == warm.rows &&
                  static_cast<int>(warm.status.size()) == warm.cols + warm.rows;
    if (usable) {
        head_ = warm.head;
        status_ = warm.status;
        for (int r = warm.rows; r < R; ++r) {
            head_.push_back(ncols_ + r);
            status_.push_back(kBasic);
        }
        int basics = 0;
        for (auto s : status_) basics += s == kBasic;
        for (int h : head_)
            if (h < 0 || h >= nvars() || status_[static_cast<std::size_t>(h)] != kBasic) usable = false;
        if (basics != R) usable = false;
    }
    if (!usable) {
        reset_to_slack_basis();
        return;
    }
    factor_valid_ = false;
}

bool LpProblem::refactor() {
    // Basic slacks contribute unit columns, so only the square kernel formed
    // by the basic structural columns on the rows with nonbasic slacks needs
    // a real inverse.
    const auto R = static_cast<std::size_t>(num_rows());
    std::vector<int> slack_pos(R, -1);
    std::vector<std::size_t> structural;
    for (std::size_t p = 0; p < R; ++p) {
        const int h = head_[p];
        if (is_slack(h)) slack_pos[static_cast<std::size_t>(h - ncols_)] = static_cast<int>(p);
        else structural.push_back(p);
    }
    std::vector<int> kernel_row_of(R, -1);
    std::vector<std::size_t> kernel_rows;
    for (std::size_t r = 0; r < R; ++r)
        if (slack_pos[r] < 0) {
            kernel_row_of[r] = static_cast<int>(kernel_rows.size());
            kernel_rows.push_back(r);
        }
    const std::size_t k = structural.size();
    if (kernel_rows.size() != k) return false;

    std::vector<double> K(k * k, 0.0), inv(k * k, 0.0);
    for (std::size_t b = 0; b < k; ++b)
        for (const auto& e : cols_[static_cast<std::size_t>(head_[structural[b]])]) {
            const int a = kernel_row_of[static_cast<std::size_t>(e.row)];
            if (a >= 0) K[static_cast<std::size_t>(a) * k + b] = e.coef;
        }
    for (std::size_t i = 0; i < k; ++i) inv[i * k + i] = 1.0;
    // Gauss-Jordan with partial pivoting: K * X = I.
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t best = c;
        double best_abs = std::abs(K[c * k + c]);
        for (std::size_t i = c + 1; i < k; ++i) {
            double a = std::abs(K[i * k + c]);
            if (a > best_abs) {
                best_abs = a;
                best = i;
            }
        }
        if (best_abs < kSingularTol) return false;
        if (best != c) {
            for (std::size_t j = 0; j < k; ++j) {
                std::swap(K[c * k + j], K[best * k + j]);
                std::swap(inv[c * k + j], inv[best * k + j]);
            }
        }
        const double piv = K[c * k + c];
        for (std::size_t j = 0; j < k; ++j) {
            K[c * k + j] /= piv;
            inv[c * k + j] /= piv;
        }
        for (std::size_t i = 0; i < k; ++i) {
            if (i == c) continue;
            const double f = K[i * k + c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < k; ++j) {
                K[i * k + j] -= f * K[c * k + j];
                inv[i * k + j] -= f * inv[c * k + j];
            }
        }
    }

    // Row p of binv_ belongs to basis position p, column r to constraint row r.
    std::vector<double> out(R * R, 0.0);
    for (std::size_t b = 0; b < k; ++b)
        for (std::size_t a = 0; a < k; ++a) out[structural[b] * R + kernel_rows[a]] = inv[b * k + a];
    for (std::size_t r = 0; r < R; ++r)
        if (slack_pos[r] >= 0) out[static_cast<std::size_t>(slack_pos[r]) * R + r] = 1.0;
    for (std::size_t b = 0; b < k; ++b)
        for (const auto& e : cols_[static_cast<std::size_t>(head_[structural[b]])]) {
            const int p = slack_pos[static_cast<std::size_t>(e.row)];
            if (p < 0) continue;
            double* row = out.data() + static_cast<std::size_t>(p) * R;
            const double* irow = inv.data() + b * k;
            for (std::size_t a = 0; a < k; ++a) row[kernel_rows[a]] -= e.coef * irow[a];
        }
    binv_ = std::move(out);
    factored_rows_ = static_cast<int>(R);
    factor_valid_ = true;
    primal_valid_ = false;
    pivots_since_refactor_ = 0;
    return true;
}

void LpProblem::compute_primal() {
    const auto R = static_cast<std::size_t>(num_rows());
    std::vector<double> rhs(R);
    for (std::size_t r = 0; r < R; ++r) rhs[r] = rows_[r].rhs;
    for (int v = 0; v < nvars(); ++v) {
        if (status_[static_cast<std::size_t>(v)] == kBasic) continue;
        const double x = nb_value(v);
        if (x == 0.0) continue;
        if (is_slack(v)) {
            rhs[static_cast<std::size_t>(v - ncols_)] -= x;
        } else {
            for (const auto& e : cols_[static_cast<std::size_t>(v)]) rhs[static_cast<std::size_t>(e.row)] -= e.coef * x;
        }
    }
    std::vector<std::size_t> nz;
    for (std::size_t k = 0; k < R; ++k)
        if (rhs[k] != 0.0) nz.push_back(k);
    xb_.assign(R, 0.0);
    for (std::size_t p = 0; p < R; ++p) {
        double s = 0.0;
        const double* row = binv_.data() + p * R;
        for (std::size_t k : nz) s += row[k] * rhs[k];
        xb_[p] = s;
    }
}

double LpProblem::internal_cost(int v) const {
    double c = 0.0;
    if (!is_slack(v)) c = (sense_ == ObjSense::maximize ? -1.0 : 1.0) * user_cost_[static_cast<std::size_t>(v)];
    if (!perturb_.empty()) c += perturb_[static_cast<std::size_t>(v)];
    return c;
}

void LpProblem::compute_duals() {
    const auto R = static_cast<std::size_t>(num_rows());
    std::vector<double> y(R, 0.0);
    for (std::size_t p = 0; p < R; ++p) {
        const double c = internal_cost(head_[p]);
        if (c == 0.0) continue;
        const double* row = binv_.data() + p * R;
        for (std::size_t k = 0; k < R; ++k) y[k] += c * row[k];
    }
    dj_.assign(static_cast<std::size_t>(nvars()), 0.0);
    for (int v = 0; v < nvars(); ++v) {
        if (status_[static_cast<std::size_t>(v)] == kBasic) continue;
        double d = internal_cost(v);
        if (is_slack(v)) {
            d -= y[static_cast<std::size_t>(v - ncols_)];
        } else {
            for (const auto& e : cols_[static_cast<std::size_t>(v)]) d -= y[static_cast<std::size_t>(e.row)] * e.coef;
        }
        dj_[static_cast<std::size_t>(v)] = d;
    }
}

void LpProblem::flip_to_dual_feasible() {
    for (int v = 0; v < nvars(); ++v) {
        auto& s = status_[static_cast<std::size_t>(v)];
        if (s == kBasic) continue;
        const double d = dj_[static_cast<std::size_t>(v)];
        const bool wrong = (s == kLower && d < -opt_.optimality_tol) || (s == kUpper && d > opt_.optimality_tol);
        if (!wrong) continue;
        if (!perturb_.empty() && std::abs(d) <= kShiftLimit) {
            // Drift from the Harris ratio test: shift the cost, not the bound.
            perturb_[static_cast<std::size_t>(v)] -= d;
            dj_[static_cast<std::size_t>(v)] = 0.0;
            continue;
        }
        const double before = nb_value(v);
        s = s == kLower ? kUpper : kLower;
        const double delta = nb_value(v) - before;
        if (!primal_valid_ || delta == 0.0) continue;
        const auto w = ftran(v);
        for (std::size_t p = 0; p < w.size(); ++p) xb_[p] -= delta * w[p];
    }
}

double LpProblem::alpha(const std::vector<double>& rho, int v) const {
    if (is_slack(v)) return rho[static_cast<std::size_t>(v - ncols_)];
    double a = 0.0;
    for (const auto& e : cols_[static_cast<std::size_t>(v)]) a += rho[static_cast<std::size_t>(e.row)] * e.coef;
    return a;
}

std::vector<double> LpProblem::ftran(int v) const {
    const auto R = static_cast<std::size_t>(num_rows());
    std::vector<double> w(R, 0.0);
    if (is_slack(v)) {
        const auto k = static_cast<std::size_t>(v - ncols_);
        for (std::size_t p = 0; p < R; ++p) w[p] = binv_[p * R + k];
    } else {
        for (std::size_t p = 0; p < R; ++p) {
            double s = 0.0;
            for (const auto& e : cols_[static_cast<std::size_t>(v)]) s += binv_[p * R + static_cast<std::size_t>(e.row)] * e.coef;
            w[p] = s;
        }
    }
    return w;
}

void LpProblem::pivot(int r, int q, const std::vector<double>& w) {
    const auto R = static_cast<std::size_t>(num_rows());
    const auto pr = static_cast<std::size_t>(r);
    double* prow = binv_.data() + pr * R;
    const double piv = w[pr];
    std::vector<std::size_t> nz;
    for (std::size_t k = 0; k < R; ++k)
        if (prow[k] != 0.0) {
            prow[k] /= piv;
            nz.push_back(k);
        }
    for (std::size_t p = 0; p < R; ++p) {
        if (p == pr || w[p] == 0.0) continue;
        const double f = w[p];
        double* row = binv_.data() + p * R;
        for (std::size_t k : nz) row[k] -= f * prow[k];
    }
    head_[pr] = q;
    status_[static_cast<std::size_t>(q)] = kBasic;
    ++pivots_since_refactor_;
}

LpSolution LpProblem::solve(const LpBasis& warm) {
    install_basis(warm);
    return solve();
}

LpSolution LpProblem::solve() {
    if (static_cast<int>(head_.size()) != num_rows() || static_cast<int>(status_.size()) != nvars())
        reset_to_slack_basis();
    if (!factor_valid_ || factored_rows_ != num_rows()) {
        if (!refactor()) reset_to_slack_basis();
    }
    compute_primal();
    primal_valid_ = true;
    LpSolution sol = basics_within_bounds(opt_.feasibility_tol * 0.1) ? run_primal() : run();
    if (sol.status == LpStatus::optimal && max_violation(sol.x) > opt_.feasibility_tol) {
        // One retry from a fresh factorization before giving up.
        if (!refactor()) reset_to_slack_basis();
        long before = sol.iterations;
        sol = run();
        sol.iterations += before;
        if (sol.status == LpStatus::optimal && max_violation(sol.x) > opt_.feasibility_tol)
            throw LpNumericalError("LP solution violates feasibility tolerance after refactorization");
    }
    return sol;
}

LpSolution LpProblem::run(bool shift) {
    // The dual phase runs on shifted costs: a small random perturbation
    // against degeneracy plus shifts that absorb ratio-test drift. The
    // primal phase then restores the true costs from a feasible basis.
    if (shift) {
        perturb_.assign(static_cast<std::size_t>(nvars()), 0.0);
        if (opt_.perturb) {
            std::uint32_t h = 2166136261u;
            for (int v = 0; v < ncols_; ++v) {
                h = (h ^ static_cast<std::uint32_t>(v)) * 16777619u;
                const double u = 0.5 + static_cast<double>(h % 1024u) / 2048.0;
                const double eps = 1e-6 * (1.0 + std::abs(user_cost_[static_cast<std::size_t>(v)])) * u;
                perturb_[static_cast<std::size_t>(v)] = status_[static_cast<std::size_t>(v)] == kUpper ? -eps : eps;
            }
        }
    }
    LpSolution sol = run_dual();
    if (perturb_.empty()) return sol;
    const bool shifted = std::any_of(perturb_.begin(), perturb_.end(), [](double c) { return c != 0.0; });
    perturb_.clear();
    if (!shifted || sol.status == LpStatus::infeasible) return sol;
    if (sol.status != LpStatus::optimal) {
        extract(sol);
        return sol;
    }
    const long before = sol.iterations;
    primal_valid_ = false;
    sol = run_primal();
    sol.iterations += before;
    return sol;
}

LpSolution LpProblem::run_dual() {
    const int R = num_rows();
    const long limit = opt_.iteration_limit > 0 ? opt_.iteration_limit : 50L * (R + ncols_) + 50;
    const double ftol = opt_.feasibility_tol * 0.1;
    const double dtol = opt_.optimality_tol;

    LpSolution sol;
    primal_valid_ = false;
    compute_duals();
    flip_to_dual_feasible();
    long degenerate = 0;
    bool refactored_for_check = false;

    for (long it = 0;; ++it) {
        if (it >= limit) {
            sol.status = LpStatus::iteration_limit;
            sol.iterations = it;
            break;
        }
        if (pivots_since_refactor_ >= opt_.refactor_interval) {
            if (!refactor()) {
                reset_to_slack_basis();
            }
            compute_duals();
            flip_to_dual_feasible();
        }
        if (!primal_valid_) {
            compute_primal();
            primal_valid_ = true;
        }
        const bool bland = degenerate >= opt_.degenerate_before_bland;

        // Leaving row: largest bound violation (Bland: lowest variable id).
        int r = -1;
        double worst = ftol;
        for (int p = 0; p < R; ++p) {
            const int h = head_[static_cast<std::size_t>(p)];
            const double x = xb_[static_cast<std::size_t>(p)];
            const double viol = std::max(var_lo(h) - x, x - var_hi(h));
            if (viol <= ftol) continue;
            if (bland) {
                if (r < 0 || h < head_[static_cast<std::size_t>(r)]) r = p;
            } else if (viol > worst) {
                worst = viol;
                r = p;
            }
        }
        if (r < 0) {
            if (pivots_since_refactor_ > 0 && !refactored_for_check) {
                // Confirm against freshly computed basic values.
                refactored_for_check = true;
                primal_valid_ = false;
                continue;
            }
            sol.status = LpStatus::optimal;
            sol.iterations = it;
            break;
        }
        refactored_for_check = false;

        const int leaving = head_[static_cast<std::size_t>(r)];
        const double xr = xb_[static_cast<std::size_t>(r)];
        const bool below = xr < var_lo(leaving);
        const double target = below ? var_lo(leaving) : var_hi(leaving);

        std::vector<double> rho(binv_.begin() + static_cast<std::ptrdiff_t>(r) * R,
                                binv_.begin() + static_cast<std::ptrdiff_t>(r + 1) * R);
        struct Cand {
            int v;
            double a;
            double d;
        };
        std::vector<Cand> cands;
        for (int v = 0; v < nvars(); ++v) {
            const auto s = status_[static_cast<std::size_t>(v)];
            if (s == kBasic || var_lo(v) == var_hi(v)) continue;
            const double a = alpha(rho, v);
            if (std::abs(a) < kPivotTol) continue;
            const bool ok = below ? ((s == kLower && a < 0) || (s == kUpper && a > 0))
                                  : ((s == kLower && a > 0) || (s == kUpper && a < 0));
            if (!ok) continue;
            const double d = s == kLower ? std::max(0.0, dj_[static_cast<std::size_t>(v)])
                                         : std::max(0.0, -dj_[static_cast<std::size_t>(v)]);
            cands.push_back({v, a, d});
        }
        if (cands.empty()) {
            if (pivots_since_refactor_ > 0) {
                if (!refactor()) reset_to_slack_basis();
                compute_duals();
                flip_to_dual_feasible();
                continue;
            }
            sol.status = LpStatus::infeasible;
            sol.iterations = it;
            return sol;
        }
        int q = -1;
        double q_ratio = 0.0;
        if (bland) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : cands) best = std::min(best, c.d / std::abs(c.a));
            for (const auto& c : cands)
                if (c.d / std::abs(c.a) <= best + 1e-12 && (q < 0 || c.v < q)) {
                    q = c.v;
                    q_ratio = c.d / std::abs(c.a);
                }
        } else {
            // Harris two-pass ratio test.
            double bound = std::numeric_limits<double>::infinity();
            for (const auto& c : cands) bound = std::min(bound, (c.d + dtol) / std::abs(c.a));
            double best_abs = 0.0;
            for (const auto& c : cands) {
                const double ratio = c.d / std::abs(c.a);
                if (ratio <= bound && std::abs(c.a) > best_abs) {
                    best_abs = std::abs(c.a);
                    q = c.v;
                    q_ratio = ratio;
                }
            }
        }
        degenerate = q_ratio < 1e-12 ? degenerate + 1 : 0;

        std::vector<double> w = ftran(q);
        if (std::abs(w[static_cast<std::size_t>(r)]) < kPivotTol) {
            // Inconsistent with the row computation: refresh the factorization.
            if (!refactor()) reset_to_slack_basis();
            compute_duals();
            flip_to_dual_feasible();
            continue;
        }
        const double xq = nb_value(q);
        const double theta = (xr - target) / w[static_cast<std::size_t>(r)];
        status_[static_cast<std::size_t>(leaving)] = below ? kLower : kUpper;
        pivot(r, q, w);
        if (primal_valid_) {
            for (std::size_t p = 0; p < w.size(); ++p) xb_[p] -= theta * w[p];
            xb_[static_cast<std::size_t>(r)] = xq + theta;
        }
        compute_duals();
        flip_to_dual_feasible();
    }

    if (sol.status == LpStatus::optimal || sol.status == LpStatus::iteration_limit) extract(sol);
    return sol;
}

void LpProblem::extract(LpSolution& sol) {
    const int R = num_rows();
    compute_primal();
    sol.x.assign(static_cast<std::size_t>(ncols_), 0.0);
    for (int v = 0; v < ncols_; ++v)
        if (status_[static_cast<std::size_t>(v)] != kBasic) sol.x[static_cast<std::size_t>(v)] = nb_value(v);
    for (int p = 0; p < R; ++p) {
        const int h = head_[static_cast<std::size_t>(p)];
        if (h < ncols_) {
            double x = xb_[static_cast<std::size_t>(p)];
            x = std::clamp(x, lo_[static_cast<std::size_t>(h)], hi_[static_cast<std::size_t>(h)]);
            if (std::abs(x) < 1e-12) x = 0.0;
            sol.x[static_cast<std::size_t>(h)] = x;
        }
    }
    sol.objective = objective_value(sol.x);
}

bool LpProblem::basics_within_bounds(double tol) const {
    for (std::size_t p = 0; p < head_.size(); ++p) {
        const int h = head_[p];
        if (xb_[p] < var_lo(h) - tol || xb_[p] > var_hi(h) + tol) return false;
    }
    return true;
}

LpSolution LpProblem::run_primal() {
    // Phase two only: the caller has checked primal feasibility.
    const int R = num_rows();
    const long limit = opt_.iteration_limit > 0 ? opt_.iteration_limit : 50L * (R + ncols_) + 50;
    const double ftol = opt_.feasibility_tol * 0.1;
    const double dtol = opt_.optimality_tol;
    LpSolution sol;
    long degenerate = 0;
    bool checked = false;

    for (long it = 0;; ++it) {
        if (it >= limit) {
            sol.status = LpStatus::iteration_limit;
            sol.iterations = it;
            extract(sol);
            return sol;
        }
        if (pivots_since_refactor_ >= opt_.refactor_interval && !refactor()) return run(false);
        if (!primal_valid_) {
            compute_primal();
            primal_valid_ = true;
            if (!basics_within_bounds(opt_.feasibility_tol)) return run(false);
        }
        compute_duals();
        const bool bland = degenerate >= opt_.degenerate_before_bland;

        // Entering variable: most attractive reduced cost (Bland: lowest id).
        int q = -1;
        double best = dtol;
        for (int v = 0; v < nvars(); ++v) {
            const auto s = status_[static_cast<std::size_t>(v)];
            if (s == kBasic || var_lo(v) == var_hi(v)) continue;
            const double d = dj_[static_cast<std::size_t>(v)];
            const double gain = s == kLower ? -d : d;
            if (gain <= dtol) continue;
            if (bland) {
                q = v;
                break;
            }
            if (gain > best) {
                best = gain;
                q = v;
            }
        }
        if (q < 0) {
            if (pivots_since_refactor_ > 0 && !checked) {
                checked = true;
                primal_valid_ = false;
                continue;
            }
            sol.status = LpStatus::optimal;
            sol.iterations = it;
            extract(sol);
            return sol;
        }
        checked = false;

        const double dir = status_[static_cast<std::size_t>(q)] == kLower ? 1.0 : -1.0;
        std::vector<double> w = ftran(q);
        // x_B moves by -dir * t * w. Harris pass with relaxed bounds, then the
        // largest pivot among the rows within the relaxed step.
        const double flip = var_hi(q) - var_lo(q);
        double relaxed = flip;
        for (int p = 0; p < R; ++p) {
            const double dp = -dir * w[static_cast<std::size_t>(p)];
            if (std::abs(dp) < kPivotTol) continue;
            const int h = head_[static_cast<std::size_t>(p)];
            const double x = xb_[static_cast<std::size_t>(p)];
            const double room = dp < 0 ? x - var_lo(h) + ftol : var_hi(h) - x + ftol;
            relaxed = std::min(relaxed, std::max(0.0, room) / std::abs(dp));
        }
        int r = -1;
        double t = flip;
        double best_piv = 0.0;
        for (int p = 0; p < R; ++p) {
            const double dp = -dir * w[static_cast<std::size_t>(p)];
            if (std::abs(dp) < kPivotTol) continue;
            const int h = head_[static_cast<std::size_t>(p)];
            const double x = xb_[static_cast<std::size_t>(p)];
            const double room = std::max(0.0, dp < 0 ? x - var_lo(h) : var_hi(h) - x);
            const double ratio = room / std::abs(dp);
            if (ratio > relaxed) continue;
            const bool take = bland ? (r < 0 || ratio < t - 1e-12 ||
                                       (ratio <= t + 1e-12 && h < head_[static_cast<std::size_t>(r)]))
                                    : std::abs(dp) > best_piv;
            if (take) {
                r = p;
                t = ratio;
                best_piv = std::abs(dp);
            }
        }
        if (r < 0 && flip >= std::numeric_limits<double>::infinity()) {
            sol.status = LpStatus::iteration_limit;  // unbounded cannot happen with boxed variables
            sol.iterations = it;
            return sol;
        }
        degenerate = t < 1e-12 ? degenerate + 1 : 0;
        if (r < 0) {
            // Bound flip of the entering variable.
            status_[static_cast<std::size_t>(q)] = dir > 0 ? kUpper : kLower;
            for (std::size_t p = 0; p < w.size(); ++p) xb_[p] -= dir * flip * w[p];
            continue;
        }
        if (std::abs(w[static_cast<std::size_t>(r)]) < kPivotTol) return run(false);
        const int leaving = head_[static_cast<std::size_t>(r)];
        const double dp = -dir * w[static_cast<std::size_t>(r)];
        const double xq = nb_value(q) + dir * t;
        status_[static_cast<std::size_t>(leaving)] = dp < 0 ? kLower : kUpper;
        pivot(r, q, w);
        for (std::size_t p = 0; p < w.size(); ++p) xb_[p] -= dir * t * w[p];
        xb_[static_cast<std::size_t>(r)] = xq;
    }
}

double LpProblem::max_violation(std::span<const double> x) const {
    double worst = 0.0;
    for (int c = 0; c < ncols_; ++c) {
        const double v = x[static_cast<std::size_t>(c)];
        worst = std::max({worst, lo_[static_cast<std::size_t>(c)] - v, v - hi_[static_cast<std::size_t>(c)]});
    }
    for (const auto& row : rows_) {
        double act = 0.0;
        for (const auto& t : row.terms) act += t.coef * x[static_cast<std::size_t>(t.col)];
        switch (row.sense) {
            case RowSense::less_equal: worst = std::max(worst, act - row.rhs); break;
            case RowSense::greater_equal: worst = std::max(worst, row.rhs - act); break;
            case RowSense::equal: worst = std::max(worst, std::abs(act - row.rhs)); break;
        }
    }
    return worst;
}

double LpProblem::objective_value(std::span<const double> x) const {
    double z = 0.0;
    for (int c = 0; c < ncols_; ++c) z += user_cost_[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
    return z;
}

}  // namespace salb
