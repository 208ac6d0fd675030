#ifndef SALB_IP_MODEL_HPP
#define SALB_IP_MODEL_HPP

#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "salb/cp.hpp"
#include "salb/instance.hpp"
#include "salb/lp.hpp"

namespace salb {

/// LP relaxation of the assignment model over reduced domains.
///
/// One column per (station i, task j) with i in S_j. Rows, in order of
/// creation: one SOS equality per task, one knapsack row per station, then
/// for k = 1..m and every edge (a, b): sum_{i<=k} x_ia - sum_{i<=k} x_ib >= 0.
struct IpModel {
    int n = 0;
    int m = 0;
    LpProblem lp;
    std::vector<std::vector<int>> col_of;  // [station][task], station 1-based; -1 if absent
    std::vector<int> col_station;
    std::vector<int> col_task;
    std::vector<std::vector<int>> task_cols;     // per task, increasing station
    std::vector<std::vector<int>> station_cols;  // per station (1-based), increasing task
    std::vector<int> sos_rows;
    std::vector<int> knapsack_rows;  // index i-1
    std::vector<int> precedence_rows;

    int column(int station, int task) const {
        return col_of[static_cast<std::size_t>(station)][static_cast<std::size_t>(task)];
    }
    int num_cols() const { return static_cast<int>(col_station.size()); }
};

/// Nullopt when some real task has an empty domain. Only tasks 0..n-1 of
/// `domains` are read, so a CP store with artificial tasks works as well.
std::optional<IpModel> build_ip(const Instance& inst, const DomainStore& domains);

/// c[0] = c_1 = 1 and c_{i+1} = n c_i + 1.
using CostScheme = std::vector<boost::multiprecision::cpp_int>;
CostScheme station_cost_vector(int n, int m);

/// Exact value of sum c_i x_ij for an assignment.
boost::multiprecision::cpp_int cost_of(const CostScheme& c, const Assignment& a);

struct Objective {
    std::vector<LpTerm> terms;
    ObjSense sense = ObjSense::minimize;
};

/// sum_{i in S_j} i x_ij in the given direction.
Objective task_index_objective(const IpModel& model, int task, ObjSense sense);

/// sum over all columns of i x_ij, minimised.
Objective station_index_objective(const IpModel& model);

/// Station costs rounded to double. Only meaningful while c_m stays well
/// below 2^53.
Objective station_cost_objective(const IpModel& model, const CostScheme& c);

/// True when every c_i is exactly representable as a double.
bool cost_scheme_fits_double(const CostScheme& c);

/// LP point as an (m+1) x n matrix indexed [station][task]; row 0 unused.
std::vector<std::vector<double>> station_task_matrix(const IpModel& model, const std::vector<double>& x);

/// Column vector of an assignment; nullopt if it uses a missing column.
std::optional<std::vector<double>> point_of(const IpModel& model, const Assignment& a);

/// Assignment from a point whose entries are within tol of 0 or 1 and whose
/// tasks each have exactly one 1; nullopt otherwise.
std::optional<Assignment> assignment_of(const IpModel& model, const std::vector<double>& x, double tol = 1e-6);

}  // namespace salb

#endif  // SALB_IP_MODEL_HPP
