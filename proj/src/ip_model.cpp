#include "salb/ip_model.hpp"

#include <cmath>

namespace salb {

std::optional<IpModel> build_ip(const Instance& inst, const DomainStore& domains) {
    IpModel model;
    model.n = inst.n;
    model.m = inst.m;
    model.col_of.assign(static_cast<std::size_t>(inst.m) + 1, std::vector<int>(static_cast<std::size_t>(inst.n), -1));
    model.task_cols.resize(static_cast<std::size_t>(inst.n));
    model.station_cols.resize(static_cast<std::size_t>(inst.m) + 1);

    for (int j = 0; j < inst.n; ++j)
        if (domains.size(j) == 0) return std::nullopt;

    // Columns ordered by station, then task.
    for (int i = 1; i <= inst.m; ++i)
        for (int j = 0; j < inst.n; ++j) {
            if (!domains.contains(j, i)) continue;
            const int c = model.lp.add_column(0.0, 1.0);
            model.col_of[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c;
            model.col_station.push_back(i);
            model.col_task.push_back(j);
            model.station_cols[static_cast<std::size_t>(i)].push_back(c);
        }
    for (int j = 0; j < inst.n; ++j)
        for (int i = 1; i <= inst.m; ++i)
            if (int c = model.column(i, j); c >= 0) model.task_cols[static_cast<std::size_t>(j)].push_back(c);

    std::vector<LpTerm> terms;
    for (int j = 0; j < inst.n; ++j) {
        terms.clear();
        for (int c : model.task_cols[static_cast<std::size_t>(j)]) terms.push_back({c, 1.0});
        model.sos_rows.push_back(model.lp.add_row(terms, RowSense::equal, 1.0));
    }
    for (int i = 1; i <= inst.m; ++i) {
        terms.clear();
        for (int c : model.station_cols[static_cast<std::size_t>(i)])
            terms.push_back({c, static_cast<double>(inst.task_time[static_cast<std::size_t>(model.col_task[static_cast<std::size_t>(c)])])});
        model.knapsack_rows.push_back(model.lp.add_row(terms, RowSense::less_equal, inst.cap(i)));
    }
    for (int k = 1; k <= inst.m; ++k)
        for (const auto& e : inst.edges) {
            terms.clear();
            for (int i = 1; i <= k; ++i) {
                if (int c = model.column(i, e.from); c >= 0) terms.push_back({c, 1.0});
                if (int c = model.column(i, e.to); c >= 0) terms.push_back({c, -1.0});
            }
            model.precedence_rows.push_back(model.lp.add_row(terms, RowSense::greater_equal, 0.0));
        }
    model.lp.set_objective(station_index_objective(model).terms, ObjSense::minimize);
    return model;
}

CostScheme station_cost_vector(int n, int m) {
    CostScheme c;
    boost::multiprecision::cpp_int v = 1;
    for (int i = 0; i < m; ++i) {
        c.push_back(v);
        v = v * n + 1;
    }
    return c;
}

boost::multiprecision::cpp_int cost_of(const CostScheme& c, const Assignment& a) {
    boost::multiprecision::cpp_int total = 0;
    for (int s : a.station_of) total += c[static_cast<std::size_t>(s - 1)];
    return total;
}

Objective task_index_objective(const IpModel& model, int task, ObjSense sense) {
    Objective obj;
    obj.sense = sense;
    for (int c : model.task_cols[static_cast<std::size_t>(task)])
        obj.terms.push_back({c, static_cast<double>(model.col_station[static_cast<std::size_t>(c)])});
    return obj;
}

Objective station_index_objective(const IpModel& model) {
    Objective obj;
    for (int c = 0; c < model.num_cols(); ++c)
        obj.terms.push_back({c, static_cast<double>(model.col_station[static_cast<std::size_t>(c)])});
    return obj;
}

Objective station_cost_objective(const IpModel& model, const CostScheme& c) {
    Objective obj;
    for (int col = 0; col < model.num_cols(); ++col)
        obj.terms.push_back(
            {col, c[static_cast<std::size_t>(model.col_station[static_cast<std::size_t>(col)] - 1)].convert_to<double>()});
    return obj;
}

bool cost_scheme_fits_double(const CostScheme& c) {
    const boost::multiprecision::cpp_int limit = boost::multiprecision::cpp_int(1) << 53;
    return c.empty() || c.back() < limit;
}

std::vector<std::vector<double>> station_task_matrix(const IpModel& model, const std::vector<double>& x) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(model.m) + 1,
                                         std::vector<double>(static_cast<std::size_t>(model.n), 0.0));
    for (int c = 0; c < model.num_cols(); ++c)
        out[static_cast<std::size_t>(model.col_station[static_cast<std::size_t>(c)])]
           [static_cast<std::size_t>(model.col_task[static_cast<std::size_t>(c)])] = x[static_cast<std::size_t>(c)];
    return out;
}

std::optional<std::vector<double>> point_of(const IpModel& model, const Assignment& a) {
    std::vector<double> x(static_cast<std::size_t>(model.num_cols()), 0.0);
    for (int j = 0; j < model.n; ++j) {
        const int s = a.station_of[static_cast<std::size_t>(j)];
        if (s < 1 || s > model.m) return std::nullopt;
        const int c = model.column(s, j);
        if (c < 0) return std::nullopt;
        x[static_cast<std::size_t>(c)] = 1.0;
    }
    return x;
}

std::optional<Assignment> assignment_of(const IpModel& model, const std::vector<double>& x, double tol) {
    Assignment a;
    a.station_of.assign(static_cast<std::size_t>(model.n), 0);
    for (int c = 0; c < model.num_cols(); ++c) {
        const double v = x[static_cast<std::size_t>(c)];
        if (std::abs(v) <= tol) continue;
        if (std::abs(v - 1.0) > tol) return std::nullopt;
        auto& slot = a.station_of[static_cast<std::size_t>(model.col_task[static_cast<std::size_t>(c)])];
        if (slot != 0) return std::nullopt;
        slot = model.col_station[static_cast<std::size_t>(c)];
    }
    for (int s : a.station_of)
        if (s == 0) return std::nullopt;
    return a;
}

}  // namespace salb
