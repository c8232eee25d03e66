#pragma once

#include <vector>

#include "rigkit/matrix.hpp"

namespace rigkit {

// Coupling between two discrete mass distributions.  Row i of the
// coupling ships row_mass[i], column j receives col_mass[j].
struct TransportPlan {
    Matrix coupling;
    std::vector<double> row_mass;
    std::vector<double> col_mass;
    // Total ground cost of the coupling, sum of coupling * cost.
    double objective = 0.0;
};

// Exact solution of the discrete transportation problem
//   minimize sum_ij plan[i][j] * cost[i][j]
//   subject to row sums = row_mass, column sums = col_mass, plan >= 0
// by the transportation simplex (a network-simplex specialization).
// Bland's pivoting rule keeps degenerate problems from cycling.
//
// Costs must be finite and nonnegative; masses positive with equal
// totals (tolerance 1e-6), normalized to sum 1 within 1e-9 by callers
// that care.  Marginals of the result hold within 1e-9.
TransportPlan solve_ot(const Matrix& cost, const std::vector<double>& row_mass,
                       const std::vector<double>& col_mass);

}  // namespace rigkit
