#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "rigkit/error.hpp"
#include "rigkit/transport.hpp"

using namespace rigkit;

namespace {

void check_marginals(const TransportPlan& plan, const std::vector<double>& row_mass,
                     const std::vector<double>& col_mass) {
    const int n = plan.coupling.rows, m = plan.coupling.cols;
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
            CHECK(plan.coupling.at(i, j) >= 0.0);
            sum += plan.coupling.at(i, j);
        }
        CHECK(sum == doctest::Approx(row_mass[static_cast<size_t>(i)]).epsilon(1e-9));
    }
    for (int j = 0; j < m; ++j) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += plan.coupling.at(i, j);
        CHECK(sum == doctest::Approx(col_mass[static_cast<size_t>(j)]).epsilon(1e-9));
    }
}

// Minimum over all permutation couplings; optimal for square problems
// with uniform masses by Birkhoff's theorem.
double permutation_oracle(const Matrix& cost) {
    const int n = cost.rows;
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += cost.at(i, perm[static_cast<size_t>(i)]);
        best = std::min(best, total / n);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Exhaustive basis enumeration: every spanning tree of the bipartite
// graph gives one basic solution; feasible trees bound the optimum.
double tree_oracle(const Matrix& cost, const std::vector<double>& row_mass,
                   const std::vector<double>& col_mass) {
    const int n = cost.rows, m = cost.cols;
    const int arcs = n * m;
    const int basis_size = n + m - 1;
    double best = std::numeric_limits<double>::infinity();

    std::vector<int> pick(static_cast<size_t>(basis_size));
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        // Solve the flow on the candidate basis by leaf peeling.
        std::vector<double> need(static_cast<size_t>(n + m));
        for (int i = 0; i < n; ++i) need[static_cast<size_t>(i)] = row_mass[static_cast<size_t>(i)];
        for (int j = 0; j < m; ++j) need[static_cast<size_t>(n + j)] = col_mass[static_cast<size_t>(j)];
        std::vector<std::vector<int>> incident(static_cast<size_t>(n + m));
        for (const int arc : pick) {
            incident[static_cast<size_t>(arc / m)].push_back(arc);
            incident[static_cast<size_t>(n + arc % m)].push_back(arc);
        }
        std::vector<bool> arc_done(static_cast<size_t>(arcs), false);
        std::vector<double> flow(static_cast<size_t>(arcs), 0.0);
        bool ok = true;
        for (int round = 0; round < basis_size; ++round) {
            int leaf = -1, via = -1;
            for (int v = 0; v < n + m && leaf < 0; ++v) {
                int open = 0, last = -1;
                for (const int arc : incident[static_cast<size_t>(v)])
                    if (!arc_done[static_cast<size_t>(arc)]) {
                        ++open;
                        last = arc;
                    }
                if (open == 1) {
                    leaf = v;
                    via = last;
                }
            }
            if (leaf < 0) {
                ok = false;  // remaining arcs contain a cycle
                break;
            }
            const double f = need[static_cast<size_t>(leaf)];
            flow[static_cast<size_t>(via)] = f;
            need[static_cast<size_t>(leaf)] = 0.0;
            const int other = leaf < n ? n + via % m : via / m;
            need[static_cast<size_t>(other)] -= f;
            arc_done[static_cast<size_t>(via)] = true;
        }
        if (ok)
            for (const double f : flow)
                if (f < -1e-12) ok = false;
        if (ok) {
            double total = 0.0;
            for (int arc = 0; arc < arcs; ++arc)
                total += flow[static_cast<size_t>(arc)] * cost.at(arc / m, arc % m);
            best = std::min(best, total);
        }

        // Next combination of basis arcs.
        int pos = basis_size - 1;
        while (pos >= 0 && pick[static_cast<size_t>(pos)] == arcs - basis_size + pos) --pos;
        if (pos < 0) break;
        ++pick[static_cast<size_t>(pos)];
        for (int q = pos + 1; q < basis_size; ++q)
            pick[static_cast<size_t>(q)] = pick[static_cast<size_t>(q - 1)] + 1;
    }
    return best;
}

}  // namespace

TEST_CASE("solve_ot solves trivial shapes exactly") {
    Matrix one(1, 1);
    one.at(0, 0) = 3.0;
    const TransportPlan single = solve_ot(one, {1.0}, {1.0});
    CHECK(single.coupling.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(single.objective == doctest::Approx(3.0).epsilon(1e-12));

    // One supplier: the plan is forced to the column masses regardless
    // of cost.
    Matrix wide(1, 3);
    wide.at(0, 0) = 9.0;
    wide.at(0, 1) = 1.0;
    wide.at(0, 2) = 4.0;
    const std::vector<double> cols{0.2, 0.3, 0.5};
    const TransportPlan forced = solve_ot(wide, {1.0}, cols);
    for (int j = 0; j < 3; ++j)
        CHECK(forced.coupling.at(0, j) == doctest::Approx(cols[static_cast<size_t>(j)]).epsilon(1e-12));
    CHECK(forced.objective == doctest::Approx(0.2 * 9 + 0.3 * 1 + 0.5 * 4).epsilon(1e-12));
}

TEST_CASE("solve_ot finds the zero-cost diagonal") {
    const int n = 6;
    Matrix cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost.at(i, j) = i == j ? 0.0 : 1.0 + i + j;
    const std::vector<double> mass(n, 1.0 / n);
    const TransportPlan plan = solve_ot(cost, mass, mass);
    CHECK(plan.objective == doctest::Approx(0.0).epsilon(1e-12));
    for (int i = 0; i < n; ++i) CHECK(plan.coupling.at(i, i) == doctest::Approx(1.0 / n).epsilon(1e-9));
}

TEST_CASE("solve_ot matches the permutation oracle on uniform square problems") {
    Rng rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 5;
        Matrix cost(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost.at(i, j) = rng.next_double();
        const std::vector<double> mass(n, 1.0 / n);
        const TransportPlan plan = solve_ot(cost, mass, mass);
        CHECK(plan.objective == doctest::Approx(permutation_oracle(cost)).epsilon(1e-9));
        check_marginals(plan, mass, mass);
    }
}

TEST_CASE("solve_ot matches basis enumeration on rectangular problems") {
    Rng rng(52);
    const std::vector<std::pair<int, int>> shapes{{2, 3}, {3, 3}, {4, 3}, {2, 2}, {3, 5}};
    for (const auto& [n, m] : shapes) {
        for (int trial = 0; trial < 8; ++trial) {
            Matrix cost(n, m);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < m; ++j) cost.at(i, j) = rng.next_double() * 4.0;
            std::vector<double> rows(static_cast<size_t>(n)), cols(static_cast<size_t>(m));
            double rtot = 0.0, ctot = 0.0;
            for (double& r : rows) rtot += (r = rng.uniform(0.1, 1.0));
            for (double& c : cols) ctot += (c = rng.uniform(0.1, 1.0));
            for (double& r : rows) r /= rtot;
            for (double& c : cols) c /= ctot;
            const TransportPlan plan = solve_ot(cost, rows, cols);
            CHECK(plan.objective ==
                  doctest::Approx(tree_oracle(cost, rows, cols)).epsilon(1e-9));
            check_marginals(plan, rows, cols);
        }
    }
}

TEST_CASE("solve_ot survives degenerate ties without cycling") {
    // Identical costs everywhere: every feasible plan is optimal and the
    // pivoting must still terminate.
    Matrix cost(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) cost.at(i, j) = 1.0;
    const std::vector<double> mass(4, 0.25);
    const TransportPlan plan = solve_ot(cost, mass, mass);
    CHECK(plan.objective == doctest::Approx(1.0).epsilon(1e-9));
    check_marginals(plan, mass, mass);
}

TEST_CASE("solve_ot validates its inputs") {
    Matrix cost(2, 2);
    cost.at(0, 0) = cost.at(1, 1) = 0.0;
    cost.at(0, 1) = cost.at(1, 0) = 1.0;
    CHECK_THROWS_WITH_AS(solve_ot(Matrix(), {}, {}), doctest::Contains("empty"), DataError);
    CHECK_THROWS_WITH_AS(solve_ot(cost, {1.0}, {0.5, 0.5}), doctest::Contains("length"), DataError);
    CHECK_THROWS_WITH_AS(solve_ot(cost, {0.5, 0.5}, {0.0, 1.0}), doctest::Contains("positive"),
                         DataError);
    CHECK_THROWS_WITH_AS(solve_ot(cost, {0.5, 0.5}, {0.8, 0.8}), doctest::Contains("totals differ"),
                         DataError);
    cost.at(0, 0) = -0.5;
    CHECK_THROWS_AS(solve_ot(cost, {0.5, 0.5}, {0.5, 0.5}), DataError);
}
