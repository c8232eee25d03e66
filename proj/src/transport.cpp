#include "rigkit/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rigkit/error.hpp"

namespace rigkit {

namespace {

// A basic arc of the transportation simplex.  The basis always forms a
// spanning tree over the n supply and m demand nodes.
struct BasicArc {
    int i;
    int j;
    double flow;
};

constexpr double kReducedCostTol = 1e-12;

}  // namespace

TransportPlan solve_ot(const Matrix& cost, const std::vector<double>& row_mass,
                       const std::vector<double>& col_mass) {
    const int n = cost.rows;
    const int m = cost.cols;
    if (n == 0 || m == 0) throw DataError("solve_ot: empty problem");
    if (static_cast<int>(row_mass.size()) != n || static_cast<int>(col_mass.size()) != m)
        throw DataError("solve_ot: mass vector length differs from cost shape");

    double total_row = 0.0, total_col = 0.0;
    for (double a : row_mass) {
        if (!(a > 0.0) || !std::isfinite(a)) throw DataError("solve_ot: masses must be positive");
        total_row += a;
    }
    for (double b : col_mass) {
        if (!(b > 0.0) || !std::isfinite(b)) throw DataError("solve_ot: masses must be positive");
        total_col += b;
    }
    if (std::abs(total_row - total_col) > 1e-6)
        throw DataError("solve_ot: infeasible marginals, mass totals differ");
    for (double c : cost.data)
        if (!std::isfinite(c) || c < 0.0) throw DataError("solve_ot: costs must be finite and >= 0");

    // Northwest-corner initial basic feasible solution: exactly n+m-1
    // basic arcs (some possibly with zero flow) forming a spanning tree.
    std::vector<BasicArc> basis;
    basis.reserve(static_cast<size_t>(n + m - 1));
    {
        std::vector<double> r = row_mass;
        std::vector<double> d = col_mass;
        int i = 0, j = 0;
        while (true) {
            double f = std::min(r[static_cast<size_t>(i)], d[static_cast<size_t>(j)]);
            basis.push_back({i, j, f});
            r[static_cast<size_t>(i)] -= f;
            d[static_cast<size_t>(j)] -= f;
            if (i == n - 1 && j == m - 1) break;
            if (r[static_cast<size_t>(i)] <= 0.0 && i < n - 1) ++i;
            else ++j;
        }
    }

    // Node ids: supplies 0..n-1, demands n..n+m-1.
    const int nodes = n + m;
    std::vector<std::vector<int>> adjacency(static_cast<size_t>(nodes));
    auto rebuild_adjacency = [&] {
        for (auto& list : adjacency) list.clear();
        for (size_t a = 0; a < basis.size(); ++a) {
            adjacency[static_cast<size_t>(basis[a].i)].push_back(static_cast<int>(a));
            adjacency[static_cast<size_t>(n + basis[a].j)].push_back(static_cast<int>(a));
        }
    };

    std::vector<double> u(static_cast<size_t>(n));
    std::vector<double> v(static_cast<size_t>(m));
    std::vector<int> parent_arc(static_cast<size_t>(nodes));
    std::vector<int> parent_node(static_cast<size_t>(nodes));
    std::vector<int> order(static_cast<size_t>(nodes));

    const long max_pivots = 2000L * (n + m) + 100000L;
    long pivots = 0;

    while (true) {
        if (++pivots > max_pivots) throw DataError("solve_ot: pivot limit exceeded");

        // Duals from the basis tree, rooted at supply 0 with u[0] = 0:
        // every basic arc satisfies u[i] + v[j] = cost[i][j].
        rebuild_adjacency();
        std::fill(parent_arc.begin(), parent_arc.end(), -1);
        int head = 0, tail = 0;
        order[0] = 0;
        tail = 1;
        std::vector<bool> seen(static_cast<size_t>(nodes), false);
        seen[0] = true;
        u[0] = 0.0;
        while (head < tail) {
            int node = order[static_cast<size_t>(head++)];
            for (int a : adjacency[static_cast<size_t>(node)]) {
                const BasicArc& arc = basis[static_cast<size_t>(a)];
                int other = (node == arc.i) ? n + arc.j : arc.i;
                if (seen[static_cast<size_t>(other)]) continue;
                seen[static_cast<size_t>(other)] = true;
                if (other >= n) v[static_cast<size_t>(arc.j)] = cost.at(arc.i, arc.j) - u[static_cast<size_t>(arc.i)];
                else u[static_cast<size_t>(arc.i)] = cost.at(arc.i, arc.j) - v[static_cast<size_t>(arc.j)];
                parent_arc[static_cast<size_t>(other)] = a;
                parent_node[static_cast<size_t>(other)] = node;
                order[static_cast<size_t>(tail++)] = other;
            }
        }

        // Entering arc: first (row-major) nonbasic cell with negative
        // reduced cost.  Bland's rule, part one.
        int enter_i = -1, enter_j = -1;
        for (int i = 0; i < n && enter_i < 0; ++i) {
            for (int j = 0; j < m; ++j) {
                if (cost.at(i, j) - u[static_cast<size_t>(i)] - v[static_cast<size_t>(j)] < -kReducedCostTol) {
                    enter_i = i;
                    enter_j = j;
                    break;
                }
            }
        }
        if (enter_i < 0) break;  // optimal

        // The unique tree path from supply enter_i to demand n+enter_j
        // closes a cycle with the entering arc.  Arcs at even positions
        // along the path lose flow when the entering arc gains.
        std::vector<int> path_arcs;
        {
            // Walk both endpoints to the root, then splice.
            auto walk_to_root = [&](int node) {
                std::vector<int> chain_nodes{node};
                while (parent_arc[static_cast<size_t>(node)] >= 0) {
                    node = parent_node[static_cast<size_t>(node)];
                    chain_nodes.push_back(node);
                }
                return chain_nodes;
            };
            std::vector<int> from_i = walk_to_root(enter_i);
            std::vector<int> from_j = walk_to_root(n + enter_j);
            // Trim the common suffix above the lowest common ancestor.
            size_t ci = from_i.size(), cj = from_j.size();
            while (ci > 1 && cj > 1 && from_i[ci - 2] == from_j[cj - 2]) {
                --ci;
                --cj;
            }
            std::vector<int> path_nodes(from_i.begin(), from_i.begin() + static_cast<long>(ci));
            for (size_t t = cj - 1; t-- > 0;) path_nodes.push_back(from_j[t]);
            for (size_t t = 0; t + 1 < path_nodes.size(); ++t) {
                int a = path_nodes[t], b = path_nodes[t + 1];
                int arc = (parent_node[static_cast<size_t>(a)] == b &&
                           parent_arc[static_cast<size_t>(a)] >= 0)
                              ? parent_arc[static_cast<size_t>(a)]
                              : parent_arc[static_cast<size_t>(b)];
                path_arcs.push_back(arc);
            }
        }

        // Ratio test over the losing arcs; ties resolved by smallest cell
        // index.  Bland's rule, part two.
        double theta = std::numeric_limits<double>::infinity();
        int leave_pos = -1;
        long leave_key = 0;
        for (size_t t = 0; t < path_arcs.size(); t += 2) {
            const BasicArc& arc = basis[static_cast<size_t>(path_arcs[t])];
            long key = static_cast<long>(arc.i) * m + arc.j;
            if (arc.flow < theta || (arc.flow == theta && key < leave_key)) {
                theta = arc.flow;
                leave_pos = static_cast<int>(t);
                leave_key = key;
            }
        }
        if (leave_pos < 0) throw DataError("solve_ot: malformed pivot cycle");

        for (size_t t = 0; t < path_arcs.size(); ++t) {
            BasicArc& arc = basis[static_cast<size_t>(path_arcs[t])];
            arc.flow += (t % 2 == 0) ? -theta : theta;
        }
        BasicArc& replaced = basis[static_cast<size_t>(path_arcs[static_cast<size_t>(leave_pos)])];
        replaced = {enter_i, enter_j, theta};
    }

    TransportPlan plan;
    plan.coupling = Matrix(n, m);
    plan.row_mass = row_mass;
    plan.col_mass = col_mass;
    for (const BasicArc& arc : basis) {
        double f = std::max(arc.flow, 0.0);  // degenerate arcs may carry -0 or tiny noise
        plan.coupling.at(arc.i, arc.j) += f;
    }
    double objective = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) objective += plan.coupling.at(i, j) * cost.at(i, j);
    plan.objective = objective;
    return plan;
}

}  // namespace rigkit
