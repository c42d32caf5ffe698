#include "dro/transport.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace dro {

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms,
                                           Eigen::VectorXd weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty() || weights_.size() != static_cast<Eigen::Index>(atoms_.size())) {
    throw std::invalid_argument("DiscreteDistribution: atom/weight size mismatch");
  }
  if (weights_.minCoeff() < 0.0) {
    throw std::invalid_argument("DiscreteDistribution: negative weight");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteDistribution: weights must sum to 1");
  }
  for (const Atom& a : atoms_) {
    if (a.x.size() != atoms_.front().x.size()) {
      throw std::invalid_argument("DiscreteDistribution: mixed feature dimensions");
    }
  }
}

DiscreteDistribution DiscreteDistribution::uniform(std::vector<Atom> atoms) {
  const auto n = static_cast<Eigen::Index>(atoms.size());
  return DiscreteDistribution(std::move(atoms),
                              Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

namespace {

struct Cell {
  int i, j;
  bool operator<(const Cell& o) const { return i != o.i ? i < o.i : j < o.j; }
  bool operator==(const Cell& o) const { return i == o.i && j == o.j; }
};

// Recomputes basic flows from exact marginals by repeatedly eliminating a
// leaf of the basis tree. Returns false if some flow is materially negative.
bool flows_from_tree(const std::vector<Cell>& basis, Eigen::VectorXd supply,
                     Eigen::VectorXd demand, std::vector<double>& flows, double tol) {
  const int nb = static_cast<int>(basis.size());
  flows.assign(nb, 0.0);
  std::vector<int> row_deg(supply.size(), 0), col_deg(demand.size(), 0);
  std::vector<bool> done(nb, false);
  for (const Cell& c : basis) {
    ++row_deg[c.i];
    ++col_deg[c.j];
  }
  for (int pass = 0; pass < nb; ++pass) {
    int pick = -1;
    for (int k = 0; k < nb; ++k) {
      if (done[k]) continue;
      if (row_deg[basis[k].i] == 1 || col_deg[basis[k].j] == 1) {
        pick = k;
        break;
      }
    }
    if (pick < 0) return false;  // not a forest
    const Cell c = basis[pick];
    const double f = row_deg[c.i] == 1 ? supply(c.i) : demand(c.j);
    flows[pick] = f;
    supply(c.i) -= f;
    demand(c.j) -= f;
    --row_deg[c.i];
    --col_deg[c.j];
    done[pick] = true;
  }
  for (double& f : flows) {
    if (f < -tol) return false;
    if (f < 0) f = 0.0;
  }
  return true;
}

// Transportation simplex over a finite cost block. Marginals are assumed
// balanced; a tiny lexicographic perturbation keeps pivots nondegenerate and
// is removed from the reported flows.
void solve_block(const Eigen::MatrixXd& cost, const Eigen::VectorXd& supply,
                 const Eigen::VectorXd& demand, std::vector<Cell>& basis,
                 std::vector<double>& flows) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());

  const double total = supply.sum();
  const double eps0 = std::max(total, 1.0) * 1e-9 / (m * (m + 1) / 2 + 1);
  Eigen::VectorXd ps = supply, pd = demand;
  for (int i = 0; i < m; ++i) ps(i) += (i + 1) * eps0;
  pd(n - 1) += m * (m + 1) / 2 * eps0;

  // Northwest-corner start.
  basis.clear();
  std::vector<double> pflow;
  {
    int i = 0, j = 0;
    double ra = ps(0), rb = pd(0);
    while (true) {
      const double t = std::min(ra, rb);
      basis.push_back({i, j});
      pflow.push_back(t);
      ra -= t;
      rb -= t;
      if (i == m - 1 && j == n - 1) break;
      if ((ra <= rb && i < m - 1) || j == n - 1) {
        ++i;
        ra = ps(i);
      } else {
        ++j;
        rb = pd(j);
      }
    }
  }

  std::vector<double> u(m), v(n);
  std::vector<char> u_set(m), v_set(n);
  std::vector<std::vector<int>> row_cells(m), col_cells(n);

  const long max_pivots = 20000L * (m + n);
  for (long pivot = 0;; ++pivot) {
    if (pivot > max_pivots) {
      throw std::runtime_error("ot_discrepancy: simplex exceeded pivot cap");
    }
    // Potentials from the basis tree.
    for (int i = 0; i < m; ++i) row_cells[i].clear();
    for (int j = 0; j < n; ++j) col_cells[j].clear();
    for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
      row_cells[basis[k].i].push_back(k);
      col_cells[basis[k].j].push_back(k);
    }
    std::fill(u_set.begin(), u_set.end(), 0);
    std::fill(v_set.begin(), v_set.end(), 0);
    u[0] = 0.0;
    u_set[0] = 1;
    std::vector<int> node_stack;  // rows as-is, columns offset by m
    node_stack.push_back(0);
    while (!node_stack.empty()) {
      const int node = node_stack.back();
      node_stack.pop_back();
      if (node < m) {
        for (int k : row_cells[node]) {
          const int j = basis[k].j;
          if (!v_set[j]) {
            v[j] = cost(node, j) - u[node];
            v_set[j] = 1;
            node_stack.push_back(m + j);
          }
        }
      } else {
        const int j = node - m;
        for (int k : col_cells[j]) {
          const int i = basis[k].i;
          if (!u_set[i]) {
            u[i] = cost(i, j) - v[j];
            u_set[i] = 1;
            node_stack.push_back(i);
          }
        }
      }
    }

    // Entering cell: most negative reduced cost, lexicographic on ties.
    Cell enter{-1, -1};
    double best_red = -1e-10 * std::max(1.0, cost.cwiseAbs().maxCoeff());
    std::vector<char> is_basic(m * n, 0);
    for (const Cell& c : basis) is_basic[c.i * n + c.j] = 1;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        if (is_basic[i * n + j]) continue;
        const double red = cost(i, j) - u[i] - v[j];
        if (red < best_red) {
          best_red = red;
          enter = {i, j};
        }
      }
    }
    if (enter.i < 0) break;  // all reduced costs nonnegative: optimal

    // Cycle: unique path from row enter.i to col enter.j through the tree.
    std::vector<int> parent_cell(m + n, -1);
    std::vector<char> seen(m + n, 0);
    std::vector<int> bfs = {enter.i};
    seen[enter.i] = 1;
    for (size_t h = 0; h < bfs.size(); ++h) {
      const int node = bfs[h];
      const auto& cells = node < m ? row_cells[node] : col_cells[node - m];
      for (int k : cells) {
        const int next = node < m ? m + basis[k].j : basis[k].i;
        if (!seen[next]) {
          seen[next] = 1;
          parent_cell[next] = k;
          bfs.push_back(next);
        }
      }
    }
    // Walk back from col enter.j; cells alternate minus/plus starting minus.
    std::vector<int> cycle_cells;
    int node = m + enter.j;
    while (node != enter.i) {
      const int k = parent_cell[node];
      cycle_cells.push_back(k);
      const Cell& c = basis[k];
      node = node == m + c.j ? c.i : m + c.j;
    }
    double theta = std::numeric_limits<double>::infinity();
    int leave_pos = -1;
    for (size_t h = 0; h < cycle_cells.size(); h += 2) {  // minus positions
      const int k = cycle_cells[h];
      if (pflow[k] < theta - 1e-15 ||
          (std::abs(pflow[k] - theta) <= 1e-15 && leave_pos >= 0 &&
           basis[k] < basis[cycle_cells[leave_pos]])) {
        theta = pflow[k];
        leave_pos = static_cast<int>(h);
      }
    }
    for (size_t h = 0; h < cycle_cells.size(); ++h) {
      pflow[cycle_cells[h]] += (h % 2 == 0) ? -theta : theta;
    }
    const int leave_cell = cycle_cells[leave_pos];
    basis[leave_cell] = enter;
    pflow[leave_cell] = theta;
  }

  if (!flows_from_tree(basis, supply, demand, flows, 1e-7 * std::max(total, 1.0))) {
    throw std::runtime_error("ot_discrepancy: degenerate basis recovery failed");
  }
}

std::map<double, double> label_masses(const DiscreteDistribution& d) {
  std::map<double, double> m;
  for (int i = 0; i < d.size(); ++i) m[d.atoms()[i].y] += d.weights()(i);
  return m;
}

}  // namespace

TransportPlan ot_discrepancy(const CostFunction& c, const DiscreteDistribution& p,
                             const DiscreteDistribution& q) {
  TransportPlan out;
  out.plan = Eigen::MatrixXd::Zero(p.size(), q.size());

  const auto pm = label_masses(p);
  const auto qm = label_masses(q);
  const double mass_tol = 1e-9;
  bool feasible = pm.size() == qm.size();
  if (feasible) {
    for (const auto& [label, mass] : pm) {
      const auto it = qm.find(label);
      if (it == qm.end() || std::abs(it->second - mass) > mass_tol) {
        feasible = false;
        break;
      }
    }
  }
  if (!feasible) {
    out.value = kInfCost;
    out.label_infeasible = true;
    out.note = "per-label masses differ: no finite-cost coupling exists";
    return out;
  }

  double value = 0.0;
  for (const auto& [label, mass] : pm) {
    if (mass <= mass_tol) continue;
    std::vector<int> rows, cols;
    for (int i = 0; i < p.size(); ++i)
      if (p.atoms()[i].y == label) rows.push_back(i);
    for (int j = 0; j < q.size(); ++j)
      if (q.atoms()[j].y == label) cols.push_back(j);

    const int m = static_cast<int>(rows.size());
    const int n = static_cast<int>(cols.size());
    Eigen::VectorXd supply(m), demand(n);
    for (int a = 0; a < m; ++a) supply(a) = p.weights()(rows[a]);
    for (int b = 0; b < n; ++b) demand(b) = q.weights()(cols[b]);
    demand *= supply.sum() / demand.sum();  // absorb the sub-tolerance mass drift

    Eigen::MatrixXd cost(m, n);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < n; ++b)
        cost(a, b) = c.feature_cost(p.atoms()[rows[a]].x, q.atoms()[cols[b]].x);

    std::vector<Cell> basis;
    std::vector<double> flows;
    solve_block(cost, supply, demand, basis, flows);
    for (size_t k = 0; k < basis.size(); ++k) {
      out.plan(rows[basis[k].i], cols[basis[k].j]) += flows[k];
      value += flows[k] * cost(basis[k].i, basis[k].j);
    }
  }
  out.value = value;
  return out;
}

double ot_brute_force(const CostFunction& c, const DiscreteDistribution& p,
                      const DiscreteDistribution& q) {
  const int m = p.size(), n = q.size();
  if (m > 5 || n > 5) {
    throw std::invalid_argument("ot_brute_force: supports must have <= 5 atoms");
  }
  Eigen::MatrixXd cost(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) cost(i, j) = c(p.atoms()[i], q.atoms()[j]);

  const int cells = m * n;
  const int basis_size = m + n - 1;
  std::vector<int> pick(basis_size);
  std::iota(pick.begin(), pick.end(), 0);
  double best = kInfCost;

  // Enumerate all cell subsets of basis size; spanning trees of the bipartite
  // support graph are exactly the bases of the transportation polytope.
  while (true) {
    std::vector<int> parent(m + n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    bool tree = true;
    for (int k : pick) {
      const int ra = find(k / n), rb = find(m + k % n);
      if (ra == rb) {
        tree = false;
        break;
      }
      parent[ra] = rb;
    }
    if (tree) {
      std::vector<Cell> basis;
      basis.reserve(basis_size);
      for (int k : pick) basis.push_back({k / n, k % n});
      std::vector<double> flows;
      if (flows_from_tree(basis, p.weights(), q.weights(), flows, 1e-12)) {
        double value = 0.0;
        for (int k = 0; k < basis_size; ++k) {
          if (flows[k] > 0.0) value += flows[k] * cost(basis[k].i, basis[k].j);
        }
        best = std::min(best, value);
      }
    }
    // next combination
    int pos = basis_size - 1;
    while (pos >= 0 && pick[pos] == cells - basis_size + pos) --pos;
    if (pos < 0) break;
    ++pick[pos];
    for (int h = pos + 1; h < basis_size; ++h) pick[h] = pick[h - 1] + 1;
  }
  return best;
}

}  // namespace dro
