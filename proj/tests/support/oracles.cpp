#include "oracles.hpp"

#include <deque>
#include <functional>
#include <map>

using namespace seqident;

namespace oracle {

namespace {

std::vector<std::vector<bool>> arc_matrix(const Dag& g) {
  const auto n = static_cast<std::size_t>(g.size());
  std::vector<std::vector<bool>> arc(n, std::vector<bool>(n, false));
  for (const auto& [from, to] : g.arcs()) arc[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)] = true;
  return arc;
}

std::vector<bool> descendants_or_self_in(const std::vector<std::vector<bool>>& arc, NodeSet z) {
  // has[v]: v or one of its descendants lies in z
  const std::size_t n = arc.size();
  std::vector<bool> has(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{v};
    seen[v] = true;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      if (z.contains(static_cast<int>(u))) has[v] = true;
      for (std::size_t w = 0; w < n; ++w) {
        if (arc[u][w] && !seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
  }
  return has;
}

}  // namespace

bool d_separated_paths(const Dag& g, NodeSet x, NodeSet y, NodeSet z) {
  const auto arc = arc_matrix(g);
  const auto has = descendants_or_self_in(arc, z);
  const std::size_t n = arc.size();
  std::vector<std::size_t> path;
  std::vector<bool> on_path(n, false);

  auto active = [&]() {
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
      const auto a = path[k - 1], m = path[k], b = path[k + 1];
      const bool collider = arc[a][m] && arc[b][m];
      if (collider ? !has[m] : z.contains(static_cast<int>(m))) return false;
    }
    return true;
  };

  std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
    if (path.size() > 1 && y.contains(static_cast<int>(u)) && active()) return true;
    for (std::size_t w = 0; w < n; ++w) {
      if ((arc[u][w] || arc[w][u]) && !on_path[w]) {
        path.push_back(w);
        on_path[w] = true;
        if (dfs(w)) return true;
        on_path[w] = false;
        path.pop_back();
      }
    }
    return false;
  };

  for (int s : x) {
    path = {static_cast<std::size_t>(s)};
    on_path.assign(n, false);
    on_path[static_cast<std::size_t>(s)] = true;
    if (dfs(static_cast<std::size_t>(s))) return false;
  }
  return true;
}

int shortest_moral_path(const Dag& g, NodeSet x, NodeSet y, NodeSet z) {
  const auto arc = arc_matrix(g);
  const std::size_t n = arc.size();
  std::vector<bool> keep(n, false);
  std::vector<std::size_t> stack;
  for (int v : x | y | z) {
    keep[static_cast<std::size_t>(v)] = true;
    stack.push_back(static_cast<std::size_t>(v));
  }
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (std::size_t p = 0; p < n; ++p) {
      if (arc[p][u] && !keep[p]) {
        keep[p] = true;
        stack.push_back(p);
      }
    }
  }
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (std::size_t c = 0; c < n; ++c) {
    if (!keep[c]) continue;
    for (std::size_t p = 0; p < n; ++p) {
      if (!keep[p] || !arc[p][c]) continue;
      adj[p][c] = adj[c][p] = true;
      for (std::size_t q = 0; q < n; ++q) {
        if (q != p && keep[q] && arc[q][c]) adj[p][q] = adj[q][p] = true;
      }
    }
  }
  std::vector<int> dist(n, -1);
  std::deque<std::size_t> queue;
  for (int v : x) {
    dist[static_cast<std::size_t>(v)] = 0;
    queue.push_back(static_cast<std::size_t>(v));
  }
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    if (y.contains(static_cast<int>(u))) return dist[u];
    for (std::size_t w = 0; w < n; ++w) {
      if (adj[u][w] && dist[w] < 0 && !z.contains(static_cast<int>(w))) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return -1;
}

double cpt_prob(const Cpt& cpt, const std::vector<int>& cards, const std::vector<int>& assignment, int value) {
  std::size_t row = 0;
  std::size_t stride = 1;
  for (std::size_t k = cpt.parents.size(); k-- > 0;) {
    const auto p = static_cast<std::size_t>(cpt.parents[k]);
    row += stride * static_cast<std::size_t>(assignment[p]);
    stride *= static_cast<std::size_t>(cards[p]);
  }
  return cpt.probs.at(row * static_cast<std::size_t>(cpt.card) + static_cast<std::size_t>(value));
}

std::vector<int> decode(std::size_t index, const std::vector<int>& cards) {
  std::vector<int> values(cards.size());
  for (std::size_t k = cards.size(); k-- > 0;) {
    values[k] = static_cast<int>(index % static_cast<std::size_t>(cards[k]));
    index /= static_cast<std::size_t>(cards[k]);
  }
  return values;
}

std::vector<double> brute_joint(const std::vector<int>& cards, const std::vector<Cpt>& factors) {
  std::size_t total = 1;
  for (int c : cards) total *= static_cast<std::size_t>(c);
  std::vector<double> out(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto a = decode(idx, cards);
    double p = 1.0;
    for (std::size_t v = 0; v < cards.size(); ++v) p *= cpt_prob(factors[v], cards, a, a[v]);
    out[idx] = p;
  }
  return out;
}

std::vector<Cpt> spliced_factors(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s,
                                 int observed_through) {
  std::vector<Cpt> factors = m.cpts;
  for (int i = observed_through + 1; i <= d.n_stages; ++i) {
    factors[static_cast<std::size_t>(d.action(i))] = s.kernel_table(i);
  }
  return factors;
}

double expected_loss(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s, const LossFunction& k) {
  const auto joint = brute_joint(m.cards, spliced_factors(m, d, s, 0));
  const auto y = static_cast<std::size_t>(d.outcome());
  double total = 0.0;
  for (std::size_t idx = 0; idx < joint.size(); ++idx) {
    total += joint[idx] * k.values[static_cast<std::size_t>(decode(idx, m.cards)[y])];
  }
  return total;
}

double g_formula(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s, const LossFunction& k) {
  const auto joint = brute_joint(m.cards, m.cpts);
  std::vector<int> observed;
  for (int v = 0; v < d.size(); ++v) {
    if (d.is_observed(v)) observed.push_back(v);
  }
  // prefix[len][values of the first len observed variables]
  std::vector<std::map<std::vector<int>, double>> prefix(observed.size() + 1);
  for (std::size_t idx = 0; idx < joint.size(); ++idx) {
    const auto a = decode(idx, m.cards);
    std::vector<int> key;
    prefix[0][key] += joint[idx];
    for (int v : observed) {
      key.push_back(a[static_cast<std::size_t>(v)]);
      prefix[key.size()][key] += joint[idx];
    }
  }
  std::vector<int> ocards;
  for (int v : observed) ocards.push_back(m.cards[static_cast<std::size_t>(v)]);
  std::size_t total = 1;
  for (int c : ocards) total *= static_cast<std::size_t>(c);

  double value = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto o = decode(idx, ocards);
    std::vector<int> full(static_cast<std::size_t>(d.size()), 0);
    for (std::size_t k2 = 0; k2 < observed.size(); ++k2) full[static_cast<std::size_t>(observed[k2])] = o[k2];
    double w = 1.0;
    for (std::size_t k2 = 0; k2 < observed.size() && w != 0.0; ++k2) {
      const int v = observed[k2];
      if (d.kind(v) == VarKind::action) {
        const int stage = d.vars[static_cast<std::size_t>(v)].stage;
        w *= cpt_prob(s.kernel_table(stage), m.cards, full, o[k2]);
      } else {
        const std::vector<int> before(o.begin(), o.begin() + static_cast<std::ptrdiff_t>(k2));
        const std::vector<int> through(o.begin(), o.begin() + static_cast<std::ptrdiff_t>(k2 + 1));
        const double den = prefix[k2][before];
        w = den > 0.0 ? w * prefix[k2 + 1][through] / den : 0.0;
      }
    }
    value += w * k.values[static_cast<std::size_t>(full[static_cast<std::size_t>(d.outcome())])];
  }
  return value;
}

}  // namespace oracle
