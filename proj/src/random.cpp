#include "seqident/random.hpp"

#include <algorithm>
#include <string>

namespace seqident {

namespace {

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::vector<double> random_row(Rng& rng, int card, double floor) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> row(static_cast<std::size_t>(card));
  double sum = 0.0;
  for (auto& p : row) {
    p = u(rng);
    sum += p;
  }
  for (auto& p : row) p /= sum;
  return row;
}

Cpt random_cpt(Rng& rng, std::vector<int> parents, std::span<const int> cards, int card, double floor) {
  Cpt cpt{std::move(parents), card, {}};
  const std::size_t rows = row_count(cpt, cards);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = random_row(rng, card, floor);
    cpt.probs.insert(cpt.probs.end(), row.begin(), row.end());
  }
  return cpt;
}

}  // namespace

StagedDiagram random_staged_diagram(Rng& rng, const RandomDiagramOptions& options) {
  StagedDiagram d;
  const int max_stages = std::max(1, std::min(options.max_stages, options.max_nodes - 1));
  d.n_stages = std::uniform_int_distribution<int>(1, max_stages)(rng);
  // Nodes still free after reserving the actions and Y.
  int budget = options.max_nodes - d.n_stages - 1;
  for (int i = 1; i <= d.n_stages; ++i) {
    const std::string stage = std::to_string(i);
    std::vector<Variable> block;
    if (budget > 0 && coin(rng, options.hidden_prob)) {
      block.push_back({"U" + stage, VarKind::hidden, i});
      --budget;
    }
    for (const char* suffix : {"", "b"}) {
      if (budget == 0 || !coin(rng, options.covariate_prob)) break;
      block.push_back({"L" + stage + suffix, VarKind::covariate, i});
      --budget;
    }
    std::shuffle(block.begin(), block.end(), rng);
    d.vars.insert(d.vars.end(), block.begin(), block.end());
    d.vars.push_back({"A" + std::to_string(i), VarKind::action, i});
  }
  d.vars.push_back({"Y", VarKind::outcome, d.n_stages + 1});

  const int n = d.size();
  for (int to = 0; to < n; ++to) {
    for (int from = 0; from < to; ++from) {
      const bool forced = options.last_action_to_outcome && to == n - 1 && from == d.action(d.n_stages);
      if (forced || coin(rng, options.edge_prob)) d.edges.push_back({from, to, false});
    }
  }
  return d;
}

Dag random_dag(Rng& rng, int n, double edge_prob) {
  std::vector<std::string> labels;
  for (int v = 0; v < n; ++v) labels.push_back("X" + std::to_string(v));
  std::vector<Arc> arcs;
  for (int to = 0; to < n; ++to) {
    for (int from = 0; from < to; ++from) {
      if (coin(rng, edge_prob)) arcs.emplace_back(from, to);
    }
  }
  return Dag::from_arcs(labels, arcs);
}

DiscreteModel random_model(Rng& rng, const StagedDiagram& d, int max_card, double floor) {
  DiscreteModel m;
  std::uniform_int_distribution<int> card(2, std::max(2, max_card));
  for (int v = 0; v < d.size(); ++v) m.cards.push_back(card(rng));
  for (int v = 0; v < d.size(); ++v) {
    m.cpts.push_back(random_cpt(rng, d.parents(v), m.cards, m.cards[static_cast<std::size_t>(v)], floor));
  }
  return m;
}

DiscreteModel random_dag_model(Rng& rng, const Dag& g, int max_card, double floor) {
  DiscreteModel m;
  std::uniform_int_distribution<int> card(2, std::max(2, max_card));
  for (int v = 0; v < g.size(); ++v) m.cards.push_back(card(rng));
  for (int v = 0; v < g.size(); ++v) {
    m.cpts.push_back(random_cpt(rng, g.parents(v).to_vector(), m.cards, m.cards[static_cast<std::size_t>(v)], floor));
  }
  return m;
}

JointTable dag_joint(const DiscreteModel& m) {
  std::vector<const Cpt*> factors;
  for (const auto& cpt : m.cpts) factors.push_back(&cpt);
  return product_joint(m.cards, factors);
}

StrategyParentSpec random_spec(Rng& rng, const StagedDiagram& d) {
  StrategyParentSpec spec = StrategyParentSpec::full_history(d);
  for (auto& pa : spec.parents) {
    std::erase_if(pa, [&](int) { return coin(rng, 0.5); });
  }
  return spec;
}

Strategy random_deterministic_strategy(Rng& rng, const StagedDiagram& d, std::span<const int> cards,
                                       const StrategyParentSpec& spec) {
  std::vector<std::vector<double>> kernels;
  for (int i = 1; i <= d.n_stages; ++i) {
    const int card = cards[static_cast<std::size_t>(d.action(i))];
    const Cpt shape{spec.of(i), card, {}};
    const std::size_t rows = row_count(shape, cards);
    std::vector<double> table(rows * static_cast<std::size_t>(card), 0.0);
    std::uniform_int_distribution<int> pick(0, card - 1);
    for (std::size_t r = 0; r < rows; ++r) table[r * static_cast<std::size_t>(card) + static_cast<std::size_t>(pick(rng))] = 1.0;
    kernels.push_back(std::move(table));
  }
  return make_stochastic(d, cards, spec, std::move(kernels));
}

Strategy random_stochastic_strategy(Rng& rng, const StagedDiagram& d, std::span<const int> cards,
                                    const StrategyParentSpec& spec, double floor) {
  std::vector<std::vector<double>> kernels;
  for (int i = 1; i <= d.n_stages; ++i) {
    const int card = cards[static_cast<std::size_t>(d.action(i))];
    kernels.push_back(random_cpt(rng, spec.of(i), cards, card, floor).probs);
  }
  return make_stochastic(d, cards, spec, std::move(kernels));
}

LossFunction random_loss(Rng& rng, int card) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LossFunction k;
  for (int y = 0; y < card; ++y) k.values.push_back(u(rng));
  return k;
}

}  // namespace seqident
