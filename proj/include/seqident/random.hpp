#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "seqident/diagram.hpp"
#include "seqident/graph.hpp"
#include "seqident/prob.hpp"
#include "seqident/strategy.hpp"

namespace seqident {

using Rng = std::mt19937_64;

struct RandomDiagramOptions {
  int max_stages = 3;
  int max_nodes = 8;
  // Per stage, chance of a hidden node and of each extra covariate.
  double hidden_prob = 0.4;
  double covariate_prob = 0.5;
  double edge_prob = 0.4;
  // Always include A_N -> Y. With a full-history spec this makes every
  // covariate an ancestor of Y in D_0.
  bool last_action_to_outcome = false;
};

// A valid staged diagram: stages 1..N each hold hidden nodes and covariates
// (interleaved at random) followed by the action, then Y.
StagedDiagram random_staged_diagram(Rng& rng, const RandomDiagramOptions& options = {});

// Random DAG over labels X0..X{n-1}; arcs only go from lower to higher index.
Dag random_dag(Rng& rng, int n, double edge_prob);

// Dirichlet-style rows bounded away from 0 and 1 by `floor` before
// normalisation. State counts drawn uniformly from [2, max_card].
DiscreteModel random_model(Rng& rng, const StagedDiagram& d, int max_card = 2, double floor = 0.05);
// Same, for an arbitrary DAG (cpts indexed by node, parents from the DAG).
DiscreteModel random_dag_model(Rng& rng, const Dag& g, int max_card = 3, double floor = 0.05);
JointTable dag_joint(const DiscreteModel& m);

// Random subset of the full history for every action.
StrategyParentSpec random_spec(Rng& rng, const StagedDiagram& d);

Strategy random_deterministic_strategy(Rng& rng, const StagedDiagram& d, std::span<const int> cards,
                                       const StrategyParentSpec& spec);
Strategy random_stochastic_strategy(Rng& rng, const StagedDiagram& d, std::span<const int> cards,
                                    const StrategyParentSpec& spec, double floor = 0.0);

LossFunction random_loss(Rng& rng, int card);

}  // namespace seqident
