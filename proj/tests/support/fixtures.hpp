#pragma once

#include <string>

#include "seqident/diagram.hpp"
#include "seqident/model_file.hpp"
#include "seqident/prob.hpp"
#include "seqident/strategy.hpp"

namespace fixtures {

// U1 hidden: U1->A1, U1->L2, A1->L2, L2->A2, A1->Y, A2->Y.
seqident::StagedDiagram hidden_confounder();
// Same graph with U1 observed and renamed L1.
seqident::StagedDiagram observed_confounder();
// Binary CPTs for observed_confounder, all entries inside (0,1).
seqident::DiscreteModel observed_confounder_model();

// pa_s(A1) = {}, pa_s(A2) = {A1, L2} on the hidden-confounder graph.
seqident::StrategyParentSpec adaptive_spec(const seqident::StagedDiagram& d);

std::string data_path(const std::string& name);
seqident::ModelFile load(const std::string& name);

}  // namespace fixtures
