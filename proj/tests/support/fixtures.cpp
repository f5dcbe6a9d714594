#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace seqident;

namespace fixtures {

namespace {

StagedDiagram confounded(bool observed) {
  StagedDiagram d;
  d.n_stages = 2;
  d.vars = {{observed ? "L1" : "U1", observed ? VarKind::covariate : VarKind::hidden, 1},
            {"A1", VarKind::action, 1},
            {"L2", VarKind::covariate, 2},
            {"A2", VarKind::action, 2},
            {"Y", VarKind::outcome, 3}};
  d.edges = {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {1, 4}, {3, 4}};
  return d;
}

}  // namespace

StagedDiagram hidden_confounder() { return confounded(false); }
StagedDiagram observed_confounder() { return confounded(true); }

DiscreteModel observed_confounder_model() {
  DiscreteModel m;
  m.cards = {2, 2, 2, 2, 2};
  m.cpts = {
      {{}, 2, {0.4, 0.6}},
      {{0}, 2, {0.7, 0.3, 0.2, 0.8}},
      {{0, 1}, 2, {0.8, 0.2, 0.5, 0.5, 0.4, 0.6, 0.1, 0.9}},
      {{2}, 2, {0.6, 0.4, 0.3, 0.7}},
      {{1, 3}, 2, {0.9, 0.1, 0.6, 0.4, 0.7, 0.3, 0.2, 0.8}},
  };
  return m;
}

StrategyParentSpec adaptive_spec(const StagedDiagram& d) {
  return {{{}, {d.index_of("A1"), d.index_of("L2")}}};
}

std::string data_path(const std::string& name) { return std::string(SEQIDENT_DATA_DIR) + "/" + name; }

ModelFile load(const std::string& name) {
  std::ifstream in(data_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::stringstream buf;
  buf << in.rdbuf();
  auto parsed = parse_model_file(buf.str());
  if (!parsed.ok()) throw std::runtime_error("fixture " + name + ": " + to_string(parsed.errors.front()));
  return std::move(*parsed.file);
}

}  // namespace fixtures
