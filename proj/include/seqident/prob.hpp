#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seqident/cpt.hpp"
#include "seqident/diagram.hpp"
#include "seqident/strategy.hpp"

namespace seqident {

inline constexpr std::size_t kMaxJointCells = std::size_t{1} << 22;
inline constexpr double kEqualityTolerance = 1e-9;
inline constexpr double kDependenceTolerance = 1e-6;

// State counts and observational CPTs for every diagram variable, actions
// included (the observational policy). A CPT's parent list may be the full
// parent set or the set without inert parents.
struct DiscreteModel {
  std::vector<int> cards;
  std::vector<Cpt> cpts;

  bool operator==(const DiscreteModel&) const = default;
};

enum class ModelViolationKind { shape_mismatch, row_not_normalized, inert_parent_influence };

std::string_view to_string(ModelViolationKind kind) noexcept;

struct ModelViolation {
  ModelViolationKind kind;
  int var = -1;
  std::size_t row = 0;
  double sum = 0.0;
  std::string message;
};

std::vector<ModelViolation> validate_model(const DiscreteModel& m, const StagedDiagram& d);
// Throws ShapeMismatch or RowNotNormalized for the first violation.
void require_valid(const DiscreteModel& m, const StagedDiagram& d);

// Rewrites every CPT over the variable's full parent set in `d`, repeating
// rows across states of parents the original table ignored.
DiscreteModel lift_to_parents(const DiscreteModel& m, const StagedDiagram& d);

// Dense probability table over an ordered variable list, row-major (first
// variable slowest).
class JointTable {
 public:
  JointTable() = default;
  JointTable(std::vector<int> vars, std::vector<int> cards, std::vector<double> probs,
             std::optional<int> outcome = std::nullopt);

  const std::vector<int>& vars() const noexcept { return vars_; }
  const std::vector<int>& cards() const noexcept { return cards_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t index) const { return probs_[index]; }
  // Configuration given in table variable order.
  double at(std::span<const int> config) const;
  std::optional<std::size_t> position(int var) const;
  std::vector<int> decode(std::size_t index) const;
  std::optional<int> outcome() const noexcept { return outcome_; }

  bool operator==(const JointTable&) const = default;

 private:
  std::vector<int> vars_;
  std::vector<int> cards_;
  std::vector<double> probs_;
  std::optional<int> outcome_;
};

// Product of one factor per variable 0..n-1 (factors[v] is v's conditional
// table). Throws StateSpaceTooLarge.
JointTable product_joint(std::span<const int> cards, std::span<const Cpt* const> factors);

// p(·; o).
JointTable joint(const DiscreteModel& m, const StagedDiagram& d);
// p(·; s): each action CPT replaced by the strategy kernel.
JointTable joint(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s);
// p_i: actions A_j use observational CPTs for j <= i and strategy kernels for
// j > i. Throws StageOutOfRange.
JointTable mixed_joint_pi(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s, int stage);
// Joint over the diagram variables plus the regime indicator at index
// d.size() (state 0 observational, state 1 strategy), weighted by
// `strategy_weight`.
JointTable regime_mixture_joint(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s,
                                double strategy_weight = 0.5);

// Marginal over `keep`, in that order.
JointTable marginalize(const JointTable& j, std::span<const int> keep);

using Evidence = std::vector<std::pair<int, int>>;

// Distribution over `targets` given the evidence. Throws
// ZeroProbabilityEvidence.
JointTable condition(const JointTable& j, std::span<const int> targets, const Evidence& evidence);

struct LossFunction {
  std::vector<double> values;

  bool operator==(const LossFunction&) const = default;
};

// Σ_y k(y) p(y) over the table's outcome variable. Throws MissingOutcome.
double expectation(const JointTable& j, const LossFunction& k);

// max over positive-probability z of |p(x,y|z) - p(x|z)p(y|z)|.
double ci_deviation(const JointTable& j, std::span<const int> x, std::span<const int> y, std::span<const int> z);
bool ci_holds(const JointTable& j, std::span<const int> x, std::span<const int> y, std::span<const int> z,
              double tol);

struct PositivityIssue {
  int stage = 0;
  Evidence history;
  int action_state = 0;
};

struct PositivityReport {
  std::vector<PositivityIssue> violations;
  std::string note;

  bool ok() const noexcept { return violations.empty(); }
};

// Support inclusion: every (history, action) with positive probability under
// the strategy must have positive probability under the observational regime.
PositivityReport check_positivity(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s);

}  // namespace seqident
