#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ranges>
#include <span>
#include <string>
#include <vector>

#include "seqident/cpt.hpp"
#include "seqident/diagram.hpp"

namespace seqident {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

// A (possibly stochastic) rule per action: a kernel over the action's states
// for each configuration of pa_s(A_i).
class Strategy {
 public:
  Strategy() = default;

  const StrategyParentSpec& spec() const noexcept { return spec_; }
  int n_stages() const noexcept { return static_cast<int>(kernels_.size()); }
  int action_var(int stage) const { return actions_.at(static_cast<std::size_t>(stage - 1)); }
  // Kernel of A_i as a Cpt whose parents are pa_s(A_i).
  const Cpt& kernel_table(int stage) const { return kernels_.at(static_cast<std::size_t>(stage - 1)); }
  // True iff every row is a point mass.
  bool deterministic() const noexcept { return deterministic_; }

  bool operator==(const Strategy& other) const {
    return spec_ == other.spec_ && actions_ == other.actions_ && kernels_ == other.kernels_;
  }

 private:
  friend Strategy make_stochastic(const StagedDiagram&, std::span<const int>, const StrategyParentSpec&,
                                  std::vector<std::vector<double>>);

  StrategyParentSpec spec_;
  std::vector<int> actions_;
  std::vector<Cpt> kernels_;
  bool deterministic_ = false;
};

// `cards` holds the state count of every diagram variable; entries for
// variables a strategy never reads may be zero.

// Constant action per stage (pa_s empty). Throws StateOutOfRange.
Strategy make_unconditional(const StagedDiagram& d, std::span<const int> cards, std::span<const int> values);

// Per stage, a map from pa_s configuration (values in pa_s order) to action
// state. Throws MissingConfiguration, StateOutOfRange.
Strategy make_deterministic(const StagedDiagram& d, std::span<const int> cards, const StrategyParentSpec& spec,
                            const std::vector<std::map<std::vector<int>, int>>& tables);

using DecisionRule = std::function<int(int stage, std::span<const int> history)>;
Strategy make_deterministic(const StagedDiagram& d, std::span<const int> cards, const StrategyParentSpec& spec,
                            const DecisionRule& rule);

// Per stage, the kernel rows flattened in lexicographic configuration order.
// Throws ShapeMismatch, RowNotNormalized.
Strategy make_stochastic(const StagedDiagram& d, std::span<const int> cards, const StrategyParentSpec& spec,
                         std::vector<std::vector<double>> kernels);

// Row of A_i's kernel for a pa_s(A_i) configuration. Throws
// MissingConfiguration when the history is incomplete or out of range.
std::span<const double> kernel(const Strategy& s, std::span<const int> cards, int stage,
                               std::span<const int> history);

// All deterministic strategies for a parent spec, in lexicographic order of
// the concatenated choice tables (A_1's first row most significant).
class DeterministicStrategies {
 public:
  std::uint64_t count() const noexcept { return count_; }
  Strategy at(std::uint64_t index) const;
  // Position of a deterministic strategy with this spec in the enumeration.
  std::uint64_t index_of(const Strategy& s) const;

  auto strategies() const {
    return std::views::iota(std::uint64_t{0}, count_) |
           std::views::transform([this](std::uint64_t k) { return at(k); });
  }

 private:
  friend DeterministicStrategies enumerate_deterministic(const StagedDiagram&, std::span<const int>,
                                                         const StrategyParentSpec&, std::uint64_t);

  const StagedDiagram* diagram_ = nullptr;
  std::vector<int> cards_;
  StrategyParentSpec spec_;
  // One digit per (stage, row); radix is the action's state count.
  std::vector<int> radix_;
  std::vector<std::size_t> stage_offset_;
  std::uint64_t count_ = 0;
};

// The returned object refers to `d`, which must outlive it. Throws
// EnumerationTooLarge when the count exceeds `cap`.
DeterministicStrategies enumerate_deterministic(const StagedDiagram& d, std::span<const int> cards,
                                                const StrategyParentSpec& spec,
                                                std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace seqident
