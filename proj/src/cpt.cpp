#include "seqident/cpt.hpp"

namespace seqident {

std::size_t row_count(const Cpt& cpt, std::span<const int> cards) {
  std::size_t rows = 1;
  for (int p : cpt.parents) rows *= static_cast<std::size_t>(cards[p]);
  return rows;
}

std::size_t row_of(const Cpt& cpt, std::span<const int> cards, std::span<const int> assignment) {
  std::size_t r = 0;
  for (int p : cpt.parents) r = r * static_cast<std::size_t>(cards[p]) + static_cast<std::size_t>(assignment[p]);
  return r;
}

}  // namespace seqident
