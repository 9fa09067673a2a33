#pragma once

#include <cstdint>
#include <vector>

#include "jpec/graph.hpp"

namespace jpec {

struct NegativeSampleSpec {
  double ratio = 1.0;  // negatives per competitor edge
  std::uint64_t seed = 0;
  // Draw only among nodes that have at least one competitor edge.
  bool restrict_to_labeled = true;
};

// round(ratio·|C|) distinct canonical non-competitor pairs with w = −1, drawn
// uniformly by rejection. Throws when the complement is too small or the
// attempt cap (100× target) is exhausted.
std::vector<LabeledPair> sample_negatives(const CompanyGraph& g, const NegativeSampleSpec& spec);

}  // namespace jpec
