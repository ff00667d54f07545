#pragma once

#include <random>

#include "gaitrm/props.hpp"

namespace gaitrm::testing {

/// Random guard AST of depth at most max_depth (a literal has depth 1).
inline Guard random_guard(std::mt19937_64& rng, int max_depth) {
  std::uniform_int_distribution<int> prop(0, 3);
  if (max_depth <= 1) return Guard::literal(static_cast<Prop>(prop(rng)));
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: return Guard::literal(static_cast<Prop>(prop(rng)));
    case 1: return Guard::negation(random_guard(rng, max_depth - 1));
    case 2: return Guard::conjunction(random_guard(rng, max_depth - 1), random_guard(rng, max_depth - 1));
    default: return Guard::disjunction(random_guard(rng, max_depth - 1), random_guard(rng, max_depth - 1));
  }
}

}  // namespace gaitrm::testing
