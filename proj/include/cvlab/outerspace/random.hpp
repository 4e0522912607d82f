#pragma once

#include <random>
#include <vector>

#include "cvlab/freegroup/whitehead.hpp"
#include "cvlab/outerspace/marked_graph.hpp"

namespace cvlab {

/// Positive lengths with integer numerators in [1, max_weight], scaled to volume 1.
template <class Rng>
std::vector<Rational> random_lengths(Rng& rng, int count, int max_weight = 20) {
  std::uniform_int_distribution<int> w(1, max_weight);
  std::vector<Rational> out;
  Rational total = 0;
  for (int i = 0; i < count; ++i) {
    out.emplace_back(w(rng));
    total += out.back();
  }
  for (auto& x : out) x /= total;
  return out;
}

/// Product of `moves` uniformly chosen Whitehead automorphisms.
template <class Rng>
Automorphism random_whitehead_product(Rng& rng, int rank, int moves) {
  const auto& all = whitehead_moves(rank);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  auto phi = Automorphism::identity(rank);
  for (int i = 0; i < moves; ++i) phi = all[pick(rng)].automorphism * phi;
  return phi;
}

/// Random topology from the catalog, random lengths, marking twisted by a
/// product of up to `max_twist` Whitehead moves.
template <class Rng>
MarkedGraph random_marked_graph(Rng& rng, const std::vector<MarkedGraph>& catalog, int max_twist = 3,
                                int max_weight = 20) {
  std::uniform_int_distribution<std::size_t> pick(0, catalog.size() - 1);
  const MarkedGraph& base = catalog[pick(rng)];
  std::uniform_int_distribution<int> twist(0, max_twist);
  const auto g = base.with_lengths(random_lengths(rng, base.edge_count(), max_weight));
  return g.act(random_whitehead_product(rng, base.rank(), twist(rng)));
}

}  // namespace cvlab
