#pragma once

#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "tmkit/sim/sim.hpp"

namespace tmkit::testing {

// Moves a firing in front of the firing that produced one of its inputs.
inline std::optional<Trace> swap_with_producer(const Trace& t, std::mt19937& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t k = 0; k < t.firings.size(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      bool feeds = false;
      for (const auto& p : t.firings[j].produced) {
        for (const auto& c : t.firings[k].consumed) feeds |= p.id == c.id && p.to == t.firings[k].node;
      }
      for (const auto& r : t.firings[j].raised) {
        for (auto c : t.firings[k].controls) feeds |= r.id == c;
      }
      if (feeds) pairs.emplace_back(j, k);
    }
  }
  if (pairs.empty()) return std::nullopt;
  const auto [j, k] = pairs[std::uniform_int_distribution<std::size_t>(0, pairs.size() - 1)(rng)];
  Trace out = t;
  std::swap(out.firings[j], out.firings[k]);
  for (std::size_t s = 0; s < out.firings.size(); ++s) out.firings[s].step = s + 1;
  return out;
}

}  // namespace tmkit::testing
