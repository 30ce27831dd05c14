#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>

#include "byztopo/connectivity.hpp"
#include "byztopo/topology.hpp"

namespace byztopo {

enum class GeneratorKind { Complete, Cycle, Harary, RandomKConnected };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Complete;
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

inline NodeId numbered(std::size_t i) { return NodeId(std::to_string(i)); }

inline Topology complete_graph(std::size_t n) {
  if (n < 2) throw GraphError("complete(n) needs n >= 2");
  Topology t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) t.add_edge(numbered(i), numbered(j));
  return t;
}

inline Topology cycle_graph(std::size_t n) {
  if (n < 3) throw GraphError("cycle(n) needs n >= 3");
  Topology t;
  for (std::size_t i = 0; i < n; ++i) t.add_edge(numbered(i), numbered((i + 1) % n));
  return t;
}

/// Harary graph H(k,n): the k-connected graph on n vertices with the fewest
/// edges, ceil(kn/2).
inline Topology harary_graph(std::size_t k, std::size_t n) {
  if (k < 2 || k >= n) throw GraphError("harary(k,n) needs 2 <= k < n");
  Topology t;
  const std::size_t r = k / 2;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 1; d <= r; ++d) t.add_edge(numbered(i), numbered((i + d) % n));
  if (k % 2 == 1) {
    if (n % 2 == 0) {
      for (std::size_t i = 0; i < n / 2; ++i) t.add_edge(numbered(i), numbered(i + n / 2));
    } else {
      // vertex 0 gets one extra edge; the rest pair across the "diameter"
      for (std::size_t i = 0; i <= (n - 1) / 2; ++i)
        t.add_edge(numbered(i), numbered((i + (n + 1) / 2) % n));
    }
  }
  return t;
}

namespace detail {
// 53-bit uniform double from a 64-bit engine; portable across standard
// libraries, unlike std::uniform_real_distribution.
inline double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
}  // namespace detail

/// Seeded rejection sampler for graphs with vertex connectivity >= k.
///
/// Attempt i draws G(n, p_i) with p_i = min(1, k/(n-1) + 0.05 i) and keeps
/// the first draw that is k-connected. The schedule reaches p = 1 (the
/// complete graph) after finitely many attempts, so any k < n terminates.
inline Topology random_k_connected(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (n < 2) throw GraphError("random_kconn needs n >= 2");
  if (k >= n) throw GraphError("random_kconn(" + std::to_string(n) + ", " + std::to_string(k) +
                               ") is unsatisfiable: connectivity of an n-node graph is at most n-1");
  std::mt19937_64 rng(seed);
  const double base = static_cast<double>(k) / static_cast<double>(n - 1);
  for (std::size_t attempt = 0;; ++attempt) {
    const double p = std::min(1.0, base + 0.05 * static_cast<double>(attempt));
    Topology t;
    for (std::size_t i = 0; i < n; ++i) t.add_node(numbered(i));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (detail::unit_double(rng) < p) t.add_edge(numbered(i), numbered(j));
    if (vertex_connectivity(t) >= k) return t;
  }
}

inline Topology generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::Complete: return complete_graph(spec.n);
    case GeneratorKind::Cycle: return cycle_graph(spec.n);
    case GeneratorKind::Harary: return harary_graph(spec.k, spec.n);
    case GeneratorKind::RandomKConnected: return random_k_connected(spec.n, spec.k, spec.seed);
  }
  throw GraphError("unknown generator kind");
}

}  // namespace byztopo
