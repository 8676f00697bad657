//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/graph_hash.h"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace hierflow {
namespace {
  std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t fold(std::uint64_t seed, const std::vector<std::uint64_t> &xs) {
    std::uint64_t h = hash_combine(seed, xs.size());
    for (std::uint64_t x: xs)
      h = hash_combine(h, x);
    return h;
  }
}  // namespace

std::uint64_t hash_bytes(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ mix64(seed);
  for (unsigned char c: bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ (mix64(value) + 0x9e3779b97f4a7c15ULL + (seed << 6)
                       + (seed >> 2)));
}

std::string wl_graph_hash(const std::vector<std::string> &node_labels,
                          const std::vector<LabeledEdge> &edges) {
  const int n = static_cast<int>(node_labels.size());
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (const LabeledEdge &e: edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n || e.u == e.v)
      throw std::invalid_argument("wl_graph_hash: invalid edge");
    adj[e.u].push_back({ e.v, e.type });
    adj[e.v].push_back({ e.u, e.type });
  }

  std::vector<std::uint64_t> labels(n);
  for (int i = 0; i < n; ++i) {
    std::vector<std::uint64_t> incident;
    for (auto [j, type]: adj[i])
      incident.push_back(static_cast<std::uint64_t>(type));
    std::sort(incident.begin(), incident.end());
    labels[i] = fold(hash_bytes(node_labels[i]), incident);
  }

  const int rounds = std::max(n, 1);
  std::vector<std::uint64_t> next(n);
  std::vector<std::uint64_t> msgs;
  for (int r = 0; r < rounds; ++r) {
    for (int i = 0; i < n; ++i) {
      msgs.clear();
      for (auto [j, type]: adj[i])
        msgs.push_back(hash_combine(static_cast<std::uint64_t>(type),
                                    labels[j]));
      std::sort(msgs.begin(), msgs.end());
      next[i] = fold(labels[i], msgs);
    }
    labels.swap(next);
  }

  std::sort(labels.begin(), labels.end());
  const std::uint64_t hi = fold(0x243f6a8885a308d3ULL, labels);
  const std::uint64_t lo = fold(0x13198a2e03707344ULL, labels);
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

}  // namespace hierflow
