// Independent brute-force references used by the unit tests. Nothing here
// calls the library's cluster or enumeration code.
#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "rcfield/model.hpp"

namespace oracle {

using rcfield::ModelSpec;

/// Component label per vertex by breadth-first search over open edges.
inline std::vector<int> bfs_labels(int n, const std::vector<std::pair<int, int>>& open) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto [u, v] : open) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  for (int s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    label[static_cast<std::size_t>(s)] = s;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int w : adj[static_cast<std::size_t>(u)]) {
        if (label[static_cast<std::size_t>(w)] < 0) {
          label[static_cast<std::size_t>(w)] = s;
          q.push(w);
        }
      }
    }
  }
  return label;
}

/// Normalized free random-cluster law on the inner bonds, computed by
/// summing the joint spin/edge weight over every inner coloring.
inline std::vector<double> free_edge_law_by_spins(const ModelSpec& spec) {
  const auto& r = spec.geometry();
  const int n = r.num_inner();
  const int ne = r.num_inner_bonds();
  const int q = spec.q();
  const auto w = spec.weights();
  std::size_t states = 1;
  for (int i = 0; i < n; ++i) states *= static_cast<std::size_t>(q);
  std::vector<double> out(std::size_t{1} << ne, 0.0);
  std::vector<int> sigma(static_cast<std::size_t>(n));
  for (std::uint64_t mask = 0; mask < out.size(); ++mask) {
    double edge = 1.0;
    for (int e = 0; e < ne; ++e) edge *= ((mask >> e) & 1u) ? w.p[static_cast<std::size_t>(e)] : 1.0 - w.p[static_cast<std::size_t>(e)];
    double total = 0.0;
    for (std::size_t idx = 0; idx < states; ++idx) {
      std::size_t rest = idx;
      for (int i = 0; i < n; ++i) {
        sigma[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::size_t>(q));
        rest /= static_cast<std::size_t>(q);
      }
      bool ok = true;
      for (int e = 0; e < ne && ok; ++e) {
        const auto& ed = r.graph().edge(e);
        if (((mask >> e) & 1u) && sigma[static_cast<std::size_t>(ed.u)] != sigma[static_cast<std::size_t>(ed.v)]) ok = false;
      }
      if (!ok) continue;
      double field = 0.0;
      for (int i = 0; i < n; ++i) field += spec.field.at(static_cast<std::size_t>(i), sigma[static_cast<std::size_t>(i)]);
      total += std::exp(spec.beta * field);
    }
    out[mask] = edge * total;
  }
  double z = 0.0;
  for (double v : out) z += v;
  for (double& v : out) v /= z;
  return out;
}

/// Normalized wired-m law on all bonds by summing over inner colorings with
/// every boundary vertex colored m.
inline std::vector<double> wired_edge_law_by_spins(const ModelSpec& spec, int m) {
  const auto& r = spec.geometry();
  const int n = r.num_inner();
  const int nv = r.num_vertices();
  const int ne = r.num_all_bonds();
  const int q = spec.q();
  const auto w = spec.weights();
  std::size_t states = 1;
  for (int i = 0; i < n; ++i) states *= static_cast<std::size_t>(q);
  std::vector<double> out(std::size_t{1} << ne, 0.0);
  std::vector<int> sigma(static_cast<std::size_t>(nv), m);
  for (std::uint64_t mask = 0; mask < out.size(); ++mask) {
    double edge = 1.0;
    for (int e = 0; e < ne; ++e) edge *= ((mask >> e) & 1u) ? w.p[static_cast<std::size_t>(e)] : 1.0 - w.p[static_cast<std::size_t>(e)];
    double total = 0.0;
    for (std::size_t idx = 0; idx < states; ++idx) {
      std::size_t rest = idx;
      for (int i = 0; i < n; ++i) {
        sigma[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::size_t>(q));
        rest /= static_cast<std::size_t>(q);
      }
      bool ok = true;
      for (int e = 0; e < ne && ok; ++e) {
        const auto& ed = r.graph().edge(e);
        if (((mask >> e) & 1u) && sigma[static_cast<std::size_t>(ed.u)] != sigma[static_cast<std::size_t>(ed.v)]) ok = false;
      }
      if (!ok) continue;
      double field = 0.0;
      for (int i = 0; i < n; ++i) field += spec.field.at(static_cast<std::size_t>(i), sigma[static_cast<std::size_t>(i)]);
      total += std::exp(spec.beta * field);
    }
    out[mask] = edge * total;
  }
  double z = 0.0;
  for (double v : out) z += v;
  for (double& v : out) v /= z;
  return out;
}

/// Free law with general color constants: clusters found by BFS, each
/// summed over its colors with weight q_p exp(beta sum h).
inline std::vector<double> free_edge_law_by_clusters(const ModelSpec& spec) {
  const auto& r = spec.geometry();
  const int n = r.num_inner();
  const int ne = r.num_inner_bonds();
  const auto w = spec.weights();
  std::vector<double> out(std::size_t{1} << ne, 0.0);
  for (std::uint64_t mask = 0; mask < out.size(); ++mask) {
    std::vector<std::pair<int, int>> open;
    double weight = 1.0;
    for (int e = 0; e < ne; ++e) {
      if ((mask >> e) & 1u) {
        open.emplace_back(r.graph().edge(e).u, r.graph().edge(e).v);
        weight *= w.p[static_cast<std::size_t>(e)];
      } else {
        weight *= 1.0 - w.p[static_cast<std::size_t>(e)];
      }
    }
    const auto label = bfs_labels(n, open);
    for (int root = 0; root < n; ++root) {
      if (label[static_cast<std::size_t>(root)] != root) continue;
      double theta = 0.0;
      for (int p = 0; p < spec.q(); ++p) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          if (label[static_cast<std::size_t>(i)] == root) s += spec.field.at(static_cast<std::size_t>(i), p);
        theta += spec.field.qp(p) * std::exp(spec.beta * s);
      }
      weight *= theta;
    }
    out[mask] = weight;
  }
  double z = 0.0;
  for (double v : out) z += v;
  for (double& v : out) v /= z;
  return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return a.size() == b.size() ? m : INFINITY;
}

}  // namespace oracle
