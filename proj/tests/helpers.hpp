#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "rcfield/model.hpp"
#include "rcfield/rc_model.hpp"

namespace testing_support {

using namespace rcfield;

/// The big model's field and couplings carried over to a lattice region
/// nested inside it, matched by coordinates.
inline ModelSpec restrict_model(const ModelSpec& big, std::shared_ptr<const Region> small) {
  const FiniteGraph& bg = big.geometry().graph();
  const FiniteGraph& sg = small->graph();
  const int q = big.q();
  std::vector<double> values;
  for (int i = 0; i < sg.num_vertices(); ++i) {
    const auto at = bg.index_of_coords(sg.vertex(i).coords);
    if (!at) throw std::invalid_argument("region is not nested");
    for (int p = 0; p < q; ++p) values.push_back(big.field.at(static_cast<std::size_t>(*at), p));
  }
  CouplingConstants j;
  for (const Edge& e : sg.edges()) {
    const int u = *bg.index_of_coords(sg.vertex(e.u).coords);
    const int v = *bg.index_of_coords(sg.vertex(e.v).coords);
    double found = -1.0;
    for (const auto& [w, edge] : bg.incident(u)) {
      if (w == v) found = big.couplings[static_cast<std::size_t>(edge)];
    }
    if (found < 0) throw std::invalid_argument("bond missing from the big region");
    j.values.push_back(found);
  }
  return ModelSpec(small, big.beta, std::move(j),
                   FieldSpec(q, static_cast<std::size_t>(sg.num_vertices()), std::move(values), big.field.qp()));
}

/// Positive table over n edges with log-weights uniform in [-spread, spread].
inline WeightTable random_table(int n, std::mt19937_64& rng, double spread = 2.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<double> logw(std::size_t{1} << n);
  for (double& w : logw) w = u(rng);
  return WeightTable(static_cast<std::size_t>(n), std::move(logw));
}

/// Field in which every site ranks the colors in the same order, so the
/// last color in that order is maximal everywhere.
inline FieldSpec random_consistent_field(int q, std::size_t sites, std::mt19937_64& rng, double bound = 2.0) {
  std::uniform_real_distribution<double> u(-bound, bound);
  std::vector<int> order(static_cast<std::size_t>(q));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<double> values(sites * static_cast<std::size_t>(q));
  std::vector<double> v(static_cast<std::size_t>(q));
  for (std::size_t i = 0; i < sites; ++i) {
    for (double& x : v) x = u(rng);
    std::sort(v.begin(), v.end());
    for (int k = 0; k < q; ++k) values[i * static_cast<std::size_t>(q) + static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = v[static_cast<std::size_t>(k)];
  }
  return FieldSpec(q, sites, std::move(values));
}

inline WeightTable product_table(std::span<const double> p) {
  std::vector<double> w(std::size_t{1} << p.size(), 1.0);
  for (std::size_t m = 0; m < w.size(); ++m) {
    for (std::size_t e = 0; e < p.size(); ++e) w[m] *= (m >> e & 1) ? p[e] : 1.0 - p[e];
  }
  return WeightTable::from_weights(w);
}

}  // namespace testing_support
