#pragma once

#include <memory>

#include "rcfield/fields.hpp"
#include "rcfield/graph.hpp"

namespace rcfield {

/// Everything a measure is built from. Couplings are indexed by the
/// region's ambient edges; the field covers every ambient vertex.
struct ModelSpec {
  std::shared_ptr<const Region> region;
  double beta = 0.0;
  CouplingConstants couplings;
  FieldSpec field;

  ModelSpec() = default;
  ModelSpec(std::shared_ptr<const Region> region, double beta, CouplingConstants couplings, FieldSpec field);

  int q() const { return field.q(); }
  const Region& geometry() const { return *region; }
  EdgeWeights weights() const { return edge_weights(couplings, beta, q()); }

  ModelSpec with_beta(double b) const;
  ModelSpec with_field(FieldSpec f) const;
  ModelSpec with_couplings(CouplingConstants c) const;
};

inline std::shared_ptr<const Region> share(Region r) { return std::make_shared<const Region>(std::move(r)); }

}  // namespace rcfield
