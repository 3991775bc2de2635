#include "rcfield/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rcfield {

ModelSpec::ModelSpec(std::shared_ptr<const Region> r, double b, CouplingConstants c, FieldSpec f)
    : region(std::move(r)), beta(b), couplings(std::move(c)), field(std::move(f)) {
  if (!region) throw std::invalid_argument("model has no region");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and >= 0");
  if (static_cast<int>(couplings.size()) != region->num_all_bonds()) {
    throw std::invalid_argument("expected " + std::to_string(region->num_all_bonds()) + " coupling constants, got " +
                                std::to_string(couplings.size()));
  }
  for (double j : couplings.values) {
    if (!(j >= 0.0) || !std::isfinite(j)) throw std::invalid_argument("coupling constants must be finite and >= 0");
  }
  if (static_cast<int>(field.num_sites()) != region->num_vertices()) {
    throw std::invalid_argument("field covers " + std::to_string(field.num_sites()) + " sites, region has " +
                                std::to_string(region->num_vertices()));
  }
}

ModelSpec ModelSpec::with_beta(double b) const { return ModelSpec(region, b, couplings, field); }
ModelSpec ModelSpec::with_field(FieldSpec f) const { return ModelSpec(region, beta, couplings, std::move(f)); }
ModelSpec ModelSpec::with_couplings(CouplingConstants c) const { return ModelSpec(region, beta, std::move(c), field); }

}  // namespace rcfield
