#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rcfield/model.hpp"

namespace rcfield {

/// Small named graph used by the exhaustive checks.
struct CorpusGraph {
  std::string name;
  std::shared_ptr<const Region> region;
};

/// Boundary-free regions: single_vertex, single_edge, path3, triangle,
/// star4, cycle4, box2x2, box2x3.
std::vector<CorpusGraph> corpus();

/// Regions with a designated boundary: path3 with one end on the boundary,
/// triangle with one boundary vertex, star4 with its leaves on the
/// boundary, and the 1x2 and 2x2 lattice boxes with their outer layer.
std::vector<CorpusGraph> wired_corpus();

/// Looks a name up in both lists; throws std::invalid_argument if unknown.
CorpusGraph corpus_graph(const std::string& name);

struct DrawRanges {
  double beta_max = 2.0;
  double coupling_max = 2.0;
  double field_bound = 2.0;
};

/// beta uniform in (0, beta_max], couplings uniform in [0, coupling_max],
/// field values uniform in [-field_bound, field_bound] per site and color,
/// unit q_p.
ModelSpec random_model(std::shared_ptr<const Region> region, int q, std::mt19937_64& rng, const DrawRanges& ranges = {});

/// Random field with the same shape, drawn like random_model's.
FieldSpec random_field(int q, std::size_t sites, std::mt19937_64& rng, double bound = 2.0);

/// Random field whose per-site maximum always sits on one randomly chosen
/// color, so the intersection of the maximal-color sets is nonempty.
FieldSpec random_common_max_field(int q, std::size_t sites, std::mt19937_64& rng, double bound = 2.0);

/// Random pair h below h' in the field order: h' from random_common_max_field
/// and h_i = c_i + lambda_i h'_i with lambda_i in (0, 1].
std::pair<FieldSpec, FieldSpec> random_ordered_fields(int q, std::size_t sites, std::mt19937_64& rng,
                                                      double bound = 2.0);

}  // namespace rcfield
