#include "rcfield/corpus.hpp"

#include <stdexcept>

namespace rcfield {

namespace {

FiniteGraph plain_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<Vertex> vs;
  for (int i = 0; i < n; ++i) vs.push_back(Vertex{i, {}});
  std::vector<Edge> es;
  for (auto [u, v] : edges) es.push_back(Edge{u, v});
  return FiniteGraph(std::move(vs), std::move(es));
}

/// Grid graph with coordinates and no boundary.
FiniteGraph grid_graph(int rows, int cols) {
  std::vector<Vertex> vs;
  std::vector<Edge> es;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) vs.push_back(Vertex{r * cols + c, {c, r}});
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int i = r * cols + c;
      if (c + 1 < cols) es.push_back(Edge{i, i + 1});
      if (r + 1 < rows) es.push_back(Edge{i, i + cols});
    }
  }
  return FiniteGraph(std::move(vs), std::move(es));
}

CorpusGraph entry(std::string name, Region r) { return CorpusGraph{std::move(name), share(std::move(r))}; }

}  // namespace

std::vector<CorpusGraph> corpus() {
  std::vector<CorpusGraph> out;
  out.push_back(entry("single_vertex", Region::from_graph(plain_graph(1, {}))));
  out.push_back(entry("single_edge", Region::from_graph(plain_graph(2, {{0, 1}}))));
  out.push_back(entry("path3", Region::from_graph(plain_graph(3, {{0, 1}, {1, 2}}))));
  out.push_back(entry("triangle", Region::from_graph(plain_graph(3, {{0, 1}, {1, 2}, {0, 2}}))));
  out.push_back(entry("star4", Region::from_graph(plain_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}))));
  out.push_back(entry("cycle4", Region::from_graph(plain_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}))));
  out.push_back(entry("box2x2", Region::from_graph(grid_graph(2, 2))));
  out.push_back(entry("box2x3", Region::from_graph(grid_graph(2, 3))));
  return out;
}

std::vector<CorpusGraph> wired_corpus() {
  std::vector<CorpusGraph> out;
  const int end[] = {2};
  out.push_back(entry("path3_wired", Region::from_graph(plain_graph(3, {{0, 1}, {1, 2}}), end)));
  const int tip[] = {2};
  out.push_back(entry("triangle_wired", Region::from_graph(plain_graph(3, {{0, 1}, {1, 2}, {0, 2}}), tip)));
  const int leaves[] = {1, 2, 3, 4};
  out.push_back(entry("star4_wired", Region::from_graph(plain_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}), leaves)));
  const int s12[] = {1, 2};
  out.push_back(entry("box1x2_wired", make_lattice_box(2, s12)));
  const int s22[] = {2, 2};
  out.push_back(entry("box2x2_wired", make_lattice_box(2, s22)));
  return out;
}

CorpusGraph corpus_graph(const std::string& name) {
  for (auto& g : corpus())
    if (g.name == name) return g;
  for (auto& g : wired_corpus())
    if (g.name == name) return g;
  throw std::invalid_argument("unknown corpus graph '" + name + "'");
}

FieldSpec random_field(int q, std::size_t sites, std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> h(-bound, bound);
  std::vector<double> values(sites * static_cast<std::size_t>(q));
  for (auto& v : values) v = h(rng);
  return FieldSpec(q, sites, std::move(values));
}

ModelSpec random_model(std::shared_ptr<const Region> region, int q, std::mt19937_64& rng, const DrawRanges& ranges) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double beta = ranges.beta_max * (1.0 - unit(rng));
  std::uniform_real_distribution<double> j(0.0, ranges.coupling_max);
  CouplingConstants c;
  for (int e = 0; e < region->num_all_bonds(); ++e) c.values.push_back(j(rng));
  FieldSpec f = random_field(q, static_cast<std::size_t>(region->num_vertices()), rng, ranges.field_bound);
  return ModelSpec(std::move(region), beta, std::move(c), std::move(f));
}

FieldSpec random_common_max_field(int q, std::size_t sites, std::mt19937_64& rng, double bound) {
  FieldSpec f = random_field(q, sites, rng, bound);
  std::uniform_int_distribution<int> pick(0, q - 1);
  const int m = pick(rng);
  for (std::size_t i = 0; i < sites; ++i) {
    int best = 0;
    for (int p = 1; p < q; ++p)
      if (f.at(i, p) > f.at(i, best)) best = p;
    std::swap(f.at(i, best), f.at(i, m));
  }
  return f;
}

std::pair<FieldSpec, FieldSpec> random_ordered_fields(int q, std::size_t sites, std::mt19937_64& rng, double bound) {
  FieldSpec high = random_common_max_field(q, sites, rng, bound);
  std::uniform_real_distribution<double> shift(-bound, bound);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> low;
  for (std::size_t i = 0; i < sites; ++i) {
    const double c = shift(rng);
    const double lambda = 1.0 - unit(rng);
    for (int p = 0; p < q; ++p) low.push_back(c + lambda * high.at(i, p));
  }
  return {FieldSpec(q, sites, std::move(low)), std::move(high)};
}

}  // namespace rcfield
