#include "rcfield/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace rcfield {

FiniteGraph::FiniteGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  const int n = num_vertices();
  std::size_t dim = 0;
  for (int i = 0; i < n; ++i) {
    const Vertex& v = vertices_[static_cast<std::size_t>(i)];
    if (!id_index_.emplace(v.id, i).second) {
      throw std::invalid_argument("duplicate vertex id " + std::to_string(v.id));
    }
    if (v.has_coords()) {
      if (dim == 0) dim = v.coords.size();
      if (v.coords.size() != dim) {
        throw std::invalid_argument("vertex coordinates of mixed dimension");
      }
      if (!coord_index_.emplace(v.coords, i).second) {
        throw std::invalid_argument("duplicate coordinates at vertex id " + std::to_string(v.id));
      }
    }
  }
  adjacency_.assign(static_cast<std::size_t>(n), {});
  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    Edge& edge = edges_[e];
    if (edge.u < 0 || edge.v < 0 || edge.u >= n || edge.v >= n) {
      throw std::invalid_argument("edge endpoint is not a listed vertex");
    }
    if (edge.u == edge.v) throw std::invalid_argument("self-loop at vertex index " + std::to_string(edge.u));
    if (edge.u > edge.v) std::swap(edge.u, edge.v);
    if (!seen.emplace(edge.u, edge.v).second) {
      throw std::invalid_argument("duplicate edge {" + std::to_string(vertices_[edge.u].id) + "," +
                                  std::to_string(vertices_[edge.v].id) + "}");
    }
    adjacency_[static_cast<std::size_t>(edge.u)].emplace_back(edge.v, static_cast<int>(e));
    adjacency_[static_cast<std::size_t>(edge.v)].emplace_back(edge.u, static_cast<int>(e));
  }
}

std::optional<int> FiniteGraph::index_of_id(int id) const {
  if (auto it = id_index_.find(id); it != id_index_.end()) return it->second;
  return std::nullopt;
}

std::optional<int> FiniteGraph::index_of_coords(std::span<const int> coords) const {
  if (auto it = coord_index_.find(std::vector<int>(coords.begin(), coords.end())); it != coord_index_.end()) {
    return it->second;
  }
  return std::nullopt;
}

Region Region::from_graph(const FiniteGraph& graph, std::span<const int> boundary_ids) {
  const int n = graph.num_vertices();
  std::vector<std::uint8_t> on_boundary(static_cast<std::size_t>(n), 0);
  for (int id : boundary_ids) {
    auto idx = graph.index_of_id(id);
    if (!idx) throw std::invalid_argument("boundary id " + std::to_string(id) + " is not a vertex");
    on_boundary[static_cast<std::size_t>(*idx)] = 1;
  }
  std::vector<int> order;
  for (int i = 0; i < n; ++i)
    if (!on_boundary[static_cast<std::size_t>(i)]) order.push_back(i);
  const int num_inner = static_cast<int>(order.size());
  for (int i = 0; i < n; ++i)
    if (on_boundary[static_cast<std::size_t>(i)]) order.push_back(i);
  std::vector<int> new_index(static_cast<std::size_t>(n));
  std::vector<Vertex> vertices;
  for (int k = 0; k < n; ++k) {
    new_index[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;
    vertices.push_back(graph.vertex(order[static_cast<std::size_t>(k)]));
  }
  std::vector<Edge> inner_edges;
  std::vector<Edge> outer_edges;
  for (const Edge& e : graph.edges()) {
    Edge mapped{new_index[static_cast<std::size_t>(e.u)], new_index[static_cast<std::size_t>(e.v)]};
    if (mapped.u > mapped.v) std::swap(mapped.u, mapped.v);
    const bool u_in = mapped.u < num_inner;
    const bool v_in = mapped.v < num_inner;
    if (u_in && v_in) {
      inner_edges.push_back(mapped);
    } else if (u_in || v_in) {
      outer_edges.push_back(mapped);
    }
  }
  const int num_inner_bonds = static_cast<int>(inner_edges.size());
  inner_edges.insert(inner_edges.end(), outer_edges.begin(), outer_edges.end());
  return Region(FiniteGraph(std::move(vertices), std::move(inner_edges)), num_inner, num_inner_bonds);
}

namespace {
std::vector<int> iota_vector(int begin, int end) {
  std::vector<int> out(static_cast<std::size_t>(std::max(0, end - begin)));
  std::iota(out.begin(), out.end(), begin);
  return out;
}
}  // namespace

std::vector<int> Region::inner() const { return iota_vector(0, num_inner_); }
std::vector<int> Region::boundary() const { return iota_vector(num_inner_, num_vertices()); }
std::vector<int> Region::inner_bonds() const { return iota_vector(0, num_inner_bonds_); }
std::vector<int> Region::all_bonds() const { return iota_vector(0, num_all_bonds()); }
std::vector<int> Region::boundary_bonds() const { return iota_vector(num_inner_bonds_, num_all_bonds()); }

std::vector<int> Region::inner_boundary_layer() const {
  std::vector<int> layer;
  for (int i = 0; i < num_inner_; ++i) {
    for (auto [nb, e] : graph_.incident(i)) {
      if (!is_inner(nb)) {
        layer.push_back(i);
        break;
      }
    }
  }
  return layer;
}

bool Region::lattice_embedded() const {
  if (graph_.num_vertices() == 0) return false;
  return std::all_of(graph_.vertices().begin(), graph_.vertices().end(),
                     [](const Vertex& v) { return v.has_coords(); });
}

Region make_lattice_box(int dimension, std::span<const int> sides, std::span<const int> origin) {
  if (dimension < 1) throw std::invalid_argument("lattice dimension must be >= 1");
  if (static_cast<int>(sides.size()) != dimension) {
    throw std::invalid_argument("expected one side length per axis");
  }
  for (int s : sides) {
    if (s < 1) throw std::invalid_argument("box side lengths must be >= 1");
  }
  std::vector<int> base(static_cast<std::size_t>(dimension), 0);
  if (!origin.empty()) {
    if (static_cast<int>(origin.size()) != dimension) {
      throw std::invalid_argument("origin dimension does not match the box");
    }
    base.assign(origin.begin(), origin.end());
  }
  const auto d = static_cast<std::size_t>(dimension);

  std::vector<Vertex> vertices;
  std::map<std::vector<int>, int> index;
  std::vector<int> offset(d, 0);
  while (true) {
    std::vector<int> c(d);
    for (std::size_t a = 0; a < d; ++a) c[a] = base[a] + offset[a];
    const int idx = static_cast<int>(vertices.size());
    index.emplace(c, idx);
    vertices.push_back(Vertex{idx, c});
    std::size_t a = 0;
    while (a < d && ++offset[a] == sides[a]) offset[a++] = 0;
    if (a == d) break;
  }
  const int num_inner = static_cast<int>(vertices.size());

  std::vector<Edge> inner_edges;
  std::vector<std::pair<int, std::vector<int>>> outward;
  std::set<std::vector<int>> boundary_coords;
  for (int i = 0; i < num_inner; ++i) {
    const std::vector<int> c = vertices[static_cast<std::size_t>(i)].coords;
    for (std::size_t a = 0; a < d; ++a) {
      for (int step : {-1, +1}) {
        std::vector<int> nb = c;
        nb[a] += step;
        if (auto it = index.find(nb); it != index.end()) {
          if (step == +1) inner_edges.push_back(Edge{i, it->second});
        } else {
          boundary_coords.insert(nb);
          outward.emplace_back(i, nb);
        }
      }
    }
  }
  for (const auto& c : boundary_coords) {
    const int idx = static_cast<int>(vertices.size());
    index.emplace(c, idx);
    vertices.push_back(Vertex{idx, c});
  }
  std::vector<Edge> edges = inner_edges;
  for (const auto& [i, c] : outward) edges.push_back(Edge{i, index.at(c)});

  FiniteGraph graph(std::move(vertices), std::move(edges));
  std::vector<int> boundary_ids;
  for (int k = num_inner; k < graph.num_vertices(); ++k) boundary_ids.push_back(k);
  return Region::from_graph(graph, boundary_ids);
}

Region make_centered_box(int dimension, int side) {
  if (side < 1) throw std::invalid_argument("box side length must be >= 1");
  std::vector<int> sides(static_cast<std::size_t>(dimension), side);
  std::vector<int> origin(static_cast<std::size_t>(dimension), -((side - 1) / 2));
  return make_lattice_box(dimension, sides, origin);
}

EdgeConfig EdgeConfig::from_mask(std::uint64_t mask, std::size_t n) {
  EdgeConfig c;
  c.bits.resize(n);
  for (std::size_t e = 0; e < n; ++e) c.bits[e] = static_cast<std::uint8_t>((mask >> e) & 1u);
  return c;
}

EdgeConfig EdgeConfig::all(std::size_t n, bool open) {
  return EdgeConfig{std::vector<std::uint8_t>(n, open ? 1 : 0)};
}

std::uint64_t EdgeConfig::mask() const {
  if (bits.size() > 64) throw std::length_error("edge configuration too large for a bitmask");
  std::uint64_t m = 0;
  for (std::size_t e = 0; e < bits.size(); ++e)
    if (bits[e]) m |= std::uint64_t{1} << e;
  return m;
}

const std::vector<int>& ClusterDecomposition::cluster_of(int vertex) const {
  const int label = labels.at(static_cast<std::size_t>(vertex));
  auto it = std::lower_bound(clusters.begin(), clusters.end(), label,
                             [](const std::vector<int>& c, int l) { return c.front() < l; });
  return *it;
}

void UnionFind::reset(int n) {
  parent_.resize(static_cast<std::size_t>(n));
  std::iota(parent_.begin(), parent_.end(), 0);
  size_.assign(static_cast<std::size_t>(n), 1);
}

int UnionFind::find(int x) {
  auto idx = static_cast<std::size_t>(x);
  while (parent_[idx] != static_cast<int>(idx)) {
    parent_[idx] = parent_[static_cast<std::size_t>(parent_[idx])];
    idx = static_cast<std::size_t>(parent_[idx]);
  }
  return static_cast<int>(idx);
}

bool UnionFind::unite(int a, int b) {
  int ra = find(a);
  int rb = find(b);
  if (ra == rb) return false;
  if (size_[static_cast<std::size_t>(ra)] < size_[static_cast<std::size_t>(rb)]) std::swap(ra, rb);
  parent_[static_cast<std::size_t>(rb)] = ra;
  size_[static_cast<std::size_t>(ra)] += size_[static_cast<std::size_t>(rb)];
  return true;
}

ClusterDecomposition canonical_decomposition(UnionFind& uf, int n) {
  ClusterDecomposition dec;
  dec.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> root_label(static_cast<std::size_t>(uf.size()), -1);
  for (int i = 0; i < n; ++i) {
    const int r = uf.find(i);
    int& label = root_label[static_cast<std::size_t>(r)];
    if (label < 0) {
      label = i;
      dec.clusters.emplace_back();
    }
    dec.labels[static_cast<std::size_t>(i)] = label;
  }
  // Labels are first-seen indices, hence increasing in cluster creation order.
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int label = dec.labels[static_cast<std::size_t>(i)];
    if (slot[static_cast<std::size_t>(label)] < 0) slot[static_cast<std::size_t>(label)] = next++;
    dec.clusters[static_cast<std::size_t>(slot[static_cast<std::size_t>(label)])].push_back(i);
  }
  return dec;
}

ClusterDecomposition components(const Region& region, const EdgeConfig& omega, ComponentScope scope) {
  const bool inner_only = scope == ComponentScope::inner_only;
  const int expected = inner_only ? region.num_inner_bonds() : region.num_all_bonds();
  if (static_cast<int>(omega.size()) != expected) {
    throw std::invalid_argument("edge configuration covers " + std::to_string(omega.size()) +
                                " edges, scope requires " + std::to_string(expected));
  }
  const int n = inner_only ? region.num_inner() : region.num_vertices();
  UnionFind uf(n);
  for (int e = 0; e < expected; ++e) {
    if (omega.open(static_cast<std::size_t>(e))) {
      const Edge& edge = region.graph().edge(e);
      uf.unite(edge.u, edge.v);
    }
  }
  return canonical_decomposition(uf, n);
}

bool is_connected(const ClusterDecomposition& dec, int x, int y) {
  if (x < 0 || y < 0 || x >= static_cast<int>(dec.labels.size()) || y >= static_cast<int>(dec.labels.size())) {
    throw std::out_of_range("vertex outside the decomposition");
  }
  return dec.labels[static_cast<std::size_t>(x)] == dec.labels[static_cast<std::size_t>(y)];
}

}  // namespace rcfield
