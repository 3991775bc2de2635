#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rcfield {

struct Vertex {
  int id = 0;
  /// Lattice coordinates; empty when the vertex is not lattice-embedded.
  std::vector<int> coords;

  bool has_coords() const { return !coords.empty(); }
};

/// Unordered pair of vertex indices, stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;

  bool operator==(const Edge&) const = default;
};

class FiniteGraph {
 public:
  FiniteGraph() = default;
  /// Edges refer to vertex *indices*. Throws std::invalid_argument on
  /// self-loops, duplicate edges, out-of-range endpoints, or repeated
  /// ids/coordinates.
  FiniteGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const Vertex& vertex(int index) const { return vertices_.at(static_cast<std::size_t>(index)); }
  const Edge& edge(int index) const { return edges_.at(static_cast<std::size_t>(index)); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::optional<int> index_of_id(int id) const;
  std::optional<int> index_of_coords(std::span<const int> coords) const;

  /// (neighbor index, edge index) pairs per vertex.
  const std::vector<std::pair<int, int>>& incident(int index) const {
    return adjacency_.at(static_cast<std::size_t>(index));
  }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adjacency_;
  std::map<int, int> id_index_;
  std::map<std::vector<int>, int> coord_index_;
};

/// A finite volume V together with its outer vertex boundary and bond sets.
///
/// The ambient graph holds V followed by the boundary vertices, and the
/// bonds with at least one endpoint in V: first the inner bonds (both
/// endpoints in V), then the boundary bonds. Inner vertices therefore have
/// indices [0, num_inner) and the inner bond set is the edge prefix
/// [0, num_inner_bonds).
class Region {
 public:
  Region() = default;

  /// Builds a region from an arbitrary graph. Vertices listed in
  /// `boundary_ids` form the boundary; edges joining two boundary vertices
  /// are dropped.
  static Region from_graph(const FiniteGraph& graph, std::span<const int> boundary_ids = {});

  const FiniteGraph& graph() const { return graph_; }
  int num_inner() const { return num_inner_; }
  int num_boundary() const { return graph_.num_vertices() - num_inner_; }
  int num_vertices() const { return graph_.num_vertices(); }
  int num_inner_bonds() const { return num_inner_bonds_; }
  int num_all_bonds() const { return graph_.num_edges(); }
  int num_boundary_bonds() const { return num_all_bonds() - num_inner_bonds_; }

  bool is_inner(int vertex) const { return vertex < num_inner_; }
  bool is_inner_bond(int edge) const { return edge < num_inner_bonds_; }

  std::vector<int> inner() const;
  std::vector<int> boundary() const;
  std::vector<int> inner_bonds() const;
  std::vector<int> all_bonds() const;
  std::vector<int> boundary_bonds() const;

  /// Inner vertices with at least one neighbor in the boundary.
  std::vector<int> inner_boundary_layer() const;

  bool lattice_embedded() const;

 private:
  Region(FiniteGraph graph, int num_inner, int num_inner_bonds)
      : graph_(std::move(graph)), num_inner_(num_inner), num_inner_bonds_(num_inner_bonds) {}

  FiniteGraph graph_;
  int num_inner_ = 0;
  int num_inner_bonds_ = 0;
};

/// Box of `sides` vertices per axis in Z^d starting at `origin` (defaults
/// to the zero vector), with nearest-neighbor bonds. Vertex ids follow
/// the internal index order.
Region make_lattice_box(int dimension, std::span<const int> sides, std::span<const int> origin = {});

/// Box centered on the lattice origin: coordinates run over
/// [-(side-1)/2, side/2] per axis.
Region make_centered_box(int dimension, int side);

enum class ComponentScope { inner_only, inner_plus_boundary };

/// Per-edge occupation over a declared edge domain.
struct EdgeConfig {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  bool open(std::size_t e) const { return bits[e] != 0; }

  static EdgeConfig from_mask(std::uint64_t mask, std::size_t n);
  static EdgeConfig all(std::size_t n, bool open);
  std::uint64_t mask() const;
};

struct ClusterDecomposition {
  /// Per scope vertex: the smallest vertex index in its component.
  std::vector<int> labels;
  /// Components in increasing label order, members sorted.
  std::vector<std::vector<int>> clusters;

  int count() const { return static_cast<int>(clusters.size()); }
  const std::vector<int>& cluster_of(int vertex) const;

  bool operator==(const ClusterDecomposition&) const = default;
};

class UnionFind {
 public:
  explicit UnionFind(int n = 0) { reset(n); }
  void reset(int n);
  int find(int x);
  /// Returns true when two distinct sets were merged.
  bool unite(int a, int b);
  int size() const { return static_cast<int>(parent_.size()); }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

/// Canonical decomposition from a union-find over the first `n` elements.
ClusterDecomposition canonical_decomposition(UnionFind& uf, int n);

/// Components of the scope's vertices under the open edges of `omega`.
/// `omega` must cover B0(V) for inner_only and B(V) for
/// inner_plus_boundary; throws std::invalid_argument otherwise.
ClusterDecomposition components(const Region& region, const EdgeConfig& omega, ComponentScope scope);

/// Throws std::out_of_range for vertices outside the decomposition.
bool is_connected(const ClusterDecomposition& dec, int x, int y);

}  // namespace rcfield
