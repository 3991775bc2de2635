#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rcfield/model.hpp"
#include "rcfield/numeric.hpp"

namespace rcfield {

enum class BernoulliConvention { p, r };

struct FreeBoundary {};

/// Clusters touching the boundary take color `color` (0-based).
struct WiredBoundary {
  int color = 0;
};

/// Boundary condition given by a frozen exterior configuration.
struct GeneralBoundary {
  /// Window vertices (inner vertices of the ambient region).
  std::vector<int> window;
  /// Ambient edges resampled by the measure, increasing.
  std::vector<int> domain;
  /// One bit per ambient edge outside `domain`, in increasing edge order.
  std::vector<std::uint8_t> outside;
  /// Ambient vertices joined to the point at infinity.
  std::vector<int> infinite;
};

using GRCBoundary = std::variant<FreeBoundary, WiredBoundary, GeneralBoundary>;

enum class WindowBonds { all, inner };

/// Ambient edges with at least one endpoint (all) or both endpoints (inner)
/// in the window.
std::vector<int> window_bonds(const Region& region, std::span<const int> window, WindowBonds kind);

GeneralBoundary make_general_boundary(const Region& region, std::vector<int> window, WindowBonds kind,
                                      std::vector<std::uint8_t> outside, std::vector<int> infinite = {});

/// How an edge configuration over a domain turns into clusters: components
/// of the ambient vertices plus one anchor node (index num_vertices()).
struct ClusterGeometry {
  std::shared_ptr<const Region> region;
  std::vector<int> domain;
  std::vector<int> fixed_open;
  /// Vertices whose clusters carry a weight factor.
  std::vector<int> sites;
  /// Vertices joined to the anchor node.
  std::vector<int> anchored;

  int anchor() const { return region->num_vertices(); }
  int num_nodes() const { return region->num_vertices() + 1; }
  ClusterDecomposition decompose(const EdgeConfig& omega) const;
  ClusterDecomposition decompose(std::uint64_t mask) const;
};

ClusterGeometry cluster_geometry(std::shared_ptr<const Region> region, const GRCBoundary& bc);

/// Per-color log weights of one cluster given the model and boundary.
/// Entries of -infinity mark colors the cluster cannot take.
std::vector<double> cluster_color_log_weights(const ModelSpec& spec, const GRCBoundary& bc,
                                              std::span<const int> members, bool anchored);

/// Two-color random-cluster weight: p-convention Bernoulli factors times
/// prod 2cosh(beta sum_K h_i) over clusters of the inner bonds.
double rc_weight_q2(const ModelSpec& spec, const EdgeConfig& omega);
double log_rc_weight_q2(const ModelSpec& spec, const EdgeConfig& omega);

double grc_weight(const ModelSpec& spec, const EdgeConfig& omega, const GRCBoundary& bc,
                  BernoulliConvention convention = BernoulliConvention::r);
double log_grc_weight(const ModelSpec& spec, const EdgeConfig& omega, const GRCBoundary& bc,
                      BernoulliConvention convention = BernoulliConvention::r);

/// Exhaustive table indexed by edge bitmask (bit k is the k-th domain edge).
class WeightTable {
 public:
  WeightTable(std::size_t num_edges, std::vector<double> log_weights, std::optional<ClusterGeometry> geometry = {});
  /// Hand-built table from raw nonnegative weights (size must be 2^n).
  static WeightTable from_weights(std::span<const double> weights);

  std::size_t num_edges() const { return num_edges_; }
  std::size_t size() const { return weights_.size(); }
  double shifted_weight(std::uint64_t mask) const { return weights_[mask]; }
  double probability(std::uint64_t mask) const { return weights_[mask] / z_; }
  double log_scale() const { return log_scale_; }
  double log_partition() const { return std::log(z_) + log_scale_; }
  const std::vector<double>& shifted_weights() const { return weights_; }

  bool has_geometry() const { return geometry_.has_value(); }
  const ClusterGeometry& geometry() const;

  template <typename F>
  double expectation(F&& f) const {
    CompensatedSum s;
    for (std::uint64_t m = 0; m < weights_.size(); ++m) {
      if (weights_[m] != 0.0) s += f(m) * weights_[m];
    }
    return s.value() / z_;
  }

  /// Marginal on the listed domain positions (new bit k = old bit keep[k]).
  WeightTable marginal(std::span<const int> keep) const;

 private:
  std::size_t num_edges_;
  std::vector<double> weights_;
  double log_scale_ = 0.0;
  double z_ = 0.0;
  std::optional<ClusterGeometry> geometry_;
};

/// General random-cluster table for the given boundary condition.
WeightTable exact_edge_measure(const ModelSpec& spec, const GRCBoundary& bc,
                               BernoulliConvention convention = BernoulliConvention::r,
                               std::uint64_t cap = kDefaultEnumerationCap);

/// Two-color random-cluster table (free, cosh form).
WeightTable exact_rc_measure_q2(const ModelSpec& spec, std::uint64_t cap = kDefaultEnumerationCap);

/// phi(x <-> y). Throws std::out_of_range for vertices outside the table's geometry.
double connectivity(const WeightTable& table, int x, int y);
/// phi(x <-> boundary): x joined to a boundary vertex or the anchor. Needs a
/// domain with boundary bonds or an anchored set.
double percolation(const WeightTable& table, int x);
/// phi(x joined to the inner boundary layer through open inner bonds).
double layer_connection(const WeightTable& table, int x);

using ClusterFunctional = std::function<double(std::uint64_t mask, const ClusterDecomposition& dec)>;
double cluster_functional_expectation(const WeightTable& table, const ClusterFunctional& f);

/// Event x joined to the inner boundary layer through open inner bonds;
/// `open_inner` lists the inner bonds that are open.
bool reaches_layer(const Region& region, std::span<const int> open_inner, int x);

}  // namespace rcfield
