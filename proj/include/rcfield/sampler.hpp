#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rcfield/rc_model.hpp"

namespace rcfield {

/// xoshiro256** seeded through splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  /// Independent stream for one (seed, chain, sweep) triple.
  static Rng stream(std::uint64_t seed, std::uint64_t chain, std::uint64_t sweep);

  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t s_[4];
};

struct ChainState {
  /// One color per ambient vertex.
  std::vector<int> colors;
  /// Occupation of the boundary condition's edge domain.
  std::vector<std::uint8_t> bits;
  std::uint64_t seed = 0;
  std::uint64_t chain = 0;
  std::uint64_t sweep_count = 0;
};

/// Alternating edge/cluster-color updates of the Edwards-Sokal measure.
/// Requires unit q_p constants.
class EsSampler {
 public:
  EsSampler(ModelSpec spec, GRCBoundary bc);

  ChainState initial_state(std::uint64_t seed, std::uint64_t chain = 0) const;
  void sweep(ChainState& state) const;
  /// Edge half-step only (exposed for tests).
  void edge_step(ChainState& state, Rng& rng) const;
  /// Cluster color half-step only.
  void color_step(ChainState& state, Rng& rng) const;

  const ModelSpec& spec() const { return spec_; }
  const GRCBoundary& boundary() const { return bc_; }
  const ClusterGeometry& geometry() const { return geometry_; }
  bool compatible(const ChainState& state) const;
  /// Components of the current edge state over ambient vertices plus anchor.
  void components(const ChainState& state, UnionFind& uf) const;

 private:
  ModelSpec spec_;
  GRCBoundary bc_;
  ClusterGeometry geometry_;
  EdgeWeights weights_;
  bool general_ = false;
  int wired_color_ = -1;
  std::vector<double> shifted_;
  std::vector<std::uint8_t> anchor_allowed_;
  std::vector<std::uint8_t> is_site_;
};

/// Single-site heat-bath dynamics for the spin measure (Potts at q beta;
/// the Ising measure at beta for q = 2). Free or wired boundary.
class GlauberSampler {
 public:
  GlauberSampler(ModelSpec spec, GRCBoundary bc);

  ChainState initial_state(std::uint64_t seed, std::uint64_t chain = 0) const;
  void sweep(ChainState& state) const;
  const ModelSpec& spec() const { return spec_; }

 private:
  ModelSpec spec_;
  int wired_color_ = -1;
  /// Per inner site: (neighbor, q beta J) pairs; wired boundary neighbors included.
  std::vector<std::vector<std::pair<int, double>>> neighbors_;
};

enum class Dynamics { edwards_sokal, glauber };

enum class ObservableKind { magnetization, two_point, connectivity, percolation, layer_connection };

struct Observable {
  ObservableKind kind = ObservableKind::magnetization;
  int x = 0;
  int y = 0;

  static Observable magnetization() { return {}; }
  static Observable two_point(int x, int y) { return {ObservableKind::two_point, x, y}; }
  static Observable connectivity(int x, int y) { return {ObservableKind::connectivity, x, y}; }
  static Observable percolation(int x) { return {ObservableKind::percolation, x, 0}; }
  static Observable layer_connection(int x) { return {ObservableKind::layer_connection, x, 0}; }
};

struct SamplerSettings {
  std::uint64_t sweeps = 10000;
  /// Defaults to 10% of sweeps.
  std::optional<std::uint64_t> burn_in;
  int batches = 32;
  std::uint64_t seed = 1;
  int chains = 1;
  Dynamics dynamics = Dynamics::edwards_sokal;
};

struct EstimatorSeries {
  std::vector<double> samples;
  double mean = 0.0;
  double std_error = 0.0;
  int n_batches = 0;
};

/// Batch-means summary of a series split into `batches` equal batches.
EstimatorSeries summarize(std::vector<double> samples, int batches);

using ObservableFn = std::function<double(const ChainState&)>;

/// Evaluator for one observable. Edge observables read the state's edge
/// bits against `geometry`; each returned function owns its scratch space.
ObservableFn make_observable(const ModelSpec& spec, const ClusterGeometry& geometry, const Observable& obs);

EstimatorSeries estimate(const ModelSpec& spec, const GRCBoundary& bc, const Observable& obs,
                         const SamplerSettings& settings);
/// Same with a caller-supplied observable (Edwards-Sokal dynamics only).
EstimatorSeries estimate(const ModelSpec& spec, const GRCBoundary& bc, const ObservableFn& fn,
                         const SamplerSettings& settings);

}  // namespace rcfield
