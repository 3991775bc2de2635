#pragma once

#include <cstdint>
#include <vector>

#include "rcfield/rc_model.hpp"
#include "rcfield/report.hpp"
#include "rcfield/spin_models.hpp"

namespace rcfield {

/// Spins on the inner sites and edges over the boundary condition's domain
/// (inner bonds for free, all bonds for wired).
struct JointConfig {
  SpinConfig sigma;
  EdgeConfig omega;
};

/// Every open edge joins equal colors; wired boundary vertices carry the
/// wired color.
bool compatible(const ModelSpec& spec, const JointConfig& joint, const GRCBoundary& bc = FreeBoundary{});

/// Edwards-Sokal weight with p-convention Bernoulli factors and field
/// exp(beta sum_i h_{i,sigma_i}); exactly zero for incompatible pairs.
/// Supports free and wired boundary conditions.
double es_weight(const ModelSpec& spec, const JointConfig& joint, const GRCBoundary& bc = FreeBoundary{});
double log_es_weight(const ModelSpec& spec, const JointConfig& joint, const GRCBoundary& bc = FreeBoundary{});

/// Exhaustive joint table; index = mask * q^n + spin index.
class JointTable {
 public:
  JointTable(int q, int num_sites, std::size_t num_edges, std::vector<double> log_weights);

  int q() const { return q_; }
  int num_sites() const { return num_sites_; }
  std::size_t num_edges() const { return num_edges_; }
  std::size_t spin_states() const { return spin_states_; }
  std::size_t size() const { return weights_.size(); }
  double probability(std::size_t index) const { return weights_[index] / z_; }
  double log_partition() const { return std::log(z_) + log_scale_; }
  std::size_t index(std::size_t spin_index, std::uint64_t mask) const { return mask * spin_states_ + spin_index; }
  std::vector<double> spin_marginal() const;
  std::vector<double> edge_marginal() const;

 private:
  int q_;
  int num_sites_;
  std::size_t num_edges_;
  std::size_t spin_states_;
  std::vector<double> weights_;
  double log_scale_ = 0.0;
  double z_ = 0.0;
};

JointTable exact_joint_measure(const ModelSpec& spec, const GRCBoundary& bc = FreeBoundary{},
                               std::uint64_t cap = kDefaultEnumerationCap);

/// Conditional color law of one cluster given the edges.
struct ClusterColorLaw {
  std::vector<int> members;
  std::vector<double> probabilities;
  bool anchored = false;
};

/// Independent per-cluster color laws given omega: color p with
/// probability proportional to q_p exp(beta sum_K h_{i,p}); wired boundary
/// clusters take the wired color.
std::vector<ClusterColorLaw> conditional_spins_given_edges(const ModelSpec& spec, const EdgeConfig& omega,
                                                           const GRCBoundary& bc = FreeBoundary{});

double total_variation(std::span<const double> a, std::span<const double> b);

/// Spin and edge marginals of the joint measure against the spin model and
/// the random-cluster model (free or wired).
Report verify_marginals(const ModelSpec& spec, const GRCBoundary& bc = FreeBoundary{},
                        std::uint64_t cap = kDefaultEnumerationCap);

Report verify_correlation_connectivity(const ModelSpec& spec, int x, int y, std::uint64_t cap = kDefaultEnumerationCap);

Report verify_single_spin(const ModelSpec& spec, int x, std::uint64_t cap = kDefaultEnumerationCap);

Report verify_partition_identities(const ModelSpec& spec, std::uint64_t cap = kDefaultEnumerationCap);

/// Cluster-sum identities for q = 2, checked for every edge configuration:
/// the full sum, the pinned-pair sum, and the pinned-site sums.
Report verify_cluster_sums(const ModelSpec& spec, std::uint64_t cap = kDefaultEnumerationCap);

/// Spin identification between the Ising measure at beta and the Potts
/// measure at 2 beta (q = 2).
Report verify_spin_identification(const ModelSpec& spec, std::uint64_t cap = kDefaultEnumerationCap);

/// Same model with unit q_p constants.
ModelSpec with_unit_weights(const ModelSpec& spec);

/// True when every field value is zero.
bool zero_field(const FieldSpec& field);

}  // namespace rcfield
