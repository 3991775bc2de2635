#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rcfield/model.hpp"
#include "rcfield/numeric.hpp"

namespace rcfield {

enum class Hamiltonian { ising, potts };

/// Colors 0..q-1 on the inner sites. Ising spins map color 0 to +1 and
/// color 1 to -1.
using SpinConfig = std::vector<int>;

inline int ising_spin(int color) { return 1 - 2 * color; }

struct SpinBoundary {
  /// Boundary colors in boundary-vertex order; absent for free boundary.
  std::optional<std::vector<int>> mu;

  static SpinBoundary free() { return {}; }
  static SpinBoundary fixed(std::vector<int> colors) { return SpinBoundary{std::move(colors)}; }
  bool is_fixed() const { return mu.has_value(); }
};

/// Ising energy -sum J s s - sum h s (minus the boundary cross term when
/// fixed), with h_i = (h_{i,0} - h_{i,1}) / 2.
double ising_energy(const ModelSpec& spec, std::span<const int> sigma, const SpinBoundary& bc = {});

/// Potts energy -sum J delta - sum_p sum_i (h_{i,p}/q) delta (plus the
/// boundary term when fixed); +infinity on forbidden colors.
double potts_energy(const ModelSpec& spec, std::span<const int> sigma, const SpinBoundary& bc = {});

/// Exact Gibbs measure exp(-beta H) over all colorings of the inner sites,
/// enumerated with little-endian color digits (site k is digit k).
class ExactDistribution {
 public:
  ExactDistribution(int q, int num_sites, std::vector<double> shifted_weights, double log_scale);

  int q() const { return q_; }
  int num_sites() const { return num_sites_; }
  std::size_t size() const { return weights_.size(); }
  double probability(std::size_t index) const { return weights_[index] / z_; }
  /// Unnormalized weight relative to exp(log_scale()).
  double shifted_weight(std::size_t index) const { return weights_[index]; }
  double log_scale() const { return log_scale_; }
  double log_partition() const { return std::log(z_) + log_scale_; }
  int color(std::size_t index, int site) const;
  SpinConfig config(std::size_t index) const;

  template <typename F>
  double expectation(F&& f) const {
    CompensatedSum s;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
      if (weights_[k] != 0.0) s += f(k) * weights_[k];
    }
    return s.value() / z_;
  }

 private:
  int q_;
  int num_sites_;
  std::vector<double> weights_;
  double log_scale_;
  double z_ = 0.0;
  std::vector<std::size_t> strides_;
};

ExactDistribution exact_spin_measure(const ModelSpec& spec, Hamiltonian kind, const SpinBoundary& bc = {},
                                     std::uint64_t cap = kDefaultEnumerationCap);

double agreement_probability(const ExactDistribution& dist, int x, int y);
double color_probability(const ExactDistribution& dist, int x, int color);
/// E[s_x s_y] for a two-color distribution.
double spin_correlation(const ExactDistribution& dist, int x, int y);
/// E[s_x] for a two-color distribution.
double spin_expectation(const ExactDistribution& dist, int x);
/// Site-averaged (q delta_{sigma,0} - 1)/(q - 1); the Ising magnetization for q = 2.
double mean_magnetization(const ExactDistribution& dist);

/// pi(sigma_x = sigma_y) - 1/q under the Potts measure at spec.beta.
double two_point_tau(const ModelSpec& spec, int x, int y, std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace rcfield
