#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rcfield/graph.hpp"

namespace rcfield {

/// Per-edge ferromagnetic couplings, indexed like the region's ambient edges.
struct CouplingConstants {
  std::vector<double> values;

  static CouplingConstants uniform(std::size_t num_edges, double j);
  std::size_t size() const { return values.size(); }
  double operator[](std::size_t e) const { return values[e]; }
  double total() const;
};

/// Edge parameters at a fixed (beta, q): p = 1 - exp(-q beta J) and
/// r = exp(q beta J) - 1, with their logarithms.
struct EdgeWeights {
  std::vector<double> p;
  std::vector<double> r;
  std::vector<double> log_p;
  std::vector<double> log_one_minus_p;
  std::vector<double> log_r;

  std::size_t size() const { return p.size(); }
};

EdgeWeights edge_weights(const CouplingConstants& couplings, double beta, int q);

/// Per-site, per-color field values. Colors are 0-based. A value of
/// -infinity marks a color that is forbidden at that site.
class FieldSpec {
 public:
  FieldSpec() = default;
  /// `values` is site-major: values[site * q + color].
  FieldSpec(int q, std::size_t num_sites, std::vector<double> values, std::vector<double> qp = {});

  static FieldSpec zero(int q, std::size_t num_sites);
  /// Two-color field with color 0 at +h_i and color 1 at -h_i.
  static FieldSpec ising(std::span<const double> h);

  int q() const { return q_; }
  std::size_t num_sites() const { return num_sites_; }
  double at(std::size_t site, int color) const { return values_[site * static_cast<std::size_t>(q_) + static_cast<std::size_t>(color)]; }
  double& at(std::size_t site, int color) { return values_[site * static_cast<std::size_t>(q_) + static_cast<std::size_t>(color)]; }
  std::span<const double> site(std::size_t s) const {
    return {values_.data() + s * static_cast<std::size_t>(q_), static_cast<std::size_t>(q_)};
  }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& qp() const { return qp_; }
  double qp(int color) const { return qp_[static_cast<std::size_t>(color)]; }
  bool unit_weights() const;

  /// Ising field (h_{i,0} - h_{i,1}) / 2; requires q = 2 and finite values.
  double ising_value(std::size_t site) const;

  /// Same field with every value multiplied by `factor` (> 0).
  FieldSpec scaled(double factor) const;

 private:
  int q_ = 1;
  std::size_t num_sites_ = 0;
  std::vector<double> values_;
  std::vector<double> qp_;
};

enum class Norm { euclidean, sup };

/// Two-color power-law field h_i = hstar / |i|^alpha on every site of the
/// region (inner and boundary), with h = hstar at the origin.
FieldSpec make_power_law_field(double hstar, double alpha, Norm norm, const Region& region);

/// beta * sum_{i in cluster} h_{i,color}; -infinity when any member forbids
/// the color.
double field_sum(const FieldSpec& field, double beta, std::span<const int> cluster, int color);

struct FieldSummary {
  std::vector<double> hmax;
  /// Per site, the colors attaining hmax.
  std::vector<std::vector<int>> qmax_sets;
  /// Colors in the intersection of qmax_sets over the scope.
  std::vector<int> common_max;
  double qsum = 0.0;

  bool fkg_hypothesis() const { return qsum >= 1.0; }
};

FieldSummary field_summary(const FieldSpec& field, std::span<const int> scope);

/// Field order: for every site and colors k, l with h_k - h_l > 0,
/// h_k - h_l <= h'_k - h'_l. Throws std::invalid_argument on mismatched
/// shapes.
bool field_leq(const FieldSpec& h, const FieldSpec& hprime);

}  // namespace rcfield
