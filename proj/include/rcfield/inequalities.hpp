#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "rcfield/rc_model.hpp"
#include "rcfield/report.hpp"

namespace rcfield {

inline constexpr double kMarginTolerance = 1e-12;

enum class FkgMode { full, single_edge };

struct FkgReport {
  bool passed = true;
  /// Most negative W(a|b)W(a&b) - W(a)W(b), in the table's raw units.
  double worst_margin = 0.0;
  /// The same margin divided by the larger of the two products.
  double worst_relative = 0.0;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t pairs_checked = 0;
};

/// FKG lattice condition, either over all pairs or in the reduced form
/// W(w+e+f)W(w) >= W(w+e)W(w+f).
FkgReport fkg_lattice_check(const WeightTable& table, FkgMode mode = FkgMode::full,
                            double tolerance = kMarginTolerance);

struct HolleyReport {
  bool passed = true;
  /// Most negative high(z+e)low(x) - low(x+e)high(z), raw units.
  double worst_margin = 0.0;
  double worst_relative = 0.0;
  std::uint64_t xi = 0;
  std::uint64_t zeta = 0;
  int edge = -1;
  std::uint64_t checked = 0;
};

/// Single-edge ratio condition high(z^e)/high(z_e) >= low(x^e)/low(x_e)
/// for all x below z, checked in cross-multiplied form.
HolleyReport holley_check(const WeightTable& low, const WeightTable& high, double tolerance = kMarginTolerance);

struct DominationCertificate {
  bool dominated = true;
  /// low(U) - high(U) for the violating up-set (0 when dominated).
  double deficit = 0.0;
  /// Minimal elements of the violating up-set.
  std::vector<std::uint64_t> violating_generators;
  /// Monotone coupling (a, b, mass) with a below b, when dominated.
  std::vector<std::tuple<std::uint64_t, std::uint64_t, double>> coupling;
  double flow = 0.0;
};

/// Exact stochastic domination by max-flow over the order relation.
DominationCertificate strassen_domination(const WeightTable& low, const WeightTable& high,
                                          double tolerance = kMarginTolerance);

/// Every up-set of {0,1}^n for n <= 5, as bitsets over the 2^n configurations.
std::vector<std::uint64_t> enumerate_upsets(int n);

/// Minimal elements of an up-set bitset over n edges.
std::vector<std::uint64_t> upset_generators(std::uint64_t upset, int n);

struct UpsetReport {
  bool passed = true;
  /// max over up-sets of low(U) - high(U).
  double worst_deficit = 0.0;
  std::uint64_t witness = 0;
  std::uint64_t upsets_checked = 0;
};

/// low(U) <= high(U) for every up-set; needs n <= 6.
UpsetReport upset_domination_check(const WeightTable& low, const WeightTable& high,
                                   double tolerance = kMarginTolerance);

/// mu(U and V) >= mu(U) mu(V) over all pairs of up-sets; needs n <= 4.
UpsetReport positive_association_check(const WeightTable& table, double tolerance = kMarginTolerance);

/// Holley, Strassen and (for small domains) up-set comparisons of low vs high.
Report domination_report(const std::string& label, const WeightTable& low, const WeightTable& high);

/// Table positions of `small`'s edges inside `big`'s edge domain, matched
/// by endpoint coordinates (or ids when not embedded).
std::vector<int> embed_domain(const WeightTable& small, const WeightTable& big);

/// First color in the intersection of the maximal-color sets over all sites.
int max_wired_color(const ModelSpec& spec);

/// J1 <= J2 (pointwise) for free and max-wired tables.
Report coupling_monotonicity(const ModelSpec& spec, const CouplingConstants& low, const CouplingConstants& high,
                             std::uint64_t cap = kDefaultEnumerationCap);

/// h below h' in the field order, for free and max-wired tables.
Report field_monotonicity(const ModelSpec& spec, const FieldSpec& low, const FieldSpec& high,
                          std::uint64_t cap = kDefaultEnumerationCap);

/// Nested regions: phi_{small,free} <= phi_{big,free} and
/// phi_{big,max} <= phi_{small,max} on the small region's bonds.
Report volume_monotonicity(const ModelSpec& small, const ModelSpec& big, std::uint64_t cap = kDefaultEnumerationCap);

/// phi_free <= phi_max restricted to the inner bonds.
Report sandwich_check(const ModelSpec& spec, std::uint64_t cap = kDefaultEnumerationCap);

/// Scaling identity phi(beta, J, h) = phi(1, beta J, beta h) and ordering
/// of the boundary-connection proxies between beta1 < beta2.
Report beta_monotonicity(const ModelSpec& spec, double beta1, double beta2, int x,
                         std::uint64_t cap = kDefaultEnumerationCap);

struct CrossBoundaryComparison {
  /// max over up-sets (or the Strassen deficit) of phi^{J1}_max(U) - phi^{J2}_free(U).
  double deficit = 0.0;
  bool dominated = true;
};

/// Finite-volume comparison of the max-wired measure at J1 with the free
/// measure at J2 on the inner bonds. Informational only.
CrossBoundaryComparison cross_boundary_comparison(const ModelSpec& spec, const CouplingConstants& low,
                                                  const CouplingConstants& high,
                                                  std::uint64_t cap = kDefaultEnumerationCap);

struct MonotonicityInputs {
  ModelSpec spec;
  CouplingConstants coupling_low;
  CouplingConstants coupling_high;
  FieldSpec field_low;
  FieldSpec field_high;
  /// Region nested in spec's region with the same field restricted to it.
  std::optional<ModelSpec> sub;
  double beta_low = 0.0;
  double beta_high = 0.0;
  int site = 0;
};

Report monotonicity_suite(const MonotonicityInputs& in, std::uint64_t cap = kDefaultEnumerationCap);

/// Conditions the window measure (free or wired) on every exterior
/// configuration of the subwindow and compares with the general-boundary
/// subwindow measure; reports the largest total-variation distance.
Report specification_consistency(const ModelSpec& window, const GRCBoundary& bc, std::span<const int> subwindow,
                                 std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace rcfield
