#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcfield/sampler.hpp"

namespace rcfield {

enum class ScanMode { automatic, exact, monte_carlo };

/// Parameters of a free-vs-wired scan on centered boxes in Z^d with the
/// power-law field h_i = hstar / |i|^alpha favoring color 0.
struct ScanConfig {
  std::vector<double> alpha_grid{0.0};
  std::vector<double> beta_grid;
  std::vector<int> box_sides;
  double hstar = 0.0;
  int q = 2;
  int dimension = 2;
  double coupling = 1.0;
  Norm norm = Norm::euclidean;
  SamplerSettings sampler;
  ScanMode mode = ScanMode::automatic;
  /// Largest edge domain handled by enumeration in automatic mode.
  std::size_t exact_max_edges = 20;

  /// Throws std::invalid_argument on empty or non-increasing grids.
  void validate() const;
};

struct ScanRecord {
  double alpha = 0.0;
  double beta = 0.0;
  int side = 0;
  /// "free" or "wired"
  std::string bc;
  ScanMode mode = ScanMode::exact;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t sweeps = 0;
  std::uint64_t seed = 0;
};

/// Model on a centered box with the scan's field and uniform couplings.
ModelSpec scan_model(const ScanConfig& config, double alpha, double beta, int side);

/// Index of the vertex at the lattice origin.
int box_center(const Region& region);

/// Probability that the box center is joined to the inner boundary layer
/// through open inner bonds, for free and max-wired boundary conditions at
/// every grid point.
std::vector<ScanRecord> run_scan(const ScanConfig& config);

void write_scan_csv(std::ostream& out, std::span<const ScanRecord> records);

struct GapPoint {
  int side = 0;
  double gap = 0.0;
  double std_error = 0.0;
  double wired = 0.0;
  double free = 0.0;
  double wired_std_error = 0.0;
  double free_std_error = 0.0;
};

enum class Trend { zero, persistent, increasing, decreasing, mixed };

struct GapTrend {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<GapPoint> points;
  Trend trend = Trend::mixed;
  /// Every gap differs from zero by more than z standard errors.
  bool all_significant = false;
  /// Every gap is within z standard errors of zero.
  bool all_zero = false;
  std::string label = "indicative";
};

/// Gap wired - free per (alpha, beta) against box side. Throws
/// std::invalid_argument when fewer than two sides are present.
std::vector<GapTrend> gap_trend(std::span<const ScanRecord> records, double z = 3.0);

const char* to_string(Trend t);
const char* to_string(ScanMode m);

/// Relative gap 1 - free/wired with a delta-method standard error.
struct RelativeGap {
  double value = 0.0;
  double std_error = 0.0;
};
RelativeGap relative_gap(const GapPoint& point);

/// Abscissa where curve b - curve a changes sign, by linear interpolation
/// between grid points; empty when no sign change occurs.
std::optional<double> find_crossing(std::span<const double> x, std::span<const double> a, std::span<const double> b);

struct EventEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

/// Probability of the quasilocality event: for all x, y in `inner_window`,
/// if both are joined to the complement of `outer_window` then they are
/// joined through bonds with both endpoints in `outer_window`. Windows are
/// lists of inner vertices of the spec's region. Exact when `mc` is empty.
EventEstimate m_event_probability(const ModelSpec& spec, const GRCBoundary& bc, std::span<const int> outer_window,
                                  std::span<const int> inner_window, std::optional<SamplerSettings> mc = {},
                                  std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace rcfield
