#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcfield/phase_scan.hpp"
#include "rcfield/rc_model.hpp"
#include "rcfield/spin_models.hpp"

namespace rcfield {

/// Input error with a location: "line:col" for syntax errors, a JSON
/// pointer such as "/field/values/3" for content errors.
class InputError : public std::runtime_error {
 public:
  InputError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Parses a model description:
///
///   {"graph": {"corpus": "triangle"}
///          | {"box": {"sides": [3, 3]}} | {"centered_box": {"dimension": 2, "side": 4}}
///          | {"vertices": [{"id": 0, "coords": [0, 0]}, ...], "edges": [[0, 1], ...], "boundary": [ids]},
///    "q": 2, "beta": 0.5,
///    "coupling": 1.0 | "couplings": [per ambient edge],
///    "field": {"ising": [per vertex]} | {"values": [[per color], ...]}
///           | {"power_law": {"hstar": 1, "alpha": 0.5, "norm": "euclidean"}},
///    "qp": [per color]}
///
/// Field and coupling arrays follow the region's internal vertex and edge
/// order (inner first). Throws InputError.
ModelSpec parse_model(const std::string& text);
ModelSpec load_model(const std::string& path);

/// "free", "wired:<m>" (1-based color) or "general:<file>" where the file
/// holds {"window": [ids], "bonds": "all"|"inner", "open": [[id, id], ...],
/// "infinite": [ids]}.
GRCBoundary parse_boundary(const std::string& text, const Region& region);
GeneralBoundary parse_general_boundary(const std::string& json_text, const Region& region);

/// Weight table CSV, versioned: a "# rcfield weight-table v1" line, then
/// "config,weight" or "config,log_weight" rows; config is a bit string
/// with edge 0 first. Configurations left out have weight zero.
WeightTable read_weight_table(std::istream& in);
WeightTable load_weight_table(const std::string& path);
void write_weight_table(std::ostream& out, const WeightTable& table);

/// Spin distribution CSV: config (colors, 1-based, site 0 first), probability.
void write_spin_distribution(std::ostream& out, const ExactDistribution& dist);

/// Scan configuration:
///   {"alpha": [..], "beta": [..] | "p": [..], "sides": [..], "hstar": 0, "q": 2,
///    "dimension": 2, "coupling": 1, "norm": "euclidean", "mode": "auto"|"exact"|"mc",
///    "sweeps": 10000, "burn_in": 1000, "batches": 32, "seed": 1, "chains": 1}
/// A "p" grid is converted with beta = -log(1 - p) / (q J).
ScanConfig parse_scan_config(const std::string& text);

std::string read_file(const std::string& path);

}  // namespace rcfield
