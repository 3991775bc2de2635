#include "rcfield/phase_scan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "rcfield/inequalities.hpp"

namespace rcfield {

namespace {

void require_increasing(const char* what, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument(std::string(what) + " grid must be increasing");
  }
}

std::uint64_t point_seed(std::uint64_t base, std::size_t ia, std::size_t ib, std::size_t is, int bc) {
  std::uint64_t z = base;
  for (std::uint64_t v : {static_cast<std::uint64_t>(ia), static_cast<std::uint64_t>(ib),
                          static_cast<std::uint64_t>(is), static_cast<std::uint64_t>(bc)}) {
    z = (z ^ (v + 0x9e3779b97f4a7c15ULL + (z << 6) + (z >> 2))) * 0xbf58476d1ce4e5b9ULL;
  }
  return z ^ (z >> 31);
}

}  // namespace

void ScanConfig::validate() const {
  require_increasing("alpha", alpha_grid);
  require_increasing("beta", beta_grid);
  if (box_sides.empty()) throw std::invalid_argument("box side list is empty");
  for (std::size_t i = 0; i < box_sides.size(); ++i) {
    if (box_sides[i] < 1) throw std::invalid_argument("box sides must be positive");
    if (i > 0 && box_sides[i] <= box_sides[i - 1]) throw std::invalid_argument("box sides must be increasing");
  }
  if (q < 1) throw std::invalid_argument("q must be positive");
  if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  if (!(coupling >= 0.0)) throw std::invalid_argument("coupling must be nonnegative");
  if (!(hstar >= 0.0)) throw std::invalid_argument("hstar must be nonnegative");
  for (double b : beta_grid) {
    if (!(b >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
  }
}

ModelSpec scan_model(const ScanConfig& config, double alpha, double beta, int side) {
  auto region = share(make_centered_box(config.dimension, side));
  FieldSpec field = FieldSpec::zero(config.q, static_cast<std::size_t>(region->num_vertices()));
  if (config.hstar > 0.0) {
    const FieldSpec ising = make_power_law_field(config.hstar, alpha, config.norm, *region);
    if (config.q == 2) {
      field = ising;
    } else {
      // color 0 at +h, every other color at -h
      std::vector<double> values;
      for (int i = 0; i < region->num_vertices(); ++i) {
        const double h = ising.at(static_cast<std::size_t>(i), 0);
        values.push_back(h);
        for (int c = 1; c < config.q; ++c) values.push_back(-h);
      }
      field = FieldSpec(config.q, static_cast<std::size_t>(region->num_vertices()), std::move(values));
    }
  }
  auto couplings = CouplingConstants::uniform(static_cast<std::size_t>(region->num_all_bonds()), config.coupling);
  return ModelSpec(region, beta, std::move(couplings), std::move(field));
}

int box_center(const Region& region) {
  const std::vector<int> origin(region.graph().vertex(0).coords.size(), 0);
  const auto idx = region.graph().index_of_coords(origin);
  if (!idx || !region.is_inner(*idx)) throw std::invalid_argument("region does not contain the origin");
  return *idx;
}

std::vector<ScanRecord> run_scan(const ScanConfig& config) {
  config.validate();
  std::vector<ScanRecord> out;
  for (std::size_t ia = 0; ia < config.alpha_grid.size(); ++ia) {
    for (std::size_t ib = 0; ib < config.beta_grid.size(); ++ib) {
      for (std::size_t is = 0; is < config.box_sides.size(); ++is) {
        const double alpha = config.alpha_grid[ia];
        const double beta = config.beta_grid[ib];
        const int side = config.box_sides[is];
        try {
          const ModelSpec spec = scan_model(config, alpha, beta, side);
          const int center = box_center(spec.geometry());
          const int m = max_wired_color(spec);
          const GRCBoundary bcs[] = {FreeBoundary{}, WiredBoundary{m}};
          for (int k = 0; k < 2; ++k) {
            ScanRecord rec;
            rec.alpha = alpha;
            rec.beta = beta;
            rec.side = side;
            rec.bc = k == 0 ? "free" : "wired";
            const std::size_t domain = static_cast<std::size_t>(k == 0 ? spec.geometry().num_inner_bonds()
                                                                       : spec.geometry().num_all_bonds());
            ScanMode mode = config.mode;
            if (mode == ScanMode::automatic) {
              mode = domain <= config.exact_max_edges ? ScanMode::exact : ScanMode::monte_carlo;
            }
            rec.mode = mode;
            if (mode == ScanMode::exact) {
              const auto table = exact_edge_measure(spec, bcs[k]);
              rec.estimate = layer_connection(table, center);
            } else {
              SamplerSettings s = config.sampler;
              s.seed = point_seed(config.sampler.seed, ia, ib, is, k);
              s.dynamics = Dynamics::edwards_sokal;
              const auto series = estimate(spec, bcs[k], Observable::layer_connection(center), s);
              rec.estimate = series.mean;
              rec.std_error = series.std_error;
              rec.sweeps = s.sweeps;
              rec.seed = s.seed;
            }
            out.push_back(rec);
          }
        } catch (const std::exception& e) {
          throw std::runtime_error("scan failed at alpha=" + std::to_string(alpha) + " beta=" + std::to_string(beta) +
                                   " side=" + std::to_string(side) + ": " + e.what());
        }
      }
    }
  }
  return out;
}

const char* to_string(ScanMode m) {
  switch (m) {
    case ScanMode::automatic:
      return "auto";
    case ScanMode::exact:
      return "exact";
    case ScanMode::monte_carlo:
      return "mc";
  }
  return "?";
}

const char* to_string(Trend t) {
  switch (t) {
    case Trend::zero:
      return "zero";
    case Trend::persistent:
      return "persistent";
    case Trend::increasing:
      return "increasing";
    case Trend::decreasing:
      return "decreasing";
    case Trend::mixed:
      return "mixed";
  }
  return "?";
}

void write_scan_csv(std::ostream& out, std::span<const ScanRecord> records) {
  out << "# rcfield scan v1\n";
  out << "alpha,beta,side,bc,mode,estimate,stderr,sweeps,seed\n";
  const auto old = out.precision(17);
  for (const auto& r : records) {
    out << r.alpha << ',' << r.beta << ',' << r.side << ',' << r.bc << ',' << to_string(r.mode) << ',' << r.estimate
        << ',' << r.std_error << ',' << r.sweeps << ',' << r.seed << '\n';
  }
  out.precision(old);
}

std::vector<GapTrend> gap_trend(std::span<const ScanRecord> records, double z) {
  using Key = std::tuple<double, double>;
  std::map<Key, std::map<int, std::pair<const ScanRecord*, const ScanRecord*>>> grouped;
  for (const auto& r : records) {
    auto& slot = grouped[{r.alpha, r.beta}][r.side];
    if (r.bc == "free") {
      slot.first = &r;
    } else if (r.bc == "wired") {
      slot.second = &r;
    } else {
      throw std::invalid_argument("unknown boundary label '" + r.bc + "'");
    }
  }
  std::vector<GapTrend> out;
  for (const auto& [key, by_side] : grouped) {
    GapTrend t;
    t.alpha = std::get<0>(key);
    t.beta = std::get<1>(key);
    for (const auto& [side, pair] : by_side) {
      if (!pair.first || !pair.second) continue;
      GapPoint p;
      p.side = side;
      p.free = pair.first->estimate;
      p.wired = pair.second->estimate;
      p.gap = p.wired - p.free;
      p.free_std_error = pair.first->std_error;
      p.wired_std_error = pair.second->std_error;
      p.std_error = std::hypot(p.free_std_error, p.wired_std_error);
      t.points.push_back(p);
    }
    if (t.points.size() < 2) {
      throw std::invalid_argument("gap trend needs at least two box sizes (alpha=" + std::to_string(t.alpha) +
                                  ", beta=" + std::to_string(t.beta) + ")");
    }
    t.all_significant = true;
    t.all_zero = true;
    for (const auto& p : t.points) {
      const double band = z * p.std_error;
      if (!(p.gap > band)) t.all_significant = false;
      if (std::abs(p.gap) > std::max(band, 1e-12)) t.all_zero = false;
    }
    bool up = true;
    bool down = true;
    for (std::size_t i = 1; i < t.points.size(); ++i) {
      const double d = t.points[i].gap - t.points[i - 1].gap;
      const double band = z * std::hypot(t.points[i].std_error, t.points[i - 1].std_error);
      if (!(d > band)) up = false;
      if (!(d < -band)) down = false;
    }
    if (t.all_zero) {
      t.trend = Trend::zero;
    } else if (up) {
      t.trend = Trend::increasing;
    } else if (down && !t.all_significant) {
      t.trend = Trend::decreasing;
    } else if (t.all_significant) {
      t.trend = Trend::persistent;
    } else {
      t.trend = Trend::mixed;
    }
    out.push_back(std::move(t));
  }
  return out;
}

RelativeGap relative_gap(const GapPoint& point) {
  if (!(point.wired > 0.0)) return {};
  const double ratio = point.free / point.wired;
  RelativeGap r;
  r.value = 1.0 - ratio;
  // independent free and wired runs
  r.std_error = std::hypot(point.free_std_error / point.wired, ratio * point.wired_std_error / point.wired);
  return r;
}

std::optional<double> find_crossing(std::span<const double> x, std::span<const double> a, std::span<const double> b) {
  if (x.size() != a.size() || x.size() != b.size()) throw std::invalid_argument("curve lengths differ");
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double d0 = b[i - 1] - a[i - 1];
    const double d1 = b[i] - a[i];
    if (d0 == 0.0) return x[i - 1];
    if ((d0 < 0.0) != (d1 < 0.0) || d1 == 0.0) {
      return x[i - 1] + (x[i] - x[i - 1]) * d0 / (d0 - d1);
    }
  }
  return std::nullopt;
}

namespace {

/// Evaluates the quasilocality event from per-vertex component roots over
/// the full configuration and over bonds inside the outer window.
class MEvent {
 public:
  MEvent(const ClusterGeometry& g, std::span<const int> outer, std::span<const int> inner)
      : g_(g), inner_(inner.begin(), inner.end()) {
    const Region& r = *g.region;
    in_outer_.assign(static_cast<std::size_t>(g.num_nodes()), 0);
    for (int v : outer) in_outer_[static_cast<std::size_t>(v)] = 1;
    for (int v : inner) {
      if (!in_outer_[static_cast<std::size_t>(v)]) throw std::invalid_argument("inner window is not inside the outer window");
    }
    for (std::size_t k = 0; k < g.domain.size(); ++k) {
      const Edge& e = r.graph().edge(g.domain[k]);
      if (in_outer_[static_cast<std::size_t>(e.u)] && in_outer_[static_cast<std::size_t>(e.v)]) local_.push_back(k);
    }
    for (int e : g.fixed_open) {
      const Edge& ed = r.graph().edge(e);
      if (in_outer_[static_cast<std::size_t>(ed.u)] && in_outer_[static_cast<std::size_t>(ed.v)]) fixed_local_.push_back(e);
    }
  }

  struct Scratch {
    UnionFind full;
    UnionFind local;
    std::vector<std::uint8_t> reaches;
  };

  template <typename Bit>
  bool holds(Bit&& bit, Scratch& sc) const {
    UnionFind& full_ = sc.full;
    UnionFind& local_uf_ = sc.local;
    auto& reaches_ = sc.reaches;
    const Region& r = *g_.region;
    const auto& graph = r.graph();
    full_.reset(g_.num_nodes());
    for (int v : g_.anchored) full_.unite(v, g_.anchor());
    for (int e : g_.fixed_open) full_.unite(graph.edge(e).u, graph.edge(e).v);
    for (std::size_t k = 0; k < g_.domain.size(); ++k) {
      if (bit(k)) full_.unite(graph.edge(g_.domain[k]).u, graph.edge(g_.domain[k]).v);
    }
    // roots touching the complement of the outer window (anchor included)
    reaches_.assign(static_cast<std::size_t>(g_.num_nodes()), 0);
    for (int v = 0; v < g_.num_nodes(); ++v) {
      if (!in_outer_[static_cast<std::size_t>(v)]) reaches_[static_cast<std::size_t>(full_.find(v))] = 1;
    }
    local_uf_.reset(g_.num_nodes());
    for (int e : fixed_local_) local_uf_.unite(graph.edge(e).u, graph.edge(e).v);
    for (std::size_t k : local_) {
      if (bit(k)) local_uf_.unite(graph.edge(g_.domain[k]).u, graph.edge(g_.domain[k]).v);
    }
    int first = -1;
    for (int x : inner_) {
      if (!reaches_[static_cast<std::size_t>(full_.find(x))]) continue;
      if (first < 0) {
        first = local_uf_.find(x);
      } else if (local_uf_.find(x) != first) {
        return false;
      }
    }
    return true;
  }

 private:
  const ClusterGeometry& g_;
  std::vector<int> inner_;
  std::vector<std::uint8_t> in_outer_;
  std::vector<std::size_t> local_;
  std::vector<int> fixed_local_;
};

}  // namespace

EventEstimate m_event_probability(const ModelSpec& spec, const GRCBoundary& bc, std::span<const int> outer_window,
                                  std::span<const int> inner_window, std::optional<SamplerSettings> mc,
                                  std::uint64_t cap) {
  const Region& r = spec.geometry();
  for (int v : outer_window) {
    if (v < 0 || !r.is_inner(v)) throw std::invalid_argument("outer window must consist of inner vertices");
  }
  const std::vector<int> outer(outer_window.begin(), outer_window.end());
  const std::vector<int> inner(inner_window.begin(), inner_window.end());
  if (!mc) {
    const auto table = exact_edge_measure(spec, bc, BernoulliConvention::r, cap);
    const MEvent ev(table.geometry(), outer, inner);
    MEvent::Scratch sc;
    const double p = table.expectation([&](std::uint64_t mask) {
      return ev.holds([mask](std::size_t k) { return (mask >> k) & 1u; }, sc) ? 1.0 : 0.0;
    });
    return {p, 0.0, true};
  }
  const auto geometry = std::make_shared<const ClusterGeometry>(cluster_geometry(spec.region, bc));
  auto ev = std::make_shared<const MEvent>(*geometry, outer, inner);
  const ObservableFn fn = [geometry, ev](const ChainState& s) {
    thread_local MEvent::Scratch sc;
    return ev->holds([&s](std::size_t k) { return s.bits[k] != 0; }, sc) ? 1.0 : 0.0;
  };
  const auto series = estimate(spec, bc, fn, *mc);
  return {series.mean, series.std_error, false};
}

}  // namespace rcfield
