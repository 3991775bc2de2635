#include "rcfield/rc_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "rcfield/parallel.hpp"

namespace rcfield {

std::vector<int> window_bonds(const Region& region, std::span<const int> window, WindowBonds kind) {
  std::vector<std::uint8_t> in(static_cast<std::size_t>(region.num_vertices()), 0);
  for (int v : window) {
    if (v < 0 || v >= region.num_vertices()) throw std::out_of_range("window vertex out of range");
    in[static_cast<std::size_t>(v)] = 1;
  }
  std::vector<int> out;
  for (int e = 0; e < region.num_all_bonds(); ++e) {
    const Edge& edge = region.graph().edge(e);
    const int hits = in[static_cast<std::size_t>(edge.u)] + in[static_cast<std::size_t>(edge.v)];
    if (kind == WindowBonds::all ? hits >= 1 : hits == 2) out.push_back(e);
  }
  return out;
}

GeneralBoundary make_general_boundary(const Region& region, std::vector<int> window, WindowBonds kind,
                                      std::vector<std::uint8_t> outside, std::vector<int> infinite) {
  GeneralBoundary bc;
  bc.domain = window_bonds(region, window, kind);
  bc.window = std::move(window);
  bc.outside = std::move(outside);
  bc.infinite = std::move(infinite);
  return bc;
}

namespace {

void unite_fixed(const ClusterGeometry& g, UnionFind& uf) {
  const FiniteGraph& graph = g.region->graph();
  for (int e : g.fixed_open) uf.unite(graph.edge(e).u, graph.edge(e).v);
  for (int v : g.anchored) uf.unite(v, g.anchor());
}

}  // namespace

ClusterDecomposition ClusterGeometry::decompose(const EdgeConfig& omega) const {
  if (omega.size() != domain.size()) {
    throw std::invalid_argument("edge configuration covers " + std::to_string(omega.size()) + " edges, domain has " +
                                std::to_string(domain.size()));
  }
  UnionFind uf(num_nodes());
  unite_fixed(*this, uf);
  const FiniteGraph& graph = region->graph();
  for (std::size_t k = 0; k < domain.size(); ++k) {
    if (omega.open(k)) uf.unite(graph.edge(domain[k]).u, graph.edge(domain[k]).v);
  }
  return canonical_decomposition(uf, num_nodes());
}

ClusterDecomposition ClusterGeometry::decompose(std::uint64_t mask) const {
  return decompose(EdgeConfig::from_mask(mask, domain.size()));
}

ClusterGeometry cluster_geometry(std::shared_ptr<const Region> region, const GRCBoundary& bc) {
  if (!region) throw std::invalid_argument("missing region");
  ClusterGeometry g;
  const Region& r = *region;
  g.region = std::move(region);
  if (std::holds_alternative<FreeBoundary>(bc)) {
    g.domain = r.inner_bonds();
    g.sites = r.inner();
  } else if (std::holds_alternative<WiredBoundary>(bc)) {
    g.domain = r.all_bonds();
    g.sites.resize(static_cast<std::size_t>(r.num_vertices()));
    std::iota(g.sites.begin(), g.sites.end(), 0);
    g.anchored = r.boundary();
  } else {
    const auto& gen = std::get<GeneralBoundary>(bc);
    std::vector<std::uint8_t> in_domain(static_cast<std::size_t>(r.num_all_bonds()), 0);
    int prev = -1;
    for (int e : gen.domain) {
      if (e <= prev || e >= r.num_all_bonds()) throw std::invalid_argument("general boundary domain must be increasing ambient edges");
      in_domain[static_cast<std::size_t>(e)] = 1;
      prev = e;
    }
    const std::size_t n_out = static_cast<std::size_t>(r.num_all_bonds()) - gen.domain.size();
    if (gen.outside.size() != n_out) {
      throw std::invalid_argument("general boundary needs " + std::to_string(n_out) + " exterior edge states, got " +
                                  std::to_string(gen.outside.size()));
    }
    std::set<int> sites;
    for (int v : gen.window) {
      if (v < 0 || !r.is_inner(v)) throw std::invalid_argument("window vertex must be an inner vertex");
      sites.insert(v);
    }
    std::size_t k = 0;
    for (int e = 0; e < r.num_all_bonds(); ++e) {
      if (in_domain[static_cast<std::size_t>(e)]) {
        sites.insert(r.graph().edge(e).u);
        sites.insert(r.graph().edge(e).v);
      } else if (gen.outside[k++]) {
        g.fixed_open.push_back(e);
      }
    }
    for (int v : gen.infinite) {
      if (v < 0 || v >= r.num_vertices()) throw std::invalid_argument("infinite-set vertex out of range");
    }
    g.domain = gen.domain;
    g.sites.assign(sites.begin(), sites.end());
    g.anchored = gen.infinite;
  }
  return g;
}

namespace {

/// Evaluates GRC log weights on one thread; holds its own scratch space.
class GrcEvaluator {
 public:
  GrcEvaluator(const ModelSpec& spec, const GRCBoundary& bc, BernoulliConvention convention)
      : spec_(spec), geometry_(cluster_geometry(spec.region, bc)), weights_(spec.weights()), q_(spec.q()) {
    const Region& r = spec.geometry();
    const int n = r.num_vertices();
    general_ = std::holds_alternative<GeneralBoundary>(bc);
    if (const auto* w = std::get_if<WiredBoundary>(&bc)) {
      if (w->color < 0 || w->color >= q_) throw std::invalid_argument("wired color out of range");
      wired_color_ = w->color;
    }
    open_.resize(geometry_.domain.size());
    closed_.resize(geometry_.domain.size());
    for (std::size_t k = 0; k < geometry_.domain.size(); ++k) {
      const auto e = static_cast<std::size_t>(geometry_.domain[k]);
      open_[k] = convention == BernoulliConvention::r ? weights_.log_r[e] : weights_.log_p[e];
      closed_[k] = convention == BernoulliConvention::r ? 0.0 : weights_.log_one_minus_p[e];
    }
    shifted_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(q_), 0.0);
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    const FieldSummary summary = field_summary(spec.field, all);
    for (int i = 0; i < n; ++i) {
      for (int p = 0; p < q_; ++p) {
        const double h = spec.field.at(static_cast<std::size_t>(i), p);
        double& g = shifted_[static_cast<std::size_t>(i) * static_cast<std::size_t>(q_) + static_cast<std::size_t>(p)];
        if (h == kMinusInfinity) {
          g = kMinusInfinity;
        } else {
          g = general_ ? h - summary.hmax[static_cast<std::size_t>(i)] : h;
        }
      }
    }
    for (int p = 0; p < q_; ++p) log_qp_.push_back(std::log(spec.field.qp(p)));
    anchor_allowed_.assign(static_cast<std::size_t>(q_), 0);
    for (int p : summary.common_max) anchor_allowed_[static_cast<std::size_t>(p)] = 1;
    is_site_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int v : geometry_.sites) is_site_[static_cast<std::size_t>(v)] = 1;
    uf_.reset(geometry_.num_nodes());
    acc_.resize(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(q_));
    touched_.resize(static_cast<std::size_t>(n) + 1);
    buf_.resize(static_cast<std::size_t>(q_));
  }

  const ClusterGeometry& geometry() const { return geometry_; }

  double log_weight(std::span<const std::uint8_t> bits) {
    const Region& r = spec_.geometry();
    const FiniteGraph& graph = r.graph();
    const int n = r.num_vertices();
    const int anchor = geometry_.anchor();
    uf_.reset(geometry_.num_nodes());
    unite_fixed(geometry_, uf_);
    double bern = 0.0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
      if (bits[k]) {
        bern += open_[k];
        const Edge& e = graph.edge(geometry_.domain[k]);
        uf_.unite(e.u, e.v);
      } else {
        bern += closed_[k];
      }
    }
    if (bern == kMinusInfinity) return kMinusInfinity;
    std::fill(acc_.begin(), acc_.end(), 0.0);
    std::fill(touched_.begin(), touched_.end(), 0);
    const int anchor_root = uf_.find(anchor);
    for (int i = 0; i < n; ++i) {
      const int root = uf_.find(i);
      if (is_site_[static_cast<std::size_t>(i)]) touched_[static_cast<std::size_t>(root)] = 1;
      // Wired boundary clusters see the field on inner sites only.
      if (!general_ && root == anchor_root && !r.is_inner(i)) continue;
      double* a = &acc_[static_cast<std::size_t>(root) * static_cast<std::size_t>(q_)];
      const double* g = &shifted_[static_cast<std::size_t>(i) * static_cast<std::size_t>(q_)];
      for (int p = 0; p < q_; ++p) a[p] += g[p];
    }
    const bool anchor_live = !geometry_.anchored.empty();
    double total = bern;
    for (int root = 0; root <= n; ++root) {
      if (!touched_[static_cast<std::size_t>(root)]) continue;
      if (uf_.find(root) != root) continue;
      const bool anchored = anchor_live && root == anchor_root;
      const double* a = &acc_[static_cast<std::size_t>(root) * static_cast<std::size_t>(q_)];
      double factor;
      if (anchored && !general_) {
        factor = scale(a[wired_color_]);
      } else {
        for (int p = 0; p < q_; ++p) {
          const bool allowed = !anchored || anchor_allowed_[static_cast<std::size_t>(p)];
          buf_[static_cast<std::size_t>(p)] = allowed ? log_qp_[static_cast<std::size_t>(p)] + scale(a[p]) : kMinusInfinity;
        }
        factor = log_sum_exp(buf_);
      }
      if (factor == kMinusInfinity) return kMinusInfinity;
      total += factor;
    }
    return total;
  }

 private:
  double scale(double sum) const { return sum == kMinusInfinity ? kMinusInfinity : spec_.beta * sum; }

  const ModelSpec& spec_;
  ClusterGeometry geometry_;
  EdgeWeights weights_;
  int q_;
  bool general_ = false;
  int wired_color_ = 0;
  std::vector<double> open_;
  std::vector<double> closed_;
  std::vector<double> shifted_;
  std::vector<double> log_qp_;
  std::vector<std::uint8_t> anchor_allowed_;
  std::vector<std::uint8_t> is_site_;
  UnionFind uf_;
  std::vector<double> acc_;
  std::vector<std::uint8_t> touched_;
  std::vector<double> buf_;
};

void mask_bits(std::uint64_t mask, std::vector<std::uint8_t>& bits) {
  for (std::size_t k = 0; k < bits.size(); ++k) bits[k] = static_cast<std::uint8_t>((mask >> k) & 1u);
}

}  // namespace

std::vector<double> cluster_color_log_weights(const ModelSpec& spec, const GRCBoundary& bc,
                                              std::span<const int> members, bool anchored) {
  const int q = spec.q();
  const Region& r = spec.geometry();
  std::vector<double> out(static_cast<std::size_t>(q), kMinusInfinity);
  if (const auto* w = std::get_if<WiredBoundary>(&bc); w && anchored) {
    std::vector<int> inner;
    for (int v : members)
      if (r.is_inner(v)) inner.push_back(v);
    out[static_cast<std::size_t>(w->color)] = field_sum(spec.field, spec.beta, inner, w->color);
    return out;
  }
  const bool general = std::holds_alternative<GeneralBoundary>(bc);
  std::vector<int> all(static_cast<std::size_t>(r.num_vertices()));
  std::iota(all.begin(), all.end(), 0);
  const FieldSummary summary = general ? field_summary(spec.field, all) : FieldSummary{};
  std::vector<std::uint8_t> allowed(static_cast<std::size_t>(q), anchored ? 0 : 1);
  if (anchored) {
    for (int p : summary.common_max) allowed[static_cast<std::size_t>(p)] = 1;
  }
  for (int p = 0; p < q; ++p) {
    if (!allowed[static_cast<std::size_t>(p)]) continue;
    double acc = 0.0;
    for (int v : members) {
      const double h = spec.field.at(static_cast<std::size_t>(v), p);
      if (h == kMinusInfinity) {
        acc = kMinusInfinity;
        break;
      }
      acc += general ? h - summary.hmax[static_cast<std::size_t>(v)] : h;
    }
    out[static_cast<std::size_t>(p)] =
        acc == kMinusInfinity ? kMinusInfinity : std::log(spec.field.qp(p)) + spec.beta * acc;
  }
  return out;
}

double log_rc_weight_q2(const ModelSpec& spec, const EdgeConfig& omega) {
  if (spec.q() != 2) throw std::invalid_argument("the two-color random-cluster weight requires q = 2");
  const Region& r = spec.geometry();
  const auto dec = components(r, omega, ComponentScope::inner_only);
  const EdgeWeights w = spec.weights();
  double total = 0.0;
  for (int e = 0; e < r.num_inner_bonds(); ++e) {
    total += omega.open(static_cast<std::size_t>(e)) ? w.log_p[static_cast<std::size_t>(e)]
                                                      : w.log_one_minus_p[static_cast<std::size_t>(e)];
  }
  if (total == kMinusInfinity) return kMinusInfinity;
  for (const auto& cluster : dec.clusters) {
    double h = 0.0;
    for (int v : cluster) h += spec.field.ising_value(static_cast<std::size_t>(v));
    total += log_two_cosh(spec.beta * h);
  }
  return total;
}

double rc_weight_q2(const ModelSpec& spec, const EdgeConfig& omega) { return std::exp(log_rc_weight_q2(spec, omega)); }

double log_grc_weight(const ModelSpec& spec, const EdgeConfig& omega, const GRCBoundary& bc,
                      BernoulliConvention convention) {
  GrcEvaluator eval(spec, bc, convention);
  if (omega.size() != eval.geometry().domain.size()) {
    throw std::invalid_argument("edge configuration covers " + std::to_string(omega.size()) +
                                " edges, boundary condition requires " +
                                std::to_string(eval.geometry().domain.size()));
  }
  return eval.log_weight(omega.bits);
}

double grc_weight(const ModelSpec& spec, const EdgeConfig& omega, const GRCBoundary& bc,
                  BernoulliConvention convention) {
  return std::exp(log_grc_weight(spec, omega, bc, convention));
}

WeightTable::WeightTable(std::size_t num_edges, std::vector<double> log_weights, std::optional<ClusterGeometry> geometry)
    : num_edges_(num_edges), weights_(std::move(log_weights)), geometry_(std::move(geometry)) {
  if (num_edges_ >= 63 || weights_.size() != (std::uint64_t{1} << num_edges_)) {
    throw std::invalid_argument("weight table size must be 2^num_edges");
  }
  log_scale_ = *std::max_element(weights_.begin(), weights_.end());
  if (log_scale_ == kMinusInfinity || std::isnan(log_scale_)) {
    throw DegenerateMeasure("every edge configuration has zero weight");
  }
  CompensatedSum s;
  for (double& w : weights_) {
    w = std::exp(w - log_scale_);
    s += w;
  }
  z_ = s.value();
}

WeightTable WeightTable::from_weights(std::span<const double> weights) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < weights.size()) ++n;
  std::vector<double> logs;
  logs.reserve(weights.size());
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and nonnegative");
    logs.push_back(w == 0.0 ? kMinusInfinity : std::log(w));
  }
  return WeightTable(n, std::move(logs));
}

const ClusterGeometry& WeightTable::geometry() const {
  if (!geometry_) throw std::logic_error("weight table carries no cluster geometry");
  return *geometry_;
}

WeightTable WeightTable::marginal(std::span<const int> keep) const {
  for (int k : keep) {
    if (k < 0 || static_cast<std::size_t>(k) >= num_edges_) throw std::out_of_range("marginal edge out of range");
  }
  const std::size_t m = keep.size();
  std::vector<CompensatedSum> sums(std::size_t{1} << m);
  for (std::uint64_t mask = 0; mask < weights_.size(); ++mask) {
    std::uint64_t sub = 0;
    for (std::size_t k = 0; k < m; ++k) sub |= ((mask >> keep[k]) & 1u) << k;
    sums[sub] += weights_[mask];
  }
  std::vector<double> logs;
  logs.reserve(sums.size());
  for (const auto& s : sums) {
    const double v = s.value();
    logs.push_back(v > 0.0 ? std::log(v) + log_scale_ : kMinusInfinity);
  }
  return WeightTable(m, std::move(logs));
}

WeightTable exact_edge_measure(const ModelSpec& spec, const GRCBoundary& bc, BernoulliConvention convention,
                               std::uint64_t cap) {
  GrcEvaluator probe(spec, bc, convention);
  const std::size_t n = probe.geometry().domain.size();
  const std::uint64_t total = checked_power(2, n, cap, "edge enumeration");
  std::vector<double> logw(total);
  parallel_chunks(total, [&](unsigned, std::uint64_t begin, std::uint64_t end) {
    GrcEvaluator eval(spec, bc, convention);
    std::vector<std::uint8_t> bits(n);
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      mask_bits(mask, bits);
      logw[mask] = eval.log_weight(bits);
    }
  });
  return WeightTable(n, std::move(logw), probe.geometry());
}

WeightTable exact_rc_measure_q2(const ModelSpec& spec, std::uint64_t cap) {
  if (spec.q() != 2) throw std::invalid_argument("the two-color random-cluster measure requires q = 2");
  const std::size_t n = static_cast<std::size_t>(spec.geometry().num_inner_bonds());
  const std::uint64_t total = checked_power(2, n, cap, "edge enumeration");
  std::vector<double> logw(total);
  parallel_chunks(total, [&](unsigned, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      logw[mask] = log_rc_weight_q2(spec, EdgeConfig::from_mask(mask, n));
    }
  });
  return WeightTable(n, std::move(logw), cluster_geometry(spec.region, FreeBoundary{}));
}

namespace {
void check_vertex(const ClusterGeometry& g, int x) {
  if (x < 0 || x >= g.region->num_vertices()) throw std::out_of_range("vertex " + std::to_string(x) + " outside the window");
}
}  // namespace

double connectivity(const WeightTable& table, int x, int y) {
  const ClusterGeometry& g = table.geometry();
  check_vertex(g, x);
  check_vertex(g, y);
  return table.expectation([&](std::uint64_t mask) {
    const auto dec = g.decompose(mask);
    return is_connected(dec, x, y) ? 1.0 : 0.0;
  });
}

double percolation(const WeightTable& table, int x) {
  const ClusterGeometry& g = table.geometry();
  check_vertex(g, x);
  const Region& r = *g.region;
  const bool has_boundary_bond = std::any_of(g.domain.begin(), g.domain.end(), [&](int e) { return !r.is_inner_bond(e); });
  if (!has_boundary_bond && g.anchored.empty()) {
    throw std::invalid_argument("percolation needs boundary bonds in the edge domain");
  }
  return table.expectation([&](std::uint64_t mask) {
    const auto dec = g.decompose(mask);
    if (is_connected(dec, x, g.anchor())) return 1.0;
    for (int b = r.num_inner(); b < r.num_vertices(); ++b) {
      if (is_connected(dec, x, b)) return 1.0;
    }
    return 0.0;
  });
}

bool reaches_layer(const Region& region, std::span<const int> open_inner, int x) {
  UnionFind uf(region.num_inner());
  for (int e : open_inner) uf.unite(region.graph().edge(e).u, region.graph().edge(e).v);
  const int rx = uf.find(x);
  for (int v : region.inner_boundary_layer()) {
    if (uf.find(v) == rx) return true;
  }
  return false;
}

double layer_connection(const WeightTable& table, int x) {
  const ClusterGeometry& g = table.geometry();
  const Region& r = *g.region;
  if (x < 0 || !r.is_inner(x)) throw std::out_of_range("vertex " + std::to_string(x) + " is not an inner vertex");
  std::vector<int> fixed_inner;
  for (int e : g.fixed_open)
    if (r.is_inner_bond(e)) fixed_inner.push_back(e);
  return table.expectation([&](std::uint64_t mask) {
    std::vector<int> open = fixed_inner;
    for (std::size_t k = 0; k < g.domain.size(); ++k) {
      if ((mask >> k) & 1u && r.is_inner_bond(g.domain[k])) open.push_back(g.domain[k]);
    }
    return reaches_layer(r, open, x) ? 1.0 : 0.0;
  });
}

double cluster_functional_expectation(const WeightTable& table, const ClusterFunctional& f) {
  const ClusterGeometry& g = table.geometry();
  return table.expectation([&](std::uint64_t mask) { return f(mask, g.decompose(mask)); });
}

}  // namespace rcfield
