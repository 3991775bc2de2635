#include "rcfield/inequalities.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "rcfield/es_coupling.hpp"
#include "rcfield/parallel.hpp"

namespace rcfield {

namespace {

struct Worst {
  double relative = 0.0;
  double shifted = 0.0;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  int edge = -1;
  std::uint64_t count = 0;

  void offer(double lhs, double rhs, std::uint64_t x, std::uint64_t y, int e) {
    ++count;
    const double scale = std::max(lhs, rhs);
    if (scale <= 0.0) return;
    const double rel = (lhs - rhs) / scale;
    if (rel < relative) {
      relative = rel;
      shifted = lhs - rhs;
      a = x;
      b = y;
      edge = e;
    }
  }
  void merge(const Worst& o) {
    count += o.count;
    if (o.relative < relative) {
      const auto c = count;
      *this = o;
      count = c;
    }
  }
};

void require_same_domain(const WeightTable& low, const WeightTable& high) {
  if (low.num_edges() != high.num_edges()) throw std::invalid_argument("tables have different edge domains");
}

template <typename Body>
Worst parallel_worst(std::uint64_t n, Body&& body) {
  std::vector<Worst> parts(chunk_count(n));
  parallel_chunks(n, [&](unsigned chunk, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) body(parts[chunk], i);
  });
  Worst out;
  for (const auto& p : parts) out.merge(p);
  return out;
}

}  // namespace

FkgReport fkg_lattice_check(const WeightTable& table, FkgMode mode, double tolerance) {
  const std::size_t n = table.num_edges();
  if (mode == FkgMode::full && n > 12) throw std::invalid_argument("full pairwise FKG check needs at most 12 edges");
  if (n > 20) throw std::invalid_argument("FKG check needs at most 20 edges");
  const auto& w = table.shifted_weights();
  const std::uint64_t size = table.size();
  Worst worst;
  if (mode == FkgMode::full) {
    worst = parallel_worst(size, [&](Worst& acc, std::uint64_t a) {
      for (std::uint64_t b = a + 1; b < size; ++b) {
        if ((a & b) == a || (a & b) == b) continue;
        acc.offer(w[a | b] * w[a & b], w[a] * w[b], a, b, -1);
      }
    });
  } else {
    worst = parallel_worst(size, [&](Worst& acc, std::uint64_t omega) {
      for (std::size_t e = 0; e < n; ++e) {
        const std::uint64_t be = std::uint64_t{1} << e;
        if (omega & be) continue;
        for (std::size_t f = e + 1; f < n; ++f) {
          const std::uint64_t bf = std::uint64_t{1} << f;
          if (omega & bf) continue;
          acc.offer(w[omega | be | bf] * w[omega], w[omega | be] * w[omega | bf], omega | be, omega | bf,
                    static_cast<int>(e));
        }
      }
    });
  }
  FkgReport r;
  r.worst_relative = worst.relative;
  r.worst_margin = worst.shifted * std::exp(2.0 * table.log_scale());
  r.a = worst.a;
  r.b = worst.b;
  r.pairs_checked = worst.count;
  r.passed = worst.relative >= -tolerance;
  return r;
}

HolleyReport holley_check(const WeightTable& low, const WeightTable& high, double tolerance) {
  require_same_domain(low, high);
  const std::size_t n = low.num_edges();
  if (n > 20) throw std::invalid_argument("Holley check needs at most 20 edges");
  const auto& lo = low.shifted_weights();
  const auto& hi = high.shifted_weights();
  const Worst worst = parallel_worst(low.size(), [&](Worst& acc, std::uint64_t zeta) {
    for (std::size_t e = 0; e < n; ++e) {
      const std::uint64_t be = std::uint64_t{1} << e;
      if (zeta & be) continue;
      // every xi below zeta, including zeta itself
      std::uint64_t xi = zeta;
      while (true) {
        acc.offer(hi[zeta | be] * lo[xi], lo[xi | be] * hi[zeta], xi, zeta, static_cast<int>(e));
        if (xi == 0) break;
        xi = (xi - 1) & zeta;
      }
    }
  });
  HolleyReport r;
  r.worst_relative = worst.relative;
  r.worst_margin = worst.shifted * std::exp(low.log_scale() + high.log_scale());
  r.xi = worst.a;
  r.zeta = worst.b;
  r.edge = worst.edge;
  r.checked = worst.count;
  r.passed = worst.relative >= -tolerance;
  return r;
}

namespace {

class Dinic {
 public:
  explicit Dinic(int nodes) : head_(static_cast<std::size_t>(nodes), -1), level_(head_.size()), it_(head_.size()) {}

  int add_arc(int from, int to, double cap) {
    const int id = static_cast<int>(to_.size());
    push(from, to, cap);
    push(to, from, 0.0);
    return id;
  }

  double max_flow(int s, int t, double eps) {
    eps_ = eps;
    double total = 0.0;
    while (bfs(s, t)) {
      std::copy(head_.begin(), head_.end(), it_.begin());
      while (true) {
        const double f = augment(s, t);
        if (f <= eps_) break;
        total += f;
      }
    }
    return total;
  }

  double flow(int arc) const { return cap_[static_cast<std::size_t>(arc) ^ 1u]; }
  double residual(int arc) const { return cap_[static_cast<std::size_t>(arc)]; }

  /// Nodes reachable from s in the residual network.
  std::vector<std::uint8_t> reachable(int s) const {
    std::vector<std::uint8_t> seen(head_.size(), 0);
    std::vector<int> stack{s};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int a = head_[static_cast<std::size_t>(u)]; a != -1; a = next_[static_cast<std::size_t>(a)]) {
        const int v = to_[static_cast<std::size_t>(a)];
        if (cap_[static_cast<std::size_t>(a)] > eps_ && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          stack.push_back(v);
        }
      }
    }
    return seen;
  }

  int head(int u) const { return head_[static_cast<std::size_t>(u)]; }
  int next(int a) const { return next_[static_cast<std::size_t>(a)]; }
  int to(int a) const { return to_[static_cast<std::size_t>(a)]; }
  void take(int arc, double amount) {
    cap_[static_cast<std::size_t>(arc)] += amount;
    cap_[static_cast<std::size_t>(arc) ^ 1u] -= amount;
  }

 private:
  void push(int from, int to, double cap) {
    to_.push_back(to);
    cap_.push_back(cap);
    next_.push_back(head_[static_cast<std::size_t>(from)]);
    head_[static_cast<std::size_t>(from)] = static_cast<int>(to_.size()) - 1;
  }

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<int> queue{s};
    level_[static_cast<std::size_t>(s)] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const int u = queue[i];
      for (int a = head_[static_cast<std::size_t>(u)]; a != -1; a = next_[static_cast<std::size_t>(a)]) {
        const int v = to_[static_cast<std::size_t>(a)];
        if (cap_[static_cast<std::size_t>(a)] > eps_ && level_[static_cast<std::size_t>(v)] < 0) {
          level_[static_cast<std::size_t>(v)] = level_[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }

  // Iterative blocking-flow search along the level graph.
  double augment(int s, int t) {
    std::vector<int> path;
    int u = s;
    while (true) {
      if (u == t) {
        double f = std::numeric_limits<double>::infinity();
        for (int a : path) f = std::min(f, cap_[static_cast<std::size_t>(a)]);
        for (int a : path) {
          cap_[static_cast<std::size_t>(a)] -= f;
          cap_[static_cast<std::size_t>(a) ^ 1u] += f;
        }
        return f;
      }
      int& a = it_[static_cast<std::size_t>(u)];
      bool advanced = false;
      for (; a != -1; a = next_[static_cast<std::size_t>(a)]) {
        const int v = to_[static_cast<std::size_t>(a)];
        if (cap_[static_cast<std::size_t>(a)] > eps_ &&
            level_[static_cast<std::size_t>(v)] == level_[static_cast<std::size_t>(u)] + 1) {
          path.push_back(a);
          u = v;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      // dead end: retreat
      level_[static_cast<std::size_t>(u)] = -1;
      if (path.empty()) return 0.0;
      const int back = path.back();
      path.pop_back();
      u = to_[static_cast<std::size_t>(back) ^ 1u];
      it_[static_cast<std::size_t>(u)] = next_[static_cast<std::size_t>(it_[static_cast<std::size_t>(u)])];
    }
  }

  std::vector<int> head_;
  std::vector<int> to_;
  std::vector<int> next_;
  std::vector<double> cap_;
  std::vector<int> level_;
  std::vector<int> it_;
  double eps_ = 0.0;
};

}  // namespace

std::vector<std::uint64_t> upset_generators(std::uint64_t upset, int n) {
  std::vector<std::uint64_t> out;
  const std::uint64_t size = std::uint64_t{1} << n;
  for (std::uint64_t a = 0; a < size; ++a) {
    if (!((upset >> a) & 1u)) continue;
    bool minimal = true;
    for (int e = 0; e < n && minimal; ++e) {
      const std::uint64_t be = std::uint64_t{1} << e;
      if ((a & be) && ((upset >> (a & ~be)) & 1u)) minimal = false;
    }
    if (minimal) out.push_back(a);
  }
  return out;
}

DominationCertificate strassen_domination(const WeightTable& low, const WeightTable& high, double tolerance) {
  require_same_domain(low, high);
  const std::size_t n = low.num_edges();
  if (n > 20) throw std::invalid_argument("Strassen check needs at most 20 edges");
  const std::uint64_t size = low.size();
  const int states = static_cast<int>(size);
  const int source = 2 * states;
  const int sink = source + 1;
  const double inf = std::numeric_limits<double>::infinity();
  Dinic net(sink + 1);
  std::vector<int> source_arc(size, -1);
  std::vector<int> sink_arc(size, -1);
  for (int a = 0; a < states; ++a) {
    const auto m = static_cast<std::uint64_t>(a);
    const double pl = low.probability(m);
    const double ph = high.probability(m);
    if (pl > 0.0) source_arc[m] = net.add_arc(source, a, pl);
    net.add_arc(a, states + a, inf);
    for (std::size_t e = 0; e < n; ++e) {
      const std::uint64_t be = std::uint64_t{1} << e;
      if (!(m & be)) net.add_arc(states + a, states + static_cast<int>(m | be), inf);
    }
    if (ph > 0.0) sink_arc[m] = net.add_arc(states + a, sink, ph);
  }
  const double eps = 1e-300;
  DominationCertificate cert;
  cert.flow = net.max_flow(source, sink, eps);
  const auto seen = net.reachable(source);
  std::uint64_t upset_count = 0;
  double low_u = 0.0;
  double high_u = 0.0;
  std::vector<std::uint8_t> in_upset(size, 0);
  for (std::uint64_t b = 0; b < size; ++b) {
    if (seen[static_cast<std::size_t>(states) + b]) {
      in_upset[b] = 1;
      ++upset_count;
      low_u += low.probability(b);
      high_u += high.probability(b);
    }
  }
  const double deficit = low_u - high_u;
  cert.dominated = !(1.0 - cert.flow > tolerance && deficit > tolerance);
  if (!cert.dominated) {
    cert.deficit = deficit;
    for (std::uint64_t a = 0; a < size; ++a) {
      if (!in_upset[a]) continue;
      bool minimal = true;
      for (std::size_t e = 0; e < n && minimal; ++e) {
        const std::uint64_t be = std::uint64_t{1} << e;
        if ((a & be) && in_upset[a & ~be]) minimal = false;
      }
      if (minimal) cert.violating_generators.push_back(a);
    }
    return cert;
  }
  // Flow decomposition into (low state, high state, mass) triples.
  for (int a = 0; a < states; ++a) {
    const int arc0 = source_arc[static_cast<std::size_t>(a)];
    if (arc0 < 0) continue;
    while (net.flow(arc0) > eps) {
      std::vector<int> path{arc0};
      int u = a;
      double mass = net.flow(arc0);
      int top = -1;
      while (u != sink) {
        int chosen = -1;
        for (int arc = net.head(u); arc != -1; arc = net.next(arc)) {
          if ((arc & 1) == 0 && net.flow(arc) > eps) {
            chosen = arc;
            break;
          }
        }
        if (chosen < 0) break;
        mass = std::min(mass, net.flow(chosen));
        path.push_back(chosen);
        if (net.to(chosen) == sink) top = u - states;
        u = net.to(chosen);
      }
      if (u != sink) break;
      for (int arc : path) net.take(arc, mass);
      cert.coupling.emplace_back(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(top), mass);
    }
  }
  return cert;
}

std::vector<std::uint64_t> enumerate_upsets(int n) {
  if (n < 0 || n > 5) throw std::invalid_argument("up-set enumeration needs 0 <= n <= 5");
  std::vector<std::uint64_t> current{0, 1};
  for (int k = 1; k <= n; ++k) {
    const int half = 1 << (k - 1);
    std::vector<std::uint64_t> next;
    // configurations with bit k-1 clear form the lower half
    for (std::uint64_t lower : current) {
      for (std::uint64_t upper : current) {
        if ((lower & ~upper) == 0) next.push_back(lower | (upper << half));
      }
    }
    current = std::move(next);
  }
  return current;
}

namespace {

double upset_mass(const WeightTable& t, std::uint64_t upset, std::uint64_t offset, int count) {
  double s = 0.0;
  for (int a = 0; a < count; ++a) {
    if ((upset >> a) & 1u) s += t.probability(offset + static_cast<std::uint64_t>(a));
  }
  return s;
}

}  // namespace

UpsetReport upset_domination_check(const WeightTable& low, const WeightTable& high, double tolerance) {
  require_same_domain(low, high);
  const int n = static_cast<int>(low.num_edges());
  if (n > 6) throw std::invalid_argument("up-set enumeration needs at most 6 edges");
  UpsetReport r;
  r.worst_deficit = -std::numeric_limits<double>::infinity();
  if (n <= 5) {
    for (std::uint64_t u : enumerate_upsets(n)) {
      const double d = upset_mass(low, u, 0, 1 << n) - upset_mass(high, u, 0, 1 << n);
      ++r.upsets_checked;
      if (d > r.worst_deficit) {
        r.worst_deficit = d;
        r.witness = u;
      }
    }
  } else {
    const auto halves = enumerate_upsets(5);
    std::vector<double> lo0, lo1, hi0, hi1;
    for (std::uint64_t u : halves) {
      lo0.push_back(upset_mass(low, u, 0, 32));
      lo1.push_back(upset_mass(low, u, 32, 32));
      hi0.push_back(upset_mass(high, u, 0, 32));
      hi1.push_back(upset_mass(high, u, 32, 32));
    }
    for (std::size_t i = 0; i < halves.size(); ++i) {
      for (std::size_t j = 0; j < halves.size(); ++j) {
        if ((halves[i] & ~halves[j]) != 0) continue;
        ++r.upsets_checked;
        const double d = (lo0[i] + lo1[j]) - (hi0[i] + hi1[j]);
        if (d > r.worst_deficit) {
          r.worst_deficit = d;
          r.witness = halves[i] | (halves[j] << 32);
        }
      }
    }
  }
  r.passed = r.worst_deficit <= tolerance;
  return r;
}

UpsetReport positive_association_check(const WeightTable& table, double tolerance) {
  const int n = static_cast<int>(table.num_edges());
  if (n > 4) throw std::invalid_argument("up-set pair enumeration needs at most 4 edges");
  const auto ups = enumerate_upsets(n);
  const int states = 1 << n;
  std::vector<double> mass;
  for (std::uint64_t u : ups) mass.push_back(upset_mass(table, u, 0, states));
  UpsetReport r;
  r.worst_deficit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ups.size(); ++i) {
    for (std::size_t j = i; j < ups.size(); ++j) {
      ++r.upsets_checked;
      const double d = mass[i] * mass[j] - upset_mass(table, ups[i] & ups[j], 0, states);
      if (d > r.worst_deficit) {
        r.worst_deficit = d;
        r.witness = ups[i] | (ups[j] << states);
      }
    }
  }
  r.passed = r.worst_deficit <= tolerance;
  return r;
}

namespace {

Report domination_report(const std::string& label, const WeightTable& low, const WeightTable& high, bool holley) {
  Report r;
  if (holley) {
    const auto h = holley_check(low, high);
    r.add(label + ".holley", std::max(0.0, -h.worst_relative), kMarginTolerance);
  }
  const auto s = strassen_domination(low, high);
  r.add(label + ".strassen", s.dominated ? 0.0 : s.deficit, kMarginTolerance);
  if (low.num_edges() <= 6) {
    const auto u = upset_domination_check(low, high);
    r.add(label + ".upsets", std::max(0.0, u.worst_deficit), kMarginTolerance);
  }
  return r;
}

std::vector<int> endpoint_key(const Region& region, const Edge& edge, bool by_coords) {
  const auto& g = region.graph();
  std::vector<int> a = by_coords ? g.vertex(edge.u).coords : std::vector<int>{g.vertex(edge.u).id};
  std::vector<int> b = by_coords ? g.vertex(edge.v).coords : std::vector<int>{g.vertex(edge.v).id};
  if (b < a) std::swap(a, b);
  a.push_back(std::numeric_limits<int>::min());
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<int> embed_geometry(const ClusterGeometry& small, const ClusterGeometry& big) {
  const Region& rs = *small.region;
  const Region& rb = *big.region;
  const bool by_coords = rs.lattice_embedded() && rb.lattice_embedded();
  std::map<std::vector<int>, int> position;
  for (std::size_t k = 0; k < big.domain.size(); ++k) {
    position[endpoint_key(rb, rb.graph().edge(big.domain[k]), by_coords)] = static_cast<int>(k);
  }
  std::vector<int> out;
  for (int e : small.domain) {
    const auto it = position.find(endpoint_key(rs, rs.graph().edge(e), by_coords));
    if (it == position.end()) throw std::invalid_argument("small edge domain is not contained in the big one");
    out.push_back(it->second);
  }
  return out;
}

/// Table on the big domain equal to `small` on the embedded positions and
/// concentrated on `rest_open` elsewhere.
WeightTable extend_table(const WeightTable& small, std::span<const int> positions, std::size_t big_edges,
                         bool rest_open) {
  std::uint64_t embedded = 0;
  for (int p : positions) embedded |= std::uint64_t{1} << p;
  const std::uint64_t full = (std::uint64_t{1} << big_edges) - 1;
  const std::uint64_t rest = rest_open ? (full & ~embedded) : 0;
  std::vector<double> logs(std::size_t{1} << big_edges, kMinusInfinity);
  for (std::uint64_t m = 0; m < small.size(); ++m) {
    const double w = small.shifted_weight(m);
    if (w <= 0.0) continue;
    std::uint64_t big = rest;
    for (std::size_t k = 0; k < positions.size(); ++k) big |= ((m >> k) & 1u) << positions[k];
    logs[big] = std::log(w) + small.log_scale();
  }
  return WeightTable(big_edges, std::move(logs));
}

std::string color_label(int m) { return std::to_string(m + 1); }

}  // namespace

Report domination_report(const std::string& label, const WeightTable& low, const WeightTable& high) {
  return domination_report(label, low, high, true);
}

std::vector<int> embed_domain(const WeightTable& small, const WeightTable& big) {
  return embed_geometry(small.geometry(), big.geometry());
}

int max_wired_color(const ModelSpec& spec) {
  std::vector<int> scope(static_cast<std::size_t>(spec.geometry().num_vertices()));
  for (std::size_t i = 0; i < scope.size(); ++i) scope[i] = static_cast<int>(i);
  const auto summary = field_summary(spec.field, scope);
  if (summary.common_max.empty()) throw std::invalid_argument("no color is maximal at every site");
  return summary.common_max.front();
}

Report coupling_monotonicity(const ModelSpec& spec, const CouplingConstants& low, const CouplingConstants& high,
                             std::uint64_t cap) {
  const ModelSpec a = spec.with_couplings(low);
  const ModelSpec b = spec.with_couplings(high);
  const int m = max_wired_color(spec);
  Report r;
  r.append(domination_report("coupling.free", exact_edge_measure(a, FreeBoundary{}, BernoulliConvention::r, cap),
                             exact_edge_measure(b, FreeBoundary{}, BernoulliConvention::r, cap), true));
  r.append(domination_report("coupling.wired" + color_label(m),
                             exact_edge_measure(a, WiredBoundary{m}, BernoulliConvention::r, cap),
                             exact_edge_measure(b, WiredBoundary{m}, BernoulliConvention::r, cap), true));
  return r;
}

Report field_monotonicity(const ModelSpec& spec, const FieldSpec& low, const FieldSpec& high, std::uint64_t cap) {
  if (!field_leq(low, high)) throw std::invalid_argument("fields are not ordered");
  const ModelSpec a = spec.with_field(low);
  const ModelSpec b = spec.with_field(high);
  Report r;
  r.append(domination_report("field.free", exact_edge_measure(a, FreeBoundary{}, BernoulliConvention::r, cap),
                             exact_edge_measure(b, FreeBoundary{}, BernoulliConvention::r, cap), true));
  const int m = max_wired_color(b);
  r.append(domination_report("field.wired" + color_label(m),
                             exact_edge_measure(a, WiredBoundary{m}, BernoulliConvention::r, cap),
                             exact_edge_measure(b, WiredBoundary{m}, BernoulliConvention::r, cap), true));
  return r;
}

Report volume_monotonicity(const ModelSpec& small, const ModelSpec& big, std::uint64_t cap) {
  Report r;
  {
    const auto ts = exact_edge_measure(small, FreeBoundary{}, BernoulliConvention::r, cap);
    const auto tb = exact_edge_measure(big, FreeBoundary{}, BernoulliConvention::r, cap);
    const auto pos = embed_domain(ts, tb);
    r.append(domination_report("volume.free.embedded", extend_table(ts, pos, tb.num_edges(), false), tb, true));
    r.append(domination_report("volume.free.marginal", ts, tb.marginal(pos), false));
  }
  {
    const int m = max_wired_color(big);
    const auto ts = exact_edge_measure(small, WiredBoundary{m}, BernoulliConvention::r, cap);
    const auto tb = exact_edge_measure(big, WiredBoundary{m}, BernoulliConvention::r, cap);
    const auto pos = embed_domain(ts, tb);
    r.append(domination_report("volume.wired.embedded", tb, extend_table(ts, pos, tb.num_edges(), true), true));
    r.append(domination_report("volume.wired.marginal", tb.marginal(pos), ts, false));
  }
  return r;
}

Report sandwich_check(const ModelSpec& spec, std::uint64_t cap) {
  const int m = max_wired_color(spec);
  const auto tf = exact_edge_measure(spec, FreeBoundary{}, BernoulliConvention::r, cap);
  const auto tw = exact_edge_measure(spec, WiredBoundary{m}, BernoulliConvention::r, cap);
  std::vector<int> inner(static_cast<std::size_t>(spec.geometry().num_inner_bonds()));
  for (std::size_t k = 0; k < inner.size(); ++k) inner[k] = static_cast<int>(k);
  Report r;
  r.append(domination_report("sandwich.embedded", extend_table(tf, inner, tw.num_edges(), false), tw, true));
  r.append(domination_report("sandwich.marginal", tf, tw.marginal(inner), false));
  return r;
}

Report beta_monotonicity(const ModelSpec& spec, double beta1, double beta2, int x, std::uint64_t cap) {
  if (!(beta1 < beta2)) throw std::invalid_argument("beta_monotonicity needs beta1 < beta2");
  Report r;
  const int m = max_wired_color(spec);
  const GRCBoundary bcs[] = {FreeBoundary{}, WiredBoundary{m}};
  const char* names[] = {"free", "wired"};
  for (int k = 0; k < 2; ++k) {
    const auto t1 = exact_edge_measure(spec.with_beta(beta1), bcs[k], BernoulliConvention::r, cap);
    const auto t2 = exact_edge_measure(spec.with_beta(beta2), bcs[k], BernoulliConvention::r, cap);
    // phi(beta, J, h) = phi(1, beta J, beta h)
    CouplingConstants scaled = spec.couplings;
    for (auto& j : scaled.values) j *= beta1;
    const ModelSpec unit(spec.region, 1.0, scaled, spec.field.scaled(beta1));
    const auto tu = exact_edge_measure(unit, bcs[k], BernoulliConvention::r, cap);
    std::vector<double> p1(t1.size()), pu(tu.size());
    for (std::uint64_t i = 0; i < t1.size(); ++i) {
      p1[i] = t1.probability(i);
      pu[i] = tu.probability(i);
    }
    r.add(std::string("beta.scaling.") + names[k], total_variation(p1, pu), 1e-12);
    const double a = k == 0 ? layer_connection(t1, x) : percolation(t1, x);
    const double b = k == 0 ? layer_connection(t2, x) : percolation(t2, x);
    r.add(std::string("beta.proxy.") + names[k], std::max(0.0, a - b), kMarginTolerance);
    r.append(domination_report(std::string("beta.") + names[k], t1, t2, true));
  }
  return r;
}

CrossBoundaryComparison cross_boundary_comparison(const ModelSpec& spec, const CouplingConstants& low,
                                                  const CouplingConstants& high, std::uint64_t cap) {
  const int m = max_wired_color(spec);
  const auto tw = exact_edge_measure(spec.with_couplings(low), WiredBoundary{m}, BernoulliConvention::r, cap);
  const auto tf = exact_edge_measure(spec.with_couplings(high), FreeBoundary{}, BernoulliConvention::r, cap);
  std::vector<int> inner(static_cast<std::size_t>(spec.geometry().num_inner_bonds()));
  for (std::size_t k = 0; k < inner.size(); ++k) inner[k] = static_cast<int>(k);
  const auto cert = strassen_domination(tw.marginal(inner), tf);
  return CrossBoundaryComparison{cert.deficit, cert.dominated};
}

Report monotonicity_suite(const MonotonicityInputs& in, std::uint64_t cap) {
  Report r;
  r.append(coupling_monotonicity(in.spec, in.coupling_low, in.coupling_high, cap));
  r.append(field_monotonicity(in.spec, in.field_low, in.field_high, cap));
  r.append(sandwich_check(in.spec, cap));
  if (in.sub) r.append(volume_monotonicity(*in.sub, in.spec, cap));
  if (in.beta_low < in.beta_high) r.append(beta_monotonicity(in.spec, in.beta_low, in.beta_high, in.site, cap));
  return r;
}

Report specification_consistency(const ModelSpec& window, const GRCBoundary& bc, std::span<const int> subwindow,
                                 std::uint64_t cap) {
  const Region& region = window.geometry();
  for (int v : subwindow) {
    if (v < 0 || v >= region.num_inner()) throw std::invalid_argument("subwindow must lie inside the window");
  }
  if (std::holds_alternative<GeneralBoundary>(bc)) throw std::invalid_argument("window boundary must be free or wired");
  const bool wired = std::holds_alternative<WiredBoundary>(bc);
  const auto table = exact_edge_measure(window, bc, BernoulliConvention::r, cap);
  const auto& outer = table.geometry().domain;

  // subwindow domain: bonds touching the subwindow that the window measure resamples
  const auto touching = window_bonds(region, subwindow, WindowBonds::all);
  std::vector<int> domain;
  std::vector<int> in_pos;
  std::vector<int> out_pos;
  for (std::size_t k = 0; k < outer.size(); ++k) {
    if (std::binary_search(touching.begin(), touching.end(), outer[k])) {
      domain.push_back(outer[k]);
      in_pos.push_back(static_cast<int>(k));
    } else {
      out_pos.push_back(static_cast<int>(k));
    }
  }
  const std::vector<int> infinite = wired ? region.boundary() : std::vector<int>{};
  const std::uint64_t exterior_states = checked_power(2, out_pos.size(), cap, "exterior enumeration");
  const std::uint64_t inner_states = std::uint64_t{1} << in_pos.size();

  double worst = 0.0;
  for (std::uint64_t eta = 0; eta < exterior_states; ++eta) {
    std::uint64_t base = 0;
    for (std::size_t k = 0; k < out_pos.size(); ++k) base |= ((eta >> k) & 1u) << out_pos[k];
    std::vector<double> cond(inner_states);
    double mass = 0.0;
    for (std::uint64_t s = 0; s < inner_states; ++s) {
      std::uint64_t full = base;
      for (std::size_t k = 0; k < in_pos.size(); ++k) full |= ((s >> k) & 1u) << in_pos[k];
      cond[s] = table.shifted_weight(full);
      mass += cond[s];
    }
    if (mass <= 0.0) continue;
    for (auto& c : cond) c /= mass;

    // exterior bits in ambient edge order; edges outside the window's own
    // domain (free boundary bonds) are closed
    std::vector<std::uint8_t> outside;
    for (int e = 0; e < region.num_all_bonds(); ++e) {
      if (std::binary_search(domain.begin(), domain.end(), e)) continue;
      const auto it = std::lower_bound(outer.begin(), outer.end(), e);
      if (it == outer.end() || *it != e) {
        outside.push_back(0);
        continue;
      }
      const auto k = static_cast<std::size_t>(it - outer.begin());
      outside.push_back(static_cast<std::uint8_t>((base >> k) & 1u));
    }
    GeneralBoundary general{std::vector<int>(subwindow.begin(), subwindow.end()), domain, std::move(outside), infinite};
    const auto sub = exact_edge_measure(window, general, BernoulliConvention::r, cap);
    std::vector<double> ps(inner_states);
    for (std::uint64_t s = 0; s < inner_states; ++s) ps[s] = sub.probability(s);
    worst = std::max(worst, total_variation(cond, ps));
  }
  Report r;
  r.add("specification_consistency", worst, 1e-10);
  return r;
}

}  // namespace rcfield
