#include "rcfield/es_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rcfield/parallel.hpp"

namespace rcfield {

namespace {

constexpr double kIdentityTolerance = 1e-10;
constexpr double kExactTolerance = 1e-12;

struct JointLayout {
  std::vector<int> domain;
  int wired_color = -1;
};

JointLayout joint_layout(const ModelSpec& spec, const GRCBoundary& bc) {
  JointLayout layout;
  const Region& r = spec.geometry();
  if (std::holds_alternative<FreeBoundary>(bc)) {
    layout.domain = r.inner_bonds();
  } else if (const auto* w = std::get_if<WiredBoundary>(&bc)) {
    if (w->color < 0 || w->color >= spec.q()) throw std::invalid_argument("wired color out of range");
    layout.domain = r.all_bonds();
    layout.wired_color = w->color;
  } else {
    throw std::invalid_argument("the joint measure supports free and wired boundary conditions");
  }
  return layout;
}

int color_at(const Region& r, std::span<const int> sigma, int wired_color, int v) {
  return r.is_inner(v) ? sigma[static_cast<std::size_t>(v)] : wired_color;
}

void check_joint(const ModelSpec& spec, const JointConfig& joint, const JointLayout& layout) {
  if (static_cast<int>(joint.sigma.size()) != spec.geometry().num_inner()) {
    throw std::invalid_argument("spin configuration does not cover the inner sites");
  }
  if (joint.omega.size() != layout.domain.size()) {
    throw std::invalid_argument("edge configuration does not match the boundary condition's domain");
  }
  for (int c : joint.sigma) {
    if (c < 0 || c >= spec.q()) throw std::invalid_argument("spin color out of range");
  }
}

double log_es(const ModelSpec& spec, const EdgeWeights& w, const JointLayout& layout, std::span<const int> sigma,
              const std::vector<std::uint8_t>& bits) {
  const Region& r = spec.geometry();
  double total = 0.0;
  for (std::size_t k = 0; k < layout.domain.size(); ++k) {
    const auto e = static_cast<std::size_t>(layout.domain[k]);
    if (bits[k]) {
      const Edge& edge = r.graph().edge(layout.domain[k]);
      if (color_at(r, sigma, layout.wired_color, edge.u) != color_at(r, sigma, layout.wired_color, edge.v)) {
        return kMinusInfinity;
      }
      total += w.log_p[e];
    } else {
      total += w.log_one_minus_p[e];
    }
  }
  double h = 0.0;
  for (int i = 0; i < r.num_inner(); ++i) {
    const double v = spec.field.at(static_cast<std::size_t>(i), sigma[static_cast<std::size_t>(i)]);
    if (v == kMinusInfinity) return kMinusInfinity;
    h += v;
  }
  return total + spec.beta * h;
}

}  // namespace

bool compatible(const ModelSpec& spec, const JointConfig& joint, const GRCBoundary& bc) {
  const JointLayout layout = joint_layout(spec, bc);
  check_joint(spec, joint, layout);
  const Region& r = spec.geometry();
  for (std::size_t k = 0; k < layout.domain.size(); ++k) {
    if (!joint.omega.open(k)) continue;
    const Edge& edge = r.graph().edge(layout.domain[k]);
    if (color_at(r, joint.sigma, layout.wired_color, edge.u) != color_at(r, joint.sigma, layout.wired_color, edge.v)) {
      return false;
    }
  }
  return true;
}

double log_es_weight(const ModelSpec& spec, const JointConfig& joint, const GRCBoundary& bc) {
  const JointLayout layout = joint_layout(spec, bc);
  check_joint(spec, joint, layout);
  return log_es(spec, spec.weights(), layout, joint.sigma, joint.omega.bits);
}

double es_weight(const ModelSpec& spec, const JointConfig& joint, const GRCBoundary& bc) {
  return std::exp(log_es_weight(spec, joint, bc));
}

JointTable::JointTable(int q, int num_sites, std::size_t num_edges, std::vector<double> log_weights)
    : q_(q), num_sites_(num_sites), num_edges_(num_edges), weights_(std::move(log_weights)) {
  spin_states_ = 1;
  for (int k = 0; k < num_sites_; ++k) spin_states_ *= static_cast<std::size_t>(q_);
  if (weights_.size() != spin_states_ << num_edges_) throw std::invalid_argument("joint table has the wrong size");
  log_scale_ = *std::max_element(weights_.begin(), weights_.end());
  if (log_scale_ == kMinusInfinity) throw DegenerateMeasure("every joint configuration has zero weight");
  CompensatedSum s;
  for (double& w : weights_) {
    w = std::exp(w - log_scale_);
    s += w;
  }
  z_ = s.value();
}

std::vector<double> JointTable::spin_marginal() const {
  std::vector<CompensatedSum> acc(spin_states_);
  for (std::size_t k = 0; k < weights_.size(); ++k) acc[k % spin_states_] += weights_[k];
  std::vector<double> out;
  for (const auto& a : acc) out.push_back(a.value() / z_);
  return out;
}

std::vector<double> JointTable::edge_marginal() const {
  std::vector<CompensatedSum> acc(std::size_t{1} << num_edges_);
  for (std::size_t k = 0; k < weights_.size(); ++k) acc[k / spin_states_] += weights_[k];
  std::vector<double> out;
  for (const auto& a : acc) out.push_back(a.value() / z_);
  return out;
}

JointTable exact_joint_measure(const ModelSpec& spec, const GRCBoundary& bc, std::uint64_t cap) {
  const JointLayout layout = joint_layout(spec, bc);
  const int q = spec.q();
  const int n = spec.geometry().num_inner();
  const std::size_t ne = layout.domain.size();
  const std::uint64_t spins = checked_power(static_cast<std::uint64_t>(q), static_cast<std::size_t>(n), cap, "joint enumeration");
  const std::uint64_t masks = checked_power(2, ne, cap, "joint enumeration");
  if (spins > cap / masks) throw CapExceeded("joint enumeration exceeds cap of " + std::to_string(cap));
  const std::uint64_t total = spins * masks;
  const EdgeWeights w = spec.weights();
  std::vector<double> logw(total);
  parallel_chunks(total, [&](unsigned, std::uint64_t begin, std::uint64_t end) {
    SpinConfig sigma(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> bits(ne);
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      std::uint64_t s = idx % spins;
      const std::uint64_t mask = idx / spins;
      for (int k = 0; k < n; ++k) {
        sigma[static_cast<std::size_t>(k)] = static_cast<int>(s % static_cast<std::uint64_t>(q));
        s /= static_cast<std::uint64_t>(q);
      }
      for (std::size_t k = 0; k < ne; ++k) bits[k] = static_cast<std::uint8_t>((mask >> k) & 1u);
      logw[idx] = log_es(spec, w, layout, sigma, bits);
    }
  });
  return JointTable(q, n, ne, std::move(logw));
}

std::vector<ClusterColorLaw> conditional_spins_given_edges(const ModelSpec& spec, const EdgeConfig& omega,
                                                           const GRCBoundary& bc) {
  const ClusterGeometry g = cluster_geometry(spec.region, bc);
  const auto dec = g.decompose(omega);
  std::vector<std::uint8_t> is_site(static_cast<std::size_t>(g.num_nodes()), 0);
  for (int v : g.sites) is_site[static_cast<std::size_t>(v)] = 1;
  const int anchor = g.anchor();
  std::vector<ClusterColorLaw> out;
  for (const auto& cluster : dec.clusters) {
    ClusterColorLaw law;
    bool meets = false;
    for (int v : cluster) {
      if (v == anchor) {
        law.anchored = !g.anchored.empty();
      } else {
        law.members.push_back(v);
        meets = meets || is_site[static_cast<std::size_t>(v)];
      }
    }
    if (!meets) continue;
    const auto logw = cluster_color_log_weights(spec, bc, law.members, law.anchored);
    const double norm = log_sum_exp(logw);
    if (norm == kMinusInfinity) throw DegenerateMeasure("a cluster admits no color");
    for (double lw : logw) law.probabilities.push_back(std::exp(lw - norm));
    out.push_back(std::move(law));
  }
  return out;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("distributions differ in support size");
  CompensatedSum s;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return 0.5 * s.value();
}

ModelSpec with_unit_weights(const ModelSpec& spec) {
  const FieldSpec& f = spec.field;
  return spec.with_field(FieldSpec(f.q(), f.num_sites(), f.values()));
}

bool zero_field(const FieldSpec& field) {
  return std::all_of(field.values().begin(), field.values().end(), [](double v) { return v == 0.0; });
}

namespace {

std::vector<double> probabilities(const ExactDistribution& d) {
  std::vector<double> out(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) out[k] = d.probability(k);
  return out;
}

std::vector<double> probabilities(const WeightTable& t) {
  std::vector<double> out(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) out[k] = t.probability(k);
  return out;
}

SpinBoundary uniform_boundary(const ModelSpec& spec, int color) {
  return SpinBoundary::fixed(std::vector<int>(static_cast<std::size_t>(spec.geometry().num_boundary()), color));
}

/// beta * sum_{i in K} h_{i,p} for every color p.
std::vector<double> cluster_field(const ModelSpec& spec, std::span<const int> members) {
  std::vector<double> out;
  for (int p = 0; p < spec.q(); ++p) out.push_back(field_sum(spec.field, spec.beta, members, p));
  return out;
}

double ising_cluster_field(const ModelSpec& spec, std::span<const int> members) {
  double h = 0.0;
  for (int v : members) h += spec.field.ising_value(static_cast<std::size_t>(v));
  return spec.beta * h;
}

void check_inner(const ModelSpec& spec, int x) {
  if (x < 0 || !spec.geometry().is_inner(x)) throw std::out_of_range("vertex " + std::to_string(x) + " is not an inner vertex");
}

}  // namespace

Report verify_marginals(const ModelSpec& spec, const GRCBoundary& bc, std::uint64_t cap) {
  Report report;
  const int q = spec.q();
  const JointTable joint = exact_joint_measure(spec, bc, cap);
  const auto spins = joint.spin_marginal();
  const auto edges = joint.edge_marginal();
  SpinBoundary sb;
  if (const auto* w = std::get_if<WiredBoundary>(&bc)) sb = uniform_boundary(spec, w->color);
  const auto potts = exact_spin_measure(spec.with_beta(q * spec.beta), Hamiltonian::potts, sb, cap);
  report.add("spin_marginal_potts", total_variation(spins, probabilities(potts)), kIdentityTolerance);
  if (q == 2) {
    const auto ising = exact_spin_measure(spec, Hamiltonian::ising, sb, cap);
    report.add("spin_marginal_ising", total_variation(spins, probabilities(ising)), kIdentityTolerance);
  }
  const auto grc = exact_edge_measure(with_unit_weights(spec), bc, BernoulliConvention::p, cap);
  report.add("edge_marginal_grc", total_variation(edges, probabilities(grc)), kIdentityTolerance);
  if (q == 2 && std::holds_alternative<FreeBoundary>(bc)) {
    const auto rc = exact_rc_measure_q2(spec, cap);
    report.add("edge_marginal_rc", total_variation(edges, probabilities(rc)), kIdentityTolerance);
  }
  return report;
}

Report verify_correlation_connectivity(const ModelSpec& spec, int x, int y, std::uint64_t cap) {
  check_inner(spec, x);
  check_inner(spec, y);
  if (x == y) throw std::invalid_argument("correlation identities need distinct sites");
  Report report;
  const int q = spec.q();
  const auto potts = exact_spin_measure(spec.with_beta(q * spec.beta), Hamiltonian::potts, {}, cap);
  const double tau = agreement_probability(potts, x, y) - 1.0 / q;

  const auto table = exact_edge_measure(with_unit_weights(spec), FreeBoundary{}, BernoulliConvention::p, cap);
  const double conn = connectivity(table, x, y);
  const double h_term = cluster_functional_expectation(table, [&](std::uint64_t, const ClusterDecomposition& dec) {
    if (is_connected(dec, x, y)) return 0.0;
    const auto a = cluster_field(spec, dec.cluster_of(x));
    const auto b = cluster_field(spec, dec.cluster_of(y));
    std::vector<double> ab(a.size());
    for (std::size_t r = 0; r < a.size(); ++r) ab[r] = a[r] + b[r];
    return std::exp(log_sum_exp(ab) - log_sum_exp(a) - log_sum_exp(b)) - 1.0 / q;
  });
  report.add("tau_general_q", std::abs(tau - ((1.0 - 1.0 / q) * conn + h_term)), kIdentityTolerance);

  const bool no_field = zero_field(spec.field);
  if (no_field) report.add("zero_field_tau", std::abs(tau - (1.0 - 1.0 / q) * conn), kExactTolerance);

  if (q == 2) {
    const auto rc = exact_rc_measure_q2(spec, cap);
    const double conn2 = connectivity(rc, x, y);
    const double tanh_term = cluster_functional_expectation(rc, [&](std::uint64_t, const ClusterDecomposition& dec) {
      if (is_connected(dec, x, y)) return 0.0;
      return std::tanh(ising_cluster_field(spec, dec.cluster_of(x))) *
             std::tanh(ising_cluster_field(spec, dec.cluster_of(y)));
    });
    report.add("tau_q2", std::abs(tau - (0.5 * conn2 + 0.5 * tanh_term)), kIdentityTolerance);
    const auto ising = exact_spin_measure(spec, Hamiltonian::ising, {}, cap);
    const double corr = spin_correlation(ising, x, y);
    report.add("ising_correlation", std::abs(corr - (conn2 + tanh_term)), kIdentityTolerance);
    report.add("ising_correlation_vs_tau", std::abs(corr - 2.0 * tau), kIdentityTolerance);
    if (no_field) report.add("zero_field_ising", std::abs(corr - conn2), kExactTolerance);
  }
  return report;
}

Report verify_single_spin(const ModelSpec& spec, int x, std::uint64_t cap) {
  check_inner(spec, x);
  Report report;
  const int q = spec.q();
  const auto potts = exact_spin_measure(spec.with_beta(q * spec.beta), Hamiltonian::potts, {}, cap);
  const auto table = exact_edge_measure(with_unit_weights(spec), FreeBoundary{}, BernoulliConvention::p, cap);
  double worst = 0.0;
  for (int m = 0; m < q; ++m) {
    const double rc_side = cluster_functional_expectation(table, [&](std::uint64_t, const ClusterDecomposition& dec) {
      const auto a = cluster_field(spec, dec.cluster_of(x));
      return std::exp(a[static_cast<std::size_t>(m)] - log_sum_exp(a));
    });
    worst = std::max(worst, std::abs(color_probability(potts, x, m) - rc_side));
  }
  report.add("color_probability", worst, kIdentityTolerance);
  if (q == 2) {
    const auto ising = exact_spin_measure(spec, Hamiltonian::ising, {}, cap);
    const auto rc = exact_rc_measure_q2(spec, cap);
    const double t = cluster_functional_expectation(rc, [&](std::uint64_t, const ClusterDecomposition& dec) {
      return std::tanh(ising_cluster_field(spec, dec.cluster_of(x)));
    });
    const double plus = color_probability(ising, x, 0);
    report.add("single_spin_plus", std::abs(plus - (0.5 + 0.5 * t)), kIdentityTolerance);
    report.add("single_spin_minus", std::abs((1.0 - plus) - (0.5 - 0.5 * t)), kIdentityTolerance);
    report.add("magnetization", std::abs(spin_expectation(ising, x) - t), kIdentityTolerance);
  }
  return report;
}

Report verify_partition_identities(const ModelSpec& spec, std::uint64_t cap) {
  Report report;
  const int q = spec.q();
  const Region& r = spec.geometry();
  const JointTable joint = exact_joint_measure(spec, FreeBoundary{}, cap);
  const double log_es = joint.log_partition();
  const auto potts = exact_spin_measure(spec.with_beta(q * spec.beta), Hamiltonian::potts, {}, cap);
  CompensatedSum jsum;
  for (int e = 0; e < r.num_inner_bonds(); ++e) jsum += spec.couplings[static_cast<std::size_t>(e)];
  const double log_c = q * spec.beta * jsum.value();
  report.add("potts_vs_es", relative_error_from_logs(potts.log_partition(), log_c + log_es), kIdentityTolerance);
  const auto grc = exact_edge_measure(with_unit_weights(spec), FreeBoundary{}, BernoulliConvention::p, cap);
  report.add("es_vs_grc", relative_error_from_logs(log_es, grc.log_partition()), kIdentityTolerance);
  if (q == 2) {
    const auto rc = exact_rc_measure_q2(spec, cap);
    // the cosh form only sees the half-difference of the two colors' fields
    CompensatedSum mean_field;
    for (int i = 0; i < r.num_inner(); ++i) {
      const auto site = spec.field.site(static_cast<std::size_t>(i));
      mean_field += 0.5 * (site[0] + site[1]);
    }
    report.add("es_vs_rc", relative_error_from_logs(log_es, rc.log_partition() + spec.beta * mean_field.value()),
               kIdentityTolerance);
  }
  return report;
}

Report verify_cluster_sums(const ModelSpec& spec, std::uint64_t cap) {
  if (spec.q() != 2) throw std::invalid_argument("cluster-sum identities require q = 2");
  const Region& r = spec.geometry();
  const int n = r.num_inner();
  const int ne = r.num_inner_bonds();
  const std::uint64_t spins = checked_power(2, static_cast<std::size_t>(n), cap, "cluster-sum enumeration");
  const std::uint64_t masks = checked_power(2, static_cast<std::size_t>(ne), cap, "cluster-sum enumeration");
  if (spins > cap / masks) throw CapExceeded("cluster-sum enumeration exceeds cap of " + std::to_string(cap));
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) h[static_cast<std::size_t>(i)] = spec.beta * spec.field.ising_value(static_cast<std::size_t>(i));

  double worst_full = 0.0;
  double worst_pair = 0.0;
  double worst_site = 0.0;
  const auto nn = static_cast<std::size_t>(n);
  std::vector<CompensatedSum> pair(nn * nn);
  std::vector<CompensatedSum> site(nn * 2);
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    const EdgeConfig omega = EdgeConfig::from_mask(mask, static_cast<std::size_t>(ne));
    CompensatedSum full;
    std::fill(pair.begin(), pair.end(), CompensatedSum{});
    std::fill(site.begin(), site.end(), CompensatedSum{});
    for (std::uint64_t s = 0; s < spins; ++s) {
      bool ok = true;
      for (int e = 0; e < ne && ok; ++e) {
        if (!omega.open(static_cast<std::size_t>(e))) continue;
        const Edge& edge = r.graph().edge(e);
        ok = ((s >> edge.u) & 1u) == ((s >> edge.v) & 1u);
      }
      if (!ok) continue;
      double expo = 0.0;
      for (int i = 0; i < n; ++i) expo += ((s >> i) & 1u) ? -h[static_cast<std::size_t>(i)] : h[static_cast<std::size_t>(i)];
      const double w = std::exp(expo);
      full += w;
      for (int x = 0; x < n; ++x) {
        site[static_cast<std::size_t>(x) * 2 + ((s >> x) & 1u)] += w;
        for (int y = x + 1; y < n; ++y) {
          if (((s >> x) & 1u) == ((s >> y) & 1u)) pair[static_cast<std::size_t>(x) * nn + static_cast<std::size_t>(y)] += w;
        }
      }
    }
    const auto dec = components(r, omega, ComponentScope::inner_only);
    std::vector<double> cluster_h;
    double log_prod = 0.0;
    for (const auto& c : dec.clusters) {
      double s = 0.0;
      for (int v : c) s += h[static_cast<std::size_t>(v)];
      cluster_h.push_back(s);
      log_prod += log_two_cosh(s);
    }
    auto cluster_index = [&](int v) {
      const int label = dec.labels[static_cast<std::size_t>(v)];
      for (std::size_t k = 0; k < dec.clusters.size(); ++k)
        if (dec.clusters[k].front() == label) return k;
      return std::size_t{0};
    };
    worst_full = std::max(worst_full, relative_error_from_logs(std::log(full.value()), log_prod));
    for (int x = 0; x < n; ++x) {
      const std::size_t t = cluster_index(x);
      const double rest = log_prod - log_two_cosh(cluster_h[t]);
      worst_site = std::max(worst_site, relative_error_from_logs(std::log(site[static_cast<std::size_t>(x) * 2].value()), cluster_h[t] + rest));
      worst_site = std::max(worst_site, relative_error_from_logs(std::log(site[static_cast<std::size_t>(x) * 2 + 1].value()), -cluster_h[t] + rest));
      for (int y = x + 1; y < n; ++y) {
        const std::size_t u = cluster_index(y);
        double expected = log_prod;
        if (t != u) {
          expected = log_prod - log_two_cosh(cluster_h[t]) - log_two_cosh(cluster_h[u]) +
                     log_two_cosh(cluster_h[t] + cluster_h[u]);
        }
        worst_pair = std::max(
            worst_pair, relative_error_from_logs(std::log(pair[static_cast<std::size_t>(x) * nn + static_cast<std::size_t>(y)].value()), expected));
      }
    }
  }
  Report report;
  report.add("cluster_sum_full", worst_full, kIdentityTolerance);
  report.add("cluster_sum_pinned_pair", worst_pair, kIdentityTolerance);
  report.add("cluster_sum_pinned_site", worst_site, kIdentityTolerance);
  return report;
}

Report verify_spin_identification(const ModelSpec& spec, std::uint64_t cap) {
  if (spec.q() != 2) throw std::invalid_argument("spin identification requires q = 2");
  const auto ising = exact_spin_measure(spec, Hamiltonian::ising, {}, cap);
  const auto potts = exact_spin_measure(spec.with_beta(2.0 * spec.beta), Hamiltonian::potts, {}, cap);
  double worst = 0.0;
  for (std::size_t k = 0; k < ising.size(); ++k) worst = std::max(worst, std::abs(ising.probability(k) - potts.probability(k)));
  Report report;
  report.add("spin_identification", worst, kExactTolerance);
  return report;
}

}  // namespace rcfield
