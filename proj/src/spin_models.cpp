#include "rcfield/spin_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rcfield/parallel.hpp"

namespace rcfield {

namespace {

void check_config(const ModelSpec& spec, std::span<const int> sigma, const SpinBoundary& bc) {
  const Region& region = spec.geometry();
  if (static_cast<int>(sigma.size()) != region.num_inner()) {
    throw std::invalid_argument("spin configuration covers " + std::to_string(sigma.size()) + " sites, region has " +
                                std::to_string(region.num_inner()));
  }
  for (int c : sigma) {
    if (c < 0 || c >= spec.q()) throw std::invalid_argument("spin color out of range");
  }
  if (bc.is_fixed()) {
    if (static_cast<int>(bc.mu->size()) != region.num_boundary()) {
      throw std::invalid_argument("fixed boundary must assign every boundary site");
    }
    for (int c : *bc.mu) {
      if (c < 0 || c >= spec.q()) throw std::invalid_argument("boundary color out of range");
    }
  }
}

int boundary_color(const Region& region, const SpinBoundary& bc, int vertex) {
  return (*bc.mu)[static_cast<std::size_t>(vertex - region.num_inner())];
}

}  // namespace

double ising_energy(const ModelSpec& spec, std::span<const int> sigma, const SpinBoundary& bc) {
  if (spec.q() != 2) throw std::invalid_argument("Ising energy requires q = 2");
  check_config(spec, sigma, bc);
  const Region& region = spec.geometry();
  const FiniteGraph& g = region.graph();
  CompensatedSum e;
  for (int b = 0; b < region.num_inner_bonds(); ++b) {
    const Edge& edge = g.edge(b);
    e += -spec.couplings[static_cast<std::size_t>(b)] * ising_spin(sigma[static_cast<std::size_t>(edge.u)]) *
         ising_spin(sigma[static_cast<std::size_t>(edge.v)]);
  }
  for (int i = 0; i < region.num_inner(); ++i) {
    e += -spec.field.ising_value(static_cast<std::size_t>(i)) * ising_spin(sigma[static_cast<std::size_t>(i)]);
  }
  if (bc.is_fixed()) {
    for (int b = region.num_inner_bonds(); b < region.num_all_bonds(); ++b) {
      const Edge& edge = g.edge(b);
      const int inner = region.is_inner(edge.u) ? edge.u : edge.v;
      const int outer = inner == edge.u ? edge.v : edge.u;
      e += -spec.couplings[static_cast<std::size_t>(b)] * ising_spin(sigma[static_cast<std::size_t>(inner)]) *
           ising_spin(boundary_color(region, bc, outer));
    }
  }
  return e.value();
}

double potts_energy(const ModelSpec& spec, std::span<const int> sigma, const SpinBoundary& bc) {
  check_config(spec, sigma, bc);
  const Region& region = spec.geometry();
  const FiniteGraph& g = region.graph();
  const double q = spec.q();
  CompensatedSum e;
  for (int b = 0; b < region.num_inner_bonds(); ++b) {
    const Edge& edge = g.edge(b);
    if (sigma[static_cast<std::size_t>(edge.u)] == sigma[static_cast<std::size_t>(edge.v)]) {
      e += -spec.couplings[static_cast<std::size_t>(b)];
    }
  }
  for (int i = 0; i < region.num_inner(); ++i) {
    const double h = spec.field.at(static_cast<std::size_t>(i), sigma[static_cast<std::size_t>(i)]);
    if (h == kMinusInfinity) return std::numeric_limits<double>::infinity();
    e += -h / q;
  }
  if (bc.is_fixed()) {
    for (int b = region.num_inner_bonds(); b < region.num_all_bonds(); ++b) {
      const Edge& edge = g.edge(b);
      const int inner = region.is_inner(edge.u) ? edge.u : edge.v;
      const int outer = inner == edge.u ? edge.v : edge.u;
      if (sigma[static_cast<std::size_t>(inner)] == boundary_color(region, bc, outer)) {
        e += -spec.couplings[static_cast<std::size_t>(b)];
      }
    }
  }
  return e.value();
}

ExactDistribution::ExactDistribution(int q, int num_sites, std::vector<double> shifted_weights, double log_scale)
    : q_(q), num_sites_(num_sites), weights_(std::move(shifted_weights)), log_scale_(log_scale) {
  CompensatedSum s;
  for (double w : weights_) s += w;
  z_ = s.value();
  if (!(z_ > 0.0)) throw DegenerateMeasure("every spin configuration has zero weight");
  strides_.resize(static_cast<std::size_t>(num_sites_));
  std::size_t stride = 1;
  for (int k = 0; k < num_sites_; ++k) {
    strides_[static_cast<std::size_t>(k)] = stride;
    stride *= static_cast<std::size_t>(q_);
  }
}

int ExactDistribution::color(std::size_t index, int site) const {
  return static_cast<int>((index / strides_.at(static_cast<std::size_t>(site))) % static_cast<std::size_t>(q_));
}

SpinConfig ExactDistribution::config(std::size_t index) const {
  SpinConfig sigma(static_cast<std::size_t>(num_sites_));
  for (int k = 0; k < num_sites_; ++k) {
    sigma[static_cast<std::size_t>(k)] = static_cast<int>(index % static_cast<std::size_t>(q_));
    index /= static_cast<std::size_t>(q_);
  }
  return sigma;
}

ExactDistribution exact_spin_measure(const ModelSpec& spec, Hamiltonian kind, const SpinBoundary& bc,
                                     std::uint64_t cap) {
  const int q = spec.q();
  if (kind == Hamiltonian::ising && q != 2) throw std::invalid_argument("Ising measure requires q = 2");
  const int n = spec.geometry().num_inner();
  const std::uint64_t total = checked_power(static_cast<std::uint64_t>(q), static_cast<std::size_t>(n), cap,
                                            "spin enumeration");
  std::vector<double> logw(total);
  const unsigned chunks = chunk_count(total);
  std::vector<double> chunk_max(chunks, kMinusInfinity);
  parallel_chunks(total, [&](unsigned chunk, std::uint64_t begin, std::uint64_t end) {
    SpinConfig sigma(static_cast<std::size_t>(n));
    double hi = kMinusInfinity;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      std::uint64_t rest = idx;
      for (int k = 0; k < n; ++k) {
        sigma[static_cast<std::size_t>(k)] = static_cast<int>(rest % static_cast<std::uint64_t>(q));
        rest /= static_cast<std::uint64_t>(q);
      }
      const double energy = kind == Hamiltonian::ising ? ising_energy(spec, sigma, bc) : potts_energy(spec, sigma, bc);
      const double lw = std::isinf(energy) ? kMinusInfinity : -spec.beta * energy;
      logw[idx] = lw;
      hi = std::max(hi, lw);
    }
    chunk_max[chunk] = hi;
  });
  const double scale = *std::max_element(chunk_max.begin(), chunk_max.end());
  if (scale == kMinusInfinity) throw DegenerateMeasure("every spin configuration has zero weight");
  for (double& w : logw) w = std::exp(w - scale);
  return ExactDistribution(q, n, std::move(logw), scale);
}

double agreement_probability(const ExactDistribution& dist, int x, int y) {
  return dist.expectation([&](std::size_t k) { return dist.color(k, x) == dist.color(k, y) ? 1.0 : 0.0; });
}

double color_probability(const ExactDistribution& dist, int x, int color) {
  return dist.expectation([&](std::size_t k) { return dist.color(k, x) == color ? 1.0 : 0.0; });
}

double spin_correlation(const ExactDistribution& dist, int x, int y) {
  if (dist.q() != 2) throw std::invalid_argument("spin correlation requires q = 2");
  return dist.expectation(
      [&](std::size_t k) { return static_cast<double>(ising_spin(dist.color(k, x)) * ising_spin(dist.color(k, y))); });
}

double spin_expectation(const ExactDistribution& dist, int x) {
  if (dist.q() != 2) throw std::invalid_argument("spin expectation requires q = 2");
  return dist.expectation([&](std::size_t k) { return static_cast<double>(ising_spin(dist.color(k, x))); });
}

double mean_magnetization(const ExactDistribution& dist) {
  const int n = dist.num_sites();
  const double q = dist.q();
  if (n == 0 || dist.q() < 2) return 0.0;
  return dist.expectation([&](std::size_t k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += dist.color(k, i) == 0 ? q - 1.0 : -1.0;
    return acc / ((q - 1.0) * n);
  });
}

double two_point_tau(const ModelSpec& spec, int x, int y, std::uint64_t cap) {
  const Region& region = spec.geometry();
  if (x == y) throw std::invalid_argument("two-point function needs distinct sites");
  if (x < 0 || y < 0 || !region.is_inner(x) || !region.is_inner(y)) {
    throw std::out_of_range("two-point function needs inner sites");
  }
  const auto dist = exact_spin_measure(spec, Hamiltonian::potts, {}, cap);
  return agreement_probability(dist, x, y) - 1.0 / spec.q();
}

}  // namespace rcfield
