#include "rcfield/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rcfield/numeric.hpp"

namespace rcfield {

CouplingConstants CouplingConstants::uniform(std::size_t num_edges, double j) {
  if (!(j >= 0.0)) throw std::invalid_argument("coupling constants must be >= 0");
  return CouplingConstants{std::vector<double>(num_edges, j)};
}

double CouplingConstants::total() const {
  CompensatedSum s;
  for (double j : values) s += j;
  return s.value();
}

EdgeWeights edge_weights(const CouplingConstants& couplings, double beta, int q) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  EdgeWeights w;
  const std::size_t n = couplings.size();
  w.p.resize(n);
  w.r.resize(n);
  w.log_p.resize(n);
  w.log_one_minus_p.resize(n);
  w.log_r.resize(n);
  for (std::size_t e = 0; e < n; ++e) {
    const double j = couplings[e];
    if (!(j >= 0.0)) throw std::invalid_argument("coupling constant on edge " + std::to_string(e) + " is negative");
    const double x = q * beta * j;
    w.p[e] = -std::expm1(-x);
    w.r[e] = std::expm1(x);
    w.log_one_minus_p[e] = -x;
    w.log_p[e] = x == 0.0 ? kMinusInfinity : std::log(w.p[e]);
    w.log_r[e] = log_expm1(x);
  }
  return w;
}

FieldSpec::FieldSpec(int q, std::size_t num_sites, std::vector<double> values, std::vector<double> qp)
    : q_(q), num_sites_(num_sites), values_(std::move(values)), qp_(std::move(qp)) {
  if (q_ < 1) throw std::invalid_argument("q must be >= 1");
  if (values_.size() != num_sites_ * static_cast<std::size_t>(q_)) {
    throw std::invalid_argument("field has " + std::to_string(values_.size()) + " values, expected " +
                                std::to_string(num_sites_ * static_cast<std::size_t>(q_)));
  }
  if (qp_.empty()) qp_.assign(static_cast<std::size_t>(q_), 1.0);
  if (qp_.size() != static_cast<std::size_t>(q_)) throw std::invalid_argument("expected one q_p per color");
  for (double c : qp_) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("q_p constants must be positive and finite");
  }
  for (std::size_t s = 0; s < num_sites_; ++s) {
    bool any_finite = false;
    for (int p = 0; p < q_; ++p) {
      const double v = at(s, p);
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("field value at site " + std::to_string(s) + " is not a real number");
      }
      any_finite = any_finite || std::isfinite(v);
    }
    if (!any_finite) throw std::invalid_argument("site " + std::to_string(s) + " forbids every color");
  }
}

FieldSpec FieldSpec::zero(int q, std::size_t num_sites) {
  return FieldSpec(q, num_sites, std::vector<double>(num_sites * static_cast<std::size_t>(q), 0.0));
}

FieldSpec FieldSpec::ising(std::span<const double> h) {
  std::vector<double> values;
  values.reserve(2 * h.size());
  for (double x : h) {
    values.push_back(x);
    values.push_back(-x);
  }
  return FieldSpec(2, h.size(), std::move(values));
}

bool FieldSpec::unit_weights() const {
  return std::all_of(qp_.begin(), qp_.end(), [](double c) { return c == 1.0; });
}

double FieldSpec::ising_value(std::size_t site) const {
  if (q_ != 2) throw std::invalid_argument("Ising field requires q = 2");
  const double a = at(site, 0);
  const double b = at(site, 1);
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("Ising field requires finite values");
  return 0.5 * (a - b);
}

FieldSpec FieldSpec::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("field scale factor must be positive");
  std::vector<double> v = values_;
  for (double& x : v) x *= factor;
  return FieldSpec(q_, num_sites_, std::move(v), qp_);
}

FieldSpec make_power_law_field(double hstar, double alpha, Norm norm, const Region& region) {
  if (!(hstar > 0.0)) throw std::invalid_argument("hstar must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!region.lattice_embedded()) throw std::invalid_argument("power-law field needs a lattice-embedded region");
  const int n = region.num_vertices();
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& c = region.graph().vertex(i).coords;
    double len = 0.0;
    if (norm == Norm::euclidean) {
      double sq = 0.0;
      for (int x : c) sq += static_cast<double>(x) * x;
      len = std::sqrt(sq);
    } else {
      for (int x : c) len = std::max(len, static_cast<double>(std::abs(x)));
    }
    h[static_cast<std::size_t>(i)] = len == 0.0 ? hstar : hstar / std::pow(len, alpha);
  }
  return FieldSpec::ising(h);
}

double field_sum(const FieldSpec& field, double beta, std::span<const int> cluster, int color) {
  if (color < 0 || color >= field.q()) throw std::out_of_range("color " + std::to_string(color) + " out of range");
  CompensatedSum s;
  for (int i : cluster) {
    const double v = field.at(static_cast<std::size_t>(i), color);
    if (v == kMinusInfinity) return kMinusInfinity;
    s += v;
  }
  return beta * s.value();
}

FieldSummary field_summary(const FieldSpec& field, std::span<const int> scope) {
  FieldSummary out;
  const int q = field.q();
  std::vector<int> count(static_cast<std::size_t>(q), 0);
  for (int i : scope) {
    const auto values = field.site(static_cast<std::size_t>(i));
    const double hmax = *std::max_element(values.begin(), values.end());
    std::vector<int> set;
    for (int p = 0; p < q; ++p) {
      if (values[static_cast<std::size_t>(p)] == hmax) {
        set.push_back(p);
        ++count[static_cast<std::size_t>(p)];
      }
    }
    out.hmax.push_back(hmax);
    out.qmax_sets.push_back(std::move(set));
  }
  for (int p = 0; p < q; ++p) {
    if (count[static_cast<std::size_t>(p)] == static_cast<int>(scope.size())) {
      out.common_max.push_back(p);
      out.qsum += field.qp(p);
    }
  }
  return out;
}

namespace {
/// h_k - h_l under the e^{-inf} = 0 convention; equal sentinels give 0.
double color_gap(double hk, double hl) {
  if (hk == kMinusInfinity && hl == kMinusInfinity) return 0.0;
  return hk - hl;
}
}  // namespace

bool field_leq(const FieldSpec& h, const FieldSpec& hprime) {
  if (h.q() != hprime.q() || h.num_sites() != hprime.num_sites()) {
    throw std::invalid_argument("fields differ in color count or site count");
  }
  for (std::size_t i = 0; i < h.num_sites(); ++i) {
    for (int k = 0; k < h.q(); ++k) {
      for (int l = 0; l < h.q(); ++l) {
        const double d = color_gap(h.at(i, k), h.at(i, l));
        if (d > 0.0 && !(d <= color_gap(hprime.at(i, k), hprime.at(i, l)))) return false;
      }
    }
  }
  return true;
}

}  // namespace rcfield
