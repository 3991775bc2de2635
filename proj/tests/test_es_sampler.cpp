#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "rcfield/corpus.hpp"
#include "rcfield/es_coupling.hpp"
#include "rcfield/sampler.hpp"

using namespace rcfield;

namespace {

void require_passed(const Report& r) {
  for (const auto& c : r.checks) {
    INFO(c.name << " discrepancy " << c.discrepancy);
    CHECK(c.passed());
  }
}

ModelSpec uniform_model(std::shared_ptr<const Region> r, double beta, double j, FieldSpec f) {
  const auto ne = static_cast<std::size_t>(r->num_all_bonds());
  return ModelSpec(std::move(r), beta, CouplingConstants::uniform(ne, j), std::move(f));
}

double within_sigmas(double est, double se, double exact) { return std::abs(est - exact) / se; }

}  // namespace

TEST_SUITE("es_coupling") {

TEST_CASE("marginals of the joint measure") {
  std::mt19937_64 rng(21);
  for (int q : {2, 3, 4}) {
    for (const auto& g : corpus()) {
      if (g.region->num_inner() > 5 && q > 2) continue;
      const auto spec = with_unit_weights(random_model(g.region, q, rng));
      require_passed(verify_marginals(spec));
    }
  }
}

TEST_CASE("wired marginals") {
  std::mt19937_64 rng(22);
  for (const auto& g : wired_corpus()) {
    if (g.region->num_all_bonds() > 8) continue;
    const auto spec = with_unit_weights(random_model(g.region, 3, rng));
    for (int m = 0; m < 3; ++m) require_passed(verify_marginals(spec, WiredBoundary{m}));
  }
}

TEST_CASE("identities on the corpus") {
  std::mt19937_64 rng(23);
  for (const auto& g : corpus()) {
    const int n = g.region->num_inner();
    const auto s2 = random_model(g.region, 2, rng);
    require_passed(verify_partition_identities(s2));
    require_passed(verify_cluster_sums(s2));
    require_passed(verify_spin_identification(s2));
    for (int q : {2, 3}) {
      auto zero = random_model(g.region, q, rng);
      zero = zero.with_field(FieldSpec::zero(q, zero.field.num_sites()));
      if (n >= 2) require_passed(verify_correlation_connectivity(zero, 0, n - 1));
      if (n >= 1) require_passed(verify_single_spin(zero, 0));
    }
  }
}

TEST_CASE("incompatible pairs have zero weight") {
  auto r = corpus_graph("path3").region;
  const auto spec = uniform_model(r, 0.7, 1.0, FieldSpec::zero(2, 3));
  JointConfig j{{0, 0, 1}, EdgeConfig{{1, 1}}};
  CHECK_FALSE(compatible(spec, j));
  CHECK(es_weight(spec, j) == 0.0);
  j.sigma = {1, 1, 1};
  CHECK(compatible(spec, j));
  const double p = -std::expm1(-0.7 * 2.0);
  CHECK(es_weight(spec, j) == doctest::Approx(p * p).epsilon(1e-14));
}

TEST_CASE("cluster color laws") {
  auto r = corpus_graph("path3").region;
  const FieldSpec f(2, 3, {1.0, 0.0, 0.0, 0.5, 0.0, 0.0}, {1.0, 3.0});
  const auto spec = uniform_model(r, 0.5, 1.0, f);
  const auto laws = conditional_spins_given_edges(spec, EdgeConfig{{1, 0}});
  REQUIRE(laws.size() == 2);
  const auto& joined = laws[0].members.size() == 2 ? laws[0] : laws[1];
  const double a = 1.0 * std::exp(0.5 * 1.0);
  const double b = 3.0 * std::exp(0.5 * 0.5);
  CHECK(joined.probabilities[0] == doctest::Approx(a / (a + b)));
  for (const auto& l : laws)
    CHECK(std::accumulate(l.probabilities.begin(), l.probabilities.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("total variation") {
  const double a[] = {0.5, 0.5, 0.0};
  const double b[] = {0.25, 0.5, 0.25};
  CHECK(total_variation(a, b) == doctest::Approx(0.25));
}

}

TEST_SUITE("sampler") {

TEST_CASE("fixed seeds reproduce the series") {
  std::mt19937_64 rng(31);
  const auto spec = with_unit_weights(random_model(corpus_graph("box2x2").region, 2, rng));
  SamplerSettings s;
  s.sweeps = 2000;
  s.chains = 2;
  s.seed = 99;
  const auto a = estimate(spec, FreeBoundary{}, Observable::magnetization(), s);
  const auto b = estimate(spec, FreeBoundary{}, Observable::magnetization(), s);
  CHECK(a.samples == b.samples);
  s.seed = 100;
  const auto c = estimate(spec, FreeBoundary{}, Observable::magnetization(), s);
  CHECK(a.samples != c.samples);
}

TEST_CASE("batch means") {
  const auto s = summarize({1.0, 1.0, 3.0, 3.0}, 2);
  CHECK(s.mean == 2.0);
  CHECK(s.n_batches == 2);
  CHECK(s.std_error == doctest::Approx(1.0));
}

TEST_CASE("joint histogram approaches the exact joint law") {
  std::mt19937_64 rng(32);
  const auto spec = with_unit_weights(random_model(corpus_graph("triangle").region, 2, rng));
  const auto exact = exact_joint_measure(spec);
  const int n = exact.num_sites();
  const ObservableFn index = [n](const ChainState& s) {
    std::size_t spin = 0;
    for (int i = n - 1; i >= 0; --i) spin = spin * 2 + static_cast<std::size_t>(s.colors[static_cast<std::size_t>(i)]);
    std::uint64_t mask = 0;
    for (std::size_t e = 0; e < s.bits.size(); ++e) mask |= static_cast<std::uint64_t>(s.bits[e]) << e;
    return static_cast<double>(mask * (std::size_t{1} << n) + spin);
  };
  SamplerSettings st;
  st.sweeps = 100000;
  const auto series = estimate(spec, FreeBoundary{}, index, st);
  std::vector<double> hist(exact.size(), 0.0);
  for (double v : series.samples) hist[static_cast<std::size_t>(v)] += 1.0 / static_cast<double>(series.samples.size());
  std::vector<double> p(exact.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = exact.probability(k);
  CHECK(total_variation(hist, p) < 0.02);
}

TEST_CASE("free magnetization against enumeration") {
  std::mt19937_64 rng(33);
  const auto spec = with_unit_weights(random_model(corpus_graph("box2x3").region, 2, rng));
  const double exact = mean_magnetization(exact_spin_measure(spec, Hamiltonian::ising));
  SamplerSettings st;
  st.sweeps = 40000;
  for (Dynamics d : {Dynamics::edwards_sokal, Dynamics::glauber}) {
    st.dynamics = d;
    const auto e = estimate(spec, FreeBoundary{}, Observable::magnetization(), st);
    CHECK(within_sigmas(e.mean, e.std_error, exact) < 3.0);
  }
}

TEST_CASE("wired and general boundary edge observables against enumeration") {
  std::mt19937_64 rng(34);
  auto r = corpus_graph("box2x2_wired").region;
  auto spec = with_unit_weights(random_model(r, 2, rng));
  spec = spec.with_field(random_common_max_field(2, spec.field.num_sites(), rng));
  std::vector<int> all(static_cast<std::size_t>(r->num_vertices()));
  std::iota(all.begin(), all.end(), 0);
  const int m = field_summary(spec.field, all).common_max.front();
  SamplerSettings st;
  st.sweeps = 40000;

  const auto tw = exact_edge_measure(spec, WiredBoundary{m});
  const auto ew = estimate(spec, WiredBoundary{m}, Observable::percolation(0), st);
  CHECK(within_sigmas(ew.mean, ew.std_error, percolation(tw, 0)) < 3.0);

  // exterior partially open, anchored at one boundary vertex
  const auto nb = static_cast<std::size_t>(r->num_boundary_bonds());
  std::vector<std::uint8_t> ext(nb, 0);
  for (std::size_t k = 0; k < nb; k += 2) ext[k] = 1;
  const std::vector<int> infinite{r->boundary().front()};
  const auto gb = make_general_boundary(*r, r->inner(), WindowBonds::inner, ext, infinite);
  const auto tg = exact_edge_measure(spec, gb);
  const auto eg = estimate(spec, gb, Observable::connectivity(0, 3), st);
  CHECK(within_sigmas(eg.mean, eg.std_error, connectivity(tg, 0, 3)) < 3.0);
}

TEST_CASE("wired glauber magnetization matches the edwards-sokal chain") {
  std::mt19937_64 rng(35);
  const auto spec = with_unit_weights(random_model(corpus_graph("box1x2_wired").region, 2, rng)).with_beta(0.15);
  SamplerSettings st;
  st.sweeps = 40000;
  const auto es = estimate(spec, WiredBoundary{0}, Observable::magnetization(), st);
  st.dynamics = Dynamics::glauber;
  const auto gl = estimate(spec, WiredBoundary{0}, Observable::magnetization(), st);
  REQUIRE(es.std_error > 0.0);
  CHECK(std::abs(es.mean - gl.mean) < 3.0 * std::hypot(es.std_error, gl.std_error));
}

TEST_CASE("non-unit color constants are rejected") {
  auto r = corpus_graph("single_edge").region;
  const auto spec = uniform_model(r, 1.0, 1.0, FieldSpec(2, 2, {0, 0, 0, 0}, {1.0, 2.0}));
  CHECK_THROWS_AS(EsSampler(spec, FreeBoundary{}), std::invalid_argument);
}

}
