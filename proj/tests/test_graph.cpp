#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rcfield/graph.hpp"

using namespace rcfield;

TEST_SUITE("graph") {

TEST_CASE("lattice box layout") {
  const int sides[] = {2, 3};
  const Region r = make_lattice_box(2, sides);
  CHECK(r.num_inner() == 6);
  CHECK(r.num_boundary() == 10);
  CHECK(r.num_inner_bonds() == 7);
  CHECK(r.num_boundary_bonds() == 10);
  CHECK(r.lattice_embedded());
  for (int e = 0; e < r.num_inner_bonds(); ++e) {
    CHECK(r.is_inner(r.graph().edge(e).u));
    CHECK(r.is_inner(r.graph().edge(e).v));
  }
  for (int e = r.num_inner_bonds(); e < r.num_all_bonds(); ++e) {
    const auto& ed = r.graph().edge(e);
    CHECK(r.is_inner(ed.u) != r.is_inner(ed.v));
  }
  // every inner vertex of a 2x3 box touches the boundary
  CHECK(r.inner_boundary_layer().size() == 6);
}

TEST_CASE("centered box contains the origin") {
  const Region r = make_centered_box(2, 4);
  const int zero[] = {0, 0};
  const auto idx = r.graph().index_of_coords(zero);
  REQUIRE(idx.has_value());
  CHECK(r.is_inner(*idx));
  CHECK(r.num_inner() == 16);
  CHECK(r.inner_boundary_layer().size() == 12);
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(FiniteGraph({{0, {}}, {1, {}}}, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteGraph({{0, {}}, {1, {}}}, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteGraph({{0, {}}, {0, {}}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteGraph({{0, {}}}, {{0, 3}}), std::invalid_argument);
}

TEST_CASE("from_graph drops boundary-boundary edges") {
  const FiniteGraph g({{0, {}}, {1, {}}, {2, {}}}, {{0, 1}, {1, 2}, {0, 2}});
  const int boundary[] = {1, 2};
  const Region r = Region::from_graph(g, boundary);
  CHECK(r.num_inner() == 1);
  CHECK(r.num_all_bonds() == 2);
  CHECK(r.num_inner_bonds() == 0);
}

TEST_CASE("union-find components agree with breadth-first search") {
  std::mt19937_64 rng(7);
  const int sides[] = {3, 3};
  const Region r = make_lattice_box(2, sides);
  std::bernoulli_distribution coin(0.45);
  for (int trial = 0; trial < 200; ++trial) {
    EdgeConfig omega;
    std::vector<std::pair<int, int>> open;
    for (int e = 0; e < r.num_all_bonds(); ++e) {
      const bool o = coin(rng);
      omega.bits.push_back(o ? 1 : 0);
      if (o) open.emplace_back(r.graph().edge(e).u, r.graph().edge(e).v);
    }
    const auto dec = components(r, omega, ComponentScope::inner_plus_boundary);
    const auto ref = oracle::bfs_labels(r.num_vertices(), open);
    for (int x = 0; x < r.num_vertices(); ++x) {
      for (int y = 0; y < r.num_vertices(); ++y) {
        CHECK(is_connected(dec, x, y) == (ref[static_cast<std::size_t>(x)] == ref[static_cast<std::size_t>(y)]));
      }
    }
    // canonical labels: smallest member, clusters in increasing label order
    for (std::size_t c = 0; c < dec.clusters.size(); ++c) {
      CHECK(dec.clusters[c].front() == dec.labels[static_cast<std::size_t>(dec.clusters[c].front())]);
      if (c > 0) CHECK(dec.clusters[c - 1].front() < dec.clusters[c].front());
    }
  }
}

TEST_CASE("component scope size is checked") {
  const Region r = make_centered_box(2, 2);
  CHECK_THROWS_AS(components(r, EdgeConfig::all(3, true), ComponentScope::inner_only), std::invalid_argument);
  const auto dec = components(r, EdgeConfig::all(static_cast<std::size_t>(r.num_inner_bonds()), true),
                              ComponentScope::inner_only);
  CHECK(dec.count() == 1);
  CHECK_THROWS_AS(is_connected(dec, 0, 99), std::out_of_range);
}

TEST_CASE("edge config masks round trip") {
  for (std::uint64_t m : {0ull, 5ull, 1023ull}) CHECK(EdgeConfig::from_mask(m, 10).mask() == m);
}

}
