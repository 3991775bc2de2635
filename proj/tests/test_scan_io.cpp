#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "rcfield/corpus.hpp"
#include "rcfield/io.hpp"
#include "rcfield/phase_scan.hpp"

using namespace rcfield;

namespace {

ScanRecord record(double beta, int side, const char* bc, double est, double se) {
  ScanRecord r;
  r.beta = beta;
  r.side = side;
  r.bc = bc;
  r.estimate = est;
  r.std_error = se;
  return r;
}

std::string error_location(const std::string& text) {
  try {
    parse_model(text);
  } catch (const InputError& e) {
    return e.where();
  }
  return "";
}

}  // namespace

TEST_SUITE("phase_scan") {

TEST_CASE("zero temperature limit and zero coupling") {
  ScanConfig c;
  c.beta_grid = {0.0};
  c.box_sides = {3};
  c.sampler.sweeps = 200;
  for (const auto& r : run_scan(c)) CHECK(r.estimate == 0.0);

  c.beta_grid = {1.0};
  c.coupling = 50.0;
  for (const auto& r : run_scan(c)) CHECK(r.estimate == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("automatic mode picks enumeration for small domains") {
  ScanConfig c;
  c.beta_grid = {0.4};
  c.box_sides = {3};
  c.sampler.sweeps = 200;
  const auto recs = run_scan(c);
  REQUIRE(recs.size() == 2);
  for (const auto& r : recs) {
    // 12 inner bonds, 24 with the boundary bonds
    CHECK(r.mode == (r.bc == "free" ? ScanMode::exact : ScanMode::monte_carlo));
  }
}

TEST_CASE("free never exceeds wired") {
  ScanConfig c;
  c.dimension = 1;
  c.alpha_grid = {0.5, 2.0};
  c.beta_grid = {0.1, 0.5, 1.5};
  c.box_sides = {3, 5, 7, 9};
  c.hstar = 0.7;
  c.mode = ScanMode::exact;
  for (const auto& t : gap_trend(run_scan(c))) {
    for (const auto& p : t.points) {
      CHECK(p.std_error == 0.0);
      CHECK(p.gap >= -1e-12);
    }
  }
}

TEST_CASE("wired percolation decreases with the box") {
  ScanConfig c;
  c.dimension = 1;
  c.hstar = 0.5;
  for (double beta : {0.2, 0.8}) {
    double last = 1.0;
    for (int side : {3, 5, 7, 9, 11}) {
      const auto spec = scan_model(c, 1.0, beta, side);
      const double p = percolation(exact_edge_measure(spec, WiredBoundary{0}), box_center(*spec.region));
      CHECK(p <= last + 1e-12);
      last = p;
    }
  }
}

TEST_CASE("exact and sampled scan points agree") {
  ScanConfig c;
  c.dimension = 1;
  c.beta_grid = {0.35};
  c.box_sides = {7};
  c.hstar = 1.0;
  c.alpha_grid = {1.0};
  c.mode = ScanMode::exact;
  const auto exact = run_scan(c);
  c.mode = ScanMode::monte_carlo;
  c.sampler.sweeps = 40000;
  const auto mc = run_scan(c);
  for (std::size_t k = 0; k < exact.size(); ++k) {
    CHECK(mc[k].bc == exact[k].bc);
    CHECK(std::abs(mc[k].estimate - exact[k].estimate) < 3.0 * mc[k].std_error);
  }
}

TEST_CASE("gap trends") {
  std::vector<ScanRecord> one{record(0.5, 4, "free", 0.1, 0.01), record(0.5, 4, "wired", 0.2, 0.01)};
  CHECK_THROWS_AS(gap_trend(one), std::invalid_argument);

  std::vector<ScanRecord> rs{record(0.5, 4, "free", 0.1, 0.001), record(0.5, 4, "wired", 0.3, 0.001),
                             record(0.5, 8, "free", 0.1, 0.001), record(0.5, 8, "wired", 0.2, 0.001),
                             record(0.7, 4, "free", 0.5, 0.01), record(0.7, 4, "wired", 0.5, 0.01),
                             record(0.7, 8, "free", 0.5, 0.01), record(0.7, 8, "wired", 0.51, 0.01)};
  const auto t = gap_trend(rs);
  REQUIRE(t.size() == 2);
  CHECK(t[0].beta == 0.5);
  CHECK(t[0].all_significant);
  CHECK(t[0].trend == Trend::persistent);
  CHECK(t[1].all_zero);
  CHECK(t[1].trend == Trend::zero);
  CHECK(t[0].label == "indicative");
  CHECK(t[0].points[1].gap == doctest::Approx(0.1));
  CHECK(t[0].points[1].std_error == doctest::Approx(std::sqrt(2.0) * 0.001));

  std::vector<ScanRecord> fading{record(0.5, 4, "free", 0.1, 0.001), record(0.5, 4, "wired", 0.3, 0.001),
                                 record(0.5, 8, "free", 0.1, 0.001), record(0.5, 8, "wired", 0.101, 0.001)};
  CHECK(gap_trend(fading)[0].trend == Trend::decreasing);
  std::vector<ScanRecord> growing{record(0.5, 4, "free", 0.1, 0.001), record(0.5, 4, "wired", 0.101, 0.001),
                                  record(0.5, 8, "free", 0.1, 0.001), record(0.5, 8, "wired", 0.3, 0.001)};
  CHECK(gap_trend(growing)[0].trend == Trend::increasing);
}

TEST_CASE("relative gap") {
  GapPoint p;
  p.wired = 0.5;
  p.free = 0.4;
  p.wired_std_error = 0.01;
  p.free_std_error = 0.02;
  const auto g = relative_gap(p);
  CHECK(g.value == doctest::Approx(0.2));
  CHECK(g.std_error == doctest::Approx(std::hypot(0.02 / 0.5, 0.8 * 0.01 / 0.5)));
}

TEST_CASE("crossings") {
  const double x[] = {0.0, 1.0, 2.0};
  const double a[] = {1.0, 1.0, 1.0};
  const double b[] = {0.0, 0.5, 2.0};
  const auto c = find_crossing(x, a, b);
  REQUIRE(c);
  CHECK(*c == doctest::Approx(4.0 / 3.0));
  const double d[] = {2.0, 2.0, 2.0};
  CHECK_FALSE(find_crossing(x, a, d));
}

TEST_CASE("csv output") {
  std::ostringstream out;
  const ScanRecord r = record(0.4, 8, "wired", 0.25, 0.01);
  write_scan_csv(out, std::span<const ScanRecord>(&r, 1));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# rcfield scan v1");
  std::getline(in, line);
  CHECK(line == "alpha,beta,side,bc,mode,estimate,stderr,sweeps,seed");
  std::getline(in, line);
  CHECK(line.find(",8,wired,exact,") != std::string::npos);
}

TEST_CASE("quasilocality event") {
  const int s23[] = {2, 3};
  auto r = share(make_lattice_box(2, s23));
  std::mt19937_64 rng(61);
  const auto spec = random_model(r, 2, rng);
  const int pair[] = {0, 1};
  const int single[] = {0};

  CHECK(m_event_probability(spec, FreeBoundary{}, single, single).value == 1.0);
  const auto saturated = spec.with_couplings(CouplingConstants::uniform(spec.couplings.size(), 60.0));
  CHECK(m_event_probability(saturated, FreeBoundary{}, pair, pair).value == doctest::Approx(1.0));

  std::vector<int> mid{0, 1, 2, 3};
  const std::vector<int> all = r->inner();
  double last = 0.0;
  for (const auto& outer : {std::vector<int>{0, 1}, mid, all}) {
    const double p = m_event_probability(spec, WiredBoundary{0}, outer, pair).value;
    CHECK(p >= last - 1e-12);
    last = p;
  }
  // without wiring nothing lies beyond the whole volume
  CHECK(m_event_probability(spec, FreeBoundary{}, all, pair).value == doctest::Approx(1.0));

  SamplerSettings st;
  st.sweeps = 20000;
  const auto ex = m_event_probability(spec, FreeBoundary{}, mid, pair);
  const auto mc = m_event_probability(spec, FreeBoundary{}, mid, pair, st);
  CHECK_FALSE(mc.exact);
  CHECK(std::abs(ex.value - mc.value) <= 3.0 * mc.std_error + 1e-12);
}

}

TEST_SUITE("io") {

TEST_CASE("model from the corpus") {
  const auto spec = parse_model(R"({"graph": {"corpus": "triangle"}, "q": 3, "beta": 0.5, "coupling": 1.5,
                                    "field": {"values": [[0, 1, 2], [0, 0, 0], [1, 1, 1]]}})");
  CHECK(spec.q() == 3);
  CHECK(spec.geometry().num_inner() == 3);
  CHECK(spec.couplings[2] == 1.5);
  CHECK(spec.field.at(0, 2) == 2.0);
}

TEST_CASE("boxes and power-law fields") {
  const auto spec = parse_model(R"({"graph": {"centered_box": {"dimension": 2, "side": 3}}, "beta": 0.8,
                                    "field": {"power_law": {"hstar": 1, "alpha": 0.5}}})");
  CHECK(spec.geometry().num_inner() == 9);
  CHECK(spec.field.ising_value(static_cast<std::size_t>(box_center(spec.geometry()))) == doctest::Approx(1.0));
}

TEST_CASE("explicit graphs with boundary ids") {
  const auto spec = parse_model(R"({"graph": {"vertices": [{"id": 10}, {"id": 20}, {"id": 30}],
                                              "edges": [[10, 20], [20, 30]], "boundary": [30]},
                                    "beta": 1, "field": {"ising": [0.1, 0.2, 0.3]}})");
  CHECK(spec.geometry().num_inner() == 2);
  CHECK(spec.geometry().num_boundary_bonds() == 1);
}

TEST_CASE("error locations") {
  CHECK(error_location("{\n  \"beta\": 1,\n  \"q\": 2,,\n}") == "line 3:10");
  CHECK(error_location(R"({"graph": {"corpus": "triangle"}, "beta": "x"})") == "/beta");
  CHECK(error_location(R"({"graph": {"corpus": "triangle"}, "beta": 1, "field": {"ising": [1, 2]}})") ==
        "/field/ising");
  CHECK(error_location(R"({"graph": {"corpus": "nowhere"}, "beta": 1})") == "/graph/corpus");
}

TEST_CASE("weight table round trip") {
  std::mt19937_64 rng(71);
  const auto t = testing_support::random_table(3, rng);
  std::stringstream s;
  write_weight_table(s, t);
  const auto back = read_weight_table(s);
  REQUIRE(back.size() == t.size());
  for (std::uint64_t m = 0; m < t.size(); ++m) CHECK(back.probability(m) == doctest::Approx(t.probability(m)).epsilon(1e-14));

  std::istringstream plain("# rcfield weight-table v1\nconfig,weight\n00,1\n10,2\n01,2\n11,1\n");
  const auto w = read_weight_table(plain);
  CHECK(w.probability(1) == doctest::Approx(1.0 / 3.0));
  std::istringstream unversioned("config,weight\n0,1\n1,1\n");
  CHECK_THROWS_AS(read_weight_table(unversioned), InputError);
  std::istringstream sparse("# rcfield weight-table v1\nconfig,weight\n00,1\n11,3\n");
  const auto sp = read_weight_table(sparse);
  CHECK(sp.probability(1) == 0.0);
  CHECK(sp.probability(3) == doctest::Approx(0.75));
  std::istringstream twice("# rcfield weight-table v1\nconfig,weight\n0,1\n0,2\n");
  CHECK_THROWS_AS(read_weight_table(twice), InputError);
}

TEST_CASE("boundary conditions") {
  const auto region = make_centered_box(2, 2);
  CHECK(std::holds_alternative<FreeBoundary>(parse_boundary("free", region)));
  const auto w = parse_boundary("wired:2", region);
  REQUIRE(std::holds_alternative<WiredBoundary>(w));
  CHECK(std::get<WiredBoundary>(w).color == 1);
  CHECK_THROWS_AS(parse_boundary("wired:0", region), InputError);
  CHECK_THROWS_AS(parse_boundary("periodic", region), InputError);

  const auto& g = region.graph();
  const int in = g.vertex(0).id;
  const int out = g.vertex(region.boundary().front()).id;
  const auto gb = parse_general_boundary(R"({"window": [)" + std::to_string(in) + R"(], "bonds": "all", "infinite": [)" +
                                             std::to_string(out) + "]}",
                                         region);
  CHECK(gb.window == std::vector<int>{0});
}

TEST_CASE("scan configuration") {
  const auto c = parse_scan_config(R"({"p": [0.5, 0.6], "sides": [4, 8], "sweeps": 100, "mode": "mc"})");
  CHECK(c.beta_grid[0] == doctest::Approx(-std::log(0.5) / 2.0));
  CHECK(c.mode == ScanMode::monte_carlo);
  CHECK(c.sampler.sweeps == 100);
  CHECK_THROWS_AS(parse_scan_config(R"({"beta": [0.6, 0.5], "sides": [4]})"), InputError);
}

}
