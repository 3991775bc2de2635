// rcfield command line: exact checks, sampling and scans.
//
// Exit codes: 0 ok, 1 a check failed, 2 bad input, 3 enumeration cap or
// runtime failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rcfield/es_coupling.hpp"
#include "rcfield/inequalities.hpp"
#include "rcfield/io.hpp"
#include "rcfield/phase_scan.hpp"
#include "rcfield/sampler.hpp"

using namespace rcfield;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;
constexpr int kRuntime = 3;

int print_report(const Report& r) {
  for (const auto& c : r.checks) {
    std::printf("%-40s %s  discrepancy=%.3e  tol=%.1e\n", c.name.c_str(), c.passed() ? "PASS" : "FAIL", c.discrepancy,
                c.tolerance);
  }
  std::printf("%s\n", r.passed() ? "all checks passed" : "some checks FAILED");
  return r.passed() ? kOk : kFailed;
}

int vertex(const Region& region, int id) {
  const auto idx = region.graph().index_of_id(id);
  if (!idx) throw InputError("vertex", "unknown vertex id " + std::to_string(id));
  return *idx;
}

std::string bits_of(std::uint64_t mask, std::size_t n) {
  std::string s;
  for (std::size_t k = 0; k < n; ++k) s.push_back(((mask >> k) & 1u) ? '1' : '0');
  return s;
}

Observable parse_observable(const std::string& text, const Region& region) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::vector<int> args;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const auto comma = rest.find(',', pos);
      const std::string tok = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        args.push_back(vertex(region, std::stoi(tok)));
      } catch (const std::invalid_argument&) {
        throw InputError("--observable", "bad vertex id '" + tok + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  auto need = [&](std::size_t n) {
    if (args.size() != n) throw InputError("--observable", kind + " takes " + std::to_string(n) + " vertex ids");
  };
  if (kind == "magnetization") {
    need(0);
    return Observable::magnetization();
  }
  if (kind == "two_point") {
    need(2);
    return Observable::two_point(args[0], args[1]);
  }
  if (kind == "connectivity") {
    need(2);
    return Observable::connectivity(args[0], args[1]);
  }
  if (kind == "percolation") {
    need(1);
    return Observable::percolation(args[0]);
  }
  if (kind == "layer") {
    need(1);
    return Observable::layer_connection(args[0]);
  }
  throw InputError("--observable", "unknown observable '" + kind + "'");
}

struct TableSource {
  std::string table;
  std::string model;
  std::string bc = "free";
};

WeightTable load_source(const TableSource& src, std::uint64_t cap) {
  if (!src.table.empty()) return load_weight_table(src.table);
  const ModelSpec spec = load_model(src.model);
  return exact_edge_measure(spec, parse_boundary(src.bc, spec.geometry()), BernoulliConvention::r, cap);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-cluster, Edwards-Sokal and spin models with site- and color-dependent fields"};
  app.require_subcommand(1);
  std::uint64_t cap = kDefaultEnumerationCap;
  app.add_option("--cap", cap, "Largest number of states enumerated")->capture_default_str();

  // verify
  auto* verify = app.add_subcommand("verify", "Exact identities for one model");
  std::string v_model;
  std::string v_bc = "free";
  std::optional<int> v_x;
  std::optional<int> v_y;
  std::string v_table_out;
  verify->add_option("--model", v_model, "Model JSON")->required();
  verify->add_option("--bc", v_bc, "free | wired:<m> | general:<file>");
  verify->add_option("--x", v_x, "Vertex id for single-spin and two-point checks");
  verify->add_option("--y", v_y, "Second vertex id for two-point checks");
  verify->add_option("--table-out", v_table_out, "Write the edge weight table as CSV");

  // sample
  auto* sample = app.add_subcommand("sample", "Monte Carlo estimate of one observable");
  std::string s_model;
  std::string s_bc = "free";
  std::string s_obs = "magnetization";
  std::string s_dyn = "es";
  std::string s_series;
  SamplerSettings settings;
  std::optional<std::uint64_t> s_burn;
  sample->add_option("--model", s_model, "Model JSON")->required();
  sample->add_option("--bc", s_bc, "free | wired:<m> | general:<file>");
  sample->add_option("--observable", s_obs,
                     "magnetization | two_point:x,y | connectivity:x,y | percolation:x | layer:x (vertex ids)");
  sample->add_option("--dynamics", s_dyn, "es | glauber")->check(CLI::IsMember({"es", "glauber"}));
  sample->add_option("--sweeps", settings.sweeps)->capture_default_str();
  sample->add_option("--burn-in", s_burn, "Default: 10% of sweeps");
  sample->add_option("--batches", settings.batches)->capture_default_str();
  sample->add_option("--seed", settings.seed)->capture_default_str();
  sample->add_option("--chains", settings.chains)->capture_default_str();
  sample->add_option("--series", s_series, "Write the per-sweep series as CSV");

  // scan
  auto* scan = app.add_subcommand("scan", "Free vs wired percolation scan");
  std::string sc_config;
  std::string sc_out;
  std::vector<double> sc_alpha;
  std::vector<double> sc_beta;
  std::vector<int> sc_sides;
  scan->add_option("--config", sc_config, "Scan JSON");
  scan->add_option("--alpha", sc_alpha, "Field exponents (overrides the config)");
  scan->add_option("--beta-grid", sc_beta, "Inverse temperatures (overrides the config)");
  scan->add_option("--sides", sc_sides, "Box sides (overrides the config)");
  scan->add_option("--out", sc_out, "CSV output (default: stdout)");

  // check-fkg
  auto* fkg = app.add_subcommand("check-fkg", "FKG lattice condition of an edge measure");
  TableSource f_src;
  std::string f_mode = "full";
  fkg->add_option("--table", f_src.table, "Weight-table CSV");
  fkg->add_option("--model", f_src.model, "Model JSON");
  fkg->add_option("--bc", f_src.bc, "free | wired:<m> | general:<file>");
  fkg->add_option("--mode", f_mode, "full | single-edge")->check(CLI::IsMember({"full", "single-edge"}));

  // check-domination
  auto* dom = app.add_subcommand("check-domination", "Holley and Strassen comparison of two edge measures");
  TableSource d_low;
  TableSource d_high;
  dom->add_option("--low-table", d_low.table);
  dom->add_option("--low-model", d_low.model);
  dom->add_option("--low-bc", d_low.bc);
  dom->add_option("--high-table", d_high.table);
  dom->add_option("--high-model", d_high.model);
  dom->add_option("--high-bc", d_high.bc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*verify) {
      const ModelSpec spec = load_model(v_model);
      const GRCBoundary bc = parse_boundary(v_bc, spec.geometry());
      Report r;
      const bool general = std::holds_alternative<GeneralBoundary>(bc);
      if (!general) r.append(verify_marginals(spec, bc, cap));
      if (std::holds_alternative<FreeBoundary>(bc)) {
        r.append(verify_partition_identities(spec, cap));
        if (spec.q() == 2) {
          r.append(verify_cluster_sums(spec, cap));
          r.append(verify_spin_identification(spec, cap));
        }
        if (v_x) r.append(verify_single_spin(spec, vertex(spec.geometry(), *v_x), cap));
        if (v_x && v_y) {
          r.append(verify_correlation_connectivity(spec, vertex(spec.geometry(), *v_x), vertex(spec.geometry(), *v_y), cap));
        }
      }
      const auto table = exact_edge_measure(spec, bc, BernoulliConvention::r, cap);
      std::printf("edges=%zu log_partition=%.12g\n", table.num_edges(), table.log_partition());
      if (!v_table_out.empty()) {
        std::ofstream out(v_table_out);
        write_weight_table(out, table);
      }
      return print_report(r);
    }
    if (*sample) {
      const ModelSpec spec = load_model(s_model);
      const GRCBoundary bc = parse_boundary(s_bc, spec.geometry());
      settings.burn_in = s_burn;
      settings.dynamics = s_dyn == "glauber" ? Dynamics::glauber : Dynamics::edwards_sokal;
      const Observable obs = parse_observable(s_obs, spec.geometry());
      const auto series = estimate(spec, bc, obs, settings);
      std::printf("estimate=%.10g stderr=%.3g batches=%d sweeps=%llu seed=%llu\n", series.mean, series.std_error,
                  series.n_batches, static_cast<unsigned long long>(settings.sweeps),
                  static_cast<unsigned long long>(settings.seed));
      if (!s_series.empty()) {
        std::ofstream out(s_series);
        out << "# rcfield series v1\nindex,value\n";
        for (std::size_t i = 0; i < series.samples.size(); ++i) out << i << ',' << series.samples[i] << '\n';
      }
      return kOk;
    }
    if (*scan) {
      ScanConfig config = sc_config.empty() ? ScanConfig{} : parse_scan_config(read_file(sc_config));
      if (!sc_alpha.empty()) config.alpha_grid = sc_alpha;
      if (!sc_beta.empty()) config.beta_grid = sc_beta;
      if (!sc_sides.empty()) config.box_sides = sc_sides;
      try {
        config.validate();
      } catch (const std::invalid_argument& e) {
        throw InputError("scan", e.what());
      }
      const auto records = run_scan(config);
      if (sc_out.empty()) {
        write_scan_csv(std::cout, records);
      } else {
        std::ofstream out(sc_out);
        write_scan_csv(out, records);
      }
      if (config.box_sides.size() >= 2) {
        std::fprintf(stderr, "gap trends (indicative only):\n");
        for (const auto& t : gap_trend(records)) {
          std::fprintf(stderr, "  alpha=%g beta=%g trend=%s", t.alpha, t.beta, to_string(t.trend));
          for (const auto& p : t.points) std::fprintf(stderr, "  L=%d gap=%.4f+-%.4f", p.side, p.gap, p.std_error);
          std::fprintf(stderr, "\n");
        }
      }
      return kOk;
    }
    if (*fkg) {
      if (f_src.table.empty() == f_src.model.empty()) throw InputError("check-fkg", "give exactly one of --table, --model");
      const auto table = load_source(f_src, cap);
      const auto r = fkg_lattice_check(table, f_mode == "full" ? FkgMode::full : FkgMode::single_edge);
      std::printf("%s pairs=%llu worst_margin=%.6g relative=%.3e at (%s, %s)\n", r.passed ? "PASS" : "FAIL",
                  static_cast<unsigned long long>(r.pairs_checked), r.worst_margin, r.worst_relative,
                  bits_of(r.a, table.num_edges()).c_str(), bits_of(r.b, table.num_edges()).c_str());
      return r.passed ? kOk : kFailed;
    }
    if (*dom) {
      if (d_low.table.empty() == d_low.model.empty() || d_high.table.empty() == d_high.model.empty()) {
        throw InputError("check-domination", "give one table or model for each side");
      }
      const auto low = load_source(d_low, cap);
      const auto high = load_source(d_high, cap);
      const auto n = low.num_edges();
      const auto h = holley_check(low, high);
      std::printf("holley   %s worst_margin=%.6g relative=%.3e xi=%s zeta=%s edge=%d\n", h.passed ? "PASS" : "FAIL",
                  h.worst_margin, h.worst_relative, bits_of(h.xi, n).c_str(), bits_of(h.zeta, n).c_str(), h.edge);
      const auto s = strassen_domination(low, high);
      std::printf("strassen %s flow=%.15g", s.dominated ? "PASS" : "FAIL", s.flow);
      if (!s.dominated) {
        std::printf(" deficit=%.6g up-set generated by", s.deficit);
        for (auto g : s.violating_generators) std::printf(" %s", bits_of(g, n).c_str());
      }
      std::printf("\n");
      return s.dominated ? kOk : kFailed;
    }
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kBadInput;
  } catch (const CapExceeded& e) {
    std::fprintf(stderr, "cap exceeded: %s\n", e.what());
    return kRuntime;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kBadInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  }
  return kOk;
}
