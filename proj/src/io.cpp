#include "rcfield/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rcfield/corpus.hpp"

namespace rcfield {

using nlohmann::json;

namespace {

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ":" + std::to_string(col);
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character
    throw InputError(line_col(text, e.byte == 0 ? 0 : e.byte - 1), "invalid JSON");
  }
}

const json& need(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw InputError(path.empty() ? "/" : path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(path + "/" + key, "missing");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "-inf" || s == "-infinity") return kMinusInfinity;
  }
  throw InputError(path, "expected a number");
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw InputError(path, "expected an integer");
  return v.get<int>();
}

std::vector<int> int_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw InputError(path, "expected an array");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(integer(v[i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw InputError(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "/" + std::to_string(i)));
  return out;
}

int vertex_by_id(const Region& region, int id, const std::string& path) {
  const auto idx = region.graph().index_of_id(id);
  if (!idx) throw InputError(path, "unknown vertex id " + std::to_string(id));
  return *idx;
}

Region parse_graph(const json& g, const std::string& path) {
  try {
    if (g.contains("corpus")) {
      const auto& name = g["corpus"];
      if (!name.is_string()) throw InputError(path + "/corpus", "expected a string");
      try {
        return *corpus_graph(name.get<std::string>()).region;
      } catch (const std::invalid_argument& e) {
        throw InputError(path + "/corpus", e.what());
      }
    }
    if (g.contains("box")) {
      const auto& b = g["box"];
      const auto sides = int_list(need(b, "sides", path + "/box"), path + "/box/sides");
      std::vector<int> origin;
      if (b.contains("origin")) origin = int_list(b["origin"], path + "/box/origin");
      return make_lattice_box(static_cast<int>(sides.size()), sides, origin);
    }
    if (g.contains("centered_box")) {
      const auto& b = g["centered_box"];
      const int d = integer(need(b, "dimension", path + "/centered_box"), path + "/centered_box/dimension");
      const int side = integer(need(b, "side", path + "/centered_box"), path + "/centered_box/side");
      return make_centered_box(d, side);
    }
    const auto& vs = need(g, "vertices", path);
    if (!vs.is_array()) throw InputError(path + "/vertices", "expected an array");
    std::vector<Vertex> vertices;
    std::map<int, int> index;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const std::string vp = path + "/vertices/" + std::to_string(i);
      Vertex v;
      if (vs[i].is_number_integer()) {
        v.id = vs[i].get<int>();
      } else {
        v.id = integer(need(vs[i], "id", vp), vp + "/id");
        if (vs[i].contains("coords")) v.coords = int_list(vs[i]["coords"], vp + "/coords");
      }
      if (!index.emplace(v.id, static_cast<int>(i)).second) throw InputError(vp, "duplicate vertex id");
      vertices.push_back(std::move(v));
    }
    std::vector<Edge> edges;
    if (g.contains("edges")) {
      const auto& es = g["edges"];
      if (!es.is_array()) throw InputError(path + "/edges", "expected an array");
      for (std::size_t i = 0; i < es.size(); ++i) {
        const std::string ep = path + "/edges/" + std::to_string(i);
        const auto ends = int_list(es[i], ep);
        if (ends.size() != 2) throw InputError(ep, "an edge needs two endpoints");
        const auto a = index.find(ends[0]);
        const auto b = index.find(ends[1]);
        if (a == index.end() || b == index.end()) throw InputError(ep, "unknown endpoint id");
        edges.push_back(Edge{a->second, b->second});
      }
    }
    std::vector<int> boundary;
    if (g.contains("boundary")) boundary = int_list(g["boundary"], path + "/boundary");
    return Region::from_graph(FiniteGraph(std::move(vertices), std::move(edges)), boundary);
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(path, e.what());
  }
}

FieldSpec parse_field(const json* f, int q, const Region& region, std::vector<double> qp) {
  const auto n = static_cast<std::size_t>(region.num_vertices());
  if (!f) {
    FieldSpec z = FieldSpec::zero(q, n);
    return FieldSpec(q, n, z.values(), std::move(qp));
  }
  const std::string path = "/field";
  try {
    std::vector<double> values;
    if (f->contains("ising")) {
      if (q != 2) throw InputError(path + "/ising", "an Ising field needs q = 2");
      const auto h = number_list((*f)["ising"], path + "/ising");
      if (h.size() != n) throw InputError(path + "/ising", "expected " + std::to_string(n) + " values");
      values = FieldSpec::ising(h).values();
    } else if (f->contains("values")) {
      const auto& rows = (*f)["values"];
      if (!rows.is_array() || rows.size() != n) {
        throw InputError(path + "/values", "expected " + std::to_string(n) + " rows");
      }
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = number_list(rows[i], path + "/values/" + std::to_string(i));
        if (row.size() != static_cast<std::size_t>(q)) {
          throw InputError(path + "/values/" + std::to_string(i), "expected " + std::to_string(q) + " colors");
        }
        values.insert(values.end(), row.begin(), row.end());
      }
    } else if (f->contains("power_law")) {
      const auto& pl = (*f)["power_law"];
      const std::string pp = path + "/power_law";
      const double hstar = number(need(pl, "hstar", pp), pp + "/hstar");
      const double alpha = number(need(pl, "alpha", pp), pp + "/alpha");
      Norm norm = Norm::euclidean;
      if (pl.contains("norm")) {
        const auto s = pl["norm"].get<std::string>();
        if (s == "sup") {
          norm = Norm::sup;
        } else if (s != "euclidean") {
          throw InputError(pp + "/norm", "expected \"euclidean\" or \"sup\"");
        }
      }
      if (q != 2) throw InputError(pp, "a power-law field needs q = 2");
      values = make_power_law_field(hstar, alpha, norm, region).values();
    } else {
      throw InputError(path, "expected one of \"ising\", \"values\", \"power_law\"");
    }
    return FieldSpec(q, n, std::move(values), std::move(qp));
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(path, e.what());
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelSpec parse_model(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw InputError("/", "expected an object");
  auto region = share(parse_graph(need(doc, "graph", ""), "/graph"));
  const int q = doc.contains("q") ? integer(doc["q"], "/q") : 2;
  if (q < 1) throw InputError("/q", "q must be positive");
  const double beta = number(need(doc, "beta", ""), "/beta");
  CouplingConstants couplings;
  const auto ne = static_cast<std::size_t>(region->num_all_bonds());
  if (doc.contains("couplings")) {
    couplings.values = number_list(doc["couplings"], "/couplings");
    if (couplings.size() != ne) throw InputError("/couplings", "expected " + std::to_string(ne) + " values");
  } else {
    const double j = doc.contains("coupling") ? number(doc["coupling"], "/coupling") : 1.0;
    couplings = CouplingConstants::uniform(ne, j);
  }
  std::vector<double> qp;
  if (doc.contains("qp")) {
    qp = number_list(doc["qp"], "/qp");
    if (qp.size() != static_cast<std::size_t>(q)) throw InputError("/qp", "expected " + std::to_string(q) + " values");
  }
  FieldSpec field = parse_field(doc.contains("field") ? &doc["field"] : nullptr, q, *region, std::move(qp));
  try {
    return ModelSpec(std::move(region), beta, std::move(couplings), std::move(field));
  } catch (const std::exception& e) {
    throw InputError("/", e.what());
  }
}

ModelSpec load_model(const std::string& path) {
  try {
    return parse_model(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

GeneralBoundary parse_general_boundary(const std::string& json_text, const Region& region) {
  const json doc = parse_json(json_text);
  std::vector<int> window;
  for (int id : int_list(need(doc, "window", ""), "/window")) window.push_back(vertex_by_id(region, id, "/window"));
  WindowBonds kind = WindowBonds::all;
  if (doc.contains("bonds")) {
    const auto s = doc["bonds"].get<std::string>();
    if (s == "inner") {
      kind = WindowBonds::inner;
    } else if (s != "all") {
      throw InputError("/bonds", "expected \"all\" or \"inner\"");
    }
  }
  std::vector<int> infinite;
  if (doc.contains("infinite")) {
    for (int id : int_list(doc["infinite"], "/infinite")) infinite.push_back(vertex_by_id(region, id, "/infinite"));
  }
  std::vector<int> open_edges;
  if (doc.contains("open")) {
    const auto& arr = doc["open"];
    if (!arr.is_array()) throw InputError("/open", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "/open/" + std::to_string(i);
      const auto ends = int_list(arr[i], p);
      if (ends.size() != 2) throw InputError(p, "an edge needs two endpoints");
      const int u = vertex_by_id(region, ends[0], p);
      const int v = vertex_by_id(region, ends[1], p);
      int found = -1;
      for (auto [w, e] : region.graph().incident(u))
        if (w == v) found = e;
      if (found < 0) throw InputError(p, "not an edge of the region");
      open_edges.push_back(found);
    }
  }
  std::sort(window.begin(), window.end());
  const auto domain = window_bonds(region, window, kind);
  std::vector<std::uint8_t> outside;
  for (int e = 0; e < region.num_all_bonds(); ++e) {
    if (std::binary_search(domain.begin(), domain.end(), e)) continue;
    outside.push_back(std::find(open_edges.begin(), open_edges.end(), e) != open_edges.end() ? 1 : 0);
  }
  try {
    return make_general_boundary(region, std::move(window), kind, std::move(outside), std::move(infinite));
  } catch (const std::exception& e) {
    throw InputError("/", e.what());
  }
}

GRCBoundary parse_boundary(const std::string& text, const Region& region) {
  if (text == "free") return FreeBoundary{};
  if (text.rfind("wired:", 0) == 0) {
    try {
      std::size_t used = 0;
      const int m = std::stoi(text.substr(6), &used);
      if (used != text.size() - 6 || m < 1) throw std::invalid_argument("bad color");
      return WiredBoundary{m - 1};
    } catch (const std::exception&) {
      throw InputError("--bc", "expected wired:<color> with a 1-based color");
    }
  }
  if (text == "wired") return WiredBoundary{0};
  if (text.rfind("general:", 0) == 0) {
    const std::string path = text.substr(8);
    try {
      return parse_general_boundary(read_file(path), region);
    } catch (const InputError& e) {
      throw InputError(path + ": " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
    }
  }
  throw InputError("--bc", "expected free, wired:<m> or general:<file>");
}

ScanConfig parse_scan_config(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw InputError("/", "expected an object");
  ScanConfig c;
  if (doc.contains("q")) c.q = integer(doc["q"], "/q");
  if (doc.contains("dimension")) c.dimension = integer(doc["dimension"], "/dimension");
  if (doc.contains("coupling")) c.coupling = number(doc["coupling"], "/coupling");
  if (doc.contains("hstar")) c.hstar = number(doc["hstar"], "/hstar");
  if (doc.contains("alpha")) c.alpha_grid = number_list(doc["alpha"], "/alpha");
  c.box_sides = int_list(need(doc, "sides", ""), "/sides");
  if (doc.contains("beta")) {
    c.beta_grid = number_list(doc["beta"], "/beta");
  } else if (doc.contains("p")) {
    const auto ps = number_list(doc["p"], "/p");
    if (!(c.coupling > 0.0)) throw InputError("/p", "a p grid needs a positive coupling");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (!(ps[i] >= 0.0 && ps[i] < 1.0)) throw InputError("/p/" + std::to_string(i), "p must lie in [0, 1)");
      c.beta_grid.push_back(-std::log1p(-ps[i]) / (c.q * c.coupling));
    }
  } else {
    throw InputError("/beta", "missing (or give \"p\")");
  }
  if (doc.contains("norm")) {
    const auto s = doc["norm"].get<std::string>();
    if (s == "sup") {
      c.norm = Norm::sup;
    } else if (s != "euclidean") {
      throw InputError("/norm", "expected \"euclidean\" or \"sup\"");
    }
  }
  if (doc.contains("mode")) {
    const auto s = doc["mode"].get<std::string>();
    if (s == "exact") {
      c.mode = ScanMode::exact;
    } else if (s == "mc") {
      c.mode = ScanMode::monte_carlo;
    } else if (s != "auto") {
      throw InputError("/mode", "expected auto, exact or mc");
    }
  }
  if (doc.contains("sweeps")) c.sampler.sweeps = static_cast<std::uint64_t>(integer(doc["sweeps"], "/sweeps"));
  if (doc.contains("burn_in")) c.sampler.burn_in = static_cast<std::uint64_t>(integer(doc["burn_in"], "/burn_in"));
  if (doc.contains("batches")) c.sampler.batches = integer(doc["batches"], "/batches");
  if (doc.contains("seed")) c.sampler.seed = static_cast<std::uint64_t>(integer(doc["seed"], "/seed"));
  if (doc.contains("chains")) c.sampler.chains = integer(doc["chains"], "/chains");
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw InputError("/", e.what());
  }
  return c;
}

WeightTable read_weight_table(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool versioned = false;
  bool header = false;
  bool logs = false;
  std::vector<std::pair<std::string, double>> rows;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("weight-table") != std::string::npos) {
        if (line.find("v1") == std::string::npos) throw InputError(where, "unsupported weight-table version");
        versioned = true;
      }
      continue;
    }
    const auto cols = split(line, ',');
    if (!header) {
      if (!versioned) throw InputError(where, "missing '# rcfield weight-table v1' line");
      if (cols.size() < 2 || trim(cols[0]) != "config") throw InputError(where, "expected header config,weight");
      const auto second = trim(cols[1]);
      if (second == "log_weight") {
        logs = true;
      } else if (second != "weight") {
        throw InputError(where, "second column must be weight or log_weight");
      }
      header = true;
      continue;
    }
    if (cols.size() < 2) throw InputError(where, "expected config,value");
    const std::string cfg = trim(cols[0]);
    if (cfg.find_first_not_of("01") != std::string::npos) throw InputError(where, "config must be a bit string");
    if (width == 0) width = cfg.size();
    if (cfg.size() != width) throw InputError(where, "config length differs from earlier rows");
    double v = 0.0;
    const std::string val = trim(cols[1]);
    if (val == "-inf") {
      v = kMinusInfinity;
    } else {
      try {
        std::size_t used = 0;
        v = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw InputError(where, "bad number '" + val + "'");
      }
    }
    if (!logs && !(v >= 0.0)) throw InputError(where, "weights must be nonnegative");
    rows.emplace_back(cfg, v);
  }
  if (!header) throw InputError("line " + std::to_string(lineno), "no table header");
  if (width > 20) throw InputError("table", "at most 20 edges supported");
  const std::size_t size = std::size_t{1} << width;
  std::vector<double> logw(size, kMinusInfinity);
  std::vector<std::uint8_t> seen(size, 0);
  for (const auto& [cfg, v] : rows) {
    std::uint64_t mask = 0;
    for (std::size_t k = 0; k < cfg.size(); ++k)
      if (cfg[k] == '1') mask |= std::uint64_t{1} << k;
    if (seen[mask]) throw InputError("config " + cfg, "listed twice");
    seen[mask] = 1;
    logw[mask] = logs ? v : (v > 0.0 ? std::log(v) : kMinusInfinity);
  }
  try {
    return WeightTable(width, std::move(logw));
  } catch (const std::exception& e) {
    throw InputError("table", e.what());
  }
}

WeightTable load_weight_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open file");
  try {
    return read_weight_table(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

void write_weight_table(std::ostream& out, const WeightTable& table) {
  out << "# rcfield weight-table v1\n";
  out << "config,log_weight,probability\n";
  const auto old = out.precision(17);
  for (std::uint64_t m = 0; m < table.size(); ++m) {
    std::string cfg;
    for (std::size_t k = 0; k < table.num_edges(); ++k) cfg.push_back(((m >> k) & 1u) ? '1' : '0');
    const double w = table.shifted_weight(m);
    out << cfg << ',';
    if (w > 0.0) {
      out << std::log(w) + table.log_scale();
    } else {
      out << "-inf";
    }
    out << ',' << table.probability(m) << '\n';
  }
  out.precision(old);
}

void write_spin_distribution(std::ostream& out, const ExactDistribution& dist) {
  out << "# rcfield spin-distribution v1\n";
  out << "config,probability\n";
  const auto old = out.precision(17);
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const auto cfg = dist.config(k);
    for (std::size_t i = 0; i < cfg.size(); ++i) out << (i ? " " : "") << cfg[i] + 1;
    out << ',' << dist.probability(k) << '\n';
  }
  out.precision(old);
}

}  // namespace rcfield
