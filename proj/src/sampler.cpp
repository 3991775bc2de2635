#include "rcfield/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <atomic>
#include <thread>

#include "rcfield/parallel.hpp"

namespace rcfield {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

int sample_log_weights(std::span<const double> logw, Rng& rng) {
  double hi = kMinusInfinity;
  for (double w : logw) hi = std::max(hi, w);
  if (hi == kMinusInfinity) throw DegenerateMeasure("a cluster admits no color");
  double total = 0.0;
  double buf[64];
  std::vector<double> big;
  double* cum = buf;
  if (logw.size() > 64) {
    big.resize(logw.size());
    cum = big.data();
  }
  for (std::size_t p = 0; p < logw.size(); ++p) {
    total += logw[p] == kMinusInfinity ? 0.0 : std::exp(logw[p] - hi);
    cum[p] = total;
  }
  const double u = rng.uniform() * total;
  for (std::size_t p = 0; p < logw.size(); ++p) {
    if (u < cum[p]) return static_cast<int>(p);
  }
  for (std::size_t p = logw.size(); p-- > 0;) {
    if (logw[p] != kMinusInfinity) return static_cast<int>(p);
  }
  return 0;
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) s = splitmix64(x);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t chain, std::uint64_t sweep) {
  std::uint64_t x = seed;
  std::uint64_t key = splitmix64(x);
  x = key ^ (chain * 0xd1b54a32d192ed03ULL);
  key = splitmix64(x);
  x = key ^ (sweep * 0x8cb92ba72f3d8dd7ULL);
  return Rng(splitmix64(x));
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

EsSampler::EsSampler(ModelSpec spec, GRCBoundary bc)
    : spec_(std::move(spec)), bc_(std::move(bc)), geometry_(cluster_geometry(spec_.region, bc_)),
      weights_(spec_.weights()) {
  if (!spec_.field.unit_weights()) throw std::invalid_argument("the cluster sampler requires unit q_p constants");
  const int n = spec_.geometry().num_vertices();
  const int q = spec_.q();
  general_ = std::holds_alternative<GeneralBoundary>(bc_);
  if (const auto* w = std::get_if<WiredBoundary>(&bc_)) {
    if (w->color < 0 || w->color >= q) throw std::invalid_argument("wired color out of range");
    wired_color_ = w->color;
  }
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  const FieldSummary summary = field_summary(spec_.field, all);
  shifted_.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(q));
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < q; ++p) {
      const double h = spec_.field.at(static_cast<std::size_t>(i), p);
      shifted_[static_cast<std::size_t>(i * q + p)] =
          h == kMinusInfinity ? kMinusInfinity : (general_ ? h - summary.hmax[static_cast<std::size_t>(i)] : h);
    }
  }
  anchor_allowed_.assign(static_cast<std::size_t>(q), 0);
  for (int p : summary.common_max) anchor_allowed_[static_cast<std::size_t>(p)] = 1;
  is_site_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int v : geometry_.sites) is_site_[static_cast<std::size_t>(v)] = 1;
}

ChainState EsSampler::initial_state(std::uint64_t seed, std::uint64_t chain) const {
  ChainState s;
  s.colors.assign(static_cast<std::size_t>(spec_.geometry().num_vertices()), wired_color_ >= 0 ? wired_color_ : 0);
  s.bits.assign(geometry_.domain.size(), 0);
  s.seed = seed;
  s.chain = chain;
  Rng rng = Rng::stream(seed, chain, ~std::uint64_t{0});
  color_step(s, rng);
  return s;
}

void EsSampler::components(const ChainState& state, UnionFind& uf) const {
  const FiniteGraph& graph = spec_.geometry().graph();
  uf.reset(geometry_.num_nodes());
  for (int e : geometry_.fixed_open) uf.unite(graph.edge(e).u, graph.edge(e).v);
  for (int v : geometry_.anchored) uf.unite(v, geometry_.anchor());
  for (std::size_t k = 0; k < geometry_.domain.size(); ++k) {
    if (state.bits[k]) uf.unite(graph.edge(geometry_.domain[k]).u, graph.edge(geometry_.domain[k]).v);
  }
}

void EsSampler::edge_step(ChainState& state, Rng& rng) const {
  const FiniteGraph& graph = spec_.geometry().graph();
  for (std::size_t k = 0; k < geometry_.domain.size(); ++k) {
    const int e = geometry_.domain[k];
    const Edge& edge = graph.edge(e);
    const bool same = state.colors[static_cast<std::size_t>(edge.u)] == state.colors[static_cast<std::size_t>(edge.v)];
    state.bits[k] = same && rng.uniform() < weights_.p[static_cast<std::size_t>(e)] ? 1 : 0;
  }
}

void EsSampler::color_step(ChainState& state, Rng& rng) const {
  const Region& r = spec_.geometry();
  const int n = r.num_vertices();
  const int q = spec_.q();
  UnionFind uf;
  components(state, uf);
  const int anchor_root = uf.find(geometry_.anchor());
  const bool anchor_live = !geometry_.anchored.empty();
  std::vector<double> acc(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(q), 0.0);
  std::vector<std::uint8_t> touched(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> root_of(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    root_of[static_cast<std::size_t>(i)] = root;
    if (is_site_[static_cast<std::size_t>(i)]) touched[static_cast<std::size_t>(root)] = 1;
    if (!general_ && anchor_live && root == anchor_root && !r.is_inner(i)) continue;
    for (int p = 0; p < q; ++p) acc[static_cast<std::size_t>(root * q + p)] += shifted_[static_cast<std::size_t>(i * q + p)];
  }
  std::vector<int> color_of(static_cast<std::size_t>(n) + 1, 0);
  std::vector<double> logw(static_cast<std::size_t>(q));
  for (int root = 0; root <= n; ++root) {
    if (!touched[static_cast<std::size_t>(root)] || uf.find(root) != root) continue;
    const bool anchored = anchor_live && root == anchor_root;
    if (anchored && !general_) {
      color_of[static_cast<std::size_t>(root)] = wired_color_;
      continue;
    }
    for (int p = 0; p < q; ++p) {
      const double a = acc[static_cast<std::size_t>(root * q + p)];
      const bool allowed = !anchored || anchor_allowed_[static_cast<std::size_t>(p)];
      logw[static_cast<std::size_t>(p)] = allowed && a != kMinusInfinity ? spec_.beta * a : kMinusInfinity;
    }
    color_of[static_cast<std::size_t>(root)] = sample_log_weights(logw, rng);
  }
  for (int i = 0; i < n; ++i) {
    const int root = root_of[static_cast<std::size_t>(i)];
    if (touched[static_cast<std::size_t>(root)]) state.colors[static_cast<std::size_t>(i)] = color_of[static_cast<std::size_t>(root)];
  }
}

void EsSampler::sweep(ChainState& state) const {
  Rng rng = Rng::stream(state.seed, state.chain, state.sweep_count);
  edge_step(state, rng);
  color_step(state, rng);
  ++state.sweep_count;
}

bool EsSampler::compatible(const ChainState& state) const {
  const FiniteGraph& graph = spec_.geometry().graph();
  for (std::size_t k = 0; k < geometry_.domain.size(); ++k) {
    if (!state.bits[k]) continue;
    const Edge& edge = graph.edge(geometry_.domain[k]);
    if (state.colors[static_cast<std::size_t>(edge.u)] != state.colors[static_cast<std::size_t>(edge.v)]) return false;
  }
  if (wired_color_ >= 0) {
    const Region& r = spec_.geometry();
    for (int b = r.num_inner(); b < r.num_vertices(); ++b) {
      if (state.colors[static_cast<std::size_t>(b)] != wired_color_) return false;
    }
  }
  return true;
}

GlauberSampler::GlauberSampler(ModelSpec spec, GRCBoundary bc) : spec_(std::move(spec)) {
  const Region& r = spec_.geometry();
  bool wired = false;
  if (const auto* w = std::get_if<WiredBoundary>(&bc)) {
    if (w->color < 0 || w->color >= spec_.q()) throw std::invalid_argument("wired color out of range");
    wired_color_ = w->color;
    wired = true;
  } else if (!std::holds_alternative<FreeBoundary>(bc)) {
    throw std::invalid_argument("Glauber dynamics supports free and wired boundary conditions");
  }
  neighbors_.resize(static_cast<std::size_t>(r.num_inner()));
  const double scale = spec_.q() * spec_.beta;
  const int limit = wired ? r.num_all_bonds() : r.num_inner_bonds();
  for (int e = 0; e < limit; ++e) {
    const Edge& edge = r.graph().edge(e);
    const double k = scale * spec_.couplings[static_cast<std::size_t>(e)];
    if (r.is_inner(edge.u)) neighbors_[static_cast<std::size_t>(edge.u)].emplace_back(edge.v, k);
    if (r.is_inner(edge.v)) neighbors_[static_cast<std::size_t>(edge.v)].emplace_back(edge.u, k);
  }
}

ChainState GlauberSampler::initial_state(std::uint64_t seed, std::uint64_t chain) const {
  ChainState s;
  s.colors.assign(static_cast<std::size_t>(spec_.geometry().num_vertices()), wired_color_ >= 0 ? wired_color_ : 0);
  s.seed = seed;
  s.chain = chain;
  return s;
}

void GlauberSampler::sweep(ChainState& state) const {
  Rng rng = Rng::stream(state.seed, state.chain, state.sweep_count);
  const int q = spec_.q();
  std::vector<double> logw(static_cast<std::size_t>(q));
  for (std::size_t i = 0; i < neighbors_.size(); ++i) {
    for (int c = 0; c < q; ++c) {
      const double h = spec_.field.at(i, c);
      logw[static_cast<std::size_t>(c)] = h == kMinusInfinity ? kMinusInfinity : spec_.beta * h;
    }
    for (auto [j, k] : neighbors_[i]) {
      if (logw[static_cast<std::size_t>(state.colors[static_cast<std::size_t>(j)])] != kMinusInfinity) {
        logw[static_cast<std::size_t>(state.colors[static_cast<std::size_t>(j)])] += k;
      }
    }
    state.colors[i] = sample_log_weights(logw, rng);
  }
  ++state.sweep_count;
}

EstimatorSeries summarize(std::vector<double> samples, int batches) {
  if (batches < 1) throw std::invalid_argument("need at least one batch");
  if (samples.size() < static_cast<std::size_t>(batches)) {
    throw std::invalid_argument("fewer samples than batches");
  }
  EstimatorSeries out;
  const std::size_t len = samples.size() / static_cast<std::size_t>(batches);
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    CompensatedSum s;
    for (std::size_t k = 0; k < len; ++k) s += samples[static_cast<std::size_t>(b) * len + k];
    means.push_back(s.value() / static_cast<double>(len));
  }
  CompensatedSum total;
  for (double m : means) total += m;
  out.mean = total.value() / batches;
  double var = 0.0;
  for (double m : means) var += (m - out.mean) * (m - out.mean);
  out.std_error = batches > 1 ? std::sqrt(var / (batches - 1) / batches) : 0.0;
  out.n_batches = batches;
  out.samples = std::move(samples);
  return out;
}

ObservableFn make_observable(const ModelSpec& spec, const ClusterGeometry& geometry, const Observable& obs) {
  const Region& r = spec.geometry();
  const int q = spec.q();
  auto check_inner = [&](int v) {
    if (v < 0 || !r.is_inner(v)) throw std::out_of_range("observable vertex " + std::to_string(v) + " is not an inner vertex");
  };
  switch (obs.kind) {
    case ObservableKind::magnetization: {
      const int n = r.num_inner();
      return [n, q](const ChainState& s) {
        if (n == 0 || q < 2) return 0.0;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += s.colors[static_cast<std::size_t>(i)] == 0 ? q - 1.0 : -1.0;
        return acc / ((q - 1.0) * n);
      };
    }
    case ObservableKind::two_point: {
      check_inner(obs.x);
      check_inner(obs.y);
      const int x = obs.x;
      const int y = obs.y;
      return [x, y, q](const ChainState& s) {
        return (s.colors[static_cast<std::size_t>(x)] == s.colors[static_cast<std::size_t>(y)] ? 1.0 : 0.0) - 1.0 / q;
      };
    }
    default:
      break;
  }
  const auto g = std::make_shared<const ClusterGeometry>(geometry);
  auto uf = std::make_shared<UnionFind>();
  auto build = [g, uf](const ChainState& s) {
    const FiniteGraph& graph = g->region->graph();
    if (s.bits.size() != g->domain.size()) throw std::logic_error("edge observable needs the cluster dynamics");
    uf->reset(g->num_nodes());
    for (int e : g->fixed_open) uf->unite(graph.edge(e).u, graph.edge(e).v);
    for (int v : g->anchored) uf->unite(v, g->anchor());
    for (std::size_t k = 0; k < g->domain.size(); ++k) {
      if (s.bits[k]) uf->unite(graph.edge(g->domain[k]).u, graph.edge(g->domain[k]).v);
    }
  };
  switch (obs.kind) {
    case ObservableKind::connectivity: {
      check_inner(obs.x);
      check_inner(obs.y);
      const int x = obs.x;
      const int y = obs.y;
      return [build, uf, x, y](const ChainState& s) {
        build(s);
        return uf->find(x) == uf->find(y) ? 1.0 : 0.0;
      };
    }
    case ObservableKind::percolation: {
      check_inner(obs.x);
      const bool has_boundary_bond =
          std::any_of(g->domain.begin(), g->domain.end(), [&](int e) { return !r.is_inner_bond(e); });
      if (!has_boundary_bond && g->anchored.empty()) {
        throw std::invalid_argument("percolation needs boundary bonds in the edge domain");
      }
      const int x = obs.x;
      return [build, uf, g, x](const ChainState& s) {
        build(s);
        const int rx = uf->find(x);
        if (rx == uf->find(g->anchor())) return 1.0;
        const Region& reg = *g->region;
        for (int b = reg.num_inner(); b < reg.num_vertices(); ++b)
          if (uf->find(b) == rx) return 1.0;
        return 0.0;
      };
    }
    case ObservableKind::layer_connection: {
      check_inner(obs.x);
      const int x = obs.x;
      const auto layer = std::make_shared<const std::vector<int>>(r.inner_boundary_layer());
      std::vector<int> fixed_inner;
      for (int e : g->fixed_open)
        if (r.is_inner_bond(e)) fixed_inner.push_back(e);
      return [g, x, layer, fixed_inner, uf](const ChainState& s) {
        const Region& reg = *g->region;
        const FiniteGraph& graph = reg.graph();
        uf->reset(reg.num_inner());
        for (int e : fixed_inner) uf->unite(graph.edge(e).u, graph.edge(e).v);
        for (std::size_t k = 0; k < g->domain.size(); ++k) {
          const int e = g->domain[k];
          if (s.bits[k] && reg.is_inner_bond(e)) uf->unite(graph.edge(e).u, graph.edge(e).v);
        }
        const int rx = uf->find(x);
        for (int v : *layer)
          if (uf->find(v) == rx) return 1.0;
        return 0.0;
      };
    }
    default:
      throw std::logic_error("unhandled observable");
  }
}

namespace {

std::uint64_t burn_in_of(const SamplerSettings& settings) {
  if (settings.sweeps == 0) throw std::invalid_argument("sweep count must be positive");
  const std::uint64_t burn = settings.burn_in.value_or(settings.sweeps / 10);
  if (burn >= settings.sweeps) throw std::invalid_argument("burn-in must be smaller than the sweep count");
  if (settings.chains < 1) throw std::invalid_argument("chain count must be positive");
  if (settings.batches < 1) throw std::invalid_argument("batch count must be positive");
  if (settings.sweeps - burn < static_cast<std::uint64_t>(settings.batches)) {
    throw std::invalid_argument("too few post-burn-in sweeps for the requested batches");
  }
  return burn;
}

template <typename RunChain>
EstimatorSeries run_chains(const SamplerSettings& settings, RunChain&& run_chain) {
  const std::uint64_t burn = burn_in_of(settings);
  const auto chains = static_cast<std::size_t>(settings.chains);
  const std::uint64_t kept = settings.sweeps - burn;
  const std::uint64_t usable = kept - kept % static_cast<std::uint64_t>(settings.batches);
  std::vector<std::vector<double>> series(chains);
  std::vector<std::exception_ptr> errors(chains);
  auto body = [&](std::size_t c) {
    try {
      series[c] = run_chain(static_cast<std::uint64_t>(c), burn, usable);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(chains));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chains; ++c) body(c);
  } else {
    std::vector<std::thread> threads;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t c = next++; c < chains; c = next++) body(c);
      });
    }
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<double> all;
  for (auto& s : series) all.insert(all.end(), s.begin(), s.end());
  return summarize(std::move(all), settings.batches * settings.chains);
}

}  // namespace

EstimatorSeries estimate(const ModelSpec& spec, const GRCBoundary& bc, const ObservableFn& fn,
                         const SamplerSettings& settings) {
  if (settings.dynamics != Dynamics::edwards_sokal) {
    throw std::invalid_argument("custom observables need the cluster dynamics");
  }
  const EsSampler sampler(spec, bc);
  return run_chains(settings, [&](std::uint64_t chain, std::uint64_t burn, std::uint64_t usable) {
    ChainState state = sampler.initial_state(settings.seed, chain);
    for (std::uint64_t s = 0; s < burn; ++s) sampler.sweep(state);
    std::vector<double> out;
    out.reserve(usable);
    for (std::uint64_t s = 0; s < usable; ++s) {
      sampler.sweep(state);
      out.push_back(fn(state));
    }
    return out;
  });
}

EstimatorSeries estimate(const ModelSpec& spec, const GRCBoundary& bc, const Observable& obs,
                         const SamplerSettings& settings) {
  const ClusterGeometry geometry = cluster_geometry(spec.region, bc);
  if (settings.dynamics == Dynamics::edwards_sokal) {
    const EsSampler sampler(spec, bc);
    return run_chains(settings, [&](std::uint64_t chain, std::uint64_t burn, std::uint64_t usable) {
      const ObservableFn fn = make_observable(spec, geometry, obs);
      ChainState state = sampler.initial_state(settings.seed, chain);
      for (std::uint64_t s = 0; s < burn; ++s) sampler.sweep(state);
      std::vector<double> out;
      out.reserve(usable);
      for (std::uint64_t s = 0; s < usable; ++s) {
        sampler.sweep(state);
        out.push_back(fn(state));
      }
      return out;
    });
  }
  if (obs.kind != ObservableKind::magnetization && obs.kind != ObservableKind::two_point) {
    throw std::invalid_argument("Glauber dynamics only supports spin observables");
  }
  const GlauberSampler sampler(spec, bc);
  return run_chains(settings, [&](std::uint64_t chain, std::uint64_t burn, std::uint64_t usable) {
    const ObservableFn fn = make_observable(spec, geometry, obs);
    ChainState state = sampler.initial_state(settings.seed, chain);
    for (std::uint64_t s = 0; s < burn; ++s) sampler.sweep(state);
    std::vector<double> out;
    out.reserve(usable);
    for (std::uint64_t s = 0; s < usable; ++s) {
      sampler.sweep(state);
      out.push_back(fn(state));
    }
    return out;
  });
}

}  // namespace rcfield
