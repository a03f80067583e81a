#include "ips/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "ips/rng.hpp"

namespace ips {

long Lattice::sites() const {
  long n = 1;
  for (int i = 0; i < dim; ++i) n *= L;
  return n;
}

std::vector<int> Lattice::coords(long site) const {
  std::vector<int> c(size_t(dim), 0);
  for (int i = 0; i < dim; ++i) {
    c[size_t(i)] = int(site % L);
    site /= L;
  }
  return c;
}

long Lattice::site_at(const std::vector<int>& coords) const {
  long s = 0;
  for (int i = dim - 1; i >= 0; --i) {
    int v = ((coords[size_t(i)] % L) + L) % L;
    s = s * L + v;
  }
  return s;
}

long Lattice::translate(long site, const std::vector<int>& offset) const {
  auto c = coords(site);
  for (int i = 0; i < dim; ++i) c[size_t(i)] += offset[size_t(i)];
  return site_at(c);
}

int Lattice::l1_torus_norm(long site) const {
  const auto c = coords(site);
  int n = 0;
  for (int v : c) n += std::min(v, L - v);
  return n;
}

namespace {

// Rates as doubles for the sampler. Structural decisions (which transitions
// exist) were already settled exactly by canonicalization.
struct RateTable {
  int M, k_max;
  std::vector<double> jump, add, sub;  // [k-1][a][b]

  explicit RateTable(const RateSpec& s) : M(s.M()), k_max(s.k_max()) {
    const size_t n = size_t(M) + 1;
    jump.assign(size_t(k_max) * n * n, 0.0);
    add.assign(size_t(k_max) * n * n, 0.0);
    sub.assign(size_t(k_max) * n * n, 0.0);
    for (int k = 1; k <= k_max; ++k)
      for (int a = 0; a <= M; ++a)
        for (int b = 0; b <= M; ++b) {
          const size_t i = (size_t(k - 1) * n + size_t(a)) * n + size_t(b);
          jump[i] = s.jump(k, a, b).get_d();
          add[i] = s.add_rate(k, a, b).get_d();
          sub[i] = s.sub_rate(k, a, b).get_d();
        }
  }

  size_t at(int k, int a, int b) const {
    const size_t n = size_t(M) + 1;
    return (size_t(k - 1) * n + size_t(a)) * n + size_t(b);
  }
};

struct Bond {
  long x, y;
  double w;        // kernel weight for jumps and additions
  double w_death;  // kernel weight for subtractions (direction flag)
};

std::vector<Bond> make_bonds(const Kernel& kernel, const Lattice& lattice,
                             DeathKernelDirection dir) {
  std::vector<Bond> bonds;
  if (kernel.type == Kernel::Type::Stencil) {
    if (kernel.dim != lattice.dim)
      throw std::invalid_argument("kernel and lattice dimension mismatch");
    const long n = lattice.sites();
    for (long x = 0; x < n; ++x)
      for (const auto& [off, p] : kernel.stencil) {
        const long y = lattice.translate(x, off);
        double wd = p.get_d();
        if (dir == DeathKernelDirection::Forward) {
          std::vector<int> neg(off.size());
          for (size_t i = 0; i < off.size(); ++i) neg[i] = -off[i];
          wd = kernel.offset_prob(neg).get_d();
        }
        bonds.push_back({x, y, p.get_d(), wd});
      }
  } else {
    for (const auto& [xy, p] : kernel.pairs) {
      if (p == 0) continue;
      double wd = dir == DeathKernelDirection::Forward
                      ? kernel.pair_prob(xy.second, xy.first).get_d()
                      : p.get_d();
      bonds.push_back({xy.first, xy.second, p.get_d(), wd});
    }
  }
  return bonds;
}

long site_count(const Kernel& kernel, const Lattice& lattice) {
  return kernel.type == Kernel::Type::Stencil ? lattice.sites() : kernel.n_sites;
}

double bond_rate_single(const RateTable& rt, const Bond& bond,
                        const Configuration& eta) {
  const int a = eta[size_t(bond.x)], b = eta[size_t(bond.y)];
  double total = 0;
  for (int k = 1; k <= rt.k_max; ++k) {
    const size_t i = rt.at(k, a, b);
    total += (rt.jump[i] + rt.add[i]) * bond.w + rt.sub[i] * bond.w_death;
  }
  return total;
}

// Per-site incidence of bonds, to refresh cached rates after an event.
std::vector<std::vector<int>> bond_incidence(const std::vector<Bond>& bonds,
                                             long n_sites) {
  std::vector<std::vector<int>> inc{size_t(n_sites)};
  for (size_t i = 0; i < bonds.size(); ++i) {
    inc[size_t(bonds[i].x)].push_back(int(i));
    if (bonds[i].y != bonds[i].x) inc[size_t(bonds[i].y)].push_back(int(i));
  }
  return inc;
}

struct SampleSchedule {
  // Model-time grid when stopping on t_max, event-count grid otherwise.
  std::vector<double> times;
  long event_stride = 0;
};

SampleSchedule make_schedule(const StopRule& stop, int samples) {
  SampleSchedule sched;
  if (stop.t_max) {
    for (int i = 1; i <= samples; ++i)
      sched.times.push_back(*stop.t_max * i / samples);
  } else if (stop.max_events) {
    sched.event_stride = std::max<long>(1, *stop.max_events / samples);
  }
  return sched;
}

}  // namespace

std::vector<Rat> torus_weights(const Lattice& lattice, long n_sites) {
  std::vector<Rat> w(size_t(n_sites), Rat(1));
  Rat total(0);
  for (long s = 0; s < n_sites; ++s) {
    // explicit-kernel systems have no geometry; keep the weights flat
    if (n_sites == lattice.sites()) {
      mpz_class den = 1;
      mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(),
                   mp_bitcnt_t(lattice.l1_torus_norm(s)));
      w[size_t(s)] = Rat(1) / Rat(den);
    }
    total += w[size_t(s)];
  }
  for (auto& v : w) v /= total;
  return w;
}

SimResult simulate_single(const RateSpec& spec, const Kernel& kernel,
                          const Lattice& lattice, const Configuration& init,
                          const StopRule& stop, uint64_t seed,
                          const SimOptions& opts) {
  const long n = site_count(kernel, lattice);
  if (long(init.size()) != n)
    throw std::invalid_argument("initial configuration has the wrong size");
  for (int v : init)
    if (!spec.space().contains(v))
      throw std::invalid_argument("initial occupancy outside the state space");

  const RateTable rt(spec);
  const auto bonds = make_bonds(kernel, lattice, opts.death_dir);
  const auto incidence = bond_incidence(bonds, n);

  SimResult res;
  res.seed = seed;
  res.final_lower = init;
  Configuration& eta = res.final_lower;

  auto density = [](const Configuration& c) {
    double s = 0;
    for (int v : c) s += v;
    return c.empty() ? 0.0 : s / double(c.size());
  };
  auto sample_now = [&](double at, long events) {
    return TraceSample{at, 0.0, density(eta), density(eta), events};
  };
  const SampleSchedule sched = make_schedule(stop, opts.rho_samples);
  size_t next_sample = 0;
  res.trace.push_back(sample_now(0.0, 0));

  std::vector<double> rate(bonds.size());
  double total = 0;
  for (size_t i = 0; i < bonds.size(); ++i) {
    rate[i] = bond_rate_single(rt, bonds[i], eta);
    total += rate[i];
  }

  Rng rng(seed);
  double t = 0;
  while (true) {
    if (stop.max_events && res.events >= *stop.max_events) break;
    if (total <= 0) {
      if (stop.t_max) t = *stop.t_max;
      break;
    }
    if (total > opts.max_total_rate) throw ExplodingRate(total);

    const double dt = rng.exponential(total);
    const double t_next = t + dt;
    while (next_sample < sched.times.size() && sched.times[next_sample] <= t_next) {
      res.trace.push_back(sample_now(sched.times[next_sample], res.events));
      ++next_sample;
    }
    if (stop.t_max && t_next > *stop.t_max) {
      t = *stop.t_max;
      break;
    }
    t = t_next;

    // categorical pick: bond, then transition within the bond
    double target = rng.uniform() * total;
    size_t bi = 0;
    for (; bi + 1 < bonds.size(); ++bi) {
      if (target < rate[bi]) break;
      target -= rate[bi];
    }
    const Bond& bond = bonds[bi];
    const int a = eta[size_t(bond.x)], b = eta[size_t(bond.y)];
    Change applied{};
    for (int k = 1; k <= rt.k_max && applied.kind == ChangeKind::None; ++k) {
      const size_t ri = rt.at(k, a, b);
      const double choices[3] = {rt.jump[ri] * bond.w, rt.add[ri] * bond.w,
                                 rt.sub[ri] * bond.w_death};
      for (int c = 0; c < 3; ++c) {
        if (target < choices[c]) {
          applied = {c == 0 ? ChangeKind::Jump
                            : (c == 1 ? ChangeKind::Birth : ChangeKind::Death),
                     k};
          break;
        }
        target -= choices[c];
      }
    }
    if (applied.kind == ChangeKind::None) {
      // numerical slack at the end of the scan; retry with fresh randomness
      total = 0;
      for (size_t i = 0; i < bonds.size(); ++i) {
        rate[i] = bond_rate_single(rt, bonds[i], eta);
        total += rate[i];
      }
      continue;
    }

    switch (applied.kind) {
      case ChangeKind::Jump:
        eta[size_t(bond.x)] -= applied.k;
        eta[size_t(bond.y)] += applied.k;
        break;
      case ChangeKind::Birth:
        eta[size_t(bond.y)] += applied.k;
        break;
      case ChangeKind::Death:
        eta[size_t(bond.x)] -= applied.k;
        break;
      default:
        break;
    }
    ++res.events;
    if (opts.log_events)
      res.event_log.push_back({t, bond.x, bond.y, applied, Change{}});

    for (int i : incidence[size_t(bond.x)]) {
      total -= rate[size_t(i)];
      rate[size_t(i)] = bond_rate_single(rt, bonds[size_t(i)], eta);
      total += rate[size_t(i)];
    }
    if (bond.y != bond.x)
      for (int i : incidence[size_t(bond.y)]) {
        if (std::find(incidence[size_t(bond.x)].begin(),
                      incidence[size_t(bond.x)].end(),
                      i) != incidence[size_t(bond.x)].end())
          continue;
        total -= rate[size_t(i)];
        rate[size_t(i)] = bond_rate_single(rt, bonds[size_t(i)], eta);
        total += rate[size_t(i)];
      }
    if (res.events % 4096 == 0) {
      total = 0;
      for (size_t i = 0; i < bonds.size(); ++i) total += rate[i];
    }
    if (sched.event_stride > 0 && res.events % sched.event_stride == 0)
      res.trace.push_back(sample_now(t, res.events));
  }
  while (next_sample < sched.times.size()) {
    res.trace.push_back(sample_now(sched.times[next_sample], res.events));
    ++next_sample;
  }
  if (res.trace.empty() || res.trace.back().t < t)
    res.trace.push_back(sample_now(t, res.events));
  res.t_end = t;
  return res;
}

namespace {

// Flattened coupling table for the sampler, built once per quadruple at
// p = 1 (every term scales linearly in the kernel weight).
struct CoupledTableCache {
  double total = 0;
  struct Term {
    double rate;
    Change lower, upper;
  };
  std::vector<Term> terms;
};

struct CoupledEngine {
  const RateSpec& lower;
  const RateSpec& upper;
  int M;
  std::unordered_map<int, CoupledTableCache> cache;

  int key(const Quadruple& q) const {
    return ((q.alpha * (M + 1) + q.beta) * (M + 1) + q.gamma) * (M + 1) + q.delta;
  }

  const CoupledTableCache& table_for(const Quadruple& q) {
    auto it = cache.find(key(q));
    if (it != cache.end()) return it->second;
    CouplingTable t = build_coupling_table(lower, upper, q, Rat(1));
    CoupledTableCache c;
    for (const CouplingTerm& term : t.terms) {
      const double r = term.rate.get_d();
      c.terms.push_back({r, term.lower, term.upper});
      c.total += r;
    }
    return cache.emplace(key(q), std::move(c)).first->second;
  }
};

void apply_coupled_change(Configuration& conf, const Change& ch, long x, long y) {
  switch (ch.kind) {
    case ChangeKind::Jump:
      conf[size_t(x)] -= ch.k;
      conf[size_t(y)] += ch.k;
      break;
    case ChangeKind::Birth:
      conf[size_t(y)] += ch.k;
      break;
    case ChangeKind::Death:
      conf[size_t(x)] -= ch.k;
      break;
    case ChangeKind::None:
      break;
  }
}

}  // namespace

SimResult simulate_coupled(const RateSpec& lower, const RateSpec& upper,
                           const Kernel& kernel, const Lattice& lattice,
                           const CoupledState& init, const StopRule& stop,
                           uint64_t seed, const SimOptions& opts) {
  const long n = site_count(kernel, lattice);
  if (long(init.lower.size()) != n || long(init.upper.size()) != n)
    throw std::invalid_argument("initial configuration has the wrong size");
  for (long s = 0; s < n; ++s)
    if (init.lower[size_t(s)] > init.upper[size_t(s)])
      throw std::invalid_argument("initial configurations are not ordered");
  if (opts.death_dir == DeathKernelDirection::Forward && !kernel.is_symmetric())
    throw std::invalid_argument(
        "coupled runs support the forward death direction only for symmetric kernels");

  const auto bonds = make_bonds(kernel, lattice, opts.death_dir);
  const auto incidence = bond_incidence(bonds, n);

  SimResult res;
  res.seed = seed;
  res.final_lower = init.lower;
  res.final_upper = init.upper;
  Configuration& xi = res.final_lower;
  Configuration& eta = res.final_upper;

  USequence flat{Rat(1), Rat(1), std::vector<Rat>(size_t(lower.M()) + 1, Rat(1))};
  const USequence& useq = opts.useq ? *opts.useq : flat;
  const auto weights = torus_weights(lattice, n);
  auto density = [](const Configuration& c) {
    double s = 0;
    for (int v : c) s += v;
    return c.empty() ? 0.0 : s / double(c.size());
  };
  auto sample_now = [&](double at, long events) {
    return TraceSample{at, distance_rho(xi, eta, useq, weights).get_d(),
                       density(xi), density(eta), events};
  };

  CoupledEngine engine{lower, upper, lower.M(), {}};
  auto quad_at = [&](const Bond& b) {
    return Quadruple{xi[size_t(b.x)], xi[size_t(b.y)], eta[size_t(b.x)],
                     eta[size_t(b.y)]};
  };

  std::vector<double> rate(bonds.size());
  double total = 0;
  for (size_t i = 0; i < bonds.size(); ++i) {
    rate[i] = engine.table_for(quad_at(bonds[i])).total * bonds[i].w;
    total += rate[i];
  }

  const SampleSchedule sched = make_schedule(stop, opts.rho_samples);
  size_t next_sample = 0;
  res.trace.push_back(sample_now(0.0, 0));

  Rng rng(seed);
  double t = 0;
  while (true) {
    if (stop.max_events && res.events >= *stop.max_events) break;
    if (total <= 0) {
      if (stop.t_max) t = *stop.t_max;
      break;
    }
    if (total > opts.max_total_rate) throw ExplodingRate(total);

    const double dt = rng.exponential(total);
    const double t_next = t + dt;
    while (next_sample < sched.times.size() && sched.times[next_sample] <= t_next) {
      res.trace.push_back(sample_now(sched.times[next_sample], res.events));
      ++next_sample;
    }
    if (stop.t_max && t_next > *stop.t_max) {
      t = *stop.t_max;
      break;
    }
    t = t_next;

    double target = rng.uniform() * total;
    size_t bi = 0;
    for (; bi + 1 < bonds.size(); ++bi) {
      if (target < rate[bi]) break;
      target -= rate[bi];
    }
    const Bond& bond = bonds[bi];
    const CoupledTableCache& table = engine.table_for(quad_at(bond));
    target /= bond.w > 0 ? bond.w : 1.0;
    const CoupledTableCache::Term* chosen = nullptr;
    for (const auto& term : table.terms) {
      if (target < term.rate) {
        chosen = &term;
        break;
      }
      target -= term.rate;
    }
    if (!chosen) {
      total = 0;
      for (size_t i = 0; i < bonds.size(); ++i) {
        rate[i] = engine.table_for(quad_at(bonds[i])).total * bonds[i].w;
        total += rate[i];
      }
      continue;
    }

    apply_coupled_change(xi, chosen->lower, bond.x, bond.y);
    apply_coupled_change(eta, chosen->upper, bond.x, bond.y);
    ++res.events;
    if (opts.log_events)
      res.event_log.push_back({t, bond.x, bond.y, chosen->lower, chosen->upper});

    if (xi[size_t(bond.x)] > eta[size_t(bond.x)] ||
        xi[size_t(bond.y)] > eta[size_t(bond.y)]) {
      ++res.order_violations;
      if (opts.strict_order)
        throw OrderBroken(res.events, bond.x, bond.y, quad_at(bond));
      // the coupled tables are undefined once the order is gone; stop here
      break;
    }

    for (int i : incidence[size_t(bond.x)]) {
      total -= rate[size_t(i)];
      rate[size_t(i)] =
          engine.table_for(quad_at(bonds[size_t(i)])).total * bonds[size_t(i)].w;
      total += rate[size_t(i)];
    }
    if (bond.y != bond.x)
      for (int i : incidence[size_t(bond.y)]) {
        if (std::find(incidence[size_t(bond.x)].begin(),
                      incidence[size_t(bond.x)].end(),
                      i) != incidence[size_t(bond.x)].end())
          continue;
        total -= rate[size_t(i)];
        rate[size_t(i)] =
            engine.table_for(quad_at(bonds[size_t(i)])).total * bonds[size_t(i)].w;
        total += rate[size_t(i)];
      }
    if (res.events % 4096 == 0) {
      total = 0;
      for (size_t i = 0; i < bonds.size(); ++i) total += rate[i];
    }
    if (sched.event_stride > 0 && res.events % sched.event_stride == 0)
      res.trace.push_back(sample_now(t, res.events));
  }
  while (next_sample < sched.times.size()) {
    res.trace.push_back(sample_now(sched.times[next_sample], res.events));
    ++next_sample;
  }
  if (res.trace.empty() || res.trace.back().t < t)
    res.trace.push_back(sample_now(t, res.events));
  res.t_end = t;
  return res;
}

MonotoneFunctional density_functional() {
  return [](const Configuration& eta) {
    if (eta.empty()) return 0.0;
    double s = 0;
    for (int v : eta) s += v;
    return s / double(eta.size());
  };
}

MonotoneFunctional site_indicator(long site, int level) {
  return [site, level](const Configuration& eta) {
    return eta.at(size_t(site)) >= level ? 1.0 : 0.0;
  };
}

MonteCarloEstimate estimate_monotone(const RateSpec& spec, const Kernel& kernel,
                                     const Lattice& lattice,
                                     const Configuration& init,
                                     const MonotoneFunctional& f, double t,
                                     int replicas, uint64_t seed, int jobs,
                                     const SimOptions& opts) {
  std::vector<double> values(size_t(replicas), 0.0);
  auto worker = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      SimResult r = simulate_single(spec, kernel, lattice, init,
                                    StopRule::at_time(t),
                                    Rng::split(seed, uint64_t(i)).next_u64(),
                                    opts);
      values[size_t(i)] = f(r.final_lower);
    }
  };
  if (jobs <= 1) {
    worker(0, replicas);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (replicas + jobs - 1) / jobs;
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back(worker, std::min(j * chunk, replicas),
                        std::min((j + 1) * chunk, replicas));
    for (auto& th : pool) th.join();
  }
  MonteCarloEstimate est;
  est.replicas = replicas;
  double sum = 0, sum2 = 0;
  for (double v : values) {
    sum += v;
    sum2 += v * v;
  }
  est.mean = sum / replicas;
  if (replicas > 1) {
    const double var = std::max(0.0, (sum2 - sum * sum / replicas) / (replicas - 1));
    est.stderr_ = std::sqrt(var / replicas);
  }
  return est;
}

}  // namespace ips
