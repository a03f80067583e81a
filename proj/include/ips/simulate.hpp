#ifndef IPS_SIMULATE_HPP
#define IPS_SIMULATE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ips/coupling.hpp"
#include "ips/ergodicity.hpp"
#include "ips/rates.hpp"

namespace ips {

// Finite torus Z_L^d. Explicit-pair kernels carry their own site set and
// ignore the lattice.
struct Lattice {
  int dim = 1;
  int L = 2;

  long sites() const;
  std::vector<int> coords(long site) const;
  long site_at(const std::vector<int>& coords) const;
  long translate(long site, const std::vector<int>& offset) const;
  int l1_torus_norm(long site) const;
};

using Configuration = std::vector<int>;

struct CoupledState {
  Configuration lower, upper;
};

struct StopRule {
  std::optional<double> t_max;
  std::optional<long> max_events;

  static StopRule at_time(double t) { return {t, std::nullopt}; }
  static StopRule after_events(long n) { return {std::nullopt, n}; }
};

struct SimOptions {
  int rho_samples = 20;
  // throw OrderBroken on a violation; when false the run records the
  // violation and stops (the coupled tables are undefined past that point)
  bool strict_order = true;
  // weight sequence for the rho trace; empty means flat u == 1
  std::optional<USequence> useq;
  DeathKernelDirection death_dir = DeathKernelDirection::Reverse;
  bool log_events = false;
  double max_total_rate = 1e12;  // ExplodingRate assertion bound
};

struct EventRecord {
  double t;
  long x, y;
  Change lower, upper;
};

struct TraceSample {
  double t = 0;
  double rho = 0;
  double lower_density = 0;
  double upper_density = 0;
  long events = 0;
};

struct SimResult {
  Configuration final_lower;
  Configuration final_upper;  // empty for single runs
  long events = 0;
  double t_end = 0;
  long order_violations = 0;
  std::vector<TraceSample> trace;
  uint64_t seed = 0;
  std::vector<EventRecord> event_log;  // only when log_events
};

struct ExplodingRate : std::runtime_error {
  explicit ExplodingRate(double total)
      : std::runtime_error("total rate " + std::to_string(total) +
                           " exceeds the configured bound") {}
};

struct OrderBroken : std::runtime_error {
  OrderBroken(long event_index, long x, long y, const Quadruple& q)
      : std::runtime_error("coupled order broken at event " +
                           std::to_string(event_index)),
        event_index(event_index),
        x(x),
        y(y),
        quadruple(q) {}
  long event_index;
  long x, y;
  Quadruple quadruple;
};

// Exact event-driven simulation of one system: total-rate exponential clock
// plus categorical selection over the per-pair transitions. Reproducible
// given the seed.
SimResult simulate_single(const RateSpec& spec, const Kernel& kernel,
                          const Lattice& lattice, const Configuration& init,
                          const StopRule& stop, uint64_t seed,
                          const SimOptions& opts = {});

// Coupled simulation: events drawn from the superposition of per-pair
// coupling tables (memoized by quadruple); sitewise order asserted after
// every event; the rho trace uses distance_rho with torus weights.
SimResult simulate_coupled(const RateSpec& lower, const RateSpec& upper,
                           const Kernel& kernel, const Lattice& lattice,
                           const CoupledState& init, const StopRule& stop,
                           uint64_t seed, const SimOptions& opts = {});

// Normalized weights 2^{-|x|_1} on the torus (explicit kernels: flat).
std::vector<Rat> torus_weights(const Lattice& lattice, long n_sites);

using MonotoneFunctional = std::function<double(const Configuration&)>;

// Mean occupancy per site, in [0, M].
MonotoneFunctional density_functional();
// 1{eta(site) >= level}.
MonotoneFunctional site_indicator(long site, int level);

struct MonteCarloEstimate {
  double mean = 0;
  double stderr_ = 0;
  int replicas = 0;
};

// Monte Carlo estimate of E[f(eta_t)] over independent replicas with seeds
// split from the master seed; replica runs are parallel, the reduction is
// order-independent.
MonteCarloEstimate estimate_monotone(const RateSpec& spec, const Kernel& kernel,
                                     const Lattice& lattice,
                                     const Configuration& init,
                                     const MonotoneFunctional& f, double t,
                                     int replicas, uint64_t seed, int jobs = 1,
                                     const SimOptions& opts = {});

}  // namespace ips

#endif
