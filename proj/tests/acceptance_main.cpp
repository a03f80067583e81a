// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance and count is pinned here; nothing is deferred.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

#include "ips/cli.hpp"
#include "ips/coupling.hpp"
#include "ips/jsonio.hpp"
#include "ips/model_io.hpp"
#include "ips/models.hpp"
#include "ips/order.hpp"
#include "ips/rng.hpp"
#include "ips/simulate.hpp"

using namespace ips;

namespace {

int failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string title)
      : number_(number), title_(std::move(title)),
        start_(std::chrono::steady_clock::now()) {}

  void check(bool ok, const std::string& detail) {
    if (!ok) {
      ok_ = false;
      if (!detail.empty()) details_.push_back(detail);
    }
  }

  ~Criterion() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    std::ostringstream line;
    line << (ok_ ? "PASS" : "FAIL") << " criterion " << number_ << ": " << title_
         << " (" << secs << " s)";
    std::cout << line.str() << "\n";
    for (const std::string& d : details_) std::cout << "       " << d << "\n";
    if (!ok_) ++failures;
  }

 private:
  int number_;
  std::string title_;
  bool ok_ = true;
  std::vector<std::string> details_;
  std::chrono::steady_clock::time_point start_;
};

// Random pairs plus randomized instances of the order-by-construction
// families, so both verdicts appear in the stream. M <= 3, k_max <= 2.
std::pair<RateSpec, RateSpec> sample_pair(uint64_t seed) {
  Rng rng(seed * 977 + 13);
  const auto pick_rat = [&](int bound) {
    return Rat(long(rng.below(uint64_t(bound))) + 1, long(rng.below(4)) + 1);
  };
  switch (rng.below(4)) {
    case 0: {
      const int M = 2 + int(rng.below(2));
      RateSpec lo = random_spec(M, 2, 0.25, 4, rng.next_u64());
      RateSpec up = random_spec(M, 2, 0.25, 4, rng.next_u64());
      return {lo, up};
    }
    case 1: {
      RateSpec s = build_epidemic(pick_rat(3), pick_rat(3), pick_rat(2),
                                  pick_rat(2), int(2 + rng.below(2)), 1)
                       .spec;
      return {s, s};
    }
    case 2: {
      Rat lam = pick_rat(2), phi = pick_rat(2);
      int M = 1 + int(rng.below(2));
      RateSpec lo = build_tuberculosis(lam, phi, M, 1).spec;
      RateSpec up =
          build_tuberculosis(lam + pick_rat(2), phi + pick_rat(2), M, 1).spec;
      return {lo, up};
    }
    default: {
      RateSpec s = build_epidemic(pick_rat(3), pick_rat(3), pick_rat(2),
                                  pick_rat(2), 2, 1)
                       .spec;
      RateSpec t = s;
      t.set(rng.below(2) ? RateKind::BirthPair : RateKind::DeathPair, 1,
            int(rng.below(3)), int(rng.below(3)), pick_rat(4));
      t = canonicalize(t, t.space());
      return rng.below(2) ? std::make_pair(s, t) : std::make_pair(t, s);
    }
  }
}

template <typename Fn>
void for_each_quadruple(int M_lower, int M_upper, Fn&& fn) {
  for (int a = 0; a <= M_lower; ++a)
    for (int b = 0; b <= M_lower; ++b)
      for (int c = a; c <= M_upper; ++c)
        for (int d = b; d <= M_upper; ++d) fn(Quadruple{a, b, c, d});
}

void criterion_1() {
  Criterion c(1, "checker agrees with the two-site up-set oracle on 500 pairs");
  long ordered = 0, disagreements = 0;
  for (uint64_t seed = 0; seed < 500; ++seed) {
    auto [lo, up] = sample_pair(seed);
    const bool checker = certify_stochastic_order(lo, up).ordered();
    const bool oracle = oracle_increasing_sets(lo, up).ordered;
    if (checker != oracle) ++disagreements;
    ordered += checker;
  }
  c.check(disagreements == 0,
          "disagreements: " + std::to_string(disagreements));
  c.check(ordered >= 50 && ordered <= 450,
          "verdict mix too skewed: " + std::to_string(ordered) + "/500 ordered");
}

void criterion_2() {
  Criterion c(2, "coupling tables: exact marginals, increasing iff certified");
  long ordered_seen = 0, not_ordered_seen = 0;
  long marginal_bad = 0, increasing_bad = 0, missing_flag = 0;
  for (uint64_t seed = 1000; ordered_seen < 100 || not_ordered_seen < 50; ++seed) {
    if (seed > 3000) break;  // safety stop; the mix converges long before
    auto [lo, up] = sample_pair(seed);
    const bool is_ordered = certify_stochastic_order(lo, up).ordered();
    if (is_ordered && ordered_seen >= 100) continue;
    if (!is_ordered && not_ordered_seen >= 50) continue;
    bool any_flag = false;
    for_each_quadruple(lo.M(), up.M(), [&](const Quadruple& q) {
      CouplingTable t = build_coupling_table(lo, up, q, Rat(1, 2));
      if (!verify_marginals(t, lo, up).empty()) ++marginal_bad;
      const bool flagged =
          !verify_increasing(t, q, StateSpace{std::max(lo.M(), up.M())}).empty();
      if (is_ordered && flagged) ++increasing_bad;
      any_flag = any_flag || flagged;
    });
    if (!is_ordered && !any_flag) ++missing_flag;
    (is_ordered ? ordered_seen : not_ordered_seen) += 1;
  }
  c.check(ordered_seen >= 100 && not_ordered_seen >= 50,
          "sample sizes: " + std::to_string(ordered_seen) + " ordered, " +
              std::to_string(not_ordered_seen) + " not ordered");
  c.check(marginal_bad == 0,
          "marginal mismatches: " + std::to_string(marginal_bad));
  c.check(increasing_bad == 0,
          "order-breaking terms on certified systems: " +
              std::to_string(increasing_bad));
  c.check(missing_flag == 0,
          "uncertified systems with no flagged quadruple: " +
              std::to_string(missing_flag));
}

void criterion_3() {
  Criterion c(3, "closed-form single-change tables equal the general recursion");
  long mismatches = 0;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    const int M = 2 + int(seed % 2);
    RateSpec lo = random_spec(M, 1, 0.4, 4, 40000 + seed);
    RateSpec up = random_spec(M, 1, 0.4, 4, 41000 + seed);
    for_each_quadruple(M, M, [&](const Quadruple& q) {
      CouplingTable a = build_coupling_table(lo, up, q, Rat(1, 2));
      CouplingTable b = build_coupling_n1(lo, up, q, Rat(1, 2));
      std::map<std::pair<Change, Change>, Rat> ma, mb;
      for (const auto& t : a.terms) ma[{t.lower, t.upper}] = t.rate;
      for (const auto& t : b.terms) mb[{t.lower, t.upper}] = t.rate;
      if (ma != mb) ++mismatches;
    });
  }
  c.check(mismatches == 0, "mismatching quadruples: " + std::to_string(mismatches));
}

void criterion_4() {
  Criterion c(4, "both conservative condition families give identical verdicts");
  long disagreements = 0;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    const int M = 2 + int(seed % 2);
    StateSpace space{M};
    RateSpec src = random_spec(M, 2, 0.35, 4, 50000 + seed);
    RateSpec dst = random_spec(M, 2, 0.35, 4, 51000 + seed);
    RateSpec lo(space, 2), up(space, 2);
    for (int k = 1; k <= 2; ++k)
      for (int a = 0; a <= M; ++a)
        for (int b = 0; b <= M; ++b) {
          lo.set(RateKind::Jump, k, a, b, src.jump(k, a, b));
          up.set(RateKind::Jump, k, a, b, dst.jump(k, a, b));
        }
    if (!check_conservative_equivalence(lo, up).agree) ++disagreements;
  }
  c.check(disagreements == 0, "disagreements: " + std::to_string(disagreements));
}

void criterion_5() {
  Criterion c(5, "published example systems certify as stated");
  {
    BuiltModel bad = build_two_type_contact(Rat(1), Rat(1), {0, 1, 2}, 1);
    Certificate cert = certify_attractiveness(bad.spec);
    c.check(!cert.ordered(), "labeling (0,1,2) should not be ordered");
    const bool witness_ok = cert.witness &&
                            cert.witness->q == Quadruple{2, 0, 2, 1} &&
                            cert.witness->side == Side::CPlus &&
                            cert.witness->lhs == Rat(2) &&
                            cert.witness->rhs == Rat(0);
    c.check(witness_ok, "witness must instantiate 2 d lambda_2 <= 0 at (2,0,2,1)");

    BuiltModel good = build_two_type_contact(Rat(1), Rat(1), {1, 0, 2}, 1);
    c.check(certify_attractiveness(good.spec).ordered(),
            "labeling (1,0,2) should be ordered");
  }
  {
    // Closed form over the grid. One boundary case: at M = 1 the
    // within-cluster growth rate phi*beta*1{beta <= M-1} is identically
    // zero, so the lower system does not depend on phi at all and the phi
    // comparison is vacuous (the two specs can be literally identical).
    const std::vector<Rat> grid{Rat(1, 2), Rat(1), Rat(2)};
    const std::vector<int> Ms{1, 2, 3};
    long wrong = 0;
    for (const Rat& l1 : grid)
      for (const Rat& f1 : grid)
        for (int M1 : Ms)
          for (const Rat& l2 : grid)
            for (const Rat& f2 : grid)
              for (int M2 : Ms) {
                const bool expect =
                    l1 <= l2 && M1 <= M2 && (f1 <= f2 || M1 == 1);
                RateSpec lo = build_tuberculosis(l1, f1, M1, 1).spec;
                RateSpec up = build_tuberculosis(l2, f2, M2, 1).spec;
                if (certify_stochastic_order(lo, up).ordered() != expect)
                  ++wrong;
              }
    c.check(wrong == 0,
            "cluster grid verdicts off the closed form: " + std::to_string(wrong));
  }
  {
    long epidemics = 0, metapops = 0;
    for (const Rat& lam : {Rat(1, 2), Rat(2)})
      for (const Rat& bet : {Rat(1, 3), Rat(3)})
        for (const Rat& gam : {Rat(0), Rat(1)}) {
          RateSpec s = build_epidemic(lam, bet, gam, Rat(1, 2), 2, 1).spec;
          if (certify_attractiveness(s).ordered()) ++epidemics;
        }
    for (int M : {3, 4})
      for (int N : {1, 2})
        for (const Rat& phiA : {Rat(1, 2), Rat(3)}) {
          RateSpec s = build_metapop_allee(M, 2, N, Rat(1), Rat(1), phiA, 1).spec;
          if (certify_attractiveness(s).ordered()) ++metapops;
        }
    c.check(epidemics == 8, "epidemic grid: " + std::to_string(epidemics) + "/8");
    c.check(metapops == 8, "patch grid: " + std::to_string(metapops) + "/8");
  }
}

void criterion_6() {
  Criterion c(6, "contraction thresholds and the epsilon search");
  EpidemicParams base{Rat(0), Rat(0), Rat(0), Rat(1, 2), 2, 1};
  c.check(threshold(base) == Rat(1, 3), "threshold(1/2, d=1, M=2) must be 1/3");

  EpidemicParams mid = base;
  mid.lambda = Rat(3, 10);
  EpidemicParams low = base;
  low.lambda = Rat(1, 5);
  EpidemicParams high = base;
  high.lambda = Rat(34, 100);
  c.check(find_epsilon(mid).has_value(), "search must succeed at 3/10");
  c.check(find_epsilon(low).has_value(), "search must succeed at 1/5");
  c.check(!find_epsilon(high).has_value(), "search must fail at 34/100");

  long wrong = 0, bad_shape = 0;
  for (Rat phi : {Rat(1, 4), Rat(1, 2), Rat(3, 4)})
    for (int M : {1, 2, 4})
      for (int d : {1, 2}) {
        EpidemicParams p{Rat(0), Rat(0), Rat(0), phi, M, d};
        const Rat thr = threshold(p);
        EpidemicParams below = p;
        below.lambda = thr * Rat(99, 100);
        EpidemicParams above = p;
        above.lambda = thr * Rat(101, 100);
        auto found = find_epsilon(below);
        if (!found.has_value()) ++wrong;
        if (find_epsilon(above).has_value()) ++wrong;
        if (found) {
          const auto& u = found->second.u;
          for (size_t l = 1; l < u.size(); ++l)
            if (!(u[l] > 0 && u[l] < u[l - 1])) ++bad_shape;
        }
      }
  c.check(wrong == 0, "grid points off: " + std::to_string(wrong));
  c.check(bad_shape == 0,
          "found sequences not positive strictly decreasing: " +
              std::to_string(bad_shape));
}

void criterion_7() {
  Criterion c(7, "seed-pinned coupled and conservative runs");
  {
    BuiltModel m =
        build_epidemic(Rat(3, 10), Rat(3, 10), Rat(1, 10), Rat(1, 2), 2, 1);
    EpidemicParams p{Rat(3, 10), Rat(3, 10), Rat(1, 10), Rat(1, 2), 2, 1};
    auto found = find_epsilon(p);
    c.check(found.has_value(), "ergodic-regime parameters must admit a sequence");
    SimOptions opts;
    if (found) opts.useq = found->second;
    Lattice lat{1, 50};
    CoupledState init{Configuration(50, 0), Configuration(50, 2)};
    SimResult r = simulate_coupled(m.spec, m.spec, m.kernel, lat, init,
                                   StopRule::after_events(100000), 20260810, opts);
    c.check(r.order_violations == 0, "epidemic run broke the order");
    c.check(r.events == 100000, "epidemic run undershot the event budget");
    c.check(r.trace.size() >= 2 && r.trace.back().rho < r.trace.front().rho,
            "distance failed to contract");
  }
  {
    BuiltModel m = build_metapop_allee(4, 2, 2, Rat(1), Rat(1), Rat(1), 1);
    Lattice lat{1, 50};
    CoupledState init{Configuration(50, 0), Configuration(50, 4)};
    SimResult r = simulate_coupled(m.spec, m.spec, m.kernel, lat, init,
                                   StopRule::after_events(100000), 4, SimOptions{});
    c.check(r.order_violations == 0, "patch-model run broke the order");
  }
  {
    BuiltModel m = build_conservative(Rat(1), 3, 2, 1);
    Lattice lat{1, 30};
    Configuration init(30, 0);
    for (size_t i = 0; i < init.size(); i += 2) init[i] = 3;
    const long expected = std::accumulate(init.begin(), init.end(), 0L);
    SimOptions opts;
    opts.log_events = true;
    long drift = 0;
    for (uint64_t seed : {1u, 2u, 3u}) {
      SimResult r = simulate_single(m.spec, m.kernel, lat, init,
                                    StopRule::after_events(20000), seed, opts);
      Configuration replay = init;
      for (const EventRecord& e : r.event_log) {
        replay[size_t(e.x)] -= e.lower.k;
        replay[size_t(e.y)] += e.lower.k;
        if (std::accumulate(replay.begin(), replay.end(), 0L) != expected)
          ++drift;
      }
      if (replay != r.final_lower) ++drift;
    }
    c.check(drift == 0, "conservative trajectories drifted the particle count");
  }
}

void criterion_8() {
  Criterion c(8, "coupled marginal densities match single-system statistics");
  BuiltModel m = build_epidemic(Rat(1, 2), Rat(3, 5), Rat(1, 4), Rat(1, 3), 2, 1);
  Lattice lat{1, 10};
  const double t = 1.2;
  const int reps = 200;

  std::vector<double> lower_vals, upper_vals;
  for (int i = 0; i < reps; ++i) {
    CoupledState init{Configuration(10, 0), Configuration(10, 2)};
    SimResult r = simulate_coupled(m.spec, m.spec, m.kernel, lat, init,
                                   StopRule::at_time(t),
                                   Rng::split(808, uint64_t(i)).next_u64());
    lower_vals.push_back(density_functional()(r.final_lower));
    upper_vals.push_back(density_functional()(r.final_upper));
  }
  auto mean_se = [](const std::vector<double>& v) {
    double s = 0, s2 = 0;
    for (double x : v) {
      s += x;
      s2 += x * x;
    }
    const double mean = s / double(v.size());
    const double var = (s2 - s * s / double(v.size())) / double(v.size() - 1);
    return std::pair<double, double>{mean, std::sqrt(var / double(v.size()))};
  };
  auto [ml, sl] = mean_se(lower_vals);
  auto [mu, su] = mean_se(upper_vals);
  MonteCarloEstimate single_lo =
      estimate_monotone(m.spec, m.kernel, lat, Configuration(10, 0),
                        density_functional(), t, reps, 909, 2);
  MonteCarloEstimate single_up =
      estimate_monotone(m.spec, m.kernel, lat, Configuration(10, 2),
                        density_functional(), t, reps, 910, 2);
  c.check(std::abs(ml - single_lo.mean) <= 3 * std::hypot(sl, single_lo.stderr_),
          "lower marginal off by more than 3 stderr");
  c.check(std::abs(mu - single_up.mean) <= 3 * std::hypot(su, single_up.stderr_),
          "upper marginal off by more than 3 stderr");
}

void criterion_9() {
  Criterion c(9, "command line: golden documents, round trips, exit codes");
  const std::string dir = IPS_GOLDEN_DIR;
  struct Entry {
    const char* name;
    ModelFile model;
  };
  std::vector<Entry> entries;
  {
    ModelFile m = ModelFile::wrap(
        build_epidemic(Rat(1), Rat(1), Rat(1, 2), Rat(1, 2), 2, 1).spec,
        Kernel::nearest_neighbor(1));
    m.params = {{"lambda", "1/1"}, {"beta", "1/1"}, {"gamma", "1/2"},
                {"phi", "1/2"},   {"M", "2"},       {"d", "1"}};
    entries.push_back({"epidemic", m});
  }
  entries.push_back({"two_type_012",
                     ModelFile::wrap(build_two_type_contact(Rat(1), Rat(1),
                                                            {0, 1, 2}, 1)
                                         .spec,
                                     Kernel::nearest_neighbor(1))});
  entries.push_back({"tuberculosis",
                     ModelFile::wrap(build_tuberculosis(Rat(1), Rat(1), 2, 1).spec,
                                     Kernel::nearest_neighbor(1))});
  entries.push_back({"conservative",
                     ModelFile::wrap(build_conservative(Rat(1), 2, 2, 1).spec,
                                     Kernel::nearest_neighbor(1))});
  entries.push_back(
      {"metapop_allee",
       ModelFile::wrap(build_metapop_allee(4, 2, 2, Rat(1), Rat(1), Rat(1), 1).spec,
                       Kernel::nearest_neighbor(1))});

  auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  for (const Entry& e : entries) {
    const std::string name(e.name);
    const std::string exported = export_model(e.model);
    c.check(exported == slurp(dir + "/" + name + ".toml"),
            name + ".toml drifted from the golden copy");
    c.check(export_model(parse_model(exported)) == exported,
            name + " round trip is not byte-identical");

    const std::string tmp = "/tmp/ips_acc_" + name + ".toml";
    std::ofstream(tmp) << exported;
    std::ostringstream out, err;
    run_cli({"certify-attractive", "--model", tmp}, out, err);
    c.check(out.str() == slurp(dir + "/" + name + ".cert.json"),
            name + ".cert.json drifted from the golden copy");
  }

  // exit codes: 0 certified, 1 witness, 2 usage
  std::ostringstream out, err;
  const std::string epi = "/tmp/ips_acc_epidemic.toml";
  c.check(run_cli({"certify-attractive", "--model", epi}, out, err) == 0,
          "certified model must exit 0");
  c.check(run_cli({"certify-attractive", "--model",
                   "/tmp/ips_acc_two_type_012.toml"},
                  out, err) == 1,
          "witnessed model must exit 1");
  c.check(run_cli({"certify-attractive"}, out, err) == 2,
          "usage error must exit 2");
  c.check(run_cli({"validate", "--model", "/nonexistent.toml"}, out, err) == 2,
          "unreadable model must exit 2");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
