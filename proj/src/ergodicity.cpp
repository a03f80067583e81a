#include "ips/ergodicity.hpp"

#include <cmath>
#include <stdexcept>

namespace ips {

namespace {

Rat pow_rat(const Rat& base, int e) {
  Rat out(1);
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace

Rat threshold(const EpidemicParams& params) {
  if (params.phi >= 1) throw PhiOutOfRange();
  return (1 - params.phi) / (Rat(2 * params.d) * (1 - pow_rat(params.phi, params.M)));
}

Rat USequence::u_bar() const {
  Rat best = u.at(0);
  for (const Rat& v : u) best = rat_max(best, v);
  return best;
}

USequence u_sequence(const EpidemicParams& params, const Rat& epsilon,
                     const Rat& U) {
  if (params.phi <= 0) throw PhiZero();
  if (epsilon <= 0 || U <= 0)
    throw std::invalid_argument("epsilon and U must be positive");
  USequence s{U, epsilon, {U}};
  const Rat drive = U * params.infection_max() * Rat(2 * params.d);
  Rat partial(U);  // sum_{j<l} u_j
  for (int l = 1; l <= params.M; ++l) {
    Rat u_l = (-epsilon * partial - drive * l + Rat(l) * s.u.back()) /
              (params.phi * l);
    partial += u_l;
    s.u.push_back(u_l);
  }
  return s;
}

bool check_u_criterion(const EpidemicParams& params, const USequence& useq) {
  if (int(useq.u.size()) != params.M + 1) return false;
  const Rat ubar = useq.u_bar();
  const Rat drive = ubar * params.infection_max() * Rat(2 * params.d);
  Rat partial(0);  // sum_{j<l} u_j
  for (int l = 1; l <= params.M; ++l) {
    partial += useq.u[size_t(l) - 1];
    const Rat& u_l = useq.u[size_t(l)];
    if (!(u_l > 0)) return false;
    Rat lhs = params.phi * l * u_l - Rat(l) * useq.u[size_t(l) - 1];
    Rat rhs = -useq.epsilon * partial - drive * l;
    if (!(lhs <= rhs)) return false;
  }
  return useq.u[0] > 0;
}

EpsilonGrid EpsilonGrid::standard(const EpidemicParams& params) {
  if (params.phi >= 1) throw PhiOutOfRange();
  return {Rat(1, 1000000), 1 - params.phi, 60};
}

std::vector<Rat> EpsilonGrid::points() const {
  if (steps < 2 || eps_min <= 0 || eps_max < eps_min)
    throw std::invalid_argument("bad epsilon grid");
  std::vector<Rat> pts;
  pts.reserve(size_t(steps));
  const double lo = eps_min.get_d(), hi = eps_max.get_d();
  for (int i = 0; i < steps; ++i) {
    if (i == 0) {
      pts.push_back(eps_min);
    } else if (i == steps - 1) {
      pts.push_back(eps_max);
    } else {
      const double x = lo * std::pow(hi / lo, double(i) / (steps - 1));
      pts.push_back(rat_from_double(x));
    }
  }
  return pts;
}

std::optional<std::pair<Rat, USequence>> find_epsilon(const EpidemicParams& params,
                                                      const EpsilonGrid& grid) {
  if (params.phi >= 1) throw PhiOutOfRange();
  for (const Rat& eps : grid.points()) {
    USequence s = u_sequence(params, eps, Rat(1));
    if (check_u_criterion(params, s)) return std::make_pair(eps, std::move(s));
  }
  return std::nullopt;
}

std::optional<std::pair<Rat, USequence>> find_epsilon(const EpidemicParams& params) {
  return find_epsilon(params, EpsilonGrid::standard(params));
}

ErgodicityVerdict classify_ergodic(const EpidemicParams& params,
                                   ErgodicityMode mode) {
  if (params.phi >= 1) throw PhiOutOfRange();
  if (!(params.infection_max() < threshold(params)))
    return {false, "threshold"};
  if (params.gamma_birth > 0) {
    const Rat cap = mode == ErgodicityMode::TheoremText
                        ? params.gamma_birth / Rat(2 * params.d)
                        : params.gamma_birth / Rat(2 * params.d * params.M);
    if (!(params.beta_rate - params.lambda <= cap)) return {false, "gamma_clause"};
  }
  return {true, "ok"};
}

Rat metric_F(int x, int y, const USequence& useq) {
  if (x == y) return Rat(0);
  const int lo = std::min(x, y), hi = std::max(x, y);
  Rat total(0);
  for (int j = 0; j < hi - lo; ++j) total += useq.u.at(size_t(j));
  return total;
}

Rat distance_rho(const std::vector<int>& xi, const std::vector<int>& eta,
                 const USequence& useq, const std::vector<Rat>& weights) {
  if (xi.size() != eta.size() || xi.size() != weights.size())
    throw std::invalid_argument("configuration / weight size mismatch");
  Rat total(0);
  for (size_t i = 0; i < xi.size(); ++i)
    total += metric_F(xi[i], eta[i], useq) * weights[i];
  return total;
}

}  // namespace ips
