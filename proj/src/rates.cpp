#include "ips/rates.hpp"

#include <algorithm>
#include <utility>
#include <sstream>
#include <stdexcept>

namespace ips {

const char* rate_kind_name(RateKind k) {
  switch (k) {
    case RateKind::Jump: return "jump";
    case RateKind::BirthPair: return "birth_pair";
    case RateKind::DeathPair: return "death_pair";
    case RateKind::BirthSite: return "birth_site";
    case RateKind::DeathSite: return "death_site";
  }
  return "?";
}

std::optional<RateKind> rate_kind_from_name(const std::string& s) {
  if (s == "jump") return RateKind::Jump;
  if (s == "birth_pair") return RateKind::BirthPair;
  if (s == "death_pair") return RateKind::DeathPair;
  if (s == "birth_site") return RateKind::BirthSite;
  if (s == "death_site") return RateKind::DeathSite;
  return std::nullopt;
}

RateSpec::RateSpec(StateSpace space, int k_max) : space_(space), k_max_(k_max) {
  if (space.max_occupancy < 0) throw std::invalid_argument("M must be >= 0");
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  const size_t n = space_.size();
  jump_.assign(size_t(k_max_) * n * n, Rat(0));
  birth_pair_.assign(size_t(k_max_) * n * n, Rat(0));
  death_pair_.assign(size_t(k_max_) * n * n, Rat(0));
  birth_site_.assign(size_t(k_max_) * n, Rat(0));
  death_site_.assign(size_t(k_max_) * n, Rat(0));
}

namespace {
const Rat kZero(0);
}

int RateSpec::idx(int k, int a, int b) const {
  if (k < 1 || k > k_max_ || !space_.contains(a) || !space_.contains(b))
    return -1;
  const int n = space_.size();
  return ((k - 1) * n + a) * n + b;
}

int RateSpec::sidx(int k, int v) const {
  if (k < 1 || k > k_max_ || !space_.contains(v)) return -1;
  return (k - 1) * space_.size() + v;
}

void RateSpec::set(RateKind kind, int k, int a, int b, const Rat& value) {
  const bool site = kind == RateKind::BirthSite || kind == RateKind::DeathSite;
  const int i = site ? sidx(k, kind == RateKind::BirthSite ? b : a) : idx(k, a, b);
  if (i < 0) throw std::out_of_range("rate index out of range");
  Rat v = value;
  v.canonicalize();  // gmp operations assume canonical operands
  switch (kind) {
    case RateKind::Jump: jump_[i] = std::move(v); break;
    case RateKind::BirthPair: birth_pair_[i] = std::move(v); break;
    case RateKind::DeathPair: death_pair_[i] = std::move(v); break;
    case RateKind::BirthSite: birth_site_[i] = std::move(v); break;
    case RateKind::DeathSite: death_site_[i] = std::move(v); break;
  }
}

const Rat& RateSpec::get(RateKind kind, int k, int a, int b) const {
  switch (kind) {
    case RateKind::Jump: return jump(k, a, b);
    case RateKind::BirthPair: return birth_pair(k, a, b);
    case RateKind::DeathPair: return death_pair(k, a, b);
    case RateKind::BirthSite: return birth_site(k, b);
    case RateKind::DeathSite: return death_site(k, a);
  }
  throw std::logic_error("unreachable");
}

const Rat& RateSpec::jump(int k, int a, int b) const {
  const int i = idx(k, a, b);
  return i < 0 ? kZero : jump_[i];
}
const Rat& RateSpec::birth_pair(int k, int a, int b) const {
  const int i = idx(k, a, b);
  return i < 0 ? kZero : birth_pair_[i];
}
const Rat& RateSpec::death_pair(int k, int a, int b) const {
  const int i = idx(k, a, b);
  return i < 0 ? kZero : death_pair_[i];
}
const Rat& RateSpec::birth_site(int k, int b) const {
  const int i = sidx(k, b);
  return i < 0 ? kZero : birth_site_[i];
}
const Rat& RateSpec::death_site(int k, int a) const {
  const int i = sidx(k, a);
  return i < 0 ? kZero : death_site_[i];
}

Rat RateSpec::add_rate(int k, int a, int b) const {
  return birth_pair(k, a, b) + birth_site(k, b);
}

Rat RateSpec::sub_rate(int k, int a, int b) const {
  return death_pair(k, a, b) + death_site(k, a);
}

int RateSpec::N(int a, int b) const {
  for (int k = k_max_; k >= 1; --k) {
    if (jump(k, a, b) != 0 || add_rate(k, a, b) != 0 || sub_rate(k, a, b) != 0)
      return k;
  }
  return 0;
}

int RateSpec::N_bar() const {
  int best = 0;
  for (int a = 0; a <= M(); ++a)
    for (int b = 0; b <= M(); ++b) best = std::max(best, N(a, b));
  return best;
}

bool RateSpec::is_conservative() const {
  for (const Rat& r : birth_pair_)
    if (r != 0) return false;
  for (const Rat& r : death_pair_)
    if (r != 0) return false;
  for (const Rat& r : birth_site_)
    if (r != 0) return false;
  for (const Rat& r : death_site_)
    if (r != 0) return false;
  return true;
}

bool RateSpec::operator==(const RateSpec& o) const {
  if (space_.max_occupancy != o.space_.max_occupancy) return false;
  // equality as rate functions; the allocated k range is storage detail
  const auto mine = entries(), theirs = o.entries();
  if (mine.size() != theirs.size()) return false;
  for (size_t i = 0; i < mine.size(); ++i) {
    const Entry& a = mine[i];
    const Entry& b = theirs[i];
    if (a.kind != b.kind || a.k != b.k || a.a != b.a || a.b != b.b ||
        a.value != b.value)
      return false;
  }
  return true;
}

std::vector<RateSpec::Entry> RateSpec::entries() const {
  std::vector<Entry> out;
  const auto pair_kinds = {RateKind::Jump, RateKind::BirthPair, RateKind::DeathPair};
  for (RateKind kind : pair_kinds)
    for (int k = 1; k <= k_max_; ++k)
      for (int a = 0; a <= M(); ++a)
        for (int b = 0; b <= M(); ++b) {
          const Rat& v = get(kind, k, a, b);
          if (v != 0) out.push_back({kind, k, a, b, v});
        }
  for (int k = 1; k <= k_max_; ++k)
    for (int b = 0; b <= M(); ++b)
      if (birth_site(k, b) != 0)
        out.push_back({RateKind::BirthSite, k, -1, b, birth_site(k, b)});
  for (int k = 1; k <= k_max_; ++k)
    for (int a = 0; a <= M(); ++a)
      if (death_site(k, a) != 0)
        out.push_back({RateKind::DeathSite, k, a, -1, death_site(k, a)});
  return out;
}

Kernel Kernel::nearest_neighbor(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  Kernel k;
  k.type = Type::Stencil;
  k.dim = d;
  const Rat w(1, 2 * d);
  for (int i = 0; i < d; ++i) {
    for (int sgn : {-1, +1}) {
      std::vector<int> off(d, 0);
      off[i] = sgn;
      k.stencil.emplace_back(off, w);
    }
  }
  return k;
}

Kernel Kernel::from_pairs(int n_sites,
                          std::vector<std::tuple<int, int, Rat>> entries) {
  Kernel k;
  k.type = Type::Pairs;
  k.n_sites = n_sites;
  for (auto& [x, y, p] : entries) k.pairs[{x, y}] = p;
  return k;
}

Rat Kernel::offset_prob(const std::vector<int>& offset) const {
  if (type != Type::Stencil) throw std::logic_error("not a stencil kernel");
  Rat total(0);
  for (const auto& [off, p] : stencil)
    if (off == offset) total += p;
  return total;
}

Rat Kernel::pair_prob(int x, int y) const {
  if (type != Type::Pairs) throw std::logic_error("not an explicit kernel");
  auto it = pairs.find({x, y});
  return it == pairs.end() ? Rat(0) : it->second;
}

bool Kernel::is_symmetric() const {
  if (type == Type::Stencil) {
    for (const auto& [off, p] : stencil) {
      std::vector<int> neg(off.size());
      for (size_t i = 0; i < off.size(); ++i) neg[i] = -off[i];
      if (offset_prob(neg) != p) return false;
    }
    return true;
  }
  for (const auto& [xy, p] : pairs)
    if (pair_prob(xy.second, xy.first) != p) return false;
  return true;
}

bool ValidationReport::has_errors() const {
  return std::any_of(issues.begin(), issues.end(), [](const ValidationIssue& i) {
    return i.severity == ValidationIssue::Severity::Error;
  });
}

void ValidationReport::error(const std::string& code, const std::string& message) {
  issues.push_back({ValidationIssue::Severity::Error, code, message});
}

void ValidationReport::warn(const std::string& code, const std::string& message) {
  issues.push_back({ValidationIssue::Severity::Warning, code, message});
}

namespace {

// True when applying `kind` with size k at occupancies (a,b) stays in X.
bool transition_in_space(const StateSpace& space, RateKind kind, int k, int a,
                         int b) {
  switch (kind) {
    case RateKind::Jump:
      return space.contains(a - k) && space.contains(b + k);
    case RateKind::BirthPair:
    case RateKind::BirthSite:
      return space.contains(b + k);
    case RateKind::DeathPair:
    case RateKind::DeathSite:
      return space.contains(a - k);
  }
  return false;
}

std::string entry_name(const RateSpec::Entry& e) {
  std::ostringstream os;
  os << rate_kind_name(e.kind) << "[k=" << e.k;
  if (e.a >= 0) os << ",alpha=" << e.a;
  if (e.b >= 0) os << ",beta=" << e.b;
  os << "]";
  return os.str();
}

}  // namespace

ValidationReport validate(const RateSpec& spec, const StateSpace& space,
                          const Kernel& kernel) {
  ValidationReport report;
  if (spec.M() != space.max_occupancy)
    report.error("space_mismatch", "rate spec and state space disagree on M");

  for (const auto& e : spec.entries()) {
    if (e.value < 0)
      report.error("negative_rate", entry_name(e) + " is negative");
    const int a = e.a >= 0 ? e.a : 0;
    const int b = e.b >= 0 ? e.b : 0;
    if (!transition_in_space(space, e.kind, e.k, a, b))
      report.warn("noop_transition",
                  entry_name(e) + " leaves the state space; the transition is "
                                  "a no-op and canonicalizes to zero");
  }

  if (kernel.type == Kernel::Type::Stencil) {
    Rat total(0);
    for (const auto& [off, p] : kernel.stencil) {
      if (p < 0) report.error("negative_kernel", "stencil weight is negative");
      total += p;
    }
    if (total != 1)
      report.error("not_bistochastic",
                   "stencil weights sum to " + rat_str(total) + ", expected 1/1");
  } else {
    std::vector<Rat> row(kernel.n_sites, Rat(0)), col(kernel.n_sites, Rat(0));
    for (const auto& [xy, p] : kernel.pairs) {
      if (xy.first < 0 || xy.first >= kernel.n_sites || xy.second < 0 ||
          xy.second >= kernel.n_sites) {
        report.error("kernel_site_range", "kernel pair site out of range");
        continue;
      }
      if (p < 0) report.error("negative_kernel", "kernel weight is negative");
      row[xy.first] += p;
      col[xy.second] += p;
    }
    for (int s = 0; s < kernel.n_sites; ++s) {
      if (row[s] != 1)
        report.error("not_bistochastic", "kernel row " + std::to_string(s) +
                                             " sums to " + rat_str(row[s]));
      if (col[s] != 1)
        report.error("not_bistochastic", "kernel column " + std::to_string(s) +
                                             " sums to " + rat_str(col[s]));
    }
  }
  return report;
}

RateSpec canonicalize(const RateSpec& spec, const StateSpace& space) {
  RateSpec out = spec;
  for (const auto& e : spec.entries()) {
    const int a = e.a >= 0 ? e.a : 0;
    const int b = e.b >= 0 ? e.b : 0;
    if (!transition_in_space(space, e.kind, e.k, a, b))
      out.set(e.kind, e.k, a, b, Rat(0));
  }
  return out;
}

LocalizedPairSystem localize(const RateSpec& lower, const RateSpec& upper,
                             const Rat& p) {
  if (p == 0) throw ZeroKernel();
  return {TwoSiteSystem{lower, p}, TwoSiteSystem{upper, p}};
}

LocalizedPairSystem localize(const RateSpec& lower, const RateSpec& upper,
                             const Kernel& kernel,
                             const std::vector<int>& offset) {
  return localize(lower, upper, kernel.offset_prob(offset));
}

LocalizedPairSystem localize(const RateSpec& lower, const RateSpec& upper,
                             const Kernel& kernel, int x, int y) {
  return localize(lower, upper, kernel.pair_prob(x, y));
}

}  // namespace ips
