#ifndef IPS_RATES_HPP
#define IPS_RATES_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ips/rational.hpp"

namespace ips {

// Local state space X = {0,...,M}.
struct StateSpace {
  int max_occupancy = 0;

  bool contains(long v) const { return v >= 0 && v <= max_occupancy; }
  int size() const { return max_occupancy + 1; }
};

enum class RateKind { Jump, BirthPair, DeathPair, BirthSite, DeathSite };

const char* rate_kind_name(RateKind k);
std::optional<RateKind> rate_kind_from_name(const std::string& s);

// Which kernel weight multiplies the pair-death rates in the generator:
// Reverse uses p(x,y) for a death at x influenced by y (the convention the
// two-site machinery is built on), Forward uses p(y,x). Identical for
// symmetric kernels.
enum class DeathKernelDirection { Reverse, Forward };

// The full parameter family of one particle system on X:
//   jump[k][a][b]      rate factor for k particles jumping x->y,
//   birth_pair[k][a][b] pair-dependent birth of k on y,
//   death_pair[k][a][b] pair-dependent death of k at x,
//   birth_site[k][b]   occupancy-only birth of k,
//   death_site[k][a]   occupancy-only death of k,
// with a = occupancy at x, b = occupancy at y, 1 <= k <= k_max.
class RateSpec {
 public:
  static constexpr int kDefaultKMaxCap = 8;

  RateSpec() = default;
  RateSpec(StateSpace space, int k_max);

  const StateSpace& space() const { return space_; }
  int M() const { return space_.max_occupancy; }
  int k_max() const { return k_max_; }

  void set(RateKind kind, int k, int a, int b, const Rat& value);
  const Rat& get(RateKind kind, int k, int a, int b) const;

  const Rat& jump(int k, int a, int b) const;
  const Rat& birth_pair(int k, int a, int b) const;
  const Rat& death_pair(int k, int a, int b) const;
  const Rat& birth_site(int k, int b) const;
  const Rat& death_site(int k, int a) const;

  // Combined addition rate on y: birth_pair[k][a][b] + birth_site[k][b].
  Rat add_rate(int k, int a, int b) const;
  // Combined subtraction rate at x: death_pair[k][a][b] + death_site[k][a].
  Rat sub_rate(int k, int a, int b) const;

  // Largest n with jump + addition + subtraction rates positive at (a,b);
  // 0 when everything vanishes.
  int N(int a, int b) const;
  // max over (a,b) of N(a,b).
  int N_bar() const;

  bool is_conservative() const;  // no birth/death rates at all
  bool operator==(const RateSpec& o) const;

  // Every stored nonzero entry, in deterministic (kind,k,a,b) order.
  struct Entry {
    RateKind kind;
    int k, a, b;  // b = -1 for site rates' unused slot
    Rat value;
  };
  std::vector<Entry> entries() const;

 private:
  int idx(int k, int a, int b) const;
  int sidx(int k, int v) const;

  StateSpace space_;
  int k_max_ = 0;
  std::vector<Rat> jump_, birth_pair_, death_pair_;
  std::vector<Rat> birth_site_, death_site_;
};

// Translation-invariant stencil on a torus (offset -> probability) or an
// explicit site-pair table. Rows and columns must sum to one exactly.
struct Kernel {
  enum class Type { Stencil, Pairs };

  Type type = Type::Stencil;

  // Stencil form.
  int dim = 0;
  std::vector<std::pair<std::vector<int>, Rat>> stencil;  // offset -> p

  // Explicit form on sites {0,...,n_sites-1}.
  int n_sites = 0;
  std::map<std::pair<int, int>, Rat> pairs;

  static Kernel nearest_neighbor(int d);
  static Kernel from_pairs(int n_sites,
                           std::vector<std::tuple<int, int, Rat>> entries);

  Rat offset_prob(const std::vector<int>& offset) const;
  Rat pair_prob(int x, int y) const;
  bool is_symmetric() const;
};

struct ValidationIssue {
  enum class Severity { Error, Warning };
  Severity severity;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool empty() const { return issues.empty(); }
  bool has_errors() const;
  void error(const std::string& code, const std::string& message);
  void warn(const std::string& code, const std::string& message);
};

// Lists every invariant violation: negative rates, non-bistochastic kernel,
// entries whose transition would leave X (reported as no-op warnings).
// Empty report == admissible as stored.
ValidationReport validate(const RateSpec& spec, const StateSpace& space,
                          const Kernel& kernel);

// Zeroes every rate whose transition would leave X; idempotent.
RateSpec canonicalize(const RateSpec& spec, const StateSpace& space);

// One side of a localized ordered pair: the original pair-dependent rates
// plus the site rates folded in, everything to be read at weight p.
struct TwoSiteSystem {
  RateSpec spec;
  Rat p;

  Rat jump_rate(int k, int a, int b) const { return spec.jump(k, a, b) * p; }
  Rat add_rate(int k, int a, int b) const { return spec.add_rate(k, a, b) * p; }
  Rat sub_rate(int k, int a, int b) const { return spec.sub_rate(k, a, b) * p; }
};

struct LocalizedPairSystem {
  TwoSiteSystem lower;
  TwoSiteSystem upper;
};

struct ZeroKernel : std::runtime_error {
  ZeroKernel() : std::runtime_error("kernel weight p(x,y) is zero") {}
};

// Restriction of the pair (specA, specB) to one ordered site pair with
// kernel weight p: pair-dependent rates kept, independent rates pinned to
// the pair (births on y, deaths at x), all at weight p.
LocalizedPairSystem localize(const RateSpec& lower, const RateSpec& upper,
                             const Rat& p);
// Same, resolving p from a stencil kernel offset (y - x).
LocalizedPairSystem localize(const RateSpec& lower, const RateSpec& upper,
                             const Kernel& kernel,
                             const std::vector<int>& offset);
// Same, resolving p from an explicit kernel pair.
LocalizedPairSystem localize(const RateSpec& lower, const RateSpec& upper,
                             const Kernel& kernel, int x, int y);

}  // namespace ips

#endif
