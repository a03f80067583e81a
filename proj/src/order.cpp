#include "ips/order.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <set>
#include <thread>

namespace ips {

std::vector<int> mask_values(IndexMask m) {
  std::vector<int> out;
  for (int v = 0; v < 64; ++v)
    if (m & (IndexMask(1) << v)) out.push_back(v);
  return out;
}

namespace {

// Bits for {k in X : hi >= k > lo}.
IndexMask range_mask(long lo, long hi, int M) {
  IndexMask m = 0;
  const long top = std::min<long>(hi, M);
  for (long k = std::max<long>(lo + 1, 0); k <= top; ++k)
    m |= IndexMask(1) << k;
  return m;
}

}  // namespace

IndexSets index_sets_plus(const StateSpace& space, const Quadruple& q,
                          const TupleFamily& fam) {
  IndexSets s;
  const int gap_y = q.delta - q.beta, gap_x = q.gamma - q.alpha;
  for (int i = 0; i < fam.K(); ++i) {
    s.a |= range_mask(gap_y + fam.first[i], fam.m[i], space.max_occupancy);
    s.b |= range_mask(fam.first[i], gap_x + fam.m[i], space.max_occupancy);
  }
  return s;
}

IndexSets index_sets_minus(const StateSpace& space, const Quadruple& q,
                           const TupleFamily& fam) {
  IndexSets s;
  const int gap_y = q.delta - q.beta, gap_x = q.gamma - q.alpha;
  for (int i = 0; i < fam.K(); ++i) {
    // here .a holds I_c (upper-jump indices), .b holds I_d (lower-jump indices)
    s.a |= range_mask(gap_x + fam.first[i], fam.m[i], space.max_occupancy);
    s.b |= range_mask(fam.first[i], gap_y + fam.m[i], space.max_occupancy);
  }
  return s;
}

namespace {

// Sum of addition rates Pi^{0,k} at (a,b) over k in X with k > lo.
Rat add_tail(const RateSpec& s, int a, int b, long lo) {
  Rat total(0);
  const int top = std::min(s.k_max(), s.M());
  for (int k = int(std::max<long>(lo + 1, 1)); k <= top; ++k)
    total += s.add_rate(k, a, b);
  return total;
}

Rat sub_tail(const RateSpec& s, int a, int b, long lo) {
  Rat total(0);
  const int top = std::min(s.k_max(), s.M());
  for (int k = int(std::max<long>(lo + 1, 1)); k <= top; ++k)
    total += s.sub_rate(k, a, b);
  return total;
}

Rat jump_over(const RateSpec& s, int a, int b, IndexMask mask) {
  Rat total(0);
  const int top = std::min(s.k_max(), s.M());
  for (int k = 1; k <= top; ++k)
    if (mask & (IndexMask(1) << k)) total += s.jump(k, a, b);
  return total;
}

}  // namespace

namespace {

// Comparisons may pair systems on different occupancy ranges (the classic
// cluster-cap comparisons); index sets clip at the larger range, each side's
// rate sums clip at its own.
StateSpace joint_space(const RateSpec& lower, const RateSpec& upper) {
  return StateSpace{std::max(lower.M(), upper.M())};
}

}  // namespace

ConditionResult check_condition_plus(const RateSpec& lower, const RateSpec& upper,
                                     const Quadruple& q, const TupleFamily& fam) {
  const IndexSets s = index_sets_plus(joint_space(lower, upper), q, fam);
  Rat lhs = add_tail(lower, q.alpha, q.beta, q.delta - q.beta + fam.first[0]) +
            jump_over(lower, q.alpha, q.beta, s.a);
  Rat rhs = add_tail(upper, q.gamma, q.delta, fam.first[0]) +
            jump_over(upper, q.gamma, q.delta, s.b);
  return {lhs <= rhs, lhs, rhs};
}

ConditionResult check_condition_minus(const RateSpec& lower, const RateSpec& upper,
                                      const Quadruple& q, const TupleFamily& fam) {
  const IndexSets s = index_sets_minus(joint_space(lower, upper), q, fam);
  Rat lhs = sub_tail(lower, q.alpha, q.beta, fam.first[0]) +
            jump_over(lower, q.alpha, q.beta, s.b);
  Rat rhs = sub_tail(upper, q.gamma, q.delta, q.gamma - q.alpha + fam.first[0]) +
            jump_over(upper, q.gamma, q.delta, s.a);
  return {lhs >= rhs, lhs, rhs};
}

namespace {

// Advance a nondecreasing tuple with entries in [0,n]; false when exhausted.
bool next_nondecreasing(std::vector<int>& t, int n) {
  for (int i = int(t.size()) - 1; i >= 0; --i) {
    if (t[i] < n) {
      const int v = t[i] + 1;
      for (size_t j = i; j < t.size(); ++j) t[j] = v;
      return true;
    }
  }
  return false;
}

using FamilySignature = std::array<uint64_t, 5>;

FamilySignature family_signature(const StateSpace& space, const Quadruple& q,
                                 const TupleFamily& fam) {
  const IndexSets plus = index_sets_plus(space, q, fam);
  const IndexSets minus = index_sets_minus(space, q, fam);
  return {uint64_t(fam.first[0]), plus.a, plus.b, minus.a, minus.b};
}

}  // namespace

void enumerate_families(const StateSpace& space, const Quadruple& q, int N,
                        const std::function<bool(const TupleFamily&)>& yield) {
  std::set<FamilySignature> seen;
  for (int K = 1; K <= N; ++K) {
    TupleFamily fam;
    fam.first.assign(K, 0);
    for (;;) {
      fam.m.assign(K, 0);
      for (;;) {
        if (seen.insert(family_signature(space, q, fam)).second) {
          if (!yield(fam)) return;
        }
        if (!next_nondecreasing(fam.m, N)) break;
      }
      if (!next_nondecreasing(fam.first, N)) break;
    }
  }
}

namespace {

std::vector<Quadruple> all_quadruples(int M_lower, int M_upper) {
  std::vector<Quadruple> out;
  for (int a = 0; a <= M_lower; ++a)
    for (int b = 0; b <= M_lower; ++b)
      for (int c = a; c <= M_upper; ++c)
        for (int d = b; d <= M_upper; ++d) out.push_back({a, b, c, d});
  return out;
}

struct ScanHit {
  size_t scan_index;
  Witness witness;
};

// Scans one quadruple; returns the first violated condition, if any.
std::optional<Witness> scan_quadruple(const RateSpec& lower, const RateSpec& upper,
                                      const Quadruple& q, long& families) {
  const int N = std::max(lower.N(q.alpha, q.beta), upper.N(q.gamma, q.delta));
  std::optional<Witness> hit;
  enumerate_families(joint_space(lower, upper), q, N, [&](const TupleFamily& fam) {
    ++families;
    if (auto r = check_condition_plus(lower, upper, q, fam); !r.holds) {
      hit = Witness{q, Side::CPlus, fam, r.lhs, r.rhs};
      return false;
    }
    if (auto r = check_condition_minus(lower, upper, q, fam); !r.holds) {
      hit = Witness{q, Side::CMinus, fam, r.lhs, r.rhs};
      return false;
    }
    return true;
  });
  return hit;
}

}  // namespace

Certificate certify_stochastic_order(const RateSpec& lower, const RateSpec& upper,
                                     int jobs) {
  const auto quads = all_quadruples(lower.M(), upper.M());

  Certificate cert;
  cert.quadruples_checked = long(quads.size());

  if (jobs <= 1) {
    for (const Quadruple& q : quads) {
      if (auto w = scan_quadruple(lower, upper, q, cert.families_checked)) {
        cert.verdict = Verdict::NotOrdered;
        cert.witness = std::move(w);
        return cert;
      }
    }
    return cert;
  }

  // Data-parallel scan with a deterministic reduction: the hit with the
  // smallest scan index wins regardless of thread interleaving.
  std::atomic<size_t> next{0};
  std::vector<std::optional<ScanHit>> hits{size_t(jobs)};
  std::vector<long> family_counts(size_t(jobs), 0);
  std::vector<std::thread> workers;
  for (int t = 0; t < jobs; ++t) {
    workers.emplace_back([&, t] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= quads.size()) return;
        if (auto w = scan_quadruple(lower, upper, quads[i], family_counts[t])) {
          if (!hits[t] || i < hits[t]->scan_index) hits[t] = ScanHit{i, *w};
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  for (long c : family_counts) cert.families_checked += c;
  std::optional<ScanHit> best;
  for (auto& h : hits)
    if (h && (!best || h->scan_index < best->scan_index)) best = h;
  if (best) {
    cert.verdict = Verdict::NotOrdered;
    cert.witness = best->witness;
  }
  return cert;
}

Certificate certify_attractiveness(const RateSpec& spec, int jobs) {
  return certify_stochastic_order(spec, spec, jobs);
}

Certificate check_single_change(const RateSpec& lower, const RateSpec& upper) {
  if (lower.N_bar() > 1 || upper.N_bar() > 1) throw NotSingleChange();
  Certificate cert;
  auto fail = [&](const Quadruple& q, Side side, TupleFamily fam, Rat lhs, Rat rhs) {
    cert.verdict = Verdict::NotOrdered;
    cert.witness = Witness{q, side, std::move(fam), std::move(lhs), std::move(rhs)};
  };
  for (const Quadruple& q : all_quadruples(lower.M(), upper.M())) {
    ++cert.quadruples_checked;
    const int a = q.alpha, b = q.beta, c = q.gamma, d = q.delta;
    if (b == d) {
      ++cert.families_checked;
      Rat lhs = lower.add_rate(1, a, b) + lower.jump(1, a, b);
      Rat rhs = upper.add_rate(1, c, d) + upper.jump(1, c, d);
      if (!(lhs <= rhs)) return fail(q, Side::CPlus, {{0}, {1}}, lhs, rhs), cert;
      if (c == a) {
        ++cert.families_checked;
        Rat l0 = lower.add_rate(1, a, b), r0 = upper.add_rate(1, c, d);
        if (!(l0 <= r0)) return fail(q, Side::CPlus, {{0}, {0}}, l0, r0), cert;
      }
    }
    if (c == a) {
      ++cert.families_checked;
      Rat lhs = lower.sub_rate(1, a, b) + lower.jump(1, a, b);
      Rat rhs = upper.sub_rate(1, c, d) + upper.jump(1, c, d);
      if (!(lhs >= rhs)) return fail(q, Side::CMinus, {{0}, {1}}, lhs, rhs), cert;
      if (d == b) {
        ++cert.families_checked;
        Rat l0 = lower.sub_rate(1, a, b), r0 = upper.sub_rate(1, c, d);
        if (!(l0 >= r0)) return fail(q, Side::CMinus, {{0}, {0}}, l0, r0), cert;
      }
    }
  }
  return cert;
}

namespace {

Rat jump_tail(const RateSpec& s, int a, int b, long lo) {
  Rat total(0);
  const int top = std::min(s.k_max(), s.M());
  for (int k = int(std::max<long>(lo + 1, 1)); k <= top; ++k)
    total += s.jump(k, a, b);
  return total;
}

}  // namespace

EquivalenceReport check_conservative_equivalence(const RateSpec& lower,
                                                 const RateSpec& upper) {
  if (!lower.is_conservative() || !upper.is_conservative())
    throw NotConservative();

  EquivalenceReport rep{Verdict::Ordered, Verdict::Ordered, true};

  for (const Quadruple& q : all_quadruples(lower.M(), upper.M())) {
    const int N = std::max(lower.N(q.alpha, q.beta), upper.N(q.gamma, q.delta));
    // single-index tail form
    for (int j = 0; j <= N && rep.verdict_single_index == Verdict::Ordered; ++j) {
      if (!(jump_tail(lower, q.alpha, q.beta, q.delta - q.beta + j) <=
            jump_tail(upper, q.gamma, q.delta, j)))
        rep.verdict_single_index = Verdict::NotOrdered;
    }
    for (int h = 0; h <= N && rep.verdict_single_index == Verdict::Ordered; ++h) {
      if (!(jump_tail(lower, q.alpha, q.beta, h) >=
            jump_tail(upper, q.gamma, q.delta, q.gamma - q.alpha + h)))
        rep.verdict_single_index = Verdict::NotOrdered;
    }
    // interval (index-set union) form
    if (rep.verdict_interval_form == Verdict::Ordered) {
      const StateSpace js = joint_space(lower, upper);
      enumerate_families(js, q, N, [&](const TupleFamily& fam) {
        const IndexSets plus = index_sets_plus(js, q, fam);
        const IndexSets minus = index_sets_minus(js, q, fam);
        if (!(jump_over(lower, q.alpha, q.beta, plus.a) <=
              jump_over(upper, q.gamma, q.delta, plus.b)) ||
            !(jump_over(lower, q.alpha, q.beta, minus.b) >=
              jump_over(upper, q.gamma, q.delta, minus.a))) {
          rep.verdict_interval_form = Verdict::NotOrdered;
          return false;
        }
        return true;
      });
    }
  }
  rep.agree = rep.verdict_single_index == rep.verdict_interval_form;
  return rep;
}

namespace {

// Up-sets of the grid poset X^2 as staircases: (a,b) in V iff b >= t[a],
// t nonincreasing with entries in [0, M+1].
struct Staircase {
  std::vector<int> t;

  bool contains(int a, int b) const { return b >= t[size_t(a)]; }
};

bool next_staircase(std::vector<int>& t, int M) {
  // lexicographic successor among nonincreasing vectors over [0, M+1]
  const int n = int(t.size());
  for (int i = n - 1; i >= 0; --i) {
    const int cap = i == 0 ? M + 1 : t[size_t(i) - 1];
    if (t[size_t(i)] < cap) {
      ++t[size_t(i)];
      for (int j = i + 1; j < n; ++j) t[size_t(j)] = 0;
      return true;
    }
  }
  return false;
}

// Two-site generator applied to an up-set indicator, exactly. Transitions
// that would leave X are no-ops and contribute nothing.
Rat generator_on_upset(const TwoSiteSystem& sys, const TwoSiteState& s,
                       const Staircase& V) {
  const int M = sys.spec.M();
  const bool in0 = V.contains(s.x, s.y);
  Rat total(0);
  for (int k = 1; k <= sys.spec.k_max(); ++k) {
    if (s.x - k >= 0 && s.y + k <= M) {
      const bool in1 = V.contains(s.x - k, s.y + k);
      if (in1 != in0) total += sys.jump_rate(k, s.x, s.y) * (in1 ? 1 : -1);
    }
    if (s.y + k <= M) {
      const bool in1 = V.contains(s.x, s.y + k);
      if (in1 != in0) total += sys.add_rate(k, s.x, s.y) * (in1 ? 1 : -1);
    }
    if (s.x - k >= 0) {
      const bool in1 = V.contains(s.x - k, s.y);
      if (in1 != in0) total += sys.sub_rate(k, s.x, s.y) * (in1 ? 1 : -1);
    }
  }
  return total;
}

}  // namespace

OracleResult oracle_increasing_sets(const LocalizedPairSystem& sys,
                                    int max_occupancy_cap) {
  const int M = sys.lower.spec.M();
  if (M > max_occupancy_cap) throw StateSpaceTooLarge();

  OracleResult res{true, 0, 0, std::nullopt};
  std::vector<int> t(size_t(M) + 1, 0);
  Staircase V{t};
  do {
    V.t = t;
    ++res.sets_checked;
    for (int x1 = 0; x1 <= M; ++x1)
      for (int y1 = 0; y1 <= M; ++y1)
        for (int x2 = x1; x2 <= M; ++x2)
          for (int y2 = y1; y2 <= M; ++y2) {
            const TwoSiteState xi{x1, y1}, eta{x2, y2};
            if (V.contains(x1, y1) != V.contains(x2, y2)) continue;
            ++res.pairs_checked;
            Rat lhs = generator_on_upset(sys.lower, xi, V);
            Rat rhs = generator_on_upset(sys.upper, eta, V);
            if (!(lhs <= rhs)) {
              res.ordered = false;
              res.counterexample = OracleCounterexample{xi, eta, V.t, lhs, rhs};
              return res;
            }
          }
  } while (next_staircase(t, M));
  return res;
}

OracleResult oracle_increasing_sets(const RateSpec& lower, const RateSpec& upper,
                                    int max_occupancy_cap) {
  return oracle_increasing_sets(localize(lower, upper, Rat(1)), max_occupancy_cap);
}

const RateSpec& GeneralSystem::rates_at(int x, int y) const {
  auto it = pair_overrides.find({x, y});
  return it == pair_overrides.end() ? base : it->second;
}

namespace {

std::optional<Witness> scan_general_pair(const RateSpec& lo, const Rat& p_lo,
                                         const RateSpec& up, const Rat& p_up,
                                         long& quads, long& families) {
  for (const Quadruple& q : all_quadruples(lo.M(), up.M())) {
    ++quads;
    const int N = std::max(lo.N(q.alpha, q.beta), up.N(q.gamma, q.delta));
    std::optional<Witness> hit;
    enumerate_families(joint_space(lo, up), q, N, [&](const TupleFamily& fam) {
      ++families;
      {
        auto r = check_condition_plus(lo, up, q, fam);
        Rat lhs = r.lhs * p_lo, rhs = r.rhs * p_up;
        if (!(lhs <= rhs)) {
          hit = Witness{q, Side::CPlus, fam, lhs, rhs};
          return false;
        }
      }
      {
        auto r = check_condition_minus(lo, up, q, fam);
        Rat lhs = r.lhs * p_lo, rhs = r.rhs * p_up;
        if (!(lhs >= rhs)) {
          hit = Witness{q, Side::CMinus, fam, lhs, rhs};
          return false;
        }
      }
      return true;
    });
    if (hit) return hit;
  }
  return std::nullopt;
}

}  // namespace

Certificate certify_general(const GeneralSystem& lower, const GeneralSystem& upper) {
  if (lower.kernel.type != upper.kernel.type)
    throw std::invalid_argument("mixed kernel kinds");
  Certificate cert;
  cert.sufficient_only = true;

  if (lower.kernel.type == Kernel::Type::Stencil) {
    if (lower.kernel.dim != upper.kernel.dim)
      throw std::invalid_argument("stencil dimensions differ");
    std::set<std::vector<int>> offsets;
    for (const auto& [off, p] : lower.kernel.stencil) offsets.insert(off);
    for (const auto& [off, p] : upper.kernel.stencil) offsets.insert(off);
    for (const auto& off : offsets) {
      auto w = scan_general_pair(lower.base, lower.kernel.offset_prob(off),
                                 upper.base, upper.kernel.offset_prob(off),
                                 cert.quadruples_checked, cert.families_checked);
      if (w) {
        cert.verdict = Verdict::NotOrdered;
        cert.witness = std::move(w);
        return cert;
      }
    }
    return cert;
  }

  if (lower.kernel.n_sites != upper.kernel.n_sites)
    throw std::invalid_argument("explicit kernels cover different site sets");
  std::set<std::pair<int, int>> support;
  for (const auto& [xy, p] : lower.kernel.pairs) support.insert(xy);
  for (const auto& [xy, p] : upper.kernel.pairs) support.insert(xy);
  for (const auto& [x, y] : support) {
    auto w = scan_general_pair(
        lower.rates_at(x, y), lower.kernel.pair_prob(x, y), upper.rates_at(x, y),
        upper.kernel.pair_prob(x, y), cert.quadruples_checked,
        cert.families_checked);
    if (w) {
      cert.verdict = Verdict::NotOrdered;
      cert.witness = std::move(w);
      return cert;
    }
  }
  return cert;
}

}  // namespace ips
