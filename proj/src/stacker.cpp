#include "stacklab/stacker.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include "stacklab/magnus.hpp"

namespace stacklab::stacker {

using actions::apply_factor;
using actions::apply_word;
using actions::eval_word;
using pl::Interval;
using pl::PLHomeo;

Catenation build_catenation(const std::vector<BlockTag>& pattern, long origin) {
  if (pattern.empty()) throw BadPattern("catenation pattern is empty");
  for (size_t i = 1; i < pattern.size(); ++i)
    if (pattern[i].family == pattern[i - 1].family)
      throw BadPattern("catenation families must alternate");
  return Catenation{origin, pattern};
}

void ArrangementBuilder::add_pin(int block, Factor f, int gen, const Rat& src, const Rat& dst) {
  Interval b = cat_.block(block);
  if (!(src > b.lo && src < b.hi && dst > b.lo && dst < b.hi))
    throw InternalCheckFailed("pin outside its block");
  pins_[{block, int(f), gen}].emplace_back(src, dst);
}

void ArrangementBuilder::add_hop(int block, const FactorElement& e, const Rat& from,
                                 const Rat& to, const Rat& delta) {
  if (e.is_identity()) throw InternalCheckFailed("hop with trivial letter");
  if (from == to) throw InternalCheckFailed("hop must move its point");
  Interval b = cat_.block(block);
  if (cat_.tags[size_t(block)].family != e.factor())
    throw InternalCheckFailed("hop letter factor does not match block family");
  long long L = e.gen_length();
  // Evenly spaced chain from -> to; each generator letter advances one step.
  std::vector<Rat> pts;
  Rat margin = rat_min(rat_min(from - b.lo, b.hi - from), rat_min(to - b.lo, b.hi - to));
  for (long long j = 0; j <= L; ++j) pts.push_back(from + (to - from) * Rat(long(j), long(L)));
  Rat spacing = rat_abs(to - from) / Rat(long(L));
  Rat d = rat_min(delta, rat_min(spacing / 4, margin / 2));
  auto sp = e.spell();
  for (long long j = 1; j <= L; ++j) {
    auto [g, sign] = sp[size_t(j - 1)];
    const Rat& u0 = pts[size_t(j - 1)];
    const Rat& u1 = pts[size_t(j)];
    if (sign > 0) {
      add_pin(block, e.factor(), g, u0 - d, u1 - d);
      add_pin(block, e.factor(), g, u0 + d, u1 + d);
    } else {
      add_pin(block, e.factor(), g, u1 - d, u0 - d);
      add_pin(block, e.factor(), g, u1 + d, u0 + d);
    }
  }
}

ProductAction ArrangementBuilder::build() const {
  // One mover per (block, generator); same-family blocks have disjoint
  // interiors, so the diagonal product is well formed.
  std::map<std::pair<int, int>, std::vector<PLHomeo>> per_gen;  // (factor, gen)
  for (const auto& [key, pairs] : pins_) {
    auto [block, f, gen] = key;
    auto sorted = pairs;
    std::sort(sorted.begin(), sorted.end());
    try {
      per_gen[{f, gen}].push_back(pl::make_mover(cat_.block(block), sorted));
    } catch (const MonotonicityViolation& e) {
      throw InternalCheckFailed(std::string("inconsistent pins on a block: ") + e.what());
    }
  }
  ProductAction act;
  for (const auto& [key, movers] : per_gen) {
    auto [f, gen] = key;
    act.of(Factor(f)).gens[gen] = pl::diagonal_product(movers);
  }
  return act;
}

std::vector<Rat> ArrangementBuilder::pinned_sources(Factor f, int gen) const {
  std::vector<Rat> out;
  for (const auto& [key, pairs] : pins_) {
    if (std::get<1>(key) != int(f) || std::get<2>(key) != gen) continue;
    for (const auto& p : pairs) out.push_back(p.first);
  }
  return out;
}

std::vector<Rat> ArrangementBuilder::pinned_targets(Factor f, int gen) const {
  std::vector<Rat> out;
  for (const auto& [key, pairs] : pins_) {
    if (std::get<1>(key) != int(f) || std::get<2>(key) != gen) continue;
    for (const auto& p : pairs) out.push_back(p.second);
  }
  return out;
}

namespace {

struct Jitter {
  std::mt19937_64 rng;
  bool active = false;
  Rat operator()() {
    if (!active) return Rat(0);
    long k = long(rng() % 31) - 15;
    return Rat(k, 1024);
  }
};

Jitter make_jitter(const StackerConfig& cfg, int retry, unsigned salt) {
  Jitter j;
  j.active = retry > 0;
  j.rng.seed(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (unsigned(retry) + 1)) ^
             (0xbf58476d1ce4e5b9ULL * (salt + 1)));
  return j;
}

// Shared transport planner. Hop i (1-based) acts on block first + dir*(i-1);
// intermediate landings sit in the overlap with the next block, the final
// landing inside target_gap. Returns the endpoint.
Rat plan_transport(ArrangementBuilder& builder, const std::vector<FactorElement>& seg,
                   int first_block, int dir, const Rat& start, const Interval& target_gap,
                   const Rat& delta, Jitter& jit) {
  const Catenation& cat = builder.catenation();
  int K = int(seg.size());
  if (K == 0) return start;
  int last_block = first_block + dir * (K - 1);
  if (first_block < 0 || first_block >= cat.size() || last_block < 0 || last_block >= cat.size())
    throw CapacityExceeded("transport segment does not fit the catenation");
  Rat cur = start;
  if (!cat.block(first_block).contains(cur))
    throw InternalCheckFailed("transport start outside its first block");
  for (int i = 1; i <= K; ++i) {
    int b = first_block + dir * (i - 1);
    Rat landing;
    if (i == K) {
      landing = target_gap.midpoint() + jit() * target_gap.length() / 4;
    } else {
      // Overlap with the next block in the travel direction.
      Rat base = cat.block(b).lo;  // = origin + b
      landing = (dir > 0 ? base + Rat(7, 4) : base + Rat(1, 4)) + jit();
    }
    builder.add_hop(b, seg[size_t(i - 1)], cur, landing, delta);
    cur = landing;
  }
  if (!target_gap.contains(cur)) throw InternalCheckFailed("transport missed its target gap");
  return cur;
}

std::vector<BlockTag> forward_tags(const std::vector<FactorElement>& v, int count,
                                   const std::string& stem) {
  std::vector<BlockTag> tags;
  for (int i = 0; i < count; ++i)
    tags.push_back({v[size_t(i)].factor(), stem + std::to_string(i + 1)});
  return tags;
}

}  // namespace

Transport rightward_transport(const std::vector<FactorElement>& segment, const Catenation& cat,
                              const Rat& start, const Interval& target_gap,
                              const StackerConfig& cfg) {
  if (int(segment.size()) > cat.size())
    throw CapacityExceeded("segment letters outnumber catenation blocks");
  ArrangementBuilder builder(cat);
  Jitter jit;
  Rat end = plan_transport(builder, segment, 0, +1, start, target_gap, cfg.carried_delta, jit);
  ProductAction act = builder.build();
  return Transport{act.a, act.b, end, cfg.carried_delta};
}

Transport leftward_transport(const std::vector<FactorElement>& segment, const Catenation& cat,
                             const Rat& start, const Interval& target_gap,
                             const StackerConfig& cfg) {
  if (int(segment.size()) > cat.size())
    throw CapacityExceeded("segment letters outnumber catenation blocks");
  ArrangementBuilder builder(cat);
  Jitter jit;
  Rat end = plan_transport(builder, segment, cat.size() - 1, -1, start, target_gap,
                           cfg.carried_delta, jit);
  ProductAction act = builder.build();
  return Transport{act.a, act.b, end, cfg.carried_delta};
}

namespace {

// Realizes the two chains of a separated pair through an order-embedding of
// the Magnus order on the factor; emits the pins and returns (v_f, v_g).
std::pair<Rat, Rat> plan_separated_pair(ArrangementBuilder& builder, int block,
                                        const FactorElement& f, const FactorElement& g,
                                        const Rat& x, const Rat& y) {
  if (f.is_identity() || g.is_identity())
    throw EqualElements("separated_pair needs nontrivial elements");
  if (f == g) throw EqualElements("separated_pair needs distinct elements");
  if (f.factor() != g.factor()) throw FactorMismatch("separated_pair elements in one factor");
  Interval b = builder.catenation().block(block);
  if (!(b.lo < x && x < y && y < b.hi))
    throw InternalCheckFailed("separated_pair points must be ordered inside the block");

  // Prefix chains as group elements (distinct within each chain).
  auto chain_of = [&](const FactorElement& e) {
    std::vector<FactorElement> chain{FactorElement::identity(e.factor())};
    for (auto [gen, sign] : e.spell())
      chain.push_back(chain.back() * FactorElement::generator(e.factor(), gen, sign));
    return chain;
  };
  std::vector<FactorElement> cf = chain_of(f), cg = chain_of(g);

  // Want (Y, g) before (X, f): flip the order when f comes first.
  bool flip = !magnus::less(g, f);
  auto elem_before = [flip](const FactorElement& u, const FactorElement& v) {
    return flip ? magnus::less(v, u) : magnus::less(u, v);
  };

  struct Formal {
    int tag;  // 0 = f-chain, 1 = g-chain
    FactorElement elem;
  };
  std::vector<Formal> pts;
  for (const auto& e : cf) pts.push_back({0, e});
  for (const auto& e : cg) pts.push_back({1, e});
  std::sort(pts.begin(), pts.end(), [&](const Formal& a, const Formal& bb) {
    if (!(a.elem == bb.elem)) return elem_before(a.elem, bb.elem);
    return a.tag < bb.tag;
  });

  // Order-embed into the block: x and y are pinned, the rest spread evenly
  // into the three zones they delimit.
  auto index_of = [&pts](int tag, const FactorElement& e) {
    for (size_t i = 0; i < pts.size(); ++i)
      if (pts[i].tag == tag && pts[i].elem == e) return i;
    throw InternalCheckFailed("separated_pair: formal point missing");
  };
  size_t ix = index_of(0, FactorElement::identity(f.factor()));
  size_t iy = index_of(1, FactorElement::identity(g.factor()));
  if (!(ix < iy)) throw InternalCheckFailed("separated_pair: base points out of order");

  std::vector<Rat> rho(pts.size());
  rho[ix] = x;
  rho[iy] = y;
  long below = long(ix), between = long(iy - ix - 1), above = long(pts.size() - iy - 1);
  for (long i = 0; i < below; ++i)
    rho[size_t(i)] = b.lo + (x - b.lo) * Rat(i + 1, below + 1);
  for (long i = 0; i < between; ++i)
    rho[ix + 1 + size_t(i)] = x + (y - x) * Rat(i + 1, between + 1);
  for (long i = 0; i < above; ++i)
    rho[iy + 1 + size_t(i)] = y + (b.hi - y) * Rat(i + 1, above + 1);

  auto place = [&](int tag, const FactorElement& e) { return rho[index_of(tag, e)]; };

  auto emit = [&](int tag, const FactorElement& e, const std::vector<FactorElement>& chain) {
    auto sp = e.spell();
    for (size_t j = 1; j < chain.size(); ++j) {
      auto [gen, sign] = sp[j - 1];
      Rat from = place(tag, chain[j - 1]);
      Rat to = place(tag, chain[j]);
      if (sign > 0)
        builder.add_pin(block, e.factor(), gen, from, to);
      else
        builder.add_pin(block, e.factor(), gen, to, from);
    }
  };
  emit(0, f, cf);
  emit(1, g, cg);
  return {place(0, f), place(1, g)};
}

}  // namespace

FactorAction separated_pair(const Interval& interval, const FactorElement& f,
                            const FactorElement& g, const Rat& x, const Rat& y) {
  if (!(x < y)) throw InputError("separated_pair needs x < y");
  // Host the construction on a single synthetic block matching the interval:
  // the catenation origin/length conventions are irrelevant here.
  Catenation cat;
  cat.origin = 0;
  cat.tags = {{f.factor(), "S"}};
  ArrangementBuilder builder(cat);
  // Rescale: builder blocks are integer length-2 intervals; plan on the unit
  // block, then conjugate onto the requested interval.
  auto [vf, vg] = plan_separated_pair(builder, 0, f, g,
                                      Rat(2) * (x - interval.lo) / interval.length(),
                                      Rat(2) * (y - interval.lo) / interval.length());
  (void)vf;
  (void)vg;
  ProductAction act = builder.build();
  FactorAction out{f.factor(), {}};
  Interval unit(Rat(0), Rat(2), true, true);
  for (auto& [gen, h] : act.of(f.factor()).gens)
    out.gens[gen] = pl::affine_conjugate(h, unit, interval);
  return out;
}

EquationSystem conjugate_system(const EquationSystem& sys, const Word& h) {
  EquationSystem out;
  Word hi = h.inverse();
  for (const auto& a : sys.equations) out.equations.push_back(words::reduce(hi * a * h));
  for (const auto& b : sys.inequations) out.inequations.push_back(words::reduce(hi * b * h));
  return out;
}

bool satisfies(const SystemSolution& sol, const EquationSystem& sys) {
  for (const auto& a : sys.equations)
    if (apply_word(sol.action, a, sol.point) != sol.point) return false;
  for (const auto& b : sys.inequations)
    if (apply_word(sol.action, b, sol.point) == sol.point) return false;
  return true;
}

SystemSolution transfer_solution(const SystemSolution& sol, const Word& h) {
  return SystemSolution{sol.action, apply_word(sol.action, h, sol.point)};
}

namespace {

struct GenLetter {
  Factor f;
  int gen;
  int sign;
};

std::vector<GenLetter> spell_word(const std::vector<FactorElement>& letters) {
  std::vector<GenLetter> out;
  for (const auto& l : letters)
    for (auto [g, s] : l.spell()) out.push_back({l.factor(), g, s});
  return out;
}

const PLHomeo& gen_map(const ProductAction& act, Factor f, int gen) {
  return act.of(f).gen(gen);
}

PLHomeo letter_map(const ProductAction& act, const GenLetter& gl) {
  const PLHomeo& m = gen_map(act, gl.f, gl.gen);
  return gl.sign > 0 ? m : m.inverse();
}

// Rewrites the action so that every generator-letter step along the orbit of
// x under w moves a small neighborhood by rigid translation: the finite
// stand-in for the coherent interval identifications of the blow-up. Orbit
// values are preserved exactly; the w-composite becomes the identity on an
// interval around x, returned as the carried interval.
struct RigidOrbit {
  ProductAction action;
  Interval carried;
};

std::optional<RigidOrbit> rigidify_orbit(const ProductAction& act, const AlternatingWord& w,
                                         const Rat& x, const Rat& cap) {
  auto spelled = spell_word(w.letters());
  size_t M = spelled.size();
  std::vector<Rat> tp{x};
  for (const auto& gl : spelled) {
    const PLHomeo& k = act.of(gl.f).gen(gl.gen);
    tp.push_back(gl.sign > 0 ? k(tp.back()) : k.inverse_at(tp.back()));
  }
  if (tp.back() != x) return std::nullopt;

  // Translation centers live on the forward map's domain side.
  std::map<std::pair<int, int>, std::vector<Rat>> centers;
  for (size_t t = 1; t <= M; ++t) {
    const GenLetter& gl = spelled[t - 1];
    centers[{int(gl.f), gl.gen}].push_back(gl.sign > 0 ? tp[t - 1] : tp[t]);
  }
  for (auto& [key, cs] : centers) {
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  }

  ProductAction out = act;
  for (const auto& [key, cs] : centers) {
    Factor f = Factor(key.first);
    PLHomeo k = out.of(f).gen(key.second);
    if (k.is_identity()) continue;
    for (size_t i = 0; i < cs.size(); ++i) {
      std::vector<Rat> preserve;
      for (size_t j = 0; j < cs.size(); ++j)
        if (j != i) preserve.push_back(cs[j]);
      k = pl::rigidify_at(k, cs[i], preserve, cap);
    }
    out.of(f).gens[key.second] = k;
  }

  // Orbit preservation is structural; keep the exact check as a guard.
  Rat cur = x;
  for (size_t t = 1; t <= M; ++t) {
    const GenLetter& gl = spelled[t - 1];
    const PLHomeo& k = out.of(gl.f).gen(gl.gen);
    cur = gl.sign > 0 ? k(cur) : k.inverse_at(cur);
    if (cur != tp[t]) return std::nullopt;
  }

  PLHomeo h = eval_word(out, w);
  for (const auto& iv : pl::fixed_sets(h, Interval(x - 1, x + 1))) {
    if (iv.lo < x && x < iv.hi) {
      Rat m = rat_min(x - iv.lo, iv.hi - x);
      return RigidOrbit{std::move(out), Interval(x - m, x + m)};
    }
  }
  return std::nullopt;
}

struct PlateauResult {
  ProductAction action;
  Rat point;
  Interval carried;
};

// Flattens the word composite around its least fixed point in I: every
// generator-letter step along the fixed point's orbit is rewritten as a
// local translation (rigidify_orbit), so closure makes the composite the
// identity on an interval around the point. Pins and orbit values are
// preserved exactly; the witness postconditions are re-verified under the
// rewritten action, shrinking the translation windows until they hold.
PlateauResult flatten_orbit(const ProductAction& act, const std::vector<FactorElement>& v, int m,
                            const Interval& I, const StackerConfig& cfg) {
  PLHomeo h = eval_word(act, Word(std::vector<FactorElement>(v)));
  if (!(I.contains(h(I.lo)) && I.contains(h(I.hi))))
    throw InternalCheckFailed("flatten: I is not mapped into itself");
  auto fs = pl::fixed_sets(h, I);
  if (fs.empty()) throw InternalCheckFailed("flatten: no fixed point in I");
  Rat xstar = fs.front().lo;
  if (!(xstar > I.lo && xstar < I.hi))
    throw CombineFailed("flatten: fixed point on the boundary of I");

  AlternatingWord vw(v);
  Word v1w{std::vector<FactorElement>(v.begin(), v.begin() + m)};
  Rat cap = cfg.carried_delta;
  for (int attempt = 0; attempt < 40; ++attempt, cap /= 4) {
    auto rig = rigidify_orbit(act, vw, xstar, cap);
    if (!rig) throw InternalCheckFailed("flatten: orbit rigidification failed");
    Rat ilo = apply_word(rig->action, vw.as_word(), I.lo);
    Rat ihi = apply_word(rig->action, vw.as_word(), I.hi);
    if (!(I.contains(ilo) && I.contains(ihi))) continue;
    Rat slo = apply_word(rig->action, v1w, I.lo);
    Rat shi = apply_word(rig->action, v1w, I.hi);
    if (!(slo > I.hi || shi < I.lo)) continue;
    return PlateauResult{std::move(rig->action), std::move(xstar), rig->carried};
  }
  throw CombineFailed("flatten: translation windows would not settle");
}

struct ArrangementOutput {
  ProductAction action;
  Interval witness;
  ArrangementPlan plan;
  ArrangementBuilder builder;
};

ArrangementOutput build_case1(const std::vector<FactorElement>& v, int m,
                              const StackerConfig& cfg, Jitter& jit, long origin) {
  int n2 = int(v.size());
  std::vector<BlockTag> tags = forward_tags(v, n2, "F");
  {
    auto mid = forward_tags(v, m, "G");
    tags.insert(tags.end(), mid.begin(), mid.end());
    for (int q = 0; q < n2; ++q)
      tags.push_back({v[size_t(n2 - 1 - q)].factor(), "F'" + std::to_string(n2 - q)});
  }
  ArrangementBuilder builder(build_catenation(tags, origin));
  Rat o(origin);
  Rat x1 = o + 1;
  Rat y1 = o + n2 + 1;
  Rat z1 = y1 - cfg.gap_epsilon;
  Rat y2 = o + n2 + m;
  Rat z2 = y2 + cfg.gap_epsilon;
  Rat x2 = o + 2 * n2 + m;

  plan_transport(builder, v, 0, +1, x1, Interval(z1, y1, true, true), cfg.carried_delta, jit);
  std::vector<FactorElement> v1(v.begin(), v.begin() + m);
  plan_transport(builder, v1, n2, +1, z1, Interval(z2, o + n2 + m + Rat(3, 4), true, true),
                 cfg.carried_delta, jit);
  plan_transport(builder, v, 2 * n2 + m - 1, -1, x2, Interval(y2, z2, true, true),
                 cfg.carried_delta, jit);

  ArrangementPlan plan;
  plan.kind = "case1";
  plan.anchors = {{"x1", x1}, {"x2", x2}, {"y1", y1}, {"y2", y2}, {"z1", z1}, {"z2", z2}};
  plan.blocks = builder.catenation();
  return ArrangementOutput{builder.build(), Interval(z1, z2), std::move(plan),
                           std::move(builder)};
}

ArrangementOutput build_case2(const std::vector<FactorElement>& v, int m,
                              const StackerConfig& cfg, Jitter& jit, long origin) {
  int n2 = int(v.size());
  std::vector<BlockTag> tags = forward_tags(v, n2, "F");
  {
    auto mid = forward_tags(v, m - 1, "G");
    tags.insert(tags.end(), mid.begin(), mid.end());
    for (int q = 0; q < n2; ++q)
      tags.push_back({v[size_t(n2 - 1 - q)].factor(), "F'" + std::to_string(n2 - q)});
  }
  ArrangementBuilder builder(build_catenation(tags, origin));
  Rat o(origin);
  Rat x1 = o + 1;
  Rat y1 = o + n2 + Rat(1, 2);
  Rat y2 = o + n2 + 1;
  int sep_block = n2 + m - 1;  // hosts the final letters of both chains
  Rat p1 = o + n2 + m - 1;
  Rat p2 = o + n2 + m + 1;
  Rat x2 = o + 2 * n2 + m - 1;

  plan_transport(builder, v, 0, +1, x1, Interval(y1, y2, true, true), cfg.carried_delta, jit);
  std::vector<FactorElement> head(v.begin(), v.begin() + (m - 1));
  Rat u1 = plan_transport(builder, head, n2, +1, y1,
                          Interval(p1, p1 + Rat(1, 2), true, true), cfg.carried_delta, jit);
  std::vector<FactorElement> most(v.begin(), v.begin() + (n2 - 1));
  Rat u2 = plan_transport(builder, most, 2 * n2 + m - 2, -1, x2,
                          Interval(p2 - 1, p2 - Rat(1, 2), true, true), cfg.carried_delta, jit);
  if (!(u1 < u2)) throw InternalCheckFailed("case2: landings out of order");

  auto [v1val, v2val] =
      plan_separated_pair(builder, sep_block, v[size_t(m - 1)], v[size_t(n2 - 1)], u1, u2);
  if (!(v2val < v1val)) throw InternalCheckFailed("case2: separated pair not separated");

  ArrangementPlan plan;
  plan.kind = "case2";
  plan.anchors = {{"x1", x1}, {"x2", x2}, {"y1", y1}, {"y2", y2}, {"p1", p1},
                  {"p2", p2}, {"u1", u1}, {"u2", u2}, {"v1", v1val}, {"v2", v2val}};
  plan.blocks = builder.catenation();
  return ArrangementOutput{builder.build(), Interval(y1, v2val), std::move(plan),
                           std::move(builder)};
}

}  // namespace

SimpleSolution solve_simple(const AlternatingWord& w, int prefix_len, const StackerConfig& cfg,
                            int retry, unsigned salt) {
  if (!w.cyclically_reduced()) throw NotCyclicallyReduced("solve_simple: word not cyclically reduced");
  int n2 = w.size();
  if (prefix_len < 1 || prefix_len >= n2) throw InputError("solve_simple: bad prefix length");

  // Rotation loop: while the prefix and the word end with the same letter,
  // pass to the conjugate system rotating that letter to the front. A cycle
  // longer than |w| certifies a proper power.
  std::vector<FactorElement> v = w.letters();
  std::vector<FactorElement> rotations;  // letters moved to the front, in order
  int m = prefix_len;
  int guard = 0;
  while (v[size_t(m - 1)].factor() == v[size_t(n2 - 1)].factor()) {
    if (!(v[size_t(m - 1)] == v[size_t(n2 - 1)])) break;  // Case 2, letters differ
    if (++guard > n2) throw ProperPower("solve_simple: rotation loop cycled (proper power)");
    FactorElement l = v.back();
    rotations.push_back(l);
    v.pop_back();
    v.insert(v.begin(), l);
  }

  Jitter jit = make_jitter(cfg, retry, salt);
  long origin = 64L * retry;
  bool case1 = v[size_t(m - 1)].factor() != v[size_t(n2 - 1)].factor();
  ArrangementOutput arr = case1 ? build_case1(v, m, cfg, jit, origin)
                                : build_case2(v, m, cfg, jit, origin);

  PlateauResult flat = flatten_orbit(arr.action, v, m, arr.witness, cfg);

  // Exact postconditions for the rotated system.
  Word vw{v};
  Word v1w{std::vector<FactorElement>(v.begin(), v.begin() + m)};
  const Interval& I = arr.witness;
  Rat ilo = apply_word(flat.action, vw, I.lo);
  Rat ihi = apply_word(flat.action, vw, I.hi);
  if (!(I.contains(ilo) && I.contains(ihi)))
    throw InternalCheckFailed("solve_simple: I not mapped into I");
  Rat slo = apply_word(flat.action, v1w, I.lo);
  Rat shi = apply_word(flat.action, v1w, I.hi);
  if (!(slo > I.hi || shi < I.lo))
    throw InternalCheckFailed("solve_simple: I meets its prefix image");

  SimpleSolution sol{flat.action, flat.point, I, flat.carried, arr.plan};

  // Transfer back through the recorded rotations (inverse conjugators).
  for (auto it = rotations.rbegin(); it != rotations.rend(); ++it) {
    const FactorAction& fa = sol.action.of(it->factor());
    sol.point = apply_factor(fa, *it, sol.point);
    sol.witness = Interval(apply_factor(fa, *it, sol.witness.lo),
                           apply_factor(fa, *it, sol.witness.hi));
    sol.carried = Interval(apply_factor(fa, *it, sol.carried.lo),
                           apply_factor(fa, *it, sol.carried.hi));
  }

  // The carried interval must be pointwise fixed by the original word.
  PLHomeo hw = eval_word(sol.action, w);
  for (const auto& p : pl::restrict(hw, sol.carried).pts)
    if (p.first != p.second)
      throw InternalCheckFailed("solve_simple: carried interval not pointwise fixed");
  if (apply_word(sol.action, w.prefix_word(prefix_len), sol.point) == sol.point)
    throw InternalCheckFailed("solve_simple: prefix fixes the solution point");
  return sol;
}

namespace {

// Exact germ comparison at p: equal on a two-sided neighborhood, returning
// the radius on which they agree.
std::optional<Rat> germ_radius(const PLHomeo& f, const PLHomeo& g, const Rat& p) {
  if (f(p) != g(p)) return std::nullopt;
  Rat eps(1);
  auto tighten = [&eps, &p](const PLHomeo& h) {
    for (const auto& bp : h.breakpoints()) {
      if (bp.first == p) continue;
      eps = rat_min(eps, rat_abs(bp.first - p) / 2);
    }
  };
  tighten(f);
  tighten(g);
  if (f(p - eps) != g(p - eps) || f(p + eps) != g(p + eps)) return std::nullopt;
  return eps;
}

struct NestedSolution {
  ProductAction action;
  Rat point;
};

// Plants conjugated copies of the inner action along the orbit of the outer
// carried interval and merges generator-wise by composition.
NestedSolution nest(const AlternatingWord& w, const SimpleSolution& outer,
                    const NestedSolution& inner) {
  auto spelled = spell_word(w.letters());
  size_t M = spelled.size();

  // Track maps psi_t = outer composite of the first t generator letters.
  std::vector<PLHomeo> psi(M + 1);
  for (size_t t = 1; t <= M; ++t)
    psi[t] = pl::compose(psi[t - 1], letter_map(outer.action, spelled[t - 1]));

  const Rat& p = outer.point;
  std::vector<Rat> tp(M + 1);
  for (size_t t = 0; t <= M; ++t) tp[t] = psi[t](p);

  Rat du = rat_min(p - outer.carried.lo, outer.carried.hi - p);
  if (!(du > 0)) throw CombineFailed("nest: carried interval degenerate");

  // Union classes of track positions whose maps agree near p; cap du by the
  // agreement radii. Positions with equal track points but different germs
  // cannot host coherent plants.
  std::vector<size_t> cls(M + 1);
  for (size_t t = 0; t <= M; ++t) cls[t] = t;
  for (size_t s = 0; s <= M; ++s) {
    for (size_t t = s + 1; t <= M; ++t) {
      if (tp[s] != tp[t]) continue;
      auto r = germ_radius(psi[s], psi[t], p);
      if (!r) throw CombineFailed("nest: colliding track positions with different germs");
      du = rat_min(du, *r);
      cls[t] = cls[s];
    }
  }
  // Shrink until distinct-class track intervals are pairwise disjoint.
  for (int iter = 0;; ++iter) {
    if (iter > 120) throw CombineFailed("nest: track intervals would not separate");
    bool ok = true;
    for (size_t s = 0; s <= M && ok; ++s) {
      if (cls[s] != s) continue;
      for (size_t t = s + 1; t <= M && ok; ++t) {
        if (cls[t] != t) continue;
        Rat alo = psi[s](p - du), ahi = psi[s](p + du);
        Rat blo = psi[t](p - du), bhi = psi[t](p + du);
        if (!(ahi < blo || bhi < alo)) ok = false;
      }
    }
    if (ok) break;
    du /= 2;
  }
  Interval U(p - du, p + du);

  // Squeeze the inner action into the core of U.
  Interval hull = [&]() {
    auto h = inner.action.support_hull();
    Rat lo = h ? rat_min(h->lo, inner.point) : inner.point;
    Rat hi = h ? rat_max(h->hi, inner.point) : inner.point;
    return Interval(lo - 1, hi + 1);
  }();
  Interval core(p - du / 2, p + du / 2);
  Rat scale = core.length() / hull.length();
  ProductAction squeezed;
  for (Factor f : {Factor::A, Factor::B})
    for (const auto& [g, hmap] : inner.action.of(f).gens)
      squeezed.of(f).gens[g] = pl::affine_conjugate(hmap, hull, core);
  Rat xhat = core.lo + (inner.point - hull.lo) * scale;

  // Plants: positive letters act on the track interval they start from,
  // negative letters on the one they land in.
  std::map<std::tuple<int, int, size_t>, PLHomeo> plants;  // (factor, gen, class)
  for (size_t j = 1; j <= M; ++j) {
    const GenLetter& gl = spelled[j - 1];
    size_t pos = gl.sign > 0 ? j - 1 : j;
    size_t c = cls[pos];
    auto key = std::make_tuple(int(gl.f), gl.gen, c);
    if (plants.count(key)) continue;
    const PLHomeo& inner_gen = squeezed.of(gl.f).gen(gl.gen);
    if (inner_gen.is_identity()) continue;
    plants[key] = pl::pl_conjugate(inner_gen, psi[c], U);
  }

  NestedSolution out;
  out.point = xhat;
  out.action = outer.action;
  std::map<std::pair<int, int>, std::vector<PLHomeo>> per_gen;
  for (const auto& [key, plant] : plants)
    per_gen[{std::get<0>(key), std::get<1>(key)}].push_back(plant);
  for (const auto& [fg, list] : per_gen) {
    auto [f, g] = fg;
    PLHomeo planted = pl::diagonal_product(list);
    PLHomeo& slot = out.action.of(Factor(f)).gens[g];
    slot = pl::compose(planted, slot);
  }
  return out;
}

}  // namespace

SystemSolution combine_systems(const AlternatingWord& w, const std::vector<PairSolution>& sols,
                               const StackerConfig& cfg) {
  (void)cfg;
  if (sols.empty()) throw InputError("combine_systems: no solutions");
  Word ww = w.as_word();
  for (const auto& ps : sols) {
    if (ps.system.equations.size() != 1 || !(words::reduce(ps.system.equations[0]) == words::reduce(ww)))
      throw PreconditionError("combine_systems: systems must share the single equation y*w=y");
  }
  // Nest lexicographically, but only where the current merged solution still
  // violates a system: separations already present persist through further
  // nesting (the track maps are injective on the carried interval), so
  // levels whose inequations hold are skipped. Exact verification at the end
  // stays the gate.
  NestedSolution nested{sols.back().solution.action, sols.back().solution.point};
  for (size_t i = sols.size() - 1; i-- > 0;) {
    if (satisfies(SystemSolution{nested.action, nested.point}, sols[i].system)) continue;
    nested = nest(w, sols[i].solution, nested);
  }

  SystemSolution out{nested.action, nested.point};
  EquationSystem unioned;
  unioned.equations.push_back(ww);
  for (const auto& ps : sols)
    for (const auto& b : ps.system.inequations) unioned.inequations.push_back(b);
  if (!satisfies(out, unioned))
    throw CombineFailed("combine_systems: merged action failed exact re-verification");
  return out;
}

StackingCertificate build_stacking(const AlternatingWord& w, const StackerConfig& cfg) {
  if (!w.cyclically_reduced() || !w.a_first())
    throw NotCyclicallyReduced("build_stacking: need a cyclically reduced A-first word");
  if (w.size() < 2) throw NotCyclicallyReduced("build_stacking: word too short");
  if (words::is_proper_power(w)) throw ProperPower("build_stacking: word is a proper power");

  auto pairs = words::prefix_pairs(w);
  Word ww = w.as_word();
  std::string last_error = "no attempt";
  for (int retry = 0; retry <= cfg.retry_limit; ++retry) {
    try {
      std::vector<PairSolution> sols;
      sols.reserve(pairs.size());
      for (size_t idx = 0; idx < pairs.size(); ++idx) {
        const auto& pr = pairs[idx];
        EquationSystem sys;
        sys.equations.push_back(ww);
        sys.inequations.push_back(words::reduce(pr.w1 * pr.w2 * pr.w1.inverse()));

        AlternatingWord rot =
            AlternatingWord::from_word(words::reduce(pr.w1.inverse() * ww * pr.w1));
        SimpleSolution s = solve_simple(rot, pr.j - pr.i, cfg, retry, unsigned(idx));

        // Transfer back through the w1-conjugation.
        Word w1i = pr.w1.inverse();
        s.point = apply_word(s.action, w1i, s.point);
        s.witness = pl::Interval(apply_word(s.action, w1i, s.witness.lo),
                                 apply_word(s.action, w1i, s.witness.hi));
        s.carried = pl::Interval(apply_word(s.action, w1i, s.carried.lo),
                                 apply_word(s.action, w1i, s.carried.hi));
        if (!satisfies(SystemSolution{s.action, s.point}, sys))
          throw CombineFailed("build_stacking: pair solution failed its own system");

        // Rigidify the carried-interval track in the base coordinates, so
        // orbit collisions between different prefixes carry equal germs.
        bool rigid_ok = false;
        Rat cap = cfg.carried_delta;
        for (int shrink = 0; shrink < 30 && !rigid_ok; ++shrink, cap /= 4) {
          auto rig = rigidify_orbit(s.action, w, s.point, cap);
          if (!rig) break;
          if (!satisfies(SystemSolution{rig->action, s.point}, sys)) continue;
          s.action = std::move(rig->action);
          s.carried = rig->carried;
          rigid_ok = true;
        }
        if (!rigid_ok)
          throw CombineFailed("build_stacking: could not rigidify the orbit track");
        sols.push_back(PairSolution{std::move(sys), std::move(s)});
      }
      SystemSolution merged = combine_systems(w, sols, cfg);
      StackingCertificate cert = actions::make_certificate(w, merged.action, merged.point);
      if (!actions::verify_certificate(cert).ok())
        throw CombineFailed("build_stacking: certificate rejected by the stability check");
      return cert;
    } catch (const CombineFailed& e) {
      last_error = e.what();
    }
  }
  throw CombineFailed("build_stacking: retries exhausted: " + last_error);
}

}  // namespace stacklab::stacker
