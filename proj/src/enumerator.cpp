#include "stacklab/enumerator.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <thread>

namespace stacklab::enumerate {

using surf::Arc;
using surf::JunctureId;
using surf::WBoundary;

namespace {

// Juncture typing without building a surface (the matching is not known yet).
bool juncture_type_ab(const AlternatingWord& w, const std::vector<int>& exps, int b, int pos) {
  int L = w.size();
  int size = (exps[size_t(b)] < 0 ? -exps[size_t(b)] : exps[size_t(b)]) * L;
  int prev = (pos + size - 1) % size;
  int p = prev % L;
  words::Factor f;
  if (exps[size_t(b)] > 0) {
    f = w.letter(p + 1).factor();
  } else {
    int idx = (L - p) % L;
    if (idx == 0) idx = L;
    f = w.letter(idx).factor();
  }
  return f == words::Factor::A;
}

}  // namespace

void enumerate_surfaces(const AlternatingWord& w, const std::vector<int>& boundary_exponents,
                        int juncture_cap,
                        const std::function<void(const NormalFormSurface&)>& yield) {
  if (!w.cyclically_reduced())
    throw NotCyclicallyReduced("enumerate_surfaces: word not cyclically reduced");
  long total = 0;
  for (int n : boundary_exponents) {
    if (n == 0) throw InputError("boundary exponent must be nonzero");
    total += long(n < 0 ? -n : n) * w.size();
  }
  if (total > juncture_cap) throw CapExceeded("juncture total exceeds the configured cap");

  std::vector<JunctureId> ab, ba;
  for (int b = 0; b < int(boundary_exponents.size()); ++b) {
    int size = (boundary_exponents[size_t(b)] < 0 ? -boundary_exponents[size_t(b)]
                                                  : boundary_exponents[size_t(b)]) *
               w.size();
    for (int pos = 0; pos < size; ++pos) {
      (juncture_type_ab(w, boundary_exponents, b, pos) ? ab : ba).push_back({b, pos});
    }
  }
  std::sort(ab.begin(), ab.end());
  std::sort(ba.begin(), ba.end());
  if (ab.size() != ba.size())
    throw InternalCheckFailed("unbalanced juncture types");

  std::vector<WBoundary> bs;
  for (int n : boundary_exponents) bs.push_back(WBoundary{n});

  std::vector<size_t> perm(ba.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<Arc> arcs;
    arcs.reserve(ab.size());
    for (size_t i = 0; i < ab.size(); ++i) arcs.push_back({ab[i], ba[perm[i]]});
    yield(NormalFormSurface(w, bs, arcs));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

std::vector<NormalFormSurface> collect_surfaces(const AlternatingWord& w,
                                                const std::vector<int>& boundary_exponents,
                                                int juncture_cap) {
  std::vector<NormalFormSurface> out;
  enumerate_surfaces(w, boundary_exponents, juncture_cap,
                     [&out](const NormalFormSurface& s) { out.push_back(s); });
  return out;
}

std::vector<std::vector<int>> boundary_multisets(int max_degree) {
  // Multisets of nonzero exponents, sorted descending by (|n|, sign>0), for
  // each total degree 1..max_degree.
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  // Order candidate exponents: larger |n| first, positive before negative.
  std::vector<int> alphabet;
  for (int m = max_degree; m >= 1; --m) {
    alphabet.push_back(m);
    alphabet.push_back(-m);
  }
  auto rank = [&alphabet](int v) {
    return std::find(alphabet.begin(), alphabet.end(), v) - alphabet.begin();
  };
  std::function<void(int, size_t)> rec = [&](int remaining, size_t min_rank) {
    if (!cur.empty()) out.push_back(cur);
    if (remaining == 0) return;
    for (size_t r = min_rank; r < alphabet.size(); ++r) {
      int v = alphabet[r];
      int d = v < 0 ? -v : v;
      if (d > remaining) continue;
      cur.push_back(v);
      rec(remaining - d, r);
      cur.pop_back();
    }
  };
  rec(max_degree, 0);
  // The recursion emits prefixes in DFS order; keep deterministic order and
  // drop duplicates (none expected, but cheap to assert).
  std::sort(out.begin(), out.end(), [&rank](const auto& a, const auto& b) {
    int da = 0, db = 0;
    for (int v : a) da += v < 0 ? -v : v;
    for (int v : b) db += v < 0 ? -v : v;
    if (da != db) return da < db;
    std::vector<size_t> ra, rb;
    for (int v : a) ra.push_back(rank(v));
    for (int v : b) rb.push_back(rank(v));
    return ra < rb;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

struct MultisetTally {
  long surfaces = 0;
  long witness_free = 0;
  std::optional<long> min_slack;
  std::vector<SweepReport::Counterexample> counterexamples;
  std::vector<std::string> check_violations;
  long checked_pieces = 0;
};

MultisetTally sweep_one(const AlternatingWord& w, const actions::StackingCertificate& cert,
                        const std::vector<int>& exps, int juncture_cap) {
  MultisetTally t;
  enumerate_surfaces(w, exps, juncture_cap, [&](const NormalFormSurface& s) {
    t.surfaces++;
    surf::AuditReport rep = surf::audit(s, cert);
    if (rep.verdict == surf::AuditReport::Verdict::NotApplicable) return;
    t.witness_free++;
    long slack = rep.euler_neg - rep.degree;
    if (!t.min_slack || slack < *t.min_slack) t.min_slack = slack;
    t.checked_pieces += long(rep.pieces.size());
    for (const auto& v : rep.check_violations) t.check_violations.push_back(v);
    if (rep.verdict == surf::AuditReport::Verdict::Violated)
      t.counterexamples.push_back(
          {exps, s.matching(), rep.euler_neg, rep.degree});
  });
  return t;
}

}  // namespace

SweepReport sweep_audit(const AlternatingWord& w, const actions::StackingCertificate& cert,
                        int max_degree, int juncture_cap, int jobs) {
  if (!verify_certificate(cert).ok())
    throw PreconditionError("sweep_audit: certificate is not stable");
  if (!(cert.word == w)) throw WordMismatch("sweep_audit: certificate is for another word");

  auto multisets = boundary_multisets(max_degree);
  std::vector<MultisetTally> tallies(multisets.size());

  if (jobs <= 1) {
    for (size_t i = 0; i < multisets.size(); ++i)
      tallies[i] = sweep_one(w, cert, multisets[i], juncture_cap);
  } else {
    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= multisets.size()) break;
        try {
          tallies[i] = sweep_one(w, cert, multisets[i], juncture_cap);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          break;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  SweepReport rep;
  rep.word = w.str();
  rep.max_degree = max_degree;
  for (const auto& t : tallies) {  // deterministic merge in multiset order
    rep.surfaces += t.surfaces;
    rep.witness_free += t.witness_free;
    if (t.min_slack && (!rep.min_slack || *t.min_slack < *rep.min_slack))
      rep.min_slack = t.min_slack;
    rep.checked_pieces += t.checked_pieces;
    for (const auto& c : t.counterexamples) rep.counterexamples.push_back(c);
    for (const auto& v : t.check_violations) rep.check_violations.push_back(v);
  }
  return rep;
}

namespace {

// Reduced generator-letter strings over both factors, length <= max_len.
void gen_conjugators(int rank_a, int rank_b, int max_len, std::vector<Word>& out) {
  using words::Factor;
  using words::FactorElement;
  struct Letter {
    Factor f;
    int gen;
    int sign;
  };
  std::vector<Letter> alphabet;
  for (int g = 1; g <= rank_a; ++g)
    for (int s : {1, -1}) alphabet.push_back({Factor::A, g, s});
  for (int g = 1; g <= rank_b; ++g)
    for (int s : {1, -1}) alphabet.push_back({Factor::B, g, s});

  std::vector<Letter> cur;
  std::function<void()> rec = [&]() {
    std::vector<FactorElement> letters;
    for (const auto& l : cur) letters.push_back(FactorElement::generator(l.f, l.gen, l.sign));
    out.push_back(words::reduce(Word(std::move(letters))));
    if (int(cur.size()) >= max_len) return;
    for (const auto& l : alphabet) {
      if (!cur.empty() && cur.back().f == l.f && cur.back().gen == l.gen &&
          cur.back().sign == -l.sign)
        continue;  // immediate cancellation
      cur.push_back(l);
      rec();
      cur.pop_back();
    }
  };
  rec();
}

}  // namespace

std::vector<EquationSolution> search_equations(const FactorElement& a, const Word& w, int max_k,
                                               int max_conj_len, int max_exp, long long budget,
                                               int rank_a, int rank_b) {
  if (max_k < 1 || max_exp < 1) throw InputError("search_equations: bounds must be positive");
  Word wr = words::reduce(w);
  if (wr.empty()) throw InputError("search_equations: trivial word");

  std::vector<Word> gs;
  gen_conjugators(rank_a, rank_b, max_conj_len, gs);

  // Canonicalize conjugators modulo g -> g*w: keep g only if no shorter (or
  // equal-length, lexicographically earlier) representative exists.
  auto keyof = [](const Word& g) {
    std::vector<std::tuple<int, int, long long>> key;
    for (const auto& l : g.letters)
      for (const auto& s : l.syllables())
        key.emplace_back(int(l.factor()), s.gen, s.exp);
    return key;
  };
  std::vector<Word> canon;
  for (const auto& g : gs) {
    bool keep = true;
    for (const Word& side : {words::reduce(g * wr), words::reduce(g * wr.inverse())}) {
      if (side.gen_length() < g.gen_length() ||
          (side.gen_length() == g.gen_length() && keyof(side) < keyof(g)))
        keep = false;
    }
    if (keep) canon.push_back(g);
  }

  // Precompute the conjugated powers g w^n g^-1.
  long long steps = 0;
  auto charge = [&steps, budget](long long amount) {
    steps += amount;
    if (steps > budget) throw BudgetExceeded("search_equations: budget exceeded");
  };
  struct Term {
    Word g;
    int n;
    Word value;
  };
  std::vector<Term> terms;
  for (const auto& g : canon) {
    Word gi = g.inverse();
    Word pw;  // w^n incrementally
    for (int n = 1; n <= max_exp; ++n) {
      pw = words::reduce(pw * wr);
      charge(4);
      terms.push_back({g, n, words::reduce(g * pw * gi)});
      terms.push_back({g, -n, words::reduce(g * pw.inverse() * gi)});
    }
  }

  Word target{std::vector<words::FactorElement>{a}};
  target = words::reduce(target);
  std::vector<EquationSolution> solutions;
  // Depth-first over k slots, maintaining the partial product.
  std::vector<std::pair<Word, int>> chosen;
  std::function<void(const Word&, int)> rec = [&](const Word& acc, int k) {
    if (k > 0 && acc == target) {
      EquationSolution sol;
      sol.k = k;
      sol.terms = chosen;
      solutions.push_back(std::move(sol));
    }
    if (k == max_k) return;
    for (const auto& t : terms) {
      charge(1);
      Word next = words::reduce(acc * t.value);
      chosen.emplace_back(t.g, t.n);
      rec(next, k + 1);
      chosen.pop_back();
    }
  };
  rec(Word{}, 0);
  return solutions;
}

std::optional<NormalFormSurface> realize_equation_shadow(const surf::EquationShadow& shadow,
                                                         int juncture_cap) {
  std::optional<NormalFormSurface> found;
  auto target = shadow.target;
  enumerate_surfaces(shadow.word, shadow.exponents, juncture_cap,
                     [&](const NormalFormSurface& s) {
                       if (found) return;
                       int annuli = 0;
                       int carrier = -1;
                       for (int i = 0; i < int(s.pieces().size()); ++i) {
                         const auto& p = s.pieces()[size_t(i)];
                         if (p.winding.is_identity()) continue;
                         annuli++;
                         // Winding must be a cyclic conjugate of the target.
                         if (p.winding.factor() != target.factor()) return;
                         carrier = i;
                       }
                       if (annuli != 1 || carrier < 0) return;
                       const auto& p = s.pieces()[size_t(carrier)];
                       // Conjugacy in a free group: equal least cyclic
                       // rotations of the cyclically reduced spellings.
                       auto cyc = [](const words::FactorElement& e) {
                         auto sp = e.spell();
                         // cyclically reduce the generator string
                         size_t b = 0, t = sp.size();
                         while (t - b >= 2 && sp[b].first == sp[t - 1].first &&
                                sp[b].second == -sp[t - 1].second) {
                           ++b;
                           --t;
                         }
                         std::vector<std::pair<int, int>> core(sp.begin() + long(b),
                                                               sp.begin() + long(t));
                         // least rotation
                         auto best = core;
                         for (size_t r = 1; r < core.size(); ++r) {
                           std::rotate(core.begin(), core.begin() + 1, core.end());
                           if (core < best) best = core;
                         }
                         return best;
                       };
                       if (cyc(p.winding) == cyc(target)) found = s;
                     });
  return found;
}

}  // namespace stacklab::enumerate
