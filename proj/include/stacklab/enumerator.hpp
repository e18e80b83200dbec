#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stacklab/surfaces.hpp"

namespace stacklab::enumerate {

using surf::NormalFormSurface;
using words::AlternatingWord;
using words::FactorElement;
using words::Word;

// Streams every bipartite perfect matching between AB- and BA-type junctures
// for the given boundary multiset, in lexicographic order (AB junctures
// sorted; BA assignments enumerated as permutations in lex order). Throws
// CapExceeded when the juncture total exceeds `juncture_cap`.
void enumerate_surfaces(const AlternatingWord& w, const std::vector<int>& boundary_exponents,
                        int juncture_cap,
                        const std::function<void(const NormalFormSurface&)>& yield);

std::vector<NormalFormSurface> collect_surfaces(const AlternatingWord& w,
                                                const std::vector<int>& boundary_exponents,
                                                int juncture_cap);

struct SweepReport {
  std::string word;
  int max_degree = 0;
  long surfaces = 0;
  long witness_free = 0;
  std::optional<long> min_slack;  // min of (-chi - deg) over witness-free surfaces
  struct Counterexample {
    std::vector<int> exponents;
    std::vector<surf::Arc> matching;
    long euler_neg;
    int degree;
  };
  std::vector<Counterexample> counterexamples;   // witness-free with -chi < deg
  std::vector<std::string> check_violations;     // per-piece audit-check failures, if any
  long checked_pieces = 0;
};

// Exhaustive desk-scale audit: every boundary multiset with total degree in
// [1, max_degree], every matching. jobs > 1 parallelizes over multisets with
// a deterministic merge; jobs == 1 is fully sequential with identical output.
SweepReport sweep_audit(const AlternatingWord& w, const actions::StackingCertificate& cert,
                        int max_degree, int juncture_cap, int jobs = 1);

// All boundary multisets with total degree in [1, max_degree], each sorted
// descending by (|n|, sign), in deterministic order.
std::vector<std::vector<int>> boundary_multisets(int max_degree);

struct EquationSolution {
  int k = 0;
  std::vector<std::pair<Word, int>> terms;  // (conjugator, exponent)
};

// Exhaustive bounded search for a = prod g_i w^{n_i} g_i^{-1}: all k <=
// max_k, conjugators of reduced generator-length <= max_conj_len (modulo the
// g -> g*w redundancy), 0 < |n_i| <= max_exp. Throws BudgetExceeded past
// `budget` reduction steps.
std::vector<EquationSolution> search_equations(const FactorElement& a, const Word& w, int max_k,
                                               int max_conj_len, int max_exp, long long budget,
                                               int rank_a, int rank_b);

// Searches the bounded matching space for a realization of an equation
// shadow: exactly one annulus piece whose winding is a cyclic conjugate of
// the target, all other pieces with trivial winding.
std::optional<NormalFormSurface> realize_equation_shadow(const surf::EquationShadow& shadow,
                                                         int juncture_cap);

}  // namespace stacklab::enumerate
