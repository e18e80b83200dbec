#pragma once

#include <map>
#include <string>
#include <vector>

#include "stacklab/plline.hpp"
#include "stacklab/words.hpp"

namespace stacklab::actions {

using words::AlternatingWord;
using words::Factor;
using words::FactorElement;
using words::PrefixId;
using words::Word;

// Action of one free factor: generator index -> PL map; unlisted generators
// act as the identity.
struct FactorAction {
  Factor factor = Factor::A;
  std::map<int, pl::PLHomeo> gens;

  const pl::PLHomeo& gen(int g) const;
  // Hull of all generator supports, or nullopt for the trivial action.
  std::optional<pl::Interval> support_hull() const;
};

pl::PLHomeo eval_factor(const FactorAction& act, const FactorElement& e);
Rat apply_factor(const FactorAction& act, const FactorElement& e, Rat x);

struct ProductAction {
  FactorAction a{Factor::A, {}};
  FactorAction b{Factor::B, {}};

  const FactorAction& of(Factor f) const { return f == Factor::A ? a : b; }
  FactorAction& of(Factor f) { return f == Factor::A ? a : b; }
  std::optional<pl::Interval> support_hull() const;
};

pl::PLHomeo eval_word(const ProductAction& act, const Word& w);
pl::PLHomeo eval_word(const ProductAction& act, const AlternatingWord& w);
Rat apply_word(const ProductAction& act, const Word& w, Rat x);

struct Trajectory {
  Rat base;
  std::vector<Rat> points;  // points[i] = image of base under the prefix of length i+1
};

Trajectory trajectory(const ProductAction& act, const AlternatingWord& w, const Rat& x);

struct StabilityVerdict {
  enum class Kind { Stable, Duplicate, NotClosed };
  Kind kind = Kind::Stable;
  PrefixId p1 = 0, p2 = 0;  // duplicate pair (lexicographically least), if any
  Rat final_point;          // image of x under the full word
  std::string str() const;
  bool stable() const { return kind == Kind::Stable; }
};

// The independent acceptance oracle: stable iff all |w| trajectory points are
// pairwise distinct and the final point returns to x. Deterministic reporting:
// closure first, then the lexicographically least duplicate pair.
StabilityVerdict check_stability(const ProductAction& act, const AlternatingWord& w, const Rat& x);

// Generator-wise diagonal product of actions with pairwise disjoint hulls.
ProductAction generated_diagonal(const std::vector<ProductAction>& acts);

struct StackingCertificate {
  AlternatingWord word;
  ProductAction action;
  Rat base;
  std::map<PrefixId, Rat> lambda;
};

StackingCertificate make_certificate(const AlternatingWord& w, const ProductAction& act,
                                     const Rat& base);

struct CertificateVerdict {
  StabilityVerdict stability;
  bool lambda_matches = true;  // stored table equals the recomputed trajectory
  PrefixId first_mismatch = 0;
  bool ok() const { return stability.stable() && lambda_matches; }
};

// Recomputes the trajectory and checks the stored lambda table bit-exactly.
CertificateVerdict verify_certificate(const StackingCertificate& cert);

}  // namespace stacklab::actions
