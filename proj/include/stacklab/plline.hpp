#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stacklab/errors.hpp"
#include "stacklab/rat.hpp"

namespace stacklab::pl {

struct Interval {
  Rat lo, hi;
  bool lo_open = false, hi_open = false;

  Interval() : lo(0), hi(0) {}
  Interval(Rat l, Rat h, bool lopen = false, bool hopen = false)
      : lo(std::move(l)), hi(std::move(h)), lo_open(lopen), hi_open(hopen) {
    if (lo > hi) throw InputError("interval with lo > hi");
    if (lo == hi && (lo_open || hi_open)) throw InputError("degenerate open interval");
  }

  Rat length() const { return hi - lo; }
  Rat midpoint() const { return (lo + hi) / 2; }
  bool degenerate() const { return lo == hi; }
  bool contains(const Rat& x) const {
    if (x < lo || x > hi) return false;
    if (x == lo && lo_open) return false;
    if (x == hi && hi_open) return false;
    return true;
  }
  bool operator==(const Interval& rhs) const = default;
  std::string str() const;
};

// Exact strictly increasing PL homeomorphism of the line, identity outside the
// breakpoint hull. Canonical form: no collinear interior breakpoints, no
// redundant diagonal endpoints; the identity is the empty list. Structural
// equality is therefore semantic equality.
class PLHomeo {
 public:
  PLHomeo() = default;  // identity

  static PLHomeo from_breakpoints(std::vector<std::pair<Rat, Rat>> bps);

  bool is_identity() const { return bp_.empty(); }
  const std::vector<std::pair<Rat, Rat>>& breakpoints() const { return bp_; }

  Rat operator()(const Rat& x) const;
  Rat inverse_at(const Rat& y) const;
  PLHomeo inverse() const;

  // Hull [first.x, last.x] outside of which the map is the identity.
  std::optional<Interval> support() const;

  bool operator==(const PLHomeo& rhs) const = default;
  std::string str() const;

 private:
  std::vector<std::pair<Rat, Rat>> bp_;
  friend PLHomeo compose(const PLHomeo&, const PLHomeo&);
};

inline PLHomeo identity() { return PLHomeo(); }

// Right-action order: the map x -> h(g(x)), i.e. apply g first.
PLHomeo compose(const PLHomeo& g, const PLHomeo& h);

// Minimal mover supported in the open interval `support` hitting each
// prescribed pair exactly. Pairs must be jointly strictly increasing and
// strictly inside the support.
PLHomeo make_mover(const Interval& support, const std::vector<std::pair<Rat, Rat>>& pairs);

// Conjugate of h by the unique orientation-preserving affine map from -> to.
PLHomeo affine_conjugate(const PLHomeo& h, const Interval& from, const Interval& to);

// Conjugate of h (supported within `window`) through phi: the map agreeing
// with phi . h . phi^{-1} on phi(window) and the identity elsewhere.
PLHomeo pl_conjugate(const PLHomeo& h, const PLHomeo& phi, const Interval& window);

// The map agreeing with each h_i on its support; supports must have pairwise
// disjoint interiors.
PLHomeo diagonal_product(const std::vector<PLHomeo>& hs);

// Maximal connected subsets of `window` (closed) where h(x) = x, sorted.
std::vector<Interval> fixed_sets(const PLHomeo& h, const Interval& window);

// Increasing PL function on a closed interval, as sampled graph points
// (restriction of a PLHomeo, or an inverse piece for plateau surgery).
struct PLSegment {
  std::vector<std::pair<Rat, Rat>> pts;  // >= 2 points, strictly increasing both ways

  Rat lo() const { return pts.front().first; }
  Rat hi() const { return pts.back().first; }
  Rat eval(const Rat& x) const;
  PLSegment inverted() const;  // swap coordinates
};

// Restriction of h to [window.lo, window.hi].
PLSegment restrict(const PLHomeo& h, const Interval& window);

// Rebuilds h so that a neighborhood of `center` maps by rigid translation
// (slope 1 through (center, h(center))), bridging back to the old graph
// strictly between the surrounding breakpoints. Points listed in `preserve`
// keep their exact images; half_cap bounds the window half-width. Values
// change only strictly between the bracketing breakpoints around `center`.
PLHomeo rigidify_at(const PLHomeo& h, const Rat& center, const std::vector<Rat>& preserve,
                    const Rat& half_cap);

// Replaces the graph of h over [piece.lo(), piece.hi()] with `piece`.
// Endpoint values must agree with h for continuity.
PLHomeo splice(const PLHomeo& h, const PLSegment& piece);

}  // namespace stacklab::pl
