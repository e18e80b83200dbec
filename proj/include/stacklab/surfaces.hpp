#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "stacklab/actions.hpp"
#include "stacklab/words.hpp"

namespace stacklab::surf {

using words::AlternatingWord;
using words::Factor;
using words::FactorElement;

// One w-boundary circle representing the conjugacy class of w^exponent.
struct WBoundary {
  int exponent = 1;  // != 0; degree = |exponent|
  int degree() const { return exponent < 0 ? -exponent : exponent; }
};

struct JunctureId {
  int boundary = 0;  // 0-based index into the boundary list
  int position = 0;  // 0-based position around the circle, in [0, degree*|w|)
  auto operator<=>(const JunctureId&) const = default;
};

using Arc = std::pair<JunctureId, JunctureId>;

struct SegmentRef {
  int boundary = 0;
  int position = 0;  // segment from this juncture position to the next
  auto operator<=>(const SegmentRef&) const = default;
};

struct Piece {
  Factor side = Factor::A;
  std::vector<std::pair<int, SegmentRef>> cycle;  // (arc index crossed, segment traversed)
  FactorElement winding;                          // reduced product of segment labels
  bool disk = false;                              // else annulus
  int valence() const { return int(cycle.size()); }
  int chi() const { return disk ? 1 : 0; }
};

// Combinatorial simple-normal-form w-admissible surface: w-boundary circles
// with junctures, a bipartite arc matching, and the derived piece
// decomposition. Trivial-winding pieces default to disks (the adversarial
// case for the gap inequality); annulus_overrides forces specific pieces to
// annuli instead.
class NormalFormSurface {
 public:
  NormalFormSurface(AlternatingWord word, std::vector<WBoundary> boundaries,
                    std::vector<Arc> matching, std::set<int> annulus_overrides = {});

  const AlternatingWord& word() const { return word_; }
  const std::vector<WBoundary>& boundaries() const { return boundaries_; }
  const std::vector<Arc>& matching() const { return matching_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::set<int>& annulus_overrides() const { return annulus_overrides_; }

  int degree() const;
  int juncture_count(int boundary) const { return boundaries_[size_t(boundary)].degree() * word_.size(); }
  int total_junctures() const;

  // Phase in [0, |w|): the J_w juncture this one covers, i.e. the prefix it
  // ends (phase 0 = the full word). Negative boundaries read w backwards.
  int phase(const JunctureId& j) const;
  // Incoming segment is A-labeled and outgoing B-labeled (type AB), or the
  // reverse (type BA). Types alternate around each circle.
  bool type_ab(const JunctureId& j) const;
  // Label of the segment from position p to p+1, a letter of w or an inverse.
  FactorElement segment_label(const SegmentRef& s) const;
  int arc_at(const JunctureId& j) const;  // index of the unique arc at j

 private:
  AlternatingWord word_;
  std::vector<WBoundary> boundaries_;
  std::vector<Arc> matching_;
  std::set<int> annulus_overrides_;
  std::map<JunctureId, int> arc_of_;
  std::vector<Piece> pieces_;

  void validate() const;
  void derive();
  friend std::vector<Piece> derive_pieces(const AlternatingWord&, const std::vector<WBoundary>&,
                                          const std::vector<Arc>&);
};

// Standalone derivation (same traversal the surface constructor runs).
std::vector<Piece> derive_pieces(const AlternatingWord& word,
                                 const std::vector<WBoundary>& boundaries,
                                 const std::vector<Arc>& matching);

// Exact -chi(S) = sum over pieces of d(P)/2 - chi(P).
long euler_neg(const NormalFormSurface& s);

// Independent ribbon-structure count -(V - E + sum chi(P)); used as the
// formula oracle in tests.
long euler_neg_ribbon(const NormalFormSurface& s);

// lambda-pullback along the covering maps: juncture -> lambda[phase].
std::map<JunctureId, Rat> pull_lambda(const NormalFormSurface& s,
                                      const actions::StackingCertificate& cert);

// Arc orientations from the pulled-back values. An arc joining equal values
// is the combinatorial boundary-compressibility witness.
struct CompressibilityWitness {
  int arc = 0;
  JunctureId j1, j2;  // same phase, equal pulled-back values
};

struct ArcOrientations {
  // For each arc index: the juncture the arc points TOWARDS (the smaller
  // pulled-back value).
  std::vector<JunctureId> points_to;
  bool towards(int arc, const JunctureId& j) const { return points_to[size_t(arc)] == j; }
};

std::variant<ArcOrientations, CompressibilityWitness> orient_arcs(
    const NormalFormSurface& s, const std::map<JunctureId, Rat>& lambda_hat);

struct SegmentFlags {
  std::map<SegmentRef, bool> consistent;
  int consistent_total = 0;
  int inconsistent_total = 0;
};

SegmentFlags segment_consistency(const NormalFormSurface& s, const ArcOrientations& ori);

// Number of sign changes around the piece's polygonal boundary; equals the
// piece's consistent-segment count.
int sign_changes(const Piece& p, const ArcOrientations& ori);

struct PieceRow {
  Factor side;
  int valence;
  bool disk;
  FactorElement winding;
  int sc;
};

struct AuditReport {
  enum class Verdict { Holds, Violated, NotApplicable };
  Verdict verdict = Verdict::Holds;
  int degree = 0;
  long euler_neg = 0;
  int consistent_total = 0;
  int inconsistent_total = 0;
  std::vector<PieceRow> pieces;
  std::optional<CompressibilityWitness> witness;
  std::vector<std::string> check_violations;  // empty in a correct build
  bool holds() const { return verdict == Verdict::Holds; }
};

// Full spectral-gap audit pipeline for one surface against a stacking
// certificate: orient, flag segments, run the per-piece checks, and compare
// -chi(S) against deg(S).
AuditReport audit(const NormalFormSurface& s, const actions::StackingCertificate& cert);

// Combinatorial shadow of a normal-closure equation
//   a = (g_1 w^{n_1} g_1^{-1}) ... (g_k w^{n_k} g_k^{-1}):
// boundary data plus the constraints a realizing matching must satisfy. The
// matching itself is not determined by the equation; see
// enumerator::realize_equation_shadow.
struct EquationShadow {
  FactorElement target;                // a
  AlternatingWord word;                // w
  std::vector<words::Word> conjugators;
  std::vector<int> exponents;          // n_i, nonzero
  int degree = 0;                      // sum |n_i|
  long euler_neg_target = 0;           // k - 1 for the sphere with k+1 boundaries
};

EquationShadow surface_from_equation(const FactorElement& a, const AlternatingWord& w,
                                     const std::vector<words::Word>& conjugators,
                                     const std::vector<int>& exponents);

// Concrete sphere-with-(k+1)-boundaries fixture for even k: boundaries with
// alternating exponents +1,-1,..., chained same-phase arcs, and one annulus
// override; euler_neg = k - 1 by construction.
NormalFormSurface equation_sphere_fixture(const AlternatingWord& w, int k);

}  // namespace stacklab::surf
