#include "stacklab/surfaces.hpp"

#include <algorithm>
#include <sstream>

namespace stacklab::surf {

NormalFormSurface::NormalFormSurface(AlternatingWord word, std::vector<WBoundary> boundaries,
                                     std::vector<Arc> matching, std::set<int> annulus_overrides)
    : word_(std::move(word)),
      boundaries_(std::move(boundaries)),
      matching_(std::move(matching)),
      annulus_overrides_(std::move(annulus_overrides)) {
  if (!word_.cyclically_reduced())
    throw NotCyclicallyReduced("surface word must be cyclically reduced");
  if (boundaries_.empty()) throw InvalidMatching("surface needs at least one w-boundary");
  for (const auto& b : boundaries_)
    if (b.exponent == 0) throw InvalidMatching("boundary exponent must be nonzero");
  for (int i = 0; i < int(matching_.size()); ++i) {
    for (const JunctureId& j : {matching_[size_t(i)].first, matching_[size_t(i)].second}) {
      if (j.boundary < 0 || j.boundary >= int(boundaries_.size()) || j.position < 0 ||
          j.position >= juncture_count(j.boundary))
        throw InvalidMatching("arc endpoint out of range");
      if (!arc_of_.emplace(j, i).second)
        throw InvalidMatching("juncture used by more than one arc");
    }
  }
  validate();
  derive();
}

int NormalFormSurface::degree() const {
  int d = 0;
  for (const auto& b : boundaries_) d += b.degree();
  return d;
}

int NormalFormSurface::total_junctures() const {
  int n = 0;
  for (int b = 0; b < int(boundaries_.size()); ++b) n += juncture_count(b);
  return n;
}

int NormalFormSurface::phase(const JunctureId& j) const {
  int L = word_.size();
  int p = j.position % L;
  if (boundaries_[size_t(j.boundary)].exponent > 0) return p;
  return (L - p) % L;
}

FactorElement NormalFormSurface::segment_label(const SegmentRef& s) const {
  int L = word_.size();
  int p = s.position % L;
  if (boundaries_[size_t(s.boundary)].exponent > 0) return word_.letter(p + 1);
  int idx = (L - p) % L;
  if (idx == 0) idx = L;
  return word_.letter(idx).inverse();
}

bool NormalFormSurface::type_ab(const JunctureId& j) const {
  int size = juncture_count(j.boundary);
  SegmentRef incoming{j.boundary, (j.position + size - 1) % size};
  return segment_label(incoming).factor() == Factor::A;
}

int NormalFormSurface::arc_at(const JunctureId& j) const {
  auto it = arc_of_.find(j);
  if (it == arc_of_.end()) throw InvalidMatching("juncture not covered by the matching");
  return it->second;
}

void NormalFormSurface::validate() const {
  if (int(matching_.size()) * 2 != total_junctures())
    throw InvalidMatching("matching is not a perfect matching on the junctures");
  for (const auto& [j1, j2] : matching_) {
    if (type_ab(j1) == type_ab(j2))
      throw InvalidMatching("arc must pair one AB-type juncture with one BA-type");
  }
}

void NormalFormSurface::derive() {
  pieces_ = derive_pieces(word_, boundaries_, matching_);
  for (int i = 0; i < int(pieces_.size()); ++i) {
    Piece& p = pieces_[size_t(i)];
    p.disk = p.winding.is_identity() && !annulus_overrides_.count(i);
  }
}

std::vector<Piece> derive_pieces(const AlternatingWord& word,
                                 const std::vector<WBoundary>& boundaries,
                                 const std::vector<Arc>& matching) {
  // Borrow the surface's lookup helpers via a shallow instance when called
  // standalone; the constructor calls this directly with its own state.
  struct View {
    const AlternatingWord& w;
    const std::vector<WBoundary>& bs;
    std::map<JunctureId, std::pair<int, JunctureId>> arc_other;  // j -> (arc, other end)
    int count(int b) const { return bs[size_t(b)].degree() * w.size(); }
    FactorElement label(const SegmentRef& s) const {
      int L = w.size();
      int p = s.position % L;
      if (bs[size_t(s.boundary)].exponent > 0) return w.letter(p + 1);
      int idx = (L - p) % L;
      if (idx == 0) idx = L;
      return w.letter(idx).inverse();
    }
  };
  View v{word, boundaries, {}};
  for (int i = 0; i < int(matching.size()); ++i) {
    v.arc_other[matching[size_t(i)].first] = {i, matching[size_t(i)].second};
    v.arc_other[matching[size_t(i)].second] = {i, matching[size_t(i)].first};
  }

  std::vector<Piece> pieces;
  for (Factor side : {Factor::A, Factor::B}) {
    std::set<JunctureId> visited;
    for (int b = 0; b < int(boundaries.size()); ++b) {
      for (int pos = 0; pos < v.count(b); ++pos) {
        JunctureId start{b, pos};
        // Tail junctures of this side: the outgoing segment carries the
        // side's factor.
        if (v.label(SegmentRef{b, pos}).factor() != side) continue;
        if (visited.count(start)) continue;
        Piece piece;
        piece.side = side;
        piece.winding = FactorElement::identity(side);
        JunctureId j = start;
        do {
          visited.insert(j);
          SegmentRef seg{j.boundary, j.position};
          auto it = v.arc_other.find(j);
          if (it == v.arc_other.end())
            throw InvalidMatching("juncture not covered by the matching");
          piece.cycle.emplace_back(it->second.first, seg);
          piece.winding = piece.winding * v.label(seg);
          JunctureId head{j.boundary, (j.position + 1) % v.count(j.boundary)};
          auto hit = v.arc_other.find(head);
          if (hit == v.arc_other.end())
            throw InvalidMatching("juncture not covered by the matching");
          j = hit->second.second;
        } while (!(j == start));
        pieces.push_back(std::move(piece));
      }
    }
  }
  return pieces;
}

long euler_neg(const NormalFormSurface& s) {
  long twice = 0;
  for (const auto& p : s.pieces()) twice += p.valence() - 2 * p.chi();
  if (twice % 2 != 0) throw InternalCheckFailed("euler_neg: odd segment total");
  return twice / 2;
}

long euler_neg_ribbon(const NormalFormSurface& s) {
  long V = 0;
  for (int b = 0; b < int(s.boundaries().size()); ++b) V += s.juncture_count(b);
  long E = V /* segments, one per juncture */ + long(s.matching().size());
  long chi_sum = 0;
  for (const auto& p : s.pieces()) chi_sum += p.chi();
  return -(V - E + chi_sum);
}

std::map<JunctureId, Rat> pull_lambda(const NormalFormSurface& s,
                                      const actions::StackingCertificate& cert) {
  if (!(cert.word == s.word())) throw WordMismatch("certificate word differs from surface word");
  std::map<JunctureId, Rat> out;
  int L = s.word().size();
  for (int b = 0; b < int(s.boundaries().size()); ++b) {
    for (int pos = 0; pos < s.juncture_count(b); ++pos) {
      JunctureId j{b, pos};
      int ph = s.phase(j);
      out[j] = cert.lambda.at(ph == 0 ? L : ph);
    }
  }
  return out;
}

std::variant<ArcOrientations, CompressibilityWitness> orient_arcs(
    const NormalFormSurface& s, const std::map<JunctureId, Rat>& lambda_hat) {
  ArcOrientations ori;
  ori.points_to.reserve(s.matching().size());
  for (int i = 0; i < int(s.matching().size()); ++i) {
    const auto& [j1, j2] = s.matching()[size_t(i)];
    const Rat& v1 = lambda_hat.at(j1);
    const Rat& v2 = lambda_hat.at(j2);
    if (v1 == v2) return CompressibilityWitness{i, j1, j2};
    ori.points_to.push_back(v1 > v2 ? j2 : j1);
  }
  return ori;
}

SegmentFlags segment_consistency(const NormalFormSurface& s, const ArcOrientations& ori) {
  SegmentFlags flags;
  for (int b = 0; b < int(s.boundaries().size()); ++b) {
    int size = s.juncture_count(b);
    for (int pos = 0; pos < size; ++pos) {
      SegmentRef seg{b, pos};
      JunctureId j1{b, pos};
      JunctureId j2{b, (pos + 1) % size};
      bool t1 = ori.towards(s.arc_at(j1), j1);
      bool t2 = ori.towards(s.arc_at(j2), j2);
      bool cons = (t1 == t2);
      flags.consistent[seg] = cons;
      (cons ? flags.consistent_total : flags.inconsistent_total)++;
    }
  }
  return flags;
}

int sign_changes(const Piece& p, const ArcOrientations& ori) {
  // sign_i = +1 iff the lambda-orientation of the arc crossed into segment i
  // agrees with the traversal (arc points towards the segment's tail).
  int k = p.valence();
  std::vector<int> signs(size_t(k), 0);
  for (int i = 0; i < k; ++i) {
    const auto& [arc, seg] = p.cycle[size_t(i)];
    JunctureId tail{seg.boundary, seg.position};
    signs[size_t(i)] = ori.towards(arc, tail) ? 1 : -1;
  }
  int sc = 0;
  for (int i = 0; i < k; ++i)
    if (signs[size_t(i)] != signs[size_t((i + k - 1) % k)]) sc++;
  return sc;
}

AuditReport audit(const NormalFormSurface& s, const actions::StackingCertificate& cert) {
  AuditReport rep;
  rep.degree = s.degree();
  rep.euler_neg = euler_neg(s);
  auto lhat = pull_lambda(s, cert);
  auto oriented = orient_arcs(s, lhat);
  if (std::holds_alternative<CompressibilityWitness>(oriented)) {
    rep.verdict = AuditReport::Verdict::NotApplicable;
    rep.witness = std::get<CompressibilityWitness>(oriented);
    for (const auto& p : s.pieces())
      rep.pieces.push_back(PieceRow{p.side, p.valence(), p.disk, p.winding, -1});
    return rep;
  }
  const auto& ori = std::get<ArcOrientations>(oriented);
  SegmentFlags flags = segment_consistency(s, ori);
  rep.consistent_total = flags.consistent_total;
  rep.inconsistent_total = flags.inconsistent_total;

  auto complain = [&rep](const std::string& msg) { rep.check_violations.push_back(msg); };
  for (const auto& p : s.pieces()) {
    int sc = sign_changes(p, ori);
    rep.pieces.push_back(PieceRow{p.side, p.valence(), p.disk, p.winding, sc});
    int cons_in_piece = 0;
    for (const auto& [arc, seg] : p.cycle)
      if (flags.consistent.at(seg)) cons_in_piece++;
    if (sc != cons_in_piece) complain("sign changes differ from consistent segment count");
    if (sc % 2 != 0) complain("odd sign-change count");
    if (p.disk && sc == 0) complain("disk piece with no sign change");
    if (sc < 2 * p.chi()) complain("sign-change count below 2*chi");
  }
  int L = s.word().size();
  if (rep.inconsistent_total < 2 * rep.degree)
    complain("fewer than 2*deg inconsistent segments");
  if (rep.consistent_total > (L - 2) * rep.degree)
    complain("more than (|w|-2)*deg consistent segments");

  rep.verdict = (rep.euler_neg >= rep.degree) ? AuditReport::Verdict::Holds
                                              : AuditReport::Verdict::Violated;
  return rep;
}

EquationShadow surface_from_equation(const FactorElement& a, const AlternatingWord& w,
                                     const std::vector<words::Word>& conjugators,
                                     const std::vector<int>& exponents) {
  if (conjugators.size() != exponents.size() || exponents.empty())
    throw InputError("surface_from_equation: need k >= 1 conjugator/exponent pairs");
  EquationShadow shadow{a, w, conjugators, exponents, 0, 0};
  for (int n : exponents) {
    if (n == 0) throw InputError("surface_from_equation: zero exponent");
    shadow.degree += n < 0 ? -n : n;
  }
  shadow.euler_neg_target = long(exponents.size()) - 1;
  return shadow;
}

NormalFormSurface equation_sphere_fixture(const AlternatingWord& w, int k) {
  if (w.size() != 2) throw InputError("sphere fixture is built for length-2 words");
  if (k < 2 || k % 2 != 0) throw InputError("sphere fixture needs even k >= 2");
  std::vector<WBoundary> bs;
  for (int i = 0; i < k; ++i) bs.push_back(WBoundary{i % 2 == 0 ? 1 : -1});
  std::vector<Arc> arcs;
  for (int i = 0; i < k; ++i) {
    int next = (i + 1) % k;
    int pos = (i % 2 == 0) ? 1 : 0;  // odd arcs pair phase 1, even arcs phase 0
    arcs.push_back({JunctureId{i, pos}, JunctureId{next, pos}});
  }
  // One annulus carries the target-element boundary; the other piece is the
  // disk, giving -chi = k - 1.
  return NormalFormSurface(w, bs, arcs, {0});
}

}  // namespace stacklab::surf
