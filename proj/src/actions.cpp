#include "stacklab/actions.hpp"

#include <algorithm>
#include <sstream>

namespace stacklab::actions {

namespace {
const pl::PLHomeo kIdentity;
}

const pl::PLHomeo& FactorAction::gen(int g) const {
  auto it = gens.find(g);
  return it == gens.end() ? kIdentity : it->second;
}

std::optional<pl::Interval> FactorAction::support_hull() const {
  std::optional<pl::Interval> hull;
  for (const auto& [g, h] : gens) {
    auto s = h.support();
    if (!s) continue;
    if (!hull)
      hull = s;
    else
      hull = pl::Interval(rat_min(hull->lo, s->lo), rat_max(hull->hi, s->hi));
  }
  return hull;
}

std::optional<pl::Interval> ProductAction::support_hull() const {
  auto ha = a.support_hull(), hb = b.support_hull();
  if (!ha) return hb;
  if (!hb) return ha;
  return pl::Interval(rat_min(ha->lo, hb->lo), rat_max(ha->hi, hb->hi));
}

pl::PLHomeo eval_factor(const FactorAction& act, const FactorElement& e) {
  if (!e.is_identity() && e.factor() != act.factor)
    throw FactorMismatch("eval_factor: element belongs to the other factor");
  pl::PLHomeo out;
  for (const auto& [g, sign] : e.spell()) {
    const pl::PLHomeo& m = act.gen(g);
    out = pl::compose(out, sign > 0 ? m : m.inverse());
  }
  return out;
}

Rat apply_factor(const FactorAction& act, const FactorElement& e, Rat x) {
  if (!e.is_identity() && e.factor() != act.factor)
    throw FactorMismatch("apply_factor: element belongs to the other factor");
  for (const auto& [g, sign] : e.spell()) {
    const pl::PLHomeo& m = act.gen(g);
    x = sign > 0 ? m(x) : m.inverse_at(x);
  }
  return x;
}

pl::PLHomeo eval_word(const ProductAction& act, const Word& w) {
  pl::PLHomeo out;
  for (const auto& l : w.letters) out = pl::compose(out, eval_factor(act.of(l.factor()), l));
  return out;
}

pl::PLHomeo eval_word(const ProductAction& act, const AlternatingWord& w) {
  return eval_word(act, w.as_word());
}

Rat apply_word(const ProductAction& act, const Word& w, Rat x) {
  for (const auto& l : w.letters) x = apply_factor(act.of(l.factor()), l, std::move(x));
  return x;
}

Trajectory trajectory(const ProductAction& act, const AlternatingWord& w, const Rat& x) {
  if (!w.cyclically_reduced())
    throw NotCyclicallyReduced("trajectory: word not cyclically reduced");
  Trajectory t;
  t.base = x;
  Rat cur = x;
  t.points.reserve(size_t(w.size()));
  for (int i = 1; i <= w.size(); ++i) {
    const auto& l = w.letter(i);
    cur = apply_factor(act.of(l.factor()), l, std::move(cur));
    t.points.push_back(cur);
  }
  return t;
}

std::string StabilityVerdict::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Stable:
      os << "stable";
      break;
    case Kind::Duplicate:
      os << "duplicate(" << p1 << "," << p2 << ")";
      break;
    case Kind::NotClosed:
      os << "not_closed(" << rat_to_string(final_point) << ")";
      break;
  }
  return os.str();
}

StabilityVerdict check_stability(const ProductAction& act, const AlternatingWord& w, const Rat& x) {
  Trajectory t = trajectory(act, w, x);
  StabilityVerdict v;
  v.final_point = t.points.back();
  if (t.points.back() != x) {
    v.kind = StabilityVerdict::Kind::NotClosed;
    return v;
  }
  int n = int(t.points.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (t.points[size_t(i)] == t.points[size_t(j)]) {
        v.kind = StabilityVerdict::Kind::Duplicate;
        v.p1 = i + 1;
        v.p2 = j + 1;
        return v;
      }
    }
  }
  v.kind = StabilityVerdict::Kind::Stable;
  return v;
}

ProductAction generated_diagonal(const std::vector<ProductAction>& acts) {
  // Hulls must be pairwise interior-disjoint.
  std::vector<std::pair<pl::Interval, size_t>> hulls;
  for (size_t i = 0; i < acts.size(); ++i)
    if (auto h = acts[i].support_hull()) hulls.emplace_back(*h, i);
  std::sort(hulls.begin(), hulls.end(),
            [](const auto& a, const auto& b) { return a.first.lo < b.first.lo; });
  for (size_t i = 1; i < hulls.size(); ++i)
    if (hulls[i].first.lo < hulls[i - 1].first.hi)
      throw OverlappingSupports("generated_diagonal: action hulls overlap");
  ProductAction out;
  for (Factor f : {Factor::A, Factor::B}) {
    std::map<int, std::vector<pl::PLHomeo>> per_gen;
    for (const auto& act : acts)
      for (const auto& [g, h] : act.of(f).gens)
        if (!h.is_identity()) per_gen[g].push_back(h);
    for (auto& [g, hs] : per_gen) out.of(f).gens[g] = pl::diagonal_product(hs);
  }
  return out;
}

StackingCertificate make_certificate(const AlternatingWord& w, const ProductAction& act,
                                     const Rat& base) {
  StackingCertificate cert{w, act, base, {}};
  Trajectory t = trajectory(act, w, base);
  for (int i = 1; i <= w.size(); ++i) cert.lambda[i] = t.points[size_t(i) - 1];
  return cert;
}

CertificateVerdict verify_certificate(const StackingCertificate& cert) {
  CertificateVerdict out;
  out.stability = check_stability(cert.action, cert.word, cert.base);
  Trajectory t = trajectory(cert.action, cert.word, cert.base);
  for (int i = 1; i <= cert.word.size(); ++i) {
    auto it = cert.lambda.find(i);
    if (it == cert.lambda.end() || it->second != t.points[size_t(i) - 1]) {
      out.lambda_matches = false;
      out.first_mismatch = i;
      break;
    }
  }
  if (int(cert.lambda.size()) != cert.word.size()) out.lambda_matches = false;
  return out;
}

}  // namespace stacklab::actions
