#include "stacklab/plline.hpp"

#include <algorithm>
#include <sstream>

namespace stacklab::pl {

std::string Interval::str() const {
  std::ostringstream os;
  os << (lo_open ? '(' : '[') << rat_to_string(lo) << ", " << rat_to_string(hi)
     << (hi_open ? ')' : ']');
  return os.str();
}

namespace {

bool on_diagonal(const std::pair<Rat, Rat>& p) { return p.first == p.second; }

bool collinear(const std::pair<Rat, Rat>& a, const std::pair<Rat, Rat>& b,
               const std::pair<Rat, Rat>& c) {
  return (b.second - a.second) * (c.first - b.first) == (c.second - b.second) * (b.first - a.first);
}

std::vector<std::pair<Rat, Rat>> canonicalize(std::vector<std::pair<Rat, Rat>> bp) {
  // Drop exact duplicates (tolerated from concatenations), then validate.
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  for (size_t i = 1; i < bp.size(); ++i) {
    if (bp[i - 1].first >= bp[i].first || bp[i - 1].second >= bp[i].second)
      throw MonotonicityViolation("breakpoints not strictly increasing");
  }
  // Prune collinear interior points.
  std::vector<std::pair<Rat, Rat>> out;
  for (auto& p : bp) {
    while (out.size() >= 2 && collinear(out[out.size() - 2], out.back(), p)) out.pop_back();
    out.push_back(std::move(p));
  }
  // Drop redundant diagonal runs at both ends.
  while (out.size() >= 2 && on_diagonal(out[0]) && on_diagonal(out[1])) out.erase(out.begin());
  while (out.size() >= 2 && on_diagonal(out[out.size() - 1]) && on_diagonal(out[out.size() - 2]))
    out.pop_back();
  if (out.size() == 1) {
    if (!on_diagonal(out[0])) throw MonotonicityViolation("single off-diagonal breakpoint");
    out.clear();
  }
  if (!out.empty()) {
    if (!on_diagonal(out.front()) || !on_diagonal(out.back()))
      throw MonotonicityViolation("breakpoint hull endpoints must be fixed points");
  }
  return out;
}

Rat interp(const std::pair<Rat, Rat>& a, const std::pair<Rat, Rat>& b, const Rat& x) {
  return a.second + (b.second - a.second) * (x - a.first) / (b.first - a.first);
}

}  // namespace

PLHomeo PLHomeo::from_breakpoints(std::vector<std::pair<Rat, Rat>> bps) {
  PLHomeo h;
  h.bp_ = canonicalize(std::move(bps));
  return h;
}

Rat PLHomeo::operator()(const Rat& x) const {
  if (bp_.empty() || x <= bp_.front().first || x >= bp_.back().first) return x;
  auto it = std::upper_bound(bp_.begin(), bp_.end(), x,
                             [](const Rat& v, const std::pair<Rat, Rat>& p) { return v < p.first; });
  return interp(*(it - 1), *it, x);
}

Rat PLHomeo::inverse_at(const Rat& y) const {
  if (bp_.empty() || y <= bp_.front().second || y >= bp_.back().second) return y;
  auto it = std::upper_bound(bp_.begin(), bp_.end(), y,
                             [](const Rat& v, const std::pair<Rat, Rat>& p) { return v < p.second; });
  const auto& a = *(it - 1);
  const auto& b = *it;
  return a.first + (b.first - a.first) * (y - a.second) / (b.second - a.second);
}

PLHomeo PLHomeo::inverse() const {
  std::vector<std::pair<Rat, Rat>> inv;
  inv.reserve(bp_.size());
  for (const auto& p : bp_) inv.emplace_back(p.second, p.first);
  return from_breakpoints(std::move(inv));
}

std::optional<Interval> PLHomeo::support() const {
  if (bp_.empty()) return std::nullopt;
  return Interval(bp_.front().first, bp_.back().first);
}

std::string PLHomeo::str() const {
  if (bp_.empty()) return "id";
  std::ostringstream os;
  for (size_t i = 0; i < bp_.size(); ++i) {
    if (i) os << ' ';
    os << '(' << rat_to_string(bp_[i].first) << ',' << rat_to_string(bp_[i].second) << ')';
  }
  return os.str();
}

PLHomeo compose(const PLHomeo& g, const PLHomeo& h) {
  if (g.is_identity()) return h;
  if (h.is_identity()) return g;
  std::vector<Rat> xs;
  xs.reserve(g.bp_.size() + h.bp_.size());
  for (const auto& p : g.bp_) xs.push_back(p.first);
  for (const auto& p : h.bp_) xs.push_back(g.inverse_at(p.first));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<std::pair<Rat, Rat>> bp;
  bp.reserve(xs.size());
  for (const auto& x : xs) bp.emplace_back(x, h(g(x)));
  return PLHomeo::from_breakpoints(std::move(bp));
}

PLHomeo make_mover(const Interval& support, const std::vector<std::pair<Rat, Rat>>& pairs) {
  if (support.degenerate()) throw InputError("make_mover needs a nondegenerate support");
  std::vector<std::pair<Rat, Rat>> bp;
  bp.emplace_back(support.lo, support.lo);
  Rat px = support.lo, py = support.lo;
  for (const auto& [p, q] : pairs) {
    if (p <= px || q <= py)
      throw MonotonicityViolation("mover pairs not jointly increasing inside support");
    px = p;
    py = q;
    bp.emplace_back(p, q);
  }
  if (px >= support.hi || py >= support.hi)
    throw MonotonicityViolation("mover pairs leave the open support");
  bp.emplace_back(support.hi, support.hi);
  return PLHomeo::from_breakpoints(std::move(bp));
}

PLHomeo affine_conjugate(const PLHomeo& h, const Interval& from, const Interval& to) {
  if (from.degenerate() || to.degenerate())
    throw InputError("affine_conjugate needs nondegenerate intervals");
  if (auto s = h.support()) {
    if (s->lo < from.lo || s->hi > from.hi)
      throw PreconditionError("affine_conjugate: map not supported in `from`");
  }
  if (h.is_identity()) return h;
  Rat scale = to.length() / from.length();
  auto phi = [&](const Rat& x) { return to.lo + (x - from.lo) * scale; };
  std::vector<std::pair<Rat, Rat>> bp;
  bp.reserve(h.breakpoints().size());
  for (const auto& p : h.breakpoints()) bp.emplace_back(phi(p.first), phi(p.second));
  return PLHomeo::from_breakpoints(std::move(bp));
}

PLHomeo pl_conjugate(const PLHomeo& h, const PLHomeo& phi, const Interval& window) {
  if (auto s = h.support()) {
    if (s->lo < window.lo || s->hi > window.hi)
      throw PreconditionError("pl_conjugate: map not supported in window");
  }
  if (h.is_identity()) return h;
  // Candidate domain points of phi.h.phi^{-1}: images of h's breakpoints, of
  // phi's breakpoints in the window, and of h^{-1}-pullbacks of the latter.
  std::vector<Rat> xs;
  xs.push_back(window.lo);
  xs.push_back(window.hi);
  for (const auto& p : h.breakpoints()) {
    xs.push_back(p.first);
    xs.push_back(h.inverse_at(p.first));
  }
  for (const auto& p : phi.breakpoints()) {
    if (p.first < window.lo || p.first > window.hi) continue;
    xs.push_back(p.first);
    xs.push_back(h.inverse_at(p.first));
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<std::pair<Rat, Rat>> bp;
  bp.reserve(xs.size());
  for (const auto& x : xs) {
    if (x < window.lo || x > window.hi) continue;
    bp.emplace_back(phi(x), phi(h(x)));
  }
  return PLHomeo::from_breakpoints(std::move(bp));
}

PLHomeo diagonal_product(const std::vector<PLHomeo>& hs) {
  std::vector<const PLHomeo*> parts;
  for (const auto& h : hs)
    if (!h.is_identity()) parts.push_back(&h);
  if (parts.empty()) return identity();
  if (parts.size() == 1) return *parts[0];
  std::sort(parts.begin(), parts.end(), [](const PLHomeo* a, const PLHomeo* b) {
    return a->breakpoints().front().first < b->breakpoints().front().first;
  });
  std::vector<std::pair<Rat, Rat>> bp;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0 && parts[i]->breakpoints().front().first < parts[i - 1]->breakpoints().back().first)
      throw OverlappingSupports("diagonal_product: supports overlap");
    for (const auto& p : parts[i]->breakpoints()) {
      if (!bp.empty() && bp.back() == p) continue;  // shared hull endpoint
      bp.push_back(p);
    }
  }
  return PLHomeo::from_breakpoints(std::move(bp));
}

std::vector<Interval> fixed_sets(const PLHomeo& h, const Interval& window) {
  std::vector<Interval> out;
  auto push = [&out](Rat lo, Rat hi) {
    if (!out.empty() && lo <= out.back().hi) {
      if (hi > out.back().hi) out.back() = Interval(out.back().lo, hi);
      return;
    }
    out.emplace_back(std::move(lo), std::move(hi));
  };
  if (h.is_identity()) return {window};
  // Partition the window by h's breakpoints and scan each linear piece.
  std::vector<Rat> cuts{window.lo};
  for (const auto& p : h.breakpoints())
    if (p.first > window.lo && p.first < window.hi) cuts.push_back(p.first);
  cuts.push_back(window.hi);
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Rat& x0 = cuts[i];
    const Rat& x1 = cuts[i + 1];
    if (x0 == x1) {
      if (h(x0) == x0) push(x0, x1);
      continue;
    }
    Rat y0 = h(x0), y1 = h(x1);
    Rat dx = x1 - x0;
    Rat dy = y1 - y0;
    if (dy == dx) {
      if (y0 == x0) push(x0, x1);  // identity piece
      continue;
    }
    // Solve y0 + (dy/dx)(x - x0) = x exactly.
    Rat xf = (x0 * dy - y0 * dx) / (dy - dx);
    if (xf >= x0 && xf <= x1) push(xf, xf);
  }
  return out;
}

Rat PLSegment::eval(const Rat& x) const {
  if (x < lo() || x > hi()) throw InputError("PLSegment::eval outside domain");
  auto it = std::upper_bound(pts.begin(), pts.end(), x,
                             [](const Rat& v, const std::pair<Rat, Rat>& p) { return v < p.first; });
  if (it == pts.begin()) return pts.front().second;
  if (it == pts.end()) return pts.back().second;
  return interp(*(it - 1), *it, x);
}

PLSegment PLSegment::inverted() const {
  PLSegment s;
  s.pts.reserve(pts.size());
  for (const auto& p : pts) s.pts.emplace_back(p.second, p.first);
  return s;
}

PLSegment restrict(const PLHomeo& h, const Interval& window) {
  if (window.degenerate()) throw InputError("restrict needs a nondegenerate window");
  PLSegment s;
  s.pts.emplace_back(window.lo, h(window.lo));
  for (const auto& p : h.breakpoints())
    if (p.first > window.lo && p.first < window.hi) s.pts.push_back(p);
  s.pts.emplace_back(window.hi, h(window.hi));
  return s;
}

PLHomeo rigidify_at(const PLHomeo& h, const Rat& center, const std::vector<Rat>& preserve,
                    const Rat& half_cap) {
  if (h.is_identity()) return h;
  Rat d = h(center);
  // Bracket strictly between the neighboring breakpoints and preserved points.
  Rat lo = center - 1, hi = center + 1;
  if (auto s = h.support()) {
    lo = rat_min(lo, s->lo - 1);
    hi = rat_max(hi, s->hi + 1);
  }
  for (const auto& bp : h.breakpoints()) {
    if (bp.first < center) lo = rat_max(lo, bp.first);
    if (bp.first > center) hi = rat_min(hi, bp.first);
  }
  for (const auto& p : preserve) {
    if (p < center) lo = rat_max(lo, p);
    if (p > center) hi = rat_min(hi, p);
  }
  Rat a = (lo + center) / 2;
  Rat b = (center + hi) / 2;
  Rat ya = h(a), yb = h(b);
  // Already rigid on [a, b]: nothing to do.
  if (yb - ya == b - a && d - ya == center - a) return h;
  Rat el = rat_min(rat_min(half_cap, (center - a) / 2), (d - ya) / 2);
  Rat er = rat_min(rat_min(half_cap, (b - center) / 2), (yb - d) / 2);
  PLSegment piece;
  piece.pts = {{a, ya}, {center - el, d - el}, {center + er, d + er}, {b, yb}};
  return splice(h, piece);
}

PLHomeo splice(const PLHomeo& h, const PLSegment& piece) {
  if (piece.pts.size() < 2) throw InputError("splice needs a nondegenerate piece");
  const Rat& a = piece.lo();
  const Rat& b = piece.hi();
  if (h(a) != piece.pts.front().second || h(b) != piece.pts.back().second)
    throw PreconditionError("splice: piece endpoints do not match the host map");
  std::vector<std::pair<Rat, Rat>> bp;
  // Keep the host graph outside [a, b]; make sure the hull still brackets.
  Rat hull_lo = a - 1, hull_hi = b + 1;
  if (auto s = h.support()) {
    hull_lo = rat_min(hull_lo, s->lo);
    hull_hi = rat_max(hull_hi, s->hi);
  }
  bp.emplace_back(hull_lo, h(hull_lo));
  for (const auto& p : h.breakpoints())
    if (p.first > hull_lo && p.first < a) bp.push_back(p);
  for (const auto& p : piece.pts) {
    if (!bp.empty() && bp.back() == p) continue;
    bp.push_back(p);
  }
  for (const auto& p : h.breakpoints())
    if (p.first > b && p.first < hull_hi) bp.push_back(p);
  bp.emplace_back(hull_hi, h(hull_hi));
  return PLHomeo::from_breakpoints(std::move(bp));
}

}  // namespace stacklab::pl
