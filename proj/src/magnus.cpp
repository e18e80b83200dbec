#include "stacklab/magnus.hpp"

#include <algorithm>

namespace stacklab::magnus {

Series Series::one(int truncation) {
  Series s(truncation);
  s.terms_[{}] = 1;
  return s;
}

Series Series::generator(int gen, int sign, int truncation) {
  Series s(truncation);
  if (sign > 0) {
    s.terms_[{}] = 1;
    if (truncation >= 1) s.terms_[{gen}] = 1;
  } else {
    // (1 + X)^{-1} = 1 - X + X^2 - ...
    Int c = 1;
    std::vector<int> mono;
    for (int d = 0; d <= truncation; ++d) {
      s.terms_[mono] = c;
      c = -c;
      mono.push_back(gen);
    }
  }
  return s;
}

Series Series::operator*(const Series& rhs) const {
  Series out(trunc_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : rhs.terms_) {
      if (int(ma.size() + mb.size()) > trunc_) continue;
      std::vector<int> m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      Int& slot = out.terms_[m];
      slot += ca * cb;
      if (slot == 0) out.terms_.erase(m);
    }
  }
  return out;
}

Series series_of(const words::FactorElement& e, int truncation) {
  Series s = Series::one(truncation);
  for (const auto& [g, sign] : e.spell()) s = s * Series::generator(g, sign, truncation);
  return s;
}

std::strong_ordering compare(const words::FactorElement& u, const words::FactorElement& v) {
  if (u == v) return std::strong_ordering::equal;
  long long cap = u.gen_length() + v.gen_length() + 2;
  for (long long trunc = 2; trunc <= cap; trunc += 2) {
    Series su = series_of(u, int(trunc));
    Series sv = series_of(v, int(trunc));
    auto iu = su.terms().begin(), eu = su.terms().end();
    auto iv = sv.terms().begin(), ev = sv.terms().end();
    GradedLex lt;
    while (iu != eu || iv != ev) {
      if (iu == eu) return 0 < iv->second ? std::strong_ordering::less
                                          : std::strong_ordering::greater;
      if (iv == ev) return iu->second < 0 ? std::strong_ordering::less
                                          : std::strong_ordering::greater;
      if (lt(iu->first, iv->first))
        return iu->second < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
      if (lt(iv->first, iu->first))
        return 0 < iv->second ? std::strong_ordering::less : std::strong_ordering::greater;
      if (iu->second != iv->second)
        return iu->second < iv->second ? std::strong_ordering::less
                                       : std::strong_ordering::greater;
      ++iu;
      ++iv;
    }
  }
  throw InternalCheckFailed("magnus: expansions failed to separate distinct elements");
}

}  // namespace stacklab::magnus
