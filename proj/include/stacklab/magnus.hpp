#pragma once

#include <compare>
#include <map>
#include <vector>

#include "stacklab/rat.hpp"
#include "stacklab/words.hpp"

namespace stacklab::magnus {

// Truncated integer power series in noncommuting variables X_1..X_r, the
// image of a free group under g_i -> 1 + X_i. Monomials are generator index
// sequences; comparison is graded-lexicographic.
struct GradedLex {
  bool operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

class Series {
 public:
  explicit Series(int truncation) : trunc_(truncation) {}
  static Series one(int truncation);
  static Series generator(int gen, int sign, int truncation);  // (1 + X)^{±1}

  Series operator*(const Series& rhs) const;
  const std::map<std::vector<int>, Int, GradedLex>& terms() const { return terms_; }
  int truncation() const { return trunc_; }

 private:
  int trunc_;
  std::map<std::vector<int>, Int, GradedLex> terms_;
};

Series series_of(const words::FactorElement& e, int truncation);

// Total bi-invariant order on each free factor: compares truncated expansions
// by the first differing coefficient in graded-lex monomial order. Increases
// the truncation until the expansions separate (they must, by residual
// nilpotence of free groups).
std::strong_ordering compare(const words::FactorElement& u, const words::FactorElement& v);

inline bool less(const words::FactorElement& u, const words::FactorElement& v) {
  return compare(u, v) == std::strong_ordering::less;
}

}  // namespace stacklab::magnus
