#include <doctest.h>

#include <random>

#include "stacklab/magnus.hpp"

using namespace stacklab;
using words::Factor;
using words::FactorElement;
using words::Syllable;

namespace {
FactorElement el(std::initializer_list<Syllable> sylls) {
  return FactorElement(Factor::A, std::vector<Syllable>(sylls));
}
}  // namespace

TEST_CASE("magnus expansions of generators") {
  auto s = magnus::series_of(el({{1, 1}}), 3);
  CHECK(s.terms().at({}) == 1);
  CHECK(s.terms().at({1}) == 1);
  auto si = magnus::series_of(el({{1, -1}}), 3);
  CHECK(si.terms().at({1}) == -1);
  CHECK(si.terms().at({1, 1}) == 1);
  // x * x^-1 expands to 1
  auto prod = magnus::series_of(el({{1, 1}}), 3) * magnus::series_of(el({{1, -1}}), 3);
  CHECK(prod.terms().size() == 1);
}

TEST_CASE("magnus order is total and strict on small elements") {
  std::vector<FactorElement> els = {
      el({{1, 1}}),          el({{1, -1}}),         el({{2, 1}}),
      el({{1, 2}}),          el({{1, 1}, {2, 1}}),  el({{2, 1}, {1, 1}}),
      el({{1, 1}, {2, -1}}), el({{2, -1}, {1, 1}}), el({{1, -1}, {2, 1}, {1, 1}}),
  };
  for (size_t i = 0; i < els.size(); ++i) {
    for (size_t j = 0; j < els.size(); ++j) {
      auto c = magnus::compare(els[i], els[j]);
      if (i == j)
        CHECK(c == std::strong_ordering::equal);
      else
        CHECK(c != std::strong_ordering::equal);
      // antisymmetry
      auto cr = magnus::compare(els[j], els[i]);
      if (c == std::strong_ordering::less) CHECK(cr == std::strong_ordering::greater);
    }
  }
  // xy vs yx differ only at degree 2
  CHECK(magnus::compare(el({{1, 1}, {2, 1}}), el({{2, 1}, {1, 1}})) !=
        std::strong_ordering::equal);
}

TEST_CASE("magnus order is right-invariant on random samples") {
  std::mt19937_64 rng(31337);
  auto random_el = [&rng]() {
    std::vector<Syllable> s;
    int k = 1 + int(rng() % 3);
    for (int i = 0; i < k; ++i) s.push_back({1 + int(rng() % 2), long(rng() % 2) ? 1 : -1});
    return FactorElement(Factor::A, std::move(s));
  };
  for (int i = 0; i < 200; ++i) {
    FactorElement u = random_el(), v = random_el(), z = random_el();
    auto c = magnus::compare(u, v);
    auto cz = magnus::compare(u * z, v * z);
    CHECK(c == cz);
  }
}
