#include <set>
#include <doctest.h>

#include "stacklab/stacker.hpp"

using namespace stacklab;
using namespace stacklab::stacker;
using actions::apply_word;
using actions::check_stability;
using words::AlternatingWord;
using words::Factor;
using words::FactorElement;
using words::Word;

namespace {

FactorElement A(int gen, long long exp = 1) { return FactorElement::generator(Factor::A, gen, exp); }
FactorElement B(int gen, long long exp = 1) { return FactorElement::generator(Factor::B, gen, exp); }

AlternatingWord word_ab() { return AlternatingWord({A(1), B(1)}); }
AlternatingWord word_abab2() { return AlternatingWord({A(1), B(1), A(2), B(2)}); }
AlternatingWord word_abab_inv() { return AlternatingWord({A(1), B(1), A(1), B(1, -1)}); }

std::vector<BlockTag> tags(std::initializer_list<std::pair<Factor, const char*>> ts) {
  std::vector<BlockTag> out;
  for (auto [f, n] : ts) out.push_back({f, n});
  return out;
}

}  // namespace

TEST_CASE("build_catenation") {
  auto cat = build_catenation(
      tags({{Factor::A, "I1"}, {Factor::B, "J1"}, {Factor::A, "I2"}, {Factor::B, "J2"}}), 0);
  CHECK(cat.block(0) == pl::Interval(Rat(0), Rat(2), true, true));
  CHECK(cat.block(1) == pl::Interval(Rat(1), Rat(3), true, true));
  CHECK(cat.block(2) == pl::Interval(Rat(2), Rat(4), true, true));
  CHECK(cat.block(3) == pl::Interval(Rat(3), Rat(5), true, true));

  // The five-block layout of the simplest arrangement.
  auto ex = build_catenation(tags({{Factor::A, "I1"},
                                   {Factor::B, "J1"},
                                   {Factor::A, "K"},
                                   {Factor::B, "J1'"},
                                   {Factor::A, "I1'"}}),
                             0);
  CHECK(ex.block(2) == pl::Interval(Rat(2), Rat(4), true, true));
  CHECK(ex.block(4) == pl::Interval(Rat(4), Rat(6), true, true));

  CHECK(build_catenation(tags({{Factor::A, "I"}}), 0).block(0) ==
        pl::Interval(Rat(0), Rat(2), true, true));
  CHECK_THROWS_AS(build_catenation(tags({{Factor::A, "I"}, {Factor::A, "I2"}}), 0), BadPattern);
  CHECK_THROWS_AS(build_catenation({}, 0), BadPattern);
}

TEST_CASE("rightward_transport: hops, gaps, carried interval") {
  auto cat = build_catenation(tags({{Factor::A, "I1"}, {Factor::B, "J1"}}), 0);
  StackerConfig cfg;
  pl::Interval gap(Rat(5, 2), Rat(3), true, true);
  Transport t = rightward_transport({A(1), B(1)}, cat, Rat(1), gap, cfg);
  actions::ProductAction act{t.act_a, t.act_b};

  // First leg climbs past 3/2 into the first overlap, second past 5/2.
  Rat q1 = t.act_a.gen(1)(Rat(1));
  CHECK(q1 > Rat(3, 2));
  CHECK(q1 < Rat(2));
  Rat q2 = t.act_b.gen(1)(q1);
  CHECK(q2 > Rat(5, 2));
  CHECK(gap.contains(q2));
  CHECK(q2 == t.endpoint);

  // The carried interval travels rigidly.
  Rat d = t.delta;
  CHECK(apply_word(act, word_ab().as_word(), Rat(1) - d) == t.endpoint - d);
  CHECK(apply_word(act, word_ab().as_word(), Rat(1) + d) == t.endpoint + d);

  // Empty segment: nothing moves.
  Transport e = rightward_transport({}, cat, Rat(1), gap, cfg);
  CHECK(e.endpoint == Rat(1));

  CHECK_THROWS_AS(
      rightward_transport({A(1), B(1), A(1)}, cat, Rat(1), gap, cfg), CapacityExceeded);
}

TEST_CASE("leftward_transport mirrors rightward") {
  auto cat = build_catenation(tags({{Factor::B, "J1'"}, {Factor::A, "I1'"}}), 0);
  StackerConfig cfg;
  pl::Interval gap(Rat(1, 2), Rat(1), true, true);
  Transport t = leftward_transport({A(1), B(1)}, cat, Rat(2), gap, cfg);
  Rat q1 = t.act_a.gen(1)(Rat(2));
  CHECK(q1 < Rat(3, 2));  // strictly down into the overlap
  CHECK(q1 > Rat(1));
  Rat q2 = t.act_b.gen(1)(q1);
  CHECK(gap.contains(q2));
  CHECK(q2 == t.endpoint);
  CHECK(t.endpoint < Rat(2));
}

TEST_CASE("the simplest arrangement reproduces the model inequalities") {
  // Catenation I1 J1 K J1' I1' on [0,6]; eta = <sigma, tau> built from two
  // transports and a middle escape bump; K1 = [5/2, 7/2] is mapped into
  // itself by ab and completely off itself by a.
  StackerConfig cfg;
  auto right_cat = build_catenation(tags({{Factor::A, "I1"}, {Factor::B, "J1"}}), 0);
  Transport right =
      rightward_transport({A(1), B(1)}, right_cat, Rat(1),
                          pl::Interval(Rat(5, 2), Rat(3), true, true), cfg);
  auto left_cat = build_catenation(tags({{Factor::B, "J1'"}, {Factor::A, "I1'"}}), 3);
  Transport left = leftward_transport({A(1), B(1)}, left_cat, Rat(5),
                                      pl::Interval(Rat(3), Rat(7, 2), true, true), cfg);
  pl::PLHomeo escape =
      pl::make_mover(pl::Interval(Rat(2), Rat(4), true, true), {{Rat(5, 2), Rat(15, 4)}});

  actions::ProductAction eta;
  eta.a.gens[1] = pl::diagonal_product({right.act_a.gen(1), escape, left.act_a.gen(1)});
  eta.b.gens[1] = pl::diagonal_product({right.act_b.gen(1), left.act_b.gen(1)});

  // 1 . sigma(a) > 3/2, then past 5/2; 5 . sigma(a) < 9/2, then below 7/2.
  CHECK(eta.a.gens[1](Rat(1)) > Rat(3, 2));
  CHECK(eta.a.gens[1](Rat(5)) < Rat(9, 2));
  CHECK(apply_word(eta, word_ab().as_word(), Rat(1)) > Rat(5, 2));
  CHECK(apply_word(eta, word_ab().as_word(), Rat(5)) < Rat(7, 2));

  pl::Interval K1(Rat(5, 2), Rat(7, 2));
  Rat lo = apply_word(eta, word_ab().as_word(), K1.lo);
  Rat hi = apply_word(eta, word_ab().as_word(), K1.hi);
  CHECK(K1.contains(lo));
  CHECK(K1.contains(hi));
  // K1 * eta(a) lies entirely above K1.
  CHECK(eta.a.gens[1](K1.lo) > K1.hi);
}

TEST_CASE("separated_pair") {
  pl::Interval block(Rat(0), Rat(2), true, true);
  Rat x(3, 4), y(5, 4);

  SUBCASE("powers of one generator") {
    FactorAction act = separated_pair(block, B(1), B(1, 2), x, y);
    Rat vf = actions::apply_factor(act, B(1), x);
    Rat vg = actions::apply_factor(act, B(1, 2), y);
    CHECK(vg < vf);
  }
  SUBCASE("distinct generators") {
    FactorAction act = separated_pair(block, B(1), B(2), x, y);
    CHECK(actions::apply_factor(act, B(2), y) < actions::apply_factor(act, B(1), x));
  }
  SUBCASE("inverse against itself") {
    FactorAction act = separated_pair(block, B(1), B(1, -1), x, y);
    CHECK(actions::apply_factor(act, B(1, -1), y) < actions::apply_factor(act, B(1), x));
  }
  SUBCASE("longer words sharing a prefix") {
    FactorElement f = B(1) * B(2);           // y1 y2
    FactorElement g = B(1) * B(2, -1);       // y1 y2^-1
    FactorAction act = separated_pair(block, f, g, x, y);
    CHECK(actions::apply_factor(act, g, y) < actions::apply_factor(act, f, x));
  }
  SUBCASE("one a prefix of the other") {
    FactorElement f = B(1);
    FactorElement g = B(1, 2) * B(2);  // y1^2 y2, shares the prefix y1
    FactorAction act = separated_pair(block, f, g, x, y);
    CHECK(actions::apply_factor(act, g, y) < actions::apply_factor(act, f, x));
  }
  SUBCASE("equal elements are rejected") {
    CHECK_THROWS_AS(separated_pair(block, B(1), B(1), x, y), EqualElements);
  }
}

TEST_CASE("conjugate_system") {
  Word w = word_abab2().as_word();
  Word w1{std::vector<FactorElement>{A(1), B(1)}};
  Word w2{std::vector<FactorElement>{A(2), B(2)}};
  EquationSystem sys;
  sys.equations.push_back(w);
  sys.inequations.push_back(words::reduce(w1 * w2 * w1.inverse()));

  EquationSystem same = conjugate_system(sys, Word{});
  CHECK(same.equations == sys.equations);
  CHECK(same.inequations == sys.inequations);

  EquationSystem red = conjugate_system(sys, w1);
  CHECK(red.equations[0] == words::reduce(w1.inverse() * w * w1));
  CHECK(red.inequations[0] == w2);

  EquationSystem back = conjugate_system(red, w1.inverse());
  CHECK(back.equations[0] == words::reduce(sys.equations[0]));
  CHECK(back.inequations[0] == words::reduce(sys.inequations[0]));
}

TEST_CASE("solve_simple case 1: the ab prototype") {
  auto sol = solve_simple(word_ab(), 1);
  CHECK(sol.plan.kind == "case1");
  // анchors follow the z1 = y1 - 1/4 convention.
  CHECK(sol.plan.anchors.at("z1") == sol.plan.anchors.at("y1") - Rat(1, 4));

  Word w = word_ab().as_word();
  Word w1 = word_ab().prefix_word(1);
  // postconditions, re-checked from outside
  CHECK(apply_word(sol.action, w, sol.point) == sol.point);
  CHECK(apply_word(sol.action, w1, sol.point) != sol.point);
  Rat ilo = apply_word(sol.action, w, sol.witness.lo);
  Rat ihi = apply_word(sol.action, w, sol.witness.hi);
  CHECK(sol.witness.contains(ilo));
  CHECK(sol.witness.contains(ihi));
  Rat slo = apply_word(sol.action, w1, sol.witness.lo);
  CHECK(slo > sol.witness.hi);
  // carried interval: pointwise fixed by the word composite
  pl::PLHomeo hw = actions::eval_word(sol.action, word_ab());
  CHECK(hw(sol.carried.lo) == sol.carried.lo);
  CHECK(hw(sol.carried.hi) == sol.carried.hi);
  CHECK(hw((sol.carried.lo + sol.carried.hi) / 2) == (sol.carried.lo + sol.carried.hi) / 2);
  CHECK(sol.carried.lo < sol.point);
  CHECK(sol.point < sol.carried.hi);
}

TEST_CASE("solve_simple case 2: distinct closing letters") {
  auto w = word_abab2();
  auto sol = solve_simple(w, 2);
  CHECK(sol.plan.kind == "case2");
  Word ww = w.as_word();
  Word w1 = w.prefix_word(2);
  CHECK(apply_word(sol.action, ww, sol.point) == sol.point);
  CHECK(apply_word(sol.action, w1, sol.point) != sol.point);
  Rat slo = apply_word(sol.action, w1, sol.witness.lo);
  Rat shi = apply_word(sol.action, w1, sol.witness.hi);
  CHECK((slo > sol.witness.hi || shi < sol.witness.lo));
}

TEST_CASE("solve_simple: rotation loop and proper powers") {
  // w = abab = (ab)^2 with w1 = ab: the rotation loop can never separate the
  // closing letters.
  AlternatingWord w({A(1), B(1), A(1), B(1)});
  CHECK_THROWS_AS(solve_simple(w, 2), ProperPower);

  // w = a b a b^-1 with w1 = a b: same closing factor, distinct letters
  // after one rotation at most.
  auto sol = solve_simple(word_abab_inv(), 2);
  Word ww = word_abab_inv().as_word();
  CHECK(apply_word(sol.action, ww, sol.point) == sol.point);
  CHECK(apply_word(sol.action, word_abab_inv().prefix_word(2), sol.point) != sol.point);
}

TEST_CASE("transfer_solution") {
  auto w = word_abab2();
  Word ww = w.as_word();
  auto pairs = words::prefix_pairs(w);
  const auto& pr = pairs[3];  // w1 = a1 b1, w2 = a2
  REQUIRE(pr.i == 2);

  EquationSystem sys;
  sys.equations.push_back(ww);
  sys.inequations.push_back(words::reduce(pr.w1 * pr.w2 * pr.w1.inverse()));

  AlternatingWord rot = AlternatingWord::from_word(words::reduce(pr.w1.inverse() * ww * pr.w1));
  auto s = solve_simple(rot, pr.j - pr.i);
  SystemSolution inner{s.action, s.point};
  CHECK(satisfies(inner, conjugate_system(sys, pr.w1)));

  // identity transfer
  SystemSolution same = transfer_solution(inner, Word{});
  CHECK(same.point == inner.point);

  // moving the point by eval(w1^-1) solves the original system
  SystemSolution back = transfer_solution(inner, pr.w1.inverse());
  CHECK(satisfies(back, sys));
}

TEST_CASE("combine_systems") {
  auto w = word_abab2();
  Word ww = w.as_word();
  StackerConfig cfg;

  auto make_pair_solution = [&](const words::PrefixPair& pr) {
    EquationSystem sys;
    sys.equations.push_back(ww);
    sys.inequations.push_back(words::reduce(pr.w1 * pr.w2 * pr.w1.inverse()));
    AlternatingWord rot = AlternatingWord::from_word(words::reduce(pr.w1.inverse() * ww * pr.w1));
    SimpleSolution s = solve_simple(rot, pr.j - pr.i, cfg);
    Word w1i = pr.w1.inverse();
    s.point = apply_word(s.action, w1i, s.point);
    s.witness = pl::Interval(apply_word(s.action, w1i, s.witness.lo),
                             apply_word(s.action, w1i, s.witness.hi));
    s.carried = pl::Interval(apply_word(s.action, w1i, s.carried.lo),
                             apply_word(s.action, w1i, s.carried.hi));
    return PairSolution{sys, s};
  };

  auto pairs = words::prefix_pairs(w);
  // Single solution: combine returns it unchanged up to verification.
  {
    std::vector<PairSolution> sols{make_pair_solution(pairs[0])};
    SystemSolution merged = combine_systems(w, sols, cfg);
    CHECK(satisfies(merged, sols[0].system));
  }
  // Two solutions: the merged point satisfies both inequations exactly.
  {
    std::vector<PairSolution> sols{make_pair_solution(pairs[0]), make_pair_solution(pairs[3])};
    SystemSolution merged = combine_systems(w, sols, cfg);
    EquationSystem both;
    both.equations.push_back(ww);
    both.inequations.push_back(sols[0].system.inequations[0]);
    both.inequations.push_back(sols[1].system.inequations[0]);
    CHECK(satisfies(merged, both));
  }
  // Mismatched equation sets are rejected.
  {
    std::vector<PairSolution> sols{make_pair_solution(pairs[0])};
    sols[0].system.equations[0] = words::reduce(ww * ww);
    CHECK_THROWS_AS(combine_systems(w, sols, cfg), PreconditionError);
  }
}

TEST_CASE("build_stacking: ab") {
  auto cert = build_stacking(word_ab());
  CHECK(actions::verify_certificate(cert).ok());
  CHECK(cert.lambda.size() == 2);
  CHECK(cert.lambda.at(2) == cert.base);
  CHECK(cert.lambda.at(1) != cert.base);
}

TEST_CASE("build_stacking: proper powers are refused") {
  AlternatingWord w({A(1), B(1), A(1), B(1)});
  CHECK_THROWS_AS(build_stacking(w), ProperPower);
}

TEST_CASE("build_stacking: a b a b^-1") {
  auto cert = build_stacking(word_abab_inv());
  CHECK(actions::verify_certificate(cert).ok());
  CHECK(cert.lambda.size() == 4);
  std::set<Rat> values;
  for (auto& [p, v] : cert.lambda) values.insert(v);
  CHECK(values.size() == 4);
}

TEST_CASE("build_stacking: a1 b1 a2 b2") {
  auto cert = build_stacking(word_abab2());
  CHECK(actions::verify_certificate(cert).ok());
  CHECK(cert.lambda.size() == 4);
}
