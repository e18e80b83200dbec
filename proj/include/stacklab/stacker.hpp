#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "stacklab/actions.hpp"
#include "stacklab/plline.hpp"
#include "stacklab/words.hpp"

namespace stacklab::stacker {

using actions::FactorAction;
using actions::ProductAction;
using actions::StackingCertificate;
using words::AlternatingWord;
using words::Factor;
using words::FactorElement;
using words::Word;

struct StackerConfig {
  int retry_limit = 8;
  unsigned long long seed = 0;
  Rat carried_delta = Rat(1, 64);  // half-width of the interval carried by transports
  Rat gap_epsilon = Rat(1, 4);     // width of final landing gaps
};

struct BlockTag {
  Factor family = Factor::A;
  std::string name;
};

// Chain of length-2 integer-endpoint intervals overlapping at midpoints;
// block t spans (origin + t, origin + t + 2). Families must alternate.
struct Catenation {
  long origin = 0;
  std::vector<BlockTag> tags;

  int size() const { return int(tags.size()); }
  pl::Interval block(int t) const {
    return pl::Interval(Rat(origin + t), Rat(origin + t + 2), true, true);
  }
};

Catenation build_catenation(const std::vector<BlockTag>& pattern, long origin);

// Accumulates prescribed (source -> target) pairs per (block, factor,
// generator) and assembles the movers into a ProductAction. Every prescribed
// source is recorded so later surgery can avoid it.
class ArrangementBuilder {
 public:
  explicit ArrangementBuilder(Catenation cat) : cat_(std::move(cat)) {}

  const Catenation& catenation() const { return cat_; }

  void add_pin(int block, Factor f, int gen, const Rat& src, const Rat& dst);

  // Moves `from` to `to` under the element's action on one block, spelled
  // into generator letters through an evenly spaced chain. A closed interval
  // of half-width delta around the moving point is translated rigidly at
  // every step.
  void add_hop(int block, const FactorElement& e, const Rat& from, const Rat& to,
               const Rat& delta);

  ProductAction build() const;

  // All prescribed sources (resp. targets) of one generator map, across blocks.
  std::vector<Rat> pinned_sources(Factor f, int gen) const;
  std::vector<Rat> pinned_targets(Factor f, int gen) const;

 private:
  Catenation cat_;
  std::map<std::tuple<int, int, int>, std::vector<std::pair<Rat, Rat>>> pins_;
};

struct Transport {
  FactorAction act_a{Factor::A, {}};
  FactorAction act_b{Factor::B, {}};
  Rat endpoint;  // image of `start` under the segment
  Rat delta;     // carried half-width
};

// Moves `start` rightward through the catenation blocks 0,1,2,... (one letter
// per block) into `target_gap`, carrying a small interval by translations.
Transport rightward_transport(const std::vector<FactorElement>& segment, const Catenation& cat,
                              const Rat& start, const pl::Interval& target_gap,
                              const StackerConfig& cfg = {});

// Mirror image: moves `start` leftward through blocks size-1, size-2, ...
Transport leftward_transport(const std::vector<FactorElement>& segment, const Catenation& cat,
                             const Rat& start, const pl::Interval& target_gap,
                             const StackerConfig& cfg = {});

// Action of one factor on `interval` with  y * act(g)  <  x * act(f)  for
// x < y: realizes both chains through an order-embedding of the Magnus order.
FactorAction separated_pair(const pl::Interval& interval, const FactorElement& f,
                            const FactorElement& g, const Rat& x, const Rat& y);

struct EquationSystem {
  std::vector<Word> equations;    // each alpha encodes  y * alpha = y
  std::vector<Word> inequations;  // each beta encodes  y * beta != y
};

EquationSystem conjugate_system(const EquationSystem& sys, const Word& h);

struct SystemSolution {
  ProductAction action;
  Rat point;
};

bool satisfies(const SystemSolution& sol, const EquationSystem& sys);

// Given a solution of the h-conjugate system, moves the point by eval(h) to
// solve the base system (callers pass the inverse conjugator as needed).
SystemSolution transfer_solution(const SystemSolution& sol, const Word& h);

// Debug dump of one arrangement: named anchors plus the catenation layout.
struct ArrangementPlan {
  std::string kind;  // "case1" or "case2"
  std::map<std::string, Rat> anchors;
  Catenation blocks;
};

struct SimpleSolution {
  ProductAction action;
  Rat point;             // fixed point of the w-composite inside `witness`
  pl::Interval witness;  // I with I*w subset I and I*w1 disjoint from I
  pl::Interval carried;  // closed interval around `point`, pointwise fixed by w
  ArrangementPlan plan;
};

// The dynamical-arrangement construction: builds an action and an interval I
// with I*w inside I and I*w1 disjoint from I, extracts the least fixed point,
// and flattens the w-composite to the identity on a small interval around it.
// prefix_len selects w1; Case 1 handles prefixes ending in the opposite
// factor from w's last letter, Case 2 (after the rotation loop) the rest.
SimpleSolution solve_simple(const AlternatingWord& w, int prefix_len,
                            const StackerConfig& cfg = {}, int retry = 0, unsigned salt = 0);

struct PairSolution {
  EquationSystem system;
  SimpleSolution solution;
};

// Finite blow-up combination: nests each later solution inside the carried
// interval of the previous one, planting conjugated copies of its generator
// maps along the orbit of the carried interval, and re-verifies the union
// system exactly. Throws CombineFailed when the nested track degenerates or
// verification fails.
SystemSolution combine_systems(const AlternatingWord& w, const std::vector<PairSolution>& sols,
                               const StackerConfig& cfg = {});

// Full pipeline: per prefix pair, form the system, reduce by conjugation,
// solve, transfer back, combine, and certify against the independent
// stability check.
StackingCertificate build_stacking(const AlternatingWord& w, const StackerConfig& cfg = {});

}  // namespace stacklab::stacker
