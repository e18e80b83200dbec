#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stacklab/errors.hpp"

namespace stacklab::words {

enum class Factor : uint8_t { A = 0, B = 1 };

inline Factor other(Factor f) { return f == Factor::A ? Factor::B : Factor::A; }
inline char factor_char(Factor f) { return f == Factor::A ? 'A' : 'B'; }

// One generator power inside a free factor: gen index >= 1, exponent != 0.
struct Syllable {
  int gen;
  long long exp;
  auto operator<=>(const Syllable&) const = default;
};

// A freely reduced element of one free factor (adjacent syllables use distinct
// generators, exponents nonzero, empty list = identity).
class FactorElement {
 public:
  FactorElement() : factor_(Factor::A) {}
  FactorElement(Factor f, std::vector<Syllable> sylls);

  static FactorElement identity(Factor f) { return FactorElement(f, {}); }
  static FactorElement generator(Factor f, int gen, long long exp = 1) {
    return FactorElement(f, {{gen, exp}});
  }

  Factor factor() const { return factor_; }
  const std::vector<Syllable>& syllables() const { return syllables_; }
  bool is_identity() const { return syllables_.empty(); }

  FactorElement inverse() const;
  FactorElement operator*(const FactorElement& rhs) const;  // same factor only

  // Total number of single-generator letters (sum of |exp|).
  long long gen_length() const;
  // Spells the element as single-generator letters (gen, sign in {+1,-1}).
  std::vector<std::pair<int, int>> spell() const;
  int max_gen() const;

  bool operator==(const FactorElement& rhs) const {
    if (is_identity() && rhs.is_identity()) return true;
    return factor_ == rhs.factor_ && syllables_ == rhs.syllables_;
  }
  std::strong_ordering operator<=>(const FactorElement& rhs) const;

  std::string str() const;  // debug form, e.g. "A:x1^2 x3^-1"

 private:
  Factor factor_;
  std::vector<Syllable> syllables_;
};

// Scratch word: an arbitrary sequence of factor elements, not necessarily
// reduced or alternating.
struct Word {
  std::vector<FactorElement> letters;

  Word() = default;
  explicit Word(std::vector<FactorElement> ls) : letters(std::move(ls)) {}

  bool empty() const { return letters.empty(); }
  size_t size() const { return letters.size(); }
  Word inverse() const;
  Word operator*(const Word& rhs) const;  // concatenation, no reduction
  bool operator==(const Word& rhs) const = default;

  long long gen_length() const;
  std::string str() const;
};

// Unique reduced normal form: merge adjacent same-factor letters, drop
// identities, repeat to fixpoint. The result is alternating.
Word reduce(const Word& w);

// A nonempty reduced word whose letters strictly alternate between factors.
class AlternatingWord {
 public:
  explicit AlternatingWord(std::vector<FactorElement> sylls);
  static AlternatingWord from_word(const Word& reduced_word);

  const std::vector<FactorElement>& letters() const { return letters_; }
  const FactorElement& letter(int i) const { return letters_[size_t(i) - 1]; }  // 1-based
  int size() const { return int(letters_.size()); }

  // Even length; first and last letters then automatically lie in different
  // factors. The standard form additionally starts with an A-letter.
  bool cyclically_reduced() const { return size() >= 2 && size() % 2 == 0; }
  bool a_first() const { return letters_.front().factor() == Factor::A; }

  Word as_word() const { return Word(letters_); }
  Word prefix_word(int len) const;  // first `len` letters
  Word inverse() const { return as_word().inverse(); }

  bool operator==(const AlternatingWord& rhs) const = default;
  std::string str() const { return as_word().str(); }

 private:
  std::vector<FactorElement> letters_;
};

// Identifies the nonempty prefix ending after the index-th letter, 1 <= index <= |w|.
using PrefixId = int;

struct CyclicReduction {
  AlternatingWord word;  // cyclically reduced, A-first
  Word conjugator;       // c with  input = c * word * c^-1  after reduction
};

struct FactorConjugate : PreconditionError {
  FactorConjugate(FactorElement e, Word c)
      : PreconditionError("word is conjugate into factor " +
                          std::string(1, factor_char(e.factor()))),
        element(std::move(e)),
        conjugator(std::move(c)) {}
  FactorElement element;  // the core element (possibly identity)
  Word conjugator;
};

// Rotates/cancels a reduced word into the cyclically reduced A-first form.
// Throws FactorConjugate when the word is conjugate into a single factor.
CyclicReduction cyclic_reduce(const Word& reduced_word);

// Maximal-root detection by literal syllable periodicity: returns (u, k) with
// w = u^k and k >= 2 maximal, or nullopt.
std::optional<std::pair<AlternatingWord, int>> is_proper_power(const AlternatingWord& w);

// The |w| nonempty prefixes, in order a1, a1b1, ..., w.
std::vector<std::pair<PrefixId, Word>> prefixes(const AlternatingWord& w);

struct PrefixPair {
  int i;    // |w1|
  int j;    // |w1 w2|
  Word w1;  // prefix of length i
  Word w2;  // letters i+1..j
};

// All ordered pairs (w1, w2) with w1 and w1*w2 prefixes of w, ordered by (|w1|, |w2|).
std::vector<PrefixPair> prefix_pairs(const AlternatingWord& w);

}  // namespace stacklab::words
