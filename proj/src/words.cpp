#include "stacklab/words.hpp"

#include <algorithm>
#include <sstream>

namespace stacklab::words {

FactorElement::FactorElement(Factor f, std::vector<Syllable> sylls) : factor_(f) {
  // Free reduction within the factor: merge runs of the same generator,
  // dropping zero exponents (which may re-expose further merges).
  for (const auto& s : sylls) {
    if (s.gen < 1) throw InputError("generator index must be >= 1");
    if (s.exp == 0) continue;
    if (!syllables_.empty() && syllables_.back().gen == s.gen) {
      syllables_.back().exp += s.exp;
      if (syllables_.back().exp == 0) syllables_.pop_back();
    } else {
      syllables_.push_back(s);
    }
  }
}

FactorElement FactorElement::inverse() const {
  std::vector<Syllable> inv;
  inv.reserve(syllables_.size());
  for (auto it = syllables_.rbegin(); it != syllables_.rend(); ++it)
    inv.push_back({it->gen, -it->exp});
  FactorElement r;
  r.factor_ = factor_;
  r.syllables_ = std::move(inv);  // already reduced
  return r;
}

FactorElement FactorElement::operator*(const FactorElement& rhs) const {
  if (!is_identity() && !rhs.is_identity() && factor_ != rhs.factor_)
    throw FactorMismatch("cannot multiply elements of different factors");
  Factor f = is_identity() ? rhs.factor_ : factor_;
  std::vector<Syllable> all = syllables_;
  all.insert(all.end(), rhs.syllables_.begin(), rhs.syllables_.end());
  return FactorElement(f, std::move(all));
}

long long FactorElement::gen_length() const {
  long long n = 0;
  for (const auto& s : syllables_) n += s.exp < 0 ? -s.exp : s.exp;
  return n;
}

std::vector<std::pair<int, int>> FactorElement::spell() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& s : syllables_) {
    int sign = s.exp > 0 ? 1 : -1;
    for (long long k = 0; k < (s.exp > 0 ? s.exp : -s.exp); ++k) out.emplace_back(s.gen, sign);
  }
  return out;
}

int FactorElement::max_gen() const {
  int m = 0;
  for (const auto& s : syllables_) m = std::max(m, s.gen);
  return m;
}

std::strong_ordering FactorElement::operator<=>(const FactorElement& rhs) const {
  bool li = is_identity(), ri = rhs.is_identity();
  if (li || ri) {
    if (li && ri) return std::strong_ordering::equal;
    return li ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (auto c = factor_ <=> rhs.factor_; c != 0) return c;
  return syllables_ <=> rhs.syllables_;
}

std::string FactorElement::str() const {
  if (is_identity()) return "1";
  std::ostringstream os;
  os << factor_char(factor_) << ':';
  bool first = true;
  for (const auto& s : syllables_) {
    if (!first) os << ' ';
    first = false;
    os << 'g' << s.gen;
    if (s.exp != 1) os << '^' << s.exp;
  }
  return os.str();
}

Word Word::inverse() const {
  Word r;
  r.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) r.letters.push_back(it->inverse());
  return r;
}

Word Word::operator*(const Word& rhs) const {
  Word r = *this;
  r.letters.insert(r.letters.end(), rhs.letters.begin(), rhs.letters.end());
  return r;
}

long long Word::gen_length() const {
  long long n = 0;
  for (const auto& l : letters) n += l.gen_length();
  return n;
}

std::string Word::str() const {
  if (letters.empty()) return "1";
  std::ostringstream os;
  for (size_t i = 0; i < letters.size(); ++i) {
    if (i) os << " . ";
    os << letters[i].str();
  }
  return os.str();
}

Word reduce(const Word& w) {
  Word out;
  for (const auto& l : w.letters) {
    if (l.is_identity()) continue;
    FactorElement cur = l;
    while (!out.letters.empty() && !cur.is_identity() &&
           out.letters.back().factor() == cur.factor()) {
      cur = out.letters.back() * cur;
      out.letters.pop_back();
    }
    if (!cur.is_identity()) out.letters.push_back(cur);
  }
  return out;
}

AlternatingWord::AlternatingWord(std::vector<FactorElement> sylls) : letters_(std::move(sylls)) {
  if (letters_.empty()) throw InputError("alternating word must be nonempty");
  for (size_t i = 0; i < letters_.size(); ++i) {
    if (letters_[i].is_identity()) throw InputError("alternating word has a trivial letter");
    if (i > 0 && letters_[i].factor() == letters_[i - 1].factor())
      throw InputError("alternating word has two consecutive same-factor letters");
  }
}

AlternatingWord AlternatingWord::from_word(const Word& w) {
  Word r = reduce(w);
  return AlternatingWord(r.letters);
}

Word AlternatingWord::prefix_word(int len) const {
  if (len < 0 || len > size()) throw InputError("prefix length out of range");
  return Word(std::vector<FactorElement>(letters_.begin(), letters_.begin() + len));
}

CyclicReduction cyclic_reduce(const Word& input) {
  Word w = reduce(input);
  Word conj;  // accumulated: input = conj * w * conj^-1
  // Cancel matching ends: f m l with factor(f) == factor(l) becomes m (l f).
  while (w.size() >= 2 && w.letters.front().factor() == w.letters.back().factor()) {
    FactorElement f = w.letters.front();
    conj.letters.push_back(f);
    std::vector<FactorElement> mid(w.letters.begin() + 1, w.letters.end() - 1);
    FactorElement merged = w.letters.back() * f;
    Word next{std::move(mid)};
    if (!merged.is_identity()) next.letters.push_back(merged);
    w = reduce(next);
  }
  if (w.size() < 2) {
    FactorElement core = w.empty() ? FactorElement() : w.letters.front();
    throw FactorConjugate(core, reduce(conj));
  }
  // Rotate to the A-first convention if needed (one letter suffices: the word
  // alternates and has even length).
  if (w.letters.front().factor() == Factor::B) {
    FactorElement f = w.letters.front();
    conj.letters.push_back(f);
    std::vector<FactorElement> rot(w.letters.begin() + 1, w.letters.end());
    rot.push_back(f);
    w = Word{std::move(rot)};
  }
  return CyclicReduction{AlternatingWord(w.letters), reduce(conj)};
}

std::optional<std::pair<AlternatingWord, int>> is_proper_power(const AlternatingWord& w) {
  int L = w.size();
  if (L < 2 || L % 2 != 0) return std::nullopt;
  // Smallest literal period gives the maximal k. Odd periods never match
  // because the factors would clash.
  for (int p = 2; p < L; p += 2) {
    if (L % p != 0) continue;
    bool periodic = true;
    for (int i = p; i < L && periodic; ++i)
      periodic = (w.letters()[size_t(i)] == w.letters()[size_t(i % p)]);
    if (periodic) {
      std::vector<FactorElement> root(w.letters().begin(), w.letters().begin() + p);
      return std::make_pair(AlternatingWord(std::move(root)), L / p);
    }
  }
  return std::nullopt;
}

std::vector<std::pair<PrefixId, Word>> prefixes(const AlternatingWord& w) {
  if (!w.cyclically_reduced()) throw NotCyclicallyReduced("prefixes: word not cyclically reduced");
  std::vector<std::pair<PrefixId, Word>> out;
  out.reserve(size_t(w.size()));
  for (int i = 1; i <= w.size(); ++i) out.emplace_back(i, w.prefix_word(i));
  return out;
}

std::vector<PrefixPair> prefix_pairs(const AlternatingWord& w) {
  if (!w.cyclically_reduced())
    throw NotCyclicallyReduced("prefix_pairs: word not cyclically reduced");
  std::vector<PrefixPair> out;
  int L = w.size();
  out.reserve(size_t(L) * size_t(L - 1) / 2);
  for (int i = 1; i < L; ++i) {
    for (int j = i + 1; j <= L; ++j) {
      PrefixPair p;
      p.i = i;
      p.j = j;
      p.w1 = w.prefix_word(i);
      p.w2 = Word(std::vector<FactorElement>(w.letters().begin() + i, w.letters().begin() + j));
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace stacklab::words
