#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cvlab/core/error.hpp"

namespace cvlab {

// A letter is +i for the basis element x_i and -i for its inverse (1 <= i <= rank).
using Letter = int;

inline constexpr int kMaxRank = 26;

inline Letter inverse(Letter l) { return -l; }

// Alphabet order used for every lexicographic comparison: a < A < b < B < ...
inline int letter_key(Letter l) { return 2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0); }

inline char letter_char(Letter l) {
  return l > 0 ? static_cast<char>('a' + l - 1) : static_cast<char>('A' + (-l) - 1);
}

inline Letter parse_letter(char c, int rank) {
  Letter l = 0;
  if (c >= 'a' && c <= 'z') l = c - 'a' + 1;
  else if (c >= 'A' && c <= 'Z') l = -(c - 'A' + 1);
  else throw InvalidInput(std::string("character '") + c + "' is not a letter");
  if (std::abs(l) > rank)
    throw InvalidInput(std::string("letter '") + c + "' outside the alphabet of rank " +
                       std::to_string(rank));
  return l;
}

/// A freely reduced element of F_n.
class Word {
 public:
  Word() = default;
  explicit Word(int rank) : rank_(rank) { check_rank(rank); }

  /// Validates every letter against `rank` and freely reduces.
  Word(int rank, std::span<const Letter> letters) : rank_(rank) {
    check_rank(rank);
    letters_.reserve(letters.size());
    for (Letter l : letters) {
      if (l == 0 || std::abs(l) > rank)
        throw InvalidInput("letter " + std::to_string(l) + " outside rank " + std::to_string(rank));
      push_reduced(l);
    }
  }
  Word(int rank, std::initializer_list<Letter> letters)
      : Word(rank, std::span<const Letter>(letters.begin(), letters.size())) {}

  static Word parse(std::string_view text, int rank) {
    check_rank(rank);
    Word w(rank);
    for (char c : text) {
      if (c == ' ' || c == '1') continue;  // "1" is accepted as the empty word
      w.push_reduced(parse_letter(c, rank));
    }
    return w;
  }

  static Word generator(int rank, Letter l) { return Word(rank, {l}); }

  int rank() const { return rank_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  std::span<const Letter> letters() const { return letters_; }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }

  Word inverse() const {
    Word w(rank_);
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(-*it);
    return w;
  }

  /// Appends and cancels at the junction.
  Word& operator*=(const Word& rhs) {
    if (rhs.rank_ != rank_) throw InvalidInput("rank mismatch in word product");
    for (Letter l : rhs.letters_) push_reduced(l);
    return *this;
  }
  friend Word operator*(Word lhs, const Word& rhs) { return lhs *= rhs; }

  Word power(long k) const {
    Word base = k < 0 ? inverse() : *this;
    Word out(rank_);
    for (long i = 0; i < std::labs(k); ++i) out *= base;
    return out;
  }

  Word subword(std::size_t pos, std::size_t len) const {
    Word w(rank_);
    w.letters_.assign(letters_.begin() + static_cast<std::ptrdiff_t>(pos),
                      letters_.begin() + static_cast<std::ptrdiff_t>(pos + len));
    return w;
  }

  std::string str() const {
    std::string s;
    s.reserve(letters_.size());
    for (Letter l : letters_) s.push_back(letter_char(l));
    return s;
  }

  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (Letter l : letters_) {
      h ^= static_cast<std::uint64_t>(letter_key(l) + 1);
      h *= 1099511628211ull;
    }
    return h;
  }

  friend bool operator==(const Word& a, const Word& b) {
    return a.rank_ == b.rank_ && a.letters_ == b.letters_;
  }
  /// Lexicographic in the alphabet order (a < A < b < ...), prefixes first.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    const auto n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      const int ka = letter_key(a.letters_[i]);
      const int kb = letter_key(b.letters_[i]);
      if (ka != kb) return ka <=> kb;
    }
    return a.size() <=> b.size();
  }

  // Raw append without reduction; callers guarantee the result stays reduced.
  void push_unchecked(Letter l) { letters_.push_back(l); }

  void push_reduced(Letter l) {
    if (!letters_.empty() && letters_.back() == -l) letters_.pop_back();
    else letters_.push_back(l);
  }

 private:
  static void check_rank(int rank) {
    if (rank < 1 || rank > kMaxRank)
      throw InvalidInput("rank " + std::to_string(rank) + " outside 1.." + std::to_string(kMaxRank));
  }

  int rank_ = 2;
  std::vector<Letter> letters_;
};

/// w = conjugator * core * conjugator^{-1} with core cyclically reduced.
struct CyclicDecomposition {
  Word conjugator;
  Word core;
};

inline CyclicDecomposition cyclic_decomposition(const Word& w) {
  std::size_t i = 0;
  std::size_t j = w.size();
  while (j - i >= 2 && w[i] == -w[j - 1]) {
    ++i;
    --j;
  }
  return {w.subword(0, i), w.subword(i, j - i)};
}

/// Start index of the lexicographically least rotation (linear time).
inline std::size_t least_rotation(std::span<const Letter> s) {
  const std::size_t n = s.size();
  if (n <= 1) return 0;
  std::size_t i = 0, j = 1, k = 0;
  while (i < n && j < n && k < n) {
    const int a = letter_key(s[(i + k) % n]);
    const int b = letter_key(s[(j + k) % n]);
    if (a == b) {
      ++k;
      continue;
    }
    if (a > b) i += k + 1;
    else j += k + 1;
    if (i == j) ++j;
    k = 0;
  }
  return std::min(i, j);
}

/// Conjugacy class of an element of F_n, stored as its lexicographically
/// least cyclically reduced rotation. A class and its inverse are distinct.
class ConjClass {
 public:
  ConjClass() = default;
  explicit ConjClass(const Word& w) : word_(canonical(w)) {}

  static ConjClass parse(std::string_view text, int rank) { return ConjClass(Word::parse(text, rank)); }

  const Word& word() const { return word_; }
  int rank() const { return word_.rank(); }
  std::size_t size() const { return word_.size(); }
  bool trivial() const { return word_.empty(); }
  std::string str() const { return word_.str(); }
  ConjClass inverse() const { return ConjClass(word_.inverse()); }

  friend bool operator==(const ConjClass&, const ConjClass&) = default;
  friend std::strong_ordering operator<=>(const ConjClass& a, const ConjClass& b) {
    return a.word_ <=> b.word_;
  }

 private:
  static Word canonical(const Word& w) {
    const Word core = cyclic_decomposition(w).core;
    const auto letters = core.letters();
    const std::size_t start = least_rotation(letters);
    std::vector<Letter> rotated;
    rotated.reserve(letters.size());
    for (std::size_t k = 0; k < letters.size(); ++k) rotated.push_back(letters[(start + k) % letters.size()]);
    Word out(w.rank());
    for (Letter l : rotated) out.push_unchecked(l);
    return out;
  }

  Word word_;
};

inline ConjClass canonicalize(const Word& w) { return ConjClass(w); }

/// Exponent-sum vector (image in Z^n).
inline std::vector<long> abelianization(const Word& w) {
  std::vector<long> v(static_cast<std::size_t>(w.rank()), 0);
  for (Letter l : w.letters()) v[static_cast<std::size_t>(std::abs(l) - 1)] += l > 0 ? 1 : -1;
  return v;
}

/// If `w` is conjugate to the cyclically reduced word `target`, returns g
/// with g * w * g^{-1} == target.
inline std::optional<Word> conjugator_to(const Word& w, const Word& target) {
  const auto [p, core] = cyclic_decomposition(w);
  if (core.size() != target.size()) return std::nullopt;
  const std::size_t n = core.size();
  if (n == 0) return p.inverse();
  for (std::size_t r = 0; r < n; ++r) {
    bool match = true;
    for (std::size_t k = 0; k < n && match; ++k) match = core[(r + k) % n] == target[k];
    if (!match) continue;
    // core = u v with u = core[0, r), target = v u, so target = u^{-1} core u.
    const Word u = core.subword(0, r);
    return u.inverse() * p.inverse();
  }
  return std::nullopt;
}

}  // namespace cvlab
