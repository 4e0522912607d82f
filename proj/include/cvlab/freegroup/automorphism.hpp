#pragma once

#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvlab/freegroup/stallings.hpp"
#include "cvlab/freegroup/word.hpp"

namespace cvlab {

using IntMatrix = std::vector<std::vector<long>>;

/// Applies the endomorphism x_i -> images[i-1] to w.
inline Word substitute(std::span<const Word> images, const Word& w) {
  const int rank = images.empty() ? w.rank() : images.front().rank();
  Word out(rank);
  for (Letter l : w.letters()) {
    const Word& img = images[static_cast<std::size_t>(std::abs(l) - 1)];
    if (l > 0) {
      for (Letter m : img.letters()) out.push_reduced(m);
    } else {
      const auto ls = img.letters();
      for (auto it = ls.rbegin(); it != ls.rend(); ++it) out.push_reduced(-*it);
    }
  }
  return out;
}

/// If x_i -> images[i] is conjugation by some g (images[i] = g x_i g^{-1}
/// for every i), returns g.
///
/// The conjugator is pinned down exactly: images[0] = p x_1^{+1} p^{-1} fixes g
/// up to a right factor x_1^k, and the second image determines k.
inline std::optional<Word> inner_conjugator(std::span<const Word> images) {
  if (images.empty()) return std::nullopt;
  const int rank = images.front().rank();
  const auto [p, core] = cyclic_decomposition(images[0]);
  if (core.size() != 1 || core[0] != 1) return std::nullopt;
  Word g = p;
  if (rank >= 2) {
    // p^{-1} images[1] p must equal x_1^k x_2 x_1^{-k}.
    const Word r = p.inverse() * images[1] * p;
    const auto ls = r.letters();
    std::size_t lead = 0;
    while (lead < ls.size() && std::abs(ls[lead]) == 1) ++lead;
    if (lead >= ls.size() || ls[lead] != 2) return std::nullopt;
    const long k = lead == 0 ? 0 : (ls[0] > 0 ? static_cast<long>(lead) : -static_cast<long>(lead));
    g = p * Word::generator(rank, 1).power(k);
  }
  const Word ginv = g.inverse();
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Word expected = g * Word::generator(rank, static_cast<Letter>(i + 1)) * ginv;
    if (!(expected == images[i])) return std::nullopt;
  }
  return g;
}

/// An automorphism of F_n given by basis images, carried together with the
/// images of its inverse.
class Automorphism {
 public:
  Automorphism() : Automorphism(identity(2)) {}
  explicit Automorphism(int rank) : Automorphism(identity(rank)) {}

  /// Checks both directions compose to the identity on the basis.
  Automorphism(std::vector<Word> images, std::vector<Word> inverse_images)
      : images_(std::move(images)), inverse_images_(std::move(inverse_images)) {
    if (images_.empty() || images_.size() != inverse_images_.size())
      throw InvalidAutomorphism("image lists must be nonempty and of equal length");
    rank_ = static_cast<int>(images_.size());
    for (const auto& w : images_)
      if (w.rank() != rank_) throw InvalidInput("image rank does not match automorphism rank");
    for (const auto& w : inverse_images_)
      if (w.rank() != rank_) throw InvalidInput("inverse image rank does not match automorphism rank");
    for (int i = 1; i <= rank_; ++i) {
      const Word x = Word::generator(rank_, i);
      if (!(substitute(images_, substitute(inverse_images_, x)) == x) ||
          !(substitute(inverse_images_, substitute(images_, x)) == x))
        throw InvalidAutomorphism("inverse data is inconsistent at letter " + std::string(1, letter_char(i)));
    }
  }

  /// Derives the inverse by folding the image basis; throws when the images
  /// are not a free basis of F_n.
  static Automorphism from_images(std::vector<Word> images) {
    if (images.empty()) throw InvalidAutomorphism("no images");
    const int rank = static_cast<int>(images.size());
    for (const auto& w : images)
      if (w.rank() != rank) throw InvalidInput("image rank does not match automorphism rank");
    const auto g = StallingsGraph::fold(images, rank);
    auto inv = g.express_basis();
    if (!inv || g.dependent()) throw InvalidAutomorphism("images do not form a basis of F_" + std::to_string(rank));
    return Automorphism(std::move(images), std::move(*inv));
  }

  static Automorphism parse(std::span<const std::string> images, int rank) {
    if (static_cast<int>(images.size()) != rank)
      throw InvalidInput("expected " + std::to_string(rank) + " images");
    std::vector<Word> ws;
    for (const auto& s : images) ws.push_back(Word::parse(s, rank));
    return from_images(std::move(ws));
  }

  static Automorphism identity(int rank) {
    std::vector<Word> ims;
    for (int i = 1; i <= rank; ++i) ims.push_back(Word::generator(rank, i));
    return Automorphism(Unchecked{}, rank, ims, ims);
  }

  /// Conjugation x -> g x g^{-1}.
  static Automorphism inner(const Word& g) {
    const int rank = g.rank();
    std::vector<Word> ims, inv;
    for (int i = 1; i <= rank; ++i) {
      const Word x = Word::generator(rank, i);
      ims.push_back(g * x * g.inverse());
      inv.push_back(g.inverse() * x * g);
    }
    return Automorphism(std::move(ims), std::move(inv));
  }

  int rank() const { return rank_; }
  const std::vector<Word>& images() const { return images_; }
  const std::vector<Word>& inverse_images() const { return inverse_images_; }
  const Word& image(int i) const { return images_[static_cast<std::size_t>(i - 1)]; }

  Word apply(const Word& w) const {
    check_rank(w.rank());
    return substitute(images_, w);
  }
  ConjClass apply(const ConjClass& c) const { return ConjClass(apply(c.word())); }
  Word operator()(const Word& w) const { return apply(w); }

  Automorphism inverse() const {
    Automorphism a = *this;
    std::swap(a.images_, a.inverse_images_);
    return a;
  }

  /// (f * g)(w) = f(g(w)).
  friend Automorphism operator*(const Automorphism& f, const Automorphism& g) {
    f.check_rank(g.rank());
    std::vector<Word> ims, inv;
    ims.reserve(g.images_.size());
    for (const auto& w : g.images_) ims.push_back(substitute(f.images_, w));
    for (const auto& w : f.inverse_images_) inv.push_back(substitute(g.inverse_images_, w));
    return Automorphism(Unchecked{}, f.rank_, std::move(ims), std::move(inv));
  }

  Automorphism power(long k) const {
    Automorphism base = k < 0 ? inverse() : *this;
    Automorphism out = identity(rank_);
    for (long i = 0; i < std::labs(k); ++i) out = base * out;
    return out;
  }

  /// Returns the conjugator when this automorphism is inner.
  std::optional<Word> is_inner() const { return inner_conjugator(images_); }

  /// Column i is the exponent vector of the image of x_i.
  IntMatrix abelianization_matrix() const {
    IntMatrix m(static_cast<std::size_t>(rank_), std::vector<long>(static_cast<std::size_t>(rank_), 0));
    for (int j = 0; j < rank_; ++j) {
      const auto v = abelianization(images_[static_cast<std::size_t>(j)]);
      for (int i = 0; i < rank_; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(i)];
    }
    return m;
  }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < rank_; ++i) {
      if (i) s += ", ";
      s += letter_char(i + 1);
      s += "->";
      const auto img = images_[static_cast<std::size_t>(i)].str();
      s += img.empty() ? "1" : img;
    }
    return s + ")";
  }

  friend bool operator==(const Automorphism& a, const Automorphism& b) {
    return a.rank_ == b.rank_ && a.images_ == b.images_;
  }

 private:
  struct Unchecked {};
  Automorphism(Unchecked, int rank, std::vector<Word> images, std::vector<Word> inverse_images)
      : rank_(rank), images_(std::move(images)), inverse_images_(std::move(inverse_images)) {}

  void check_rank(int r) const {
    if (r != rank_)
      throw InvalidInput("rank mismatch: automorphism of rank " + std::to_string(rank_) + " vs " + std::to_string(r));
  }

  int rank_ = 2;
  std::vector<Word> images_;
  std::vector<Word> inverse_images_;
};

/// Equality in Out(F_n).
inline bool equal_in_out(const Automorphism& a, const Automorphism& b) {
  return (a.inverse() * b).is_inner().has_value();
}

}  // namespace cvlab
