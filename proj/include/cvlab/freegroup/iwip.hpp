#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "cvlab/freegroup/automorphism.hpp"

namespace cvlab {

/// Characteristic polynomial det(xI - M), coefficients from x^n down to x^0.
/// Faddeev-LeVerrier in exact integer arithmetic (the divisions are exact).
inline std::vector<long> characteristic_polynomial(const IntMatrix& m) {
  const std::size_t n = m.size();
  std::vector<long> coeffs(n + 1, 0);
  coeffs[0] = 1;
  IntMatrix mk(n, std::vector<long>(n, 0));  // M_k
  IntMatrix prod = mk;
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = M * M_{k-1} + c_{n-k+1} I, with M_0 = 0 and c_n = 1.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        long s = 0;
        for (std::size_t t = 0; t < n; ++t) s += m[i][t] * mk[t][j];
        prod[i][j] = s + (i == j ? coeffs[k - 1] : 0);
      }
    mk = prod;
    long tr = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < n; ++t) tr += m[i][t] * mk[t][i];
    coeffs[k] = -tr / static_cast<long>(k);
  }
  return coeffs;
}

/// Roots of a monic integer polynomial (Durand-Kerner).
inline std::vector<std::complex<double>> polynomial_roots(const std::vector<long>& coeffs) {
  const std::size_t n = coeffs.size() - 1;
  using C = std::complex<long double>;
  std::vector<C> z(n);
  const C seed(0.4L, 0.9L);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(seed, static_cast<int>(i));
  auto eval = [&](C x) {
    C v = 0;
    for (long c : coeffs) v = v * x + static_cast<long double>(c);
    return v;
  };
  for (int iter = 0; iter < 2000; ++iter) {
    long double delta = 0;
    for (std::size_t i = 0; i < n; ++i) {
      C denom = 1;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= (z[i] - z[j]);
      if (std::abs(denom) == 0) denom = C(1e-12L, 0);
      const C step = eval(z[i]) / denom;
      z[i] -= step;
      delta = std::max(delta, std::abs(step));
    }
    if (delta < 1e-18L) break;
  }
  std::vector<std::complex<double>> out;
  for (const auto& r : z) out.emplace_back(static_cast<double>(r.real()), static_cast<double>(r.imag()));
  return out;
}

/// Degree <= 3 integer polynomials are reducible over Q iff they have a
/// rational (hence, being monic, integer) root, or for degree 2 a square
/// discriminant.
inline bool has_integer_root(const std::vector<long>& coeffs) {
  const long c0 = coeffs.back();
  if (c0 == 0) return true;
  auto eval = [&](long x) {
    long v = 0;
    for (long c : coeffs) v = v * x + c;
    return v;
  };
  for (long d = 1; d <= std::labs(c0); ++d)
    if (c0 % d == 0 && (eval(d) == 0 || eval(-d) == 0)) return true;
  return false;
}

namespace detail {

using Poly = std::vector<long>;  // highest degree first

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// Exact division by a monic divisor.
inline Poly poly_div(Poly a, const Poly& b) {
  Poly q(a.size() - b.size() + 1, 0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = a[i];
    for (std::size_t j = 0; j < b.size(); ++j) a[i + j] -= q[i] * b[j];
  }
  return q;
}

inline int euler_phi(int k) {
  int r = k;
  for (int p = 2; p * p <= k; ++p)
    if (k % p == 0) {
      while (k % p == 0) k /= p;
      r -= r / p;
    }
  if (k > 1) r -= r / k;
  return r;
}

/// Cyclotomic polynomials of degree <= max_degree.
inline std::vector<Poly> cyclotomic_polynomials(int max_degree) {
  std::vector<Poly> all(1);
  std::vector<Poly> out;
  const int bound = 4 * max_degree * max_degree + 2;  // phi(k) >= sqrt(k/2)
  for (int k = 1; k <= bound; ++k) {
    Poly xk(static_cast<std::size_t>(k) + 1, 0);
    xk[0] = 1;
    xk.back() = -1;
    for (int d = 1; d < k; ++d)
      if (k % d == 0) xk = poly_div(xk, all[static_cast<std::size_t>(d)]);
    all.push_back(xk);
    if (euler_phi(k) <= max_degree) out.push_back(xk);
  }
  return out;
}

inline bool is_cyclotomic_product(const Poly& p, const std::vector<Poly>& factors, std::size_t from = 0) {
  if (p.size() == 1) return p[0] == 1;
  for (std::size_t i = from; i < factors.size(); ++i) {
    const Poly& f = factors[i];
    if (f.size() > p.size()) continue;
    const Poly q = poly_div(p, f);
    if (poly_mul(q, f) == p && is_cyclotomic_product(q, factors, i)) return true;
  }
  return false;
}

}  // namespace detail

enum class IwipFailure { None, Cyclotomic, Reducible, NotExpanding, UnsupportedRank };

struct IwipVerdict {
  bool pass = false;
  IwipFailure failure = IwipFailure::None;
  std::string reason;
  std::vector<long> charpoly;
  double spectral_radius = 0;
};

/// Homological iwip heuristic: the abelianization's characteristic polynomial
/// must be irreducible, not a product of cyclotomic factors, and have a root
/// of modulus > 1. A pass is a flag, not a proof.
inline IwipVerdict iwip_heuristic(const Automorphism& phi) {
  IwipVerdict v;
  v.charpoly = characteristic_polynomial(phi.abelianization_matrix());
  const auto roots = polynomial_roots(v.charpoly);
  for (const auto& r : roots) v.spectral_radius = std::max(v.spectral_radius, std::abs(r));
  const std::size_t deg = v.charpoly.size() - 1;
  if (deg > 3) {
    v.failure = IwipFailure::UnsupportedRank;
    v.reason = "irreducibility test implemented for ranks 2 and 3 only";
    return v;
  }
  const auto cyclo = detail::cyclotomic_polynomials(static_cast<int>(deg));
  if (detail::is_cyclotomic_product(v.charpoly, cyclo)) {
    v.failure = IwipFailure::Cyclotomic;
    v.reason = "cyclotomic: all eigenvalues are roots of unity";
    return v;
  }
  bool reducible = has_integer_root(v.charpoly);
  if (deg == 2 && !reducible) {
    const long disc = v.charpoly[1] * v.charpoly[1] - 4 * v.charpoly[2];
    if (disc >= 0) {
      const long s = std::lround(std::sqrt(static_cast<double>(disc)));
      for (long t = std::max(0L, s - 1); t <= s + 1; ++t) reducible = reducible || t * t == disc;
    }
  }
  if (reducible) {
    v.failure = IwipFailure::Reducible;
    v.reason = "reducible characteristic polynomial";
    return v;
  }
  if (!(v.spectral_radius > 1.0 + 1e-9)) {
    v.failure = IwipFailure::NotExpanding;
    v.reason = "no eigenvalue of modulus > 1";
    return v;
  }
  v.pass = true;
  return v;
}

inline std::string polynomial_string(const std::vector<long>& coeffs) {
  std::string s;
  const std::size_t n = coeffs.size() - 1;
  for (std::size_t i = 0; i <= n; ++i) {
    const long c = coeffs[i];
    if (c == 0) continue;
    const std::size_t p = n - i;
    const long a = std::labs(c);
    if (s.empty()) s += c < 0 ? "-" : "";
    else s += c < 0 ? " - " : " + ";
    if (a != 1 || p == 0) s += std::to_string(a);
    if (p >= 1) s += "x";
    if (p >= 2) s += "^" + std::to_string(p);
  }
  return s.empty() ? "0" : s;
}

}  // namespace cvlab
