#pragma once

// Exact multivariate polynomials with rational coefficients, plus the
// univariate operations (division, gcd, square-free part, Taylor shift) used
// by root isolation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "chaoscope/error.hpp"

namespace chaoscope::bss {

// Expression templates off: values are stored in containers and aggregates.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                              boost::multiprecision::et_off>;

inline int sign(const Rational& r) { return r.sign(); }

// `num/den` with den > 0.
inline std::string format_rational(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

// Exact value of a finite double.
inline Rational to_rational(double v) {
  if (!std::isfinite(v)) throw error("cannot convert a non-finite value to a rational");
  int exp = 0;
  double mant = std::frexp(v, &exp);
  // mant * 2^53 is an integer for every finite double
  auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r(scaled);
  exp -= 53;
  Integer pow2 = Integer(1) << std::abs(exp);
  return exp >= 0 ? r * Rational(pow2) : r / Rational(pow2);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

using Monomial = std::vector<unsigned>;  // one exponent per variable

inline unsigned total_degree(const Monomial& m) {
  unsigned d = 0;
  for (unsigned e : m) d += e;
  return d;
}

// Graded order, highest total degree first, ties broken lexicographically
// (higher exponent on earlier variables first).
struct GradedGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    return a > b;
  }
};

class Polynomial {
 public:
  using Terms = std::map<Monomial, Rational, GradedGreater>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& c) {
    Polynomial p(nvars);
    if (c != 0) p.terms_[Monomial(nvars, 0)] = c;
    return p;
  }

  static Polynomial variable(std::size_t nvars, std::size_t index) {
    Polynomial p(nvars);
    Monomial m(nvars, 0);
    m.at(index) = 1;
    p.terms_[m] = 1;
    return p;
  }

  std::size_t nvars() const noexcept { return nvars_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  bool is_constant() const noexcept {
    return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
  }

  Rational constant_term() const {
    auto it = terms_.find(Monomial(nvars_, 0));
    return it == terms_.end() ? Rational(0) : it->second;
  }

  unsigned degree() const { return terms_.empty() ? 0 : total_degree(terms_.begin()->first); }

  // Degree in one variable.
  unsigned degree_in(std::size_t var) const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
    return d;
  }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.terms_) {
      auto [it, inserted] = terms_.try_emplace(m, c);
      if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
      }
    }
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) { return *this += -o; }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_compatible(b);
    Polynomial r(a.nvars_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m(a.nvars_);
        for (std::size_t i = 0; i < a.nvars_; ++i) m[i] = ma[i] + mb[i];
        auto [it, inserted] = r.terms_.try_emplace(std::move(m), ca * cb);
        if (!inserted) {
          it->second += ca * cb;
          if (it->second == 0) r.terms_.erase(it);
        }
      }
    }
    return r;
  }

  Polynomial scaled(const Rational& s) const {
    if (s == 0) return Polynomial(nvars_);
    Polynomial r = *this;
    for (auto& [m, c] : r.terms_) c *= s;
    return r;
  }

  Polynomial pow(unsigned e) const {
    Polynomial result = constant(nvars_, 1);
    Polynomial base = *this;
    while (e) {
      if (e & 1u) result = result * base;
      e >>= 1u;
      if (e) base = base * base;
    }
    return result;
  }

  template <class T>
  T evaluate(const std::vector<T>& point) const {
    T sum = T(0);
    for (const auto& [m, c] : terms_) {
      T term = convert<T>(c);
      for (std::size_t i = 0; i < nvars_; ++i)
        for (unsigned k = 0; k < m[i]; ++k) term *= point[i];
      sum += term;
    }
    return sum;
  }

  // `c*x^2*y + c*x + c` with c printed as num/den; "0/1" for the zero
  // polynomial. The text parses back with the program expression grammar.
  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0/1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << format_rational(c);
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (m[i] == 0) continue;
        os << '*' << names.at(i);
        if (m[i] > 1) os << '^' << m[i];
      }
    }
    return os.str();
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

 private:
  template <class T>
  static T convert(const Rational& c) {
    if constexpr (std::is_same_v<T, Rational>) return c;
    else return static_cast<T>(to_double(c));
  }

  void check_compatible(const Polynomial& o) const {
    if (nvars_ != o.nvars_) throw error("polynomial variable counts differ");
  }

  std::size_t nvars_ = 0;
  Terms terms_;
};

// ---------------------------------------------------------------------------
// Univariate polynomials: coefficients low degree first, no trailing zeros.

using UPoly = std::vector<Rational>;

inline void trim(UPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline UPoly to_univariate(const Polynomial& p) {
  if (p.nvars() != 1) throw error("expected a polynomial in one variable");
  UPoly u(p.degree() + 1, Rational(0));
  for (const auto& [m, c] : p.terms()) u[m[0]] = c;
  trim(u);
  return u;
}

inline int degree(const UPoly& p) { return static_cast<int>(p.size()) - 1; }

inline Rational evaluate(const UPoly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline int sign_at(const UPoly& p, const Rational& x) { return evaluate(p, x).sign(); }

inline UPoly derivative(const UPoly& p) {
  if (p.size() <= 1) return {};
  UPoly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<long>(i);
  return d;
}

inline UPoly monic(UPoly p) {
  trim(p);
  if (p.empty()) return p;
  Rational lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

inline UPoly multiply(const UPoly& a, const UPoly& b) {
  if (a.empty() || b.empty()) return {};
  UPoly r(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

// Quotient and remainder of a / b (b non-zero).
inline std::pair<UPoly, UPoly> divide(UPoly a, const UPoly& b) {
  if (b.empty()) throw error("polynomial division by zero");
  trim(a);
  if (a.size() < b.size()) return {{}, a};
  UPoly q(a.size() - b.size() + 1, Rational(0));
  const Rational& lead = b.back();
  for (std::size_t k = q.size(); k-- > 0;) {
    Rational f = a[k + b.size() - 1] / lead;
    q[k] = f;
    if (f != 0)
      for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= f * b[j];
  }
  trim(a);
  trim(q);
  return {q, a};
}

inline UPoly gcd(UPoly a, UPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    auto r = divide(a, b).second;
    a = std::move(b);
    b = monic(std::move(r));
  }
  return monic(a);
}

// p / gcd(p, p'), monic. Constants map to {1}.
inline UPoly squarefree_part(const UPoly& p) {
  if (degree(p) <= 0) return {Rational(1)};
  UPoly g = gcd(p, derivative(p));
  return monic(divide(p, g).first);
}

// p(x + s)
inline UPoly taylor_shift(UPoly p, const Rational& s) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = n - 1; j > i; --j) p[j - 1] += s * p[j];
  return p;
}

// p(s * x)
inline UPoly scale_argument(UPoly p, const Rational& s) {
  Rational f = 1;
  for (auto& c : p) {
    c *= f;
    f *= s;
  }
  return p;
}

inline UPoly reverse(UPoly p) {
  std::reverse(p.begin(), p.end());
  return p;
}

// Sign variations in the coefficient sequence (zeros skipped).
inline std::size_t sign_variations(const UPoly& p) {
  std::size_t v = 0;
  int prev = 0;
  for (const auto& c : p) {
    int s = c.sign();
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++v;
    prev = s;
  }
  return v;
}

}  // namespace chaoscope::bss
