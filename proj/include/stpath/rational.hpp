#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stpath {

// Thrown by every text parser in the library. The kind lets callers tell
// malformed numbers from structural problems without matching on messages.
enum class ParseErrorKind {
  kMalformedRational,
  kMalformedHeader,
  kMalformedLine,
  kAsymmetricDuplicate,
  kSameTerminals,
  kVertexOutOfRange,
  kNotMetric,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

// Exact fraction, always in lowest terms with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(implicit)
  Rational(int value) : value_(static_cast<long>(value)) {}  // NOLINT(implicit)
  Rational(long numerator, long denominator) {
    if (denominator == 0) throw std::domain_error("zero denominator");
    value_ = mpq_class(numerator, denominator);
    value_.canonicalize();
  }
  explicit Rational(mpq_class value) : value_(std::move(value)) {
    value_.canonicalize();
  }

  // Accepts "p", "-p", "p/q" with decimal integers; q must be nonzero.
  static Rational parse(std::string_view text) {
    auto bad = [&] {
      return ParseError(ParseErrorKind::kMalformedRational,
                        "malformed rational '" + std::string(text) + "'");
    };
    if (text.empty()) throw bad();
    auto digits_ok = [](std::string_view s, bool allow_sign) {
      if (s.empty()) return false;
      std::size_t i = 0;
      if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
      if (i == s.size()) return false;
      for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
      }
      return true;
    };
    const auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den =
        slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!digits_ok(num, true) || !digits_ok(den, false)) throw bad();
    std::string num_s(num);
    if (!num_s.empty() && num_s[0] == '+') num_s.erase(0, 1);
    mpz_class n(num_s, 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) throw bad();
    mpq_class q(n, d);
    q.canonicalize();
    return Rational(std::move(q));
  }

  const mpq_class& raw() const noexcept { return value_; }
  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }

  bool is_zero() const noexcept { return sgn(value_) == 0; }
  bool is_integer() const { return value_.get_den() == 1; }
  int sign() const noexcept { return sgn(value_); }
  double to_double() const { return value_.get_d(); }

  std::string to_string() const {
    if (is_integer()) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
  }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
  }

 private:
  mpq_class value_{0};
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline mpz_class lcm(const mpz_class& a, const mpz_class& b) {
  mpz_class out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

}  // namespace stpath
