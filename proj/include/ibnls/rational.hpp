#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ibnls {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number. Always stored reduced with a positive denominator.
/// Arithmetic never overflows (arbitrary-precision integers underneath).
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
    Rational(BigInt n) : num_(std::move(n)), den_(1) {}
    Rational(BigInt num, BigInt den);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_integer() const { return den_ == 1; }

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    // Exact comparison via cross multiplication (denominators positive).
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    /// Largest integer <= value.
    BigInt floor() const;
    /// Smallest integer >= value.
    BigInt ceil() const;

    double to_double() const;

    /// Canonical text form "num/den" (denominator always printed).
    std::string str() const;

    /// Parses "num/den", a bare integer, or a decimal string such as "0.25"
    /// (converted exactly with a power-of-ten denominator).
    static Rational parse(const std::string& text);

  private:
    BigInt num_;
    BigInt den_;
};

/// The reduction map (num, den) -> canonical representative.
Rational reduce(const BigInt& num, const BigInt& den);

inline Rational rat(long long n, long long d) { return Rational(BigInt(n), BigInt(d)); }

/// A rational or +infinity. Reciprocal exchanges 0 and infinity.
class ExtendedRational {
  public:
    ExtendedRational() : infinite_(false), value_() {}
    ExtendedRational(Rational v) : infinite_(false), value_(std::move(v)) {}
    static ExtendedRational infinity() {
        ExtendedRational e;
        e.infinite_ = true;
        return e;
    }

    bool is_infinite() const { return infinite_; }
    const Rational& value() const;

    /// 1/x with the conventions 1/inf = 0 and 1/0 = inf.
    ExtendedRational reciprocal() const;

    friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }
    friend bool operator!=(const ExtendedRational& a, const ExtendedRational& b) {
        return !(a == b);
    }
    friend bool operator<(const ExtendedRational& a, const ExtendedRational& b) {
        if (a.infinite_) return false;
        if (b.infinite_) return true;
        return a.value_ < b.value_;
    }
    friend bool operator>(const ExtendedRational& a, const ExtendedRational& b) { return b < a; }
    friend bool operator<=(const ExtendedRational& a, const ExtendedRational& b) {
        return !(b < a);
    }
    friend bool operator>=(const ExtendedRational& a, const ExtendedRational& b) {
        return !(a < b);
    }

    std::string str() const;
    static ExtendedRational parse(const std::string& text);

  private:
    bool infinite_;
    Rational value_;
};

/// Rational augmented by a formal infinitesimal eps > 0: value = base + coeff*eps.
/// Ordering is lexicographic on (base, coeff), which is the order induced by
/// evaluating at any sufficiently small eps. Only first order in eps is ever
/// needed; the coefficient is kept rational so that scaling by a Rational stays
/// closed (integer coefficients cover every serialized value in practice).
class SlackRational {
  public:
    SlackRational() = default;
    SlackRational(Rational base) : base_(std::move(base)) {}  // NOLINT: implicit by design
    SlackRational(Rational base, Rational eps) : base_(std::move(base)), eps_(std::move(eps)) {}
    SlackRational(long long n) : base_(n) {}  // NOLINT: implicit by design

    const Rational& base() const { return base_; }
    const Rational& eps() const { return eps_; }
    bool is_exact() const { return eps_.is_zero(); }

    SlackRational operator-() const { return {-base_, -eps_}; }
    friend SlackRational operator+(const SlackRational& a, const SlackRational& b) {
        return {a.base_ + b.base_, a.eps_ + b.eps_};
    }
    friend SlackRational operator-(const SlackRational& a, const SlackRational& b) {
        return {a.base_ - b.base_, a.eps_ - b.eps_};
    }
    friend SlackRational operator*(const Rational& c, const SlackRational& x) {
        return {c * x.base_, c * x.eps_};
    }
    friend SlackRational operator*(const SlackRational& x, const Rational& c) { return c * x; }
    friend SlackRational operator/(const SlackRational& x, const Rational& c) {
        return {x.base_ / c, x.eps_ / c};
    }

    friend bool operator==(const SlackRational& a, const SlackRational& b) {
        return a.base_ == b.base_ && a.eps_ == b.eps_;
    }
    friend bool operator!=(const SlackRational& a, const SlackRational& b) { return !(a == b); }
    friend bool operator<(const SlackRational& a, const SlackRational& b) {
        if (a.base_ != b.base_) return a.base_ < b.base_;
        return a.eps_ < b.eps_;
    }
    friend bool operator>(const SlackRational& a, const SlackRational& b) { return b < a; }
    friend bool operator<=(const SlackRational& a, const SlackRational& b) { return !(b < a); }
    friend bool operator>=(const SlackRational& a, const SlackRational& b) { return !(a < b); }

    /// "num/den" when exact, otherwise "num/den+keps" / "num/den-keps"
    /// with k printed as an integer when it is one ("3/2+1eps").
    std::string str() const;
    static SlackRational parse(const std::string& text);

  private:
    Rational base_;
    Rational eps_;
};

enum class Ordering { Less, Equal, Greater };

/// Lexicographic comparison on (base, eps coefficient).
Ordering cmp_slack(const SlackRational& x, const SlackRational& y);

/// Deterministic interior point of the open slack interval (lo, hi).
/// Distinct bases: midpoint of the bases, no eps. Equal bases: eps coefficient
/// lo.eps + 1 when that is still interior, otherwise the eps midpoint.
/// Throws std::domain_error when lo >= hi.
SlackRational interval_pick(const SlackRational& lo, const SlackRational& hi);

}  // namespace ibnls
