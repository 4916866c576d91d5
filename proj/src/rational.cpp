#include "ibnls/rational.hpp"

#include <boost/multiprecision/integer.hpp>

#include <sstream>

namespace ibnls {

namespace {

void normalize(BigInt& num, BigInt& den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num == 0) {
        den = 1;
        return;
    }
    BigInt g = boost::multiprecision::gcd(num < 0 ? BigInt(-num) : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

}  // namespace

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    normalize(num_, den_);
}

Rational reduce(const BigInt& num, const BigInt& den) { return Rational(num, den); }

Rational Rational::operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational& Rational::operator+=(const Rational& o) {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ *= o.den_;
    normalize(num_, den_);
    return *this;
}

Rational& Rational::operator-=(const Rational& o) {
    num_ = num_ * o.den_ - o.num_ * den_;
    den_ *= o.den_;
    normalize(num_, den_);
    return *this;
}

Rational& Rational::operator*=(const Rational& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    normalize(num_, den_);
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
    num_ *= o.den_;
    den_ *= o.num_;
    normalize(num_, den_);
    return *this;
}

BigInt Rational::floor() const {
    BigInt q = num_ / den_;
    if (num_ < 0 && q * den_ != num_) --q;
    return q;
}

BigInt Rational::ceil() const {
    BigInt q = num_ / den_;
    if (num_ > 0 && q * den_ != num_) ++q;
    return q;
}

double Rational::to_double() const {
    return num_.convert_to<double>() / den_.convert_to<double>();
}

std::string Rational::str() const {
    return num_.str() + "/" + den_.str();
}

namespace {

// cpp_int's string constructor treats a leading 0 as an octal prefix; decimal
// strings need it stripped.
BigInt parse_decimal_int(std::string digits) {
    bool neg = false;
    if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
        neg = digits[0] == '-';
        digits.erase(0, 1);
    }
    if (digits.empty()) throw std::invalid_argument("bad integer");
    for (char c : digits)
        if (c < '0' || c > '9') throw std::invalid_argument("bad integer");
    std::size_t nz = digits.find_first_not_of('0');
    digits = nz == std::string::npos ? "0" : digits.substr(nz);
    BigInt v(digits);
    return neg ? BigInt(-v) : v;
}

}  // namespace

Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("Rational: empty string");
    auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            BigInt n = parse_decimal_int(text.substr(0, slash));
            BigInt d = parse_decimal_int(text.substr(slash + 1));
            return Rational(n, d);
        }
        auto dot = text.find('.');
        if (dot == std::string::npos) return Rational(parse_decimal_int(text));
        // Decimal form, converted exactly: "12.345" -> 12345/1000.
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        BigInt n = parse_decimal_int(digits);
        BigInt d(1);
        for (size_t i = dot + 1; i < text.size(); ++i) d *= 10;
        return Rational(n, d);
    } catch (const std::domain_error&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("Rational: cannot parse '" + text + "'");
    }
}

const Rational& ExtendedRational::value() const {
    if (infinite_) throw std::domain_error("ExtendedRational: value of infinity");
    return value_;
}

ExtendedRational ExtendedRational::reciprocal() const {
    if (infinite_) return ExtendedRational(Rational(0));
    if (value_.is_zero()) return infinity();
    return ExtendedRational(Rational(1) / value_);
}

std::string ExtendedRational::str() const { return infinite_ ? "inf" : value_.str(); }

ExtendedRational ExtendedRational::parse(const std::string& text) {
    if (text == "inf") return infinity();
    return ExtendedRational(Rational::parse(text));
}

std::string SlackRational::str() const {
    if (eps_.is_zero()) return base_.str();
    std::ostringstream out;
    out << base_.str();
    Rational k = eps_;
    if (k.is_negative()) {
        out << "-";
        k = -k;
    } else {
        out << "+";
    }
    if (k.is_integer())
        out << k.num().str();
    else
        out << k.str();
    out << "eps";
    return out.str();
}

SlackRational SlackRational::parse(const std::string& text) {
    auto eps_pos = text.rfind("eps");
    if (eps_pos == std::string::npos || eps_pos + 3 != text.size())
        return SlackRational(Rational::parse(text));
    // Split base and coefficient at the sign that follows the base's denominator.
    std::string head = text.substr(0, eps_pos);
    // Scan from position 1 so a leading minus on the base is not a split point.
    size_t split = std::string::npos;
    int depth = 0;  // counts how many of num, den we've passed
    for (size_t i = 1; i < head.size(); ++i) {
        char c = head[i];
        if (c == '/') depth++;
        if ((c == '+' || c == '-') && depth >= 1) {
            split = i;
            break;
        }
    }
    if (split == std::string::npos)
        throw std::invalid_argument("SlackRational: cannot parse '" + text + "'");
    Rational base = Rational::parse(head.substr(0, split));
    std::string coeff = head.substr(split);
    if (coeff == "+") coeff = "1";
    if (coeff == "-") coeff = "-1";
    if (!coeff.empty() && coeff[0] == '+') coeff = coeff.substr(1);
    return SlackRational(base, Rational::parse(coeff));
}

Ordering cmp_slack(const SlackRational& x, const SlackRational& y) {
    if (x < y) return Ordering::Less;
    if (y < x) return Ordering::Greater;
    return Ordering::Equal;
}

SlackRational interval_pick(const SlackRational& lo, const SlackRational& hi) {
    if (!(lo < hi)) throw std::domain_error("interval_pick: empty interval");
    if (lo.base() != hi.base())
        return SlackRational((lo.base() + hi.base()) / Rational(2));
    Rational bumped = lo.eps() + Rational(1);
    if (bumped < hi.eps()) return SlackRational(lo.base(), bumped);
    return SlackRational(lo.base(), (lo.eps() + hi.eps()) / Rational(2));
}

}  // namespace ibnls
