#include "ibnls/admissible.hpp"

#include "ibnls/classify.hpp"

namespace ibnls {

ExponentPair::ExponentPair(ExtendedRational p_, Rational q_) : p(std::move(p_)), q(std::move(q_)) {
    if (!p.is_infinite() && p.value() < Rational(2))
        throw std::invalid_argument("ExponentPair: p must lie in [2, inf]");
    if (q < Rational(2)) throw std::invalid_argument("ExponentPair: q must lie in [2, inf)");
}

PairClass classify_pair(int d, const ExponentPair& pair) {
    PairClass c;
    Rational inv_p =
        pair.p.is_infinite() ? Rational(0) : pair.p.reciprocal().value();
    Rational inv_q = Rational(1) / pair.q;
    Rational half_d = rat(d, 2);
    Rational scaling = Rational(2) * inv_p + Rational(d) * inv_q;
    c.in_A = scaling <= half_d;
    c.in_B = c.in_A && Rational(4) * inv_p + Rational(d) * inv_q == half_d;
    c.in_B0 = c.in_B && (pair.p.is_infinite() || pair.p.value() > Rational(2));
    c.in_S = c.in_A && scaling == half_d;
    return c;
}

Rational gamma_pq(int d, const ExponentPair& pair) {
    Rational inv_p = pair.p.is_infinite() ? Rational(0) : pair.p.reciprocal().value();
    return rat(d, 2) - Rational(4) * inv_p - Rational(d) / pair.q;
}

ExtendedRational holder_dual(const ExtendedRational& p) {
    if (p.is_infinite()) return ExtendedRational(Rational(1));
    const Rational& v = p.value();
    if (v < Rational(1)) throw std::domain_error("holder_dual: p must lie in [1, inf]");
    if (v == Rational(1)) return ExtendedRational::infinity();
    return ExtendedRational(v / (v - Rational(1)));
}

bool embeds(int d, const Rational& s1, const Rational& p1, const Rational& s2,
            const Rational& p2, bool homogeneous) {
    if (p1 <= Rational(1) || p2 <= Rational(1))
        throw std::domain_error("embeds: exponents must lie in (1, inf)");
    if (s2 > s1 || p1 > p2) return false;
    Rational lhs = s1 - Rational(d) / p1;
    Rational rhs = s2 - Rational(d) / p2;
    return homogeneous ? lhs == rhs : lhs >= rhs;
}

bool chain_rule_ok(const Rational& s, const Rational& sigma, const Rational& r,
                   const Rational& p, const ExtendedRational& q) {
    if (r <= Rational(1) || p <= Rational(1)) return false;
    if (!q.is_infinite() && q.value() <= Rational(1)) return false;
    Rational inv_q = q.is_infinite() ? Rational(0) : Rational(1) / q.value();
    if (Rational(1) / r != Rational(1) / p + sigma * inv_q) return false;
    if (is_even_integer(sigma)) return true;
    return sigma >= Rational(s.ceil() - 1);
}

bool product_rule_ok(const Rational& r, const ExtendedRational& r1, const Rational& p1,
                     const Rational& r2, const ExtendedRational& p2) {
    if (r <= Rational(1) || r2 <= Rational(1) || p1 <= Rational(1)) return false;
    if (!r1.is_infinite() && r1.value() <= Rational(1)) return false;
    if (!p2.is_infinite() && p2.value() <= Rational(1)) return false;
    Rational inv_r1 = r1.is_infinite() ? Rational(0) : Rational(1) / r1.value();
    Rational inv_p2 = p2.is_infinite() ? Rational(0) : Rational(1) / p2.value();
    Rational inv_r = Rational(1) / r;
    return inv_r == inv_r1 + Rational(1) / p1 && inv_r == Rational(1) / r2 + inv_p2;
}

WeightWindow weight_window(int d, const Rational& r, const Rational& s, const Rational& b) {
    if (r <= Rational(1)) throw std::domain_error("weight_window: r must lie in (1, inf)");
    if (s.is_negative() || !(b > Rational(0)))
        throw std::domain_error("weight_window: need s >= 0 and b > 0");
    WeightWindow w;
    Rational d_over_r = Rational(d) / r;
    w.local_ok = b + s < d_over_r;
    w.exterior_ok = b + s > d_over_r;
    return w;
}

}  // namespace ibnls
