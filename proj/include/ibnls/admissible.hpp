#pragma once

#include "ibnls/rational.hpp"

namespace ibnls {

/// A space-time Lebesgue pair: time exponent p in [2, inf], space exponent
/// q in [2, inf).
struct ExponentPair {
    ExtendedRational p;
    Rational q;

    ExponentPair() : p(Rational(2)), q(2) {}
    ExponentPair(ExtendedRational p_, Rational q_);
};

struct PairClass {
    bool in_A = false;   // 2/p + d/q <= d/2
    bool in_B = false;   // in_A and 4/p + d/q = d/2
    bool in_B0 = false;  // in_B and p > 2
    bool in_S = false;   // in_A and 2/p + d/q = d/2
};

/// Exact class membership of a pair in dimension d.
PairClass classify_pair(int d, const ExponentPair& pair);

/// gamma_{p,q} = d/2 - 4/p - d/q.
Rational gamma_pq(int d, const ExponentPair& pair);

/// Dual exponent: 1/p + 1/p' = 1. Requires p in [1, inf].
ExtendedRational holder_dual(const ExtendedRational& p);

/// Sobolev embedding H^{s1}_{p1} -> H^{s2}_{p2} (nonhomogeneous) or
/// Hdot^{s1}_{p1} -> Hdot^{s2}_{p2} (homogeneous). Requires 1 < p1, p2 < inf.
bool embeds(int d, const Rational& s1, const Rational& p1, const Rational& s2,
            const Rational& p2, bool homogeneous);

/// Exponent-level hypotheses for || |u|^sigma u ||_{Hdot^s_r} <~ ||u||_{L^q}^sigma ||u||_{Hdot^s_p}:
/// the Hoelder splitting 1/r = 1/p + sigma/q in range, and either sigma an
/// even integer or sigma >= ceil(s) - 1.
bool chain_rule_ok(const Rational& s, const Rational& sigma, const Rational& r,
                   const Rational& p, const ExtendedRational& q);

/// Exponent-level hypotheses of the fractional product rule:
/// 1/r = 1/r1 + 1/p1 = 1/r2 + 1/p2 with 1 < r, r2, p1 < inf and 1 < r1, p2 <= inf.
bool product_rule_ok(const Rational& r, const ExtendedRational& r1, const Rational& p1,
                     const Rational& r2, const ExtendedRational& p2);

struct WeightWindow {
    bool local_ok = false;     // cutoff piece chi(x)|x|^{-b} lies in Hdot^s_r
    bool exterior_ok = false;  // (1 - chi(x))|x|^{-b} lies in Hdot^s_r
};

/// Integrability windows for the singular weight: local_ok iff b + s < d/r,
/// exterior_ok iff b + s > d/r. The boundary belongs to neither.
WeightWindow weight_window(int d, const Rational& r, const Rational& s, const Rational& b);

}  // namespace ibnls
