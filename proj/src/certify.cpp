#include "ibnls/certify.hpp"

#include <boost/multiprecision/integer.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>

namespace ibnls {

using ordered_json = nlohmann::ordered_json;

std::string rel_str(Rel r) {
    switch (r) {
        case Rel::LT: return "<";
        case Rel::LE: return "<=";
        case Rel::EQ: return "=";
        case Rel::GE: return ">=";
        case Rel::GT: return ">";
    }
    return "?";
}

Rel rel_parse(const std::string& s) {
    if (s == "<") return Rel::LT;
    if (s == "<=") return Rel::LE;
    if (s == "=") return Rel::EQ;
    if (s == ">=") return Rel::GE;
    if (s == ">") return Rel::GT;
    throw std::invalid_argument("unknown relation '" + s + "'");
}

bool rel_holds(const SlackRational& lhs, Rel rel, const SlackRational& rhs) {
    switch (rel) {
        case Rel::LT: return lhs < rhs;
        case Rel::LE: return lhs <= rhs;
        case Rel::EQ: return lhs == rhs;
        case Rel::GE: return lhs >= rhs;
        case Rel::GT: return lhs > rhs;
    }
    return false;
}

namespace {

const Rational kZero(0);
const Rational kOne(1);
const Rational kTwo(2);
const Rational kHalf = rat(1, 2);

/// Accumulates exact lower/upper bounds for one scalar pick. Strict bounds are
/// tightened by one unit of eps so that interval_pick can never land on an
/// excluded endpoint.
class Window {
  public:
    void ge(const SlackRational& v) { raise_lo(v); }
    void gt(const SlackRational& v) { raise_lo({v.base(), v.eps() + kOne}); }
    void le(const SlackRational& v) { lower_hi(v); }
    void lt(const SlackRational& v) { lower_hi({v.base(), v.eps() - kOne}); }

    std::optional<SlackRational> pick() const {
        if (!lo_ || !hi_) return std::nullopt;
        if (*lo_ > *hi_) return std::nullopt;
        if (*lo_ == *hi_) return *lo_;
        return interval_pick(*lo_, *hi_);
    }

    const std::optional<SlackRational>& lo() const { return lo_; }

  private:
    void raise_lo(const SlackRational& v) {
        if (!lo_ || v > *lo_) lo_ = v;
    }
    void lower_hi(const SlackRational& v) {
        if (!hi_ || v < *hi_) hi_ = v;
    }
    std::optional<SlackRational> lo_, hi_;
};

Rational pick_exact(const Window& w, const std::string& what) {
    auto v = w.pick();
    if (!v) throw InfeasibleError("empty window for " + what);
    if (!v->is_exact())
        throw InfeasibleError("window for " + what + " admits no exact rational");
    return v->base();
}

Rational inv_p(const ExponentPair& pr) {
    return pr.p.is_infinite() ? kZero : kOne / pr.p.value();
}
Rational inv_q(const ExponentPair& pr) { return kOne / pr.q; }

/// Builds a pair from the reciprocal of its space exponent using the relation
/// 4/p + d/q = d/2 that defines the biharmonic-admissible family.
ExponentPair pair_from_uq_b0(int d, const Rational& uq) {
    if (!(uq > kZero)) throw InfeasibleError("pair construction: 1/q must be positive");
    Rational up = (rat(d, 2) - Rational(d) * uq) / Rational(4);
    ExtendedRational p =
        up.is_zero() ? ExtendedRational::infinity() : ExtendedRational(kOne / up);
    return ExponentPair(p, kOne / uq);
}

ExponentPair pair_from_parts(const Rational& up, const Rational& uq) {
    ExtendedRational p =
        up.is_zero() ? ExtendedRational::infinity() : ExtendedRational(kOne / up);
    return ExponentPair(p, kOne / uq);
}

/// Row sink shared by the builders (which demand every row to hold) and the
/// verifier (which only records).
class Rows {
  public:
    explicit Rows(std::vector<Constraint>* out) : out_(out) {}

    void add(const std::string& label, const SlackRational& lhs, Rel rel,
             const SlackRational& rhs) {
        Constraint c{label, lhs, rel, rhs, rel_holds(lhs, rel, rhs)};
        if (!c.satisfied) all_ok_ = false;
        if (out_) out_->push_back(std::move(c));
    }
    void fail(const std::string& label) { add(label, kZero, Rel::EQ, kOne); }

    bool all_ok() const { return all_ok_; }

  private:
    std::vector<Constraint>* out_;
    bool all_ok_ = true;
};

/// Read-only view of a sub-certificate used while emitting rows; missing names
/// become failing rows instead of exceptions so tampered certificates still
/// produce a report.
struct SubView {
    const SubCertificate& sub;

    const ExponentPair* pair(const std::string& name, Rows& rows) const {
        auto it = sub.pairs.find(name);
        if (it == sub.pairs.end()) {
            rows.fail("missing pair " + name);
            return nullptr;
        }
        return &it->second;
    }
    /// Reciprocal of a stored auxiliary exponent.
    std::optional<Rational> inv_aux(const std::string& name, Rows& rows) const {
        auto it = sub.aux.find(name);
        if (it == sub.aux.end()) {
            rows.fail("missing aux " + name);
            return std::nullopt;
        }
        const SlackRational& v = it->second;
        if (!v.is_exact() || !(v.base() > kZero)) {
            rows.fail("aux " + name + " is not a positive rational");
            return std::nullopt;
        }
        return kOne / v.base();
    }
};

void emit_class_rows(int d, const std::string& name, const ExponentPair& pr,
                     const std::string& cls, Rows& rows) {
    Rational up = inv_p(pr);
    Rational uq = inv_q(pr);
    Rational half_d = rat(d, 2);
    std::string tag = "pair " + name + " in " + cls + ": ";
    rows.add(tag + "q >= 2", uq, Rel::LE, kHalf);
    rows.add(tag + "q < inf", uq, Rel::GT, kZero);
    if (cls == "A") {
        rows.add(tag + "p >= 2", up, Rel::LE, kHalf);
        rows.add(tag + "2/p+d/q <= d/2", kTwo * up + Rational(d) * uq, Rel::LE, half_d);
    } else if (cls == "B0") {
        rows.add(tag + "p > 2", up, Rel::LT, kHalf);
        rows.add(tag + "4/p+d/q = d/2", Rational(4) * up + Rational(d) * uq, Rel::EQ, half_d);
    } else if (cls == "S") {
        rows.add(tag + "p >= 2", up, Rel::LE, kHalf);
        rows.add(tag + "2/p+d/q = d/2", kTwo * up + Rational(d) * uq, Rel::EQ, half_d);
    }
}

void emit_regularity_row(const std::string& label, const Rational& sigma,
                         const Rational& sobolev_index, Rows& rows) {
    if (is_even_integer(sigma)) return;
    rows.add(label, sigma, Rel::GE, Rational(sobolev_index.ceil() - 1));
}

void emit_theta_rows(const std::string& who, const SlackRational& stored,
                     const SlackRational& recomputed, Rows& rows) {
    rows.add(who + " theta definition", stored, Rel::EQ, recomputed);
    rows.add(who + " theta > 0", stored, Rel::GT, kZero);
}

// ---------------------------------------------------------------------------
// Sobolev-level estimate (family 3.2), local weight piece
// ---------------------------------------------------------------------------

void emit_32_local(const ParamSet& P, const SubCertificate& sub, Rows& rows) {
    SubView v{sub};
    const int d = P.d;
    const Rational &s = P.s, &b = P.b, &sg = P.sigma;
    Rational half_d = rat(d, 2);
    Rational bd = b / Rational(d);

    if (sub.case_tag == "s_lt_half_d") {
        rows.add("case: s < d/2", s, Rel::LT, half_d);
        const ExponentPair* a1 = v.pair("a1", rows);
        const ExponentPair* p1 = v.pair("p1", rows);
        if (!a1 || !p1) return;
        emit_class_rows(d, "a1", *a1, "A", rows);
        emit_class_rows(d, "p1", *p1, "B0", rows);

        Rational xa = Rational(4) * inv_p(*a1);  // 4/a1
        Rational tb = Rational(d) * inv_q(*a1);  // d/b1
        Rational g1 = xa + tb - half_d;          // gamma_{a1',b1'} + 4
        Rational inv_b1p = kOne - inv_q(*a1);    // 1/b1'
        Rational inv_a1p = kOne - inv_p(*a1);    // 1/a1'
        Rational uq1 = inv_q(*p1);
        Rational up1 = inv_p(*p1);
        Rational sd = s / Rational(d);

        rows.add("(3.4)(1) local weight window",
                 inv_b1p - sg * (uq1 - sd) - (uq1 - g1 / Rational(d)), Rel::GT, bd);
        rows.add("(3.4)(2) time gap", inv_a1p - (sg + kOne) * up1, Rel::GT, kZero);
        rows.add("(3.4)(3) embedding into L^alpha1", uq1, Rel::GT, sd);
        rows.add("(3.4)(4) s - gamma' - 4 >= 0", s - g1, Rel::GE, kZero);
        rows.add("(3.4)(5) gamma' + 4 >= 0", g1, Rel::GE, kZero);

        auto ua1v = v.inv_aux("alpha1", rows);
        auto ub1v = v.inv_aux("beta1", rows);
        auto ur1v = v.inv_aux("r1", rows);
        auto ug1v = v.inv_aux("gamma1", rows);
        auto urb1v = v.inv_aux("rbar1", rows);
        auto ugb1v = v.inv_aux("gammabar1", rows);
        if (ua1v) rows.add("(3.5) alpha1", *ua1v, Rel::EQ, uq1 - sd);
        if (ub1v) rows.add("(3.5) beta1", *ub1v, Rel::EQ, uq1 - g1 / Rational(d));
        if (ur1v && ua1v && ub1v)
            rows.add("(3.5) r1", *ur1v, Rel::EQ, sg * (*ua1v) + *ub1v);
        if (ug1v && ur1v) rows.add("(3.5) gamma1", *ug1v, Rel::EQ, inv_b1p - *ur1v);
        if (urb1v && ua1v) rows.add("(3.5) rbar1", *urb1v, Rel::EQ, sg * (*ua1v));
        if (ugb1v && urb1v)
            rows.add("(3.5) gammabar1", *ugb1v, Rel::EQ, inv_b1p - *urb1v);

        emit_regularity_row("(3.7) regularity: sigma >= ceil(s-gamma'-4)-1", sg, s - g1, rows);
        emit_theta_rows("(3.4)", sub.theta, SlackRational(inv_a1p - (sg + kOne) * up1), rows);

        if (sub.branch == "case1 1<s<d/2: 4/a1=2, d/b1=d/2-1") {
            rows.add("branch choice 4/a1 = 2", xa, Rel::EQ, kTwo);
            rows.add("branch choice d/b1 = d/2-1", tb, Rel::EQ, half_d - kOne);
            rows.add("(3.10) lower: b+s-d/2 < 4/a1", SlackRational(b + s - half_d), Rel::LT, xa);
            rows.add("(3.10) lower: d/2-d/b1 < 4/a1", SlackRational(half_d - tb), Rel::LT, xa);
            rows.add("(3.10) lower: b-2+(d-2s-4)sigma/2 < 4/a1",
                     SlackRational(b - kTwo +
                                   (Rational(d) - kTwo * s - Rational(4)) * sg / kTwo),
                     Rel::LT, xa);
            rows.add("(3.10) upper: 4/a1 <= d-2d/b1", xa, Rel::LE, Rational(d) - kTwo * tb);
            rows.add("(3.10) upper: 4/a1 <= s+d/2-d/b1", xa, Rel::LE, s + half_d - tb);
        } else if (sub.branch == "case1 0<=s<=1: 4/a1=s+d/2-d/b1, d/b1 from (3.13)") {
            rows.add("branch choice 4/a1 = s+d/2-d/b1", xa, Rel::EQ, s + half_d - tb);
            rows.add("(3.13) s-2+d/2 <= d/b1", SlackRational(s - kTwo + half_d), Rel::LE, tb);
            rows.add("(3.13) d/b1 <= (d-2s)/2", tb, Rel::LE, (Rational(d) - kTwo * s) / kTwo);
            rows.add("(3.13) 0 < d/b1", SlackRational(kZero), Rel::LT, tb);
            rows.add("(3.13) d/b1 < d-b", tb, Rel::LT, Rational(d) - b);
            rows.add("(3.13) d/b1 < d/2", tb, Rel::LT, half_d);
            rows.add("(3.13) d/b1 < (2s+d-2b+4)/2-(d-2s-4)sigma/2", tb, Rel::LT,
                     (kTwo * s + Rational(d) - kTwo * b + Rational(4)) / kTwo -
                         (Rational(d) - kTwo * s - Rational(4)) * sg / kTwo);
        } else {
            rows.fail("unknown branch '" + sub.branch + "'");
        }
        return;
    }

    if (sub.case_tag != "s_ge_half_d") {
        rows.fail("unknown case tag '" + sub.case_tag + "'");
        return;
    }
    rows.add("case: s >= d/2", s, Rel::GE, half_d);
    const ExponentPair* a1 = v.pair("a1", rows);
    const ExponentPair* p1 = v.pair("p1", rows);
    if (!a1 || !p1) return;
    emit_class_rows(d, "a1", *a1, "S", rows);
    emit_class_rows(d, "p1", *p1, "B0", rows);
    rows.add("(p1,q1) = (inf,2): q1 = 2", inv_q(*p1), Rel::EQ, kHalf);

    Rational two_over_a1 = kTwo * inv_p(*a1);
    Rational stilde = s - two_over_a1;  // s - gamma_{a1',b1'} - 4 on the S line
    Rational inv_b1 = inv_q(*a1);
    Rational inv_b1p = kOne - inv_b1;
    Rational inv_a1p = kOne - inv_p(*a1);
    Rational bd2 = b / Rational(d);

    auto ua = v.inv_aux("alpha1", rows);
    auto uab = v.inv_aux("alphabar1", rows);
    auto ub = v.inv_aux("beta1", rows);
    auto ur1 = v.inv_aux("r1", rows);
    auto ug1 = v.inv_aux("gamma1", rows);
    auto urb1 = v.inv_aux("rbar1", rows);
    auto ugb1 = v.inv_aux("gammabar1", rows);
    if (ua) {
        rows.add("(3.32) alpha1 >= 2", *ua, Rel::LE, kHalf);
        rows.add("(3.32) alpha1 < inf", *ua, Rel::GT, kZero);
    }
    if (uab) {
        rows.add("(3.32) alphabar1 >= 2", *uab, Rel::LE, kHalf);
        rows.add("(3.32) alphabar1 < inf", *uab, Rel::GT, kZero);
    }
    if (ub) {
        rows.add("(3.32) beta1 >= 2", *ub, Rel::LE, kHalf);
        rows.add("(3.32) beta1 <= b1", *ub, Rel::GE, inv_b1);
    }
    if (ua && ub)
        rows.add("(3.32) local weight window (Lebesgue factor)",
                 inv_b1p - sg * (*ua) - *ub, Rel::GT, bd2);
    if (uab)
        rows.add("(3.32) local weight window (Sobolev factor)",
                 inv_b1p - (sg + kOne) * (*uab), Rel::GT,
                 (b + stilde) / Rational(d));
    if (ur1 && ua && ub) rows.add("(3.34) r1", *ur1, Rel::EQ, sg * (*ua) + *ub);
    if (ug1 && ur1) rows.add("(3.34) gamma1", *ug1, Rel::EQ, inv_b1p - *ur1);
    if (urb1 && uab) rows.add("(3.34) rbar1", *urb1, Rel::EQ, (sg + kOne) * (*uab));
    if (ugb1 && urb1) rows.add("(3.34) gammabar1", *ugb1, Rel::EQ, inv_b1p - *urb1);
    rows.add("s - 2/a1 >= 0", stilde, Rel::GE, kZero);
    rows.add("(3.36)/(3.37) feasibility: 2/b1 < 3/2 - (b+s)/d", kTwo * inv_b1, Rel::LT,
             rat(3, 2) - (b + s) / Rational(d));
    emit_regularity_row("(3.35) regularity: sigma >= ceil(s-2/a1)-1", sg, stilde, rows);
    emit_theta_rows("(3.33)", sub.theta, SlackRational(inv_a1p), rows);

    if (sub.branch == "case2: b1=2d/(d-2)") {
        rows.add("branch choice d/b1 = d/2-1", Rational(d) * inv_b1, Rel::EQ, half_d - kOne);
    } else if (sub.branch == "case2: d/b1 from small window") {
        rows.add("branch: d <= 2", Rational(d), Rel::LE, kTwo);
        rows.add("branch: ceil(s-d/2+d/b1) = floor(s-d/2)+1",
                 Rational(d) * inv_b1, Rel::LE,
                 Rational((s - half_d).floor() + 1) - (s - half_d));
    } else {
        rows.fail("unknown branch '" + sub.branch + "'");
    }
}

SubCertificate build_32_local(const ParamSet& P) {
    const int d = P.d;
    const Rational &s = P.s, &b = P.b, &sg = P.sigma;
    Rational half_d = rat(d, 2);

    SubCertificate sub;
    sub.lemma = "3.2";
    sub.piece = "local";

    if (s < half_d) {
        sub.case_tag = "s_lt_half_d";
        Rational xa, tb;  // 4/a1, d/b1
        if (s > kOne) {
            sub.branch = "case1 1<s<d/2: 4/a1=2, d/b1=d/2-1";
            xa = kTwo;
            tb = half_d - kOne;
        } else {
            sub.branch = "case1 0<=s<=1: 4/a1=s+d/2-d/b1, d/b1 from (3.13)";
            Window w;
            w.ge(s - kTwo + half_d);
            w.le((Rational(d) - kTwo * s) / kTwo);
            w.gt(kZero);
            w.lt(Rational(d) - b);
            w.lt(half_d);
            w.lt((kTwo * s + Rational(d) - kTwo * b + Rational(4)) / kTwo -
                 (Rational(d) - kTwo * s - Rational(4)) * sg / kTwo);
            tb = pick_exact(w, "d/b1 ((3.13))");
            xa = s + half_d - tb;
        }
        ExponentPair a1 = pair_from_parts(xa / Rational(4), tb / Rational(d));
        Rational g1 = xa + tb - half_d;
        Rational inv_a1p = kOne - inv_p(a1);

        // (3.8): the window for 1/q1.
        Window wq;
        wq.gt(rat(d - 4, 2 * d));
        wq.gt(s / Rational(d));
        wq.gt(kHalf - (Rational(4) / Rational(d)) * inv_a1p / (sg + kOne));
        wq.lt(kHalf);
        wq.lt(s / Rational(d) +
              (kHalf - (b + s) / Rational(d) + xa / Rational(d)) / (sg + kOne));
        Rational uq1 = pick_exact(wq, "1/q1 ((3.8))");
        ExponentPair p1 = pair_from_uq_b0(d, uq1);

        sub.pairs = {{"a1", a1}, {"p1", p1}};
        Rational ualpha1 = uq1 - s / Rational(d);
        Rational ubeta1 = uq1 - g1 / Rational(d);
        Rational ur1 = sg * ualpha1 + ubeta1;
        Rational inv_b1p = kOne - inv_q(a1);
        Rational ugamma1 = inv_b1p - ur1;
        Rational urbar1 = sg * ualpha1;
        Rational ugammabar1 = inv_b1p - urbar1;
        sub.aux = {{"alpha1", SlackRational(kOne / ualpha1)},
                   {"beta1", SlackRational(kOne / ubeta1)},
                   {"r1", SlackRational(kOne / ur1)},
                   {"gamma1", SlackRational(kOne / ugamma1)},
                   {"rbar1", SlackRational(kOne / urbar1)},
                   {"gammabar1", SlackRational(kOne / ugammabar1)}};
        sub.theta = SlackRational(inv_a1p - (sg + kOne) * inv_p(p1));
    } else {
        sub.case_tag = "s_ge_half_d";
        Rational tb;  // d/b1
        if (d >= 3) {
            sub.branch = "case2: b1=2d/(d-2)";
            tb = half_d - kOne;
        } else {
            sub.branch = "case2: d/b1 from small window";
            Window w;
            w.gt(kZero);
            w.le(Rational((s - half_d).floor() + 1) - (s - half_d));
            w.lt((rat(3 * d, 2) - b - s) / kTwo);
            w.lt(half_d);
            tb = pick_exact(w, "d/b1 (case 2, d<=2)");
        }
        Rational inv_b1 = tb / Rational(d);
        Rational inv_a1 = (half_d - tb) / kTwo;  // from 2/a1 = d/2 - d/b1
        ExponentPair a1 = pair_from_parts(inv_a1, inv_b1);
        ExponentPair p1(ExtendedRational::infinity(), kTwo);

        Rational inv_b1p = kOne - inv_b1;
        Rational bd = b / Rational(d);
        // beta1 := b1; then the Lebesgue factor window for sigma/alpha1.
        Rational ubeta1 = inv_b1;
        Window wa;
        wa.gt(kZero);
        wa.le(sg / kTwo);
        wa.lt(inv_b1p - bd - ubeta1);
        Rational sa = pick_exact(wa, "sigma/alpha1 ((3.36))");
        Rational ualpha1 = sa / sg;

        Rational stilde = s - kTwo * inv_a1;
        Window wab;
        wab.gt(kZero);
        wab.le((sg + kOne) / kTwo);
        wab.lt(rat(3, 2) - (b + s) / Rational(d) - kTwo * inv_b1);
        Rational sab = pick_exact(wab, "(sigma+1)/alphabar1 ((3.37))");
        Rational ualphabar1 = sab / (sg + kOne);

        Rational ur1 = sg * ualpha1 + ubeta1;
        Rational ugamma1 = inv_b1p - ur1;
        Rational urbar1 = (sg + kOne) * ualphabar1;
        Rational ugammabar1 = inv_b1p - urbar1;
        sub.pairs = {{"a1", a1}, {"p1", p1}};
        sub.aux = {{"alpha1", SlackRational(kOne / ualpha1)},
                   {"alphabar1", SlackRational(kOne / ualphabar1)},
                   {"beta1", SlackRational(kOne / ubeta1)},
                   {"r1", SlackRational(kOne / ur1)},
                   {"gamma1", SlackRational(kOne / ugamma1)},
                   {"rbar1", SlackRational(kOne / urbar1)},
                   {"gammabar1", SlackRational(kOne / ugammabar1)}};
        sub.theta = SlackRational(kOne - inv_p(a1));
    }

    Rows rows(&sub.constraints);
    emit_32_local(P, sub, rows);
    if (!rows.all_ok()) {
        for (const auto& c : sub.constraints)
            if (!c.satisfied)
                throw InfeasibleError("3.2 local: row failed at build time: " + c.label);
    }
    return sub;
}

// ---------------------------------------------------------------------------
// Sobolev-level estimate (family 3.2), exterior weight piece
// ---------------------------------------------------------------------------

void emit_32_exterior(const ParamSet& P, const SubCertificate& sub, Rows& rows) {
    SubView v{sub};
    const int d = P.d;
    const Rational &s = P.s, &b = P.b, &sg = P.sigma;
    Rational half_d = rat(d, 2);
    Rational bd = b / Rational(d);
    bool case1 = sub.case_tag == "s_lt_half_d";
    if (case1)
        rows.add("case: s < d/2", s, Rel::LT, half_d);
    else if (sub.case_tag == "s_ge_half_d")
        rows.add("case: s >= d/2", s, Rel::GE, half_d);
    else {
        rows.fail("unknown case tag '" + sub.case_tag + "'");
        return;
    }
    const char* sys = case1 ? "(3.15)" : "(3.38)";

    const ExponentPair* a2 = v.pair("a2", rows);
    const ExponentPair* p2 = v.pair("p2", rows);
    const ExponentPair* p3 = v.pair("p3", rows);
    const ExponentPair* p4 = v.pair("p4", rows);
    if (!a2 || !p2 || !p3 || !p4) return;
    emit_class_rows(d, "a2", *a2, "A", rows);
    emit_class_rows(d, "p2", *p2, "B0", rows);
    emit_class_rows(d, "p3", *p3, "B0", rows);
    emit_class_rows(d, "p4", *p4, "B0", rows);

    Rational xa = Rational(4) * inv_p(*a2);
    Rational tb = Rational(d) * inv_q(*a2);
    Rational g2 = xa + tb - half_d;
    Rational stilde = s - g2;
    Rational inv_b2p = kOne - inv_q(*a2);
    Rational inv_a2p = kOne - inv_p(*a2);
    Rational sd = s / Rational(d);
    Rational uq2 = inv_q(*p2), uq3 = inv_q(*p3), uq4 = inv_q(*p4);
    Rational up2 = inv_p(*p2), up3 = inv_p(*p3), up4 = inv_p(*p4);

    auto ualpha2 = v.inv_aux("alpha2", rows);
    auto ubeta2 = v.inv_aux("beta2", rows);
    auto ur2 = v.inv_aux("r2", rows);
    auto ugamma2 = v.inv_aux("gamma2", rows);
    auto ualpha4 = v.inv_aux("alpha4", rows);
    auto ur4 = v.inv_aux("r4", rows);
    auto ugamma4 = v.inv_aux("gamma4", rows);

    std::string S(sys);
    if (ualpha2) {
        if (case1)
            rows.add(S + "(1) 1/q2-s/d <= 1/alpha2", uq2 - sd, Rel::LE, *ualpha2);
        else
            rows.add(S + "(1) 0 < 1/alpha2", kZero, Rel::LT, *ualpha2);
        rows.add(S + "(1) 1/alpha2 <= 1/q2", *ualpha2, Rel::LE, uq2);
    }
    if (ubeta2) {
        rows.add(S + "(1) 1/q3-(gamma'+4)/d <= 1/beta2", uq3 - g2 / Rational(d), Rel::LE,
                 *ubeta2);
        rows.add(S + "(1) 1/beta2 <= 1/q3", *ubeta2, Rel::LE, uq3);
    }
    if (ualpha2 && ubeta2) {
        SlackRational gap = SlackRational(inv_b2p - sg * (*ualpha2) - *ubeta2);
        rows.add(S + "(2) lower: 0 < 1/b2'-sigma/alpha2-1/beta2", kZero, Rel::LT, gap);
        rows.add(S + "(2) upper: ... < b/d", gap, Rel::LT, bd);
    }
    rows.add(S + "(3) time gap for (p2,p3)", inv_a2p - sg * up2 - up3, Rel::GT, kZero);
    if (case1) rows.add(S + "(4) 1/q2 > s/d", uq2, Rel::GT, sd);
    rows.add(S + "(4) 1/q3 > (gamma'+4)/d", uq3, Rel::GT, g2 / Rational(d));
    if (ualpha4) {
        if (case1)
            rows.add(S + "(5) 1/q4-s/d <= 1/alpha4", uq4 - sd, Rel::LE, *ualpha4);
        else
            rows.add(S + "(5) 0 < 1/alpha4", kZero, Rel::LT, *ualpha4);
        rows.add(S + "(5) 1/alpha4 <= 1/q4", *ualpha4, Rel::LE, uq4);
        SlackRational gap = SlackRational(inv_b2p - (sg + kOne) * (*ualpha4));
        rows.add(S + "(6) lower: 0 < 1/b2'-(sigma+1)/alpha4", kZero, Rel::LT, gap);
        rows.add(S + "(6) upper: ... < (b+s-gamma'-4)/d", gap, Rel::LT,
                 (b + stilde) / Rational(d));
    }
    rows.add(S + "(7) time gap for p4", inv_a2p - (sg + kOne) * up4, Rel::GT, kZero);
    if (case1) rows.add(S + "(7) 1/q4 > s/d", uq4, Rel::GT, sd);
    rows.add(S + "(8) s - gamma' - 4 >= 0", stilde, Rel::GE, kZero);
    rows.add(S + "(8) gamma' + 4 >= 0", g2, Rel::GE, kZero);

    if (ur2 && ualpha2 && ubeta2)
        rows.add("(3.16) r2", *ur2, Rel::EQ, sg * (*ualpha2) + *ubeta2);
    if (ugamma2 && ur2) rows.add("(3.16) gamma2", *ugamma2, Rel::EQ, inv_b2p - *ur2);
    if (ur4 && ualpha4) rows.add("(3.16) r4", *ur4, Rel::EQ, (sg + kOne) * (*ualpha4));
    if (ugamma4 && ur4) rows.add("(3.16) gamma4", *ugamma4, Rel::EQ, inv_b2p - *ur4);

    emit_regularity_row("(3.18) regularity: sigma >= ceil(s-gamma'-4)-1", sg, stilde, rows);
    SlackRational theta23(inv_a2p - sg * up2 - up3);
    SlackRational theta4(inv_a2p - (sg + kOne) * up4);
    emit_theta_rows(S, sub.theta, std::min(theta23, theta4), rows);

    if (sub.branch == "explicit (a2,b2)=(2,2d/(d-2))") {
        rows.add("branch choice 4/a2 = 2", xa, Rel::EQ, kTwo);
        rows.add("branch choice d/b2 = d/2-1", tb, Rel::EQ, half_d - kOne);
    } else if (sub.branch == "4/a2=d-2d/b2, d/b2=(b+(d-2s)sigma/2)+") {
        rows.add("branch choice 4/a2 = d-2d/b2", xa, Rel::EQ, Rational(d) - kTwo * tb);
        rows.add("branch: d/b2 > b+(d-2s)sigma/2", tb, Rel::GT,
                 b + (Rational(d) - kTwo * s) * sg / kTwo);
    } else if (sub.branch == "4/a2=d-2d/b2, d/b2=(0)+") {
        rows.add("branch choice 4/a2 = d-2d/b2", xa, Rel::EQ, Rational(d) - kTwo * tb);
        rows.add("branch: d/b2 > 0", tb, Rel::GT, kZero);
    } else if (sub.branch == "4/a2=d-2d/b2, d/b2 from reduced window") {
        rows.add("branch choice 4/a2 = d-2d/b2", xa, Rel::EQ, Rational(d) - kTwo * tb);
    } else if (sub.branch == "grid search (3.29)" || sub.branch == "grid search (3.47)") {
        // the reduced-system rows below cover the search's feasibility predicate
    } else {
        rows.fail("unknown branch '" + sub.branch + "'");
        return;
    }
    // Reduced-system rows shared by every branch.
    rows.add(std::string(case1 ? "(3.29)" : "(3.47)") + " row1 lower: d/b2 > max{0, d/2-b-d sigma/2}",
             tb, Rel::GT, std::max(kZero, half_d - b - Rational(d) * sg / kTwo));
    if (case1) {
        rows.add("(3.29) row1 upper: d/b2 < min{d/2, d-(sigma+1)(d-2s-4)/2}", tb, Rel::LT,
                 std::min(half_d, Rational(d) - (sg + kOne) *
                                                    (Rational(d) - kTwo * s - Rational(4)) /
                                                    kTwo));
        rows.add("(3.29) row2 lower: (d-2s-4)sigma/2-2 < 4/a2",
                 SlackRational((Rational(d) - kTwo * s - Rational(4)) * sg / kTwo - kTwo),
                 Rel::LT, xa);
    } else {
        rows.add("(3.47) row1 upper: d/b2 < d/2", tb, Rel::LT, half_d);
    }
    rows.add(std::string(case1 ? "(3.29)" : "(3.47)") + " row2 upper: 4/a2 < d sigma/2+b+s",
             xa, Rel::LT, Rational(d) * sg / kTwo + b + s);
    rows.add(std::string(case1 ? "(3.29)" : "(3.47)") + " row3: d/2-d/b2 <= 4/a2",
             half_d - tb, Rel::LE, xa);
    rows.add(std::string(case1 ? "(3.29)" : "(3.47)") +
                 " row3: 4/a2 <= min{2, d-2d/b2, s+d/2-d/b2}",
             xa, Rel::LE,
             std::min(kTwo, std::min(Rational(d) - kTwo * tb, s + half_d - tb)));
}

/// Completes the exterior sub-certificate once (4/a2, d/b2) is fixed.
SubCertificate build_32_ext_with(const ParamSet& P, bool case1, const std::string& branch,
                                 const Rational& xa, const Rational& tb) {
    const int d = P.d;
    const Rational &s = P.s, &b = P.b, &sg = P.sigma;
    Rational half_d = rat(d, 2);
    Rational sd = s / Rational(d);
    Rational dr(d);

    SubCertificate sub;
    sub.lemma = "3.2";
    sub.piece = "exterior";
    sub.case_tag = case1 ? "s_lt_half_d" : "s_ge_half_d";
    sub.branch = branch;

    ExponentPair a2 = pair_from_parts(xa / Rational(4), tb / dr);
    Rational g2 = xa + tb - half_d;
    Rational stilde = s - g2;
    Rational inv_b2 = tb / dr;
    Rational inv_b2p = kOne - inv_b2;
    Rational inv_a2p = kOne - xa / Rational(4);
    Rational bd = b / dr;

    Rational uq2, uq3;
    if (case1) {
        // (3.23): window for sigma/q2, then (3.20) for 1/q3.
        Window w2;
        w2.gt(kZero);
        w2.gt(sg * sd);
        w2.gt(sg * rat(d - 4, 2 * d));
        w2.gt(kHalf - inv_b2 - bd);
        w2.gt(sg / kTwo - Rational(4) / dr + xa / dr);
        w2.lt(sg / kTwo);
        w2.lt(sg * sd + xa / dr + kTwo / dr);
        w2.lt(kOne + sg * sd - inv_b2);
        uq2 = pick_exact(w2, "sigma/q2 ((3.23))") / sg;

        Window w3;
        w3.gt(kZero);
        w3.gt(kOne - inv_b2 - bd - sg * uq2);
        w3.gt((sg + kOne) / kTwo - Rational(4) / dr + xa / dr - sg * uq2);
        w3.gt(rat(d - 4, 2 * d));
        w3.gt(-kHalf + xa / dr + inv_b2);
        w3.lt(kHalf);
        w3.lt(kHalf + sg * sd + xa / dr - sg * uq2);
        uq3 = pick_exact(w3, "1/q3 ((3.20))");
    } else {
        // (3.40) for 1/q3 first, then (3.41) for sigma/q2.
        Window w3;
        w3.gt(kZero);
        w3.gt(-kHalf + xa / dr + inv_b2);
        w3.gt(rat(d - 4, 2 * d));
        w3.gt(kOne - inv_b2 - bd - sg / kTwo);
        w3.gt((sg + kOne) / kTwo - Rational(4) / dr + xa / dr - sg / kTwo);
        w3.lt(kHalf);
        w3.lt((sg + kOne) / kTwo - sg * rat(d - 4, 2 * d));
        uq3 = pick_exact(w3, "1/q3 ((3.40))");

        Window w2;
        w2.gt(kZero);
        w2.gt(kOne - inv_b2 - bd - uq3);
        w2.gt((sg + kOne) / kTwo - Rational(4) / dr + xa / dr - uq3);
        w2.gt(sg * rat(d - 4, 2 * d));
        w2.le(sg / kTwo);
        w2.lt((sg + kOne) / kTwo - uq3);
        uq2 = pick_exact(w2, "sigma/q2 ((3.41))") / sg;
    }

    // (3.25)-(3.26) / (3.43)-(3.44): window for (sigma+1)/q4.
    Window w4;
    w4.gt(kHalf - (b + s) / dr + xa / dr);
    w4.gt((sg + kOne) / kTwo - (Rational(4) / dr) * inv_a2p);
    w4.gt((sg + kOne) * rat(d - 4, 2 * d));
    w4.gt(kZero);
    if (case1) w4.gt((sg + kOne) * sd);
    w4.lt((sg + kOne) / kTwo);
    if (case1) w4.lt(kOne - inv_b2 + (sg + kOne) * sd);
    Rational uq4 = pick_exact(w4, "(sigma+1)/q4") / (sg + kOne);

    // alpha2, beta2 via the joint Hoelder sum, then the split.
    Window wt;
    if (case1)
        wt.ge(sg * (uq2 - sd) + uq3 - g2 / dr);
    else
        wt.gt(uq3 - g2 / dr);
    wt.gt(inv_b2p - bd);
    wt.le(sg * uq2 + uq3);
    wt.lt(inv_b2p);
    Rational tsum = pick_exact(wt, "sigma/alpha2+1/beta2 (" +
                                       std::string(case1 ? "(3.15)" : "(3.38)") + "(1,2))");

    Window wb;
    wb.ge(uq3 - g2 / dr);
    wb.le(uq3);
    wb.ge(tsum - sg * uq2);
    if (case1)
        wb.le(tsum - sg * (uq2 - sd));
    else
        wb.lt(tsum);
    Rational ubeta2 = pick_exact(wb, "1/beta2");
    Rational ualpha2 = (tsum - ubeta2) / sg;

    // alpha4.
    Window wa4;
    if (case1)
        wa4.ge(uq4 - sd);
    else
        wa4.gt(kZero);
    wa4.le(uq4);
    wa4.gt((inv_b2p - (b + stilde) / dr) / (sg + kOne));
    wa4.lt(inv_b2p / (sg + kOne));
    Rational ualpha4 = pick_exact(wa4, "1/alpha4");

    ExponentPair p2 = pair_from_uq_b0(d, uq2);
    ExponentPair p3 = pair_from_uq_b0(d, uq3);
    ExponentPair p4 = pair_from_uq_b0(d, uq4);

    Rational ur2 = sg * ualpha2 + ubeta2;
    Rational ugamma2 = inv_b2p - ur2;
    Rational ur4 = (sg + kOne) * ualpha4;
    Rational ugamma4 = inv_b2p - ur4;

    sub.pairs = {{"a2", a2}, {"p2", p2}, {"p3", p3}, {"p4", p4}};
    sub.aux = {{"alpha2", SlackRational(kOne / ualpha2)},
               {"beta2", SlackRational(kOne / ubeta2)},
               {"r2", SlackRational(kOne / ur2)},
               {"gamma2", SlackRational(kOne / ugamma2)},
               {"alpha4", SlackRational(kOne / ualpha4)},
               {"r4", SlackRational(kOne / ur4)},
               {"gamma4", SlackRational(kOne / ugamma4)}};
    SlackRational theta23(inv_a2p - sg * inv_p(p2) - inv_p(p3));
    SlackRational theta4(inv_a2p - (sg + kOne) * inv_p(p4));
    sub.theta = std::min(theta23, theta4);

    Rows rows(&sub.constraints);
    emit_32_exterior(P, sub, rows);
    if (!rows.all_ok()) {
        for (const auto& c : sub.constraints)
            if (!c.satisfied)
                throw InfeasibleError("3.2 exterior: row failed at build time: " + c.label);
    }
    return sub;
}

/// Window for d/b2 under the functional relation 4/a2 = d - 2 d/b2, i.e. the
/// reduced system with 4/a2 eliminated.
Window dbl2_window(const ParamSet& P, bool case1) {
    const int d = P.d;
    const Rational &s = P.s, &b = P.b, &sg = P.sigma;
    Rational half_d = rat(d, 2);
    Window w;
    w.gt(kZero);
    w.gt(half_d - b - Rational(d) * sg / kTwo);
    w.lt(half_d);
    if (case1)
        w.lt(Rational(d) - (sg + kOne) * (Rational(d) - kTwo * s - Rational(4)) / kTwo);
    // row2 under substitution
    w.gt((Rational(d) - Rational(d) * sg / kTwo - b - s) / kTwo);
    if (case1)
        w.lt((Rational(d) + kTwo - (Rational(d) - kTwo * s - Rational(4)) * sg / kTwo) / kTwo);
    // row3 under substitution: 4/a2 <= 2 and 4/a2 <= s+d/2-d/b2
    w.ge((Rational(d) - kTwo) / kTwo);
    w.ge(half_d - s);
    // chain-rule safeguard: keep ceil(s-d/2+d/b2)-1 <= sigma
    if (!is_even_integer(sg))
        w.le(Rational(sg.floor() + 1) - s + half_d);
    return w;
}

namespace {

/// Lexicographic search over the grid {k/(8D)} for a reduced-system point
/// whose downstream construction also succeeds.
SubCertificate grid_search_32_exterior(const ParamSet& P, bool case1) {
    const int d = P.d;
    const Rational &s = P.s, &b = P.b, &sg = P.sigma;
    Rational half_d = rat(d, 2);
    BigInt D = boost::multiprecision::lcm(
        boost::multiprecision::lcm(s.den(), b.den()),
        boost::multiprecision::lcm(sg.den(), BigInt(2)));
    Rational step = Rational(BigInt(1), 8 * D);
    long long imax = (Rational(2) / step).floor().convert_to<long long>();
    long long jmax = (half_d / step).floor().convert_to<long long>();
    std::string branch = case1 ? "grid search (3.29)" : "grid search (3.47)";
    for (long long i = 0; i <= imax; ++i) {
        Rational xa = Rational(i) * step;
        if (!(xa < Rational(d) * sg / kTwo + b + s)) continue;
        if (case1 &&
            !((Rational(d) - kTwo * s - Rational(4)) * sg / kTwo - kTwo < xa))
            continue;
        for (long long j = 0; j <= jmax; ++j) {
            Rational tb = Rational(j) * step;
            if (!(tb > std::max(kZero, half_d - b - Rational(d) * sg / kTwo))) continue;
            Rational tb_hi = half_d;
            if (case1)
                tb_hi = std::min(tb_hi,
                                 Rational(d) - (sg + kOne) *
                                                   (Rational(d) - kTwo * s - Rational(4)) /
                                                   kTwo);
            if (!(tb < tb_hi)) break;
            if (!(half_d - tb <= xa)) continue;
            if (!(xa <= std::min(kTwo, std::min(Rational(d) - kTwo * tb, s + half_d - tb))))
                continue;
            try {
                return build_32_ext_with(P, case1, branch, xa, tb);
            } catch (const InfeasibleError&) {
                continue;
            }
        }
    }
    throw InfeasibleError("3.2 exterior: grid search exhausted");
}

}  // namespace

SubCertificate build_32_exterior(const ParamSet& P) {
    const int d = P.d;
    const Rational &s = P.s, &b = P.b, &sg = P.sigma;
    Rational half_d = rat(d, 2);
    bool case1 = s < half_d;

    if (s <= kOne) return grid_search_32_exterior(P, case1);

    Rational thr = (d >= 3) ? (kTwo - kTwo * b) / Rational(d)
                            : (Rational(d) - kTwo * b) / Rational(d);
    if (sg > thr && d >= 3) {
        return build_32_ext_with(P, case1, "explicit (a2,b2)=(2,2d/(d-2))", kTwo,
                                 half_d - kOne);
    }

    // Remaining branches fix 4/a2 = d - 2 d/b2 and realize a (.)^+ choice for
    // d/b2 inside the reduced window. The pick prefers the smallest ceiling in
    // the chain-rule row (the construction wants d/b2 just above its infimum).
    auto pick_tb = [&](const Window& w) -> std::optional<Rational> {
        Window tight = w;
        if (w.lo()) {
            Rational base = w.lo()->base();
            Rational st_lo = s - half_d + base;
            Rational gap = st_lo.is_integer() ? kOne : Rational(st_lo.ceil()) - st_lo;
            tight.le(base + gap);
        }
        auto got = tight.pick();
        if (!got || !got->is_exact()) got = w.pick();
        if (!got || !got->is_exact()) return std::nullopt;
        return got->base();
    };

    std::string branch;
    Window w = dbl2_window(P, case1);
    if (sg > thr) {  // d <= 2 here
        branch = "4/a2=d-2d/b2, d/b2=(0)+";
    } else {
        branch = "4/a2=d-2d/b2, d/b2=(b+(d-2s)sigma/2)+";
        w.gt(b + (Rational(d) - kTwo * s) * sg / kTwo);
    }
    if (auto tb = pick_tb(w)) {
        try {
            return build_32_ext_with(P, case1, branch, Rational(d) - kTwo * *tb, *tb);
        } catch (const InfeasibleError&) {
        }
    }
    // The stated (.)^+ choice can land above the chain-rule cap (it happens for
    // d = 2, 1 < s < 2, small sigma); retry anywhere in the reduced window,
    // then fall back to the full search.
    if (auto tb = pick_tb(dbl2_window(P, case1))) {
        try {
            return build_32_ext_with(P, case1, "4/a2=d-2d/b2, d/b2 from reduced window",
                                     Rational(d) - kTwo * *tb, *tb);
        } catch (const InfeasibleError&) {
        }
    }
    return grid_search_32_exterior(P, case1);
}

// ---------------------------------------------------------------------------
// Lebesgue-level difference estimate (family 3.3), local weight piece
// ---------------------------------------------------------------------------

void emit_33_local(const ParamSet& P, const SubCertificate& sub, Rows& rows) {
    SubView v{sub};
    const int d = P.d;
    const Rational &s = P.s, &b = P.b, &sg = P.sigma;
    Rational half_d = rat(d, 2);
    Rational bd = b / Rational(d);
    bool case1 = sub.case_tag == "s_lt_half_d";
    if (case1)
        rows.add("case: s < d/2", s, Rel::LT, half_d);
    else if (sub.case_tag == "s_ge_half_d")
        rows.add("case: s >= d/2", s, Rel::GE, half_d);
    else {
        rows.fail("unknown case tag '" + sub.case_tag + "'");
        return;
    }
    const char* sys = case1 ? "(3.54)" : "(3.64)";

    const ExponentPair* a3 = v.pair("a3", rows);
    const ExponentPair* p5 = v.pair("p5", rows);
    const ExponentPair* p6 = v.pair("p6", rows);
    if (!a3 || !p5 || !p6) return;
    emit_class_rows(d, "a3", *a3, "B0", rows);
    emit_class_rows(d, "p5", *p5, "B0", rows);
    emit_class_rows(d, "p6", *p6, "B0", rows);

    Rational inv_b3p = kOne - inv_q(*a3);
    Rational inv_a3p = kOne - inv_p(*a3);
    Rational uq5 = inv_q(*p5), uq6 = inv_q(*p6);
    Rational up5 = inv_p(*p5), up6 = inv_p(*p6);
    Rational sd = s / Rational(d);

    auto ualpha5 = v.inv_aux("alpha5", rows);
    auto ugammahat1 = v.inv_aux("gammahat1", rows);
    std::string S(sys);
    if (ualpha5) {
        if (case1) {
            rows.add(S + "(1) 1/q5-s/d <= 1/alpha5", uq5 - sd, Rel::LE, *ualpha5);
            rows.add(S + "(1) 1/q5 > s/d", uq5, Rel::GT, sd);
        } else {
            rows.add(S + "(1) 0 < 1/alpha5", kZero, Rel::LT, *ualpha5);
        }
        rows.add(S + "(1) 1/alpha5 <= 1/q5", *ualpha5, Rel::LE, uq5);
        rows.add(S + "(2) local weight window", inv_b3p - sg * (*ualpha5) - uq6, Rel::GT,
                 bd);
        if (ugammahat1)
            rows.add("gammahat1 definition", *ugammahat1, Rel::EQ,
                     inv_b3p - sg * (*ualpha5) - uq6);
    }
    rows.add(S + "(3) time gap", inv_a3p - sg * up5 - up6, Rel::GT, kZero);
    emit_theta_rows(S, sub.theta, SlackRational(inv_a3p - sg * up5 - up6), rows);
}

SubCertificate build_33_local(const ParamSet& P) {
    const int d = P.d;
    const Rational &s = P.s, &b = P.b, &sg = P.sigma;
    Rational half_d = rat(d, 2);
    Rational bd = b / Rational(d);
    Rational dr(d);
    bool case1 = s < half_d;

    if (!(b > kZero) || !(b < std::min(Rational(4), dr)))
        throw GateError("3.3 requires 0 < b < min{4, d}");
    ParamSet tmp = P;
    if (!(ExtendedRational(sg) < sigma_c(tmp, s)))
        throw GateError("3.3 requires sigma < sigma_c(s)");

    SubCertificate sub;
    sub.lemma = "3.3";
    sub.piece = "local";
    sub.case_tag = case1 ? "s_lt_half_d" : "s_ge_half_d";

    Rational ub3, uq5, uq6;
    if (case1) {
        sub.branch = "case1 windows (3.61),(3.60),(3.58)";
        Rational shift = (dr - kTwo * s - Rational(4)) * sg / (kTwo * dr);
        Window wb;
        wb.gt(rat(d - 4, 2 * d));
        wb.gt(kZero);
        wb.le(kHalf);
        wb.lt(kOne - bd);
        wb.lt(kOne - bd - shift);
        wb.lt(kHalf + (kTwo - b) / dr);
        wb.lt(kHalf + (kTwo - b) / dr - shift);
        ub3 = pick_exact(wb, "1/b3 ((3.61))");

        Window w5;
        w5.gt(sg * s / dr);
        w5.gt(sg * rat(d - 4, 2 * d));
        w5.gt((sg + kOne) / kTwo - Rational(4) / dr - ub3);
        w5.lt(sg / kTwo);
        w5.lt(kOne - ub3 - bd + sg * s / dr);
        w5.lt(kHalf - ub3 - bd + sg * s / dr + kTwo / dr);
        uq5 = pick_exact(w5, "sigma/q5 ((3.60))") / sg;

        Window w6;
        w6.gt(kZero);
        w6.gt(rat(d - 4, 2 * d));
        w6.gt((sg + kTwo) / kTwo - Rational(4) / dr - sg * uq5 - ub3);
        w6.lt(kHalf);
        w6.lt(kOne - ub3 - bd - sg * uq5 + sg * s / dr);
        uq6 = pick_exact(w6, "1/q6 ((3.58))");
    } else {
        sub.branch = "case2 windows (3.68),(3.67),(3.66)";
        Window wb;
        wb.gt(kZero);
        wb.gt(rat(d - 2, 2 * d));
        wb.le(kHalf);
        wb.lt(kOne - bd);
        wb.lt(kHalf + (kTwo - b) / dr);
        ub3 = pick_exact(wb, "1/b3 ((3.68))");

        Window w5;
        w5.gt(kZero);
        w5.gt(sg * rat(d - 4, 2 * d));
        w5.gt(sg / kTwo - (Rational(4) - b) / dr);
        w5.gt((sg + kOne) / kTwo - Rational(4) / dr - ub3);
        w5.lt(sg / kTwo);
        uq5 = pick_exact(w5, "sigma/q5 ((3.67))") / sg;

        Window w6;
        w6.gt(kZero);
        w6.gt(rat(d - 4, 2 * d));
        w6.gt((sg + kTwo) / kTwo - Rational(4) / dr - sg * uq5 - ub3);
        w6.lt(kHalf);
        w6.lt(kOne - ub3 - bd);
        uq6 = pick_exact(w6, "1/q6 ((3.66))");
    }

    Window wa;
    if (case1)
        wa.ge(uq5 - s / dr);
    else
        wa.gt(kZero);
    wa.le(uq5);
    wa.lt((kOne - ub3 - uq6 - bd) / sg);
    Rational ualpha5 = pick_exact(wa, "1/alpha5");

    ExponentPair a3 = pair_from_uq_b0(d, ub3);
    ExponentPair p5 = pair_from_uq_b0(d, uq5);
    ExponentPair p6 = pair_from_uq_b0(d, uq6);
    Rational inv_b3p = kOne - ub3;
    Rational ugammahat1 = inv_b3p - sg * ualpha5 - uq6;

    sub.pairs = {{"a3", a3}, {"p5", p5}, {"p6", p6}};
    sub.aux = {{"alpha5", SlackRational(kOne / ualpha5)},
               {"gammahat1", SlackRational(kOne / ugammahat1)}};
    sub.theta = SlackRational((kOne - inv_p(a3)) - sg * inv_p(p5) - inv_p(p6));

    Rows rows(&sub.constraints);
    emit_33_local(P, sub, rows);
    if (!rows.all_ok()) {
        for (const auto& c : sub.constraints)
            if (!c.satisfied)
                throw InfeasibleError("3.3 local: row failed at build time: " + c.label);
    }
    return sub;
}

// ---------------------------------------------------------------------------
// Lebesgue-level difference estimate (family 3.3), exterior weight piece
// ---------------------------------------------------------------------------

void emit_33_exterior(const ParamSet& P, const SubCertificate& sub, Rows& rows) {
    SubView v{sub};
    const int d = P.d;
    const Rational &s = P.s, &sg = P.sigma;
    Rational half_d = rat(d, 2);
    bool case1 = sub.case_tag == "s_lt_half_d";
    if (case1)
        rows.add("case: s < d/2", s, Rel::LT, half_d);
    else if (sub.case_tag == "s_ge_half_d")
        rows.add("case: s >= d/2", s, Rel::GE, half_d);
    else {
        rows.fail("unknown case tag '" + sub.case_tag + "'");
        return;
    }

    const ExponentPair* a4 = v.pair("a4", rows);
    const ExponentPair* p7 = v.pair("p7", rows);
    if (!a4 || !p7) return;
    emit_class_rows(d, "a4", *a4, "B0", rows);
    emit_class_rows(d, "p7", *p7, "B0", rows);

    Rational inv_b4p = kOne - inv_q(*a4);
    Rational inv_a4p = kOne - inv_p(*a4);

    if (case1) {
        Rational uq7 = inv_q(*p7);
        Rational up7 = inv_p(*p7);
        Rational sd = s / Rational(d);
        rows.add("(3.62) a4 = p7", inv_p(*a4), Rel::EQ, up7);
        rows.add("(3.62) b4 = q7", inv_q(*a4), Rel::EQ, uq7);
        rows.add("closed form a4 = 8(sigma+2)/(sigma(d-2s))", inv_p(*a4), Rel::EQ,
                 sg * (Rational(d) - kTwo * s) / (Rational(8) * (sg + kTwo)));
        rows.add("closed form b4 = d(sigma+2)/(d+sigma s)", inv_q(*a4), Rel::EQ,
                 (Rational(d) + sg * s) / (Rational(d) * (sg + kTwo)));
        rows.add("(3.62) identity: 1/b4' = sigma(1/q7-s/d)+1/q7", inv_b4p, Rel::EQ,
                 sg * (uq7 - sd) + uq7);
        rows.add("(3.62) identity: 1/a4'-(sigma+1)/p7 = 1-sigma(d-2s)/8",
                 inv_a4p - (sg + kOne) * up7, Rel::EQ,
                 kOne - sg * (Rational(d) - kTwo * s) / Rational(8));
        rows.add("embedding into L^alpha: 1/q7 > s/d", uq7, Rel::GT, sd);
        emit_theta_rows("(3.62)", sub.theta,
                        SlackRational(kOne - sg * (Rational(d) - kTwo * s) / Rational(8)),
                        rows);
        if (sub.branch != "closed forms (3.62)")
            rows.fail("unknown branch '" + sub.branch + "'");
        return;
    }

    rows.add("(p7,q7) = (inf,2): q7 = 2", inv_q(*p7), Rel::EQ, kHalf);
    rows.add("(p7,q7) = (inf,2): 1/p7 = 0", inv_p(*p7), Rel::EQ, kZero);
    rows.add("1/b4' > 1/2", inv_b4p, Rel::GT, kHalf);
    rows.add("1/b4' < (sigma+1)/2", inv_b4p, Rel::LT, (sg + kOne) / kTwo);
    auto ualpha6 = v.inv_aux("alpha6", rows);
    if (ualpha6) {
        rows.add("alpha6 definition: 1/b4' = sigma/alpha6+1/2", inv_b4p, Rel::EQ,
                 sg * (*ualpha6) + kHalf);
        rows.add("alpha6 > 2", *ualpha6, Rel::LT, kHalf);
        rows.add("alpha6 < inf", *ualpha6, Rel::GT, kZero);
    }
    emit_theta_rows("case2", sub.theta, SlackRational(inv_a4p), rows);
    if (sub.branch != "case2: 1/b4' in (1/2,(sigma+1)/2)")
        rows.fail("unknown branch '" + sub.branch + "'");
}

SubCertificate build_33_exterior(const ParamSet& P) {
    const int d = P.d;
    const Rational &s = P.s, &b = P.b, &sg = P.sigma;
    Rational half_d = rat(d, 2);
    Rational dr(d);
    bool case1 = s < half_d;

    if (!(b > kZero) || !(b < std::min(Rational(4), dr)))
        throw GateError("3.3 requires 0 < b < min{4, d}");
    ParamSet tmp = P;
    if (!(ExtendedRational(sg) < sigma_c(tmp, s)))
        throw GateError("3.3 requires sigma < sigma_c(s)");

    SubCertificate sub;
    sub.lemma = "3.3";
    sub.piece = "exterior";
    sub.case_tag = case1 ? "s_lt_half_d" : "s_ge_half_d";

    if (case1) {
        sub.branch = "closed forms (3.62)";
        Rational a4 = Rational(8) * (sg + kTwo) / (sg * (dr - kTwo * s));
        Rational b4 = dr * (sg + kTwo) / (dr + sg * s);
        ExponentPair pr(ExtendedRational(a4), b4);
        sub.pairs = {{"a4", pr}, {"p7", pr}};
        sub.theta = SlackRational(kOne - sg * (dr - kTwo * s) / Rational(8));
    } else {
        sub.branch = "case2: 1/b4' in (1/2,(sigma+1)/2)";
        Window wb;  // window for 1/b4
        wb.gt((kOne - sg) / kTwo);
        wb.gt(rat(d - 4, 2 * d));
        wb.gt(kZero);
        wb.lt(kHalf);
        Rational ub4 = pick_exact(wb, "1/b4 (case 2)");
        ExponentPair a4 = pair_from_uq_b0(d, ub4);
        ExponentPair p7(ExtendedRational::infinity(), kTwo);
        Rational ualpha6 = (kOne - ub4 - kHalf) / sg;
        sub.pairs = {{"a4", a4}, {"p7", p7}};
        sub.aux = {{"alpha6", SlackRational(kOne / ualpha6)}};
        sub.theta = SlackRational(kOne - inv_p(a4));
    }

    Rows rows(&sub.constraints);
    emit_33_exterior(P, sub, rows);
    if (!rows.all_ok()) {
        for (const auto& c : sub.constraints)
            if (!c.satisfied)
                throw InfeasibleError("3.3 exterior: row failed at build time: " + c.label);
    }
    return sub;
}

void emit_sub(const ParamSet& P, const SubCertificate& sub, Rows& rows) {
    if (sub.lemma == "3.2" && sub.piece == "local") return emit_32_local(P, sub, rows);
    if (sub.lemma == "3.2" && sub.piece == "exterior")
        return emit_32_exterior(P, sub, rows);
    if (sub.lemma == "3.3" && sub.piece == "local") return emit_33_local(P, sub, rows);
    if (sub.lemma == "3.3" && sub.piece == "exterior")
        return emit_33_exterior(P, sub, rows);
    rows.fail("unknown sub-certificate (" + sub.lemma + ", " + sub.piece + ")");
}

}  // namespace

SubCertificate certify_32_local(const ParamSet& params) {
    Verdict v = theorem_applies(params);
    if (!v.applies) throw GateError("parameters fail the well-posedness hypotheses");
    return build_32_local(params);
}

SubCertificate certify_32_exterior(const ParamSet& params) {
    Verdict v = theorem_applies(params);
    if (!v.applies) throw GateError("parameters fail the well-posedness hypotheses");
    return build_32_exterior(params);
}

SubCertificate certify_33_local(const ParamSet& params) { return build_33_local(params); }

SubCertificate certify_33_exterior(const ParamSet& params) {
    return build_33_exterior(params);
}

FullCertificate build_full_certificate(const ParamSet& params) {
    Verdict v = theorem_applies(params);
    if (!v.applies) throw GateError("parameters fail the well-posedness hypotheses");

    FullCertificate cert;
    cert.params = params;
    cert.subs.push_back(build_32_local(params));
    cert.subs.push_back(build_32_exterior(params));
    cert.subs.push_back(build_33_local(params));
    cert.subs.push_back(build_33_exterior(params));

    cert.theta = cert.subs[0].theta;
    for (const auto& s : cert.subs) cert.theta = std::min(cert.theta, s.theta);

    for (const auto& s : cert.subs)
        for (const auto& c : s.constraints)
            if (c.label.find("regularity") != std::string::npos)
                cert.regularity_checks.push_back(c);

    const char* names[] = {"p1", "p2", "p3", "p4", "p5", "p6", "p7"};
    for (const char* nm : names) {
        for (const auto& s : cert.subs) {
            auto it = s.pairs.find(nm);
            if (it == s.pairs.end()) continue;
            bool seen = false;
            for (const auto& pr : cert.space_pairs)
                if (pr.p == it->second.p && pr.q == it->second.q) seen = true;
            if (!seen) cert.space_pairs.push_back(it->second);
            break;
        }
    }
    return cert;
}

int VerifyReport::failures() const {
    int n = 0;
    for (const auto& r : rows)
        if (!r.pass) ++n;
    return n;
}

std::vector<std::string> VerifyReport::failed_labels() const {
    std::vector<std::string> out;
    for (const auto& r : rows)
        if (!r.pass) out.push_back(r.label);
    return out;
}

std::string VerifyReport::to_json() const {
    ordered_json j;
    j["ok"] = failures() == 0;
    j["failures"] = failures();
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) j["rows"].push_back({{"label", r.label}, {"pass", r.pass}});
    return j.dump(2);
}

VerifyReport verify_certificate(const ParamSet& params, const FullCertificate& cert) {
    VerifyReport report;
    auto push = [&](const std::string& prefix, const std::vector<Constraint>& cs) {
        for (const auto& c : cs)
            report.rows.push_back(
                {prefix + c.label, rel_holds(c.lhs, c.rel, c.rhs)});
    };

    const char* expected[4][2] = {
        {"3.2", "local"}, {"3.2", "exterior"}, {"3.3", "local"}, {"3.3", "exterior"}};
    report.rows.push_back({"certificate has 4 sub-certificates", cert.subs.size() == 4});
    for (size_t i = 0; i < cert.subs.size() && i < 4; ++i) {
        const auto& sub = cert.subs[i];
        std::string prefix = "[" + sub.lemma + " " + sub.piece + "] ";
        report.rows.push_back({prefix + "slot matches lemma/piece",
                               sub.lemma == expected[i][0] && sub.piece == expected[i][1]});
        std::vector<Constraint> cs;
        Rows rows(&cs);
        emit_sub(params, sub, rows);
        push(prefix, cs);
    }

    // Global theta: minimum over the subs, strictly positive.
    if (cert.subs.size() == 4) {
        SlackRational min_theta = cert.subs[0].theta;
        for (const auto& s : cert.subs) min_theta = std::min(min_theta, s.theta);
        report.rows.push_back({"global theta = min(sub thetas)", cert.theta == min_theta});
        report.rows.push_back({"global theta > 0", cert.theta > SlackRational(kZero)});
    }

    // Coverage of the fixed-point space pairs.
    const char* names[] = {"p1", "p2", "p3", "p4", "p5", "p6", "p7"};
    for (const char* nm : names) {
        bool found = false;
        for (const auto& s : cert.subs)
            if (s.pairs.count(nm)) found = true;
        report.rows.push_back({std::string("pair ") + nm + " present", found});
    }
    return report;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

ordered_json pair_to_json(const ExponentPair& pr) {
    return ordered_json{{"p", pr.p.str()}, {"q", pr.q.str()}};
}

ExponentPair pair_from_json(const ordered_json& j) {
    return ExponentPair(ExtendedRational::parse(j.at("p").get<std::string>()),
                        Rational::parse(j.at("q").get<std::string>()));
}

ordered_json constraint_to_json(const Constraint& c) {
    return ordered_json{{"label", c.label},
                        {"lhs", c.lhs.str()},
                        {"rel", rel_str(c.rel)},
                        {"rhs", c.rhs.str()},
                        {"pass", c.satisfied}};
}

Constraint constraint_from_json(const ordered_json& j) {
    Constraint c;
    c.label = j.at("label").get<std::string>();
    c.lhs = SlackRational::parse(j.at("lhs").get<std::string>());
    c.rel = rel_parse(j.at("rel").get<std::string>());
    c.rhs = SlackRational::parse(j.at("rhs").get<std::string>());
    c.satisfied = j.at("pass").get<bool>();
    return c;
}

ordered_json params_to_json_obj(const ParamSet& p) {
    return ordered_json{{"d", p.d},
                        {"s", p.s.str()},
                        {"b", p.b.str()},
                        {"sigma", p.sigma.str()},
                        {"lambda", p.lambda}};
}

ParamSet params_from_json_obj(const ordered_json& j) {
    ParamSet p;
    p.d = j.at("d").get<int>();
    p.s = Rational::parse(j.at("s").get<std::string>());
    p.b = Rational::parse(j.at("b").get<std::string>());
    p.sigma = Rational::parse(j.at("sigma").get<std::string>());
    p.lambda = j.value("lambda", 1.0);
    return p;
}

}  // namespace

std::string params_to_json(const ParamSet& params) {
    return params_to_json_obj(params).dump(2);
}

ParamSet params_from_json(const std::string& text) {
    return params_from_json_obj(ordered_json::parse(text));
}

std::string certificate_to_json(const FullCertificate& cert) {
    ordered_json j;
    j["params"] = params_to_json_obj(cert.params);
    j["theta"] = cert.theta.str();
    j["sub"] = ordered_json::array();
    for (const auto& s : cert.subs) {
        ordered_json js;
        js["lemma"] = s.lemma;
        js["piece"] = s.piece;
        js["case"] = s.case_tag;
        js["branch"] = s.branch;
        js["pairs"] = ordered_json::object();
        for (const auto& [name, pr] : s.pairs) js["pairs"][name] = pair_to_json(pr);
        js["aux"] = ordered_json::object();
        for (const auto& [name, val] : s.aux) js["aux"][name] = val.str();
        js["theta"] = s.theta.str();
        js["constraints"] = ordered_json::array();
        for (const auto& c : s.constraints) js["constraints"].push_back(constraint_to_json(c));
        j["sub"].push_back(js);
    }
    j["regularity_checks"] = ordered_json::array();
    for (const auto& c : cert.regularity_checks)
        j["regularity_checks"].push_back(constraint_to_json(c));
    j["space_pairs"] = ordered_json::array();
    for (const auto& pr : cert.space_pairs) j["space_pairs"].push_back(pair_to_json(pr));
    return j.dump(2);
}

FullCertificate certificate_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    FullCertificate cert;
    cert.params = params_from_json_obj(j.at("params"));
    cert.theta = SlackRational::parse(j.at("theta").get<std::string>());
    for (const auto& js : j.at("sub")) {
        SubCertificate s;
        s.lemma = js.at("lemma").get<std::string>();
        s.piece = js.at("piece").get<std::string>();
        s.case_tag = js.at("case").get<std::string>();
        s.branch = js.at("branch").get<std::string>();
        for (auto it = js.at("pairs").begin(); it != js.at("pairs").end(); ++it)
            s.pairs.emplace(it.key(), pair_from_json(it.value()));
        for (auto it = js.at("aux").begin(); it != js.at("aux").end(); ++it)
            s.aux.emplace(it.key(), SlackRational::parse(it.value().get<std::string>()));
        s.theta = SlackRational::parse(js.at("theta").get<std::string>());
        for (const auto& jc : js.at("constraints"))
            s.constraints.push_back(constraint_from_json(jc));
        cert.subs.push_back(std::move(s));
    }
    for (const auto& jc : j.at("regularity_checks"))
        cert.regularity_checks.push_back(constraint_from_json(jc));
    if (j.count("space_pairs"))
        for (const auto& jp : j.at("space_pairs"))
            cert.space_pairs.push_back(pair_from_json(jp));
    return cert;
}

}  // namespace ibnls
