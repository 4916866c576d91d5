#include "ibnls/classify.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace ibnls {

using ordered_json = nlohmann::ordered_json;

void ParamSet::validate() const {
    if (d < 1) throw std::invalid_argument("ParamSet: d must be a positive integer");
    if (s.is_negative()) throw std::invalid_argument("ParamSet: s must be >= 0");
    if (sigma <= Rational(0)) throw std::invalid_argument("ParamSet: sigma must be > 0");
}

Rational critical_index(const ParamSet& params) {
    params.validate();
    return rat(params.d, 2) - (Rational(4) - params.b) / params.sigma;
}

ExtendedRational sigma_c(const ParamSet& params, const Rational& s) {
    Rational half_d = rat(params.d, 2);
    if (s >= half_d) return ExtendedRational::infinity();
    return ExtendedRational((Rational(8) - Rational(2) * params.b) /
                            (Rational(params.d) - Rational(2) * s));
}

SlackRational sigma_star(const ParamSet& params, const Rational& s) {
    const int d = params.d;
    if (s <= Rational(1)) return SlackRational(Rational(0));
    if (d <= 2 && s >= Rational(1) + rat(d, 2))
        return SlackRational(Rational((s - rat(d, 2)).floor()));
    if (d >= 3 && s > Rational(2)) return SlackRational(Rational(s.ceil() - 2));
    Rational base = (Rational(2) * s - Rational(2) * params.b - Rational(2)) / Rational(d);
    if (base.is_negative()) return SlackRational(Rational(0));
    return SlackRational(base, Rational(1));
}

bool is_even_integer(const Rational& sigma) {
    return sigma > Rational(0) && sigma.is_integer() && sigma.num() % 2 == 0;
}

namespace {

std::string criticality_label(const ParamSet& p) {
    Rational half_d = rat(p.d, 2);
    ExtendedRational sc = sigma_c(p, p.s);
    if (p.s < half_d && !sc.is_infinite() && p.sigma == sc.value()) {
        Rational s_c = critical_index(p);
        if (s_c.is_zero()) return "mass-critical";
        if (p.d >= 5 && s_c == Rational(2)) return "energy-critical";
        return "critical";
    }
    if (ExtendedRational(p.sigma) < sc) return "subcritical";
    return "supercritical";
}

}  // namespace

Verdict theorem_applies(const ParamSet& params) {
    params.validate();
    Verdict v;
    const int d = params.d;
    const Rational& s = params.s;
    const Rational& b = params.b;
    const Rational& sigma = params.sigma;

    // (i) 0 <= s < min{2 + d/2, 3d/2}
    Rational s_cap = std::min(Rational(2) + rat(d, 2), rat(3 * d, 2));
    bool ok_s = !s.is_negative() && s < s_cap;
    v.checks.push_back({"s_range", "0 <= s < " + s_cap.str(), s.str(), ok_s});

    // (ii) 0 < b < min{4, d, 3d/2 - s, d/2 + 2 - s}
    Rational b_cap = std::min(std::min(Rational(4), Rational(d)),
                              std::min(rat(3 * d, 2) - s, rat(d, 2) + Rational(2) - s));
    bool ok_b = b > Rational(0) && b < b_cap;
    v.checks.push_back({"b_range", "0 < b < " + b_cap.str(), b.str(), ok_b});

    // (iii) 0 < sigma < sigma_c(s)
    ExtendedRational sc = sigma_c(params, s);
    bool ok_sigma = sigma > Rational(0) && ExtendedRational(sigma) < sc;
    v.checks.push_back({"sigma_subcritical", "0 < sigma < " + sc.str(), sigma.str(), ok_sigma});

    // (iv) if sigma is not an even integer, sigma >= sigma_star(s) in slack order
    if (!is_even_integer(sigma)) {
        SlackRational floor_sigma = sigma_star(params, s);
        bool ok_reg = SlackRational(sigma) >= floor_sigma;
        v.checks.push_back(
            {"sigma_regularity", "sigma >= " + floor_sigma.str(), sigma.str(), ok_reg});
    } else {
        v.checks.push_back({"sigma_regularity", "sigma even integer", sigma.str(), true});
    }

    v.applies = std::all_of(v.checks.begin(), v.checks.end(),
                            [](const Check& c) { return c.pass; });
    v.criticality = criticality_label(params);
    if (v.criticality == "mass-critical") {
        v.notes.push_back(
            "mass-critical means s_c = 0, i.e. sigma = (8-2b)/d; the weightless "
            "form sigma = 8/(d-2s) sometimes quoted for this case does not "
            "account for b and is not used here");
    }
    return v;
}

std::string Verdict::to_json() const {
    ordered_json j;
    j["applies"] = applies;
    j["criticality"] = criticality;
    j["checks"] = ordered_json::array();
    for (const auto& c : checks) {
        ordered_json jc;
        jc["name"] = c.name;
        jc["required"] = c.required;
        jc["actual"] = c.actual;
        jc["pass"] = c.pass;
        j["checks"].push_back(jc);
    }
    if (!notes.empty()) j["notes"] = notes;
    return j.dump(2);
}

}  // namespace ibnls
