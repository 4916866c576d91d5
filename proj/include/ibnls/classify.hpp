#pragma once

#include "ibnls/rational.hpp"

#include <string>
#include <vector>

namespace ibnls {

/// One instance of the equation i u_t + Delta^2 u = lambda |x|^{-b} |u|^sigma u
/// together with the data regularity s. lambda only matters to the simulator.
struct ParamSet {
    int d = 1;            // spatial dimension
    Rational s;           // Sobolev regularity of the data, s >= 0
    Rational b;           // weight decay exponent
    Rational sigma;       // nonlinearity power, sigma > 0
    double lambda = 1.0;  // coupling

    void validate() const;  // throws on d < 1, s < 0 or sigma <= 0
};

struct Check {
    std::string name;
    std::string required;
    std::string actual;
    bool pass = false;
};

struct Verdict {
    bool applies = false;
    std::string criticality;
    std::vector<Check> checks;
    std::vector<std::string> notes;

    std::string to_json() const;
};

/// Critical Sobolev index s_c = d/2 - (4-b)/sigma.
Rational critical_index(const ParamSet& params);

/// Largest subcritical power for H^s data:
/// (8-2b)/(d-2s) when s < d/2, infinity when s >= d/2.
ExtendedRational sigma_c(const ParamSet& params, const Rational& s);

/// Regularity floor for non-even-integer powers. The last branch carries a
/// positive eps ("slightly larger"); negative bases clamp to 0 since sigma > 0
/// is required anyway.
SlackRational sigma_star(const ParamSet& params, const Rational& s);

/// sigma in {2, 4, 6, ...}.
bool is_even_integer(const Rational& sigma);

/// Decides the local well-posedness hypotheses for params, recording every
/// check. applies is the conjunction of the checks.
Verdict theorem_applies(const ParamSet& params);

}  // namespace ibnls
