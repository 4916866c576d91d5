#pragma once

#include "ibnls/admissible.hpp"
#include "ibnls/classify.hpp"
#include "ibnls/rational.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibnls {

/// Raised when a parameter set does not satisfy the hypotheses a construction
/// needs before it even starts searching.
struct GateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when no admissible exponent choice exists (or an emitted row fails
/// at build time). Must not happen for gated inputs.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Rel { LT, LE, EQ, GE, GT };

std::string rel_str(Rel r);
Rel rel_parse(const std::string& s);
bool rel_holds(const SlackRational& lhs, Rel rel, const SlackRational& rhs);

/// One verified inequality or identity, labelled by the system row it encodes.
struct Constraint {
    std::string label;
    SlackRational lhs;
    Rel rel = Rel::EQ;
    SlackRational rhs;
    bool satisfied = false;
};

/// The exponent bookkeeping for one estimate: which pairs were chosen, the
/// auxiliary exponents, the Hoelder-in-time gain theta, and every row that
/// was checked exactly.
struct SubCertificate {
    std::string lemma;     // "3.2" or "3.3"
    std::string piece;     // "local" or "exterior"
    std::string case_tag;  // "s_lt_half_d" or "s_ge_half_d"
    std::string branch;
    std::map<std::string, ExponentPair> pairs;
    std::map<std::string, SlackRational> aux;  // exponent values, not reciprocals
    SlackRational theta;
    std::vector<Constraint> constraints;
};

struct FullCertificate {
    ParamSet params;
    std::vector<SubCertificate> subs;  // 3.2 local, 3.2 exterior, 3.3 local, 3.3 exterior
    std::vector<Constraint> regularity_checks;
    SlackRational theta;                    // min over sub thetas
    std::vector<ExponentPair> space_pairs;  // deduplicated (p1..p7, q1..q7)
};

struct VerifyRow {
    std::string label;
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    int failures() const;
    bool ok() const { return failures() == 0; }
    std::vector<std::string> failed_labels() const;
    std::string to_json() const;
};

SubCertificate certify_32_local(const ParamSet& params);
SubCertificate certify_32_exterior(const ParamSet& params);
SubCertificate certify_33_local(const ParamSet& params);
SubCertificate certify_33_exterior(const ParamSet& params);

FullCertificate build_full_certificate(const ParamSet& params);

/// Re-derives every row of every sub-certificate from the stored pairs and
/// auxiliary exponents. Stored pass flags are ignored.
VerifyReport verify_certificate(const ParamSet& params, const FullCertificate& cert);

std::string certificate_to_json(const FullCertificate& cert);
FullCertificate certificate_from_json(const std::string& text);

std::string params_to_json(const ParamSet& params);
ParamSet params_from_json(const std::string& text);

}  // namespace ibnls
