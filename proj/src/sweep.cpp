#include "ibnls/sweep.hpp"

#include <nlohmann/json.hpp>

#include <random>
#include <sstream>

namespace ibnls {

using ordered_json = nlohmann::ordered_json;

SweepResult run_sweep(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sweep: n must be >= 1");
    SweepResult res;
    res.n = n;
    res.seed = seed;
    std::mt19937_64 rng(seed);

    while (int(res.items.size()) < n) {
        int d = 1 + int(rng() % 8);
        Rational s = rat(long(rng() % 49), 8);
        Rational b = rat(1 + long(rng() % 32), 8);
        Rational sigma = rat(1 + long(rng() % 40), 4);
        ParamSet P{d, s, b, sigma, 1.0};
        if (!theorem_applies(P).applies) continue;

        SweepItem item;
        item.params = P;
        try {
            FullCertificate cert = build_full_certificate(P);
            VerifyReport rep = verify_certificate(P, cert);
            bool theta_pos = cert.theta > SlackRational(Rational(0));
            item.verified = rep.ok() && theta_pos;
            item.theta = cert.theta.str();
            if (!rep.ok()) {
                std::ostringstream os;
                for (const auto& l : rep.failed_labels()) os << l << "; ";
                item.detail = os.str();
            } else if (!theta_pos) {
                item.detail = "theta not positive";
            }
        } catch (const std::exception& e) {
            item.verified = false;
            item.detail = e.what();
        }
        if (item.verified) ++res.verified_count;
        res.items.push_back(std::move(item));
    }
    return res;
}

std::string SweepResult::to_json() const {
    ordered_json j;
    j["n"] = n;
    j["seed"] = seed;
    j["verified"] = verified_count;
    j["items"] = ordered_json::array();
    for (const auto& it : items) {
        ordered_json ji;
        ji["d"] = it.params.d;
        ji["s"] = it.params.s.str();
        ji["b"] = it.params.b.str();
        ji["sigma"] = it.params.sigma.str();
        ji["verified"] = it.verified;
        ji["theta"] = it.theta;
        if (!it.detail.empty()) ji["detail"] = it.detail;
        j["items"].push_back(ji);
    }
    return j.dump(2);
}

std::string SweepResult::table() const {
    std::ostringstream os;
    os << "idx  d  s      b      sigma  verified  theta\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        os << i << "  " << it.params.d << "  " << it.params.s.str() << "  "
           << it.params.b.str() << "  " << it.params.sigma.str() << "  "
           << (it.verified ? "yes" : "NO") << "  " << it.theta;
        if (!it.detail.empty()) os << "  [" << it.detail << "]";
        os << "\n";
    }
    os << verified_count << "/" << items.size() << " verified\n";
    return os.str();
}

}  // namespace ibnls
