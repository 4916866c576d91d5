// Batch frontend: classification, exponent certificates, verification,
// split-step simulation, Picard fixed-point runs, scaling tests and the
// randomized certificate sweep.
//
// Exit codes: 0 success, 1 usage/parse error, 2 hypothesis gate failed,
// 3 certification infeasible / verification failed, 4 numerical blow-up.

#include "ibnls/certify.hpp"
#include "ibnls/simulate.hpp"
#include "ibnls/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitGate = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBlowup = 4;

struct ParamOpts {
    std::string s = "1", b = "1/2", sigma = "2";
    int d = 1;
    double lambda = 1.0;

    void attach(CLI::App* app) {
        app->add_option("--d", d, "spatial dimension");
        app->add_option("--s", s, "Sobolev regularity (rational: n/d, integer or decimal)");
        app->add_option("--b", b, "weight decay exponent (rational)");
        app->add_option("--sigma", sigma, "nonlinearity power (rational)");
        app->add_option("--lambda", lambda, "coupling (real; simulator only)");
    }
    ibnls::ParamSet parse() const {
        ibnls::ParamSet p;
        p.d = d;
        p.s = ibnls::Rational::parse(s);
        p.b = ibnls::Rational::parse(b);
        p.sigma = ibnls::Rational::parse(sigma);
        p.lambda = lambda;
        p.validate();
        return p;
    }
};

struct GridOpts {
    int n = 256;
    double L = 32.0;
    std::string init = "gaussian";
    double amp = 1.0;
    int mode_k = 3;

    void attach(CLI::App* app) {
        app->add_option("--n", n, "grid points per axis (power of two)");
        app->add_option("--L", L, "box half-length");
        app->add_option("--init", init, "initial data: gaussian | mode")
            ->check(CLI::IsMember({"gaussian", "mode"}));
        app->add_option("--amp", amp, "gaussian amplitude");
        app->add_option("--mode-k", mode_k, "mode index for --init mode");
    }
    ibnls::GridField initial(int d) const {
        ibnls::Grid g{d, n, L};
        if (init == "mode") return ibnls::mode_field(g, mode_k, d == 2 ? mode_k : 0);
        return ibnls::gaussian_field(g, amp);
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// Expands "--config FILE" into "--key value" pairs read from a flat
// key = value file. Injected right where --config stood, so flags given
// explicitly later on the command line override the file.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        std::string path;
        if (a == "--config" && i + 1 < argc) {
            path = argv[++i];
        } else if (a.rfind("--config=", 0) == 0) {
            path = a.substr(9);
        } else {
            args.push_back(a);
            continue;
        }
        std::istringstream in(read_file(path));
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config line without '=': " + line);
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            args.push_back("--" + key);
            if (!value.empty()) args.push_back(value);
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace ibnls;
    CLI::App app{"inhomogeneous biharmonic NLS toolkit"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    bool json_out = false;
    app.add_option("--out", out_dir, "output directory")->configurable(true);
    app.add_flag("--json", json_out, "machine-readable output where applicable");

    // classify
    auto* c_classify = app.add_subcommand("classify", "evaluate the well-posedness gate");
    ParamOpts classify_p;
    classify_p.attach(c_classify);

    // certify
    auto* c_certify =
        app.add_subcommand("certify", "construct and verify an exponent certificate");
    ParamOpts certify_p;
    certify_p.attach(c_certify);
    std::string cert_out = "certificate.json";
    std::string verify_only;
    c_certify->add_option("--cert-out", cert_out, "certificate file name");
    c_certify->add_option("--verify-only", verify_only,
                          "re-verify an existing certificate file instead of building");

    // verify
    auto* c_verify = app.add_subcommand("verify", "re-verify a certificate file");
    std::string verify_file;
    c_verify->add_option("cert", verify_file, "certificate JSON file")->required();

    // simulate
    auto* c_sim = app.add_subcommand("simulate", "split-step evolution with logs");
    ParamOpts sim_p;
    GridOpts sim_g;
    sim_p.attach(c_sim);
    sim_g.attach(c_sim);
    double sim_dt = 1e-4, sim_T = 0.1, sim_rho = -1.0, sim_ceiling = 1e6, sim_s_norm = 1.0;
    int sim_stride = 10;
    bool sim_dealias = false;
    int snapshot_every = 0;
    c_sim->add_option("--dt", sim_dt, "time step");
    c_sim->add_option("--T", sim_T, "final time");
    c_sim->add_option("--rho", sim_rho, "weight regularization radius (default h/2)");
    c_sim->add_option("--stride", sim_stride, "log every k-th step");
    c_sim->add_option("--ceiling", sim_ceiling, "blow-up ceiling factor");
    c_sim->add_option("--norm-s", sim_s_norm, "Sobolev order for logs/ceiling");
    c_sim->add_flag("--dealias,!--no-dealias", sim_dealias,
                    "2/3-rule dealiasing (default: on when sigma >= 3)");
    c_sim->add_option("--snapshot-every", snapshot_every,
                      "also write field snapshots every k-th logged state (0 = ends only)");

    // picard
    auto* c_pic = app.add_subcommand("picard", "Picard iteration on the integral equation");
    ParamOpts pic_p;
    GridOpts pic_g;
    pic_p.attach(c_pic);
    pic_g.attach(c_pic);
    double pic_T = 1e-2, pic_tol = 1e-10, pic_rho = -1.0;
    int pic_m = 33, pic_maxit = 50;
    bool pic_compare = false;
    double pic_dt = 1e-4;
    c_pic->add_option("--T", pic_T, "interval length");
    c_pic->add_option("--m-nodes", pic_m, "quadrature nodes");
    c_pic->add_option("--tol", pic_tol, "H^s convergence tolerance");
    c_pic->add_option("--max-iter", pic_maxit, "iteration cap");
    c_pic->add_option("--rho", pic_rho, "weight regularization radius (default h/2)");
    c_pic->add_flag("--compare-evolve", pic_compare, "also run evolve and report the gap");
    c_pic->add_option("--dt", pic_dt, "time step for --compare-evolve");

    // scale-test
    auto* c_scale = app.add_subcommand("scale-test", "scaling covariance check");
    ParamOpts scale_p;
    GridOpts scale_g;
    scale_p.attach(c_scale);
    scale_g.attach(c_scale);
    double scale_alpha = 2.0, scale_t = 1e-3, scale_dt = 1e-5;
    c_scale->add_option("--alpha", scale_alpha, "scaling factor");
    c_scale->add_option("--t", scale_t, "evolution time on the scaled side");
    c_scale->add_option("--dt", scale_dt, "time step");

    // sweep
    auto* c_sweep = app.add_subcommand("sweep", "randomized certificate soundness sweep");
    int sweep_n = 200;
    std::uint64_t sweep_seed = 1;
    c_sweep->add_option("--n", sweep_n, "number of gate-passing tuples")
        ->check(CLI::PositiveNumber);
    c_sweep->add_option("--seed", sweep_seed, "RNG seed");

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "config: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        std::reverse(args.begin(), args.end());  // CLI11 consumes back to front
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        std::filesystem::create_directories(out_dir);

        if (*c_classify) {
            Verdict v = theorem_applies(classify_p.parse());
            std::cout << v.to_json() << "\n";
            return v.applies ? kExitOk : kExitGate;
        }

        if (*c_certify) {
            ParamSet P = certify_p.parse();
            if (!verify_only.empty()) {
                FullCertificate cert = certificate_from_json(read_file(verify_only));
                VerifyReport rep = verify_certificate(P, cert);
                std::cout << (json_out ? rep.to_json()
                                       : "verified rows: " +
                                             std::to_string(rep.rows.size() - rep.failures()) +
                                             "/" + std::to_string(rep.rows.size()))
                          << "\n";
                return rep.ok() ? kExitOk : kExitInfeasible;
            }
            Verdict v = theorem_applies(P);
            if (!v.applies) {
                std::cerr << "hypotheses not satisfied:\n" << v.to_json() << "\n";
                return kExitGate;
            }
            FullCertificate cert;
            try {
                cert = build_full_certificate(P);
            } catch (const InfeasibleError& e) {
                std::cerr << "infeasible: " << e.what() << "\n";
                return kExitInfeasible;
            }
            std::string path = (std::filesystem::path(out_dir) / cert_out).string();
            std::ofstream(path) << certificate_to_json(cert) << "\n";
            std::cout << "theta = " << cert.theta.str() << "\n";
            for (const auto& sub : cert.subs)
                std::cout << "[" << sub.lemma << " " << sub.piece << "] " << sub.branch
                          << "  theta=" << sub.theta.str() << "\n";
            std::cout << "certificate written to " << path << "\n";
            VerifyReport rep = verify_certificate(P, cert);
            std::cout << "verification: " << (rep.ok() ? "all rows pass" : "FAILED") << " ("
                      << rep.rows.size() << " rows)\n";
            return rep.ok() ? kExitOk : kExitInfeasible;
        }

        if (*c_verify) {
            FullCertificate cert = certificate_from_json(read_file(verify_file));
            VerifyReport rep = verify_certificate(cert.params, cert);
            if (json_out) {
                std::cout << rep.to_json() << "\n";
            } else {
                std::cout << "verified rows: " << rep.rows.size() - rep.failures() << "/"
                          << rep.rows.size() << "\n";
                for (const auto& l : rep.failed_labels()) std::cout << "FAIL " << l << "\n";
            }
            return rep.ok() ? kExitOk : kExitInfeasible;
        }

        if (*c_sim) {
            ParamSet P = sim_p.parse();
            if (P.d != 1 && P.d != 2) {
                std::cerr << "simulate supports d = 1 or 2\n";
                return kExitUsage;
            }
            GridField u0 = sim_g.initial(P.d);
            EvolveConfig cfg;
            cfg.lambda = P.lambda;
            cfg.sigma = P.sigma.to_double();
            cfg.b = P.b.to_double();
            cfg.rho = sim_rho;
            cfg.dt = sim_dt;
            cfg.T = sim_T;
            cfg.snapshot_stride = sim_stride;
            cfg.sobolev_s = sim_s_norm;
            cfg.ceiling_factor = sim_ceiling;
            cfg.dealias = c_sim->count("--dealias") != 0 || c_sim->count("--no-dealias") != 0
                              ? sim_dealias
                              : cfg.sigma >= 3.0;
            Trajectory tr = evolve(u0, cfg);
            std::filesystem::path dir(out_dir);
            write_conservation_csv((dir / "conservation.csv").string(), tr);
            auto snap = [&](std::size_t i) {
                char name[64];
                std::snprintf(name, sizeof(name), "snapshot_%05zu.field", i);
                write_snapshot((dir / name).string(), tr.states[i], tr.times[i], P);
            };
            if (snapshot_every > 0)
                for (std::size_t i = 0; i < tr.states.size(); i += snapshot_every) snap(i);
            snap(0);
            if (tr.states.size() > 1) snap(tr.states.size() - 1);
            double m0 = tr.mass_log.front(), e0 = tr.energy_log.front();
            double dm = 0, de = 0;
            for (std::size_t i = 0; i < tr.times.size(); ++i) {
                dm = std::max(dm, std::abs(tr.mass_log[i] - m0) / std::abs(m0));
                de = std::max(de, std::abs(tr.energy_log[i] - e0) / std::abs(e0));
            }
            std::printf("steps logged: %zu  final t = %.17g\n", tr.times.size(),
                        tr.times.back());
            std::printf("relative mass drift   = %.3e\n", dm);
            std::printf("relative energy drift = %.3e\n", de);
            double bmf = boundary_mass_fraction(tr.states.back());
            if (bmf > 1e-10)
                std::printf("WARNING: %.3e of the mass sits in the outer half of the "
                            "box; enlarge L\n",
                            bmf);
            if (tr.blow_up) {
                std::printf("BLOW-UP flagged at t = %.17g\n", tr.blow_up_time);
                return kExitBlowup;
            }
            return kExitOk;
        }

        if (*c_pic) {
            ParamSet P = pic_p.parse();
            if (P.d != 1 && P.d != 2) {
                std::cerr << "picard supports d = 1 or 2\n";
                return kExitUsage;
            }
            GridField u0 = pic_g.initial(P.d);
            Weight w = make_weight(u0.grid, P.b.to_double(),
                                   effective_rho(u0.grid, pic_rho));
            PicardResult pr = picard_solve(u0, w, P.lambda, P.sigma.to_double(), pic_T,
                                           pic_m, pic_tol, pic_maxit, 1.0);
            std::printf("converged: %s after %d iterations\n",
                        pr.converged ? "yes" : "no", pr.iterates);
            std::printf("contraction ratios:");
            for (double r : pr.ratios) std::printf(" %.4e", r);
            std::printf("\n");
            for (const auto& st : pr.traj.states)
                if (!std::isfinite(mass(st))) return kExitBlowup;
            if (pic_compare) {
                EvolveConfig cfg;
                cfg.lambda = P.lambda;
                cfg.sigma = P.sigma.to_double();
                cfg.b = P.b.to_double();
                cfg.rho = pic_rho;
                cfg.dt = pic_dt;
                cfg.T = pic_T;
                cfg.snapshot_stride = 0;
                Trajectory tr = evolve(u0, cfg);
                std::printf("rel L2 gap vs evolve = %.3e\n",
                            rel_l2_error(pr.traj.states.back(), tr.states.back()));
            }
            return kExitOk;
        }

        if (*c_scale) {
            ParamSet P = scale_p.parse();
            GridField u0 = scale_g.initial(P.d);
            double alpha = scale_alpha;
            // Static: Hdot^s norm factor alpha^{s + (4-b)/sigma - d/2}.
            double s_test = 1.0;
            GridField us = scaling_transform(u0, alpha, P);
            double factor = sobolev_norm(us, s_test, true) / sobolev_norm(u0, s_test, true);
            double predicted = std::pow(
                alpha, s_test + (4.0 - P.b.to_double()) / P.sigma.to_double() - P.d / 2.0);
            std::printf("static Hdot^1 factor: %.12e (predicted %.12e, rel err %.3e)\n",
                        factor, predicted, std::abs(factor - predicted) / predicted);
            // Dynamic: evolve then scale vs scale then evolve (rho -> rho/alpha).
            EvolveConfig ca;
            ca.lambda = P.lambda;
            ca.sigma = P.sigma.to_double();
            ca.b = P.b.to_double();
            ca.dt = scale_dt;
            ca.T = std::pow(alpha, 4) * scale_t;
            ca.snapshot_stride = 0;
            ca.rho = u0.grid.h() / 2;
            GridField left = scaling_transform(evolve(u0, ca).states.back(), alpha, P);
            EvolveConfig cb = ca;
            cb.T = scale_t;
            cb.rho = (u0.grid.h() / 2) / alpha;
            GridField right = evolve(scaling_transform(u0, alpha, P), cb).states.back();
            std::printf("dynamic covariance rel L2 = %.3e\n", rel_l2_error(left, right));
            return kExitOk;
        }

        if (*c_sweep) {
            SweepResult res = run_sweep(sweep_n, sweep_seed);
            std::cout << (json_out ? res.to_json() : res.table());
            return res.verified_count == int(res.items.size()) ? kExitOk : kExitInfeasible;
        }
    } catch (const GateError& e) {
        std::cerr << "gate: " << e.what() << "\n";
        return kExitGate;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
