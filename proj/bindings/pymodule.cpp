#include "ibnls/certify.hpp"
#include "ibnls/simulate.hpp"
#include "ibnls/sweep.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ibnls;

namespace {

ParamSet make_params(int d, const std::string& s, const std::string& b,
                     const std::string& sigma, double lambda) {
    ParamSet p;
    p.d = d;
    p.s = Rational::parse(s);
    p.b = Rational::parse(b);
    p.sigma = Rational::parse(sigma);
    p.lambda = lambda;
    p.validate();
    return p;
}

using carray = py::array_t<cdouble, py::array::c_style | py::array::forcecast>;

GridField field_from_array(const carray& values, double L) {
    GridField u;
    if (values.ndim() == 1) {
        u.grid = Grid{1, int(values.shape(0)), L};
    } else if (values.ndim() == 2) {
        if (values.shape(0) != values.shape(1))
            throw std::invalid_argument("2-d fields must be square");
        u.grid = Grid{2, int(values.shape(0)), L};
    } else {
        throw std::invalid_argument("field arrays must be 1-d or 2-d");
    }
    u.grid.validate();
    u.values.assign(values.data(), values.data() + u.grid.size());
    return u;
}

py::array field_to_array(const GridField& u) {
    if (u.grid.d == 1)
        return py::array_t<cdouble>(
            std::vector<py::ssize_t>{py::ssize_t(u.values.size())}, u.values.data());
    return py::array_t<cdouble>(std::vector<py::ssize_t>{u.grid.n, u.grid.n},
                                u.values.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "exact well-posedness certificates and a pseudospectral solver for "
              "the inhomogeneous biharmonic NLS equation";

    m.def(
        "classify",
        [](int d, const std::string& s, const std::string& b, const std::string& sigma,
           double lambda) { return theorem_applies(make_params(d, s, b, sigma, lambda)).to_json(); },
        py::arg("d"), py::arg("s"), py::arg("b"), py::arg("sigma"), py::arg("lambda") = 1.0,
        "Verdict JSON for the local well-posedness hypotheses");

    m.def(
        "certify",
        [](int d, const std::string& s, const std::string& b, const std::string& sigma,
           double lambda) {
            return certificate_to_json(
                build_full_certificate(make_params(d, s, b, sigma, lambda)));
        },
        py::arg("d"), py::arg("s"), py::arg("b"), py::arg("sigma"), py::arg("lambda") = 1.0,
        "Build a full exponent certificate (JSON)");

    m.def(
        "verify",
        [](const std::string& cert_json) {
            FullCertificate cert = certificate_from_json(cert_json);
            return verify_certificate(cert.params, cert).to_json();
        },
        py::arg("certificate_json"), "Re-verify a certificate from its JSON form");

    m.def(
        "sweep",
        [](int n, std::uint64_t seed) { return run_sweep(n, seed).to_json(); },
        py::arg("n"), py::arg("seed") = 1, "Randomized certificate soundness sweep (JSON)");

    m.def(
        "gaussian_field",
        [](int d, int n, double L, double amp) {
            return field_to_array(gaussian_field(Grid{d, n, L}, amp));
        },
        py::arg("d"), py::arg("n"), py::arg("L"), py::arg("amp") = 1.0);

    m.def(
        "mode_field",
        [](int d, int n, double L, int k0, int k1) {
            return field_to_array(mode_field(Grid{d, n, L}, k0, k1));
        },
        py::arg("d"), py::arg("n"), py::arg("L"), py::arg("k0"), py::arg("k1") = 0);

    m.def(
        "mass", [](const carray& v, double L) { return mass(field_from_array(v, L)); },
        py::arg("values"), py::arg("L"));

    m.def(
        "energy",
        [](const carray& v, double L, double lambda, double sigma, double b, double rho) {
            GridField u = field_from_array(v, L);
            Weight w = make_weight(u.grid, b, effective_rho(u.grid, rho));
            return energy(u, w, lambda, sigma);
        },
        py::arg("values"), py::arg("L"), py::arg("lambda"), py::arg("sigma"), py::arg("b"),
        py::arg("rho") = -1.0);

    m.def(
        "sobolev_norm",
        [](const carray& v, double L, double s, bool homogeneous) {
            return sobolev_norm(field_from_array(v, L), s, homogeneous);
        },
        py::arg("values"), py::arg("L"), py::arg("s"), py::arg("homogeneous") = false);

    m.def(
        "linear_propagate",
        [](const carray& v, double L, double t) {
            return field_to_array(linear_propagate(field_from_array(v, L), t));
        },
        py::arg("values"), py::arg("L"), py::arg("t"));

    m.def(
        "evolve",
        [](const carray& v, double L, double lambda, double sigma, double b, double rho,
           double dt, double T, int stride, double norm_s, double ceiling, bool dealias) {
            GridField u0 = field_from_array(v, L);
            EvolveConfig cfg;
            cfg.lambda = lambda;
            cfg.sigma = sigma;
            cfg.b = b;
            cfg.rho = rho;
            cfg.dt = dt;
            cfg.T = T;
            cfg.snapshot_stride = stride;
            cfg.sobolev_s = norm_s;
            cfg.ceiling_factor = ceiling;
            cfg.dealias = dealias;
            Trajectory tr = evolve(u0, cfg);
            py::dict out;
            out["times"] = tr.times;
            out["mass"] = tr.mass_log;
            out["energy"] = tr.energy_log;
            out["hs_norm"] = tr.hs_log;
            out["final"] = field_to_array(tr.states.back());
            out["blow_up"] = tr.blow_up;
            return out;
        },
        py::arg("values"), py::arg("L"), py::arg("lambda"), py::arg("sigma"), py::arg("b"),
        py::arg("rho") = -1.0, py::arg("dt") = 1e-4, py::arg("T") = 0.1,
        py::arg("stride") = 10, py::arg("norm_s") = 1.0, py::arg("ceiling") = 1e6,
        py::arg("dealias") = false);

    m.def(
        "picard",
        [](const carray& v, double L, double lambda, double sigma, double b, double rho,
           double T, int m_nodes, double tol, int max_iter, double norm_s) {
            GridField u0 = field_from_array(v, L);
            Weight w = make_weight(u0.grid, b, effective_rho(u0.grid, rho));
            PicardResult pr =
                picard_solve(u0, w, lambda, sigma, T, m_nodes, tol, max_iter, norm_s);
            py::dict out;
            out["converged"] = pr.converged;
            out["iterates"] = pr.iterates;
            out["ratios"] = pr.ratios;
            out["times"] = pr.traj.times;
            out["final"] = field_to_array(pr.traj.states.back());
            return out;
        },
        py::arg("values"), py::arg("L"), py::arg("lambda"), py::arg("sigma"), py::arg("b"),
        py::arg("rho") = -1.0, py::arg("T") = 1e-2, py::arg("m_nodes") = 33,
        py::arg("tol") = 1e-10, py::arg("max_iter") = 50, py::arg("norm_s") = 1.0);

    m.def(
        "scaling_transform",
        [](const carray& v, double L, double alpha, int d, const std::string& s,
           const std::string& b, const std::string& sigma) {
            GridField u = field_from_array(v, L);
            GridField out = scaling_transform(u, alpha, make_params(d, s, b, sigma, 1.0));
            return py::make_tuple(field_to_array(out), out.grid.L);
        },
        py::arg("values"), py::arg("L"), py::arg("alpha"), py::arg("d"), py::arg("s"),
        py::arg("b"), py::arg("sigma"),
        "Returns (scaled values, new box half-length L/alpha)");
}
