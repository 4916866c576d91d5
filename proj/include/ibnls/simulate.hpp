#pragma once

#include "ibnls/classify.hpp"
#include "ibnls/grid.hpp"

#include <string>
#include <vector>

namespace ibnls {

/// Time samples of a field with conserved-quantity logs aligned to them.
struct Trajectory {
    std::vector<double> times;
    std::vector<GridField> states;
    std::vector<double> mass_log;
    std::vector<double> energy_log;
    std::vector<double> hs_log;
    bool blow_up = false;
    double blow_up_time = 0.0;
};

/// Free flow of i u_t + Delta^2 u = 0: spectral multiplier exp(i t |xi|^4).
GridField linear_propagate(const GridField& u, double t);

/// Exact solution of the frozen-dispersion subflow i u_t = lambda w |u|^sigma u:
/// pointwise phase rotation, |u| invariant.
GridField nonlinear_phase(const GridField& u, const Weight& w, double lambda, double sigma,
                          double dt);

/// Half nonlinear phase, full linear propagator, half nonlinear phase.
/// dealias applies the 2/3-rule truncation after each phase substep.
GridField strang_step(const GridField& u, const Weight& w, double lambda, double sigma,
                      double dt, bool dealias = false);

struct EvolveConfig {
    double lambda = 1.0;
    double sigma = 2.0;
    double b = 0.5;
    double rho = -1.0;  // regularization radius; < 0 means h/2
    double dt = 1e-4;
    double T = 0.1;
    int snapshot_stride = 1;       // log every k-th step (first and last always kept)
    double sobolev_s = 1.0;        // norm used for logs and the blow-up ceiling
    double ceiling_factor = 1e6;   // abort when ||u||_{H^s} exceeds this times its start
    bool dealias = false;
};

double effective_rho(const Grid& grid, double rho);

/// Repeated Strang steps with snapshot logging; sets blow_up (and truncates)
/// when the solution leaves the ceiling or stops being finite.
Trajectory evolve(const GridField& u0, const EvolveConfig& cfg);

struct PicardResult {
    Trajectory traj;  // final iterate sampled at the quadrature nodes
    int iterates = 0;
    std::vector<double> ratios;  // ||u_{k+1}-u_k|| / ||u_k-u_{k-1}||
    bool converged = false;
};

/// Picard iteration for the integral form
///   u(t) = e^{it Delta^2} u0 - i lambda int_0^t e^{i(t-tau) Delta^2} w |u|^sigma u dtau
/// discretized by composite trapezoid on m_nodes nodes over [0, T], starting
/// from the free evolution. Convergence is measured in discrete H^s.
PicardResult picard_solve(const GridField& u0, const Weight& w, double lambda, double sigma,
                          double T, int m_nodes, double tol, int max_iter,
                          double sobolev_s);

/// E = 1/2 int |Delta u|^2 - lambda/(sigma+2) int w |u|^{sigma+2}.
double energy(const GridField& u, const Weight& w, double lambda, double sigma);

/// Trapezoid in time of the nodal L^q norms, to the power p; p or q = INFINITY
/// take maxima instead.
double spacetime_norm(const Trajectory& traj, double p, double q);

/// u_alpha(x) = alpha^{(4-b)/sigma} u(alpha x) realized exactly on the grid
/// with box half-length L/alpha (same n).
GridField scaling_transform(const GridField& u, double alpha, const ParamSet& params);

/// Forward n steps then backward n steps; relative L^2 distance from the
/// initial state. The splitting is symmetric, so this is O(dt^2).
double time_reversal_error(const GridField& u0, const EvolveConfig& cfg);

// Snapshot file: one line of JSON {d, n, L, time, params} followed by raw
// little-endian float64 pairs (re, im), row-major.
void write_snapshot(const std::string& path, const GridField& u, double time,
                    const ParamSet& params);
GridField read_snapshot(const std::string& path, double* time_out = nullptr);

/// CSV with columns time,mass,energy,Hs_norm.
void write_conservation_csv(const std::string& path, const Trajectory& traj);

/// amp * exp(-|x|^2) sampled on the grid.
GridField gaussian_field(const Grid& grid, double amp = 1.0);
/// Single Fourier mode exp(i k . x); k per axis.
GridField mode_field(const Grid& grid, int k0, int k1 = 0);
/// Relative discrete L^2 distance ||a-b|| / ||b||.
double rel_l2_error(const GridField& a, const GridField& b);

}  // namespace ibnls
