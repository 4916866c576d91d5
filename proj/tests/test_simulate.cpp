#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ibnls/simulate.hpp"

#include <cstdio>
#include <filesystem>
#include <random>

using namespace ibnls;

namespace {

GridField random_field(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    GridField u = GridField::zeros(g);
    for (auto& v : u.values) v = cdouble(dist(rng), dist(rng));
    return u;
}

ParamSet params1d() { return ParamSet{1, Rational(1), rat(1, 2), Rational(2), 1.0}; }

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS(Grid{3, 64, 1.0}.validate());
    CHECK_THROWS(Grid{1, 48, 1.0}.validate());
    CHECK_THROWS(Grid{1, 64, -1.0}.validate());
    Grid g{2, 16, 4.0};
    g.validate();
    CHECK(g.size() == 256);
    CHECK(g.h() == doctest::Approx(0.5));
}

TEST_CASE("fft round trip") {
    for (int d : {1, 2}) {
        Grid g{d, d == 1 ? 128 : 32, 5.0};
        GridField u = random_field(g, 42 + d);
        GridField v = u;
        fft_forward(g, v.values);
        fft_inverse(g, v.values);
        CHECK(rel_l2_error(v, u) < 1e-12);
    }
}

TEST_CASE("linear propagator: single mode, unitarity, identity at t=0") {
    Grid g{1, 64, M_PI};
    GridField u = mode_field(g, 3);
    CHECK(mass(u) == doctest::Approx(2 * M_PI).epsilon(1e-13));

    GridField v = linear_propagate(u, 0.1);
    cdouble expect = std::exp(cdouble(0, 8.1));  // |xi|^4 = 81 at k = 3, L = pi
    double err = 0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        err = std::max(err, std::abs(v.values[i] - expect * u.values[i]));
    CHECK(err < 1e-12);

    GridField w = linear_propagate(u, 0.0);
    CHECK(rel_l2_error(w, u) < 1e-14);

    GridField r = random_field(g, 5);
    double m0 = mass(r);
    CHECK(std::abs(mass(linear_propagate(r, 0.37)) - m0) / m0 < 1e-12);
}

TEST_CASE("nonlinear phase: identity at lambda=0, closed form, pure phase") {
    Grid g{1, 64, 8.0};
    Weight w = make_weight(g, 1.0, g.h() / 2);
    GridField u = random_field(g, 9);

    GridField v0 = nonlinear_phase(u, w, 0.0, 2.0, 0.1);
    CHECK(rel_l2_error(v0, u) == 0.0);

    // constant field: each node rotates by -lambda dt w(x) |c|^sigma
    GridField c = GridField::zeros(g);
    for (auto& z : c.values) z = cdouble(0.5, 0.5);
    double dt = 0.2, lambda = 1.3, sigma = 2.0;
    GridField cv = nonlinear_phase(c, w, lambda, sigma, dt);
    std::size_t i = 7;
    double expect_phase = -lambda * dt * w.values[i] * std::pow(std::abs(c.values[i]), sigma);
    cdouble expect = c.values[i] * std::exp(cdouble(0, expect_phase));
    CHECK(std::abs(cv.values[i] - expect) < 1e-15);

    GridField vu = nonlinear_phase(u, w, 2.0, 3.0, 0.05);
    for (std::size_t k = 0; k < u.values.size(); ++k)
        CHECK(std::abs(std::abs(vu.values[k]) - std::abs(u.values[k])) < 1e-15);
}

TEST_CASE("strang step reduces to the free flow when lambda = 0") {
    Grid g{1, 128, 8.0};
    Weight w = make_weight(g, 0.5, g.h() / 2);
    GridField u = random_field(g, 21);
    GridField a = strang_step(u, w, 0.0, 2.0, 1e-3);
    GridField b = linear_propagate(u, 1e-3);
    CHECK(rel_l2_error(a, b) < 1e-13);

    GridField c = strang_step(u, w, 1.0, 2.0, 1e-3);
    CHECK(std::abs(mass(c) - mass(u)) / mass(u) < 1e-12);
}

TEST_CASE("mass and energy closed forms") {
    Grid g{1, 256, 16.0};
    GridField u = gaussian_field(g);
    CHECK(mass(u) == doctest::Approx(std::sqrt(M_PI / 2)).epsilon(1e-10));
    Weight w = make_weight(g, 0.5, g.h() / 2);
    CHECK(energy(u, w, 0.0, 2.0) ==
          doctest::Approx(1.5 * std::sqrt(M_PI / 2)).epsilon(1e-10));

    Grid gm{1, 64, M_PI};
    GridField m = mode_field(gm, 3);
    Weight wm = make_weight(gm, 1.0, gm.h() / 2);
    CHECK(energy(m, wm, 0.0, 2.0) == doctest::Approx(81 * M_PI).epsilon(1e-12));

    GridField z = GridField::zeros(g);
    CHECK(mass(z) == 0.0);
    CHECK(energy(z, w, 1.0, 2.0) == 0.0);
}

TEST_CASE("sobolev norms") {
    Grid g{1, 64, M_PI};
    GridField u = mode_field(g, 3);
    CHECK(sobolev_norm(u, 0.0, true) == doctest::Approx(std::sqrt(mass(u))).epsilon(1e-13));
    CHECK(sobolev_norm(u, 1.0, true) ==
          doctest::Approx(3 * std::sqrt(2 * M_PI)).epsilon(1e-12));
    CHECK(sobolev_norm(GridField::zeros(g), 2.0, false) == 0.0);
}

TEST_CASE("weight samples") {
    Grid g{1, 64, 8.0};
    Weight w = make_weight(g, 1.0, g.h() / 2);
    // node at x = 2
    int i2 = int((2.0 + g.L) / g.h());
    CHECK(w.values[i2] == doctest::Approx(0.5).epsilon(1e-14));
    // node at the origin takes the regularized value
    int i0 = g.n / 2;
    CHECK(g.coord(i0) == 0.0);
    CHECK(w.values[i0] == doctest::Approx(1.0 / (g.h() / 2)).epsilon(1e-14));
    // radially nonincreasing
    int i1 = int((1.0 + g.L) / g.h());
    CHECK(w.values[i1] >= w.values[i2]);
    CHECK_THROWS(make_weight(g, -1.0, 0.1));
}

TEST_CASE("spacetime norms") {
    Grid g{1, 64, 4.0};
    GridField u = gaussian_field(g);
    Trajectory traj;
    for (int k = 0; k <= 10; ++k) {
        traj.times.push_back(0.1 * k);
        traj.states.push_back(u);
    }
    double lq = lq_norm(u, 4.0);
    CHECK(spacetime_norm(traj, 2.0, 4.0) == doctest::Approx(std::sqrt(1.0) * lq));
    CHECK(spacetime_norm(traj, INFINITY, 4.0) == doctest::Approx(lq));
    CHECK(spacetime_norm(traj, 2.0, INFINITY) ==
          doctest::Approx(std::sqrt(1.0) * lq_norm(u, INFINITY)));

    Trajectory zero;
    zero.times = {0.0, 1.0};
    zero.states = {GridField::zeros(g), GridField::zeros(g)};
    CHECK(spacetime_norm(zero, 2.0, 2.0) == 0.0);
}

TEST_CASE("evolve: free single mode matches the closed form at every snapshot") {
    Grid g{1, 64, M_PI};
    GridField u0 = mode_field(g, 3);
    EvolveConfig cfg;
    cfg.lambda = 0.0;
    cfg.b = 0.5;
    cfg.dt = 1e-3;
    cfg.T = 0.05;
    cfg.snapshot_stride = 10;
    Trajectory tr = evolve(u0, cfg);
    REQUIRE_FALSE(tr.blow_up);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        cdouble expect = std::exp(cdouble(0, 81.0 * tr.times[k]));
        double err = 0;
        for (std::size_t i = 0; i < u0.values.size(); ++i)
            err = std::max(err, std::abs(tr.states[k].values[i] - expect * u0.values[i]));
        CHECK(err < 1e-12);
    }
}

TEST_CASE("evolve: gaussian run conserves mass; blow-up ceiling trips") {
    Grid g{1, 256, 32.0};
    GridField u0 = gaussian_field(g);
    EvolveConfig cfg;
    cfg.dt = 1e-4;
    cfg.T = 0.01;
    cfg.snapshot_stride = 10;
    Trajectory tr = evolve(u0, cfg);
    REQUIRE_FALSE(tr.blow_up);
    double m0 = tr.mass_log.front();
    for (double m : tr.mass_log) CHECK(std::abs(m - m0) / m0 < 1e-10);

    EvolveConfig tight = cfg;
    tight.ceiling_factor = 1.0 - 1e-9;  // any growth at all trips the ceiling
    tight.lambda = 50.0;
    Trajectory tb = evolve(u0, tight);
    CHECK(tb.blow_up);
    CHECK(tb.blow_up_time > 0.0);
    CHECK(tb.times.size() < std::size_t(cfg.T / cfg.dt) + 1);
}

TEST_CASE("picard: free flow converges immediately; contraction for short intervals") {
    Grid g{1, 128, 16.0};
    GridField u0 = gaussian_field(g);
    Weight w = make_weight(g, 0.5, g.h() / 2);

    PicardResult free = picard_solve(u0, w, 0.0, 2.0, 1e-2, 9, 1e-10, 20, 1.0);
    CHECK(free.converged);
    CHECK(free.iterates == 1);

    PicardResult pr = picard_solve(u0, w, 1.0, 2.0, 1e-2, 17, 1e-10, 40, 1.0);
    CHECK(pr.converged);
    for (double r : pr.ratios) CHECK(r < 1.0);

    // too-long interval with large data: the iteration does not contract
    GridField big = gaussian_field(g, 6.0);
    PicardResult div = picard_solve(big, w, 1.0, 2.0, 10.0, 17, 1e-10, 25, 1.0);
    CHECK_FALSE(div.converged);
}

TEST_CASE("scaling transform") {
    Grid g{1, 256, 16.0};
    GridField u = gaussian_field(g);
    ParamSet P = params1d();

    GridField id = scaling_transform(u, 1.0, P);
    CHECK(id.grid.L == g.L);
    CHECK(rel_l2_error(id, u) == 0.0);

    GridField s2 = scaling_transform(u, 2.0, P);
    CHECK(s2.grid.L == doctest::Approx(8.0));
    // Hdot^s factor alpha^{s + (4-b)/sigma - d/2} at s=1: 2^{9/4}
    double factor = sobolev_norm(s2, 1.0, true) / sobolev_norm(u, 1.0, true);
    CHECK(std::abs(factor - std::pow(2.0, 2.25)) < 1e-8);
    // mass factor alpha^{2(4-b)/sigma - d}: 2^{5/2}
    CHECK(mass(s2) / mass(u) == doctest::Approx(std::pow(2.0, 2.5)).epsilon(1e-10));

    CHECK_THROWS(scaling_transform(u, -1.0, P));
}

TEST_CASE("d = 2: propagator and conservation") {
    Grid g{2, 32, M_PI};
    GridField u = mode_field(g, 1, 2);
    // |xi|^2 = 1 + 4 -> phase 25 t
    GridField v = linear_propagate(u, 0.01);
    cdouble expect = std::exp(cdouble(0, 0.25));
    double err = 0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        err = std::max(err, std::abs(v.values[i] - expect * u.values[i]));
    CHECK(err < 1e-12);

    EvolveConfig cfg;
    cfg.dt = 1e-4;
    cfg.T = 2e-3;
    cfg.b = 0.5;
    cfg.snapshot_stride = 5;
    Trajectory tr = evolve(gaussian_field(g), cfg);
    REQUIRE_FALSE(tr.blow_up);
    double m0 = tr.mass_log.front();
    for (double m : tr.mass_log) CHECK(std::abs(m - m0) / m0 < 1e-10);
}

TEST_CASE("d = 2: weight samples and picard/evolve cross-validation") {
    Grid g{2, 32, 8.0};
    Weight w = make_weight(g, 1.0, g.h() / 2);
    // node at (x, y) = (3, 4): |x| = 5
    std::size_t idx = std::size_t((3.0 + g.L) / g.h()) * g.n + std::size_t((4.0 + g.L) / g.h());
    CHECK(w.values[idx] == doctest::Approx(0.2).epsilon(1e-13));

    GridField u0 = gaussian_field(g);
    Weight wb = make_weight(g, 0.5, g.h() / 2);
    PicardResult pr = picard_solve(u0, wb, 1.0, 2.0, 2e-3, 9, 1e-10, 40, 1.0);
    REQUIRE(pr.converged);
    EvolveConfig cfg;
    cfg.dt = 5e-5;
    cfg.T = 2e-3;
    cfg.b = 0.5;
    cfg.snapshot_stride = 0;
    GridField ue = evolve(u0, cfg).states.back();
    CHECK(rel_l2_error(pr.traj.states.back(), ue) < 1e-4);
}

TEST_CASE("time reversal error is small") {
    Grid g{1, 256, 32.0};
    EvolveConfig cfg;
    cfg.dt = 1e-4;
    cfg.T = 5e-3;
    CHECK(time_reversal_error(gaussian_field(g), cfg) < 1e-8);
}

TEST_CASE("snapshot and CSV round trip") {
    namespace fs = std::filesystem;
    Grid g{1, 64, 8.0};
    GridField u = gaussian_field(g);
    fs::path dir = fs::temp_directory_path() / "ibnls_test_io";
    fs::create_directories(dir);

    std::string snap = (dir / "u.field").string();
    write_snapshot(snap, u, 0.25, params1d());
    double t = 0;
    GridField v = read_snapshot(snap, &t);
    CHECK(t == 0.25);
    CHECK(v.grid == u.grid);
    CHECK(rel_l2_error(v, u) == 0.0);

    Trajectory tr;
    tr.times = {0.0, 0.1};
    tr.states = {u, u};
    tr.mass_log = {1.0, 1.0};
    tr.energy_log = {2.0, 2.0};
    tr.hs_log = {3.0, 3.0};
    std::string csv = (dir / "log.csv").string();
    write_conservation_csv(csv, tr);
    std::FILE* f = std::fopen(csv.c_str(), "r");
    REQUIRE(f != nullptr);
    char line[128];
    REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
    CHECK(std::string(line) == "time,mass,energy,Hs_norm\n");
    std::fclose(f);
    fs::remove_all(dir);
}
