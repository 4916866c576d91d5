#include "ibnls/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ibnls {

void Grid::validate() const {
    if (d != 1 && d != 2) throw std::invalid_argument("Grid: d must be 1 or 2");
    if (n < 8 || (n & (n - 1)) != 0)
        throw std::invalid_argument("Grid: n must be a power of two >= 8");
    if (!(L > 0)) throw std::invalid_argument("Grid: L must be positive");
}

namespace {

// FFTW's planner is not thread-safe; plans are cached per (d, n) and executed
// on caller arrays (FFTW_UNALIGNED allows that).
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(const Grid& g) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(g.d, g.n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<cdouble> scratch(g.size());
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair pp;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (g.d == 1) {
        pp.fwd = fftw_plan_dft_1d(g.n, ptr, ptr, FFTW_FORWARD, flags);
        pp.bwd = fftw_plan_dft_1d(g.n, ptr, ptr, FFTW_BACKWARD, flags);
    } else {
        pp.fwd = fftw_plan_dft_2d(g.n, g.n, ptr, ptr, FFTW_FORWARD, flags);
        pp.bwd = fftw_plan_dft_2d(g.n, g.n, ptr, ptr, FFTW_BACKWARD, flags);
    }
    return cache.emplace(key, pp).first->second;
}

}  // namespace

void fft_forward(const Grid& grid, std::vector<cdouble>& data) {
    grid.validate();
    if (data.size() != grid.size()) throw std::invalid_argument("fft: size mismatch");
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_for(grid).fwd, ptr, ptr);
}

void fft_inverse(const Grid& grid, std::vector<cdouble>& data) {
    grid.validate();
    if (data.size() != grid.size()) throw std::invalid_argument("fft: size mismatch");
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_for(grid).bwd, ptr, ptr);
    double scale = 1.0 / double(grid.size());
    for (auto& v : data) v *= scale;
}

double xi_squared(const Grid& grid, std::size_t idx) {
    if (grid.d == 1) {
        double xi = grid.freq(int(idx));
        return xi * xi;
    }
    double xi0 = grid.freq(int(idx / grid.n));
    double xi1 = grid.freq(int(idx % grid.n));
    return xi0 * xi0 + xi1 * xi1;
}

Weight make_weight(const Grid& grid, double b, double rho) {
    grid.validate();
    if (!(b > 0)) throw std::invalid_argument("make_weight: b must be positive");
    if (!(rho > 0)) throw std::invalid_argument("make_weight: rho must be positive");
    Weight w{grid, b, rho, std::vector<double>(grid.size())};
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        double r;
        if (grid.d == 1) {
            r = std::abs(grid.coord(int(i)));
        } else {
            double x = grid.coord(int(i / grid.n));
            double y = grid.coord(int(i % grid.n));
            r = std::hypot(x, y);
        }
        w.values[i] = std::pow(std::max(r, rho), -b);
    }
    return w;
}

double mass(const GridField& u) {
    double s = 0.0;
    for (const auto& v : u.values) s += std::norm(v);
    return s * std::pow(u.grid.h(), u.grid.d);
}

double sobolev_norm(const GridField& u, double s, bool homogeneous) {
    if (s < 0) throw std::invalid_argument("sobolev_norm: s must be >= 0");
    std::vector<cdouble> hat = u.values;
    fft_forward(u.grid, hat);
    double acc = 0.0;
    for (std::size_t i = 0; i < hat.size(); ++i) {
        double xi2 = xi_squared(u.grid, i);
        double mult = homogeneous ? std::pow(xi2, s / 2) : std::pow(1.0 + xi2, s / 2);
        acc += mult * mult * std::norm(hat[i]);
    }
    // Parseval: h^d sum_x |u|^2 = (2L)^d sum_k |hat/N|^2.
    double N = double(u.grid.size());
    return std::sqrt(acc / (N * N) * std::pow(2.0 * u.grid.L, u.grid.d));
}

double lq_norm(const GridField& u, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (const auto& v : u.values) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(q >= 1)) throw std::invalid_argument("lq_norm: q must be >= 1");
    double s = 0.0;
    for (const auto& v : u.values) s += std::pow(std::abs(v), q);
    return std::pow(s * std::pow(u.grid.h(), u.grid.d), 1.0 / q);
}

double boundary_mass_fraction(const GridField& u) {
    double total = 0.0, outer = 0.0;
    const Grid& g = u.grid;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        double m = std::norm(u.values[i]);
        total += m;
        double r;
        if (g.d == 1) {
            r = std::abs(g.coord(int(i)));
        } else {
            r = std::max(std::abs(g.coord(int(i / g.n))), std::abs(g.coord(int(i % g.n))));
        }
        if (r > g.L / 2) outer += m;
    }
    return total > 0 ? outer / total : 0.0;
}

}  // namespace ibnls
