#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace ibnls {

using cdouble = std::complex<double>;

/// Uniform periodic grid on the box [-L, L)^d, d = 1 or 2, n points per axis.
struct Grid {
    int d = 1;
    int n = 256;     // power of two, >= 8
    double L = 16.0;  // box half-length

    double h() const { return 2.0 * L / n; }
    std::size_t size() const { return d == 1 ? std::size_t(n) : std::size_t(n) * n; }
    double coord(int i) const { return -L + i * h(); }
    /// Frequency for FFT index k on one axis: pi*k'/L with k' in [-n/2, n/2).
    double freq(int k) const { return M_PI * (k < n / 2 ? k : k - n) / L; }

    void validate() const;
    bool operator==(const Grid& o) const { return d == o.d && n == o.n && L == o.L; }
};

struct GridField {
    Grid grid;
    std::vector<cdouble> values;

    static GridField zeros(const Grid& g) { return {g, std::vector<cdouble>(g.size())}; }
};

/// Regularized samples of |x|^{-b}: max(|x|, rho)^{-b} at the grid nodes.
struct Weight {
    Grid grid;
    double b = 0.0;
    double rho = 0.0;
    std::vector<double> values;
};

Weight make_weight(const Grid& grid, double b, double rho);

/// In-place unnormalized forward DFT (FFTW sign -1) over the grid.
void fft_forward(const Grid& grid, std::vector<cdouble>& data);
/// In-place inverse DFT scaled by 1/N, so inverse(forward(x)) == x.
void fft_inverse(const Grid& grid, std::vector<cdouble>& data);

/// |xi|^2 at flattened spectral index idx.
double xi_squared(const Grid& grid, std::size_t idx);

/// Discrete L^2 mass h^d sum |u|^2.
double mass(const GridField& u);

/// Sobolev norm via the spectral multiplier |xi|^s (homogeneous) or
/// (1+|xi|^2)^{s/2} (nonhomogeneous).
double sobolev_norm(const GridField& u, double s, bool homogeneous);

/// Nodal Lebesgue norm (h^d sum |u|^q)^{1/q}; q = INFINITY gives max|u|.
double lq_norm(const GridField& u, double q);

/// Fraction of the mass sitting in the outer half of the box (|x| > L/2 in
/// the sup-norm sense); a cheap domain-truncation diagnostic.
double boundary_mass_fraction(const GridField& u);

}  // namespace ibnls
