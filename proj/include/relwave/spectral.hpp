#pragma once

// Discrete Fourier analysis on the sampled Brillouin zone Q_h = (-pi/h, pi/h]^n.
//
//   forward:  (F g)(xi) = h^n / (2 pi)^{n/2} sum_x g(x) e^{+i x.xi}
//   inverse:  g(x) = (2 pi)^{-n/2} sum_xi (F g)(xi) e^{-i x.xi} prod_j 2 pi / (N_j h)
//
// Momentum index i along an axis carries q = i for i <= N/2 and q = i - N
// otherwise, xi = 2 pi q / (N h).

#include <functional>
#include <vector>

#include "relwave/lattice.hpp"

namespace relwave::spectral {

using clifford::Complex;
using clifford::Multivector;
using lattice::GridSpec;
using lattice::LatticeField;

using Momentum = std::vector<double>;

class SpectralField {
public:
    explicit SpectralField(GridSpec grid);

    const GridSpec& grid() const { return values_.grid(); }
    std::size_t point_count() const { return values_.site_count(); }
    std::size_t blade_count() const { return values_.blade_count(); }

    Momentum momentum(std::size_t point) const;
    // Point index of the momentum with integer labels q (wrapped mod N).
    std::size_t point_index(const std::vector<long>& q) const { return values_.site_index(q); }
    std::vector<int> momentum_labels(std::size_t point) const { return values_.centered_coords(point); }

    Multivector at(std::size_t point) const { return values_.at(point); }
    void set(std::size_t point, const Multivector& v) { values_.set(point, v); }
    Complex component(std::size_t point, clifford::BladeMask b) const { return values_.component(point, b); }
    Complex& component(std::size_t point, clifford::BladeMask b) { return values_.component(point, b); }
    const std::vector<Complex>& data() const { return values_.data(); }
    std::vector<Complex>& data() { return values_.data(); }

    // Riemann weight prod_j 2 pi / (N_j h) of one momentum point.
    double cell_volume() const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(Complex c);

    double max_abs() const { return values_.max_abs(); }

private:
    LatticeField values_;
};

enum class TransformPath { automatic, direct };

SpectralField dft(const LatticeField& f, TransformPath path = TransformPath::automatic);
LatticeField idft(const SpectralField& F, TransformPath path = TransformPath::automatic);

// Momentum-space pairing sum_xi F(xi)^dagger G(xi) * cell volume.
Multivector spectral_inner_product(const SpectralField& F, const SpectralField& G);

// (4/h^2) sum_j sin^2(h xi_j / 2).
double multiplier_d2(const Momentum& xi, double h);

// sum_j -i e_j [sin((1-a)h xi_j) + sin(a h xi_j)]/h + e_{n+j}[cos(a h xi_j) - cos((1-a)h xi_j)]/h.
Multivector multiplier_z(const Momentum& xi, double h, double alpha, clifford::Signature sig);

using MultivectorMultiplier = std::function<Multivector(const Momentum&)>;
using ScalarMultiplier = std::function<Complex(const Momentum&)>;

// Pointwise left multiplication M(xi) F(xi).
SpectralField apply_multiplier(const SpectralField& F, const MultivectorMultiplier& M);
SpectralField apply_multiplier(const SpectralField& F, const ScalarMultiplier& M);

// idft o z_{h,alpha} o dft.
LatticeField dirac_h_alpha(const LatticeField& f, double alpha);

// ||(D_{h,alpha} - m gamma)^2 f - (-Delta_h + m^2) f|| / ||f||, with the left-hand
// side applied spectrally and the Laplacian by its stencil. Zero field gives 0.
double factorization_check(const LatticeField& f, double alpha, double m);

// (f * phi)(x) = sum_y h^n phi(y) f(y - x), by direct summation.
LatticeField convolve(const LatticeField& f, const LatticeField& phi);
// Same convolution through the transform: F[f * phi](xi) = (2pi)^{n/2} F phi(xi) F f(-xi).
LatticeField convolve_spectral(const LatticeField& f, const LatticeField& phi);

enum class ConvolutionPath { automatic, direct, spectral };

// sum_y h^n phi(y) K(x - y), the propagator form used with kernels. The
// automatic path sums directly up to kDirectConvolutionSites sites.
inline constexpr std::size_t kDirectConvolutionSites = 1024;
LatticeField kernel_convolve(const LatticeField& phi, const LatticeField& kernel,
                             ConvolutionPath path = ConvolutionPath::automatic);

// g(x) = f(-x).
LatticeField reflect(const LatticeField& f);

// Kernel whose kernel_convolve reproduces the scalar multiplier:
// K(x) = (2 pi)^{-n} sum_xi c(xi) e^{-i x.xi} * cell volume.
LatticeField kernel_from_multiplier(const GridSpec& grid, const ScalarMultiplier& c);

// Trigonometric interpolation onto the h/2 lattice (2N_j points per axis).
LatticeField refine(const LatticeField& f);

}  // namespace relwave::spectral
