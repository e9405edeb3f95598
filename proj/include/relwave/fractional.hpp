#pragma once

// Heat semigroup, fractional powers of the massive lattice Laplacian and the
// Riesz-type operator R = (D_{h,alpha} - m gamma)(-Delta_h + m^2)^{-alpha}.

#include <optional>
#include <utility>
#include <vector>

#include "relwave/lattice.hpp"
#include "relwave/propagators.hpp"

namespace relwave::fractional {

using clifford::Complex;
using lattice::GridSpec;
using lattice::LatticeField;

struct FracParams {
    double alpha = 0.25;  // fractional exponent, (0, 1/2)
    double mass = 1.0;
    int nodes = 200;             // subordination quadrature nodes
    double upper_cutoff = 37.0;  // tail exponent: quadrature stops where t m^2 - alpha ln t reaches it
    // Parameter of D_{h,alpha}; the fractional exponent is reused when unset.
    std::optional<double> dirac_alpha;

    void validate() const;
    double lattice_alpha() const { return dirac_alpha.value_or(alpha); }
};

// exp(s Delta_h) f: spectral multiplier e^{-s d_h(xi)^2}.
LatticeField heat_semigroup(const LatticeField& f, double s);

// Kernel of exp(s Delta_h) from the transform of e^{-s d^2}.
LatticeField heat_kernel_spectral(const GridSpec& grid, double s);

// h^{-n} prod_j sum_{p in Z} e^{-u} I_{k_j + p N_j}(u), u = 2s/h^2.
LatticeField heat_kernel_bessel(const GridSpec& grid, double s);

enum class PowerMode { spectral, subordination };

struct Quadrature {
    std::vector<double> times;    // heat times t_k
    std::vector<double> weights;  // includes e^{-t m^2} t^alpha / Gamma(alpha) and the Jacobian
    double tail_bound = 0.0;      // integrand size at the truncation points
};

// Nodes and weights with (d^2 + m^2)^{-alpha} ~ sum_k w_k e^{-t_k d^2}, for the
// substitution t = exp(u - e^{-u}) and the trapezoid rule in u.
Quadrature subordination_quadrature(double alpha, double mass, int nodes, double upper_cutoff = 37.0);

struct PowerResult {
    LatticeField field;
    double tail_bound = 0.0;  // zero in spectral mode
};

// (-Delta_h + m^2)^{-alpha} f; alpha in (0, 1).
PowerResult frac_power(const LatticeField& f, const FracParams& p, PowerMode mode);

// (-Delta_h + m^2)^{exponent} f by multiplier; any real exponent when d^2 + m^2 > 0.
LatticeField massive_power(const LatticeField& f, double m, double exponent);

// (D_{h,a} - m gamma)(-Delta_h + m^2)^{exponent} f.
LatticeField dirac_power(const LatticeField& f, double lattice_alpha, double m, double exponent);

LatticeField riesz(const LatticeField& f, const FracParams& p);
LatticeField riesz_inverse(const LatticeField& f, const FracParams& p);

// (d^2 + m^2)^alpha c and (d^2 + m^2)^alpha s.
std::pair<LatticeField, LatticeField> fractional_wave_kernels(const GridSpec& grid,
                                                              const propagators::TimeModel& time,
                                                              const FracParams& p, double t,
                                                              const propagators::SolveOptions& opts = {});

LatticeField solve_kg_fractional(const propagators::CauchyData& data, const propagators::TimeModel& time,
                                 const FracParams& p, double t, const propagators::SolveOptions& opts = {});

// Fractional Dirac solver: (-Delta_h + m^2)^{-alpha} Phi_1 replaced by i R Phi_0.
LatticeField solve_dirac_fractional(const LatticeField& phi0, const propagators::TimeModel& time,
                                    const FracParams& p, double t, const propagators::SolveOptions& opts = {});

// P_t[Phi] = K0^(alpha) * (-Delta_h + m^2)^{-alpha} Phi + K1^(alpha) * i R Phi.
LatticeField p_t_operator(const LatticeField& phi, const propagators::TimeModel& time, const FracParams& p,
                          double t, const propagators::SolveOptions& opts = {});

struct ParityParts {
    LatticeField even;  // (P_t + P_{-t}) / 2
    LatticeField odd;   // (P_t - P_{-t}) / (2i)
};

ParityParts parity_split(const LatticeField& phi, const propagators::TimeModel& time, const FracParams& p, double t,
                         const propagators::SolveOptions& opts = {});

// Klein-Gordon solution rebuilt from P_t: even part applied to Phi_0 plus odd
// part applied to (D_{h,a} - m gamma)(-Delta_h + m^2)^{-1} Phi_1.
LatticeField recombine_kg(const propagators::CauchyData& data, const propagators::TimeModel& time,
                          const FracParams& p, double t, const propagators::SolveOptions& opts = {});

}  // namespace relwave::fractional
