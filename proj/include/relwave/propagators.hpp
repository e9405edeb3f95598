#pragma once

// Closed-form solvers for the discretized Klein-Gordon and Dirac equations
//
//   L_t^2 Psi = Delta_h Psi - m^2 Psi,   Psi(0) = Phi_0,  [L_t Psi]_{t=0} = Phi_1
//   -i L_t Psi = (D_{h,alpha} - m gamma) Psi
//
// in momentum space: F Psi(xi,t) = c(lambda,t) F Phi_0 + s(lambda,t) F Phi_1 with
// lambda = sqrt(d_h(xi)^2 + m^2), c = cosh(t L^{-1}(i lambda)) and
// s = sinh(t L^{-1}(i lambda)) / (i lambda).

#include <utility>

#include "relwave/lattice.hpp"
#include "relwave/spectral.hpp"
#include "relwave/umbral.hpp"

namespace relwave::propagators {

using clifford::Complex;
using lattice::GridSpec;
using lattice::LatticeField;

class TimeModel {
public:
    static TimeModel continuous();
    static TimeModel central_difference(double tau);

    const umbral::DeltaOperator& delta() const { return delta_; }
    bool is_central_difference() const { return delta_.kind() == umbral::DeltaKind::central_difference; }
    double tau() const { return delta_.tau(); }

    // Central difference: t must be an integer multiple of tau/2 (negative allowed).
    void check_time(double t) const;

private:
    explicit TimeModel(umbral::DeltaOperator delta) : delta_(std::move(delta)) {}
    umbral::DeltaOperator delta_;
};

struct CauchyData {
    LatticeField phi0;  // Psi at t = 0
    LatticeField phi1;  // [L_t Psi] at t = 0

    void validate() const;
};

struct SolveOptions {
    bool allow_unstable = false;
};

// max over the momentum grid of sqrt(d_h(xi)^2 + m^2).
double lambda_max(const GridSpec& grid, double m);
// 2/tau - lambda_max; only meaningful for the central-difference model.
double cfl_margin(const GridSpec& grid, const TimeModel& time, double m);
// Throws CflViolation unless the margin is nonnegative or opts.allow_unstable.
void check_cfl(const GridSpec& grid, const TimeModel& time, double m, const SolveOptions& opts);

LatticeField solve_kg(const CauchyData& data, const TimeModel& time, double m, double t,
                      const SolveOptions& opts = {});

// Relative norm of [Psi(t+tau) - 2 Psi(t) + Psi(t-tau)]/tau^2 - Delta_h Psi(t) + m^2 Psi(t).
double kg_residual(const LatticeField& before, const LatticeField& now, const LatticeField& after, double m,
                   double tau);

// K0, K1 with sum_y h^n Phi(y) K(x - y) reproducing the c and s multipliers.
std::pair<LatticeField, LatticeField> wave_kernels(const GridSpec& grid, const TimeModel& time, double m, double t,
                                                   const SolveOptions& opts = {});

// Phi_0 * K0 + Phi_1 * K1 through kernel convolution.
LatticeField solve_kg_by_kernels(const CauchyData& data, const TimeModel& time, double m, double t,
                                 const SolveOptions& opts = {});

// Phi_1 = i (D_{h,alpha} - m gamma) Phi_0 built spectrally.
LatticeField dirac_initial_velocity(const LatticeField& phi0, double alpha, double m);

LatticeField solve_dirac(const LatticeField& phi0, const TimeModel& time, double alpha, double m, double t,
                         const SolveOptions& opts = {});

// Relative norm of [Psi(t+tau/2) - Psi(t-tau/2)]/tau - i (D_{h,alpha} - m gamma) Psi(t).
double dirac_residual(const LatticeField& before, const LatticeField& now, const LatticeField& after, double alpha,
                      double m, double tau);

// Chebyshev polynomials by three-term recurrence; U_{-1} = 0.
double chebyshev_t(int k, double x);
double chebyshev_u(int k, double x);

// T_{2t/tau}(y) F Phi_0 + (tau/2) U_{2t/tau - 1}(y) F Phi_1, y = sqrt(1 - tau^2 lambda^2 / 4).
LatticeField chebyshev_solve(const CauchyData& data, double tau, double m, double t);

struct ContinuousResidual {
    double residual = 0.0;        // Richardson-extrapolated relative residual
    double observed_order = 0.0;  // convergence order of the plain central difference
};

// Second time derivative of solve_kg (continuous model) by central differences
// with steps delta and delta/2, compared against (Delta_h - m^2) Psi(t).
ContinuousResidual continuous_kg_residual(const CauchyData& data, double m, double t, double delta = 1e-2);

}  // namespace relwave::propagators
