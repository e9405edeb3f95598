#include "relwave/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "relwave/errors.hpp"
#include "relwave/parallel.hpp"

namespace relwave::propagators {

using clifford::Multivector;
using spectral::Momentum;
using spectral::SpectralField;

TimeModel TimeModel::continuous() { return TimeModel(umbral::DeltaOperator::continuous()); }

TimeModel TimeModel::central_difference(double tau) {
    return TimeModel(umbral::DeltaOperator::central_difference(tau));
}

void TimeModel::check_time(double t) const {
    if (!std::isfinite(t)) throw InvalidArgument("evaluation time must be finite");
    if (!is_central_difference()) return;
    const double k = 2.0 * t / tau();
    if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, std::abs(k))) {
        throw InvalidArgument("time " + std::to_string(t) + " is not a multiple of tau/2");
    }
}

void CauchyData::validate() const {
    if (!phi0.grid().same_geometry(phi1.grid())) throw InvalidArgument("phi0 and phi1 live on different grids");
}

double lambda_max(const GridSpec& grid, double m) {
    // sin^2 peaks at the momentum closest to pi/h, which is exactly pi/h for even N.
    double d2 = 0.0;
    for (int j = 0; j < grid.dim; ++j) {
        const int N = grid.points[j];
        const double xi = 2.0 * std::numbers::pi * (N / 2) / (N * grid.spacing);
        const double s = std::sin(0.5 * grid.spacing * xi);
        d2 += 4.0 * s * s / (grid.spacing * grid.spacing);
    }
    return std::sqrt(d2 + m * m);
}

double cfl_margin(const GridSpec& grid, const TimeModel& time, double m) {
    if (!time.is_central_difference()) return std::numeric_limits<double>::infinity();
    return 2.0 / time.tau() - lambda_max(grid, m);
}

void check_cfl(const GridSpec& grid, const TimeModel& time, double m, const SolveOptions& opts) {
    if (!time.is_central_difference() || opts.allow_unstable) return;
    const double margin = cfl_margin(grid, time, m);
    if (margin < 0.0) {
        throw CflViolation("CFL violated: lambda_max = " + std::to_string(lambda_max(grid, m)) + " exceeds 2/tau = " +
                           std::to_string(2.0 / time.tau()));
    }
}

namespace {

double lambda_at(const Momentum& xi, double h, double m) {
    return std::sqrt(spectral::multiplier_d2(xi, h) + m * m);
}

void check_mass(double m) {
    if (!std::isfinite(m) || m < 0.0) throw InvalidArgument("mass must be finite and nonnegative");
}

// Relative size of `diff` against the larger of two reference norms; 0/0 gives 0.
double relative(double diff, double ref_a, double ref_b) {
    const double ref = std::max(ref_a, ref_b);
    if (ref == 0.0) return diff;
    return diff / ref;
}

}  // namespace

LatticeField solve_kg(const CauchyData& data, const TimeModel& time, double m, double t, const SolveOptions& opts) {
    data.validate();
    check_mass(m);
    time.check_time(t);
    const GridSpec& grid = data.phi0.grid();
    check_cfl(grid, time, m, opts);
    if (t == 0.0) return data.phi0;

    const SpectralField F0 = spectral::dft(data.phi0);
    const SpectralField F1 = spectral::dft(data.phi1);
    SpectralField out(grid);
    const double h = grid.spacing;
    const std::size_t B = F0.blade_count();
    parallel_for(out.point_count(), [&](std::size_t k) {
        const auto w = umbral::wave_multipliers(time.delta(), lambda_at(F0.momentum(k), h, m), t, true);
        for (clifford::BladeMask b = 0; b < B; ++b) {
            out.component(k, b) = w.c * F0.component(k, b) + w.s * F1.component(k, b);
        }
    });
    return spectral::idft(out);
}

double kg_residual(const LatticeField& before, const LatticeField& now, const LatticeField& after, double m,
                   double tau) {
    if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
    const LatticeField lt2 = Complex(1.0 / (tau * tau)) * (after - Complex(2.0) * now + before);
    const LatticeField rhs = lattice::discrete_laplacian(now) - Complex(m * m) * now;
    return relative((lt2 - rhs).norm(), lt2.norm(), rhs.norm());
}

std::pair<LatticeField, LatticeField> wave_kernels(const GridSpec& grid, const TimeModel& time, double m, double t,
                                                   const SolveOptions& opts) {
    grid.validate();
    check_mass(m);
    time.check_time(t);
    check_cfl(grid, time, m, opts);
    const double h = grid.spacing;
    auto K0 = spectral::kernel_from_multiplier(grid, [&](const Momentum& xi) {
        return umbral::wave_multipliers(time.delta(), lambda_at(xi, h, m), t, true).c;
    });
    auto K1 = spectral::kernel_from_multiplier(grid, [&](const Momentum& xi) {
        return umbral::wave_multipliers(time.delta(), lambda_at(xi, h, m), t, true).s;
    });
    return {std::move(K0), std::move(K1)};
}

LatticeField solve_kg_by_kernels(const CauchyData& data, const TimeModel& time, double m, double t,
                                 const SolveOptions& opts) {
    data.validate();
    const auto [K0, K1] = wave_kernels(data.phi0.grid(), time, m, t, opts);
    return spectral::kernel_convolve(data.phi0, K0) + spectral::kernel_convolve(data.phi1, K1);
}

LatticeField dirac_initial_velocity(const LatticeField& phi0, double alpha, double m) {
    check_mass(m);
    if (!(alpha >= 0.0 && alpha <= 0.5)) throw InvalidArgument("alpha must lie in [0, 1/2]");
    const double h = phi0.grid().spacing;
    const auto sig = phi0.signature();
    const Multivector mass_term = m * clifford::pseudoscalar(sig);
    spectral::MultivectorMultiplier op = [&](const Momentum& xi) {
        return Complex(0.0, 1.0) * (spectral::multiplier_z(xi, h, alpha, sig) - mass_term);
    };
    return spectral::idft(spectral::apply_multiplier(spectral::dft(phi0), op));
}

LatticeField solve_dirac(const LatticeField& phi0, const TimeModel& time, double alpha, double m, double t,
                         const SolveOptions& opts) {
    CauchyData data{phi0, dirac_initial_velocity(phi0, alpha, m)};
    return solve_kg(data, time, m, t, opts);
}

double dirac_residual(const LatticeField& before, const LatticeField& now, const LatticeField& after, double alpha,
                      double m, double tau) {
    if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
    const LatticeField lhs = Complex(1.0 / tau) * (after - before);
    const LatticeField rhs = dirac_initial_velocity(now, alpha, m);
    return relative((lhs - rhs).norm(), lhs.norm(), rhs.norm());
}

double chebyshev_t(int k, double x) {
    if (k < 0) throw InvalidArgument("Chebyshev T needs a nonnegative degree");
    if (k == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int j = 1; j < k; ++j) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double chebyshev_u(int k, double x) {
    if (k < -1) throw InvalidArgument("Chebyshev U needs degree >= -1");
    if (k == -1) return 0.0;
    double prev = 0.0, cur = 1.0;
    for (int j = 0; j < k; ++j) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

LatticeField chebyshev_solve(const CauchyData& data, double tau, double m, double t) {
    data.validate();
    check_mass(m);
    if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
    const double degree = 2.0 * t / tau;
    const double rounded = std::round(degree);
    if (rounded < 0.0 || std::abs(degree - rounded) > 1e-9 * std::max(1.0, degree)) {
        throw InvalidArgument("2t/tau must be a nonnegative integer");
    }
    const int k = static_cast<int>(rounded);
    const GridSpec& grid = data.phi0.grid();
    check_cfl(grid, TimeModel::central_difference(tau), m, {});
    if (k == 0) return data.phi0;

    const SpectralField F0 = spectral::dft(data.phi0);
    const SpectralField F1 = spectral::dft(data.phi1);
    SpectralField out(grid);
    const double h = grid.spacing;
    const std::size_t B = F0.blade_count();
    parallel_for(out.point_count(), [&](std::size_t p) {
        const double lam = lambda_at(F0.momentum(p), h, m);
        const double y = std::sqrt(std::max(0.0, 1.0 - 0.25 * tau * tau * lam * lam));
        const double c = chebyshev_t(k, y);
        const double s = 0.5 * tau * chebyshev_u(k - 1, y);
        for (clifford::BladeMask b = 0; b < B; ++b) {
            out.component(p, b) = c * F0.component(p, b) + s * F1.component(p, b);
        }
    });
    return spectral::idft(out);
}

ContinuousResidual continuous_kg_residual(const CauchyData& data, double m, double t, double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    const TimeModel time = TimeModel::continuous();
    const LatticeField now = solve_kg(data, time, m, t);
    const LatticeField target = lattice::discrete_laplacian(now) - Complex(m * m) * now;
    auto second_difference = [&](double d) {
        const LatticeField plus = solve_kg(data, time, m, t + d);
        const LatticeField minus = solve_kg(data, time, m, t - d);
        return Complex(1.0 / (d * d)) * (plus - Complex(2.0) * now + minus);
    };
    const LatticeField coarse = second_difference(delta);
    const LatticeField fine = second_difference(0.5 * delta);
    const LatticeField extrapolated = Complex(1.0 / 3.0) * (Complex(4.0) * fine - coarse);

    ContinuousResidual out;
    const double ref = target.norm();
    out.residual = relative((extrapolated - target).norm(), extrapolated.norm(), ref);
    const double e_coarse = (coarse - target).norm();
    const double e_fine = (fine - target).norm();
    out.observed_order = (e_coarse > 0.0 && e_fine > 0.0) ? std::log2(e_coarse / e_fine) : 0.0;
    return out;
}

}  // namespace relwave::propagators
