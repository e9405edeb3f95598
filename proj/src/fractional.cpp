#include "relwave/fractional.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "relwave/errors.hpp"
#include "relwave/parallel.hpp"
#include "relwave/special.hpp"
#include "relwave/spectral.hpp"
#include "relwave/umbral.hpp"

namespace relwave::fractional {

using clifford::Multivector;
using propagators::CauchyData;
using propagators::SolveOptions;
using propagators::TimeModel;
using spectral::Momentum;
using spectral::SpectralField;

void FracParams::validate() const {
    if (!(alpha > 0.0 && alpha < 0.5)) throw InvalidArgument("frac_alpha must lie in (0, 1/2)");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("fractional operators need mass > 0");
    if (nodes < 2) throw InvalidArgument("subordination needs at least 2 nodes");
    if (!(upper_cutoff > 0.0)) throw InvalidArgument("subordination cutoff must be positive");
    if (dirac_alpha && !(*dirac_alpha >= 0.0 && *dirac_alpha <= 0.5)) {
        throw InvalidArgument("alpha must lie in [0, 1/2]");
    }
}

namespace {

void check_heat_time(double s) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("heat time s must be finite and >= 0");
}

double symbol(const Momentum& xi, double h, double m) { return spectral::multiplier_d2(xi, h) + m * m; }

// Bisection for the sign change of g on [lo, hi]; g(lo) and g(hi) differ in sign.
template <class G>
double bisect(G g, double lo, double hi) {
    const bool lo_negative = g(lo) < 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((g(mid) < 0.0) == lo_negative) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

LatticeField heat_semigroup(const LatticeField& f, double s) {
    check_heat_time(s);
    if (s == 0.0) return f;
    const double h = f.grid().spacing;
    spectral::ScalarMultiplier heat = [&](const Momentum& xi) {
        return Complex(std::exp(-s * spectral::multiplier_d2(xi, h)));
    };
    return spectral::idft(spectral::apply_multiplier(spectral::dft(f), heat));
}

LatticeField heat_kernel_spectral(const GridSpec& grid, double s) {
    check_heat_time(s);
    grid.validate();
    const double h = grid.spacing;
    return spectral::kernel_from_multiplier(
        grid, [&](const Momentum& xi) { return Complex(std::exp(-s * spectral::multiplier_d2(xi, h))); });
}

LatticeField heat_kernel_bessel(const GridSpec& grid, double s) {
    check_heat_time(s);
    grid.validate();
    const double h = grid.spacing;
    const double u = 2.0 * s / (h * h);

    // Periodized one-dimensional factors, indexed by coordinate mod N.
    std::vector<std::vector<double>> factors;
    for (int j = 0; j < grid.dim; ++j) {
        const int N = grid.points[j];
        const auto seq = special::bessel_i_scaled_sequence(N, u);
        std::vector<double> a(static_cast<std::size_t>(N), 0.0);
        const long top = static_cast<long>(seq.size()) - 1;
        for (long i = -top; i <= top; ++i) {
            const long k = ((i % N) + N) % N;
            a[static_cast<std::size_t>(k)] += seq[static_cast<std::size_t>(std::abs(i))];
        }
        factors.push_back(std::move(a));
    }

    LatticeField K(grid);
    const double prefactor = std::pow(h, -grid.dim);
    for (std::size_t site = 0; site < K.site_count(); ++site) {
        const auto c = K.site_coords(site);
        double v = prefactor;
        for (int j = 0; j < grid.dim; ++j) v *= factors[j][static_cast<std::size_t>(c[j])];
        K.component(site, 0) = v;
    }
    return K;
}

Quadrature subordination_quadrature(double alpha, double mass, int nodes, double upper_cutoff) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("subordination needs alpha in (0, 1)");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("subordination needs mass > 0");
    if (nodes < 2) throw InvalidArgument("subordination needs at least 2 nodes");
    const double m2 = mass * mass;
    auto time_of = [](double u) { return std::exp(u - std::exp(-u)); };
    // Logarithm of t^alpha e^{-t m^2} (1 + e^{-u}), the integrand in u without 1/Gamma.
    auto log_integrand = [&](double u) {
        return alpha * (u - std::exp(-u)) - time_of(u) * m2 + std::log1p(std::exp(-u));
    };
    const double u_lo = bisect([&](double u) { return log_integrand(u) + upper_cutoff; }, -60.0, 0.0);
    // The integrand peaks near t = alpha / m^2; search above that point.
    const double u_peak = std::log(std::max(alpha / m2, 1e-300));
    double u_hi = std::max(u_peak, 1.0);
    while (log_integrand(u_hi) + upper_cutoff > 0.0) u_hi += 1.0;
    u_hi = bisect([&](double u) { return log_integrand(u) + upper_cutoff; }, u_hi - 1.0, u_hi);

    Quadrature q;
    const double step = (u_hi - u_lo) / (nodes - 1);
    const double inv_gamma = 1.0 / std::tgamma(alpha);
    for (int k = 0; k < nodes; ++k) {
        const double u = u_lo + k * step;
        const double t = time_of(u);
        double w = step * inv_gamma * std::exp(log_integrand(u));
        if (k == 0 || k == nodes - 1) w *= 0.5;
        q.times.push_back(t);
        q.weights.push_back(w);
    }
    // Integrals of t^{alpha-1} e^{-t m^2} / Gamma(alpha) beyond both cut points.
    const double t_lo = time_of(u_lo);
    const double t_hi = time_of(u_hi);
    q.tail_bound = inv_gamma * (std::pow(t_lo, alpha) / alpha + std::pow(t_hi, alpha - 1.0) * std::exp(-t_hi * m2) / m2);
    return q;
}

LatticeField massive_power(const LatticeField& f, double m, double exponent) {
    const double h = f.grid().spacing;
    const SpectralField F = spectral::dft(f);
    for (std::size_t k = 0; k < F.point_count(); ++k) {
        if (exponent < 0.0 && !(symbol(F.momentum(k), h, m) > 0.0)) {
            throw NumericalGuard("d^2 + m^2 vanishes on the grid; the negative power diverges");
        }
    }
    spectral::ScalarMultiplier power = [&](const Momentum& xi) {
        return Complex(std::pow(symbol(xi, h, m), exponent));
    };
    return spectral::idft(spectral::apply_multiplier(F, power));
}

PowerResult frac_power(const LatticeField& f, const FracParams& p, PowerMode mode) {
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw InvalidArgument("frac_alpha must lie in (0, 1)");
    if (!(p.mass >= 0.0) || !std::isfinite(p.mass)) throw InvalidArgument("mass must be finite and >= 0");
    if (mode == PowerMode::spectral) return {massive_power(f, p.mass, -p.alpha), 0.0};

    const Quadrature q = subordination_quadrature(p.alpha, p.mass, p.nodes, p.upper_cutoff);
    const double h = f.grid().spacing;
    const SpectralField F = spectral::dft(f);
    // Each node contributes w_k exp(t_k Delta_h) f; summed in momentum space.
    spectral::ScalarMultiplier weighted_heat = [&](const Momentum& xi) {
        const double d2 = spectral::multiplier_d2(xi, h);
        double acc = 0.0;
        for (std::size_t k = 0; k < q.times.size(); ++k) acc += q.weights[k] * std::exp(-q.times[k] * d2);
        return Complex(acc);
    };
    return {spectral::idft(spectral::apply_multiplier(F, weighted_heat)), q.tail_bound};
}

LatticeField dirac_power(const LatticeField& f, double lattice_alpha, double m, double exponent) {
    if (!(lattice_alpha >= 0.0 && lattice_alpha <= 0.5)) throw InvalidArgument("alpha must lie in [0, 1/2]");
    const double h = f.grid().spacing;
    const auto sig = f.signature();
    const Multivector mass_term = m * clifford::pseudoscalar(sig);
    const SpectralField F = spectral::dft(f);
    for (std::size_t k = 0; k < F.point_count(); ++k) {
        if (exponent < 0.0 && !(symbol(F.momentum(k), h, m) > 0.0)) {
            throw NumericalGuard("d^2 + m^2 vanishes on the grid; the negative power diverges");
        }
    }
    spectral::MultivectorMultiplier op = [&](const Momentum& xi) {
        return std::pow(symbol(xi, h, m), exponent) * (spectral::multiplier_z(xi, h, lattice_alpha, sig) - mass_term);
    };
    return spectral::idft(spectral::apply_multiplier(F, op));
}

LatticeField riesz(const LatticeField& f, const FracParams& p) {
    p.validate();
    return dirac_power(f, p.lattice_alpha(), p.mass, -p.alpha);
}

LatticeField riesz_inverse(const LatticeField& f, const FracParams& p) {
    p.validate();
    return dirac_power(f, p.lattice_alpha(), p.mass, p.alpha - 1.0);
}

std::pair<LatticeField, LatticeField> fractional_wave_kernels(const GridSpec& grid, const TimeModel& time,
                                                              const FracParams& p, double t,
                                                              const SolveOptions& opts) {
    p.validate();
    grid.validate();
    time.check_time(t);
    propagators::check_cfl(grid, time, p.mass, opts);
    const double h = grid.spacing;
    const double m = p.mass;
    auto K0 = spectral::kernel_from_multiplier(grid, [&](const Momentum& xi) {
        const double lam2 = symbol(xi, h, m);
        return std::pow(lam2, p.alpha) * umbral::wave_multipliers(time.delta(), std::sqrt(lam2), t, true).c;
    });
    auto K1 = spectral::kernel_from_multiplier(grid, [&](const Momentum& xi) {
        const double lam2 = symbol(xi, h, m);
        return std::pow(lam2, p.alpha) * umbral::wave_multipliers(time.delta(), std::sqrt(lam2), t, true).s;
    });
    return {std::move(K0), std::move(K1)};
}

LatticeField solve_kg_fractional(const CauchyData& data, const TimeModel& time, const FracParams& p, double t,
                                 const SolveOptions& opts) {
    data.validate();
    p.validate();
    if (t == 0.0) {
        time.check_time(t);
        propagators::check_cfl(data.phi0.grid(), time, p.mass, opts);
        return data.phi0;
    }
    const auto [K0, K1] = fractional_wave_kernels(data.phi0.grid(), time, p, t, opts);
    const LatticeField damped0 = massive_power(data.phi0, p.mass, -p.alpha);
    const LatticeField damped1 = massive_power(data.phi1, p.mass, -p.alpha);
    return spectral::kernel_convolve(damped0, K0) + spectral::kernel_convolve(damped1, K1);
}

LatticeField p_t_operator(const LatticeField& phi, const TimeModel& time, const FracParams& p, double t,
                          const SolveOptions& opts) {
    p.validate();
    const auto [K0, K1] = fractional_wave_kernels(phi.grid(), time, p, t, opts);
    const LatticeField damped = massive_power(phi, p.mass, -p.alpha);
    const LatticeField rotated = Complex(0.0, 1.0) * riesz(phi, p);
    return spectral::kernel_convolve(damped, K0) + spectral::kernel_convolve(rotated, K1);
}

LatticeField solve_dirac_fractional(const LatticeField& phi0, const TimeModel& time, const FracParams& p, double t,
                                    const SolveOptions& opts) {
    if (t == 0.0) {
        p.validate();
        time.check_time(t);
        propagators::check_cfl(phi0.grid(), time, p.mass, opts);
        return phi0;
    }
    return p_t_operator(phi0, time, p, t, opts);
}

ParityParts parity_split(const LatticeField& phi, const TimeModel& time, const FracParams& p, double t,
                         const SolveOptions& opts) {
    const LatticeField forward = p_t_operator(phi, time, p, t, opts);
    const LatticeField backward = p_t_operator(phi, time, p, -t, opts);
    return {Complex(0.5) * (forward + backward), Complex(0.0, -0.5) * (forward - backward)};
}

LatticeField recombine_kg(const CauchyData& data, const TimeModel& time, const FracParams& p, double t,
                          const SolveOptions& opts) {
    data.validate();
    const LatticeField source = dirac_power(data.phi1, p.lattice_alpha(), p.mass, -1.0);
    return parity_split(data.phi0, time, p, t, opts).even + parity_split(source, time, p, t, opts).odd;
}

}  // namespace relwave::fractional
