#include "relwave/umbral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "relwave/errors.hpp"

namespace relwave::umbral {

using boost::multiprecision::cpp_int;
using clifford::Multivector;

namespace {

Rational factorial(int k) {
    cpp_int f = 1;
    for (int j = 2; j <= k; ++j) f *= j;
    return Rational(f);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::vector<Rational> truncated_product(const std::vector<Rational>& a, const std::vector<Rational>& b,
                                        std::size_t size) {
    std::vector<Rational> out(size);
    for (std::size_t i = 0; i < a.size() && i < size; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size() && i + j < size; ++j) {
            if (b[j] == 0) continue;
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

// sum_j outer[j] inner^j in ordinary coefficients, truncated to `size` terms.
std::vector<Rational> compose_ordinary(const std::vector<Rational>& outer, const std::vector<Rational>& inner,
                                       std::size_t size) {
    std::vector<Rational> out(size);
    std::vector<Rational> power(size);
    power[0] = 1;
    for (std::size_t j = 0; j < outer.size(); ++j) {
        if (outer[j] != 0) {
            for (std::size_t k = 0; k < size; ++k) out[k] += outer[j] * power[k];
        }
        power = truncated_product(power, inner, size);
    }
    return out;
}

Complex sinhc(Complex w) {
    if (std::abs(w) < 1e-4) return 1.0 + w * w / 6.0 + w * w * w * w / 120.0;
    return std::sinh(w) / w;
}

Complex sinc(Complex w) {
    if (std::abs(w) < 1e-4) return 1.0 - w * w / 6.0 + w * w * w * w / 120.0;
    return std::sin(w) / w;
}

// asin(x)/x for 0 <= x <= 1.
double asin_over_x(double x) {
    if (x < 1e-4) {
        const double x2 = x * x;
        return 1.0 + x2 / 6.0 + 3.0 * x2 * x2 / 40.0;
    }
    return std::asin(x) / x;
}

}  // namespace

Rational exact_rational(double value) {
    if (!std::isfinite(value)) throw InvalidArgument("cannot convert a non-finite value to a rational");
    if (value == 0.0) return Rational(0);
    int exponent = 0;
    const double mantissa = std::frexp(value, &exponent);
    const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    exponent -= 53;
    cpp_int num = scaled;
    cpp_int den = 1;
    if (exponent > 0) {
        num <<= exponent;
    } else {
        den <<= -exponent;
    }
    return Rational(num, den);
}

PowerSeries::PowerSeries(int order) : exp_coeffs_(static_cast<std::size_t>(order + 1)) {
    if (order < 1) throw InvalidArgument("power series truncation order must be >= 1");
}

PowerSeries PowerSeries::from_exponential(std::vector<Rational> coeffs) {
    PowerSeries out(static_cast<int>(coeffs.size()) - 1);
    out.exp_coeffs_ = std::move(coeffs);
    return out;
}

PowerSeries PowerSeries::from_ordinary(const std::vector<Rational>& coeffs) {
    std::vector<Rational> exp(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) exp[k] = coeffs[k] * factorial(static_cast<int>(k));
    return from_exponential(std::move(exp));
}

PowerSeries PowerSeries::identity(int order) {
    PowerSeries out(order);
    out.exp_coeffs_[1] = 1;
    return out;
}

Rational PowerSeries::ordinary(int k) const { return exponential(k) / factorial(k); }

std::vector<Rational> PowerSeries::ordinary_coeffs() const {
    std::vector<Rational> out(exp_coeffs_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = ordinary(static_cast<int>(k));
    return out;
}

PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
    if (a.order() != b.order()) throw InvalidArgument("power series truncation orders differ");
    auto coeffs = a.exp_coeffs_;
    for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] += b.exp_coeffs_[k];
    return PowerSeries::from_exponential(std::move(coeffs));
}

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
    if (a.order() != b.order()) throw InvalidArgument("power series truncation orders differ");
    return PowerSeries::from_ordinary(
        truncated_product(a.ordinary_coeffs(), b.ordinary_coeffs(), a.exp_coeffs_.size()));
}

PowerSeries PowerSeries::compose(const PowerSeries& inner) const {
    if (order() != inner.order()) throw InvalidArgument("power series truncation orders differ");
    if (inner.exponential(0) != 0) throw InvalidArgument("inner series of a composition needs c_0 = 0");
    return from_ordinary(compose_ordinary(ordinary_coeffs(), inner.ordinary_coeffs(), exp_coeffs_.size()));
}

Complex PowerSeries::evaluate(Complex z) const {
    Complex sum{};
    for (int k = order(); k >= 0; --k) sum = sum * z + to_double(ordinary(k));
    return sum;
}

PowerSeries compositional_inverse(const PowerSeries& L) {
    if (L.exponential(0) != 0) throw InvalidArgument("delta operator condition violated: b_0 != 0");
    if (L.exponential(1) == 0) throw InvalidArgument("delta operator condition violated: b_1 == 0");
    const auto size = static_cast<std::size_t>(L.order() + 1);
    const auto outer = L.ordinary_coeffs();
    std::vector<Rational> inverse(size);
    inverse[1] = 1 / outer[1];
    // Coefficient k of L(M) is outer[1] * inverse[k] plus terms in lower coefficients.
    for (std::size_t k = 2; k < size; ++k) {
        const auto residual = compose_ordinary(outer, inverse, k + 1);
        inverse[k] = -residual[k] / outer[1];
    }
    return PowerSeries::from_ordinary(inverse);
}

Polynomial::Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

int Polynomial::degree() const { return static_cast<int>(coeffs_.size()) - 1; }

Rational Polynomial::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return Rational(0);
    return coeffs_[static_cast<std::size_t>(k)];
}

Polynomial Polynomial::derivative() const {
    std::vector<Rational> out;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) out.push_back(coeffs_[k] * static_cast<long>(k));
    return Polynomial(std::move(out));
}

double Polynomial::evaluate(double t) const {
    double sum = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) sum = sum * t + to_double(*it);
    return sum;
}

std::string Polynomial::to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const Rational& c = coeffs_[static_cast<std::size_t>(k)];
        if (c == 0) continue;
        if (!first) out << (c < 0 ? " - " : " + ");
        else if (c < 0) out << "-";
        const Rational mag = c < 0 ? Rational(-c) : c;
        if (mag != 1 || k == 0) out << mag;
        if (k >= 1) out << "t";
        if (k >= 2) out << "^" << k;
        first = false;
    }
    return out.str();
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Rational> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = a.coeff(static_cast<int>(k)) + b.coeff(static_cast<int>(k));
    }
    return Polynomial(std::move(out));
}

Polynomial operator*(const Rational& c, const Polynomial& p) {
    auto out = p.coeffs_;
    for (auto& v : out) v *= c;
    return Polynomial(std::move(out));
}

bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

DeltaOperator::DeltaOperator(DeltaKind kind, double tau, PowerSeries series)
    : kind_(kind), tau_(tau), series_(std::move(series)), inverse_(compositional_inverse(series_)) {}

DeltaOperator DeltaOperator::continuous(int order) {
    return DeltaOperator(DeltaKind::continuous, 0.0, PowerSeries::identity(order));
}

DeltaOperator DeltaOperator::central_difference(double tau, int order) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau: must be a positive finite number");
    // (2/tau) sinh(tau s / 2) has exponential coefficients b_{2j+1} = (tau/2)^{2j}.
    const Rational half_tau = exact_rational(tau) / 2;
    std::vector<Rational> coeffs(static_cast<std::size_t>(order + 1));
    Rational power = 1;
    for (int k = 1; k <= order; k += 2) {
        coeffs[static_cast<std::size_t>(k)] = power;
        power *= half_tau * half_tau;
    }
    return DeltaOperator(DeltaKind::central_difference, tau, PowerSeries::from_exponential(std::move(coeffs)));
}

DeltaOperator DeltaOperator::custom(PowerSeries series) {
    return DeltaOperator(DeltaKind::custom, 0.0, std::move(series));
}

Complex DeltaOperator::forward(Complex z) const {
    switch (kind_) {
        case DeltaKind::continuous:
            return z;
        case DeltaKind::central_difference:
            return (2.0 / tau_) * std::sinh(0.5 * tau_ * z);
        case DeltaKind::custom:
            break;
    }
    return series_.evaluate(z);
}

Complex DeltaOperator::inverse(Complex z) const { return z * inverse_over_argument(z); }

Complex DeltaOperator::inverse_over_argument(Complex z) const {
    switch (kind_) {
        case DeltaKind::continuous:
            return 1.0;
        case DeltaKind::central_difference: {
            const Complex w = 0.5 * tau_ * z;
            if (std::abs(w) < 1e-4) return 1.0 - w * w / 6.0 + 3.0 * w * w * w * w / 40.0;
            return std::asinh(w) / w;
        }
        case DeltaKind::custom:
            break;
    }
    // sum_k a_{k+1} z^k with a check that the truncated tail is negligible.
    const auto a = inverse_.ordinary_coeffs();
    Complex sum{};
    double tail = 0.0;
    const int K = inverse_.order();
    for (int k = K - 1; k >= 0; --k) sum = sum * z + to_double(a[static_cast<std::size_t>(k + 1)]);
    for (int k = std::max(0, K - 2); k < K; ++k) {
        tail = std::max(tail, std::abs(to_double(a[static_cast<std::size_t>(k + 1)]) * std::pow(std::abs(z), k)));
    }
    if (tail > 1e-12 * std::max(std::abs(sum), 1e-300)) {
        throw NumericalGuard("custom delta operator: |z| = " + std::to_string(std::abs(z)) +
                             " is outside the convergence guard of the truncated inverse series");
    }
    return sum;
}

std::vector<Polynomial> basic_sequence(const DeltaOperator& L, int K) {
    if (K < 0 || K > L.order()) {
        throw InvalidArgument("basic sequence order " + std::to_string(K) + " exceeds series order " +
                              std::to_string(L.order()));
    }
    const auto size = static_cast<std::size_t>(K + 1);
    auto inverse = L.inverse_series().ordinary_coeffs();
    inverse.resize(size);
    // coeff[k][j] = [s^k] M(s)^j
    std::vector<std::vector<Rational>> powers;
    std::vector<Rational> power(size);
    power[0] = 1;
    for (std::size_t j = 0; j < size; ++j) {
        powers.push_back(power);
        power = truncated_product(power, inverse, size);
    }
    std::vector<Polynomial> out;
    for (std::size_t k = 0; k < size; ++k) {
        std::vector<Rational> poly(k + 1);
        const Rational kfact = factorial(static_cast<int>(k));
        for (std::size_t j = 0; j <= k; ++j) poly[j] = kfact * powers[j][k] / factorial(static_cast<int>(j));
        out.emplace_back(std::move(poly));
    }
    return out;
}

std::vector<Polynomial> basic_sequence(const DeltaOperator& L) { return basic_sequence(L, L.order()); }

Polynomial apply_delta(const DeltaOperator& L, const Polynomial& p) {
    if (p.degree() > L.order()) {
        throw InvalidArgument("polynomial degree exceeds the delta operator's truncation order");
    }
    Polynomial out;
    Polynomial derivative = p;
    for (int k = 1; k <= L.order() && derivative.degree() >= 0; ++k) {
        derivative = derivative.derivative();
        const Rational c = L.series().ordinary(k);
        if (c != 0) out = out + c * derivative;
    }
    return out;
}

Multivector egf_eval(const DeltaOperator& L, double r, double phi, const Multivector& omega, double t) {
    const Multivector one = Multivector::scalar(omega.signature(), 1.0);
    if ((omega * omega - one).coeff_norm() > 1e-10) throw InvalidArgument("egf_eval: omega^2 != +1");
    const Complex u = L.inverse(std::polar(r, phi));
    return one * std::cosh(t * u) + omega * std::sinh(t * u);
}

Multivector egf_series(const std::vector<Polynomial>& basic, const Multivector& s, double t) {
    Multivector sum(s.signature());
    Multivector power = Multivector::scalar(s.signature(), 1.0);
    double kfact = 1.0;
    for (std::size_t k = 0; k < basic.size(); ++k) {
        if (k > 0) {
            kfact *= static_cast<double>(k);
            power = power * s;
        }
        sum += power * Complex(basic[k].evaluate(t) / kfact);
    }
    return sum;
}

WaveMultipliers wave_multipliers(const DeltaOperator& L, double lambda, double t, bool allow_unstable) {
    if (!(lambda >= 0.0)) throw InvalidArgument("wave multipliers need lambda >= 0");
    WaveMultipliers out;
    switch (L.kind()) {
        case DeltaKind::continuous:
            out.c = std::cos(t * lambda);
            out.s = t * sinc(t * lambda);
            return out;
        case DeltaKind::central_difference: {
            const double tau = L.tau();
            const double x = 0.5 * tau * lambda;
            if (x <= 1.0) {
                const double theta_over_lambda = asin_over_x(x);
                const double theta = lambda * theta_over_lambda;
                out.c = std::cos(t * theta);
                out.s = t * sinc(t * theta) * theta_over_lambda;
                return out;
            }
            if (!allow_unstable) {
                throw CflViolation("CFL violated: tau*lambda/2 = " + std::to_string(x) + " > 1");
            }
            const Complex asin_x(std::numbers::pi / 2.0, std::acosh(x));
            const Complex theta = (2.0 / tau) * asin_x;
            out.c = std::cos(t * theta);
            out.s = std::sin(t * theta) / lambda;
            out.unstable = true;
            return out;
        }
        case DeltaKind::custom:
            break;
    }
    const Complex z(0.0, lambda);
    const Complex ratio = L.inverse_over_argument(z);
    const Complex u = z * ratio;
    out.c = std::cosh(t * u);
    out.s = t * ratio * sinhc(t * u);
    return out;
}

}  // namespace relwave::umbral
