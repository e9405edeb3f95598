#pragma once

// Delta-operator calculus: truncated formal power series with exact rational
// coefficients, compositional inversion, basic polynomial sequences and the
// exponential generating function G(s, t) = sum_k m_k(t) s^k / k!.

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <string>
#include <vector>

#include "relwave/clifford.hpp"

namespace relwave::umbral {

using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

inline constexpr int kDefaultOrder = 16;

// Exact rational with the same value as a finite double.
Rational exact_rational(double value);

// Truncated series sum_{k<=K} c_k s^k / k!, stored by exponential coefficients c_k.
class PowerSeries {
public:
    explicit PowerSeries(int order = kDefaultOrder);
    static PowerSeries from_exponential(std::vector<Rational> coeffs);
    static PowerSeries from_ordinary(const std::vector<Rational>& coeffs);
    static PowerSeries identity(int order = kDefaultOrder);

    int order() const { return static_cast<int>(exp_coeffs_.size()) - 1; }
    const Rational& exponential(int k) const { return exp_coeffs_.at(static_cast<std::size_t>(k)); }
    // c_k / k!
    Rational ordinary(int k) const;
    std::vector<Rational> ordinary_coeffs() const;

    friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b);
    friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
    friend bool operator==(const PowerSeries& a, const PowerSeries& b) = default;

    // this(inner(s)); inner must have zero constant term.
    PowerSeries compose(const PowerSeries& inner) const;

    Complex evaluate(Complex z) const;

private:
    std::vector<Rational> exp_coeffs_;
};

// Series M with L(M(s)) = s up to the truncation order. Requires c_0 = 0, c_1 != 0.
PowerSeries compositional_inverse(const PowerSeries& L);

// Polynomial in t with exact rational coefficients, index = power.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rational> coeffs);

    int degree() const;
    const std::vector<Rational>& coeffs() const { return coeffs_; }
    Rational coeff(int k) const;
    Polynomial derivative() const;
    double evaluate(double t) const;
    std::string to_string() const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Rational& c, const Polynomial& p);
    friend bool operator==(const Polynomial& a, const Polynomial& b);

private:
    void trim();
    std::vector<Rational> coeffs_;
};

enum class DeltaKind { continuous, central_difference, custom };

class DeltaOperator {
public:
    // L = d/dt.
    static DeltaOperator continuous(int order = kDefaultOrder);
    // L = (2/tau) sinh(tau d/dt / 2), i.e. [f(t + tau/2) - f(t - tau/2)] / tau.
    static DeltaOperator central_difference(double tau, int order = kDefaultOrder);
    static DeltaOperator custom(PowerSeries series);

    DeltaKind kind() const { return kind_; }
    double tau() const { return tau_; }
    const PowerSeries& series() const { return series_; }
    const PowerSeries& inverse_series() const { return inverse_; }
    int order() const { return series_.order(); }

    // L(z) and L^{-1}(z); closed forms for the built-in kinds, truncated
    // series (with a convergence guard) for custom operators.
    Complex forward(Complex z) const;
    Complex inverse(Complex z) const;
    // L^{-1}(z) / z, continuous at z = 0.
    Complex inverse_over_argument(Complex z) const;

private:
    DeltaOperator(DeltaKind kind, double tau, PowerSeries series);

    DeltaKind kind_;
    double tau_;
    PowerSeries series_;
    PowerSeries inverse_;
};

// m_0..m_K with m_k(t) = k! [s^k] exp(t L^{-1}(s)).
std::vector<Polynomial> basic_sequence(const DeltaOperator& L, int K);
std::vector<Polynomial> basic_sequence(const DeltaOperator& L);

// L(d/dt) p, exact; the truncated series suffices for deg p <= order.
Polynomial apply_delta(const DeltaOperator& L, const Polynomial& p);

// cosh(t L^{-1}(r e^{i phi})) + omega sinh(t L^{-1}(r e^{i phi})); omega^2 must be +1.
clifford::Multivector egf_eval(const DeltaOperator& L, double r, double phi, const clifford::Multivector& omega,
                               double t);

// Truncated sum_{k<=K} m_k(t) s^k / k! with Clifford powers of s.
clifford::Multivector egf_series(const std::vector<Polynomial>& basic, const clifford::Multivector& s, double t);

struct WaveMultipliers {
    Complex c;  // cosh(t L^{-1}(i lambda))
    Complex s;  // sinh(t L^{-1}(i lambda)) / (i lambda)
    bool unstable = false;
};

// Throws CflViolation for tau*lambda/2 > 1 (central difference) unless
// allow_unstable, in which case asin continues as pi/2 + i acosh(x).
WaveMultipliers wave_multipliers(const DeltaOperator& L, double lambda, double t, bool allow_unstable = false);

}  // namespace relwave::umbral
