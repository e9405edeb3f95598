#pragma once

// Complexified Clifford algebra C (x) Cl(n,n).
//
// Generators e_1..e_n square to -1, e_{n+1}..e_{2n} square to +1, and all
// distinct generators anticommute. A basis blade is a 2n-bit mask; bit j-1 set
// means e_j is a factor, factors listed by increasing index.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace relwave::clifford {

using Complex = std::complex<double>;
using BladeMask = std::uint32_t;

class Signature {
public:
    static constexpr int kMaxDim = 5;

    explicit Signature(int n);

    int dim() const { return n_; }
    int generators() const { return 2 * n_; }
    std::size_t blade_count() const { return std::size_t{1} << (2 * n_); }

    friend bool operator==(Signature, Signature) = default;

private:
    int n_;
};

// Sign (+1/-1) of e_a e_b = sign * e_{a xor b} in Cl(n,n).
int blade_product_sign(BladeMask a, BladeMask b, int n);

// Sign picked up by e_J under the dagger conjugation.
int blade_dagger_sign(BladeMask blade, int n);

int grade(BladeMask blade);

// Sorted 1-based generator indices joined by a middle dot ("" for the scalar).
std::string blade_label(BladeMask blade);
BladeMask parse_blade_label(const std::string& label, int n);

class Multivector {
public:
    explicit Multivector(Signature sig);

    static Multivector scalar(Signature sig, Complex value);
    // Generator e_j, 1-based j in [1, 2n].
    static Multivector generator(Signature sig, int j);
    static Multivector blade(Signature sig, BladeMask mask, Complex value = 1.0);

    Signature signature() const { return sig_; }
    std::size_t size() const { return coeffs_.size(); }

    Complex operator[](BladeMask mask) const { return coeffs_[mask]; }
    Complex& operator[](BladeMask mask) { return coeffs_[mask]; }
    const std::vector<Complex>& coeffs() const { return coeffs_; }

    Complex scalar_part() const { return coeffs_[0]; }
    bool is_zero() const;

    Multivector& operator+=(const Multivector& other);
    Multivector& operator-=(const Multivector& other);
    Multivector& operator*=(Complex factor);

    friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
    friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
    friend Multivector operator-(Multivector a) { return a *= -1.0; }
    friend Multivector operator*(Multivector a, Complex c) { return a *= c; }
    friend Multivector operator*(Complex c, Multivector a) { return a *= c; }
    friend Multivector operator*(const Multivector& a, const Multivector& b);

    // Euclidean norm of the coefficient vector; max_abs is the largest modulus.
    double coeff_norm() const;
    double max_abs() const;

private:
    Signature sig_;
    std::vector<Complex> coeffs_;
};

Multivector geometric_product(const Multivector& a, const Multivector& b);

// Accumulates a*b into out without allocating; out must not alias a or b.
void geometric_product_accumulate(const Multivector& a, const Multivector& b, Multivector& out);

Multivector dagger(const Multivector& a);

// gamma = prod_j e_{n+j} e_j.
Multivector pseudoscalar(Signature sig);

// Scalar part of a^dagger a; equals the sum of |a_J|^2.
double norm_squared(const Multivector& a);

}  // namespace relwave::clifford
