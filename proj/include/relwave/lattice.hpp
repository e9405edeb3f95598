#pragma once

// Finite periodic lattice hZ^n mod N and Clifford-valued fields on it.

#include <cstddef>
#include <vector>

#include "relwave/clifford.hpp"

namespace relwave::lattice {

using clifford::Complex;
using clifford::Multivector;
using clifford::Signature;

struct GridSpec {
    int dim = 1;
    std::vector<int> points;  // N_j per axis, each positive and even
    double spacing = 1.0;     // h
    double alpha = 0.0;       // in [0, 1/2]
    double mass = 0.0;

    // Throws InvalidArgument naming the offending field.
    void validate() const;

    static GridSpec cubic(int dim, int points, double spacing, double alpha = 0.0, double mass = 0.0);

    std::size_t site_count() const;
    Signature signature() const { return Signature(dim); }

    // Same geometry (dim, points, spacing); alpha and mass are not compared.
    bool same_geometry(const GridSpec& other) const;
};

class LatticeField {
public:
    explicit LatticeField(GridSpec grid);

    const GridSpec& grid() const { return grid_; }
    Signature signature() const { return sig_; }
    std::size_t site_count() const { return sites_; }
    std::size_t blade_count() const { return blades_; }

    // Row-major site index, axis 1 slowest; coordinates are wrapped mod N_j.
    std::size_t site_index(const std::vector<long>& coords) const;
    std::vector<int> site_coords(std::size_t site) const;
    // Coordinates mapped into (-N_j/2, N_j/2].
    std::vector<int> centered_coords(std::size_t site) const;

    Multivector at(std::size_t site) const;
    void set(std::size_t site, const Multivector& value);

    Complex component(std::size_t site, clifford::BladeMask blade) const {
        return data_[site * blades_ + blade];
    }
    Complex& component(std::size_t site, clifford::BladeMask blade) {
        return data_[site * blades_ + blade];
    }
    const std::vector<Complex>& data() const { return data_; }
    std::vector<Complex>& data() { return data_; }

    LatticeField& operator+=(const LatticeField& other);
    LatticeField& operator-=(const LatticeField& other);
    LatticeField& operator*=(Complex factor);
    friend LatticeField operator+(LatticeField a, const LatticeField& b) { return a += b; }
    friend LatticeField operator-(LatticeField a, const LatticeField& b) { return a -= b; }
    friend LatticeField operator*(Complex c, LatticeField a) { return a *= c; }
    friend LatticeField operator*(LatticeField a, Complex c) { return a *= c; }

    // sqrt(sum_x h^n ||f(x)||^2).
    double norm() const;
    double max_abs() const;

private:
    GridSpec grid_;
    Signature sig_;
    std::size_t sites_;
    std::size_t blades_;
    std::vector<std::size_t> strides_;
    std::vector<Complex> data_;
};

LatticeField constant_field(const GridSpec& grid, const Multivector& value);
// value at the origin, zero elsewhere.
LatticeField delta_field(const GridSpec& grid, const Multivector& value);
// value * exp(i xi.x) with xi_j = 2 pi k_j / (N_j h).
LatticeField plane_wave(const GridSpec& grid, const std::vector<int>& modes, const Multivector& value);

// g(x) = f(x + steps h e_axis), axis 1-based.
LatticeField shift(const LatticeField& f, int axis, long steps);

// sum_j [f(x+h e_j) + f(x-h e_j) - 2 f(x)] / h^2.
LatticeField discrete_laplacian(const LatticeField& f);

// Dirac-Kaehler stencil D_eps; eps must be a positive integer multiple of h.
LatticeField dirac_kahler(const LatticeField& f, double eps);
LatticeField dirac_kahler(const LatticeField& f);
// Same stencil with the e_j sum negated.
LatticeField dirac_kahler_dagger(const LatticeField& f, double eps);
LatticeField dirac_kahler_dagger(const LatticeField& f);

// sum_x h^n f(x)^dagger g(x).
Multivector inner_product(const LatticeField& f, const LatticeField& g);

// Pointwise left Clifford multiplication a * f(x).
LatticeField left_multiply(const Multivector& a, const LatticeField& f);

}  // namespace relwave::lattice
