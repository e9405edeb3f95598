#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "relwave/acceptance.hpp"
#include "relwave/errors.hpp"
#include "relwave/spectral.hpp"

using namespace relwave;
using namespace relwave::spectral;
using clifford::BladeMask;
using clifford::Signature;
using std::numbers::pi;

namespace {

double rel_gap(const LatticeField& a, const LatticeField& b) { return (a - b).max_abs() / b.max_abs(); }

Multivector one(int n) { return Multivector::scalar(Signature(n), 1.0); }

std::size_t negated(const SpectralField& F, std::size_t k) {
    const auto q = F.momentum_labels(k);
    std::vector<long> neg;
    for (int v : q) neg.push_back(-v);
    return F.point_index(neg);
}

}  // namespace

TEST_CASE("momentum grid covers (-pi/h, pi/h]") {
    const SpectralField F(GridSpec::cubic(1, 8, 0.5));
    double lo = 1e9, hi = -1e9;
    for (std::size_t k = 0; k < F.point_count(); ++k) {
        lo = std::min(lo, F.momentum(k)[0]);
        hi = std::max(hi, F.momentum(k)[0]);
    }
    CHECK(lo > -pi / 0.5);
    CHECK(hi == doctest::Approx(pi / 0.5));
    CHECK(F.cell_volume() == doctest::Approx(2.0 * pi / 4.0));
}

TEST_CASE("transform of a delta is constant") {
    for (int n = 1; n <= 3; ++n) {
        const GridSpec grid = GridSpec::cubic(n, 4, 0.5);
        const SpectralField F = dft(delta_field(grid, one(n)));
        const double expected = std::pow(0.5, n) / std::pow(2.0 * pi, 0.5 * n);
        for (std::size_t k = 0; k < F.point_count(); ++k) {
            CHECK(std::abs(F.component(k, 0) - expected) < 1e-15);
        }
        // and back
        const LatticeField d = idft(F);
        CHECK((d - delta_field(grid, one(n))).max_abs() < 1e-14);
    }
}

TEST_CASE("round trip and fast path agree with the direct sums") {
    std::uint64_t seed = 1;
    for (int n = 1; n <= 3; ++n) {
        for (int N : {6, 8, 16}) {
            if (n == 3 && N == 16) continue;
            const GridSpec grid = GridSpec::cubic(n, N, 0.3);
            const LatticeField f = acceptance::random_field(grid, ++seed);
            const SpectralField F = dft(f);
            CHECK(rel_gap(idft(F), f) < 1e-12);
            CHECK(rel_gap(idft(F, TransformPath::direct), f) < 1e-12);
            const SpectralField Fd = dft(f, TransformPath::direct);
            double diff = 0.0;
            for (std::size_t i = 0; i < F.data().size(); ++i) diff = std::max(diff, std::abs(F.data()[i] - Fd.data()[i]));
            CHECK(diff < 1e-12 * Fd.max_abs());
        }
    }
}

TEST_CASE("definitional sum, one dimension") {
    const GridSpec grid = GridSpec::cubic(1, 6, 0.7);
    const LatticeField f = acceptance::random_field(grid, 9);
    const SpectralField F = dft(f, TransformPath::direct);
    for (std::size_t k = 0; k < F.point_count(); ++k) {
        const double xi = F.momentum(k)[0];
        Complex sum = 0.0;
        for (std::size_t s = 0; s < f.site_count(); ++s) {
            sum += f.component(s, 3) * std::polar(1.0, 0.7 * f.site_coords(s)[0] * xi);
        }
        sum *= 0.7 / std::sqrt(2.0 * pi);
        CHECK(std::abs(F.component(k, 3) - sum) < 1e-13);
    }
}

TEST_CASE("linearity") {
    const GridSpec grid = GridSpec::cubic(2, 4, 1.0);
    const LatticeField f = acceptance::random_field(grid, 1);
    const LatticeField g = acceptance::random_field(grid, 2);
    const Complex a(0.3, -1.2);
    const LatticeField lhs = idft(dft(a * f + g));
    CHECK(rel_gap(lhs, a * f + g) < 1e-12);
}

TEST_CASE("translation multiplies by exp(-i h xi_j)") {
    const GridSpec grid = GridSpec::cubic(2, 8, 0.5);
    const LatticeField f = acceptance::random_field(grid, 3);
    const SpectralField F = dft(f);
    const SpectralField G = dft(shift(f, 2, 1));
    for (std::size_t k = 0; k < F.point_count(); ++k) {
        const Complex phase = std::polar(1.0, -0.5 * F.momentum(k)[1]);
        for (BladeMask b = 0; b < F.blade_count(); ++b) {
            REQUIRE(std::abs(G.component(k, b) - phase * F.component(k, b)) < 1e-13);
        }
    }
}

TEST_CASE("Parseval against the direct site sum") {
    for (int n = 1; n <= 2; ++n) {
        const GridSpec grid = GridSpec::cubic(n, 8, 0.6);
        const LatticeField f = acceptance::random_field(grid, 50 + n);
        const LatticeField g = acceptance::random_field(grid, 60 + n);
        const Multivector direct = lattice::inner_product(f, g);
        CHECK((spectral_inner_product(dft(f), dft(g)) - direct).max_abs() < 1e-11 * direct.max_abs());
    }
}

TEST_CASE("Laplace multiplier values") {
    CHECK(multiplier_d2({0.0}, 1.0) == 0.0);
    CHECK(multiplier_d2({pi}, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(multiplier_d2({2.0 * pi, 0.0}, 0.5) == doctest::Approx(16.0).epsilon(1e-15));
}

TEST_CASE("Dirac multiplier values") {
    const Signature sig(1);
    CHECK(multiplier_z({0.0}, 1.0, 0.3, sig).is_zero());
    const Multivector z = multiplier_z({pi}, 1.0, 0.25, sig);
    CHECK(std::abs(z[1] - Complex(0.0, -std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(z[2] - Complex(std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs((z * z).scalar_part() - 4.0) < 1e-14);
    CHECK(std::abs(z[0]) == 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 3;
        const double h = 0.5 + 0.5 * (u(rng) + 1.0);
        Momentum xi;
        for (int j = 0; j < n; ++j) xi.push_back(u(rng) * pi / h);
        const double alpha = 0.25 * (u(rng) + 1.0);
        const Multivector zz = multiplier_z(xi, h, alpha, Signature(n));
        const double d2 = multiplier_d2(xi, h);
        CHECK((zz * zz - Multivector::scalar(Signature(n), d2)).max_abs() < 1e-12);
    }
}

TEST_CASE("scalar and Clifford multipliers") {
    const GridSpec grid = GridSpec::cubic(2, 8, 0.5);
    const LatticeField f = acceptance::random_field(grid, 70);
    const SpectralField F = dft(f);
    const SpectralField same = apply_multiplier(F, MultivectorMultiplier([](const Momentum&) { return one(2); }));
    CHECK(rel_gap(idft(same), f) < 1e-12);
    const SpectralField lap = apply_multiplier(F, ScalarMultiplier([&](const Momentum& xi) {
        return Complex(-multiplier_d2(xi, 0.5));
    }));
    CHECK(rel_gap(idft(lap), lattice::discrete_laplacian(f)) < 1e-12);

    const Multivector a = acceptance::random_multivector(Signature(2), 1);
    const Multivector b = acceptance::random_multivector(Signature(2), 2);
    const auto twice = apply_multiplier(apply_multiplier(F, MultivectorMultiplier([&](const Momentum&) { return a; })),
                                        MultivectorMultiplier([&](const Momentum&) { return b; }));
    const auto once = apply_multiplier(F, MultivectorMultiplier([&](const Momentum&) { return b * a; }));
    CHECK(rel_gap(idft(twice), idft(once)) < 1e-12);
}

TEST_CASE("D_{h,alpha} at alpha = 0 is the stencil operator") {
    const GridSpec grid = GridSpec::cubic(2, 8, 0.5);
    LatticeField f(grid);
    const LatticeField r = acceptance::random_field(grid, 80);
    for (std::size_t s = 0; s < f.site_count(); ++s) f.component(s, 0) = r.component(s, 0);
    CHECK(rel_gap(dirac_h_alpha(f, 0.0), lattice::dirac_kahler(f)) < 1e-12);
    CHECK(rel_gap(dirac_h_alpha(r, 0.0), lattice::dirac_kahler(r)) < 1e-12);
}

TEST_CASE("D_{h,alpha} squares to minus the Laplacian") {
    const GridSpec grid = GridSpec::cubic(2, 8, 0.5);
    const LatticeField f = acceptance::random_field(grid, 81);
    CHECK(rel_gap(dirac_h_alpha(dirac_h_alpha(f, 0.3), 0.3), Complex(-1.0) * lattice::discrete_laplacian(f)) < 1e-12);
}

TEST_CASE("D_{h,1/2} is the averaged forward/backward operator on the h/2 lattice") {
    const GridSpec grid = GridSpec::cubic(2, 8, 0.6);
    const LatticeField f = acceptance::random_field(grid, 82);
    const LatticeField fine = refine(f);
    REQUIRE(fine.grid().points[0] == 16);
    // (D+ + D-)/2 on spacing h/2 reduces to sum_j e_j [g(x + h/2 e_j) - g(x - h/2 e_j)] / h.
    LatticeField averaged(fine.grid());
    for (int j = 1; j <= 2; ++j) {
        const LatticeField diff = Complex(1.0 / 0.6) * (shift(fine, j, 1) - shift(fine, j, -1));
        averaged += lattice::left_multiply(Multivector::generator(Signature(2), j), diff);
    }
    const LatticeField expected = dirac_h_alpha(f, 0.5);
    double worst = 0.0;
    for (std::size_t s = 0; s < f.site_count(); ++s) {
        const auto c = f.site_coords(s);
        const std::size_t t = averaged.site_index({2L * c[0], 2L * c[1]});
        worst = std::max(worst, (averaged.at(t) - expected.at(s)).max_abs());
    }
    CHECK(worst < 1e-12 * expected.max_abs());
}

TEST_CASE("refinement reproduces the coarse samples") {
    const GridSpec grid = GridSpec::cubic(1, 8, 1.0);
    const LatticeField f = acceptance::random_field(grid, 83);
    const LatticeField fine = refine(f);
    for (std::size_t s = 0; s < f.site_count(); ++s) {
        const std::size_t t = fine.site_index({2L * f.site_coords(s)[0]});
        CHECK((fine.at(t) - f.at(s)).max_abs() < 1e-13);
    }
}

TEST_CASE("single modes see exactly z_{h,alpha}") {
    const GridSpec grid = GridSpec::cubic(2, 8, 0.5);
    const Signature sig(2);
    for (const auto& modes : {std::vector<int>{1, 0}, std::vector<int>{-3, 2}, std::vector<int>{4, 4}}) {
        const LatticeField w = plane_wave(grid, modes, one(2));
        Momentum neg;
        for (int k : modes) neg.push_back(-2.0 * pi * (k == 4 ? -4 : k) / (8 * 0.5));
        // The forward kernel e^{+ix.xi} puts e^{i xi.x} at momentum -xi, folded into (-pi/h, pi/h].
        const Multivector z = multiplier_z(neg, 0.5, 0.2, sig);
        CHECK(rel_gap(dirac_h_alpha(w, 0.2), lattice::left_multiply(z, w)) < 1e-12);
    }
}

TEST_CASE("factorization check") {
    const GridSpec grid = GridSpec::cubic(2, 8, 0.5);
    CHECK(factorization_check(acceptance::random_field(grid, 90), 0.25, 0.0) <= 1e-10);
    CHECK(factorization_check(delta_field(grid, one(2)), 0.25, 1.0) <= 1e-10);
    CHECK(factorization_check(LatticeField(grid), 0.25, 1.0) == 0.0);
    CHECK_THROWS_AS(dirac_h_alpha(LatticeField(grid), 0.7), InvalidArgument);
}

TEST_CASE("convolution with the scaled delta reflects") {
    const GridSpec grid = GridSpec::cubic(1, 8, 0.5);
    const LatticeField f = acceptance::random_field(grid, 91);
    const LatticeField identity = delta_field(grid, Multivector::scalar(Signature(1), 2.0));  // delta / h
    CHECK(rel_gap(convolve(f, identity), reflect(f)) < 1e-15);
    CHECK(rel_gap(kernel_convolve(f, identity), f) < 1e-15);
}

TEST_CASE("convolution theorem in its reflected form") {
    for (int n = 1; n <= 2; ++n) {
        const GridSpec grid = GridSpec::cubic(n, n == 1 ? 16 : 6, 0.4);
        const LatticeField f = acceptance::random_field(grid, 92 + n);
        const LatticeField phi = acceptance::random_field(grid, 94 + n);
        const SpectralField lhs = dft(convolve(f, phi));
        const SpectralField Ff = dft(f);
        const SpectralField Fphi = dft(phi);
        double worst = 0.0;
        for (std::size_t k = 0; k < lhs.point_count(); ++k) {
            const Multivector rhs = std::pow(2.0 * pi, 0.5 * n) * (Fphi.at(k) * Ff.at(negated(Ff, k)));
            worst = std::max(worst, (lhs.at(k) - rhs).max_abs());
        }
        CHECK(worst < 1e-11 * lhs.max_abs());
        CHECK(rel_gap(convolve_spectral(f, phi), convolve(f, phi)) < 1e-10);
    }
}

TEST_CASE("operand order matters for multivector convolution") {
    const GridSpec grid = GridSpec::cubic(1, 8, 1.0);
    const LatticeField f = acceptance::random_field(grid, 97);
    const LatticeField phi = acceptance::random_field(grid, 98);
    // Swapping Phi(y) f(y - x) to f(y - x) Phi(y) must change the result.
    LatticeField swapped(grid);
    for (std::size_t x = 0; x < grid.points[0]; ++x) {
        Multivector acc(Signature(1));
        for (std::size_t y = 0; y < grid.points[0]; ++y) {
            acc += f.at(f.site_index({static_cast<long>(y) - static_cast<long>(x)})) * phi.at(y);
        }
        swapped.set(x, acc);
    }
    CHECK(rel_gap(swapped, convolve(f, phi)) > 1e-3);
}

TEST_CASE("kernel convolution paths agree") {
    const GridSpec grid = GridSpec::cubic(2, 6, 0.5);
    const LatticeField phi = acceptance::random_field(grid, 99);
    const LatticeField K = acceptance::random_field(grid, 100);
    CHECK(rel_gap(kernel_convolve(phi, K, ConvolutionPath::spectral), kernel_convolve(phi, K, ConvolutionPath::direct)) <
          1e-12);
}

TEST_CASE("kernels reproduce their multipliers") {
    const GridSpec grid = GridSpec::cubic(1, 16, 0.5);
    const LatticeField phi = acceptance::random_field(grid, 101);
    const ScalarMultiplier c = [](const Momentum& xi) { return Complex(std::exp(-0.3 * xi[0] * xi[0])); };
    const LatticeField via_kernel = kernel_convolve(phi, kernel_from_multiplier(grid, c));
    CHECK(rel_gap(via_kernel, idft(apply_multiplier(dft(phi), c))) < 1e-12);
    const LatticeField id = kernel_from_multiplier(grid, [](const Momentum&) { return Complex(1.0); });
    CHECK(std::abs(id.component(0, 0) - 2.0) < 1e-13);  // delta / h
}

TEST_CASE("grid mismatches are rejected") {
    const LatticeField a(GridSpec::cubic(1, 8, 1.0));
    const LatticeField b(GridSpec::cubic(1, 8, 0.5));
    CHECK_THROWS_AS(convolve(a, b), InvalidArgument);
    CHECK_THROWS_AS(convolve_spectral(a, b), InvalidArgument);
}
