#include <doctest.h>

#include "relwave/acceptance.hpp"
#include "relwave/clifford.hpp"
#include "relwave/errors.hpp"

using namespace relwave;
using namespace relwave::clifford;

namespace {

// Independent product oracle: multiply generator words one factor at a time,
// bubbling each new generator into place and contracting equal neighbours.
Multivector word_product(Signature sig, BladeMask a, BladeMask b) {
    const int n = sig.dim();
    std::vector<int> word;
    for (int j = 0; j < 2 * n; ++j) {
        if (a >> j & 1u) word.push_back(j);
    }
    for (int j = 0; j < 2 * n; ++j) {
        if (b >> j & 1u) word.push_back(j);
    }
    int sign = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i + 1 < word.size(); ++i) {
            if (word[i] > word[i + 1]) {
                std::swap(word[i], word[i + 1]);
                sign = -sign;
                changed = true;
            } else if (word[i] == word[i + 1]) {
                sign *= word[i] < n ? -1 : 1;
                word.erase(word.begin() + static_cast<long>(i), word.begin() + static_cast<long>(i) + 2);
                changed = true;
                break;
            }
        }
    }
    BladeMask mask = 0;
    for (int j : word) mask |= BladeMask{1} << j;
    return Multivector::blade(sig, mask, static_cast<double>(sign));
}

}  // namespace

TEST_CASE("generators square to the signature") {
    for (int n = 1; n <= 3; ++n) {
        const Signature sig(n);
        for (int j = 1; j <= 2 * n; ++j) {
            const Multivector e = Multivector::generator(sig, j);
            CHECK((e * e).coeffs() == Multivector::scalar(sig, j <= n ? -1.0 : 1.0).coeffs());
        }
    }
}

TEST_CASE("blade products match the word-reduction oracle") {
    for (int n = 1; n <= 3; ++n) {
        const Signature sig(n);
        for (BladeMask a = 0; a < sig.blade_count(); ++a) {
            for (BladeMask b = 0; b < sig.blade_count(); ++b) {
                const auto got = Multivector::blade(sig, a) * Multivector::blade(sig, b);
                REQUIRE(got.coeffs() == word_product(sig, a, b).coeffs());
            }
        }
    }
}

TEST_CASE("scalar one is the identity") {
    const Signature sig(2);
    const Multivector a = acceptance::random_multivector(sig, 3);
    const Multivector one = Multivector::scalar(sig, 1.0);
    CHECK((one * a).coeffs() == a.coeffs());
    CHECK((a * one).coeffs() == a.coeffs());
}

TEST_CASE("dagger on generators and products") {
    const Signature sig(2);
    CHECK(dagger(Multivector::generator(sig, 1)).coeffs() == (-Multivector::generator(sig, 1)).coeffs());
    CHECK(dagger(Multivector::generator(sig, 3)).coeffs() == Multivector::generator(sig, 3).coeffs());
    for (BladeMask a = 0; a < 16; ++a) {
        for (BladeMask b = 0; b < 16; ++b) {
            const Multivector A = Multivector::blade(sig, a);
            const Multivector B = Multivector::blade(sig, b);
            REQUIRE(dagger(A * B).coeffs() == (dagger(B) * dagger(A)).coeffs());
        }
    }
}

TEST_CASE("dagger is conjugate linear and involutive") {
    const Signature sig(2);
    Multivector a = acceptance::random_multivector(sig, 5);
    const Multivector scaled = dagger(a * Complex(0.0, 2.0));
    CHECK((scaled - dagger(a) * Complex(0.0, -2.0)).max_abs() < 1e-15);
    CHECK((dagger(dagger(a)) - a).max_abs() == 0.0);
}

TEST_CASE("pseudoscalar squares to one and anticommutes with generators") {
    for (int n = 1; n <= 3; ++n) {
        const Signature sig(n);
        const Multivector g = pseudoscalar(sig);
        CHECK((g * g).coeffs() == Multivector::scalar(sig, 1.0).coeffs());
        for (int j = 1; j <= 2 * n; ++j) {
            const Multivector e = Multivector::generator(sig, j);
            CHECK((g * e + e * g).is_zero());
        }
    }
    const Signature one(1);
    CHECK(pseudoscalar(one).coeffs() == (Multivector::generator(one, 2) * Multivector::generator(one, 1)).coeffs());
}

TEST_CASE("norm squared") {
    const Signature sig(2);
    CHECK(norm_squared(Multivector::generator(sig, 1)) == 1.0);
    CHECK(norm_squared(Multivector(sig)) == 0.0);
    const Multivector a = Multivector::blade(sig, 0b11, Complex(1.0, 1.0));
    CHECK(norm_squared(a) == doctest::Approx(2.0).epsilon(1e-15));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Multivector r = acceptance::random_multivector(sig, 40 + seed);
        const Complex full = (dagger(r) * r).scalar_part();
        CHECK(std::abs(full.imag()) < 1e-13);
        CHECK(full.real() == doctest::Approx(r.coeff_norm() * r.coeff_norm()).epsilon(1e-13));
        CHECK(norm_squared(r) > 0.0);
    }
}

TEST_CASE("associativity on random triples") {
    for (int n = 1; n <= 3; ++n) {
        const Signature sig(n);
        for (std::uint64_t t = 0; t < 100; ++t) {
            const auto a = acceptance::random_multivector(sig, 3 * t);
            const auto b = acceptance::random_multivector(sig, 3 * t + 1);
            const auto c = acceptance::random_multivector(sig, 3 * t + 2);
            const auto left = (a * b) * c;
            REQUIRE((left - a * (b * c)).max_abs() <= 1e-12 * left.max_abs());
        }
    }
}

TEST_CASE("blade labels round trip") {
    CHECK(blade_label(0) == "");
    CHECK(blade_label(0b101) == "1\xC2\xB7" "3");
    for (BladeMask b = 0; b < 64; ++b) CHECK(parse_blade_label(blade_label(b), 3) == b);
    CHECK(parse_blade_label("1.3", 3) == 0b101u);
    CHECK_THROWS_AS(parse_blade_label("7", 3), InvalidArgument);
    CHECK_THROWS_AS(parse_blade_label("2x", 3), InvalidArgument);
}

TEST_CASE("signature bounds and mismatches") {
    CHECK_THROWS_AS(Signature(0), InvalidArgument);
    CHECK_THROWS_AS(Signature(6), InvalidArgument);
    CHECK_THROWS_AS(Multivector::generator(Signature(1), 3), InvalidArgument);
    CHECK_THROWS_AS(Multivector(Signature(1)) * Multivector(Signature(2)), InvalidArgument);
}
