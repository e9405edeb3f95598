#include "relwave/clifford.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "relwave/errors.hpp"

namespace relwave::clifford {

namespace {

// "·" in UTF-8.
constexpr const char* kBladeSeparator = "\xC2\xB7";

void require_same(Signature a, Signature b) {
    if (a != b) {
        throw InvalidArgument("Clifford signature mismatch: Cl(" + std::to_string(a.dim()) + "," +
                              std::to_string(a.dim()) + ") vs Cl(" + std::to_string(b.dim()) + "," +
                              std::to_string(b.dim()) + ")");
    }
}

}  // namespace

Signature::Signature(int n) : n_(n) {
    if (n < 1 || n > kMaxDim) {
        throw InvalidArgument("Clifford dimension n must lie in [1, " + std::to_string(kMaxDim) +
                              "], got " + std::to_string(n));
    }
}

int blade_product_sign(BladeMask a, BladeMask b, int n) {
    // Transpositions needed to bring the concatenation e_a e_b to canonical order.
    int swaps = 0;
    for (BladeMask shifted = a >> 1; shifted != 0; shifted >>= 1) {
        swaps += std::popcount(shifted & b);
    }
    int sign = (swaps & 1) ? -1 : 1;
    // Contractions e_j e_j: -1 for j <= n, +1 above.
    const BladeMask low = (BladeMask{1} << n) - 1;
    if (std::popcount(a & b & low) & 1) sign = -sign;
    return sign;
}

int blade_dagger_sign(BladeMask blade, int n) {
    const int r = grade(blade);
    const BladeMask low = (BladeMask{1} << n) - 1;
    int sign = ((r * (r - 1) / 2) & 1) ? -1 : 1;
    if (std::popcount(blade & low) & 1) sign = -sign;
    return sign;
}

int grade(BladeMask blade) { return std::popcount(blade); }

std::string blade_label(BladeMask blade) {
    std::string out;
    for (int j = 0; blade != 0; ++j, blade >>= 1) {
        if ((blade & 1u) == 0) continue;
        if (!out.empty()) out += kBladeSeparator;
        out += std::to_string(j + 1);
    }
    return out;
}

BladeMask parse_blade_label(const std::string& label, int n) {
    BladeMask mask = 0;
    if (label.empty()) return mask;
    std::string normalized;
    for (std::size_t i = 0; i < label.size();) {
        if (label.compare(i, 2, kBladeSeparator) == 0) {
            normalized += ' ';
            i += 2;
        } else {
            normalized += label[i] == '.' ? ' ' : label[i];
            ++i;
        }
    }
    std::istringstream in(normalized);
    int previous = 0;
    std::string token;
    while (in >> token) {
        int j = 0;
        try {
            std::size_t used = 0;
            j = std::stoi(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw InvalidArgument("malformed blade label '" + label + "'");
        }
        if (j < 1 || j > 2 * n) {
            throw InvalidArgument("blade label '" + label + "' names generator " + std::to_string(j) +
                                  " outside 1.." + std::to_string(2 * n));
        }
        if (j <= previous) {
            throw InvalidArgument("blade label '" + label + "' is not strictly increasing");
        }
        previous = j;
        mask |= BladeMask{1} << (j - 1);
    }
    return mask;
}

Multivector::Multivector(Signature sig) : sig_(sig), coeffs_(sig.blade_count()) {}

Multivector Multivector::scalar(Signature sig, Complex value) {
    Multivector out(sig);
    out.coeffs_[0] = value;
    return out;
}

Multivector Multivector::generator(Signature sig, int j) {
    if (j < 1 || j > sig.generators()) {
        throw InvalidArgument("generator index " + std::to_string(j) + " outside 1.." +
                              std::to_string(sig.generators()));
    }
    return blade(sig, BladeMask{1} << (j - 1));
}

Multivector Multivector::blade(Signature sig, BladeMask mask, Complex value) {
    if (mask >= sig.blade_count()) throw InvalidArgument("blade mask out of range");
    Multivector out(sig);
    out.coeffs_[mask] = value;
    return out;
}

bool Multivector::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](Complex c) { return c == Complex{}; });
}

Multivector& Multivector::operator+=(const Multivector& other) {
    require_same(sig_, other.sig_);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
    return *this;
}

Multivector& Multivector::operator-=(const Multivector& other) {
    require_same(sig_, other.sig_);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
    return *this;
}

Multivector& Multivector::operator*=(Complex factor) {
    for (auto& c : coeffs_) c *= factor;
    return *this;
}

Multivector operator*(const Multivector& a, const Multivector& b) { return geometric_product(a, b); }

double Multivector::coeff_norm() const {
    double sum = 0.0;
    for (auto c : coeffs_) sum += std::norm(c);
    return std::sqrt(sum);
}

double Multivector::max_abs() const {
    double m = 0.0;
    for (auto c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

void geometric_product_accumulate(const Multivector& a, const Multivector& b, Multivector& out) {
    require_same(a.signature(), b.signature());
    require_same(a.signature(), out.signature());
    const int n = a.signature().dim();
    const auto count = static_cast<BladeMask>(a.size());
    // Sparse on both sides: fields and multipliers are usually low-grade.
    std::vector<BladeMask> nz_b;
    nz_b.reserve(count);
    for (BladeMask j = 0; j < count; ++j) {
        if (b[j] != Complex{}) nz_b.push_back(j);
    }
    for (BladeMask i = 0; i < count; ++i) {
        const Complex ai = a[i];
        if (ai == Complex{}) continue;
        for (BladeMask j : nz_b) {
            const Complex term = ai * b[j];
            if (blade_product_sign(i, j, n) > 0) {
                out[i ^ j] += term;
            } else {
                out[i ^ j] -= term;
            }
        }
    }
}

Multivector geometric_product(const Multivector& a, const Multivector& b) {
    Multivector out(a.signature());
    geometric_product_accumulate(a, b, out);
    return out;
}

Multivector dagger(const Multivector& a) {
    Multivector out(a.signature());
    const int n = a.signature().dim();
    for (BladeMask k = 0; k < a.size(); ++k) {
        out[k] = std::conj(a[k]) * static_cast<double>(blade_dagger_sign(k, n));
    }
    return out;
}

Multivector pseudoscalar(Signature sig) {
    Multivector gamma = Multivector::scalar(sig, 1.0);
    const int n = sig.dim();
    for (int j = 1; j <= n; ++j) {
        gamma = gamma * Multivector::generator(sig, n + j) * Multivector::generator(sig, j);
    }
    return gamma;
}

double norm_squared(const Multivector& a) {
    // Scalar part of a^dagger a: only e_J^dagger e_J terms reach the scalar blade.
    const int n = a.signature().dim();
    double sum = 0.0;
    for (BladeMask k = 0; k < a.size(); ++k) {
        const Complex dag = std::conj(a[k]) * static_cast<double>(blade_dagger_sign(k, n));
        sum += (dag * a[k] * static_cast<double>(blade_product_sign(k, k, n))).real();
    }
    return sum;
}

}  // namespace relwave::clifford
