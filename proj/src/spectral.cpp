#include "relwave/spectral.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "relwave/errors.hpp"
#include "relwave/parallel.hpp"

namespace relwave::spectral {

using clifford::BladeMask;
using std::numbers::pi;

namespace {

// out[q] = sum_k in[k] exp(sign * 2 pi i k q / N).
void dft_line_direct(const std::vector<Complex>& in, std::vector<Complex>& out, int sign,
                     const std::vector<Complex>& roots) {
    const std::size_t N = in.size();
    for (std::size_t q = 0; q < N; ++q) {
        Complex acc{};
        for (std::size_t k = 0; k < N; ++k) {
            const Complex w = roots[(k * q) % N];
            acc += in[k] * (sign > 0 ? w : std::conj(w));
        }
        out[q] = acc;
    }
}

// In-place iterative radix-2 FFT with the same kernel as dft_line_direct.
void fft_line(std::vector<Complex>& a, int sign, const std::vector<Complex>& roots) {
    const std::size_t N = a.size();
    for (std::size_t i = 1, j = 0; i < N; ++i) {
        std::size_t bit = N >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= N; len <<= 1) {
        const std::size_t step = N / len;
        for (std::size_t i = 0; i < N; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex w = sign > 0 ? roots[k * step] : std::conj(roots[k * step]);
                const Complex u = a[i + k];
                const Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

// Transforms every line of a site-major, blade-minor array along each axis.
void transform_all_axes(std::vector<Complex>& data, const GridSpec& grid, std::size_t blades, int sign,
                        TransformPath path) {
    const int n = grid.dim;
    std::vector<std::size_t> strides(static_cast<std::size_t>(n));
    std::size_t stride = 1;
    for (int axis = n - 1; axis >= 0; --axis) {
        strides[axis] = stride;
        stride *= static_cast<std::size_t>(grid.points[axis]);
    }
    const std::size_t sites = stride;
    for (int axis = 0; axis < n; ++axis) {
        const auto N = static_cast<std::size_t>(grid.points[axis]);
        std::vector<Complex> roots(N);
        for (std::size_t k = 0; k < N; ++k) roots[k] = std::polar(1.0, 2.0 * pi * static_cast<double>(k) / N);
        const bool fast = path == TransformPath::automatic && std::has_single_bit(N);
        const std::size_t s_axis = strides[axis];
        // Line starts: sites whose coordinate along `axis` is zero.
        std::vector<std::size_t> starts;
        starts.reserve(sites / N);
        for (std::size_t s = 0; s < sites; ++s) {
            if ((s / s_axis) % N == 0) starts.push_back(s);
        }
        parallel_for(starts.size(), [&](std::size_t line) {
            std::vector<Complex> buf(N), out(N);
            for (std::size_t b = 0; b < blades; ++b) {
                bool any = false;
                for (std::size_t k = 0; k < N; ++k) {
                    buf[k] = data[(starts[line] + k * s_axis) * blades + b];
                    any = any || buf[k] != Complex{};
                }
                if (!any) continue;
                if (fast) {
                    fft_line(buf, sign, roots);
                    out.swap(buf);
                } else {
                    dft_line_direct(buf, out, sign, roots);
                }
                for (std::size_t k = 0; k < N; ++k) data[(starts[line] + k * s_axis) * blades + b] = out[k];
            }
        });
    }
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
    if (!a.same_geometry(b)) throw InvalidArgument("fields live on different grids");
}

}  // namespace

SpectralField::SpectralField(GridSpec grid) : values_(std::move(grid)) {}

Momentum SpectralField::momentum(std::size_t point) const {
    const auto q = values_.centered_coords(point);
    Momentum xi(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) {
        xi[j] = 2.0 * pi * q[j] / (grid().points[j] * grid().spacing);
    }
    return xi;
}

double SpectralField::cell_volume() const {
    double v = 1.0;
    for (int N : grid().points) v *= 2.0 * pi / (N * grid().spacing);
    return v;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    require_same_grid(grid(), other.grid());
    for (std::size_t k = 0; k < data().size(); ++k) data()[k] += other.data()[k];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    require_same_grid(grid(), other.grid());
    for (std::size_t k = 0; k < data().size(); ++k) data()[k] -= other.data()[k];
    return *this;
}

SpectralField& SpectralField::operator*=(Complex c) {
    for (auto& v : data()) v *= c;
    return *this;
}

SpectralField dft(const LatticeField& f, TransformPath path) {
    SpectralField F(f.grid());
    F.data() = f.data();
    transform_all_axes(F.data(), f.grid(), f.blade_count(), +1, path);
    const int n = f.grid().dim;
    F *= std::pow(f.grid().spacing, n) / std::pow(2.0 * pi, 0.5 * n);
    return F;
}

LatticeField idft(const SpectralField& F, TransformPath path) {
    LatticeField f(F.grid());
    f.data() = F.data();
    transform_all_axes(f.data(), F.grid(), F.blade_count(), -1, path);
    const int n = F.grid().dim;
    f *= F.cell_volume() / std::pow(2.0 * pi, 0.5 * n);
    return f;
}

Multivector spectral_inner_product(const SpectralField& F, const SpectralField& G) {
    require_same_grid(F.grid(), G.grid());
    Multivector sum(clifford::Signature(F.grid().dim));
    for (std::size_t k = 0; k < F.point_count(); ++k) {
        clifford::geometric_product_accumulate(clifford::dagger(F.at(k)), G.at(k), sum);
    }
    sum *= F.cell_volume();
    return sum;
}

double multiplier_d2(const Momentum& xi, double h) {
    double sum = 0.0;
    for (double x : xi) {
        const double s = std::sin(0.5 * h * x);
        sum += s * s;
    }
    return 4.0 * sum / (h * h);
}

Multivector multiplier_z(const Momentum& xi, double h, double alpha, clifford::Signature sig) {
    const int n = sig.dim();
    if (static_cast<int>(xi.size()) != n) throw InvalidArgument("momentum rank does not match signature");
    Multivector z(sig);
    for (int j = 0; j < n; ++j) {
        const double a = (1.0 - alpha) * h * xi[j];
        const double b = alpha * h * xi[j];
        z[BladeMask{1} << j] = Complex(0.0, -(std::sin(a) + std::sin(b)) / h);
        z[BladeMask{1} << (n + j)] = (std::cos(b) - std::cos(a)) / h;
    }
    return z;
}

SpectralField apply_multiplier(const SpectralField& F, const MultivectorMultiplier& M) {
    SpectralField out(F.grid());
    parallel_for(F.point_count(), [&](std::size_t k) {
        Multivector value(clifford::Signature(F.grid().dim));
        clifford::geometric_product_accumulate(M(F.momentum(k)), F.at(k), value);
        out.set(k, value);
    });
    return out;
}

SpectralField apply_multiplier(const SpectralField& F, const ScalarMultiplier& M) {
    SpectralField out(F.grid());
    const std::size_t B = F.blade_count();
    parallel_for(F.point_count(), [&](std::size_t k) {
        const Complex c = M(F.momentum(k));
        for (BladeMask b = 0; b < B; ++b) out.component(k, b) = c * F.component(k, b);
    });
    return out;
}

LatticeField dirac_h_alpha(const LatticeField& f, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 0.5)) throw InvalidArgument("alpha must lie in [0, 1/2]");
    const double h = f.grid().spacing;
    const auto sig = f.signature();
    MultivectorMultiplier z = [&](const Momentum& xi) { return multiplier_z(xi, h, alpha, sig); };
    return idft(apply_multiplier(dft(f), z));
}

double factorization_check(const LatticeField& f, double alpha, double m) {
    const double norm = f.norm();
    if (norm == 0.0) return 0.0;
    const double h = f.grid().spacing;
    const auto sig = f.signature();
    const Multivector mass_term = m * clifford::pseudoscalar(sig);
    MultivectorMultiplier op = [&](const Momentum& xi) { return multiplier_z(xi, h, alpha, sig) - mass_term; };
    const LatticeField lhs = idft(apply_multiplier(apply_multiplier(dft(f), op), op));
    LatticeField rhs = Complex(m * m) * f - lattice::discrete_laplacian(f);
    return (lhs - rhs).norm() / norm;
}

LatticeField convolve(const LatticeField& f, const LatticeField& phi) {
    require_same_grid(f.grid(), phi.grid());
    const int n = f.grid().dim;
    const double weight = std::pow(f.grid().spacing, n);
    LatticeField out(f.grid());
    parallel_for(f.site_count(), [&](std::size_t x) {
        const auto cx = f.site_coords(x);
        Multivector acc(f.signature());
        for (std::size_t y = 0; y < f.site_count(); ++y) {
            const auto cy = f.site_coords(y);
            std::vector<long> diff(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) diff[j] = static_cast<long>(cy[j]) - cx[j];
            clifford::geometric_product_accumulate(phi.at(y), f.at(f.site_index(diff)), acc);
        }
        acc *= weight;
        out.set(x, acc);
    });
    return out;
}

LatticeField convolve_spectral(const LatticeField& f, const LatticeField& phi) {
    require_same_grid(f.grid(), phi.grid());
    const SpectralField Ff = dft(f);
    const SpectralField Fphi = dft(phi);
    SpectralField product(f.grid());
    const int n = f.grid().dim;
    parallel_for(product.point_count(), [&](std::size_t k) {
        auto q = product.momentum_labels(k);
        std::vector<long> neg(q.size());
        for (std::size_t j = 0; j < q.size(); ++j) neg[j] = -static_cast<long>(q[j]);
        Multivector value{clifford::Signature(n)};
        clifford::geometric_product_accumulate(Fphi.at(k), Ff.at(Ff.point_index(neg)), value);
        product.set(k, value);
    });
    product *= std::pow(2.0 * pi, 0.5 * n);
    return idft(product);
}

LatticeField kernel_convolve(const LatticeField& phi, const LatticeField& kernel, ConvolutionPath path) {
    const bool direct = path == ConvolutionPath::direct ||
                        (path == ConvolutionPath::automatic && phi.site_count() <= kDirectConvolutionSites);
    return direct ? convolve(reflect(kernel), phi) : convolve_spectral(reflect(kernel), phi);
}

LatticeField reflect(const LatticeField& f) {
    LatticeField out(f.grid());
    const std::size_t B = f.blade_count();
    for (std::size_t s = 0; s < f.site_count(); ++s) {
        const auto c = f.site_coords(s);
        std::vector<long> neg(c.size());
        for (std::size_t j = 0; j < c.size(); ++j) neg[j] = -static_cast<long>(c[j]);
        const std::size_t src = f.site_index(neg);
        for (BladeMask b = 0; b < B; ++b) out.component(s, b) = f.component(src, b);
    }
    return out;
}

LatticeField kernel_from_multiplier(const GridSpec& grid, const ScalarMultiplier& c) {
    SpectralField C(grid);
    for (std::size_t k = 0; k < C.point_count(); ++k) C.component(k, 0) = c(C.momentum(k));
    LatticeField K = idft(C);
    K *= std::pow(2.0 * pi, -0.5 * grid.dim);
    return K;
}

LatticeField refine(const LatticeField& f) {
    const SpectralField F = dft(f);
    GridSpec fine = f.grid();
    for (int& N : fine.points) N *= 2;
    fine.spacing *= 0.5;
    SpectralField G(fine);
    for (std::size_t k = 0; k < F.point_count(); ++k) {
        const auto q = F.momentum_labels(k);
        const std::size_t target = G.point_index(std::vector<long>(q.begin(), q.end()));
        G.set(target, F.at(k));
    }
    return idft(G);
}

}  // namespace relwave::spectral
