#include "relwave/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "relwave/errors.hpp"
#include "relwave/parallel.hpp"

namespace relwave::lattice {

using clifford::BladeMask;

void GridSpec::validate() const {
    Signature check(dim);  // throws on bad dim
    (void)check;
    if (static_cast<int>(points.size()) != dim) {
        throw InvalidArgument("points: expected " + std::to_string(dim) + " axis sizes, got " +
                              std::to_string(points.size()));
    }
    for (int N : points) {
        if (N <= 0 || N % 2 != 0) {
            throw InvalidArgument("points: every axis size must be a positive even integer, got " +
                                  std::to_string(N));
        }
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw InvalidArgument("spacing: must be a positive finite number");
    }
    if (!(alpha >= 0.0 && alpha <= 0.5)) throw InvalidArgument("alpha: must lie in [0, 1/2]");
    if (!(mass >= 0.0) || !std::isfinite(mass)) throw InvalidArgument("mass: must be nonnegative");
}

GridSpec GridSpec::cubic(int dim, int points, double spacing, double alpha, double mass) {
    GridSpec g;
    g.dim = dim;
    g.points.assign(static_cast<std::size_t>(std::max(dim, 0)), points);
    g.spacing = spacing;
    g.alpha = alpha;
    g.mass = mass;
    g.validate();
    return g;
}

std::size_t GridSpec::site_count() const {
    std::size_t count = 1;
    for (int N : points) count *= static_cast<std::size_t>(N);
    return count;
}

bool GridSpec::same_geometry(const GridSpec& other) const {
    return dim == other.dim && points == other.points && spacing == other.spacing;
}

LatticeField::LatticeField(GridSpec grid)
    : grid_((grid.validate(), std::move(grid))),
      sig_(grid_.dim),
      sites_(grid_.site_count()),
      blades_(sig_.blade_count()),
      strides_(static_cast<std::size_t>(grid_.dim)),
      data_(sites_ * blades_) {
    std::size_t stride = 1;
    for (int axis = grid_.dim - 1; axis >= 0; --axis) {
        strides_[axis] = stride;
        stride *= static_cast<std::size_t>(grid_.points[axis]);
    }
}

std::size_t LatticeField::site_index(const std::vector<long>& coords) const {
    if (static_cast<int>(coords.size()) != grid_.dim) throw InvalidArgument("coordinate rank mismatch");
    std::size_t index = 0;
    for (int axis = 0; axis < grid_.dim; ++axis) {
        const long N = grid_.points[axis];
        const long k = ((coords[axis] % N) + N) % N;
        index += static_cast<std::size_t>(k) * strides_[axis];
    }
    return index;
}

std::vector<int> LatticeField::site_coords(std::size_t site) const {
    std::vector<int> coords(static_cast<std::size_t>(grid_.dim));
    for (int axis = 0; axis < grid_.dim; ++axis) {
        coords[axis] = static_cast<int>((site / strides_[axis]) % grid_.points[axis]);
    }
    return coords;
}

std::vector<int> LatticeField::centered_coords(std::size_t site) const {
    auto coords = site_coords(site);
    for (int axis = 0; axis < grid_.dim; ++axis) {
        if (coords[axis] > grid_.points[axis] / 2) coords[axis] -= grid_.points[axis];
    }
    return coords;
}

Multivector LatticeField::at(std::size_t site) const {
    Multivector out(sig_);
    for (BladeMask b = 0; b < blades_; ++b) out[b] = data_[site * blades_ + b];
    return out;
}

void LatticeField::set(std::size_t site, const Multivector& value) {
    if (value.signature() != sig_) throw InvalidArgument("field/value signature mismatch");
    for (BladeMask b = 0; b < blades_; ++b) data_[site * blades_ + b] = value[b];
}

namespace {

void require_same_grid(const LatticeField& a, const LatticeField& b) {
    if (!a.grid().same_geometry(b.grid())) throw InvalidArgument("lattice fields live on different grids");
}

// Site index of x + steps*e_axis for every site.
std::vector<std::size_t> neighbour_table(const LatticeField& f, int axis, long steps) {
    std::vector<std::size_t> table(f.site_count());
    for (std::size_t s = 0; s < f.site_count(); ++s) {
        auto c = f.site_coords(s);
        std::vector<long> moved(c.begin(), c.end());
        moved[axis] += steps;
        table[s] = f.site_index(moved);
    }
    return table;
}

void add_generator_times(LatticeField& out, std::size_t site, int generator, const Complex* values,
                         Complex factor) {
    const int n = out.grid().dim;
    const BladeMask g = BladeMask{1} << (generator - 1);
    for (BladeMask b = 0; b < out.blade_count(); ++b) {
        const Complex v = values[b];
        if (v == Complex{}) continue;
        out.component(site, g ^ b) += static_cast<double>(clifford::blade_product_sign(g, b, n)) * factor * v;
    }
}

long stencil_steps(const GridSpec& grid, double eps) {
    if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
    const double ratio = eps / grid.spacing;
    const long steps = std::lround(ratio);
    if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
        throw InvalidArgument("eps = " + std::to_string(eps) + " is not an integer multiple of h = " +
                              std::to_string(grid.spacing));
    }
    return steps;
}

LatticeField dirac_stencil(const LatticeField& f, double eps, double vector_sign) {
    const long steps = stencil_steps(f.grid(), eps);
    const int n = f.grid().dim;
    const std::size_t B = f.blade_count();
    LatticeField out(f.grid());
    for (int axis = 0; axis < n; ++axis) {
        const auto fwd = neighbour_table(f, axis, steps);
        const auto bwd = neighbour_table(f, axis, -steps);
        std::vector<Complex> diff(B);
        std::vector<Complex> second(B);
        for (std::size_t s = 0; s < f.site_count(); ++s) {
            for (BladeMask b = 0; b < B; ++b) {
                const Complex p = f.component(fwd[s], b);
                const Complex m = f.component(bwd[s], b);
                diff[b] = p - m;
                second[b] = 2.0 * f.component(s, b) - p - m;
            }
            add_generator_times(out, s, axis + 1, diff.data(), vector_sign / (2.0 * eps));
            add_generator_times(out, s, n + axis + 1, second.data(), 1.0 / (2.0 * eps));
        }
    }
    return out;
}

}  // namespace

LatticeField& LatticeField::operator+=(const LatticeField& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

LatticeField& LatticeField::operator-=(const LatticeField& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

LatticeField& LatticeField::operator*=(Complex factor) {
    for (auto& c : data_) c *= factor;
    return *this;
}

double LatticeField::norm() const {
    double sum = 0.0;
    for (auto c : data_) sum += std::norm(c);
    return std::sqrt(sum * std::pow(grid_.spacing, grid_.dim));
}

double LatticeField::max_abs() const {
    double m = 0.0;
    for (auto c : data_) m = std::max(m, std::abs(c));
    return m;
}

LatticeField constant_field(const GridSpec& grid, const Multivector& value) {
    LatticeField out(grid);
    for (std::size_t s = 0; s < out.site_count(); ++s) out.set(s, value);
    return out;
}

LatticeField delta_field(const GridSpec& grid, const Multivector& value) {
    LatticeField out(grid);
    out.set(0, value);
    return out;
}

LatticeField plane_wave(const GridSpec& grid, const std::vector<int>& modes, const Multivector& value) {
    LatticeField out(grid);
    if (static_cast<int>(modes.size()) != grid.dim) throw InvalidArgument("plane wave: mode rank mismatch");
    for (std::size_t s = 0; s < out.site_count(); ++s) {
        const auto c = out.site_coords(s);
        double phase = 0.0;
        for (int axis = 0; axis < grid.dim; ++axis) {
            phase += 2.0 * std::numbers::pi * modes[axis] * c[axis] / grid.points[axis];
        }
        out.set(s, value * std::polar(1.0, phase));
    }
    return out;
}

LatticeField shift(const LatticeField& f, int axis, long steps) {
    if (axis < 1 || axis > f.grid().dim) {
        throw InvalidArgument("shift axis " + std::to_string(axis) + " outside 1.." +
                              std::to_string(f.grid().dim));
    }
    const auto src = neighbour_table(f, axis - 1, steps);
    LatticeField out(f.grid());
    const std::size_t B = f.blade_count();
    for (std::size_t s = 0; s < f.site_count(); ++s) {
        std::copy_n(f.data().begin() + static_cast<long>(src[s] * B), B,
                    out.data().begin() + static_cast<long>(s * B));
    }
    return out;
}

LatticeField discrete_laplacian(const LatticeField& f) {
    const double inv_h2 = 1.0 / (f.grid().spacing * f.grid().spacing);
    const std::size_t B = f.blade_count();
    LatticeField out(f.grid());
    for (int axis = 0; axis < f.grid().dim; ++axis) {
        const auto fwd = neighbour_table(f, axis, 1);
        const auto bwd = neighbour_table(f, axis, -1);
        parallel_for(f.site_count(), [&](std::size_t s) {
            for (BladeMask b = 0; b < B; ++b) {
                out.component(s, b) +=
                    (f.component(fwd[s], b) + f.component(bwd[s], b) - 2.0 * f.component(s, b)) * inv_h2;
            }
        });
    }
    return out;
}

LatticeField dirac_kahler(const LatticeField& f, double eps) { return dirac_stencil(f, eps, 1.0); }
LatticeField dirac_kahler(const LatticeField& f) { return dirac_kahler(f, f.grid().spacing); }
LatticeField dirac_kahler_dagger(const LatticeField& f, double eps) { return dirac_stencil(f, eps, -1.0); }
LatticeField dirac_kahler_dagger(const LatticeField& f) { return dirac_kahler_dagger(f, f.grid().spacing); }

Multivector inner_product(const LatticeField& f, const LatticeField& g) {
    require_same_grid(f, g);
    Multivector sum(f.signature());
    for (std::size_t s = 0; s < f.site_count(); ++s) {
        clifford::geometric_product_accumulate(clifford::dagger(f.at(s)), g.at(s), sum);
    }
    sum *= std::pow(f.grid().spacing, f.grid().dim);
    return sum;
}

LatticeField left_multiply(const Multivector& a, const LatticeField& f) {
    LatticeField out(f.grid());
    parallel_for(f.site_count(), [&](std::size_t s) {
        Multivector value(f.signature());
        clifford::geometric_product_accumulate(a, f.at(s), value);
        out.set(s, value);
    });
    return out;
}

}  // namespace relwave::lattice
