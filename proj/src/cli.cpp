#include "relwave/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "relwave/acceptance.hpp"
#include "relwave/errors.hpp"
#include "relwave/fractional.hpp"
#include "relwave/parallel.hpp"
#include "relwave/spectral.hpp"

namespace relwave::cli {

using clifford::BladeMask;
using clifford::Complex;
using clifford::Multivector;
using lattice::GridSpec;
using lattice::LatticeField;
using nlohmann::json;

namespace {

const std::set<std::string> kKeys = {
    "dim",          "points",        "spacing",       "alpha",         "mass",   "time_model", "tau",
    "equation",     "frac_alpha",    "nodes",         "initial_data",  "modes",  "width",      "initial_file",
    "initial_blade", "velocity_file", "output_times", "output",        "kernel", "alphas"};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw InvalidArgument("config key '" + key + "': " + what);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x)) bad(key, "expected a finite number, got '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || x < -1000000 || x > 1000000) {
        bad(key, "expected an integer, got '" + v + "'");
    }
    return static_cast<int>(x);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(item);
    if (!text.empty() && text.back() == sep) out.push_back("");
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(to_double(key, item));
    if (out.empty()) bad(key, "expected a comma-separated list of numbers");
    return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& text) {
    std::vector<int> out;
    for (const auto& item : split(text, ',')) out.push_back(to_int(key, item));
    if (out.empty()) bad(key, "expected a comma-separated list of integers");
    return out;
}

// Shortest text that reads back to the same double.
std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_floating_point_v<T>) {
            out += format_double(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p(value);
    return p.is_relative() && !base.empty() ? base / p : p;
}

// Site indices ordered lexicographically by centered coordinates.
std::vector<std::size_t> lexicographic_sites(const LatticeField& f) {
    std::vector<std::size_t> order(f.site_count());
    std::vector<std::vector<int>> coords(f.site_count());
    for (std::size_t s = 0; s < f.site_count(); ++s) {
        order[s] = s;
        coords[s] = f.centered_coords(s);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return coords[a] < coords[b]; });
    return order;
}

std::string coord_prefix(const std::vector<int>& c) {
    std::string out;
    for (int v : c) out += std::to_string(v) + ",";
    return out;
}

std::string coord_header(int n) {
    std::string out;
    for (int j = 1; j <= n; ++j) out += "x" + std::to_string(j) + ",";
    return out;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    return out;
}

void write_json(const json& j, const fs::path& path) {
    auto out = open_output(path);
    out << j.dump(2) << "\n";
}

// Named check of every output time before any solve starts.
void check_output_times(const SimulationConfig& c) {
    if (c.time_model != "central_difference") return;
    for (double t : c.output_times) {
        const double k = 2.0 * t / c.tau;
        if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, std::abs(k))) {
            bad("output_times", "time " + format_double(t) + " is not a multiple of tau/2");
        }
    }
}

void check_heat_times(const SimulationConfig& c) {
    for (double t : c.output_times) {
        if (t < 0.0) bad("output_times", "heat times must be nonnegative, got " + format_double(t));
    }
}

fs::path indexed_name(const SimulationConfig& c, const RunOptions& o, const std::string& tag, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", i);
    return o.out_dir / (c.output + "_" + tag + buf + ".csv");
}

}  // namespace

SimulationConfig SimulationConfig::parse(const std::string& text, const fs::path& base_dir,
                                         const std::vector<std::string>& overrides) {
    std::map<std::string, std::string> raw;
    auto take = [&](const std::string& line, const std::string& where, bool allow_repeat) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument(where + ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        if (!kKeys.count(key)) throw InvalidArgument(where + ": unknown config key '" + key + "'");
        if (!allow_repeat && raw.count(key)) throw InvalidArgument(where + ": duplicate config key '" + key + "'");
        raw[key] = trim(line.substr(eq + 1));
    };
    std::istringstream in(text);
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (!line.empty()) take(line, "line " + std::to_string(number), false);
    }
    for (const auto& o : overrides) take(o, "override", true);

    auto has = [&](const char* key) { return raw.count(key) > 0; };
    SimulationConfig c;
    c.grid.dim = has("dim") ? to_int("dim", raw["dim"]) : 1;
    if (c.grid.dim < 1 || c.grid.dim > clifford::Signature::kMaxDim) bad("dim", "must lie in 1..5");
    if (!has("points")) bad("points", "missing");
    c.grid.points = to_ints("points", raw["points"]);
    if (c.grid.points.size() == 1) c.grid.points.assign(static_cast<std::size_t>(c.grid.dim), c.grid.points[0]);
    if (static_cast<int>(c.grid.points.size()) != c.grid.dim) bad("points", "needs one value or one per axis");
    for (int N : c.grid.points) {
        if (N <= 0 || N % 2 != 0) bad("points", "every axis size must be a positive even integer");
    }
    c.grid.spacing = has("spacing") ? to_double("spacing", raw["spacing"]) : 1.0;
    if (!(c.grid.spacing > 0.0)) bad("spacing", "must be positive");
    c.grid.alpha = has("alpha") ? to_double("alpha", raw["alpha"]) : 0.0;
    if (!(c.grid.alpha >= 0.0 && c.grid.alpha <= 0.5)) bad("alpha", "must lie in [0, 1/2]");
    c.grid.mass = has("mass") ? to_double("mass", raw["mass"]) : 0.0;
    if (!(c.grid.mass >= 0.0)) bad("mass", "must be nonnegative");

    if (has("time_model")) c.time_model = raw["time_model"];
    if (c.time_model != "continuous" && c.time_model != "central_difference") {
        bad("time_model", "expected continuous or central_difference, got '" + c.time_model + "'");
    }
    if (has("tau")) c.tau = to_double("tau", raw["tau"]);
    if (c.time_model == "central_difference" && !(c.tau > 0.0)) bad("tau", "central_difference needs tau > 0");

    if (has("equation")) c.equation = raw["equation"];
    if (c.equation != "klein_gordon" && c.equation != "dirac" && c.equation != "heat" &&
        c.equation != "fractional_kg") {
        bad("equation", "expected klein_gordon, dirac, heat or fractional_kg, got '" + c.equation + "'");
    }
    if (has("frac_alpha")) {
        c.frac_alpha = to_double("frac_alpha", raw["frac_alpha"]);
        if (!(*c.frac_alpha > 0.0 && *c.frac_alpha < 0.5)) bad("frac_alpha", "must lie in (0, 1/2)");
    }
    if (c.equation == "fractional_kg") {
        if (!c.frac_alpha) bad("frac_alpha", "required for equation fractional_kg");
        if (!(c.grid.mass > 0.0)) bad("mass", "fractional_kg needs mass > 0");
    }
    if (has("nodes")) c.nodes = to_int("nodes", raw["nodes"]);
    if (c.nodes < 2) bad("nodes", "needs at least 2 quadrature nodes");

    if (has("initial_data")) c.initial.kind = raw["initial_data"];
    const auto& kind = c.initial.kind;
    if (kind != "delta" && kind != "plane_wave" && kind != "gaussian" && kind != "file") {
        bad("initial_data", "expected delta, plane_wave, gaussian or file, got '" + kind + "'");
    }
    if (has("modes")) c.initial.modes = to_ints("modes", raw["modes"]);
    if (kind == "plane_wave" && static_cast<int>(c.initial.modes.size()) != c.grid.dim) {
        bad("modes", "plane_wave needs one wave number per axis");
    }
    if (has("width")) c.initial.width = to_double("width", raw["width"]);
    if (!(c.initial.width > 0.0)) bad("width", "must be positive");
    if (has("initial_file")) c.initial.file = resolve(base_dir, raw["initial_file"]);
    if (kind == "file") {
        if (c.initial.file.empty()) bad("initial_file", "required for initial_data = file");
        if (!fs::exists(c.initial.file)) bad("initial_file", "no such file '" + c.initial.file.string() + "'");
    }
    if (has("initial_blade")) c.initial.blade = raw["initial_blade"];
    try {
        clifford::parse_blade_label(c.initial.blade, c.grid.dim);
    } catch (const InvalidArgument& e) {
        bad("initial_blade", e.what());
    }
    if (has("velocity_file")) {
        c.initial.velocity_file = resolve(base_dir, raw["velocity_file"]);
        if (!fs::exists(c.initial.velocity_file)) {
            bad("velocity_file", "no such file '" + c.initial.velocity_file.string() + "'");
        }
    }

    if (has("output_times")) c.output_times = to_doubles("output_times", raw["output_times"]);
    if (has("output")) c.output = raw["output"];
    if (c.output.empty() || c.output.find_first_of("/\\") != std::string::npos) {
        bad("output", "must be a plain file stem");
    }
    if (has("kernel")) c.kernel = raw["kernel"];
    if (c.kernel != "K0" && c.kernel != "K1" && c.kernel != "K0_alpha" && c.kernel != "K1_alpha" &&
        c.kernel != "heat") {
        bad("kernel", "expected K0, K1, K0_alpha, K1_alpha or heat, got '" + c.kernel + "'");
    }
    if ((c.kernel == "K0_alpha" || c.kernel == "K1_alpha") && has("kernel")) {
        if (!c.frac_alpha) bad("frac_alpha", "required for fractional kernels");
        if (!(c.grid.mass > 0.0)) bad("mass", "fractional kernels need mass > 0");
    }
    if (has("alphas")) c.alphas = to_doubles("alphas", raw["alphas"]);
    for (double a : c.alphas) {
        if (!(a >= 0.0 && a <= 0.5)) bad("alphas", "every alpha must lie in [0, 1/2]");
    }
    return c;
}

SimulationConfig SimulationConfig::load(const fs::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.parent_path(), overrides);
}

propagators::TimeModel SimulationConfig::time() const {
    return time_model == "central_difference" ? propagators::TimeModel::central_difference(tau)
                                              : propagators::TimeModel::continuous();
}

std::map<std::string, std::string> SimulationConfig::entries() const {
    std::map<std::string, std::string> e;
    e["dim"] = std::to_string(grid.dim);
    e["points"] = join(grid.points);
    e["spacing"] = format_double(grid.spacing);
    e["alpha"] = format_double(grid.alpha);
    e["mass"] = format_double(grid.mass);
    e["time_model"] = time_model;
    if (time_model == "central_difference") e["tau"] = format_double(tau);
    e["equation"] = equation;
    if (frac_alpha) e["frac_alpha"] = format_double(*frac_alpha);
    e["nodes"] = std::to_string(nodes);
    e["initial_data"] = initial.kind;
    if (initial.kind == "plane_wave") e["modes"] = join(initial.modes);
    if (initial.kind == "gaussian") e["width"] = format_double(initial.width);
    if (initial.kind == "file") e["initial_file"] = initial.file.filename().string();
    e["initial_blade"] = initial.blade;
    if (!initial.velocity_file.empty()) e["velocity_file"] = initial.velocity_file.filename().string();
    e["output_times"] = join(output_times);
    e["output"] = output;
    e["kernel"] = kernel;
    e["alphas"] = join(alphas);
    return e;
}

void write_field_csv(const LatticeField& f, std::ostream& out) {
    const int n = f.grid().dim;
    out << coord_header(n) << "blade,re,im\n";
    char buf[96];
    for (std::size_t s : lexicographic_sites(f)) {
        const std::string prefix = coord_prefix(f.centered_coords(s));
        for (BladeMask b = 0; b < f.blade_count(); ++b) {
            const Complex v = f.component(s, b);
            const bool zero = v.real() == 0.0 && v.imag() == 0.0 && !std::signbit(v.real()) && !std::signbit(v.imag());
            if (zero) continue;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", v.real(), v.imag());
            out << prefix << clifford::blade_label(b) << "," << buf << "\n";
        }
    }
}

void write_field_csv(const LatticeField& f, const fs::path& path) {
    auto out = open_output(path);
    write_field_csv(f, out);
}

LatticeField read_field_csv(std::istream& in, const GridSpec& grid) {
    grid.validate();
    const int n = grid.dim;
    std::string line;
    if (!std::getline(in, line) || trim(line) != coord_header(n) + "blade,re,im") {
        throw InvalidArgument("field CSV: header must be '" + coord_header(n) + "blade,re,im'");
    }
    LatticeField f(grid);
    std::vector<bool> seen(f.site_count() * f.blade_count(), false);
    for (int row = 2; std::getline(in, line); ++row) {
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        const std::string where = "field CSV row " + std::to_string(row);
        if (static_cast<int>(cells.size()) != n + 3) throw InvalidArgument(where + ": expected " + std::to_string(n + 3) + " cells");
        std::vector<long> coords(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            char* end = nullptr;
            coords[j] = std::strtol(cells[j].c_str(), &end, 10);
            if (cells[j].empty() || *end != '\0') throw InvalidArgument(where + ": bad coordinate '" + cells[j] + "'");
        }
        BladeMask blade = 0;
        try {
            blade = clifford::parse_blade_label(cells[n], n);
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(where + ": " + e.what());
        }
        double parts[2];
        for (int k = 0; k < 2; ++k) {
            const std::string& cell = cells[n + 1 + k];
            char* end = nullptr;
            parts[k] = std::strtod(cell.c_str(), &end);
            if (cell.empty() || *end != '\0') throw InvalidArgument(where + ": bad number '" + cell + "'");
        }
        const std::size_t site = f.site_index(coords);
        const std::size_t slot = site * f.blade_count() + blade;
        if (seen[slot]) throw InvalidArgument(where + ": duplicate site and blade");
        seen[slot] = true;
        f.component(site, blade) = Complex(parts[0], parts[1]);
    }
    return f;
}

LatticeField read_field_csv(const fs::path& path, const GridSpec& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read field file '" + path.string() + "'");
    return read_field_csv(in, grid);
}

LatticeField initial_field(const SimulationConfig& c) {
    const GridSpec& grid = c.grid;
    const auto sig = grid.signature();
    const Multivector unit = Multivector::blade(sig, clifford::parse_blade_label(c.initial.blade, grid.dim));
    if (c.initial.kind == "delta") return lattice::delta_field(grid, unit);
    if (c.initial.kind == "plane_wave") return lattice::plane_wave(grid, c.initial.modes, unit);
    if (c.initial.kind == "file") return read_field_csv(c.initial.file, grid);
    LatticeField f(grid);
    const double w = c.initial.width;
    for (std::size_t s = 0; s < f.site_count(); ++s) {
        double r2 = 0.0;
        for (int x : f.centered_coords(s)) r2 += (x * grid.spacing) * (x * grid.spacing);
        f.set(s, unit * Complex(std::exp(-0.5 * r2 / (w * w))));
    }
    return f;
}

namespace {

struct Solver {
    const SimulationConfig& config;
    propagators::CauchyData data;
    propagators::TimeModel time;
    propagators::SolveOptions opts;
    fractional::FracParams frac;

    LatticeField at(double t) const {
        const double m = config.grid.mass;
        if (config.equation == "klein_gordon") return propagators::solve_kg(data, time, m, t, opts);
        if (config.equation == "dirac") return propagators::solve_dirac(data.phi0, time, config.grid.alpha, m, t, opts);
        if (config.equation == "heat") return fractional::heat_semigroup(data.phi0, t);
        return fractional::solve_kg_fractional(data, time, frac, t, opts);
    }
};

double scalar_mass(const LatticeField& f) {
    Complex total = 0.0;
    for (std::size_t s = 0; s < f.site_count(); ++s) total += f.component(s, 0);
    return std::abs(total) * std::pow(f.grid().spacing, f.grid().dim);
}

// Richardson-extrapolated first time derivative of the Dirac solution against
// i (D - m gamma) Psi(t), for the continuous model.
double continuous_dirac_residual(const Solver& solver, double t, double delta = 1e-2) {
    const auto& g = solver.config.grid;
    const LatticeField now = solver.at(t);
    const LatticeField target = propagators::dirac_initial_velocity(now, g.alpha, g.mass);
    auto derivative = [&](double d) { return Complex(0.5 / d) * (solver.at(t + d) - solver.at(t - d)); };
    const LatticeField extrapolated = Complex(1.0 / 3.0) * (Complex(4.0) * derivative(0.5 * delta) - derivative(delta));
    const double ref = std::max(target.norm(), extrapolated.norm());
    const double diff = (extrapolated - target).norm();
    return ref == 0.0 ? diff : diff / ref;
}

}  // namespace

std::vector<fs::path> cmd_evolve(const SimulationConfig& config, const RunOptions& opts) {
    if (config.equation == "heat") {
        check_heat_times(config);
    } else {
        check_output_times(config);
    }
    fs::create_directories(opts.out_dir);
    const GridSpec& grid = config.grid;
    const LatticeField phi0 = initial_field(config);
    LatticeField phi1 = config.initial.velocity_file.empty() ? LatticeField(grid)
                                                             : read_field_csv(config.initial.velocity_file, grid);
    Solver solver{config, {phi0, phi1}, config.time(), {opts.allow_unstable}, {}};
    if (config.frac_alpha) {
        solver.frac.alpha = *config.frac_alpha;
        solver.frac.mass = grid.mass;
        solver.frac.nodes = config.nodes;
    }
    const bool central = config.time_model == "central_difference" && config.equation != "heat";
    const double m = grid.mass;

    json meta;
    meta["command"] = "evolve";
    meta["config"] = config.entries();
    if (central) {
        const double margin = propagators::cfl_margin(grid, solver.time, m);
        meta["cfl_margin"] = margin;
        meta["lambda_max"] = propagators::lambda_max(grid, m);
        meta["unstable"] = margin < 0.0;
        propagators::check_cfl(grid, solver.time, m, solver.opts);
    }

    std::vector<fs::path> written;
    json outputs = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < config.output_times.size(); ++i) {
        const double t = config.output_times[i];
        const LatticeField psi = solver.at(t);
        const fs::path file = indexed_name(config, opts, "t", i);
        write_field_csv(psi, file);
        written.push_back(file);

        json entry;
        entry["time"] = t;
        entry["file"] = file.filename().string();
        if (config.equation == "heat") {
            const double before = scalar_mass(phi0);
            const double drift = std::abs(scalar_mass(psi) - before) / std::max(before, 1e-300);
            entry["mass_drift"] = drift;
            worst = std::max(worst, drift);
        } else if (central) {
            const double tau = config.tau;
            const double kg = propagators::kg_residual(solver.at(t - tau), psi, solver.at(t + tau), m, tau);
            entry["kg_residual"] = kg;
            worst = std::max(worst, kg);
            if (config.equation == "dirac") {
                const double dr = propagators::dirac_residual(solver.at(t - 0.5 * tau), psi, solver.at(t + 0.5 * tau),
                                                              grid.alpha, m, tau);
                entry["dirac_residual"] = dr;
                worst = std::max(worst, dr);
            }
        } else {
            propagators::CauchyData data = solver.data;
            if (config.equation == "dirac") data.phi1 = propagators::dirac_initial_velocity(phi0, grid.alpha, m);
            const auto cr = propagators::continuous_kg_residual(data, m, t);
            entry["kg_residual_richardson"] = cr.residual;
            entry["kg_residual_order"] = cr.observed_order;
            if (config.equation == "dirac") entry["dirac_residual_richardson"] = continuous_dirac_residual(solver, t);
        }
        if (config.equation == "fractional_kg") {
            const LatticeField plain = propagators::solve_kg(solver.data, solver.time, m, t, solver.opts);
            const double gap = (psi - plain).norm() / std::max(plain.norm(), 1e-300);
            entry["gap_vs_klein_gordon"] = gap;
            worst = std::max(worst, gap);
        }
        outputs.push_back(entry);
    }
    meta["outputs"] = outputs;
    meta["tolerance"] = opts.tolerance;
    meta["max_exact_diagnostic"] = worst;
    meta["diagnostics_pass"] = worst <= opts.tolerance;
    const fs::path meta_file = opts.out_dir / (config.output + ".json");
    write_json(meta, meta_file);
    written.push_back(meta_file);
    return written;
}

std::vector<fs::path> cmd_kernel(const SimulationConfig& config, const RunOptions& opts) {
    if (config.kernel == "heat") {
        check_heat_times(config);
    } else {
        check_output_times(config);
    }
    fs::create_directories(opts.out_dir);
    const GridSpec& grid = config.grid;
    const auto time = config.time();
    const propagators::SolveOptions solve_opts{opts.allow_unstable};
    const double m = grid.mass;

    json meta;
    meta["command"] = "kernel";
    meta["config"] = config.entries();
    if (config.time_model == "central_difference" && config.kernel != "heat") {
        const double margin = propagators::cfl_margin(grid, time, m);
        meta["cfl_margin"] = margin;
        meta["unstable"] = margin < 0.0;
    }
    std::vector<fs::path> written;
    json outputs = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < config.output_times.size(); ++i) {
        const double t = config.output_times[i];
        const fs::path file = indexed_name(config, opts, "k", i);
        json entry;
        entry["time"] = t;
        entry["file"] = file.filename().string();
        if (config.kernel == "heat") {
            const LatticeField spec = fractional::heat_kernel_spectral(grid, t);
            const LatticeField bess = fractional::heat_kernel_bessel(grid, t);
            auto out = open_output(file);
            out << coord_header(grid.dim) << "spectral,bessel,diff\n";
            double discrepancy = 0.0, imag = 0.0;
            char buf[128];
            for (std::size_t s : lexicographic_sites(spec)) {
                const double a = spec.component(s, 0).real();
                const double b = bess.component(s, 0).real();
                discrepancy = std::max(discrepancy, std::abs(a - b));
                imag = std::max(imag, std::abs(spec.component(s, 0).imag()));
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", a, b, a - b);
                out << coord_prefix(spec.centered_coords(s)) << buf << "\n";
            }
            entry["max_discrepancy"] = discrepancy;
            entry["max_spectral_imag"] = imag;
            entry["bessel_mass"] = scalar_mass(bess);
            worst = std::max(worst, discrepancy);
        } else {
            std::pair<LatticeField, LatticeField> kernels{LatticeField(grid), LatticeField(grid)};
            if (config.kernel == "K0" || config.kernel == "K1") {
                kernels = propagators::wave_kernels(grid, time, m, t, solve_opts);
            } else {
                fractional::FracParams p;
                p.alpha = *config.frac_alpha;
                p.mass = m;
                p.nodes = config.nodes;
                kernels = fractional::fractional_wave_kernels(grid, time, p, t, solve_opts);
            }
            const LatticeField& K = config.kernel[1] == '0' ? kernels.first : kernels.second;
            write_field_csv(K, file);
            double imag = 0.0;
            for (std::size_t s = 0; s < K.site_count(); ++s) imag = std::max(imag, std::abs(K.component(s, 0).imag()));
            entry["max_imag"] = imag;
        }
        written.push_back(file);
        outputs.push_back(entry);
    }
    meta["outputs"] = outputs;
    if (config.kernel == "heat") meta["max_discrepancy"] = worst;
    const fs::path meta_file = opts.out_dir / (config.output + ".json");
    write_json(meta, meta_file);
    written.push_back(meta_file);
    return written;
}

std::vector<fs::path> cmd_spectrum(const SimulationConfig& config, const RunOptions& opts) {
    fs::create_directories(opts.out_dir);
    const GridSpec& grid = config.grid;
    const double h = grid.spacing;
    const auto sig = grid.signature();
    GridSpec refined = grid;
    for (int& N : refined.points) N *= 2;
    refined.spacing = 0.5 * h;

    const fs::path file = opts.out_dir / (config.output + "_spectrum.csv");
    auto out = open_output(file);
    out << "zone,alpha,";
    for (int j = 1; j <= grid.dim; ++j) out << "xi" << j << ",";
    out << "d2,z_norm,square_residual\n";

    json summary = json::array();
    char buf[128];
    for (const auto& [zone, zone_grid] : {std::pair<std::string, GridSpec>{"Q_h", grid}, {"refined", refined}}) {
        const LatticeField labels(zone_grid);
        const spectral::SpectralField momenta(zone_grid);
        const auto order = lexicographic_sites(labels);
        for (double alpha : config.alphas) {
            double min_norm = std::numeric_limits<double>::infinity();
            std::vector<double> argmin;
            double max_residual = 0.0;
            std::size_t zeros = 0;
            for (std::size_t p : order) {
                const auto xi = momenta.momentum(p);
                const double d2 = spectral::multiplier_d2(xi, h);
                const Multivector z = spectral::multiplier_z(xi, h, alpha, sig);
                const double z_norm = std::sqrt(clifford::norm_squared(z));
                const double residual = (z * z - Multivector::scalar(sig, d2)).coeff_norm();
                max_residual = std::max(max_residual, residual);
                out << zone << "," << format_double(alpha) << ",";
                for (double x : xi) out << format_double(x) << ",";
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", d2, z_norm, residual);
                out << buf << "\n";
                const bool origin = std::all_of(xi.begin(), xi.end(), [](double x) { return x == 0.0; });
                if (origin) continue;
                if (z_norm <= 1e-12) ++zeros;
                if (z_norm < min_norm) {
                    min_norm = z_norm;
                    argmin = xi;
                }
            }
            json entry;
            entry["zone"] = zone;
            entry["alpha"] = alpha;
            entry["min_z_norm_away_from_origin"] = min_norm;
            entry["argmin_xi"] = argmin;
            entry["zeros_away_from_origin"] = zeros;
            entry["max_square_residual"] = max_residual;
            summary.push_back(entry);
        }
    }
    json meta;
    meta["command"] = "spectrum";
    meta["config"] = config.entries();
    meta["summary"] = summary;
    const fs::path meta_file = opts.out_dir / (config.output + ".json");
    write_json(meta, meta_file);
    return {file, meta_file};
}

int cmd_selftest(double tolerance_scale, std::ostream& out) {
    int passed = 0;
    for (int id = 1; id <= acceptance::kLibraryCriteria; ++id) {
        const auto r = acceptance::run_criterion(id, tolerance_scale);
        out << acceptance::format_result(r) << std::endl;
        passed += r.passed ? 1 : 0;
    }
    out << passed << "/" << acceptance::kLibraryCriteria << " criteria passed" << std::endl;
    return passed == acceptance::kLibraryCriteria ? 0 : 1;
}

int run(int argc, char** argv) {
    CLI::App app{"Lattice Klein-Gordon and Dirac solvers", "relwave"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    std::string out_dir = ".";
    bool allow_unstable = false;
    int threads = 1;
    std::optional<double> tolerance;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key=value run file");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--allow-unstable", allow_unstable, "evaluate past the CFL bound (flagged in metadata)");
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
    app.add_option("--tolerance", tolerance,
                   "evolve: residual pass threshold (default 1e-9); selftest: factor on the pinned tolerances");
    app.add_option("--set", overrides, "override a config entry, key=value");
    auto* evolve = app.add_subcommand("evolve", "solve and write fields at the output times");
    auto* kernel = app.add_subcommand("kernel", "write propagator or heat kernels");
    auto* spectrum = app.add_subcommand("spectrum", "sweep |z_{h,alpha}| over the Brillouin zone");
    auto* selftest = app.add_subcommand("selftest", "run the acceptance criteria");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        set_thread_count(threads);
        if (selftest->parsed()) return cmd_selftest(tolerance.value_or(1.0), std::cout);
        if (config_path.empty()) throw InvalidArgument("--config is required for this subcommand");
        const SimulationConfig config = SimulationConfig::load(config_path, overrides);
        RunOptions opts;
        opts.out_dir = out_dir;
        opts.allow_unstable = allow_unstable;
        if (tolerance) opts.tolerance = *tolerance;
        std::vector<fs::path> files;
        if (evolve->parsed()) files = cmd_evolve(config, opts);
        if (kernel->parsed()) files = cmd_kernel(config, opts);
        if (spectrum->parsed()) files = cmd_spectrum(config, opts);
        for (const auto& f : files) std::cout << f.string() << "\n";
        return 0;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalGuard& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace relwave::cli
