#pragma once

// Configuration-driven front end: key=value run files, FieldCSV I/O and the
// evolve / kernel / spectrum / selftest subcommands.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relwave/lattice.hpp"
#include "relwave/propagators.hpp"

namespace relwave::cli {

namespace fs = std::filesystem;

struct InitialData {
    std::string kind = "delta";  // delta, plane_wave, gaussian, file
    std::vector<int> modes;      // plane_wave wave numbers per axis
    double width = 1.0;          // gaussian standard deviation in physical units
    fs::path file;               // FieldCSV for kind = file
    std::string blade;           // blade label carrying generated data, "" = scalar
    fs::path velocity_file;      // optional Phi_1 for klein_gordon and fractional_kg
};

struct SimulationConfig {
    lattice::GridSpec grid;
    std::string time_model = "continuous";  // continuous, central_difference
    double tau = 0.0;
    std::string equation = "klein_gordon";  // klein_gordon, dirac, heat, fractional_kg
    std::optional<double> frac_alpha;
    int nodes = 200;
    InitialData initial;
    std::vector<double> output_times{0.0};
    std::string output = "run";
    std::string kernel = "K0";  // K0, K1, K0_alpha, K1_alpha, heat
    std::vector<double> alphas{0.0, 0.25, 0.5};

    // Parses "key = value" lines ('#' starts a comment). Relative paths resolve
    // against base_dir. Overrides ("key=value") replace file entries. Every field
    // is validated before returning; errors name the key.
    static SimulationConfig parse(const std::string& text, const fs::path& base_dir = {},
                                  const std::vector<std::string>& overrides = {});
    static SimulationConfig load(const fs::path& path, const std::vector<std::string>& overrides = {});

    propagators::TimeModel time() const;
    // Canonical key=value listing, used in run metadata.
    std::map<std::string, std::string> entries() const;
};

// Header "x1,...,xn,blade,re,im", one row per site and nonzero blade, sites in
// lexicographic order of centered coordinates, values as %.17g.
void write_field_csv(const lattice::LatticeField& f, std::ostream& out);
void write_field_csv(const lattice::LatticeField& f, const fs::path& path);
lattice::LatticeField read_field_csv(std::istream& in, const lattice::GridSpec& grid);
lattice::LatticeField read_field_csv(const fs::path& path, const lattice::GridSpec& grid);

lattice::LatticeField initial_field(const SimulationConfig& config);

struct RunOptions {
    fs::path out_dir = ".";
    bool allow_unstable = false;
    double tolerance = 1e-9;  // pass threshold for residual diagnostics
};

// Each writes <output>_*.csv plus <output>.json into out_dir and returns the paths written.
std::vector<fs::path> cmd_evolve(const SimulationConfig& config, const RunOptions& opts);
std::vector<fs::path> cmd_kernel(const SimulationConfig& config, const RunOptions& opts);
std::vector<fs::path> cmd_spectrum(const SimulationConfig& config, const RunOptions& opts);

// Runs the library acceptance criteria; returns the process exit code.
int cmd_selftest(double tolerance_scale, std::ostream& out);

// Full command line; returns 0, 2 (invalid input) or 3 (numerical guard).
int run(int argc, char** argv);

}  // namespace relwave::cli
