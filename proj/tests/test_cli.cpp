#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "relwave/acceptance.hpp"
#include "relwave/cli.hpp"
#include "relwave/errors.hpp"
#include "relwave/parallel.hpp"

using namespace relwave;
using namespace relwave::cli;
using clifford::Complex;
using clifford::Multivector;
using clifford::Signature;
using lattice::GridSpec;
using lattice::LatticeField;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("relwave_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_json(const fs::path& path) { return json::parse(read_text(path)); }

int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "relwave");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run(static_cast<int>(argv.size()), argv.data());
}

std::string error_of(const std::string& text) {
    try {
        SimulationConfig::parse(text);
    } catch (const InvalidArgument& e) {
        return e.what();
    }
    return "";
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("field CSV layout") {
    const GridSpec grid = GridSpec::cubic(2, 2, 1.0);
    LatticeField f(grid);
    f.component(f.site_index({0, 0}), 0) = 1.5;
    f.component(f.site_index({1, 0}), 0b0101) = Complex(0.0, -2.0);
    std::ostringstream out;
    write_field_csv(f, out);
    CHECK(out.str() ==
          "x1,x2,blade,re,im\n"
          "0,0,,1.5,0\n"
          "1,0,1\xC2\xB7" "3,0,-2\n");
}

TEST_CASE("field CSV round trip is bit exact") {
    const GridSpec grid = GridSpec::cubic(2, 4, 0.3);
    LatticeField f = acceptance::random_field(grid, 1);
    f.component(0, 0) = Complex(-0.0, std::numeric_limits<double>::denorm_min());
    f.component(1, 3) = Complex(1.0 / 3.0, -1e300);
    f.component(2, 5) = 0.0;
    std::stringstream buffer;
    write_field_csv(f, buffer);
    const LatticeField g = read_field_csv(buffer, grid);
    for (std::size_t i = 0; i < f.data().size(); ++i) {
        REQUIRE(same_bits(f.data()[i].real(), g.data()[i].real()));
        REQUIRE(same_bits(f.data()[i].imag(), g.data()[i].imag()));
    }
    std::stringstream again;
    write_field_csv(g, again);
    std::stringstream first;
    write_field_csv(f, first);
    CHECK(again.str() == first.str());
}

TEST_CASE("field CSV errors") {
    const GridSpec grid = GridSpec::cubic(1, 4, 1.0);
    std::istringstream bad_header("x,blade,re,im\n");
    CHECK_THROWS_AS(read_field_csv(bad_header, grid), InvalidArgument);
    std::istringstream duplicate("x1,blade,re,im\n0,,1,0\n0,,2,0\n");
    CHECK_THROWS_AS(read_field_csv(duplicate, grid), InvalidArgument);
    std::istringstream bad_number("x1,blade,re,im\n0,,abc,0\n");
    CHECK_THROWS_AS(read_field_csv(bad_number, grid), InvalidArgument);
    std::istringstream short_row("x1,blade,re,im\n0,,1\n");
    CHECK_THROWS_AS(read_field_csv(short_row, grid), InvalidArgument);
    std::istringstream bad_blade("x1,blade,re,im\n0,3,1,0\n");
    CHECK_THROWS_AS(read_field_csv(bad_blade, grid), InvalidArgument);
    std::istringstream wrapped("x1,blade,re,im\n-1,2,1,0\n");
    const LatticeField f = read_field_csv(wrapped, grid);
    CHECK(f.component(3, 0b10) == Complex(1.0));
}

TEST_CASE("config parsing and defaults") {
    const auto c = SimulationConfig::parse(
        "# a run\n"
        "dim = 2\n"
        "points = 8   # per axis\n"
        "spacing = 0.5\n"
        "time_model = central_difference\n"
        "tau = 0.1\n"
        "output_times = 0, 0.05, 0.3\n");
    CHECK(c.grid.points == std::vector<int>{8, 8});
    CHECK(c.grid.spacing == 0.5);
    CHECK(c.equation == "klein_gordon");
    CHECK(c.output_times == std::vector<double>{0.0, 0.05, 0.3});
    CHECK(c.initial.kind == "delta");
    CHECK(c.time().is_central_difference());
    CHECK(c.entries().at("tau") == "0.1");

    const auto o = SimulationConfig::parse("points = 4\nmass = 1\n", {}, {"mass=2", "points = 6"});
    CHECK(o.grid.mass == 2.0);
    CHECK(o.grid.points == std::vector<int>{6});
}

TEST_CASE("config errors name the key") {
    CHECK(error_of("points = 8\ncolour = red\n").find("'colour'") != std::string::npos);
    CHECK(error_of("points = 8\npoints = 8\n").find("duplicate") != std::string::npos);
    CHECK(error_of("spacing = 1\n").find("'points'") != std::string::npos);
    CHECK(error_of("points = 7\n").find("'points'") != std::string::npos);
    CHECK(error_of("points = 8\nspacing = -1\n").find("'spacing'") != std::string::npos);
    CHECK(error_of("points = 8\nspacing = 1x\n").find("'spacing'") != std::string::npos);
    CHECK(error_of("points = 8\nalpha = 0.7\n").find("'alpha'") != std::string::npos);
    CHECK(error_of("points = 8\ntime_model = central_difference\n").find("'tau'") != std::string::npos);
    CHECK(error_of("points = 8\nequation = fractional_kg\nmass = 1\n").find("'frac_alpha'") != std::string::npos);
    CHECK(error_of("points = 8\ninitial_data = plane_wave\n").find("'modes'") != std::string::npos);
    CHECK(error_of("points = 8\ninitial_data = file\ninitial_file = nowhere.csv\n").find("'initial_file'") !=
          std::string::npos);
    CHECK(error_of("points = 8\ninitial_blade = 4\n").find("'initial_blade'") != std::string::npos);
    CHECK(error_of("points = 8\nkernel = K2\n").find("'kernel'") != std::string::npos);
    CHECK(error_of("points = 8\noutput = a/b\n").find("'output'") != std::string::npos);
    CHECK(error_of("points = 8\njust words\n").find("line 2") != std::string::npos);
}

TEST_CASE("initial data kinds") {
    const auto delta = SimulationConfig::parse("dim = 2\npoints = 4\ninitial_blade = 1\xC2\xB7" "2\n");
    const LatticeField d = initial_field(delta);
    CHECK(d.component(0, 0b11) == Complex(1.0));
    CHECK(d.max_abs() == 1.0);

    const auto wave = SimulationConfig::parse("points = 8\ninitial_data = plane_wave\nmodes = 1\n");
    const LatticeField w = initial_field(wave);
    CHECK(std::abs(w.component(w.site_index({2}), 0) - Complex(0.0, 1.0)) < 1e-15);

    const auto gauss = SimulationConfig::parse("points = 8\nspacing = 0.5\ninitial_data = gaussian\nwidth = 2\n");
    const LatticeField g = initial_field(gauss);
    CHECK(g.component(0, 0) == Complex(1.0));
    CHECK(g.component(g.site_index({-1}), 0).real() == doctest::Approx(std::exp(-0.25 / 8.0)));

    const fs::path dir = scratch("initial");
    std::ofstream(dir / "phi.csv") << "x1,blade,re,im\n1,2,0.5,0.25\n";
    write_text(dir / "run.cfg", "points = 4\ninitial_data = file\ninitial_file = phi.csv\n");
    const auto file = SimulationConfig::load(dir / "run.cfg");
    CHECK(initial_field(file).component(1, 0b10) == Complex(0.5, 0.25));
}

TEST_CASE("evolve at t = 0 writes the initial field back") {
    const fs::path dir = scratch("evolve0");
    const auto c = SimulationConfig::parse("dim = 2\npoints = 4\nspacing = 0.5\nmass = 1\noutput = zero\n");
    const auto files = cmd_evolve(c, {.out_dir = dir});
    REQUIRE(files.size() == 2);
    CHECK(files[0].filename() == "zero_t000.csv");
    const LatticeField psi = read_field_csv(files[0], c.grid);
    CHECK(psi.data() == initial_field(c).data());
}

TEST_CASE("evolve writes diagnostics for Dirac runs") {
    const fs::path dir = scratch("dirac");
    const auto c = SimulationConfig::parse(
        "points = 8\nspacing = 0.5\nalpha = 0.25\nmass = 0.7\nequation = dirac\n"
        "time_model = central_difference\ntau = 0.2\noutput_times = 0.1, 0.4\noutput = d\n");
    cmd_evolve(c, {.out_dir = dir});
    const json meta = read_json(dir / "d.json");
    CHECK(meta["cfl_margin"].get<double>() == doctest::Approx(10.0 - std::sqrt(16.49)));
    CHECK_FALSE(meta["unstable"].get<bool>());
    for (const auto& entry : meta["outputs"]) {
        CHECK(entry["kg_residual"].get<double>() <= 1e-9);
        CHECK(entry["dirac_residual"].get<double>() <= 1e-9);
    }
    CHECK(meta["diagnostics_pass"].get<bool>());
    CHECK(meta["config"]["equation"] == "dirac");

    const auto cont = SimulationConfig::parse("points = 8\nspacing = 0.5\nmass = 0.7\nequation = dirac\n"
                                              "output_times = 0.5\noutput = c\n");
    cmd_evolve(cont, {.out_dir = dir});
    const json cm = read_json(dir / "c.json");
    CHECK(cm["outputs"][0]["kg_residual_richardson"].get<double>() < 1e-7);
    CHECK(cm["outputs"][0]["dirac_residual_richardson"].get<double>() < 1e-7);
    CHECK_FALSE(cm.contains("cfl_margin"));
}

TEST_CASE("evolve rejects inadmissible output times before writing") {
    const fs::path dir = scratch("times");
    const auto c = SimulationConfig::parse("points = 8\ntime_model = central_difference\ntau = 0.2\n"
                                           "output_times = 0.1, 0.15\noutput = bad\n");
    CHECK_THROWS_AS(cmd_evolve(c, {.out_dir = dir}), InvalidArgument);
    CHECK_FALSE(fs::exists(dir / "bad_t000.csv"));
}

TEST_CASE("heat and fractional runs") {
    const fs::path dir = scratch("heat");
    const auto heat = SimulationConfig::parse("points = 16\nequation = heat\ninitial_data = gaussian\n"
                                              "output_times = 0.3, 1.1\noutput = h\n");
    cmd_evolve(heat, {.out_dir = dir});
    CHECK(read_json(dir / "h.json")["max_exact_diagnostic"].get<double>() < 1e-12);

    const auto frac = SimulationConfig::parse("points = 8\nspacing = 0.5\nmass = 1\nequation = fractional_kg\n"
                                              "frac_alpha = 0.25\noutput_times = 0.7\noutput = f\n");
    cmd_evolve(frac, {.out_dir = dir});
    CHECK(read_json(dir / "f.json")["outputs"][0]["gap_vs_klein_gordon"].get<double>() <= 1e-9);
}

TEST_CASE("kernel export") {
    const fs::path dir = scratch("kernel");
    const auto k1 = SimulationConfig::parse("points = 8\nspacing = 0.5\nmass = 1\nkernel = K1\noutput = one\n");
    cmd_kernel(k1, {.out_dir = dir});
    CHECK(read_field_csv(dir / "one_k000.csv", k1.grid).max_abs() == 0.0);

    const auto k0 = SimulationConfig::parse("points = 8\nspacing = 0.5\nmass = 1\nkernel = K0\noutput = zero\n");
    cmd_kernel(k0, {.out_dir = dir});
    const LatticeField K = read_field_csv(dir / "zero_k000.csv", k0.grid);
    CHECK(std::abs(K.component(0, 0) - 2.0) < 1e-14);  // delta / h
    CHECK(std::abs(K.max_abs() - 2.0) < 1e-14);

    const auto heat = SimulationConfig::parse("points = 16\nkernel = heat\noutput_times = 0.1, 0.5, 2\noutput = heat\n");
    cmd_kernel(heat, {.out_dir = dir});
    CHECK(read_json(dir / "heat.json")["max_discrepancy"].get<double>() <= 1e-10);
    const std::string csv = read_text(dir / "heat_k000.csv");
    CHECK(csv.rfind("x1,spectral,bessel,diff\n", 0) == 0);
}

TEST_CASE("spectrum sweep") {
    const fs::path dir = scratch("spectrum");
    const auto c = SimulationConfig::parse("dim = 1\npoints = 8\nspacing = 1\nalphas = 0, 0.25, 0.5\noutput = s\n");
    cmd_spectrum(c, {.out_dir = dir});
    std::istringstream csv(read_text(dir / "s_spectrum.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "zone,alpha,xi1,d2,z_norm,square_residual");
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        REQUIRE(cells.size() == 6);
        CHECK(std::stod(cells[5]) <= 1e-12);
        if (std::stod(cells[2]) == 0.0) {
            CHECK(std::stod(cells[3]) == 0.0);
            CHECK(std::stod(cells[4]) == 0.0);
        }
    }
    CHECK(rows == 3 * (8 + 16));
    const json meta = read_json(dir / "s.json");
    for (const auto& entry : meta["summary"]) {
        if (entry["zone"] == "Q_h") CHECK(entry["zeros_away_from_origin"].get<int>() == 0);
        // the refined zone reaches h xi = 2 pi, where every z_{h,alpha} vanishes
        if (entry["zone"] == "refined") CHECK(entry["min_z_norm_away_from_origin"].get<double>() <= 1e-12);
    }
}

TEST_CASE("selftest reports every criterion") {
    std::ostringstream out;
    CHECK(cmd_selftest(1.0, out) == 0);
    const std::string text = out.str();
    CHECK(text.find("12/12 criteria passed") != std::string::npos);
    CHECK(text.find("FAIL") == std::string::npos);
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("exit");
    write_text(dir / "ok.cfg", "points = 8\nspacing = 0.5\nmass = 1\ntime_model = central_difference\ntau = 0.2\n");
    write_text(dir / "fast.cfg", "points = 8\nspacing = 0.5\nmass = 1\ntime_model = central_difference\ntau = 1\n");
    write_text(dir / "bad.cfg", "points = 8\nspacing = zero\n");
    const std::string out = (dir / "out").string();
    CHECK(invoke({"evolve", "--config", (dir / "ok.cfg").string(), "--out", out}) == 0);
    CHECK(invoke({"evolve", "--config", (dir / "fast.cfg").string(), "--out", out}) == 3);
    CHECK(invoke({"evolve", "--config", (dir / "fast.cfg").string(), "--out", out, "--allow-unstable",
                  "--set", "output=unstable"}) == 0);
    CHECK(read_json(dir / "out" / "unstable.json")["unstable"].get<bool>());
    CHECK(invoke({"evolve", "--config", (dir / "bad.cfg").string(), "--out", out}) == 2);
    CHECK(invoke({"evolve", "--config", (dir / "missing.cfg").string()}) == 2);
    CHECK(invoke({"evolve"}) == 2);
    CHECK(invoke({"launch"}) == 2);
    CHECK(invoke({"evolve", "--config", (dir / "ok.cfg").string(), "--threads", "0"}) == 2);
    CHECK(invoke({"evolve", "--config", (dir / "ok.cfg").string(), "--out", out, "--set", "flavour=up"}) == 2);
    CHECK(invoke({"kernel", "--config", (dir / "ok.cfg").string(), "--out", out, "--set", "output_times=0.1"}) == 0);
    CHECK(invoke({"kernel", "--config", (dir / "ok.cfg").string(), "--out", out, "--set", "output_times=0.15"}) == 2);
}

TEST_CASE("outputs do not depend on the thread count") {
    const fs::path dir = scratch("threads");
    const auto c = SimulationConfig::parse("dim = 2\npoints = 8\nspacing = 0.5\nalpha = 0.1\nmass = 0.4\n"
                                           "equation = dirac\ninitial_data = gaussian\noutput_times = 0.3\n");
    std::vector<std::string> runs;
    for (int threads : {1, 3}) {
        set_thread_count(threads);
        const auto files = cmd_evolve(c, {.out_dir = dir / std::to_string(threads)});
        runs.push_back(read_text(files[0]) + read_text(files[1]));
    }
    set_thread_count(1);
    CHECK(runs[0] == runs[1]);
}
