// Acceptance run: library criteria 1-12 in process, criterion 13 against the
// built command-line tool and the fixtures in tests/golden.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "relwave/acceptance.hpp"

namespace fs = std::filesystem;
using relwave::acceptance::CriterionResult;

namespace {

const fs::path kTool = RELWAVE_TOOL;
const fs::path kGolden = RELWAVE_GOLDEN_DIR;
const fs::path kWork = RELWAVE_WORK_DIR;

int exit_code(const std::string& args, const fs::path& log) {
    const std::string cmd = "\"" + kTool.string() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::set<std::string> listing(const fs::path& dir) {
    std::set<std::string> names;
    if (fs::is_directory(dir)) {
        for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
    }
    return names;
}

CriterionResult cli_golden() {
    CriterionResult r{13, "CLI golden files", true, "", 0.0};
    const auto start = std::chrono::steady_clock::now();
    std::string problems;
    auto fail = [&](const std::string& what) {
        r.passed = false;
        if (!problems.empty()) problems += "; ";
        problems += what;
    };
    fs::remove_all(kWork);
    fs::create_directories(kWork);

    const int selftest = exit_code("selftest", kWork / "selftest.log");
    if (selftest != 0) fail("selftest exit " + std::to_string(selftest));

    int cases = 0, files = 0;
    for (const auto& entry : fs::directory_iterator(kGolden)) {
        const fs::path cfg = entry.path();
        if (cfg.extension() != ".cfg") continue;
        const std::string name = cfg.stem().string();
        const std::string command = name.substr(0, name.find('_'));
        if (command != "evolve" && command != "kernel" && command != "spectrum") continue;
        ++cases;
        const fs::path out = kWork / name;
        const int code = exit_code(command + " --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"",
                                   kWork / (name + ".log"));
        if (code != 0) {
            fail(name + " exit " + std::to_string(code));
            continue;
        }
        const auto expected = listing(kGolden / name);
        if (expected.empty()) fail(name + " has no fixtures");
        if (listing(out) != expected) fail(name + " wrote a different file set");
        for (const auto& file : expected) {
            ++files;
            if (slurp(out / file) != slurp(kGolden / name / file)) fail(name + "/" + file + " differs");
        }
    }
    if (cases == 0) fail("no golden configs found");

    const int cfl = exit_code("evolve --config \"" + (kGolden / "cfl_violation.cfg").string() + "\" --out \"" +
                                  (kWork / "cfl").string() + "\"",
                              kWork / "cfl.log");
    if (cfl != 3) fail("CFL violation exit " + std::to_string(cfl) + ", expected 3");

    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.detail = problems.empty() ? "selftest 0, " + std::to_string(cases) + " configs, " + std::to_string(files) +
                                      " files byte-identical, CFL exit 3"
                                : problems;
    return r;
}

}  // namespace

int main() {
    int passed = 0;
    for (int id = 1; id <= relwave::acceptance::kLibraryCriteria; ++id) {
        const auto r = relwave::acceptance::run_criterion(id);
        std::cout << relwave::acceptance::format_result(r) << std::endl;
        passed += r.passed;
    }
    const auto golden = cli_golden();
    std::cout << relwave::acceptance::format_result(golden) << std::endl;
    passed += golden.passed;
    std::cout << passed << "/13 acceptance criteria passed" << std::endl;
    return passed == 13 ? EXIT_SUCCESS : EXIT_FAILURE;
}
