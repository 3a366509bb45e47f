#include "oscalg/cli.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace oscalg::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_args(std::vector<const char*> args) {
  args.insert(args.begin(), "oscalg");
  std::ostringstream out, err;
  const int code = oscalg::cli::main(static_cast<int>(args.size()), args.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("oscalg_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("verify-algebra passes with default settings") {
  const auto r = run_args({"verify-algebra", "--cutoff", "10", "--guard", "2"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["status"] == "pass");
  CHECK(j["results"]["algebra"].size() == 4);
  for (const auto& c : j["checks"]) {
    INFO(c["name"]);
    CHECK(c["pass"] == true);
    if (c["kind"] == "below" && c["suite"] != "pseudo-hermiticity") {
      CHECK(c["value"].get<double>() < 1e-12);
    }
  }
  CHECK(j["conventions"].contains("eta"));
}

TEST_CASE("exact solder-check states the reduction") {
  const auto r = run_args({"solder-check", "--arithmetic", "exact", "--omega", "1"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const auto st = j["statements"].dump();
  CHECK(st.find("reduced ≡ bidimensional_direct (exact)") != std::string::npos);
  CHECK(st.find("reduced ≡ indirect_hyperbolic (exact)") != std::string::npos);
  bool saw_exact = false;
  for (const auto& c : j["checks"]) saw_exact = saw_exact || c["kind"] == "exact";
  CHECK(saw_exact);
  CHECK(run_args({"solder-check", "--arithmetic", "exact", "--omega", "3/7"}).code == 0);
}

TEST_CASE("simulate writes trajectory and conservation series") {
  const auto dir = scratch("sim");
  const auto r = run_args({"simulate", "--system", "chiral_plus", "--omega", "1", "--periods", "100", "--output",
                           dir.c_str(), "--format", "text"});
  CHECK(r.code == 0);
  CHECK(r.out.find("energy drift over 100 periods") != std::string::npos);
  CHECK(r.out.find("result: PASS") != std::string::npos);
  const auto csv = slurp(dir / "trajectory_chiral_plus.csv");
  CHECK(csv.rfind("t,re(x1),im(x1),re(x2),im(x2)\n", 0) == 0);
  const auto series = nlohmann::json::parse(slurp(dir / "conservation_chiral_plus.json"));
  CHECK(series["series"].size() == 100 * 32 + 1);
  const auto report = nlohmann::json::parse(slurp(dir / "simulate.json"));
  CHECK(report["results"]["simulation"]["chiral_plus"]["max_energy_drift"].get<double>() < 1e-10);
  CHECK(report["results"]["simulation"]["chiral_plus"]["handedness"] == "counterclockwise");
  std::filesystem::remove_all(dir);
}

TEST_CASE("simulate without an output directory can stream CSV") {
  unsetenv("OSCALG_OUTPUT_DIR");
  const auto r = run_args({"simulate", "--system", "direct_1d", "--periods", "1", "--steps-per-period", "4",
                           "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("t,re(x),im(x),re(p_x),im(p_x)\n", 0) == 0);
}

TEST_CASE("OSCALG_OUTPUT_DIR is the default output directory") {
  const auto dir = scratch("env");
  setenv("OSCALG_OUTPUT_DIR", dir.c_str(), 1);
  const auto r = run_args({"spectrum", "--cutoff", "8"});
  unsetenv("OSCALG_OUTPUT_DIR");
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(dir / "spectrum.json"));
  CHECK(std::filesystem::exists(dir / "spectrum_tables.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("spectrum CSV lists both tables") {
  const auto r = run_args({"spectrum", "--cutoff", "6", "--guard", "0", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("operator,index,eigenvalue,expected\n", 0) == 0);
  CHECK(r.out.find("H_D,35,") != std::string::npos);
  CHECK(r.out.find("H_I,0,-5,-5") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs") {
  const auto a = run_args({"full-report", "--periods", "5"});
  const auto b = run_args({"full-report", "--periods", "5"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto t1 = run_args({"verify-algebra", "--format", "text"});
  const auto t2 = run_args({"verify-algebra", "--format", "text"});
  CHECK(t1.out == t2.out);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run_args({}).code == 2);
  CHECK(run_args({"bogus"}).code == 2);
  CHECK(run_args({"verify-algebra", "--cutoff", "3"}).code == 2);
  CHECK(run_args({"verify-algebra", "--guard", "10"}).code == 2);
  CHECK(run_args({"spectrum", "--arithmetic", "exact"}).code == 2);
  CHECK(run_args({"solder-check", "--omega", "pi"}).code == 2);
  CHECK(run_args({"solder-check", "--omega", "-1"}).code == 2);
  CHECK(run_args({"simulate", "--system", "nonsense"}).code == 2);
  CHECK(run_args({"simulate", "--periods", "0"}).code == 2);
  CHECK(run_args({"verify-algebra", "--format", "xml"}).code == 2);
  CHECK(run_args({"full-report", "--format", "csv"}).code == 2);
}

TEST_CASE("threshold violations exit with status 1 and name the relation") {
  const auto r = run_args({"verify-algebra", "--tol-algebra", "1e-20"});
  CHECK(r.code == 1);
  CHECK(r.err.find("threshold violation: su2_js | [Jz,J+] = +J+") != std::string::npos);
  const auto s = run_args({"simulate", "--system", "chiral_minus", "--tol-conservation", "0"});
  CHECK(s.code == 1);
  CHECK(s.err.find("energy drift") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  const auto r = run_args({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("solder-check") != std::string::npos);
}

TEST_CASE("the installed binary reports the same exit codes") {
  const std::string bin = OSCALG_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("solder-check --arithmetic exact --omega 1") == 0);
  CHECK(status("verify-algebra --cutoff 2") == 2);
  CHECK(status("verify-algebra --tol-hermiticity 1e-30 --tol-algebra 1e-30") == 1);
}
