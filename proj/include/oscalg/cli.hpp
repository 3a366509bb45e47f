// Command-line driver: verification suites, simulations and spectrum tables.
//
// `run` is deterministic: the same RunConfig produces byte-identical reports.
// Exit status is 0 when every check passes, 1 when any residual violates its
// threshold (the failing checks are named on stderr), 2 on usage errors.

#ifndef OSCALG_CLI_HPP
#define OSCALG_CLI_HPP

#include "oscalg/dynamics.hpp"
#include "oscalg/fock.hpp"
#include "oscalg/js_algebras.hpp"
#include "oscalg/lagrangian.hpp"
#include "oscalg/scalar.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscalg::cli {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { verify_algebra, solder_check, simulate, spectrum, full_report };
enum class Arithmetic { floating, exact };
enum class Format { json, csv, text };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::verify_algebra:
      return "verify-algebra";
    case Command::solder_check:
      return "solder-check";
    case Command::simulate:
      return "simulate";
    case Command::spectrum:
      return "spectrum";
    case Command::full_report:
      return "full-report";
  }
  return "?";
}

struct Thresholds {
  double algebra = 1e-12;
  double hermiticity = 1e-10;
  double solder = 1e-12;
  double canonical = 1e-12;
  double split = 1e-14;
  double conservation = 1e-10;
  double spectrum = 1e-12;
};

struct RunConfig {
  Command command = Command::full_report;
  std::string omega = "1";
  std::size_t cutoff = 10;
  std::size_t guard = 2;
  Arithmetic arithmetic = Arithmetic::floating;
  std::optional<std::filesystem::path> output;
  Format format = Format::json;
  std::string system = "chiral_plus";
  double periods = 100.0;
  std::size_t steps_per_period = 32;
  std::uint64_t seed = 20240601;
  Thresholds thresholds;
};

// ---------------------------------------------------------------------------
// Report

struct Check {
  std::string suite;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  /// "below": value < threshold; "above": value > threshold; "exact": value == 0
  /// from exact arithmetic; "flag": boolean outcome, value 0 on success.
  std::string kind;
  bool pass = false;
  std::string note;
};

class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  void below(std::string suite, std::string name, double value, double threshold) {
    add({std::move(suite), std::move(name), value, threshold, "below", value < threshold, {}});
  }
  void above(std::string suite, std::string name, double value, double threshold) {
    add({std::move(suite), std::move(name), value, threshold, "above", value > threshold, {}});
  }
  void exact(std::string suite, std::string name, bool equal, double difference) {
    add({std::move(suite), std::move(name), difference, 0.0, "exact", equal, {}});
  }
  void flag(std::string suite, std::string name, bool ok, std::string note) {
    add({std::move(suite), std::move(name), ok ? 0.0 : 1.0, 0.0, "flag", ok, std::move(note)});
  }
  void statement(std::string s) { statements_.push_back(std::move(s)); }

  json& section(const std::string& key) { return sections_[key]; }

  const std::vector<Check>& checks() const { return checks_; }
  bool passed() const {
    for (const auto& c : checks_)
      if (!c.pass) return false;
    return true;
  }

  json to_json(const json& conventions, const json& config) const;
  std::string to_text(const json& conventions) const;
  std::string to_csv() const;

 private:
  void add(Check c) { checks_.push_back(std::move(c)); }

  std::string command_;
  std::vector<Check> checks_;
  std::vector<std::string> statements_;
  json sections_ = json::object();
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace detail

inline json Report::to_json(const json& conventions, const json& config) const {
  json j;
  j["command"] = command_;
  j["status"] = passed() ? "pass" : "fail";
  j["config"] = config;
  j["conventions"] = conventions;
  j["statements"] = statements_;
  json checks = json::array();
  for (const auto& c : checks_) {
    json e;
    e["suite"] = c.suite;
    e["name"] = c.name;
    e["value"] = c.value;
    e["threshold"] = c.threshold;
    e["kind"] = c.kind;
    e["pass"] = c.pass;
    if (!c.note.empty()) e["note"] = c.note;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  j["results"] = sections_;
  return j;
}

inline std::string Report::to_text(const json& conventions) const {
  std::ostringstream os;
  os << "oscalg " << command_ << "\n\nconventions\n";
  for (const auto& [k, v] : conventions.items()) os << "  " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  os << "\nchecks\n";
  for (const auto& c : checks_) {
    os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.suite << " | " << c.name;
    if (c.kind == "below")
      os << "  residual=" << detail::sci(c.value) << " < " << detail::sci(c.threshold);
    else if (c.kind == "above")
      os << "  value=" << detail::sci(c.value) << " > " << detail::sci(c.threshold);
    else if (c.kind == "exact")
      os << "  exact" << (c.pass ? "" : " (max difference " + detail::sci(c.value) + ")");
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << "\n";
  }
  if (!statements_.empty()) {
    os << "\nstatements\n";
    for (const auto& s : statements_) os << "  " << s << "\n";
  }
  std::size_t failed = 0;
  for (const auto& c : checks_) failed += c.pass ? 0 : 1;
  os << "\nresult: " << (failed == 0 ? "PASS" : "FAIL") << " (" << checks_.size() - failed << "/" << checks_.size()
     << " checks passed)\n";
  return os.str();
}

inline std::string Report::to_csv() const {
  std::ostringstream os;
  os << "suite,name,kind,value,threshold,pass\n";
  for (const auto& c : checks_)
    os << detail::csv_field(c.suite) << "," << detail::csv_field(c.name) << "," << c.kind << ","
       << oscalg::detail::format_double(c.value) << "," << oscalg::detail::format_double(c.threshold) << ","
       << (c.pass ? "true" : "false") << "\n";
  return os.str();
}

inline json conventions() {
  json j;
  j["levi_civita"] = "eps_12 = +1";
  j["sigma"] = "first Pauli matrix [[0,1],[1,0]]";
  j["metric"] = "g = diag(1,-1)";
  j["lagrangian"] = "L = 1/2 qdot^T K qdot + qdot^T C q + 1/2 q^T V q, compared by (K, antisym C, V)";
  j["poisson"] = "{f,g} = grad f^T Omega grad g, zdot = Omega grad H";
  j["fock_basis"] = "mode 0 is the leftmost Kronecker factor; x = (a + a^dag)/sqrt(2 omega), p = i sqrt(omega/2)(a^dag - a)";
  j["guarded_subspace"] = "occupations <= cutoff - 1 - guard in every mode; residuals are Frobenius norms of P(A-B)P";
  j["eta"] = "U = (-1)^n2 composed with Fock-basis complex conjugation";
  j["zero_point"] = "number-operator forms omega n, omega a~a, omega b~b; offsets against quantized Legendre Hamiltonians reported";
  return j;
}

// ---------------------------------------------------------------------------
// Suites

inline const std::vector<std::pair<RealizationName, std::array<Hermiticity, 3>>>& expected_hermiticity() {
  using H = Hermiticity;
  static const std::vector<std::pair<RealizationName, std::array<Hermiticity, 3>>> table{
      {RealizationName::su2_js, {H::hermitian, H::hermitian, H::hermitian}},
      {RealizationName::su11_pseudochiral, {H::hermitian, H::anti_hermitian, H::anti_hermitian}},
      {RealizationName::su11_pseudochiral_hermitian_map, {H::hermitian, H::hermitian, H::hermitian}},
      {RealizationName::su11_standard, {H::hermitian, H::hermitian, H::hermitian}},
  };
  return table;
}

inline void algebra_suite(Report& rep, double omega, std::size_t cutoff, std::size_t guard, const Thresholds& th) {
  const FockSpace space(2, cutoff, omega);
  json& out = rep.section("algebra");
  out = json::array();
  for (const auto& [name, herm] : expected_hermiticity()) {
    const auto r = build_realization(name, space);
    const auto report = check_algebra(r, guard, th.algebra, th.hermiticity);
    const std::string suite(to_string(name));
    for (const auto& rel : report.relations) rep.below(suite, rel.name, rel.residual, th.algebra);
    rep.flag(suite, "bracket sign", report.bracket_sign == expected_bracket_sign(name),
             "observed " + std::to_string(report.bracket_sign));
    const char* axes[3] = {"Jx", "Jy", "Jz"};
    for (std::size_t k = 0; k < 3; ++k)
      rep.flag(suite, std::string(axes[k]) + " is " + std::string(oscalg::to_string(herm[k])),
               report.hermiticity[k] == herm[k], "observed " + std::string(oscalg::to_string(report.hermiticity[k])));
    if (name == RealizationName::su11_standard) {
      rep.above(suite, "Casimir differs from (N/2)(N/2+1)", report.casimir.residual, 1e-6);
      rep.flag(suite, "<0,0|C|0,0> differs from factorized candidate",
               std::abs(report.casimir.vacuum_value - report.casimir.candidate_vacuum_value) > 0.1,
               "C = " + oscalg::detail::format_double(report.casimir.vacuum_value) +
                   ", candidate = " + oscalg::detail::format_double(report.casimir.candidate_vacuum_value));
      const ProjectedSubspace sub(space, guard);
      rep.below(suite, "C = (n_a - n_b)^2/4 - 1/4",
                residual_on_subspace(r.casimir, standard_su11_casimir_number_form(space), sub),
                th.algebra);
      const auto v = static_cast<Eigen::Index>(space.index_of({0, 0}));
      const double quoted = standard_su11_casimir_quoted_form(space).matrix()(v, v).real();
      rep.statement("su11_standard on |0,0>: Casimir from generators = " +
                    oscalg::detail::format_double(report.casimir.vacuum_value) +
                    "; closed form (n_a-n_b)^2/4 - (n_a+n_b+1)/2 gives " + oscalg::detail::format_double(quoted) +
                    "; factorized candidate gives " +
                    oscalg::detail::format_double(report.casimir.candidate_vacuum_value));
    } else {
      rep.below(suite, "Casimir = (N/2)(N/2+1)", report.casimir.residual, th.algebra);
    }
    out.push_back(oscalg::to_json(report));
  }

  const auto ph = check_pseudo_hermiticity(space, guard);
  json p;
  p["cutoff"] = ph.cutoff;
  p["guard"] = ph.guard;
  p["relations"] = json::array();
  for (const auto& rel : ph.relations) {
    rep.below("pseudo-hermiticity", rel.name, rel.residual, th.algebra);
    p["relations"].push_back({{"name", rel.name}, {"residual", rel.residual}});
  }
  p["commutator_a_btilde_full_space"] = ph.a_btilde_exact;
  p["commutator_a_b_full_space"] = ph.a_b_exact;
  p["max_abs_atilde_minus_adag"] = ph.atilde_vs_adjoint;
  p["zero_point_shift"] = ph.zero_point_shift;
  rep.above("pseudo-hermiticity", "a~ differs from a^dag", ph.atilde_vs_adjoint, 0.0);
  rep.section("pseudo_hermiticity") = std::move(p);
}

namespace detail {

template <Scalar T>
T omega_scalar(const RunConfig& cfg) {
  if constexpr (ScalarTraits<T>::exact) {
    return ExactComplex(parse_rational(cfg.omega));
  } else {
    return Complex(static_cast<double>(parse_rational(cfg.omega)));
  }
}

template <Scalar T>
void compare_forms(Report& rep, const std::string& suite, const std::string& name, const ELNormalForm<T>& a,
                   const ELNormalForm<T>& b, double threshold) {
  const double diff = max_abs_diff(a, b);
  if constexpr (ScalarTraits<T>::exact) {
    rep.exact(suite, name, a.K == b.K && a.C_a == b.C_a && a.V == b.V, diff);
  } else {
    rep.below(suite, name, diff, threshold);
  }
}

template <Scalar T>
void canonical_check(Report& rep, const std::string& name, const LinearCanonicalMap<T>& map,
                     const SmallMatrix<T>& source_poisson, const SmallMatrix<T>& target_poisson, double threshold) {
  const double res = canonical_residual(map, source_poisson, target_poisson);
  if constexpr (ScalarTraits<T>::exact) {
    rep.exact("canonical maps", name, is_canonical(map, source_poisson, target_poisson), res);
  } else {
    rep.below("canonical maps", name, res, threshold);
  }
}

template <Scalar T>
void zero_check(Report& rep, const std::string& suite, const std::string& name, const SmallMatrix<T>& m,
                double threshold) {
  if constexpr (ScalarTraits<T>::exact) {
    rep.exact(suite, name, m.is_exactly_zero(), m.max_abs());
  } else {
    rep.below(suite, name, m.max_abs(), threshold);
  }
}

template <Scalar T>
json matrix_json(const SmallMatrix<T>& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const Complex z = ScalarTraits<T>::to_complex(m(r, c));
      row.push_back({z.real(), z.imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

template <Scalar T>
void solder_suite(Report& rep, const RunConfig& cfg) {
  const Thresholds& th = cfg.thresholds;
  const T w = detail::omega_scalar<T>(cfg);
  constexpr bool exact = ScalarTraits<T>::exact;
  json& out = rep.section("soldering");
  out = json::object();

  for (const SolderKind kind : {SolderKind::chiral_to_direct, SolderKind::pseudochiral_to_indirect}) {
    const std::string suite = "solder " + std::string(to_string(kind));
    const auto target_kind = solder_target(kind);
    const auto target = el_normal_form(builtin_lagrangian<T>(target_kind, w));
    const auto result = solder<T>(kind, w);
    const auto reduced = el_normal_form(result.reduced);
    const std::string target_name(to_string(target_kind));
    detail::compare_forms(rep, suite, "reduced = " + target_name, reduced, target, th.solder);
    if constexpr (exact) {
      rep.exact(suite, "centre coordinate decouples", result.decoupled_exactly, result.decoupling_residual);
      rep.exact(suite, "composite invariant under shift", result.gauge_invariant, result.gauge_residual);
      if (reduced == ELNormalForm<T>{reduced.chart, target.K, target.C_a, target.V})
        rep.statement("reduced ≡ " + target_name + " (exact)");
    } else {
      rep.below(suite, "centre coordinate decouples", result.decoupling_residual, th.solder);
      rep.below(suite, "composite invariant under shift", result.gauge_residual, th.solder);
      if (max_abs_diff(reduced, target) < th.solder)
        rep.statement("reduced ≡ " + target_name + " (residual " + detail::sci(max_abs_diff(reduced, target)) + ")");
    }
    const auto by_sub = solder_by_substitution<T>(kind, w);
    detail::compare_forms(rep, suite, "substitution route reduces to " + target_name, el_normal_form(by_sub.second),
                          target, th.solder);
    if (kind == SolderKind::chiral_to_direct)
      detail::compare_forms(rep, suite, "literal composite = generic composite",
                            el_normal_form(chiral_composite_literal<T>(w)), el_normal_form(result.composite), th.solder);

    // gauge currents at random configurations
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(kind));
    std::normal_distribution<double> gauss;
    auto draw = [&] { return std::array<Complex, 2>{Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng))}; };
    const double wd = ScalarTraits<T>::to_complex(w).real();
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const SolderingState s{draw(), draw(), draw(), draw()};
      const auto c = soldering_currents(kind, wd, s, draw());
      worst = std::max(worst, std::abs(c.delta_L - c.current_contraction));
    }
    rep.below(suite, "delta L = Lambda . (J+ + J-) on 100 random states", worst, th.solder);

    json k;
    k["composite"] = oscalg::to_json(result.composite);
    k["reduced"] = oscalg::to_json(result.reduced);
    k["target"] = target_name;
    k["decoupling_residual"] = result.decoupling_residual;
    k["gauge_residual"] = result.gauge_residual;
    k["currents_max_residual"] = worst;
    out[std::string(to_string(kind))] = std::move(k);
  }

  // symmetry suite
  json sym = json::array();
  const auto eps = levi_civita<T>();
  const auto sigma = pauli_x<T>();
  const std::vector<std::pair<LagrangianKind, bool>> cases{
      {LagrangianKind::bidimensional_direct, true}, {LagrangianKind::chiral_plus, true},
      {LagrangianKind::chiral_minus, true},         {LagrangianKind::indirect_hyperbolic, false},
      {LagrangianKind::pseudochiral_plus, false},   {LagrangianKind::pseudochiral_minus, false}};
  for (const auto& [lk, rotation] : cases) {
    const double v = symmetry_variation(builtin_lagrangian<T>(lk, w), rotation ? eps : sigma);
    const std::string name = std::string(to_string(lk)) + (rotation ? " invariant under eps rotation" : " invariant under sigma boost");
    if constexpr (exact)
      rep.exact("symmetries", name, v == 0.0, v);
    else
      rep.below("symmetries", name, v, th.solder);
    sym.push_back({{"lagrangian", to_string(lk)}, {"generator", rotation ? "eps" : "sigma"}, {"variation", v}});
  }
  rep.section("symmetries") = std::move(sym);

  // Hamiltonian reductions
  json ham;
  const auto hplus = legendre(builtin_lagrangian<T>(LagrangianKind::chiral_plus, w));
  const auto expected_H = T(2) * w * w * SmallMatrix<T>::identity(2);
  detail::zero_check(rep, "hamiltonians", "chiral_plus: H = omega^2 (x1^2 + x2^2)", hplus.H - expected_H, th.canonical);
  detail::zero_check(rep, "hamiltonians", "chiral_plus: {x1,x2} = -1/(2 omega)",
                     hplus.poisson - (T(-1) / (T(2) * w)) * levi_civita<T>(), th.canonical);
  ham["chiral_plus"] = {{"labels", hplus.labels},
                        {"H", detail::matrix_json(hplus.H)},
                        {"poisson", detail::matrix_json(hplus.poisson)}};

  const auto to_osc = chiral_to_canonical_map<T>(w);
  detail::canonical_check(rep, "chiral chart -> (x, p_x)", to_osc, hplus.poisson, canonical_poisson<T>(1), th.canonical);
  const auto osc = transform_hamiltonian(hplus, to_osc, canonical_poisson<T>(1));
  const auto osc_expected = legendre(builtin_lagrangian<T>(LagrangianKind::direct_1d, w));
  detail::zero_check(rep, "hamiltonians", "chiral_plus in (x, p_x) = 1/2 p^2 + 1/2 omega^2 x^2", osc.H - osc_expected.H,
                     th.canonical);

  const auto hI = legendre(builtin_lagrangian<T>(LagrangianKind::indirect_hyperbolic, w));
  const auto split = complex_split_map<T>(w);
  detail::canonical_check(rep, "(x+-, p+-) -> (x_i, p_i)", split, hI.poisson, canonical_poisson<T>(2), th.canonical);
  detail::canonical_check(rep, "(x_i, p_i) -> (x+-, p+-)", complex_split_forward<T>(w), canonical_poisson<T>(2),
                          canonical_poisson<T>(2), th.canonical);
  const auto hsplit = transform_hamiltonian(hI, split, canonical_poisson<T>(2));
  SmallMatrix<T> cross(2, 2);
  const std::size_t plus_idx[2] = {0, 2};
  const std::size_t minus_idx[2] = {1, 3};
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) cross(r, c) = hsplit.H(plus_idx[r], minus_idx[c]);
  if constexpr (exact)
    rep.exact("hamiltonians", "H_I = H+ + H- (no cross terms)", cross.is_exactly_zero(), cross.max_abs());
  else
    rep.below("hamiltonians", "H_I = H+ + H- (no cross terms)", cross.max_abs(), th.split);
  SmallMatrix<T> expected_split(4, 4);
  expected_split(0, 0) = w * w;
  expected_split(1, 1) = w * w;
  expected_split(2, 2) = T(1);
  expected_split(3, 3) = T(1);
  detail::zero_check(rep, "hamiltonians", "H+- = 1/2 p+-^2 + 1/2 omega^2 x+-^2", hsplit.H - expected_split,
                     th.canonical);
  ham["indirect_split"] = {{"labels", hsplit.labels}, {"H", detail::matrix_json(hsplit.H)}};
  rep.section("hamiltonians") = std::move(ham);
}

struct SimulationOutcome {
  Trajectory trajectory;
  ConservationSummary summary;
  Complex initial_area_rate{0.0};
};

inline std::vector<Complex> default_initial_state(std::size_t n) {
  const std::vector<Complex> base{1.0, 0.5, 0.25, -0.75};
  return {base.begin(), base.begin() + static_cast<std::ptrdiff_t>(n)};
}

inline SimulationOutcome simulate_system(LagrangianKind kind, double omega, double periods, std::size_t steps_per_period) {
  const auto h = legendre(builtin_lagrangian<Complex>(kind, Complex(omega)));
  const auto z0 = h.state(default_initial_state(h.labels.size()));
  const double period = 2.0 * std::numbers::pi / omega;
  const double dt = period / static_cast<double>(steps_per_period);
  auto traj = integrate(h, z0, periods * period, dt);
  auto summary = conservation_series(h, traj, kind, omega);
  const Complex rate = (h.labels.size() >= 2 && h.labels[0] == "x1" && h.labels[1] == "x2")
                           ? signed_area_rate(h, z0.values)
                           : Complex(0.0);
  return {std::move(traj), std::move(summary), rate};
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

inline double energy_scale(const Trajectory& t, const QuadraticHamiltonian<Complex>& h) {
  return std::max(1.0, std::abs(h.value(t.states.front())));
}

}  // namespace detail

inline void simulate_suite(Report& rep, const RunConfig& cfg, double omega, const std::vector<LagrangianKind>& systems,
                           const std::optional<std::filesystem::path>& dir, std::ostream* csv_out) {
  json& out = rep.section("simulation");
  if (out.is_null()) out = json::object();
  for (const LagrangianKind kind : systems) {
    const std::string name(to_string(kind));
    const auto sim = simulate_system(kind, omega, cfg.periods, cfg.steps_per_period);
    rep.below("simulate " + name, "energy drift over " + oscalg::detail::format_double(cfg.periods) + " periods",
              sim.summary.max_energy_drift, cfg.thresholds.conservation);
    if (is_first_order(kind))
      rep.below("simulate " + name, "Noether charge drift", sim.summary.max_charge_drift, cfg.thresholds.conservation);
    json s;
    s["system"] = name;
    s["omega"] = omega;
    s["periods"] = cfg.periods;
    s["steps_per_period"] = cfg.steps_per_period;
    s["labels"] = sim.trajectory.labels;
    s["initial_state"] = json::array();
    for (const auto& v : sim.trajectory.states.front()) s["initial_state"].push_back({v.real(), v.imag()});
    s["samples"] = sim.trajectory.times.size();
    s["max_energy_drift"] = sim.summary.max_energy_drift;
    if (is_first_order(kind)) s["max_charge_drift"] = sim.summary.max_charge_drift;
    if (sim.initial_area_rate != Complex(0.0)) {
      s["initial_signed_area_rate"] = {sim.initial_area_rate.real(), sim.initial_area_rate.imag()};
      if (kind == LagrangianKind::chiral_plus || kind == LagrangianKind::chiral_minus)
        s["handedness"] = sim.initial_area_rate.real() > 0 ? "counterclockwise" : "clockwise";
    }
    if (dir) {
      std::ostringstream csv;
      write_trajectory_csv(csv, sim.trajectory);
      detail::write_file(*dir / ("trajectory_" + name + ".csv"), csv.str());
      json series;
      series["system"] = name;
      series["omega"] = omega;
      series["series"] = sim.summary.series;
      detail::write_file(*dir / ("conservation_" + name + ".json"), series.dump(2) + "\n");
      s["files"] = {"trajectory_" + name + ".csv", "conservation_" + name + ".json"};
    } else if (csv_out) {
      write_trajectory_csv(*csv_out, sim.trajectory);
    }
    out[name] = std::move(s);
  }
}

/// chiral_plus and chiral_minus from identical data rotate in opposite senses.
inline void handedness_suite(Report& rep, double omega) {
  const auto plus = legendre(builtin_lagrangian<Complex>(LagrangianKind::chiral_plus, Complex(omega)));
  const auto minus = legendre(builtin_lagrangian<Complex>(LagrangianKind::chiral_minus, Complex(omega)));
  const auto z = default_initial_state(2);
  const Complex rp = signed_area_rate(plus, z);
  const Complex rm = signed_area_rate(minus, z);
  rep.flag("handedness", "chiral_plus and chiral_minus have opposite signed area rates",
           rp.real() * rm.real() < 0 && std::abs(rp + rm) < 1e-12 * std::abs(rp),
           "plus " + oscalg::detail::format_double(rp.real()) + ", minus " + oscalg::detail::format_double(rm.real()));
  rep.statement(std::string("chiral_plus rotates ") + (rp.real() > 0 ? "counterclockwise" : "clockwise") +
                " in the (x1, x2) plane");
}

inline void spectrum_suite(Report& rep, double omega, std::size_t cutoff, std::size_t guard, const Thresholds& th,
                           std::string* csv) {
  const FockSpace space(2, cutoff, omega);
  const auto sp = spectra(space, guard);
  json out;
  for (const auto* t : {&sp.H_D, &sp.H_I}) {
    rep.below("spectrum " + t->name, "eigenvalues = enumerated omega (n1 +- n2)", t->max_deviation, th.spectrum);
    rep.below("spectrum " + t->name, "eigenvalues are integer multiples of omega", t->integrality_defect * omega,
              th.spectrum);
    rep.below("spectrum " + t->name, "number form = quantized Legendre Hamiltonian - zero point", t->legendre_residual,
              th.spectrum);
    json tj;
    tj["eigenvalues"] = t->eigenvalues;
    tj["expected"] = t->expected;
    tj["max_deviation"] = t->max_deviation;
    tj["zero_point"] = t->zero_point;
    tj["legendre_residual"] = t->legendre_residual;
    out[t->name] = std::move(tj);
    if (csv)
      for (std::size_t k = 0; k < t->eigenvalues.size(); ++k)
        *csv += t->name + "," + std::to_string(k) + "," + oscalg::detail::format_double(t->eigenvalues[k]) + "," +
                oscalg::detail::format_double(t->expected[k]) + "\n";
  }
  for (const auto* l : {&sp.H_plus, &sp.H_minus}) {
    rep.below("spectrum " + l->name, "raising relation", l->raising_residual, th.algebra);
    rep.below("spectrum " + l->name, "lowering relation", l->lowering_residual, th.algebra);
    json lj;
    lj["raising_residual"] = l->raising_residual;
    lj["lowering_residual"] = l->lowering_residual;
    lj["truncated_max_imaginary_part"] = l->max_imaginary_part;
    json ev = json::array();
    for (const auto& v : l->truncated_eigenvalues) ev.push_back({v.real(), v.imag()});
    lj["truncated_eigenvalues"] = std::move(ev);
    out[l->name] = std::move(lj);
  }
  rep.statement("H+ and H- ladder relations hold on the guarded subspace; their truncated matrices have complex "
                "eigenvalues (max |Im| " + detail::sci(sp.H_plus.max_imaginary_part) +
                ") because the vacuum of a is not normalizable in the Fock basis");
  rep.section("spectrum") = std::move(out);
}

// ---------------------------------------------------------------------------
// Driver

inline void validate(const RunConfig& cfg) {
  Rational w;
  try {
    w = parse_rational(cfg.omega);
  } catch (const std::exception&) {
    throw UsageError("--omega must be a positive rational or decimal, got '" + cfg.omega + "'");
  }
  if (w <= 0) throw UsageError("--omega must be positive");
  if (cfg.cutoff < 2 || cfg.cutoff > 64) throw UsageError("--cutoff must lie in [2, 64]");
  if (cfg.guard >= cfg.cutoff) throw UsageError("--guard must be below --cutoff");
  const bool algebra = cfg.command == Command::verify_algebra || cfg.command == Command::full_report;
  if (algebra && cfg.cutoff < 4) throw UsageError("verify-algebra needs --cutoff >= 4");
  if (cfg.arithmetic == Arithmetic::exact && cfg.command != Command::solder_check)
    throw UsageError("--arithmetic exact is only supported by solder-check");
  if (cfg.command == Command::simulate) {
    if (!(cfg.periods > 0.0)) throw UsageError("--periods must be positive");
    if (cfg.steps_per_period == 0) throw UsageError("--steps-per-period must be positive");
    try {
      (void)parse_lagrangian_kind(cfg.system);
    } catch (const std::exception&) {
      throw UsageError("unknown --system '" + cfg.system + "'");
    }
  }
  if (cfg.format == Format::csv && cfg.command == Command::full_report)
    throw UsageError("full-report supports --format json or text");
}

inline json config_json(const RunConfig& cfg) {
  json j;
  j["omega"] = cfg.omega;
  j["cutoff"] = cfg.cutoff;
  j["guard"] = cfg.guard;
  j["arithmetic"] = cfg.arithmetic == Arithmetic::exact ? "exact" : "float";
  if (cfg.command == Command::simulate || cfg.command == Command::full_report) {
    if (cfg.command == Command::simulate) j["system"] = cfg.system;
    j["periods"] = cfg.periods;
    j["steps_per_period"] = cfg.steps_per_period;
  }
  j["seed"] = cfg.seed;
  const auto& t = cfg.thresholds;
  j["thresholds"] = {{"algebra", t.algebra},       {"hermiticity", t.hermiticity},   {"solder", t.solder},
                     {"canonical", t.canonical},   {"split", t.split},               {"conservation", t.conservation},
                     {"spectrum", t.spectrum}};
  return j;
}

inline std::optional<std::filesystem::path> output_dir(const RunConfig& cfg) {
  if (cfg.output) return cfg.output;
  if (const char* env = std::getenv("OSCALG_OUTPUT_DIR"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

/// Runs one command. Returns the exit status.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  const double omega = static_cast<double>(parse_rational(cfg.omega));
  const auto dir = output_dir(cfg);
  Report rep(to_string(cfg.command));
  std::string side_csv;
  bool side_csv_used = false;

  try {
    switch (cfg.command) {
      case Command::verify_algebra:
        algebra_suite(rep, omega, cfg.cutoff, cfg.guard, cfg.thresholds);
        break;
      case Command::solder_check:
        if (cfg.arithmetic == Arithmetic::exact)
          solder_suite<ExactComplex>(rep, cfg);
        else
          solder_suite<Complex>(rep, cfg);
        break;
      case Command::simulate: {
        std::ostringstream csv;
        const bool csv_stdout = cfg.format == Format::csv && !dir;
        simulate_suite(rep, cfg, omega, {parse_lagrangian_kind(cfg.system)}, dir, csv_stdout ? &csv : nullptr);
        if (csv_stdout) {
          side_csv = csv.str();
          side_csv_used = true;
        }
        break;
      }
      case Command::spectrum:
        side_csv = "operator,index,eigenvalue,expected\n";
        spectrum_suite(rep, omega, cfg.cutoff, cfg.guard, cfg.thresholds, &side_csv);
        side_csv_used = cfg.format == Format::csv;
        break;
      case Command::full_report:
        algebra_suite(rep, omega, cfg.cutoff, cfg.guard, cfg.thresholds);
        solder_suite<Complex>(rep, cfg);
        spectrum_suite(rep, omega, cfg.cutoff, cfg.guard, cfg.thresholds, nullptr);
        simulate_suite(rep, cfg, omega,
                       {LagrangianKind::chiral_plus, LagrangianKind::chiral_minus, LagrangianKind::pseudochiral_plus,
                        LagrangianKind::pseudochiral_minus},
                       dir, nullptr);
        handedness_suite(rep, omega);
        break;
    }
    if (cfg.command == Command::simulate && (parse_lagrangian_kind(cfg.system) == LagrangianKind::chiral_plus ||
                                             parse_lagrangian_kind(cfg.system) == LagrangianKind::chiral_minus))
      handedness_suite(rep, omega);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  std::string payload;
  std::string ext;
  switch (cfg.format) {
    case Format::json:
      payload = rep.to_json(conventions(), config_json(cfg)).dump(2) + "\n";
      ext = "json";
      break;
    case Format::text:
      payload = rep.to_text(conventions());
      ext = "txt";
      break;
    case Format::csv:
      payload = side_csv_used ? side_csv : rep.to_csv();
      ext = "csv";
      break;
  }
  out << payload;
  if (dir) {
    try {
      detail::write_file(*dir / (to_string(cfg.command) + "." + ext), payload);
      if (cfg.format != Format::json)
        detail::write_file(*dir / (to_string(cfg.command) + ".json"),
                           rep.to_json(conventions(), config_json(cfg)).dump(2) + "\n");
      if (cfg.command == Command::spectrum) detail::write_file(*dir / "spectrum_tables.csv", side_csv);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }

  if (rep.passed()) return 0;
  for (const auto& c : rep.checks())
    if (!c.pass)
      err << "threshold violation: " << c.suite << " | " << c.name << " (value " << oscalg::detail::format_double(c.value)
          << ", threshold " << oscalg::detail::format_double(c.threshold) << ")\n";
  return 1;
}

/// Parses argv into a RunConfig. Throws UsageError (with help text for --help
/// carried in the message) on malformed input.
inline RunConfig parse_args(int argc, const char* const* argv, std::ostream& out, bool& exit_now, int& exit_code) {
  RunConfig cfg;
  CLI::App app{"oscalg: oscillator Lagrangians, soldering, pseudo-hermiticity and two-boson algebras"};
  app.require_subcommand(1, 1);
  std::string arithmetic = "float";
  std::string format = "json";
  std::string output;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--omega", cfg.omega, "Frequency, rational or decimal (e.g. 1, 3/2, 0.75)")->capture_default_str();
    sub->add_option("--cutoff", cfg.cutoff, "Fock cutoff per mode")->capture_default_str();
    sub->add_option("--guard", cfg.guard, "Guard depth k of the projected subspace")->capture_default_str();
    sub->add_option("--arithmetic", arithmetic, "float or exact")
        ->check(CLI::IsMember({"float", "exact"}))
        ->capture_default_str();
    sub->add_option("--output", output, "Output directory (default $OSCALG_OUTPUT_DIR)");
    sub->add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}))->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Seed for randomized checks")->capture_default_str();
    auto& t = cfg.thresholds;
    sub->add_option("--tol-algebra", t.algebra, "Commutator and relation residuals")->capture_default_str();
    sub->add_option("--tol-hermiticity", t.hermiticity, "Hermiticity classification")->capture_default_str();
    sub->add_option("--tol-solder", t.solder, "Soldering and symmetry residuals (float)")->capture_default_str();
    sub->add_option("--tol-canonical", t.canonical, "Canonical map residuals (float)")->capture_default_str();
    sub->add_option("--tol-split", t.split, "Cross terms of the split Hamiltonian (float)")->capture_default_str();
    sub->add_option("--tol-conservation", t.conservation, "Energy and charge drift")->capture_default_str();
    sub->add_option("--tol-spectrum", t.spectrum, "Spectrum deviations")->capture_default_str();
  };
  struct Sub {
    const char* name;
    const char* help;
    Command cmd;
  };
  const Sub subs[] = {
      {"verify-algebra", "Check all four realizations, Casimirs and pseudo-hermiticity", Command::verify_algebra},
      {"solder-check", "Solder both oscillator pairs, symmetry suite, Hamiltonian reductions", Command::solder_check},
      {"simulate", "Integrate a system and write trajectory and conservation series", Command::simulate},
      {"spectrum", "Tabulate spectra on the guarded subspace", Command::spectrum},
      {"full-report", "Run every suite", Command::full_report},
  };
  std::vector<std::pair<CLI::App*, Command>> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    common(sub);
    if (s.cmd == Command::simulate || s.cmd == Command::full_report) {
      sub->add_option("--periods", cfg.periods, "Number of periods 2 pi/omega")->capture_default_str();
      sub->add_option("--steps-per-period", cfg.steps_per_period, "Samples per period")->capture_default_str();
    }
    if (s.cmd == Command::simulate) sub->add_option("--system", cfg.system, "Lagrangian kind")->capture_default_str();
    apps.emplace_back(sub, s.cmd);
  }

  exit_now = false;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    exit_now = true;
    exit_code = app.exit(e, out, out);
    return cfg;
  } catch (const CLI::CallForAllHelp& e) {
    exit_now = true;
    exit_code = app.exit(e, out, out);
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  for (const auto& [sub, cmd] : apps)
    if (sub->parsed()) cfg.command = cmd;
  cfg.arithmetic = arithmetic == "exact" ? Arithmetic::exact : Arithmetic::floating;
  cfg.format = format == "csv" ? Format::csv : format == "text" ? Format::text : Format::json;
  if (!output.empty()) cfg.output = std::filesystem::path(output);
  return cfg;
}

inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  bool exit_now = false;
  int code = 0;
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv, out, exit_now, code);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun with --help for usage\n";
    return 2;
  }
  if (exit_now) return code;
  return run(cfg, out, err);
}

}  // namespace oscalg::cli

#endif  // OSCALG_CLI_HPP
