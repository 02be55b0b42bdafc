#include "insurisk/commands.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "insurisk/csv.hpp"
#include "insurisk/filter.hpp"
#include "insurisk/risk.hpp"

namespace insurisk {

namespace {

std::string fixed(double v, int precision) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  return ec == std::errc() ? std::string(buf, p) : std::string("nan");
}

class Artifacts {
 public:
  explicit Artifacts(const RunConfig& cfg) : cfg_(cfg) {
    std::filesystem::create_directories(cfg.output.directory);
    std::ofstream echo = open("resolved.cfg");
    echo << write_config(cfg);
  }

  bool wants(const std::string& kind) const { return cfg_.output.csv.count(kind) > 0; }

  std::ofstream open(const std::string& name) const {
    const auto path = cfg_.output.directory / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::config_validation, "cannot write " + path.string());
    return f;
  }

 private:
  const RunConfig& cfg_;
};

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const Artifacts art(cfg);
  const MonteCarloSetup setup = cfg.monte_carlo();
  const PathBundle b = simulate_path(setup, closed_form_choice(cfg.model, cfg.penalty).rule, 0);
  if (art.wants("chain")) {
    auto f = art.open("chain.csv");
    write_chain_csv(f, b.chain);
  }
  if (art.wants("market")) {
    auto f = art.open("market.csv");
    write_market_csv(f, b.market);
    auto g = art.open("marks.csv");
    write_marks_csv(g, b.market);
  }
  if (art.wants("surplus")) {
    auto f = art.open("surplus.csv");
    write_surplus_csv(f, b.surplus);
  }
  out << "steps = " << setup.grid.steps << "\n";
  out << "asset_marks = " << b.market.asset_marks.size() << "\n";
  out << "claim_marks = " << b.market.claim_marks.size() << "\n";
  out << "x_T = " << format_number(b.surplus.x.back()) << "\n";
  out << "y_T = " << format_number(b.surplus.y.back()) << "\n";
  return exit_ok;
}

int cmd_filter(const RunConfig& cfg, std::ostream& out) {
  const Artifacts art(cfg);
  const MonteCarloSetup setup = cfg.monte_carlo();
  const PathBundle b = simulate_path(setup, closed_form_choice(cfg.model, cfg.penalty).rule, 0);
  const FilterPath exact = exact_discrete_filter(cfg.model, b.obs);
  if (art.wants("filter")) {
    auto f = art.open("filter.csv");
    write_filter_csv(f, b.filter);
    auto g = art.open("filter_exact.csv");
    write_filter_csv(g, exact);
  }
  out << "sup_gap = " << format_number(sup_gap(b.filter, exact)) << "\n";
  out << "rescaled = " << (b.filter.rescaled ? "true" : "false") << "\n";
  return exit_ok;
}

int cmd_optimal(const RunConfig& cfg, std::ostream& out) {
  const GameState st = initial_game_state(cfg);
  const ClosedFormControls cf = closed_form_controls(st, cfg.model, cfg.penalty);
  out << "pi_star = " << fixed(cf.pi_star, 5) << "\n";
  out << "theta0_star = " << fixed(cf.theta0_star, 6) << "\n";
  out << "theta1_star = " << fixed(cf.theta1_star, 6) << "\n";
  out << "theta2_slope = " << fixed(cf.theta2_slope, 6) << "\n";
  out << "theta2_admissible = " << (cf.theta2_admissible ? "true" : "false") << "\n";
  if (!cf.theta2_admissible) out << "warning: theta2 slope violates slope * z > -1 on the jump support\n";
  return exit_ok;
}

int cmd_saddle(const RunConfig& cfg, std::ostream& out) {
  const Artifacts art(cfg);
  const GameState st = initial_game_state(cfg);
  const SaddleReport rep = verify_saddle(st, cfg.bounds, cfg.penalty, cfg.grid_n);
  if (art.wants("saddle")) {
    auto f = art.open("saddle.csv");
    write_saddle_csv(f, rep);
    if (cfg.output.saddle_grid) {
      auto g = art.open("saddle_grid.csv");
      write_saddle_grid_csv(g, rep, cfg.bounds);
    }
  }
  out << "inf_sup = " << format_number(rep.inf_sup) << "\n";
  out << "sup_inf = " << format_number(rep.sup_inf) << "\n";
  out << "gap = " << format_number(rep.gap) << " (bound " << format_number(rep.resolution_bound) << ")\n";
  out << "pi_argmin = " << format_number(rep.inf_sup_point.pi) << " (closed form " << fixed(rep.closed_form.pi, 5)
      << ")\n";
  if (!rep.closed_form_inside) out << "warning: closed form lies outside the control box\n";
  out << "saddle = " << (rep.passed() ? "pass" : "FAIL") << "\n";
  return rep.passed() ? exit_ok : exit_acceptance;
}

int cmd_risk(const RunConfig& cfg, std::ostream& out) {
  const Artifacts art(cfg);
  const MonteCarloSetup setup = cfg.monte_carlo();
  const std::vector<ScenarioRule> family = cfg.scenario_family();
  const RiskReport rep = risk_measure(setup, closed_form_choice(cfg.model, cfg.penalty).rule, family);
  if (art.wants("risk")) {
    std::vector<std::optional<ScenarioControl>> controls;
    for (const ScenarioSpec& s : cfg.scenarios) {
      if (s.best_response) {
        controls.emplace_back();
      } else {
        ScenarioControl c = s.control;
        if (cfg.split_theta0) c.theta0_claim = cfg.theta0_claim;
        controls.emplace_back(c);
      }
    }
    auto f = art.open("risk.csv");
    write_risk_csv(f, rep, controls);
  }
  out << "rho = " << format_number(rep.rho()) << " +- " << format_number(rep.se()) << "\n";
  out << "argmax = " << rep.rows[rep.argmax].label << "\n";
  return exit_ok;
}

int cmd_value(const RunConfig& cfg, std::ostream& out) {
  const Artifacts art(cfg);
  const Estimate j = value_at_zero(cfg.monte_carlo());
  auto f = art.open("value.csv");
  f << "field,value\nJ," << format_number(j.value) << "\nse," << format_number(j.se) << "\n";
  out << "J = " << format_number(j.value) << " +- " << format_number(j.se) << "\n";
  return exit_ok;
}

int cmd_reproduce(const std::vector<std::string>& args, const Overrides& ov, std::ostream& out) {
  if (args.size() != 1 || (args[0] != "case1" && args[0] != "case2")) {
    out << "usage: reproduce case1|case2\n";
    return exit_usage;
  }
  RunConfig cfg = load_config(bundled_config_dir() / (args[0] + ".cfg"));
  apply_overrides(cfg, ov);
  const double reported = args[0] == "case1" ? 0.24074 : 0.28;
  const CaseComparison c = compare_case(cfg, reported);
  out << "quantity,value\n";
  out << "general_formula," << fixed(c.general, 6) << "\n";
  if (c.two_state) out << "two_state_formula," << fixed(*c.two_state, 6) << "\n";
  out << "reported," << fixed(c.reported, 5) << "\n";
  out << "abs_gap," << fixed(c.abs_gap, 6) << "\n";
  if (c.two_state) out << "formula_rel_diff," << format_number(c.formula_rel_diff) << "\n";
  bool ok = true;
  if (args[0] == "case1") {
    ok = c.abs_gap <= 1e-5;
    out << "match = " << (ok ? "yes" : "no") << "\n";
  } else {
    ok = c.formula_rel_diff <= 1e-12;
    out << "formulas_agree = " << (ok ? "yes" : "no") << "\n";
    out << "reported_matches = " << (c.abs_gap <= 5e-3 ? "yes" : "no") << "\n";
  }
  return ok ? exit_ok : exit_acceptance;
}

}  // namespace

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
  if (ov.out) cfg.output.directory = *ov.out;
  if (ov.seed) cfg.simulation.seed = *ov.seed;
  if (ov.paths) cfg.simulation.paths = *ov.paths;
  if (ov.dt) cfg.simulation.dt = *ov.dt;
  if (ov.threads) cfg.simulation.threads = *ov.threads;
  validate_config(cfg);
}

std::filesystem::path bundled_config_dir() {
  if (const char* env = std::getenv("INSURISK_CONFIG_DIR")) return env;
  return INSURISK_CONFIG_DIR;
}

GameState initial_game_state(const RunConfig& cfg) {
  return make_game_state(cfg.model, cfg.delay, 0.0, cfg.simulation.horizon, cfg.simulation.x0, 0.0,
                         cfg.simulation.x0, cfg.model.chain.initial);
}

CaseComparison compare_case(const RunConfig& cfg, double reported) {
  CaseComparison c;
  const FilteredCoefficients<double> coeffs = filtered_coefficients(cfg.model, cfg.model.chain.initial);
  c.general = optimal_pi(coeffs, cfg.model.beta, cfg.penalty);
  c.reported = reported;
  c.abs_gap = std::abs(c.general - reported);
  if (cfg.model.states() == 2) {
    const RegimeCompensators e1 = regime_compensators(cfg.model, 0);
    const RegimeCompensators e2 = regime_compensators(cfg.model, 1);
    TwoStateInputs in{cfg.model.alpha(0), cfg.model.alpha(1), cfg.model.r(0), cfg.model.r(1), cfg.model.beta,
                      e1.claim.m1,        e2.claim.m1,        e1.asset.m2,    e2.asset.m2,    cfg.penalty.delta,
                      cfg.model.chain.initial(0)};
    c.two_state = optimal_pi_two_state(in);
    c.formula_rel_diff = std::abs(c.general - *c.two_state) / std::max(std::abs(c.general), 1e-300);
  }
  return c;
}

int run_command(const std::string& command, const std::vector<std::string>& args,
                const std::optional<std::filesystem::path>& config_path, const Overrides& ov, std::ostream& out,
                std::ostream& err) {
  try {
    if (command == "selftest") return run_selftest(out) ? exit_ok : exit_acceptance;
    if (command == "reproduce") return cmd_reproduce(args, ov, out);

    const bool known = command == "simulate" || command == "filter" || command == "optimal" ||
                       command == "saddle-check" || command == "risk" || command == "value";
    if (!known) {
      err << "unknown command '" << command << "'\n";
      return exit_usage;
    }
    if (!config_path) {
      err << "command '" << command << "' needs --config\n";
      return exit_usage;
    }
    RunConfig cfg = load_config(*config_path);
    if (!ov.out) {
      if (const char* env = std::getenv("INSURISK_OUT")) cfg.output.directory = env;
    }
    apply_overrides(cfg, ov);

    if (command == "simulate") return cmd_simulate(cfg, out);
    if (command == "filter") return cmd_filter(cfg, out);
    if (command == "optimal") return cmd_optimal(cfg, out);
    if (command == "saddle-check") return cmd_saddle(cfg, out);
    if (command == "risk") return cmd_risk(cfg, out);
    return cmd_value(cfg, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.code() == Errc::config_parse || e.code() == Errc::config_validation ? exit_config : exit_numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical;
  }
}

}  // namespace insurisk
