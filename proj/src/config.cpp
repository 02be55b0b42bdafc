#include "insurisk/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <utility>

#include "insurisk/error.hpp"

namespace insurisk {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
  std::size_t col = 0;      ///< column of the first value character
  std::size_t key_col = 0;  ///< column of the key
  bool used = false;
};

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, std::size_t col, const std::string& msg) {
  throw Error(Errc::config_parse, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s, std::size_t* offset = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && is_space(s[e - 1])) --e;
  if (offset) *offset += b;
  return s.substr(b, e - b);
}

/// A whitespace-delimited token with its column.
struct Token {
  std::string_view text;
  std::size_t col;
};

std::vector<Token> split_tokens(std::string_view s, std::size_t col0) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > b) out.push_back({s.substr(b, i - b), col0 + b});
  }
  return out;
}

/// Splits on ';' keeping columns of each part.
std::vector<Token> split_rows(std::string_view s, std::size_t col0) {
  std::vector<Token> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ';') {
      out.push_back({s.substr(b, i - b), col0 + b});
      b = i + 1;
    }
  }
  return out;
}

class Sections {
 public:
  Sections(const std::string& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string_view line(raw);
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      std::size_t off = 0;
      const std::string_view body = trim(line, &off);
      if (body.empty()) continue;
      if (body.front() == '[') {
        if (body.back() != ']') parse_fail(source_, line_no, off + body.size() + 1, "expected ']'");
        section = std::string(trim(body.substr(1, body.size() - 2)));
        if (section.empty()) parse_fail(source_, line_no, off + 2, "empty section name");
        if (!known_section(section)) parse_fail(source_, line_no, off + 2, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) parse_fail(source_, line_no, off + 1, "expected 'key = value'");
      if (section.empty()) parse_fail(source_, line_no, off + 1, "key outside of any section");
      const std::string key(trim(body.substr(0, eq)));
      if (key.empty()) parse_fail(source_, line_no, off + 1, "empty key");
      std::size_t voff = off + eq + 1;
      const std::string_view value = trim(body.substr(eq + 1), &voff);
      auto& sec = data_[section];
      if (sec.count(key)) parse_fail(source_, line_no, off + 1, "duplicate key '" + key + "' in [" + section + "]");
      sec[key] = Entry{std::string(value), line_no, voff + 1, off + 1, false};
    }
  }

  const std::string& source() const { return source_; }

  Entry* find(const std::string& section, const std::string& key) {
    auto s = data_.find(section);
    if (s == data_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  void reject_unused() const {
    for (const auto& [section, keys] : data_)
      for (const auto& [key, e] : keys)
        if (!e.used) parse_fail(source_, e.line, e.key_col, "unknown key '" + key + "' in [" + section + "]");
  }

 private:
  static bool known_section(const std::string& s) {
    return s == "model" || s == "delay" || s == "penalty" || s == "simulation" || s == "bounds" ||
           s == "scenarios" || s == "output";
  }

  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> data_;
};

class Reader {
 public:
  explicit Reader(Sections& s) : s_(s) {}

  double number(const Entry& e, const Token& tok) const {
    double v = 0.0;
    const char* b = tok.text.data();
    const char* end = b + tok.text.size();
    if (!tok.text.empty() && *b == '+') ++b;
    const auto [p, ec] = std::from_chars(b, end, v);
    if (ec != std::errc() || p != end) parse_fail(s_.source(), e.line, tok.col, "expected a number, got '" + std::string(tok.text) + "'");
    return v;
  }

  std::vector<double> numbers(const Entry& e, std::string_view text, std::size_t col) const {
    std::vector<double> out;
    for (const Token& t : split_tokens(text, col)) out.push_back(number(e, t));
    return out;
  }

  bool real(const std::string& sec, const std::string& key, double& out) {
    Entry* e = s_.find(sec, key);
    if (!e) return false;
    const auto toks = split_tokens(e->value, e->col);
    if (toks.size() != 1) parse_fail(s_.source(), e->line, e->col, "expected one number for '" + key + "'");
    out = number(*e, toks[0]);
    return true;
  }

  template <typename Int>
  bool integer(const std::string& sec, const std::string& key, Int& out) {
    Entry* e = s_.find(sec, key);
    if (!e) return false;
    const std::string& v = e->value;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      parse_fail(s_.source(), e->line, e->col, "expected a non-negative integer for '" + key + "'");
    return true;
  }

  bool boolean(const std::string& sec, const std::string& key, bool& out) {
    Entry* e = s_.find(sec, key);
    if (!e) return false;
    if (e->value == "true") out = true;
    else if (e->value == "false") out = false;
    else parse_fail(s_.source(), e->line, e->col, "expected true or false for '" + key + "'");
    return true;
  }

  bool text(const std::string& sec, const std::string& key, std::string& out) {
    Entry* e = s_.find(sec, key);
    if (!e) return false;
    out = e->value;
    return true;
  }

  bool vector(const std::string& sec, const std::string& key, Eigen::VectorXd& out, Eigen::Index n) {
    Entry* e = s_.find(sec, key);
    if (!e) return false;
    const auto v = numbers(*e, e->value, e->col);
    if (static_cast<Eigen::Index>(v.size()) != n)
      parse_fail(s_.source(), e->line, e->col, "'" + key + "' needs " + std::to_string(n) + " values");
    out = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    return true;
  }

  bool matrix(const std::string& sec, const std::string& key, Eigen::MatrixXd& out, Eigen::Index n) {
    Entry* e = s_.find(sec, key);
    if (!e) return false;
    const auto rows = split_rows(e->value, e->col);
    if (static_cast<Eigen::Index>(rows.size()) != n)
      parse_fail(s_.source(), e->line, e->col, "'" + key + "' needs " + std::to_string(n) + " rows separated by ';'");
    out.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto v = numbers(*e, rows[static_cast<std::size_t>(i)].text, rows[static_cast<std::size_t>(i)].col);
      if (static_cast<Eigen::Index>(v.size()) != n)
        parse_fail(s_.source(), e->line, rows[static_cast<std::size_t>(i)].col,
                   "row " + std::to_string(i + 1) + " of '" + key + "' needs " + std::to_string(n) + " values");
      for (Eigen::Index j = 0; j < n; ++j) out(i, j) = v[static_cast<std::size_t>(j)];
    }
    return true;
  }

  bool interval(const std::string& sec, const std::string& key, Interval& out) {
    Entry* e = s_.find(sec, key);
    if (!e) return false;
    const auto v = numbers(*e, e->value, e->col);
    if (v.size() != 2) parse_fail(s_.source(), e->line, e->col, "'" + key + "' needs 'lo hi'");
    out = {v[0], v[1]};
    return true;
  }

  bool laws(const std::string& sec, const std::string& key, std::vector<JumpSizeLaw>& out, Eigen::Index n) {
    Entry* e = s_.find(sec, key);
    if (!e) return false;
    const auto rows = split_rows(e->value, e->col);
    if (static_cast<Eigen::Index>(rows.size()) != n)
      parse_fail(s_.source(), e->line, e->col, "'" + key + "' needs " + std::to_string(n) + " laws separated by ';'");
    out.clear();
    for (const Token& row : rows) {
      const auto toks = split_tokens(row.text, row.col);
      if (toks.empty()) parse_fail(s_.source(), e->line, row.col, "empty law");
      std::vector<double> p;
      for (std::size_t i = 1; i < toks.size(); ++i) p.push_back(number(*e, toks[i]));
      const std::string_view kind = toks[0].text;
      try {
        if (kind == "point" && p.size() == 1) out.push_back(JumpSizeLaw::point_mass(p[0]));
        else if (kind == "exponential" && p.size() == 1) out.push_back(JumpSizeLaw::exponential(p[0]));
        else if (kind == "lognormal" && (p.size() == 2 || p.size() == 3))
          out.push_back(JumpSizeLaw::lognormal(p[0], p[1], p.size() == 3 ? p[2] : 0.0));
        else
          parse_fail(s_.source(), e->line, toks[0].col,
                     "expected 'point v', 'exponential mean' or 'lognormal mu sigma [shift]'");
      } catch (const Error& err) {
        if (err.code() == Errc::config_parse) throw;
        parse_fail(s_.source(), e->line, toks[0].col, err.what());
      }
    }
    return true;
  }

  bool scenarios(const std::string& sec, const std::string& key, std::vector<ScenarioSpec>& out) {
    Entry* e = s_.find(sec, key);
    if (!e) return false;
    out.clear();
    for (const Token& row : split_rows(e->value, e->col)) {
      const auto toks = split_tokens(row.text, row.col);
      ScenarioSpec spec;
      if (toks.size() == 1 && toks[0].text == "best_response") {
        spec.best_response = true;
      } else if (toks.size() == 3) {
        spec.control.theta0 = number(*e, toks[0]);
        spec.control.theta1 = number(*e, toks[1]);
        spec.control.theta2_slope = number(*e, toks[2]);
      } else {
        parse_fail(s_.source(), e->line, row.col, "scenario must be 'theta0 theta1 slope' or 'best_response'");
      }
      out.push_back(spec);
    }
    return true;
  }

  void require(bool present, const std::string& sec, const std::string& key) const {
    if (!present) throw Error(Errc::config_validation, "[" + sec + "] " + key + " is required");
  }

 private:
  Sections& s_;
};

std::string format_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? " " : "") + format_number(v(i));
  return out;
}

std::string format_law(const JumpSizeLaw& law) {
  switch (law.kind()) {
    case JumpSizeLaw::Kind::point_mass: return "point " + format_number(law.param(0));
    case JumpSizeLaw::Kind::exponential: return "exponential " + format_number(law.param(0));
    case JumpSizeLaw::Kind::lognormal:
      return "lognormal " + format_number(law.param(0)) + " " + format_number(law.param(1)) + " " +
             format_number(law.param(2));
  }
  return {};
}

std::string format_laws(const std::vector<JumpSizeLaw>& laws) {
  std::string out;
  for (std::size_t i = 0; i < laws.size(); ++i) out += (i ? " ; " : "") + format_law(laws[i]);
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, p) : std::string("nan");
}

TimeGrid RunConfig::grid() const { return make_grid(simulation.horizon, simulation.dt); }

MonteCarloSetup RunConfig::monte_carlo() const {
  MonteCarloSetup s;
  s.model = model;
  s.delay = delay;
  s.penalty = penalty;
  s.grid = grid();
  s.x0 = simulation.x0;
  s.start = {simulation.stock0, simulation.reserve0};
  s.seed = simulation.seed;
  s.paths = simulation.paths;
  s.threads = simulation.threads;
  return s;
}

std::vector<ScenarioRule> RunConfig::scenario_family() const {
  std::vector<ScenarioRule> out;
  for (const ScenarioSpec& spec : scenarios) {
    if (spec.best_response) {
      ScenarioRule rule = best_response_scenario(delay, penalty, model.beta);
      if (split_theta0) {
        const double claim = theta0_claim;
        rule.control = [inner = rule.control, claim](const DecisionContext& ctx) {
          ScenarioControl c = inner(ctx);
          c.theta0_claim = claim;
          return c;
        };
      }
      out.push_back(std::move(rule));
    } else {
      ScenarioControl c = spec.control;
      if (split_theta0) c.theta0_claim = theta0_claim;
      out.push_back(constant_scenario(c));
    }
  }
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  Sections sections(text, source);
  Reader rd(sections);
  RunConfig cfg;

  Eigen::Index d = 0;
  rd.require(rd.integer("model", "states", d), "model", "states");
  if (d < 1) throw Error(Errc::config_validation, "[model] states must be at least 1");
  rd.require(rd.matrix("model", "generator", cfg.model.chain.generator, d), "model", "generator");
  rd.require(rd.vector("model", "initial", cfg.model.chain.initial, d), "model", "initial");
  rd.require(rd.vector("model", "r", cfg.model.r, d), "model", "r");
  rd.require(rd.vector("model", "alpha", cfg.model.alpha, d), "model", "alpha");
  rd.require(rd.real("model", "beta", cfg.model.beta), "model", "beta");
  rd.real("model", "premium", cfg.model.premium);
  rd.boolean("model", "compensate_asset_jumps", cfg.model.compensate_asset_jumps);
  cfg.model.asset.intensity = Eigen::VectorXd::Zero(d);
  cfg.model.claim.intensity = Eigen::VectorXd::Zero(d);
  cfg.model.asset.laws.assign(static_cast<std::size_t>(d), JumpSizeLaw::point_mass(1.0));
  cfg.model.claim.laws.assign(static_cast<std::size_t>(d), JumpSizeLaw::point_mass(1.0));
  rd.vector("model", "asset_intensity", cfg.model.asset.intensity, d);
  rd.laws("model", "asset_law", cfg.model.asset.laws, d);
  rd.vector("model", "claim_intensity", cfg.model.claim.intensity, d);
  rd.laws("model", "claim_law", cfg.model.claim.laws, d);

  rd.real("delay", "rho", cfg.delay.rho);
  rd.real("delay", "zeta", cfg.delay.zeta);
  rd.real("delay", "kappa", cfg.delay.kappa);
  rd.real("delay", "theta_flow", cfg.delay.theta_flow);
  rd.real("delay", "xi", cfg.delay.xi);
  rd.boolean("delay", "negate_lagged_term", cfg.delay.negate_lagged_term);

  rd.require(rd.real("penalty", "delta", cfg.penalty.delta), "penalty", "delta");

  SimulationSettings& sim = cfg.simulation;
  rd.real("simulation", "horizon", sim.horizon);
  rd.real("simulation", "dt", sim.dt);
  rd.integer("simulation", "paths", sim.paths);
  rd.integer("simulation", "seed", sim.seed);
  rd.integer("simulation", "threads", sim.threads);
  rd.real("simulation", "x0", sim.x0);
  rd.real("simulation", "stock0", sim.stock0);
  rd.real("simulation", "reserve0", sim.reserve0);

  rd.interval("bounds", "pi", cfg.bounds.pi);
  rd.interval("bounds", "theta0", cfg.bounds.theta0);
  rd.interval("bounds", "theta1", cfg.bounds.theta1);
  rd.interval("bounds", "slope", cfg.bounds.slope);
  rd.integer("bounds", "grid_n", cfg.grid_n);

  if (!rd.scenarios("scenarios", "family", cfg.scenarios)) {
    cfg.scenarios = {ScenarioSpec{}, ScenarioSpec{true, {}}};
  }
  rd.boolean("scenarios", "split_theta0", cfg.split_theta0);
  rd.real("scenarios", "theta0_claim", cfg.theta0_claim);

  std::string dir;
  if (rd.text("output", "directory", dir)) cfg.output.directory = dir;
  std::string csv;
  if (rd.text("output", "csv", csv)) {
    cfg.output.csv.clear();
    std::istringstream in(csv);
    for (std::string name; in >> name;) cfg.output.csv.insert(name);
  }
  rd.boolean("output", "saddle_grid", cfg.output.saddle_grid);

  sections.reject_unused();
  validate_config(cfg);
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  try {
    validate_regime_model(cfg.model);
    validate_delay(cfg.delay);
    validate_penalty(cfg.penalty);
    const TimeGrid grid = make_grid(cfg.simulation.horizon, cfg.simulation.dt);
    grid_multiple(cfg.delay.rho, grid.dt, Errc::delay_not_grid_multiple, "rho not a grid multiple");
    validate_bounds(cfg.bounds);
    if (cfg.grid_n < 2) throw Error(Errc::invalid_bounds, "grid_n must be at least 2");
    if (cfg.simulation.paths < 1) throw Error(Errc::invalid_model, "paths must be at least 1");
    if (cfg.simulation.threads < 1) throw Error(Errc::invalid_model, "threads must be at least 1");
    if (cfg.scenarios.empty()) throw Error(Errc::empty_family, "scenario family is empty");
    for (const ScenarioSpec& spec : cfg.scenarios) {
      if (spec.best_response) continue;
      ScenarioControl c = spec.control;
      if (cfg.split_theta0) c.theta0_claim = cfg.theta0_claim;
      validate_scenario(c, cfg.model);
    }
    for (const std::string& name : cfg.output.csv) {
      if (name != "chain" && name != "market" && name != "surplus" && name != "filter" && name != "risk" &&
          name != "saddle")
        throw Error(Errc::invalid_model, "unknown csv kind '" + name + "'");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::config_validation) throw;
    throw Error(Errc::config_validation, e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::config_parse, path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string write_config(const RunConfig& cfg) {
  const auto& m = cfg.model;
  const Eigen::Index d = m.states();
  std::ostringstream out;
  out << "[model]\n";
  out << "states = " << d << "\n";
  out << "generator = ";
  for (Eigen::Index i = 0; i < d; ++i) {
    if (i) out << " ; ";
    out << format_vector(m.chain.generator.row(i).transpose());
  }
  out << "\n";
  out << "initial = " << format_vector(m.chain.initial) << "\n";
  out << "r = " << format_vector(m.r) << "\n";
  out << "alpha = " << format_vector(m.alpha) << "\n";
  out << "beta = " << format_number(m.beta) << "\n";
  out << "premium = " << format_number(m.premium) << "\n";
  out << "asset_intensity = " << format_vector(m.asset.intensity) << "\n";
  out << "asset_law = " << format_laws(m.asset.laws) << "\n";
  out << "claim_intensity = " << format_vector(m.claim.intensity) << "\n";
  out << "claim_law = " << format_laws(m.claim.laws) << "\n";
  out << "compensate_asset_jumps = " << (m.compensate_asset_jumps ? "true" : "false") << "\n\n";

  out << "[delay]\n";
  out << "rho = " << format_number(cfg.delay.rho) << "\n";
  out << "zeta = " << format_number(cfg.delay.zeta) << "\n";
  out << "kappa = " << format_number(cfg.delay.kappa) << "\n";
  out << "theta_flow = " << format_number(cfg.delay.theta_flow) << "\n";
  out << "xi = " << format_number(cfg.delay.xi) << "\n";
  out << "negate_lagged_term = " << (cfg.delay.negate_lagged_term ? "true" : "false") << "\n\n";

  out << "[penalty]\n";
  out << "delta = " << format_number(cfg.penalty.delta) << "\n\n";

  const SimulationSettings& s = cfg.simulation;
  out << "[simulation]\n";
  out << "horizon = " << format_number(s.horizon) << "\n";
  out << "dt = " << format_number(s.dt) << "\n";
  out << "paths = " << s.paths << "\n";
  out << "seed = " << s.seed << "\n";
  out << "threads = " << s.threads << "\n";
  out << "x0 = " << format_number(s.x0) << "\n";
  out << "stock0 = " << format_number(s.stock0) << "\n";
  out << "reserve0 = " << format_number(s.reserve0) << "\n\n";

  const auto iv = [](const Interval& i) { return format_number(i.lo) + " " + format_number(i.hi); };
  out << "[bounds]\n";
  out << "pi = " << iv(cfg.bounds.pi) << "\n";
  out << "theta0 = " << iv(cfg.bounds.theta0) << "\n";
  out << "theta1 = " << iv(cfg.bounds.theta1) << "\n";
  out << "slope = " << iv(cfg.bounds.slope) << "\n";
  out << "grid_n = " << cfg.grid_n << "\n\n";

  out << "[scenarios]\n";
  out << "family = ";
  for (std::size_t i = 0; i < cfg.scenarios.size(); ++i) {
    if (i) out << " ; ";
    const ScenarioSpec& sp = cfg.scenarios[i];
    if (sp.best_response) out << "best_response";
    else
      out << format_number(sp.control.theta0) << " " << format_number(sp.control.theta1) << " "
          << format_number(sp.control.theta2_slope);
  }
  out << "\n";
  out << "split_theta0 = " << (cfg.split_theta0 ? "true" : "false") << "\n";
  out << "theta0_claim = " << format_number(cfg.theta0_claim) << "\n\n";

  out << "[output]\n";
  out << "directory = " << cfg.output.directory.string() << "\n";
  out << "csv =";
  for (const std::string& name : cfg.output.csv) out << " " << name;
  out << "\n";
  out << "saddle_grid = " << (cfg.output.saddle_grid ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace insurisk
