#include "sfilm/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace sfilm {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Entry {
  std::string value;
  int line = 0;
  bool consumed = false;
};

using Section = std::map<std::string, Entry>;

struct RawConfig {
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_lines;

  Entry* find(const std::string& sec, const std::string& key) {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.consumed = true;
    return &k->second;
  }
};

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(lineno, "malformed section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ConfigError(lineno, "empty section name");
      raw.sections[current];
      raw.section_lines.emplace(current, lineno);
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected key = value");
    if (current.empty()) throw ConfigError(lineno, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "empty key");
    if (value.empty()) throw ConfigError(lineno, "empty value for key '" + key + "'");
    auto [it, fresh] = raw.sections[current].emplace(key, Entry{value, lineno, false});
    if (!fresh) throw ConfigError(lineno, "duplicate key '" + key + "'");
  }
  return raw;
}

double parse_double(const Entry& e, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError(e.line, key + " = " + e.value + " is not a number");
  }
}

int parse_int(const Entry& e, const std::string& key) {
  try {
    size_t pos = 0;
    const int v = std::stoi(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError(e.line, key + " = " + e.value + " is not an integer");
  }
}

class Reader {
 public:
  explicit Reader(RawConfig& raw) : raw_(raw) {}

  double number(const std::string& sec, const std::string& key, double fallback,
                bool required = false) {
    Entry* e = raw_.find(sec, key);
    if (!e) {
      if (required) missing(sec, key);
      return fallback;
    }
    last_line_ = e->line;
    return parse_double(*e, key);
  }

  int integer(const std::string& sec, const std::string& key, int fallback,
              bool required = false) {
    Entry* e = raw_.find(sec, key);
    if (!e) {
      if (required) missing(sec, key);
      return fallback;
    }
    last_line_ = e->line;
    return parse_int(*e, key);
  }

  std::string text(const std::string& sec, const std::string& key, const std::string& fallback,
                   bool required = false) {
    Entry* e = raw_.find(sec, key);
    if (!e) {
      if (required) missing(sec, key);
      return fallback;
    }
    last_line_ = e->line;
    return e->value;
  }

  bool has(const std::string& sec, const std::string& key) {
    auto s = raw_.sections.find(sec);
    return s != raw_.sections.end() && s->second.count(key) > 0;
  }

  int last_line() const { return last_line_; }

  [[noreturn]] void missing(const std::string& sec, const std::string& key) {
    auto it = raw_.section_lines.find(sec);
    const int line = it == raw_.section_lines.end() ? 0 : it->second;
    throw ConfigError(line, "missing required key '" + key + "' in section [" + sec + "]");
  }

  void reject_unknown(std::initializer_list<std::string> known_sections) {
    for (const auto& [sec, entries] : raw_.sections) {
      bool known = false;
      for (const auto& ks : known_sections)
        if (sec == ks) known = true;
      if (!known) throw ConfigError(raw_.section_lines.at(sec), "unknown section [" + sec + "]");
      for (const auto& [key, e] : entries)
        if (!e.consumed)
          throw ConfigError(e.line, "unknown key '" + key + "' in section [" + sec + "]");
    }
  }

 private:
  RawConfig& raw_;
  int last_line_ = 0;
};

}  // namespace

SigmaModel RunConfig::make_sigma() const {
  if (sigma_kind == "linear") return SigmaModel::linear(sigma_s, beta);
  return SigmaModel::logarithmic(sigma_s, beta, gamma_inf, sigma_sign, gamma_max);
}

ModelParams RunConfig::make_params() const {
  return ModelParams(G, D, make_sigma(), eps, eta1);
}

StepControl RunConfig::make_control() const {
  const Grid g = make_grid();
  StepControl c;
  c.dt_max = dt_max_factor * g.dx * g.dx;
  c.dt = dt0 > 0 ? dt0 : g.dx * g.dx;
  c.dt_min = dt_min;
  return c;
}

State RunConfig::make_initial_state() const {
  const Grid g = make_grid();
  Field h0(g), g0(g);
  switch (preset) {
    case Preset::constant:
      for (int i = 0; i < g.n; ++i) {
        h0.values[i] = h_mean;
        g0.values[i] = gamma_mean;
      }
      break;
    case Preset::cosine: {
      const double k = mode * M_PI / g.length;
      for (int i = 0; i < g.n; ++i) {
        const double x = g.cell_center(i);
        h0.values[i] = h_mean + h_amp * std::cos(k * x);
        g0.values[i] = gamma_mean + gamma_amp * std::cos(k * x);
      }
      break;
    }
    case Preset::from_file: {
      std::ifstream in(initial_file);
      if (!in) throw std::runtime_error("cannot open initial data file: " + initial_file);
      std::string header;
      std::getline(in, header);
      if (trim(header) != "x,h,gamma")
        throw std::runtime_error("initial data file must start with header 'x,h,gamma'");
      for (int i = 0; i < g.n; ++i) {
        std::string row;
        if (!std::getline(in, row))
          throw std::runtime_error("initial data file ended early: expected " +
                                   std::to_string(g.n) + " rows");
        std::istringstream rs(row);
        std::string xs, hs, gs;
        if (!std::getline(rs, xs, ',') || !std::getline(rs, hs, ',') || !std::getline(rs, gs))
          throw std::runtime_error("malformed initial data row " + std::to_string(i + 2));
        const double x = std::stod(xs);
        if (std::abs(x - g.cell_center(i)) > 1e-9 * g.length)
          throw std::runtime_error("initial data x does not match cell centers at row " +
                                   std::to_string(i + 2));
        h0.values[i] = std::stod(hs);
        g0.values[i] = std::stod(gs);
      }
      break;
    }
  }
  if (scheme == Scheme::regularized) {
    const double se = std::sqrt(eps);
    for (int i = 0; i < g.n; ++i) {
      h0.values[i] += se;
      g0.values[i] += eps;
    }
  }
  return State(0.0, std::move(h0), std::move(g0));
}

RunConfig parse_config(const std::string& text) {
  RawConfig raw = tokenize(text);
  Reader r(raw);
  RunConfig cfg;

  cfg.n_cells = r.integer("grid", "n_cells", 0, true);
  if (cfg.n_cells < 4) throw ConfigError(r.last_line(), "n_cells must be >= 4");
  cfg.length = r.number("grid", "length", 0, true);
  if (!(cfg.length > 0)) throw ConfigError(r.last_line(), "length must be positive");

  cfg.G = r.number("params", "G", 0, true);
  if (!(cfg.G > 0)) throw ConfigError(r.last_line(), "G must be positive");
  cfg.D = r.number("params", "D", 0, true);
  if (!(cfg.D > 0)) throw ConfigError(r.last_line(), "D must be positive");
  cfg.eps = r.number("params", "eps", cfg.eps);
  if (!(cfg.eps > 0 && cfg.eps < 1))
    throw ConfigError(r.last_line(), "eps must lie in (0, 1)");
  cfg.eta1 = r.number("params", "eta1", cfg.eta1);
  if (!(cfg.eta1 > 0.75 && cfg.eta1 < 1.0))
    throw ConfigError(r.last_line(), "eta1 must lie in (3/4, 1)");
  cfg.sigma_kind = r.text("params", "sigma", cfg.sigma_kind);
  if (cfg.sigma_kind != "linear" && cfg.sigma_kind != "logarithmic")
    throw ConfigError(r.last_line(), "sigma must be 'linear' or 'logarithmic'");
  cfg.sigma_s = r.number("params", "sigma_s", cfg.sigma_s);
  cfg.beta = r.number("params", "beta", cfg.beta);
  if (cfg.sigma_kind == "logarithmic") {
    cfg.gamma_inf = r.number("params", "gamma_inf", 0, true);
    cfg.sigma_sign = r.integer("params", "sigma_sign", 1);
    if (cfg.sigma_sign != 1 && cfg.sigma_sign != -1)
      throw ConfigError(r.last_line(), "sigma_sign must be +1 or -1");
    cfg.gamma_max = r.number("params", "gamma_max", 0, true);
  }

  const std::string sch = r.text("scheme", "type", "regularized");
  if (sch == "regularized") {
    cfg.scheme = Scheme::regularized;
  } else if (sch == "original") {
    cfg.scheme = Scheme::original;
  } else {
    throw ConfigError(r.last_line(), "scheme type must be 'regularized' or 'original'");
  }

  const std::string preset = r.text("initial", "preset", "", true);
  if (preset == "constant") {
    cfg.preset = Preset::constant;
    cfg.h_mean = r.number("initial", "h_mean", 0, true);
    cfg.gamma_mean = r.number("initial", "gamma_mean", 0, true);
    if (!(cfg.h_mean > 0) || !(cfg.gamma_mean > 0))
      throw ConfigError(r.last_line(), "constant preset needs positive means");
  } else if (preset == "cosine") {
    cfg.preset = Preset::cosine;
    cfg.h_mean = r.number("initial", "h_mean", 0, true);
    cfg.h_amp = r.number("initial", "h_amp", 0, true);
    cfg.gamma_mean = r.number("initial", "gamma_mean", 0, true);
    cfg.gamma_amp = r.number("initial", "gamma_amp", 0, true);
    cfg.mode = r.integer("initial", "mode", 1);
    if (cfg.mode < 1) throw ConfigError(r.last_line(), "mode must be a positive integer");
    if (!(std::abs(cfg.h_amp) < cfg.h_mean))
      throw ConfigError(r.last_line(), "cosine preset needs |h_amp| < h_mean");
    if (!(std::abs(cfg.gamma_amp) < cfg.gamma_mean))
      throw ConfigError(r.last_line(), "cosine preset needs |gamma_amp| < gamma_mean");
  } else if (preset == "from_file") {
    cfg.preset = Preset::from_file;
    cfg.initial_file = r.text("initial", "file", "", true);
  } else {
    throw ConfigError(r.last_line(), "preset must be constant, cosine, or from_file");
  }

  cfg.t_end = r.number("control", "t_end", 0, true);
  if (!(cfg.t_end > 0)) throw ConfigError(r.last_line(), "t_end must be positive");
  cfg.dt0 = r.number("control", "dt0", 0);
  if (cfg.dt0 < 0) throw ConfigError(r.last_line(), "dt0 must be nonnegative");
  cfg.dt_min = r.number("control", "dt_min", cfg.dt_min);
  if (!(cfg.dt_min > 0)) throw ConfigError(r.last_line(), "dt_min must be positive");
  cfg.dt_max_factor = r.number("control", "dt_max_factor", cfg.dt_max_factor);
  if (!(cfg.dt_max_factor > 0))
    throw ConfigError(r.last_line(), "dt_max_factor must be positive");

  cfg.directory = r.text("output", "directory", cfg.directory);
  cfg.snapshot_every = r.number("output", "snapshot_every", cfg.snapshot_every);
  if (cfg.snapshot_every < 0)
    throw ConfigError(r.last_line(), "snapshot_every must be nonnegative");
  cfg.ledger_every = r.integer("output", "ledger_every", cfg.ledger_every);
  if (cfg.ledger_every < 0) throw ConfigError(r.last_line(), "ledger_every must be nonnegative");

  r.reject_unknown({"grid", "params", "scheme", "initial", "control", "output"});

  // Cross-checks that need several keys at once.
  const Grid g = cfg.make_grid();
  const double dt_max = cfg.dt_max_factor * g.dx * g.dx;
  if (cfg.dt0 > 0 && cfg.dt0 > dt_max)
    throw ConfigError(0, "dt0 exceeds dt_max = dt_max_factor * dx^2");
  if (cfg.dt0 > 0 && cfg.dt0 < cfg.dt_min) throw ConfigError(0, "dt0 lies below dt_min");
  cfg.make_sigma();  // validates the surface-tension hypotheses
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace sfilm
