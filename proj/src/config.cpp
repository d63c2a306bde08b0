#include "bisys/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace bisys {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  bool seen_space = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((s[i] == '#' || s[i] == ';') && (i == 0 || seen_space))
      return s.substr(0, i);
    seen_space = std::isspace(static_cast<unsigned char>(s[i]));
  }
  return s;
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Classical: return "classical";
    case RunMode::Schrodinger: return "schrodinger";
    case RunMode::Correlate: return "correlate";
    case RunMode::Dirac: return "dirac";
    case RunMode::FullReport: return "full-report";
  }
  return "?";
}

RunMode parse_mode(const std::string& name) {
  if (name == "classical") return RunMode::Classical;
  if (name == "schrodinger") return RunMode::Schrodinger;
  if (name == "correlate") return RunMode::Correlate;
  if (name == "dirac") return RunMode::Dirac;
  if (name == "full-report") return RunMode::FullReport;
  throw ConfigError("unknown mode '" + name +
                    "' (expected classical|schrodinger|correlate|dirac|full-report)");
}

ConfigDoc parse_config_text(const std::string& text) {
  ConfigDoc doc;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line_no);
      if (doc.sections.count(section))
        throw ConfigError("duplicate section [" + section + "]", line_no);
      doc.sections[section];
      doc.section_lines[section] = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value' or '[section]'", line_no);
    if (section.empty())
      throw ConfigError("key outside any section", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (value.empty()) throw ConfigError("empty value for key '" + key + "'", line_no);
    auto& sec = doc.sections[section];
    if (sec.count(key))
      throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line_no);
    sec[key] = {value, line_no};
  }
  return doc;
}

ConfigDoc parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

// Tracks which keys were consumed so leftovers can be rejected precisely.
class SectionReader {
 public:
  SectionReader(const ConfigDoc& doc, const std::string& name, bool required)
      : name_(name) {
    auto it = doc.sections.find(name);
    if (it == doc.sections.end()) {
      if (required) throw ConfigError("missing required section [" + name + "]");
      present_ = false;
      return;
    }
    present_ = true;
    entries_ = &it->second;
  }

  bool present() const { return present_; }

  const ConfigDoc::Entry* find(const std::string& key) {
    if (!present_) return nullptr;
    consumed_.insert(key);
    auto it = entries_->find(key);
    return it == entries_->end() ? nullptr : &it->second;
  }

  const ConfigDoc::Entry& require(const std::string& key) {
    const auto* e = find(key);
    if (!e) throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
    return *e;
  }

  double get_double(const std::string& key) { return to_double(require(key)); }

  std::optional<double> get_double_opt(const std::string& key) {
    const auto* e = find(key);
    return e ? std::optional<double>(to_double(*e)) : std::nullopt;
  }

  int get_int(const std::string& key, int fallback) {
    const auto* e = find(key);
    if (!e) return fallback;
    try {
      std::size_t pos = 0;
      const int v = std::stoi(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected an integer, got '" + e->value + "'",
                        e->line);
    }
  }

  std::string get_string(const std::string& key) { return require(key).value; }

  std::vector<double> get_doubles(const std::string& key) {
    const auto& e = require(key);
    std::istringstream in(e.value);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_double({tok, e.line}, key));
    if (out.empty())
      throw ConfigError("key '" + key + "': expected numbers", e.line);
    return out;
  }

  // "a:b" pairs separated by whitespace, e.g. levels = 1:0 2:1
  std::vector<std::pair<std::string, std::string>> get_pairs(const std::string& key) {
    const auto& e = require(key);
    std::istringstream in(e.value);
    std::vector<std::pair<std::string, std::string>> out;
    std::string tok;
    while (in >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ConfigError("key '" + key + "': expected colon-separated pairs like 1:0",
                          e.line);
      out.emplace_back(tok.substr(0, colon), tok.substr(colon + 1));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': expected pairs", e.line);
    return out;
  }

  int line(const std::string& key) {
    const auto* e = find(key);
    return e ? e->line : 0;
  }

  void finish() const {
    if (!present_) return;
    for (const auto& [key, entry] : *entries_)
      if (!consumed_.count(key))
        throw ConfigError("unknown key '" + key + "' in [" + name_ + "]", entry.line);
  }

  double to_double(const ConfigDoc::Entry& e, const std::string& key = {}) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError((key.empty() ? std::string("value") : "key '" + key + "'") +
                            ": expected a number, got '" + e.value + "'",
                        e.line);
    }
  }

 private:
  std::string name_;
  bool present_ = false;
  const std::map<std::string, ConfigDoc::Entry>* entries_ = nullptr;
  std::set<std::string> consumed_;
};

int parse_int_token(const std::string& tok, const std::string& what, int line) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected an integer, got '" + tok + "'", line);
  }
}

double parse_double_token(const std::string& tok, const std::string& what, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected a number, got '" + tok + "'", line);
  }
}

TwoBodySystem read_system(SectionReader& sec) {
  const double m1 = sec.get_double("m1");
  const double m2 = sec.get_double("m2");
  if (!(m1 > 0.0) || !(m2 > 0.0))
    throw ConfigError("[system]: masses must be positive", sec.line("m1"));
  return make_system(m1, m2);
}

CentralPotential read_potential(SectionReader& sec) {
  const std::string kind = sec.get_string("kind");
  try {
    if (kind == "coulomb") return CentralPotential::coulomb(sec.get_double("strength"));
    if (kind == "harmonic") return CentralPotential::harmonic(sec.get_double("stiffness"));
    if (kind == "power")
      return CentralPotential::power_law(sec.get_double("coefficient"),
                                         sec.get_double("exponent"));
  } catch (const std::domain_error& err) {
    throw ConfigError(std::string("[potential]: ") + err.what(), sec.line("kind"));
  }
  throw ConfigError("[potential]: kind must be coulomb|harmonic|power", sec.line("kind"));
}

ClassicalConfig read_classical(SectionReader& sec) {
  ClassicalConfig cfg;
  cfg.r0 = sec.get_double_opt("r0");
  if (const auto* e = sec.find("position")) {
    std::istringstream in(e->value);
    std::vector<double> v;
    std::string tok;
    while (in >> tok) v.push_back(parse_double_token(tok, "position", e->line));
    if (v.size() != 3) throw ConfigError("position: expected three numbers", e->line);
    cfg.position = Eigen::Vector3d(v[0], v[1], v[2]);
  }
  if (const auto* e = sec.find("velocity")) {
    std::istringstream in(e->value);
    std::vector<double> v;
    std::string tok;
    while (in >> tok) v.push_back(parse_double_token(tok, "velocity", e->line));
    if (v.size() != 3) throw ConfigError("velocity: expected three numbers", e->line);
    cfg.velocity = Eigen::Vector3d(v[0], v[1], v[2]);
  }
  if (cfg.r0 && (cfg.position || cfg.velocity))
    throw ConfigError("[classical]: give either r0 or position/velocity, not both");
  if (!cfg.r0 && !(cfg.position && cfg.velocity))
    throw ConfigError("[classical]: need r0 (circular orbit) or position and velocity");
  cfg.periods = sec.get_double_opt("periods").value_or(10.0);
  cfg.steps_per_period = sec.get_int("steps_per_period", 10000);
  cfg.t_end = sec.get_double_opt("t_end");
  cfg.dt = sec.get_double_opt("dt");
  if (!cfg.r0 && !(cfg.t_end && cfg.dt))
    throw ConfigError("[classical]: explicit initial state needs t_end and dt");
  cfg.sample_stride = sec.get_int("sample_stride", 10);
  if (cfg.sample_stride < 1)
    throw ConfigError("[classical]: sample_stride must be >= 1", sec.line("sample_stride"));
  if (cfg.steps_per_period < 10)
    throw ConfigError("[classical]: steps_per_period must be >= 10",
                      sec.line("steps_per_period"));
  return cfg;
}

SchrodingerConfig read_schrodinger(SectionReader& sec) {
  SchrodingerConfig cfg;
  for (const auto& [a, b] : sec.get_pairs("levels")) {
    const int line = sec.line("levels");
    const int n = parse_int_token(a, "levels", line);
    const int l = parse_int_token(b, "levels", line);
    if (n < 1 || l < 0 || l > n - 1)
      throw ConfigError("levels: need n >= 1 and 0 <= l <= n-1, got " + a + ":" + b, line);
    cfg.levels.emplace_back(n, l);
  }
  cfg.n_points = sec.get_int("n_points", 20000);
  if (cfg.n_points < 1000)
    throw ConfigError("[schrodinger]: n_points must be >= 1000", sec.line("n_points"));
  cfg.r_max = sec.get_double_opt("r_max");
  return cfg;
}

CorrelateConfig read_correlate(SectionReader& sec) {
  CorrelateConfig cfg;
  cfg.sigmas = sec.get_doubles("sigmas");
  for (double s : cfg.sigmas)
    if (!(s > 0.0)) throw ConfigError("sigmas: must be positive", sec.line("sigmas"));
  const auto pairs = sec.get_pairs("level");
  if (pairs.size() != 1)
    throw ConfigError("level: expected a single n:l pair", sec.line("level"));
  const int line = sec.line("level");
  cfg.level.first = parse_int_token(pairs[0].first, "level", line);
  cfg.level.second = parse_int_token(pairs[0].second, "level", line);
  if (cfg.level.first < 1 || cfg.level.second < 0 ||
      cfg.level.second > cfg.level.first - 1)
    throw ConfigError("level: need n >= 1 and 0 <= l <= n-1", line);
  cfg.n_points = sec.get_int("n_points", 8000);
  if (cfg.n_points < 1000)
    throw ConfigError("[correlate]: n_points must be >= 1000", sec.line("n_points"));
  cfg.k_points = sec.get_int("k_points", 4000);
  if (cfg.k_points < 100)
    throw ConfigError("[correlate]: k_points must be >= 100", sec.line("k_points"));
  cfg.k_max = sec.get_double_opt("k_max");
  if (cfg.k_max && !(*cfg.k_max > 0.0))
    throw ConfigError("[correlate]: k_max must be positive", sec.line("k_max"));
  return cfg;
}

DiracRunConfig read_dirac(SectionReader& sec) {
  DiracRunConfig cfg;
  cfg.coupling = sec.get_double("coupling");
  if (!(cfg.coupling > 0.0))
    throw ConfigError("[dirac]: coupling must be positive", sec.line("coupling"));
  for (const auto& [a, b] : sec.get_pairs("levels")) {
    const int line = sec.line("levels");
    DiracLevel lvl;
    lvl.n = parse_int_token(a, "levels", line);
    lvl.j = parse_double_token(b, "levels", line);
    if (lvl.n < 1 || lvl.j < 0.5 || lvl.j + 0.5 > lvl.n + 1e-9 ||
        std::abs(2.0 * lvl.j - std::round(2.0 * lvl.j)) > 1e-9 ||
        std::llround(2.0 * lvl.j) % 2 == 0)
      throw ConfigError("levels: need integer n >= 1 and half-integral j <= n - 1/2", line);
    cfg.levels.push_back(lvl);
  }
  cfg.ladder_base = sec.get_double_opt("ladder_base").value_or(0.02);
  if (!(cfg.ladder_base > 0.0))
    throw ConfigError("[dirac]: ladder_base must be positive", sec.line("ladder_base"));
  return cfg;
}

Tolerances read_tolerances(SectionReader& sec) {
  Tolerances tol;
  auto grab = [&](const char* key, double& slot) {
    if (const auto opt = sec.get_double_opt(key)) {
      if (!(*opt > 0.0))
        throw ConfigError(std::string("[tolerances]: ") + key + " must be positive",
                          sec.line(key));
      slot = *opt;
    }
  };
  grab("collinearity", tol.collinearity);
  grab("energy_split", tol.energy_split);
  grab("angmom_split", tol.angmom_split);
  grab("momentum_opposition", tol.momentum_opposition);
  grab("energy_drift", tol.energy_drift);
  grab("energy_ratio", tol.energy_ratio);
  grab("similarity", tol.similarity);
  grab("closed_form", tol.closed_form);
  grab("virial", tol.virial);
  grab("spread_product", tol.spread_product);
  grab("parseval", tol.parseval);
  grab("reconstruction", tol.reconstruction);
  grab("exponent", tol.exponent);
  grab("bohr_limit", tol.bohr_limit);
  grab("quartic_scaling", tol.quartic_scaling);
  grab("quadratic_cancellation", tol.quadratic_cancellation);
  return tol;
}

}  // namespace

RunConfig build_run_config(RunMode mode, const ConfigDoc& doc) {
  static const std::set<std::string> known = {
      "system", "potential", "classical", "schrodinger", "correlate", "dirac",
      "tolerances"};
  for (const auto& [name, line] : doc.section_lines)
    if (!known.count(name))
      throw ConfigError("unknown section [" + name + "]", line);

  RunConfig cfg;
  cfg.mode = mode;

  SectionReader system_sec(doc, "system", true);
  cfg.system = read_system(system_sec);
  system_sec.finish();

  SectionReader pot_sec(doc, "potential", true);
  cfg.potential = read_potential(pot_sec);
  pot_sec.finish();

  const bool full = mode == RunMode::FullReport;
  SectionReader cl_sec(doc, "classical", full || mode == RunMode::Classical);
  if (cl_sec.present()) cfg.classical = read_classical(cl_sec);
  cl_sec.finish();

  SectionReader sch_sec(doc, "schrodinger", full || mode == RunMode::Schrodinger);
  if (sch_sec.present()) cfg.schrodinger = read_schrodinger(sch_sec);
  sch_sec.finish();

  SectionReader corr_sec(doc, "correlate", full || mode == RunMode::Correlate);
  if (corr_sec.present()) cfg.correlate = read_correlate(corr_sec);
  corr_sec.finish();

  SectionReader dir_sec(doc, "dirac", full || mode == RunMode::Dirac);
  if (dir_sec.present()) cfg.dirac = read_dirac(dir_sec);
  dir_sec.finish();

  SectionReader tol_sec(doc, "tolerances", false);
  if (tol_sec.present()) cfg.tolerances = read_tolerances(tol_sec);
  tol_sec.finish();

  if (cfg.dirac && cfg.potential.kind() != PotentialKind::Coulomb)
    throw ConfigError("[dirac]: requires a coulomb potential");
  return cfg;
}

}  // namespace bisys
