#include "cvlearn/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace cvlearn {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& tok, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(tok, &used);
    return used == tok.size();
  } catch (...) {
    return false;
  }
}

ConfigValue parse_value(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value");
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') {
      throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
    }
    return v.substr(1, v.size() - 2);
  }
  if (v.front() == '[') {
    if (v.back() != ']') {
      throw ConfigError("line " + std::to_string(line_no) + ": unterminated list");
    }
    std::vector<double> nums;
    std::vector<std::string> strs;
    bool is_string = false;
    std::string body = v.substr(1, v.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      if (item.front() == '"') {
        is_string = true;
        strs.push_back(item.substr(1, item.size() - 2));
      } else {
        double d;
        if (!parse_number(item, d)) {
          throw ConfigError("line " + std::to_string(line_no) + ": bad list item '" + item + "'");
        }
        nums.push_back(d);
      }
    }
    if (is_string) return strs;
    return nums;
  }
  double d;
  if (parse_number(v, d)) return d;
  throw ConfigError("line " + std::to_string(line_no) + ": cannot parse value '" + v + "'");
}

}  // namespace

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

double ExperimentConfig::number(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ConfigError("missing key " + section + "." + key);
  const auto& v = sections.at(section).at(key);
  if (const double* d = std::get_if<double>(&v)) return *d;
  throw ConfigError(section + "." + key + " must be a number");
}

double ExperimentConfig::number_or(const std::string& section, const std::string& key,
                                   double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

std::string ExperimentConfig::text(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ConfigError("missing key " + section + "." + key);
  const auto& v = sections.at(section).at(key);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError(section + "." + key + " must be a string");
}

std::string ExperimentConfig::text_or(const std::string& section, const std::string& key,
                                      const std::string& fallback) const {
  return has(section, key) ? text(section, key) : fallback;
}

std::vector<double> ExperimentConfig::numbers(const std::string& section,
                                              const std::string& key) const {
  if (!has(section, key)) throw ConfigError("missing key " + section + "." + key);
  const auto& v = sections.at(section).at(key);
  if (const auto* l = std::get_if<std::vector<double>>(&v)) return *l;
  if (const double* d = std::get_if<double>(&v)) return {*d};
  throw ConfigError(section + "." + key + " must be a number list");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  for (const auto& [name, kv] : sections) {
    if (!name.empty()) os << "[" << name << "]\n";
    for (const auto& [key, value] : kv) {
      os << key << " = ";
      if (const double* d = std::get_if<double>(&value)) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", *d);
        os << buf;
      } else if (const auto* s = std::get_if<std::string>(&value)) {
        os << '"' << *s << '"';
      } else if (const bool* b = std::get_if<bool>(&value)) {
        os << (*b ? "true" : "false");
      } else if (const auto* l = std::get_if<std::vector<double>>(&value)) {
        os << "[";
        for (std::size_t i = 0; i < l->size(); ++i) {
          char buf[40];
          std::snprintf(buf, sizeof(buf), "%.17g", (*l)[i]);
          os << (i ? ", " : "") << buf;
        }
        os << "]";
      } else if (const auto* ls = std::get_if<std::vector<std::string>>(&value)) {
        os << "[";
        for (std::size_t i = 0; i < ls->size(); ++i) {
          os << (i ? ", " : "") << '"' << (*ls)[i] << '"';
        }
        os << "]";
      }
      os << "\n";
    }
  }
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
  // FNV-1a over the canonical serialization.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::string section;
  std::stringstream ss(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    std::string line = raw;
    const std::size_t hashpos = line.find('#');
    if (hashpos != std::string::npos) line = line.substr(0, hashpos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": bad section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (cfg.sections[section].count(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + key);
    }
    cfg.sections[section][key] = parse_value(line.substr(eq + 1), line_no);
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate_config_schema(const ExperimentConfig& cfg) {
  static const std::map<std::string, std::set<std::string>> kAllowed = {
      {"", {"kind", "out_dir", "threads"}},
      {"prob", {"state", "channel", "effect", "n", "alpha_re", "alpha_im", "outcome", "out_csv"}},
      {"learn",
       {"target", "dist", "T", "seeds", "n", "evals", "mode", "outcome_sigma", "energy_bound",
        "gamma", "n_test", "eta_ref", "out_csv", "out_json", "target_alpha", "target_kind"}},
      {"sweep",
       {"n", "T", "seeds", "dist", "evals", "gamma", "n_test", "target_gap", "out_csv",
        "outcome_sigma", "target_kind", "bootstrap", "out_json", "wall_budget_ms"}},
      {"task",
       {"alpha", "file", "T", "seeds", "class", "evals", "grid_points", "disp_range",
        "kappa_max", "out_csv", "out_json"}},
      {"bound",
       {"setting", "n", "K", "ell", "eps", "gamma", "delta", "nu", "b1", "b2", "b3", "out_json"}},
      {"dims", {"class", "n", "gamma", "kmax", "budget", "seed", "eps", "k", "samples",
                "out_json", "out_csv"}},
  };
  const std::string kind = cfg.text_or("", "kind", "");
  if (kind.empty()) throw ConfigError("config must declare kind = \"...\"");
  static const std::set<std::string> kKinds = {"prob", "learn", "sweep", "task", "bound", "dims"};
  if (!kKinds.count(kind)) throw ConfigError("unknown config kind: " + kind);
  for (const auto& [section, kv] : cfg.sections) {
    auto allowed = kAllowed.find(section);
    if (allowed == kAllowed.end()) throw ConfigError("unknown section [" + section + "]");
    if (!section.empty() && section != kind) {
      throw ConfigError("section [" + section + "] does not belong to kind " + kind);
    }
    for (const auto& [key, value] : kv) {
      (void)value;
      if (!allowed->second.count(key)) {
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
      }
    }
  }
}

}  // namespace cvlearn
