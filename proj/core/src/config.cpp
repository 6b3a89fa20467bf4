#include "krf/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace krf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& name, int line, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    fail(name, line, "expected a number, got '" + v + "'");
  }
}

long parse_int(const std::string& name, int line, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    fail(name, line, "expected an integer, got '" + v + "'");
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& name) {
  ScenarioConfig cfg;
  cfg.levels.clear();
  cfg.checks.clear();

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::string section;
  int grid_n_line = -1;
  bool have_grid_n = false;
  struct PartialPole {
    int line;
    bool have_x = false, have_y = false, have_nu = false, have_sign = false;
    PoleSpec p;
  };
  std::vector<PartialPole> pole_acc;

  auto current_pole = [&](int at_line) -> PartialPole& {
    if (pole_acc.empty()) fail(name, at_line, "pole key outside a [[pole]] section");
    return pole_acc.back();
  };

  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    const auto hash_pos = s.find('#');
    if (hash_pos != std::string::npos) s = trim(s.substr(0, hash_pos));
    if (s.empty()) continue;

    if (s.rfind("[[", 0) == 0) {
      if (s != "[[pole]]") fail(name, line, "unknown array section '" + s + "'");
      section = "pole";
      pole_acc.push_back({line});
      continue;
    }
    if (s.front() == '[') {
      if (s.back() != ']') fail(name, line, "unterminated section header");
      section = s.substr(1, s.size() - 2);
      if (section != "grid" && section != "flow" && section != "checks" &&
          section != "sampling" && section != "output")
        fail(name, line, "unknown section [" + section + "]");
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(name, line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty() || val.empty()) fail(name, line, "empty key or value");

    if (section == "grid") {
      if (key == "n") {
        cfg.grid_n = static_cast<int>(parse_int(name, line, val));
        have_grid_n = true;
        grid_n_line = line;
      } else {
        fail(name, line, "unknown key '" + key + "' in [grid]");
      }
    } else if (section == "flow") {
      if (key == "t_end")
        cfg.t_end = parse_double(name, line, val);
      else if (key == "ladder")
        cfg.ladder_depth = static_cast<int>(parse_int(name, line, val));
      else if (key == "levels") {
        std::istringstream ls(val);
        std::string tok;
        while (ls >> tok) cfg.levels.push_back(static_cast<int>(parse_int(name, line, tok)));
      } else {
        fail(name, line, "unknown key '" + key + "' in [flow]");
      }
    } else if (section == "checks") {
      if (key == "names") {
        std::istringstream ls(val);
        std::string tok;
        while (ls >> tok) cfg.checks.push_back(tok);
      } else {
        fail(name, line, "unknown key '" + key + "' in [checks]");
      }
    } else if (section == "sampling") {
      if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(parse_int(name, line, val));
      else if (key == "sources")
        cfg.n_sources = static_cast<int>(parse_int(name, line, val));
      else if (key == "targets")
        cfg.n_targets = static_cast<int>(parse_int(name, line, val));
      else
        fail(name, line, "unknown key '" + key + "' in [sampling]");
    } else if (section == "output") {
      if (key == "dir")
        cfg.out_dir = val;
      else
        fail(name, line, "unknown key '" + key + "' in [output]");
    } else if (section == "pole") {
      PartialPole& pp = current_pole(line);
      if (key == "x") {
        pp.p.pos.x = parse_double(name, line, val);
        pp.have_x = true;
      } else if (key == "y") {
        pp.p.pos.y = parse_double(name, line, val);
        pp.have_y = true;
      } else if (key == "nu") {
        pp.p.nu = parse_double(name, line, val);
        pp.have_nu = true;
      } else if (key == "sign") {
        if (val == "plus")
          pp.p.sign = Sign::plus;
        else if (val == "minus")
          pp.p.sign = Sign::minus;
        else
          fail(name, line, "pole sign must be 'plus' or 'minus', got '" + val + "'");
        pp.have_sign = true;
      } else {
        fail(name, line, "unknown key '" + key + "' in [[pole]]");
      }
    } else {
      fail(name, line, "key '" + key + "' before any section header");
    }
  }

  if (!have_grid_n)
    fail(name, grid_n_line > 0 ? grid_n_line : line, "missing required key grid.n");
  for (const auto& pp : pole_acc) {
    if (!(pp.have_x && pp.have_y && pp.have_nu && pp.have_sign))
      fail(name, pp.line, "incomplete [[pole]]: needs x, y, nu, sign");
    cfg.poles.push_back(pp.p);
  }
  if (cfg.levels.empty()) cfg.levels = {4, 6, 8};
  if (cfg.checks.empty()) cfg.checks = {"all"};

  cfg.validate();
  return cfg;
}

void ScenarioConfig::validate() const {
  if (grid_n < 64 || (grid_n & (grid_n - 1)) != 0)
    throw std::runtime_error("config: grid.n must be a power of two >= 64");
  TorusGrid g(grid_n);
  validate_poles(poles, g);
  if (t_end <= 0.0 || t_end > 1.0)
    throw std::runtime_error("config: flow.t_end must lie in (0, 1]");
  if (ladder_depth < 1 || ladder_depth > 20)
    throw std::runtime_error("config: flow.ladder must lie in 1..20");
  for (int j : levels)
    if (j < 1 || j > 20) throw std::runtime_error("config: truncation level out of range");
  if (n_sources < 1 || n_targets < 1)
    throw std::runtime_error("config: sampling counts must be positive");
}

std::string ScenarioConfig::serialize() const {
  std::ostringstream out;
  out.precision(17);
  out << "[grid]\nn = " << grid_n << "\n";
  for (const auto& p : poles) {
    out << "[[pole]]\nx = " << p.pos.x << "\ny = " << p.pos.y << "\nnu = " << p.nu
        << "\nsign = " << (p.sign == Sign::plus ? "plus" : "minus") << "\n";
  }
  out << "[flow]\nt_end = " << t_end << "\nladder = " << ladder_depth << "\nlevels =";
  for (int j : levels) out << " " << j;
  out << "\n[checks]\nnames =";
  for (const auto& c : checks) out << " " << c;
  out << "\n[sampling]\nseed = " << seed << "\nsources = " << n_sources
      << "\ntargets = " << n_targets << "\n[output]\ndir = " << out_dir << "\n";
  return out.str();
}

std::string ScenarioConfig::hash() const {
  const std::string s = serialize();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace krf
