#include "blockmax/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "blockmax/csv.hpp"
#include "blockmax/error.hpp"

namespace blockmax {

namespace {

[[noreturn]] void config_fail(const std::string& what) { fail(Errc::config_error, "config: " + what); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    config_fail("'" + key + "' expects a finite number, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    config_fail("'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

InnovationCopula::Family parse_copula(const std::string& v) {
  using F = InnovationCopula::Family;
  if (v == "independence") return F::independence;
  if (v == "gaussian") return F::gaussian;
  if (v == "student_t" || v == "t") return F::student_t;
  if (v == "gumbel" || v == "gumbel_hougaard") return F::gumbel_hougaard;
  config_fail("unknown copula '" + v + "'");
}

const char* copula_name(InnovationCopula::Family f) {
  using F = InnovationCopula::Family;
  switch (f) {
    case F::independence:
      return "independence";
    case F::gaussian:
      return "gaussian";
    case F::student_t:
      return "student_t";
    case F::gumbel_hougaard:
      return "gumbel";
  }
  return "unknown";
}

}  // namespace

const char* to_string(Estimand e) {
  switch (e) {
    case Estimand::variance:
      return "variance";
    case Estimand::kendall_tau:
      return "kendall_tau";
    case Estimand::pwm1:
      return "pwm1";
  }
  return "unknown";
}

const char* to_string(EstimatorMode m) {
  switch (m) {
    case EstimatorMode::disjoint:
      return "disjoint";
    case EstimatorMode::sliding:
      return "sliding";
    case EstimatorMode::bias_reduced_sliding:
      return "bias_reduced_sliding";
  }
  return "unknown";
}

Estimand parse_estimand(const std::string& s) {
  if (s == "variance") return Estimand::variance;
  if (s == "kendall_tau" || s == "kendall") return Estimand::kendall_tau;
  if (s == "pwm1") return Estimand::pwm1;
  config_fail("unknown estimand '" + s + "'");
}

EstimatorMode parse_estimator_mode(const std::string& s) {
  if (s == "disjoint" || s == "db") return EstimatorMode::disjoint;
  if (s == "sliding" || s == "sb") return EstimatorMode::sliding;
  if (s == "bias_reduced_sliding") return EstimatorMode::bias_reduced_sliding;
  config_fail("unknown mode '" + s + "'");
}

ExperimentConfig parse_config(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_fail("line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) config_fail("line " + std::to_string(line_no) + ": empty key or value");
    if (!kv.emplace(key, value).second) config_fail("duplicate key '" + key + "'");
  }

  ExperimentConfig cfg;
  std::optional<double> tau;
  int dof = 4;
  bool have_copula = false;
  InnovationCopula::Family family = InnovationCopula::Family::independence;
  for (const auto& [key, v] : kv) {
    if (key == "model.temporal") {
      if (v == "iid") cfg.model.temporal = Temporal::iid;
      else if (v == "armax") cfg.model.temporal = Temporal::armax;
      else if (v == "car") cfg.model.temporal = Temporal::car;
      else config_fail("unknown model.temporal '" + v + "'");
    } else if (key == "model.alpha" || key == "model.phi") {
      cfg.model.param = to_double(key, v);
    } else if (key == "model.gamma") {
      cfg.model.marginal = Marginal::gpd(to_double(key, v));
    } else if (key == "model.copula") {
      family = parse_copula(v);
      have_copula = true;
    } else if (key == "model.tau") {
      tau = to_double(key, v);
    } else if (key == "model.dof") {
      dof = static_cast<int>(to_u64(key, v));
    } else if (key == "model.piecewise") {
      cfg.model.piecewise = to_u64(key, v);
    } else if (key == "r") {
      cfg.r = to_u64(key, v);
    } else if (key == "m_grid") {
      cfg.m_grid.clear();
      for (const auto& item : split_list(v)) cfg.m_grid.push_back(to_u64(key, item));
    } else if (key == "N") {
      cfg.N = to_u64(key, v);
    } else if (key == "estimand") {
      cfg.estimand = parse_estimand(v);
    } else if (key == "modes") {
      cfg.modes.clear();
      for (const auto& item : split_list(v)) cfg.modes.push_back(parse_estimator_mode(item));
    } else if (key == "master_seed") {
      cfg.master_seed = to_u64(key, v);
    } else if (key == "truth.n") {
      cfg.truth.n = to_u64(key, v);
    } else if (key == "truth.seed") {
      cfg.truth.seed = to_u64(key, v);
    } else {
      config_fail("unknown key '" + key + "'");
    }
  }
  if (kv.count("model.alpha") && cfg.model.temporal != Temporal::armax) config_fail("model.alpha requires armax");
  if (kv.count("model.phi") && cfg.model.temporal != Temporal::car) config_fail("model.phi requires car");
  if (have_copula) {
    cfg.model.dim = 2;
    if (family == InnovationCopula::Family::independence) {
      cfg.model.copula = InnovationCopula::independence();
    } else {
      if (!tau) config_fail("model.copula '" + std::string(copula_name(family)) + "' needs model.tau");
      try {
        cfg.model.copula = InnovationCopula::from_tau(family, *tau);
      } catch (const Error& e) {
        config_fail(e.what());
      }
      cfg.model.copula.dof = dof;
    }
  } else if (tau) {
    config_fail("model.tau without model.copula");
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::config_error, "config: cannot open '" + path + "'");
  return parse_config(in);
}

void validate(const ExperimentConfig& cfg) {
  try {
    validate(cfg.model);
  } catch (const Error& e) {
    config_fail(e.what());
  }
  if (cfg.r < 1) config_fail("r must be >= 1");
  if (cfg.m_grid.empty()) config_fail("m_grid must not be empty");
  for (auto m : cfg.m_grid) {
    if (m < 2) config_fail("every m in m_grid must be >= 2");
  }
  if (cfg.N < 1) config_fail("N must be >= 1");
  if (cfg.modes.empty()) config_fail("modes must not be empty");
  if (cfg.truth.n < 1000) config_fail("truth.n must be >= 1000");
  const bool bivariate = cfg.model.dim == 2;
  if (cfg.estimand == Estimand::kendall_tau && !bivariate) config_fail("kendall_tau needs model.copula");
  if (cfg.estimand != Estimand::kendall_tau && bivariate) {
    config_fail(std::string(to_string(cfg.estimand)) + " needs a univariate model");
  }
}

std::string write_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const auto& m = cfg.model;
  os << "model.temporal = " << to_string(m.temporal) << '\n';
  if (m.temporal == Temporal::armax) os << "model.alpha = " << format_double(m.param) << '\n';
  if (m.temporal == Temporal::car) os << "model.phi = " << format_double(m.param) << '\n';
  if (m.marginal.kind == Marginal::Kind::gpd) os << "model.gamma = " << format_double(m.marginal.gamma) << '\n';
  if (m.dim == 2) {
    os << "model.copula = " << copula_name(m.copula.family) << '\n';
    if (m.copula.family != InnovationCopula::Family::independence) {
      const double tau = m.copula.family == InnovationCopula::Family::gumbel_hougaard
                             ? 1.0 - 1.0 / m.copula.param
                             : 2.0 / std::numbers::pi * std::asin(m.copula.param);
      os << "model.tau = " << format_double(tau) << '\n';
    }
    if (m.copula.family == InnovationCopula::Family::student_t) os << "model.dof = " << m.copula.dof << '\n';
  }
  if (m.piecewise) os << "model.piecewise = " << *m.piecewise << '\n';
  os << "r = " << cfg.r << '\n';
  os << "m_grid = ";
  for (std::size_t i = 0; i < cfg.m_grid.size(); ++i) os << (i ? "," : "") << cfg.m_grid[i];
  os << '\n';
  os << "N = " << cfg.N << '\n';
  os << "estimand = " << to_string(cfg.estimand) << '\n';
  os << "modes = ";
  for (std::size_t i = 0; i < cfg.modes.size(); ++i) os << (i ? "," : "") << to_string(cfg.modes[i]);
  os << '\n';
  os << "master_seed = " << cfg.master_seed << '\n';
  os << "truth.n = " << cfg.truth.n << '\n';
  os << "truth.seed = " << cfg.truth.seed << '\n';
  return os.str();
}

}  // namespace blockmax
