#include "orbitsum/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace orbitsum {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

u64 parse_u64(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    u64 x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ParseError("bad unsigned value for " + key + ": '" + v + "'");
  }
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ParseError("bad numeric value for " + key + ": '" + v + "'");
  }
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& val) {
  if (key == "kind") c.kind = val;
  else if (key == "count") c.count = parse_u64(val, key);
  else if (key == "seed") c.seed = parse_u64(val, key);
  else if (key == "p_min") c.p_min = parse_u64(val, key);
  else if (key == "p_max") c.p_max = parse_u64(val, key);
  else if (key == "t_min_coeff") c.t_min_coeff = parse_double(val, key);
  else if (key == "t_min_exp") c.t_min_exp = parse_double(val, key);
  else if (key == "eps") c.eps = parse_double(val, key);
  else if (key == "B") c.B = parse_double(val, key);
  else if (key == "n_mode") c.n_mode = val;
  else if (key == "N") c.N = parse_u64(val, key);
  else if (key == "Q") c.Q = parse_u64(val, key);
  else if (key == "h_policy") c.h_policy = val;
  else if (key == "h") c.h = parse_u64(val, key);
  else if (key == "K") c.K = parse_u64(val, key);
  else if (key == "M") c.M = parse_u64(val, key);
  else if (key == "H") c.H = parse_u64(val, key);
  else if (key == "s") c.s = parse_u64(val, key);
  else if (key == "threads") c.threads = static_cast<unsigned>(parse_u64(val, key));
  else if (key == "output") c.output = val;
  else if (key == "format") c.format = val;
  else throw ParseError("unknown config key: " + key);
}

std::string fmt_double17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<ExperimentConfig> parse_experiment_configs(std::istream& is) {
  std::vector<ExperimentConfig> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ParseError("line " + std::to_string(lineno) + ": unterminated section header");
      ExperimentConfig c;
      c.name = trim(s.substr(1, s.size() - 2));
      if (c.name.empty())
        throw ParseError("line " + std::to_string(lineno) + ": empty section name");
      out.push_back(std::move(c));
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    if (out.empty())
      throw ParseError("line " + std::to_string(lineno) + ": key outside any [section]");
    apply_key(out.back(), trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  for (const auto& c : out) {
    bound_kind_from_string(c.kind);  // validates
    if (c.n_mode != "equal_p" && c.n_mode != "fixed" && c.n_mode != "window_min")
      throw ParseError("bad n_mode: " + c.n_mode);
    if (c.h_policy != "random" && c.h_policy != "fixed")
      throw ParseError("bad h_policy: " + c.h_policy);
    if (c.format != "csv" && c.format != "jsonl" && c.format != "both")
      throw ParseError("bad format: " + c.format);
  }
  return out;
}

std::vector<ExperimentConfig> parse_experiment_configs(const std::string& text) {
  std::istringstream is(text);
  return parse_experiment_configs(is);
}

std::vector<ExperimentConfig> load_experiment_configs(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config file " + path);
  return parse_experiment_configs(is);
}

std::string serialize_experiment_configs(const std::vector<ExperimentConfig>& configs) {
  std::ostringstream os;
  for (const auto& c : configs) {
    os << '[' << c.name << "]\n";
    os << "kind = " << c.kind << '\n';
    os << "count = " << c.count << '\n';
    os << "seed = " << c.seed << '\n';
    os << "p_min = " << c.p_min << '\n';
    os << "p_max = " << c.p_max << '\n';
    os << "t_min_coeff = " << fmt_double17(c.t_min_coeff) << '\n';
    os << "t_min_exp = " << fmt_double17(c.t_min_exp) << '\n';
    os << "eps = " << fmt_double17(c.eps) << '\n';
    os << "B = " << fmt_double17(c.B) << '\n';
    os << "n_mode = " << c.n_mode << '\n';
    os << "N = " << c.N << '\n';
    os << "Q = " << c.Q << '\n';
    os << "h_policy = " << c.h_policy << '\n';
    os << "h = " << c.h << '\n';
    os << "K = " << c.K << '\n';
    os << "M = " << c.M << '\n';
    os << "H = " << c.H << '\n';
    os << "s = " << c.s << '\n';
    os << "threads = " << c.threads << '\n';
    os << "output = " << c.output << '\n';
    os << "format = " << c.format << '\n';
    os << '\n';
  }
  return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const FactorSieve* sieve) {
  BoundKind kind = bound_kind_from_string(config.kind);
  InstanceConstraints cons;
  cons.p_min = config.p_min;
  cons.p_max = config.p_max;
  cons.t_min_coeff = config.t_min_coeff;
  cons.t_min_exp = config.t_min_exp;

  std::vector<InstanceSpec> instances;
  instances.reserve(static_cast<size_t>(config.count));
  u64 max_n = 0;
  for (u64 i = 0; i < config.count; ++i) {
    InstanceSpec inst = random_instance(config.seed + i, cons);
    inst.eps = config.eps;
    inst.B = config.B;
    inst.Q = config.Q;
    inst.K = config.K;
    inst.M = config.M;
    inst.H = config.H;
    inst.s = config.s;
    if (config.h_policy == "fixed") inst.h = config.h;
    if (config.n_mode == "equal_p") {
      inst.N = inst.p;
    } else if (config.n_mode == "fixed") {
      inst.N = config.N;
    } else {  // window_min: the least N the hypothesis window allows
      double lo = static_cast<double>(inst.Q) * static_cast<double>(inst.Q) *
                  std::pow(static_cast<double>(inst.p), 0.5 + config.eps);
      double hi = std::pow(static_cast<double>(inst.p), config.B);
      if (lo > hi)
        throw Unsatisfiable("window_min: Q^2 p^(1/2+eps) exceeds p^B for seed " +
                            std::to_string(inst.seed));
      inst.N = static_cast<u64>(std::ceil(lo));
    }
    max_n = std::max(max_n, inst.N);
    instances.push_back(inst);
  }

  std::optional<FactorSieve> local;
  const FactorSieve* use = sieve;
  if (kind == BoundKind::Smooth && (use == nullptr || use->limit() < max_n)) {
    local.emplace(FactorSieve::build(std::max<u64>(2, max_n)));
    use = &*local;
  }

  SumOptions opt;
  opt.threads = 1;  // parallelism across instances instead
  ExperimentResult result;
  result.config = config;
  result.reports = run_check(instances, kind, use, opt,
                             config.threads == 0 ? 0 : config.threads);
  return result;
}

}  // namespace orbitsum
