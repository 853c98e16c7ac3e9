#include "pifem/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pifem/errors.hpp"

#ifndef M_PI
#define M_PI 3.14159265358979323846
#endif

namespace pifem {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& s, const std::string& field, int line) {
  try {
    size_t pos;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": field '" + field +
                      "': not a number: " + s);
  }
}

int to_int(const std::string& s, const std::string& field, int line) {
  double v = to_double(s, field, line);
  if (v != std::floor(v))
    throw ConfigError("line " + std::to_string(line) + ": field '" + field +
                      "': not an integer: " + s);
  return static_cast<int>(v);
}

std::vector<double> split_numbers(const std::string& s, const std::string& ctx) {
  std::vector<double> out;
  std::string token;
  std::istringstream is(s);
  while (std::getline(is, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ConfigError(ctx + ": not a number: " + token);
    }
  }
  return out;
}

}  // namespace

std::function<double(double)> density_from_registry(const std::string& expr) {
  if (expr == "none") return nullptr;
  auto colon = expr.find(':');
  std::string kind = expr.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : expr.substr(colon + 1);
  if (kind == "constant") {
    auto v = split_numbers(args, "density constant");
    if (v.size() != 1) throw ConfigError("density constant:c needs one value");
    double c = v[0];
    return [c](double) { return c; };
  }
  if (kind == "poly") {
    auto c = split_numbers(args, "density poly");
    if (c.empty()) throw ConfigError("density poly needs coefficients");
    return [c](double t) {
      double acc = 0.0, tp = 1.0;
      for (double ci : c) {
        acc += ci * tp;
        tp *= t;
      }
      return acc;
    };
  }
  if (kind == "sine") {
    auto v = split_numbers(args, "density sine");
    if (v.size() != 3)
      throw ConfigError("density sine:a,omega,phase needs three values");
    double a = v[0], w = v[1], p = v[2];
    return [a, w, p](double t) { return a * std::sin(w * t + p); };
  }
  throw ConfigError("unknown density expression: " + expr);
}

TimeMeasure parse_measure(const std::string& text, double T) {
  // {atoms = [[t, w], ...], density = "expr"}
  TimeMeasure m;
  m.t_end = T;
  std::string s = trim(text);
  if (s.empty() || s.front() != '{' || s.back() != '}')
    throw ConfigError("sigma: expected {atoms = [...], density = \"...\"}");
  s = s.substr(1, s.size() - 2);

  auto apos = s.find("atoms");
  if (apos != std::string::npos) {
    auto lb = s.find('[', apos);
    if (lb == std::string::npos) throw ConfigError("sigma: atoms needs [...]");
    int depth = 0;
    size_t end = lb;
    for (; end < s.size(); ++end) {
      if (s[end] == '[') depth++;
      if (s[end] == ']' && --depth == 0) break;
    }
    if (depth != 0) throw ConfigError("sigma: unbalanced brackets in atoms");
    std::string inner = s.substr(lb + 1, end - lb - 1);
    size_t pos = 0;
    while ((pos = inner.find('[', pos)) != std::string::npos) {
      size_t close = inner.find(']', pos);
      if (close == std::string::npos)
        throw ConfigError("sigma: unbalanced atom entry");
      auto v = split_numbers(inner.substr(pos + 1, close - pos - 1),
                             "sigma atom");
      if (v.size() != 2)
        throw ConfigError("sigma: atom entries are [time, weight]");
      m.atoms.push_back({v[0], v[1]});
      pos = close + 1;
    }
  }

  auto dpos = s.find("density");
  if (dpos != std::string::npos) {
    auto q1 = s.find('"', dpos);
    auto q2 = q1 == std::string::npos ? std::string::npos : s.find('"', q1 + 1);
    if (q2 == std::string::npos)
      throw ConfigError("sigma: density must be a quoted registry id");
    m.density = density_from_registry(s.substr(q1 + 1, q2 - q1 - 1));
  }
  std::sort(m.atoms.begin(), m.atoms.end(),
            [](auto& a, auto& b) { return a.t < b.t; });
  m.validate();
  return m;
}

bool registry_has(const std::string& id) {
  static const char* ids[] = {"zero",  "one",    "sin_pi_xy", "bubble",
                              "gauss", "t_sin_pi_xy", "heat_mms_f", "kink"};
  for (auto* s : ids)
    if (id == s) return true;
  return false;
}

SpaceTimeFn registry_function(const std::string& id, const RunConfig& cfg) {
  Bounds d = cfg.domain;
  if (id == "zero") return [](Point, double) { return 0.0; };
  if (id == "one") return [](Point, double) { return 1.0; };
  if (id == "sin_pi_xy") {
    return [](Point p, double) {
      return std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
    };
  }
  if (id == "bubble") {
    return [d](Point p, double) {
      return std::sin(M_PI * (p.x - d.xmin) / d.width()) *
             std::sin(M_PI * (p.y - d.ymin) / d.height());
    };
  }
  if (id == "gauss") {
    Point c{0.5 * (d.xmin + d.xmax), 0.5 * (d.ymin + d.ymax)};
    double w = 0.15 * d.diam();
    return [c, w](Point p, double) {
      double r2 = dot(p - c, p - c);
      return std::exp(-r2 / (w * w));
    };
  }
  if (id == "t_sin_pi_xy") {
    return [](Point p, double t) {
      return t * std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
    };
  }
  if (id == "heat_mms_f") {
    double kx = M_PI / d.width(), ky = M_PI / d.height();
    return [d, kx, ky](Point p, double t) {
      return (1.0 + (kx * kx + ky * ky) * t) *
             std::sin(kx * (p.x - d.xmin)) * std::sin(ky * (p.y - d.ymin));
    };
  }
  if (id == "kink") {
    ExactSolutionKink kink{cfg.curve_center, cfg.curve_radius, cfg.beta1,
                           cfg.beta2};
    return [kink](Point p, double) { return kink.value(p); };
  }
  throw ConfigError("unknown registry function: " + id);
}

InterfaceCurve RunConfig::make_curve() const {
  if (curve_kind == "circle")
    return InterfaceCurve::circle(curve_center, curve_radius);
  if (curve_kind == "ellipse")
    return InterfaceCurve::ellipse(curve_center, curve_radius_x,
                                   curve_radius_y);
  throw ConfigError("unknown curve kind: " + curve_kind);
}

ProblemSpec RunConfig::make_problem_spec() const {
  ProblemSpec spec;
  spec.beta1 = beta1;
  spec.beta2 = beta2;
  spec.domain = domain;
  spec.curve = make_curve();
  spec.T = T;
  spec.sigma = parse_measure(sigma_text, T);
  spec.f = registry_function(f_id, *this);
  auto u0fn = registry_function(u0_id, *this);
  spec.u0 = [u0fn](Point p) { return u0fn(p, 0.0); };
  spec.dirichlet = registry_function(dirichlet_id, *this);
  spec.validate();
  return spec;
}

StudyOptions RunConfig::make_study_options() const {
  StudyOptions opts;
  opts.spec = make_problem_spec();
  opts.interface_radius = curve_radius;
  opts.target_h = target_h;
  opts.levels = levels;
  opts.n_steps = n_steps;
  opts.cg_tol = cg_tol;
  return opts;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  RunConfig cfg;
  std::string line, section;
  int lineno = 0;
  bool have_beta1 = false, have_beta2 = false;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string qkey = section.empty() ? key : section + "." + key;

    if (qkey == "geometry.xmin") cfg.domain.xmin = to_double(value, qkey, lineno);
    else if (qkey == "geometry.ymin") cfg.domain.ymin = to_double(value, qkey, lineno);
    else if (qkey == "geometry.xmax") cfg.domain.xmax = to_double(value, qkey, lineno);
    else if (qkey == "geometry.ymax") cfg.domain.ymax = to_double(value, qkey, lineno);
    else if (qkey == "geometry.curve") cfg.curve_kind = value;
    else if (qkey == "geometry.center_x") cfg.curve_center.x = to_double(value, qkey, lineno);
    else if (qkey == "geometry.center_y") cfg.curve_center.y = to_double(value, qkey, lineno);
    else if (qkey == "geometry.radius") cfg.curve_radius = to_double(value, qkey, lineno);
    else if (qkey == "geometry.radius_x") cfg.curve_radius_x = to_double(value, qkey, lineno);
    else if (qkey == "geometry.radius_y") cfg.curve_radius_y = to_double(value, qkey, lineno);
    else if (qkey == "problem.beta1") { cfg.beta1 = to_double(value, qkey, lineno); have_beta1 = true; }
    else if (qkey == "problem.beta2") { cfg.beta2 = to_double(value, qkey, lineno); have_beta2 = true; }
    else if (qkey == "problem.T") cfg.T = to_double(value, qkey, lineno);
    else if (qkey == "problem.f") cfg.f_id = value;
    else if (qkey == "problem.u0") cfg.u0_id = value;
    else if (qkey == "problem.dirichlet") cfg.dirichlet_id = value;
    else if (qkey == "problem.sigma") cfg.sigma_text = value;
    else if (qkey == "run.levels") cfg.levels = to_int(value, qkey, lineno);
    else if (qkey == "run.target_h") cfg.target_h = to_double(value, qkey, lineno);
    else if (qkey == "run.n_steps") cfg.n_steps = to_int(value, qkey, lineno);
    else if (qkey == "run.cg_tol") cfg.cg_tol = to_double(value, qkey, lineno);
    else
      throw ConfigError("line " + std::to_string(lineno) + ": unknown field '" +
                        qkey + "'");
  }
  if (have_beta1 != have_beta2) {
    throw ConfigError(std::string("missing field 'problem.") +
                      (have_beta1 ? "beta2" : "beta1") + "'");
  }
  for (auto* id : {&cfg.f_id, &cfg.u0_id, &cfg.dirichlet_id}) {
    if (!registry_has(*id))
      throw ConfigError("unknown registry function '" + *id + "'");
  }
  if (cfg.beta1 <= 0.0) throw ConfigError("field 'problem.beta1' must be positive");
  if (cfg.beta2 <= 0.0) throw ConfigError("field 'problem.beta2' must be positive");
  if (cfg.T <= 0.0) throw ConfigError("field 'problem.T' must be positive");
  if (cfg.target_h <= 0.0) throw ConfigError("field 'run.target_h' must be positive");
  if (cfg.levels < 1) throw ConfigError("field 'run.levels' must be >= 1");
  return cfg;
}

}  // namespace pifem
