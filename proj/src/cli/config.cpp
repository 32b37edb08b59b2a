#include "memwalk/cli/config.hpp"

#include "memwalk/cli/json_locator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

namespace memwalk::cli {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error(key + (line > 0 ? " (line " + std::to_string(line) + ")" : std::string()) + ": " +
                         message),
      key_(std::move(key)),
      line_(line) {}

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Typed access to one object of the document, with errors naming key and line.
class Reader {
 public:
  Reader(const JsonLocator& locator, const std::set<std::string>& overridden)
      : locator_(locator), overridden_(overridden) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    const int line = overridden_.count(path) ? 0 : locator_.line_of(path);
    throw ConfigError(path, line, overridden_.count(path) ? message + " (command-line value)" : message);
  }

  void require_object(const json& node, const std::string& path) const {
    if (!node.is_object()) {
      fail(path.empty() ? "config" : path, "expected an object");
    }
  }

  void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed,
                  const std::string& context = {}) const {
    for (const auto& item : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
        fail(join(path, item.key()), context.empty() ? "unknown key" : "unknown key for " + context);
      }
    }
  }

  double number(const json& obj, const std::string& path, const char* key, double fallback) const {
    if (!obj.contains(key)) {
      return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(join(path, key), "expected a number");
    }
    return v.get<double>();
  }

  // number or null (NaN)
  double number_or_null(const json& obj, const std::string& path, const char* key, double fallback) const {
    if (obj.contains(key) && obj.at(key).is_null()) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return number(obj, path, key, fallback);
  }

  long long integer(const json& obj, const std::string& path, const char* key, long long fallback) const {
    if (!obj.contains(key)) {
      return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(join(path, key), "expected an integer");
    }
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<long long>::max())) {
      fail(join(path, key), "integer out of range");
    }
    return v.get<long long>();
  }

  std::uint64_t unsigned_integer(const json& obj, const std::string& path, const char* key,
                                 std::uint64_t fallback) const {
    if (!obj.contains(key)) {
      return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_unsigned()) {
      fail(join(path, key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) const {
    if (!obj.contains(key)) {
      return fallback;
    }
    if (!obj.at(key).is_boolean()) {
      fail(join(path, key), "expected true or false");
    }
    return obj.at(key).get<bool>();
  }

  std::string string(const json& obj, const std::string& path, const char* key, const std::string& fallback) const {
    if (!obj.contains(key)) {
      return fallback;
    }
    if (!obj.at(key).is_string()) {
      fail(join(path, key), "expected a string");
    }
    return obj.at(key).get<std::string>();
  }

  std::vector<double> numbers(const json& obj, const std::string& path, const char* key) const {
    const std::string p = join(path, key);
    const json& v = obj.at(key);
    if (!v.is_array()) {
      fail(p, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        fail(p + "[" + std::to_string(i) + "]", "expected a number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Vec vector(const json& obj, const std::string& path, const char* key, int dim, const Vec& fallback) const {
    if (!obj.contains(key)) {
      return fallback;
    }
    const std::vector<double> values = numbers(obj, path, key);
    if (static_cast<int>(values.size()) != dim) {
      fail(join(path, key), "expected " + std::to_string(dim) + " components (model.dimension), got " +
                                std::to_string(values.size()));
    }
    Vec out(dim);
    for (int i = 0; i < dim; ++i) {
      if (!std::isfinite(values[static_cast<std::size_t>(i)])) {
        fail(join(path, key), "components must be finite");
      }
      out[i] = values[static_cast<std::size_t>(i)];
    }
    return out;
  }

  void positive(double value, const std::string& path) const {
    if (!(value > 0.0) || !std::isfinite(value)) {
      fail(path, "must be positive and finite");
    }
  }

  void non_negative(double value, const std::string& path) const {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      fail(path, "must be non-negative and finite");
    }
  }

 private:
  const JsonLocator& locator_;
  const std::set<std::string>& overridden_;
};

models::KernelSpec read_kernel(const Reader& r, const json& obj, const std::string& path) {
  r.require_object(obj, path);
  const std::string kind = r.string(obj, path, "kind", "exponential");
  if (kind == "exponential") {
    r.check_keys(obj, path, {"kind", "k0", "delta"}, "kind exponential");
    const double k0 = r.number(obj, path, "k0", 1.0);
    const double delta = r.number(obj, path, "delta", 1.0);
    r.positive(k0, join(path, "k0"));
    r.positive(delta, join(path, "delta"));
    return models::KernelSpec::exponential(k0, delta);
  }
  if (kind == "tabulated") {
    r.check_keys(obj, path, {"kind", "nodes", "values", "delta"}, "kind tabulated");
    for (const char* key : {"nodes", "values"}) {
      if (!obj.contains(key)) {
        r.fail(join(path, key), "required for kind tabulated");
      }
    }
    const double delta = r.number(obj, path, "delta", 1.0);
    r.positive(delta, join(path, "delta"));
    try {
      return models::KernelSpec::tabulated(r.numbers(obj, path, "nodes"), r.numbers(obj, path, "values"), delta);
    } catch (const ArgumentError& e) {
      r.fail(join(path, "nodes"), e.what());
    }
  }
  r.fail(join(path, "kind"), "unknown kernel kind '" + kind + "' (exponential, tabulated)");
}

models::SmoothPotentialSpec read_smooth(const Reader& r, const json& obj, const std::string& path) {
  r.require_object(obj, path);
  const std::string kind = r.string(obj, path, "kind", "harmonic");
  models::SmoothPotentialSpec u;
  if (kind == "harmonic") {
    r.check_keys(obj, path, {"kind", "stiffness", "offset", "a1", "a2", "eps1"}, "kind harmonic");
    const double k = r.number(obj, path, "stiffness", 1.0);
    r.positive(k, join(path, "stiffness"));
    u = models::SmoothPotentialSpec::harmonic(k, r.number(obj, path, "offset", 0.0));
  } else if (kind == "polynomial") {
    r.check_keys(obj, path, {"kind", "stiffness", "exponent", "offset", "a1", "a2", "eps1"}, "kind polynomial");
    const double k = r.number(obj, path, "stiffness", 1.0);
    const double q = r.number(obj, path, "exponent", 2.0);
    r.positive(k, join(path, "stiffness"));
    if (!(q >= 2.0) || !std::isfinite(q)) {
      r.fail(join(path, "exponent"), "must be >= 2");
    }
    u = models::SmoothPotentialSpec::polynomial(k, q, r.number(obj, path, "offset", 0.0));
  } else {
    r.fail(join(path, "kind"), "unknown smooth potential kind '" + kind + "' (harmonic, polynomial)");
  }
  u.a1 = r.number(obj, path, "a1", u.a1);
  u.a2 = r.number(obj, path, "a2", u.a2);
  u.eps1 = r.number(obj, path, "eps1", u.eps1);
  r.positive(u.a1, join(path, "a1"));
  r.non_negative(u.a2, join(path, "a2"));
  r.positive(u.eps1, join(path, "eps1"));
  return u;
}

models::SingularPotentialSpec read_singular(const Reader& r, const json& obj, const std::string& path) {
  r.require_object(obj, path);
  const std::string kind = r.string(obj, path, "kind", "coulomb_log");
  models::SingularPotentialSpec g;
  if (kind == "none") {
    r.check_keys(obj, path, {"kind"}, "kind none");
    return models::SingularPotentialSpec::none();
  }
  if (kind == "coulomb_log") {
    r.check_keys(obj, path, {"kind", "coulomb_alpha", "a6"}, "kind coulomb_log");
    const double alpha = r.number(obj, path, "coulomb_alpha", 1.0);
    r.positive(alpha, join(path, "coulomb_alpha"));
    g = models::SingularPotentialSpec::coulomb_log(alpha);
  } else if (kind == "riesz") {
    r.check_keys(obj, path, {"kind", "strength", "riesz_exponent", "a6"}, "kind riesz");
    const double strength = r.number(obj, path, "strength", 1.0);
    const double exponent = r.number(obj, path, "riesz_exponent", 1.0);
    r.positive(strength, join(path, "strength"));
    r.positive(exponent, join(path, "riesz_exponent"));
    g = models::SingularPotentialSpec::riesz(strength, exponent);
  } else if (kind == "lennard_jones") {
    r.check_keys(obj, path, {"kind", "lj_c1", "lj_c2", "a6"}, "kind lennard_jones");
    const double c1 = r.number(obj, path, "lj_c1", 1.0);
    const double c2 = r.number(obj, path, "lj_c2", 1.0);
    r.positive(c1, join(path, "lj_c1"));
    r.non_negative(c2, join(path, "lj_c2"));
    g = models::SingularPotentialSpec::lennard_jones(c1, c2);
  } else {
    r.fail(join(path, "kind"), "unknown singular potential kind '" + kind + "' (none, coulomb_log, riesz, lennard_jones)");
  }
  g.a6 = r.number_or_null(obj, path, "a6", g.a6);
  if (!std::isnan(g.a6)) {
    r.positive(g.a6, join(path, "a6"));
  }
  return g;
}

models::PilotForceSpec read_pilot(const Reader& r, const json& obj, const std::string& path) {
  r.require_object(obj, path);
  r.check_keys(obj, path, {"kind"});
  const std::string kind = r.string(obj, path, "kind", "bessel_j1");
  if (kind == "bessel_j1") {
    return models::PilotForceSpec::bessel_j1();
  }
  if (kind == "zero") {
    return models::PilotForceSpec::zero();
  }
  r.fail(join(path, "kind"), "unknown pilot kind '" + kind + "' (bessel_j1, zero)");
}

models::ModelSpec read_model(const Reader& r, const json& obj) {
  const std::string path = "model";
  r.require_object(obj, path);
  r.check_keys(obj, path, {"dimension", "mass", "sigma", "x_min", "kernel", "smooth", "singular", "pilot"});
  models::ModelSpec m = models::ModelSpec::coulomb_walker(1.0);
  const long long dim = r.integer(obj, path, "dimension", 2);
  if (dim < 1 || dim > kMaxDim) {
    r.fail("model.dimension", "must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  m.dimension = static_cast<int>(dim);
  m.mass = r.number(obj, path, "mass", 1.0);
  m.sigma = r.number(obj, path, "sigma", 1.0);
  m.x_min = r.number(obj, path, "x_min", m.x_min);
  r.positive(m.mass, "model.mass");
  r.non_negative(m.sigma, "model.sigma");
  r.positive(m.x_min, "model.x_min");
  const json empty = json::object();
  m.kernel = read_kernel(r, obj.contains("kernel") ? obj.at("kernel") : empty, "model.kernel");
  m.smooth = read_smooth(r, obj.contains("smooth") ? obj.at("smooth") : empty, "model.smooth");
  m.singular = read_singular(r, obj.contains("singular") ? obj.at("singular") : empty, "model.singular");
  m.pilot = read_pilot(r, obj.contains("pilot") ? obj.at("pilot") : empty, "model.pilot");
  return m;
}

void read_sim(const Reader& r, const json& obj, RunConfig& c) {
  const std::string path = "sim";
  r.require_object(obj, path);
  r.check_keys(obj, path,
               {"dt", "t_max", "burn_in", "x0", "v0", "initial_past", "record_stride", "seed", "n_members", "n_mem",
                "guarded"});
  integrator::SimConfig& s = c.sim;
  const int dim = s.model.dimension;
  s.dt = r.number(obj, path, "dt", 1.0 / 64.0);
  r.positive(s.dt, "sim.dt");
  s.t_max = r.number(obj, path, "t_max", 2000.0);
  r.positive(s.t_max, "sim.t_max");
  if (s.t_max < s.dt) {
    r.fail("sim.t_max", "must be at least one step (sim.dt)");
  }
  s.burn_in = r.number(obj, path, "burn_in", 0.25 * s.t_max);
  r.non_negative(s.burn_in, "sim.burn_in");
  if (!(s.burn_in < s.t_max)) {
    r.fail("sim.burn_in", "must be below sim.t_max");
  }
  s.x0 = r.vector(obj, path, "x0", dim, 2.0 * std::numbers::pi * unit_vec(dim, 0));
  s.v0 = r.vector(obj, path, "v0", dim, zero_vec(dim));
  s.initial_past = r.vector(obj, path, "initial_past", dim, s.x0);
  const long long stride = r.integer(obj, path, "record_stride", 8);
  if (stride < 1 || stride > std::numeric_limits<int>::max()) {
    r.fail("sim.record_stride", "must be a positive integer");
  }
  s.record_stride = static_cast<int>(stride);
  s.seed = r.unsigned_integer(obj, path, "seed", 0);
  const long long members = r.integer(obj, path, "n_members", 64);
  if (members < 1 || members > 1000000) {
    r.fail("sim.n_members", "must be in [1, 1000000]");
  }
  c.n_members = static_cast<int>(members);
  const long long n_mem = r.integer(obj, path, "n_mem", 0);
  if (n_mem < 0 || n_mem > 100000000) {
    r.fail("sim.n_mem", "must be in [0, 1e8] (0 selects the kernel's default horizon)");
  }
  s.n_mem = static_cast<int>(n_mem);
  s.guarded = r.boolean(obj, path, "guarded", false);
  if (models::is_singular(s.model.singular)) {
    const bool one_d = dim == 1;
    for (const auto& [key, v] : {std::pair{"sim.x0", s.x0}, std::pair{"sim.initial_past", s.initial_past}}) {
      if (one_d ? !(v[0] > 0.0) : !(v.norm() > 0.0)) {
        r.fail(key, "must lie off the singularity of model.singular");
      }
    }
  }
}

std::string observable_error(const std::string& name, int dim) {
  if (name == "radius" || name == "speed_sq") {
    return {};
  }
  if (name.size() >= 2 && name[0] == 'x') {
    const std::string digits = name.substr(1);
    if (std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      const int axis = std::stoi(digits);
      if (axis >= 1 && axis <= dim) {
        return {};
      }
    }
  }
  return "unknown observable '" + name + "' (radius, speed_sq, x1..x" + std::to_string(dim) + ")";
}

void read_analysis(const Reader& r, const json& obj, RunConfig& c) {
  const std::string path = "analysis";
  r.require_object(obj, path);
  r.check_keys(obj, path, {"bins", "split", "observable", "metric", "variational", "mixing"});
  AnalysisBlock& a = c.analysis;
  const int dim = c.sim.model.dimension;
  const long long bins = r.integer(obj, path, "bins", 100);
  if (bins < 8 || bins > 1000000) {
    r.fail("analysis.bins", "must be in [8, 1000000]");
  }
  a.bins = static_cast<int>(bins);
  a.split = r.number(obj, path, "split", 0.5);
  if (!(a.split > 0.0 && a.split < 1.0)) {
    r.fail("analysis.split", "must lie in (0, 1)");
  }
  a.observable = r.string(obj, path, "observable", "radius");
  if (const std::string err = observable_error(a.observable, dim); !err.empty()) {
    r.fail("analysis.observable", err);
  }
  const json empty = json::object();

  const json& metric = obj.contains("metric") ? obj.at("metric") : empty;
  r.require_object(metric, "analysis.metric");
  r.check_keys(metric, "analysis.metric", {"N", "safety", "p2", "x_min"});
  a.metric.N = r.number(metric, "analysis.metric", "N", 1.0);
  a.metric.safety = r.number(metric, "analysis.metric", "safety", 0.5);
  a.metric.p2 = r.number(metric, "analysis.metric", "p2", 1.5);
  a.metric.x_min = r.number(metric, "analysis.metric", "x_min", 1e-8);
  r.positive(a.metric.N, "analysis.metric.N");
  if (!(a.metric.safety > 0.0 && a.metric.safety < 1.0)) {
    r.fail("analysis.metric.safety", "must lie in (0, 1)");
  }
  if (!(a.metric.p2 > 1.0) || !std::isfinite(a.metric.p2)) {
    r.fail("analysis.metric.p2", "must be greater than 1");
  }
  r.positive(a.metric.x_min, "analysis.metric.x_min");

  const json& var = obj.contains("variational") ? obj.at("variational") : empty;
  const std::string vp = "analysis.variational";
  r.require_object(var, vp);
  r.check_keys(var, vp, {"rate_alpha", "t_end", "control_t", "control_eps", "r_target", "control_h"});
  VariationalBlock& v = a.variational;
  v.rate_alpha = r.number(var, vp, "rate_alpha", 1.0);
  v.t_end = r.number(var, vp, "t_end", 10.0);
  v.control_t = r.number(var, vp, "control_t", 2.0);
  v.control_eps = r.number(var, vp, "control_eps", 0.25);
  v.r_target = r.number(var, vp, "r_target", 0.1);
  v.control_h = r.number(var, vp, "control_h", 1e-4);
  for (const auto& [key, value] : {std::pair{"rate_alpha", v.rate_alpha}, std::pair{"t_end", v.t_end},
                                   std::pair{"r_target", v.r_target}, std::pair{"control_h", v.control_h}}) {
    r.positive(value, join(vp, key));
  }
  if (!(v.control_t > 1.0) || !std::isfinite(v.control_t)) {
    r.fail(join(vp, "control_t"), "must be greater than 1");
  }
  if (!(v.control_eps > 0.0 && v.control_eps < v.control_t / 4.0)) {
    r.fail(join(vp, "control_eps"), "must lie in (0, control_t / 4)");
  }

  const json& mix = obj.contains("mixing") ? obj.at("mixing") : empty;
  const std::string mp = "analysis.mixing";
  r.require_object(mix, mp);
  r.check_keys(mix, mp, {"x0_b", "v0_b"});
  a.mixing.x0_b = r.vector(mix, mp, "x0_b", dim, unit_vec(dim, 0));
  a.mixing.v0_b = r.vector(mix, mp, "v0_b", dim, zero_vec(dim));
  if (models::is_singular(c.sim.model.singular) &&
      (dim == 1 ? !(a.mixing.x0_b[0] > 0.0) : !(a.mixing.x0_b.norm() > 0.0))) {
    r.fail(join(mp, "x0_b"), "must lie off the singularity of model.singular");
  }
}

void read_output(const Reader& r, const json& obj, RunConfig& c) {
  r.require_object(obj, "output");
  r.check_keys(obj, "output", {"out_dir", "emit_plots"});
  c.output.out_dir = r.string(obj, "output", "out_dir", "out");
  if (c.output.out_dir.empty()) {
    r.fail("output.out_dir", "must not be empty");
  }
  c.output.emit_plots = r.boolean(obj, "output", "emit_plots", true);
}

ojson vec_json(const Vec& v) {
  ojson out = ojson::array();
  for (int i = 0; i < v.size(); ++i) {
    out.push_back(v[i]);
  }
  return out;
}

ojson number_or_null(double x) { return std::isnan(x) ? ojson(nullptr) : ojson(x); }

}  // namespace

RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, false);
  } catch (const json::parse_error& e) {
    // e.what() carries "line L, column C"
    throw ConfigError("config", 0, std::string("malformed JSON: ") + e.what());
  }
  const JsonLocator locator(text);
  std::set<std::string> overridden;
  Reader r(locator, overridden);
  r.require_object(doc, "");
  if (!locator.duplicates().empty()) {
    r.fail(locator.duplicates().front(), "duplicate key");
  }
  r.check_keys(doc, "", {"model", "sim", "analysis", "output"});
  for (const char* block : {"model", "sim", "analysis", "output"}) {
    if (doc.contains(block)) {
      r.require_object(doc.at(block), block);
    }
  }
  if (overrides.coulomb_alpha && doc.contains("model") && doc.at("model").contains("singular")) {
    r.require_object(doc.at("model").at("singular"), "model.singular");
  }

  // Command-line values replace document values before validation.
  if (overrides.seed) {
    doc["sim"]["seed"] = *overrides.seed;
    overridden.insert("sim.seed");
  }
  if (overrides.t_max) {
    doc["sim"]["t_max"] = *overrides.t_max;
    overridden.insert("sim.t_max");
  }
  if (overrides.coulomb_alpha) {
    json& singular = doc["model"]["singular"];
    if (singular.contains("kind") && singular.at("kind") != "coulomb_log") {
      r.fail("model.singular.kind", "--alpha needs kind coulomb_log");
    }
    singular["coulomb_alpha"] = *overrides.coulomb_alpha;
    overridden.insert("model.singular.coulomb_alpha");
  }

  RunConfig c;
  const json empty = json::object();
  c.sim.model = read_model(r, doc.contains("model") ? doc.at("model") : empty);
  read_sim(r, doc.contains("sim") ? doc.at("sim") : empty, c);
  read_analysis(r, doc.contains("analysis") ? doc.at("analysis") : empty, c);
  read_output(r, doc.contains("output") ? doc.at("output") : empty, c);
  try {
    integrator::check_config(c.sim);
  } catch (const std::exception& e) {
    throw ConfigError("sim", 0, e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("config", 0, "cannot read " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

ojson to_json(const RunConfig& c) {
  const models::ModelSpec& m = c.sim.model;
  ojson kernel;
  if (m.kernel.kind == models::KernelKind::exponential) {
    kernel = {{"kind", "exponential"}, {"k0", m.kernel.k0}, {"delta", m.kernel.delta}};
  } else {
    kernel = {{"kind", "tabulated"}, {"nodes", m.kernel.nodes}, {"values", m.kernel.values}, {"delta", m.kernel.delta}};
  }
  ojson smooth;
  if (m.smooth.kind == models::SmoothKind::polynomial) {
    smooth = {{"kind", "polynomial"}, {"stiffness", m.smooth.stiffness}, {"exponent", m.smooth.exponent}};
  } else {
    smooth = {{"kind", "harmonic"}, {"stiffness", m.smooth.stiffness}};
  }
  smooth["offset"] = m.smooth.offset;
  smooth["a1"] = m.smooth.a1;
  smooth["a2"] = m.smooth.a2;
  smooth["eps1"] = m.smooth.eps1;
  ojson singular;
  switch (m.singular.kind) {
    case models::SingularKind::none:
      singular = {{"kind", "none"}};
      break;
    case models::SingularKind::coulomb_log:
      singular = {{"kind", "coulomb_log"}, {"coulomb_alpha", m.singular.coulomb_alpha}};
      break;
    case models::SingularKind::riesz:
      singular = {{"kind", "riesz"}, {"strength", m.singular.coulomb_alpha}, {"riesz_exponent", m.singular.riesz_exponent}};
      break;
    case models::SingularKind::lennard_jones:
      singular = {{"kind", "lennard_jones"}, {"lj_c1", m.singular.lj_c1}, {"lj_c2", m.singular.lj_c2}};
      break;
    case models::SingularKind::user:
      throw UnsupportedError("user potentials cannot be written to a config document");
  }
  if (m.singular.kind != models::SingularKind::none) {
    singular["a6"] = number_or_null(m.singular.a6);
  }
  if (m.smooth.kind == models::SmoothKind::user || m.pilot.kind == models::PilotKind::user) {
    throw UnsupportedError("user potentials cannot be written to a config document");
  }
  const ojson pilot = {{"kind", m.pilot.kind == models::PilotKind::zero ? "zero" : "bessel_j1"}};

  ojson out;
  out["model"] = {{"dimension", m.dimension}, {"mass", m.mass},     {"sigma", m.sigma},       {"x_min", m.x_min},
                  {"kernel", kernel},         {"smooth", smooth},   {"singular", singular}, {"pilot", pilot}};
  const integrator::SimConfig& s = c.sim;
  out["sim"] = {{"dt", s.dt},
                {"t_max", s.t_max},
                {"burn_in", s.burn_in},
                {"x0", vec_json(s.x0)},
                {"v0", vec_json(s.v0)},
                {"initial_past", vec_json(s.initial_past)},
                {"record_stride", s.record_stride},
                {"seed", s.seed},
                {"n_members", c.n_members},
                {"n_mem", s.n_mem},
                {"guarded", s.guarded}};
  const AnalysisBlock& a = c.analysis;
  out["analysis"] = {
      {"bins", a.bins},
      {"split", a.split},
      {"observable", a.observable},
      {"metric", {{"N", a.metric.N}, {"safety", a.metric.safety}, {"p2", a.metric.p2}, {"x_min", a.metric.x_min}}},
      {"variational",
       {{"rate_alpha", a.variational.rate_alpha},
        {"t_end", a.variational.t_end},
        {"control_t", a.variational.control_t},
        {"control_eps", a.variational.control_eps},
        {"r_target", a.variational.r_target},
        {"control_h", a.variational.control_h}}},
      {"mixing", {{"x0_b", vec_json(a.mixing.x0_b)}, {"v0_b", vec_json(a.mixing.v0_b)}}}};
  out["output"] = {{"out_dir", c.output.out_dir}, {"emit_plots", c.output.emit_plots}};
  return out;
}

std::string effective_config_text(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

bool same_config(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

}  // namespace memwalk::cli
