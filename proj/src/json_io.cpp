#include "gencap/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gencap/error.hpp"

namespace gencap {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, where + ": " + what);
}

const Json& field(const Json& j, const char* name, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(name);
  if (it == j.end()) bad(where, std::string("missing field '") + name + "'");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

std::size_t count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) bad(where, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

PointSet rows(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of rows");
  std::vector<std::vector<double>> r;
  for (std::size_t i = 0; i < j.size(); ++i) r.push_back(numbers(j[i], where + "[" + std::to_string(i) + "]"));
  return PointSet::from_rows(r);
}

Json rows_json(const PointSet& pts) {
  Json out = Json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto r = pts[i];
    out.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return out;
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

Json network_to_json(const ReluNetwork& net) {
  Json layers = Json::array();
  const auto& ls = net.layers();
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const auto& l = ls[k];
    Json w = Json::array();
    for (std::size_t r = 0; r < l.out; ++r) {
      w.push_back(std::vector<double>(l.weights.begin() + static_cast<std::ptrdiff_t>(r * l.in),
                                      l.weights.begin() + static_cast<std::ptrdiff_t>((r + 1) * l.in)));
    }
    Json layer = {{"weights", std::move(w)}, {"bias", l.bias}};
    if (k + 1 == ls.size()) layer["linear"] = true;
    layers.push_back(std::move(layer));
  }
  return Json{{"layers", std::move(layers)}, {"activation", "relu"}};
}

ReluNetwork network_from_json(const Json& j) {
  if (j.contains("activation") && j["activation"] != "relu") bad("activation", "only relu is supported");
  const Json& ls = field(j, "layers", "network");
  if (!ls.is_array() || ls.empty()) bad("layers", "expected a nonempty array");
  std::vector<AffineLayer> layers;
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const std::string where = "layers[" + std::to_string(k) + "]";
    const PointSet w = rows(field(ls[k], "weights", where), where + ".weights");
    auto bias = numbers(field(ls[k], "bias", where), where + ".bias");
    if (w.size() != bias.size()) bad(where, "weights has " + std::to_string(w.size()) + " rows but bias has " +
                                                std::to_string(bias.size()) + " entries");
    const bool last = k + 1 == ls.size();
    if (ls[k].contains("linear") && ls[k]["linear"].get<bool>() != last) {
      bad(where, "only the output layer is linear");
    }
    AffineLayer layer(w.dim(), w.size());
    layer.weights.assign(w.coords().begin(), w.coords().end());
    layer.bias = std::move(bias);
    layers.push_back(std::move(layer));
  }
  return ReluNetwork(std::move(layers));
}

Json measure_to_json(const DiscreteMeasure& mu) {
  return Json{{"type", "discrete"},
              {"atoms", rows_json(mu.atoms())},
              {"weights", std::vector<double>(mu.weights().begin(), mu.weights().end())}};
}

DiscreteMeasure measure_from_json(const Json& j) {
  if (j.contains("type") && j["type"] != "discrete") bad("measure", "expected type 'discrete'");
  const PointSet atoms = rows(field(j, "atoms", "measure"), "atoms");
  const auto w = numbers(field(j, "weights", "measure"), "weights");
  if (w.size() != atoms.size()) bad("measure", "atoms and weights differ in length");
  return DiscreteMeasure::make(atoms, w);
}

Json cpwl_to_json(const CpwlMap& f) {
  return Json{{"breakpoints", f.breakpoints()}, {"values", rows_json(f.values())}};
}

CpwlMap cpwl_from_json(const Json& j) {
  return CpwlMap(numbers(field(j, "breakpoints", "cpwl"), "breakpoints"), rows(field(j, "values", "cpwl"), "values"));
}

Json certificate_to_json(const TransportCertificate& c) {
  return Json{{"epsilon", c.epsilon},
              {"p", c.p},
              {"n_atoms", c.n_atoms},
              {"breakpoints", c.breakpoints},
              {"plateau_mass", c.plateau_mass},
              {"ramp_mass", c.ramp_mass},
              {"total_ramp_mass", c.total_ramp_mass},
              {"mass_check_max_abs_err", c.mass_check_max_abs_err},
              {"coupling_cost_bound", c.coupling_cost_bound}};
}

TargetSpec parse_target_spec(const Json& j, const std::filesystem::path& base_dir) {
  const std::string type = [&] {
    const Json& t = field(j, "type", "target");
    if (!t.is_string()) bad("target.type", "expected a string");
    return t.get<std::string>();
  }();
  auto dim = [&](const char* name) {
    const std::size_t d = count(field(j, name, "target"), std::string("target.") + name);
    if (d == 0) bad(std::string("target.") + name, "must be at least 1");
    return d;
  };

  if (type == "uniform_cube") {
    const std::size_t d = dim("d");
    return {Json{{"type", type}, {"d", d}}, TargetSampler::uniform_cube(d)};
  }
  if (type == "gaussian") {
    const std::size_t d = dim("d");
    return {Json{{"type", type}, {"d", d}}, TargetSampler::gaussian(d)};
  }
  if (type == "uniform_sphere") {
    const std::size_t s = dim("s");
    const std::size_t d = dim("d");
    const double radius = j.contains("radius") ? number(j["radius"], "target.radius") : 1.0;
    if (s + 1 > d) bad("target.s", "an s-sphere needs ambient dimension at least s+1");
    if (!(radius > 0.0) || !std::isfinite(radius)) bad("target.radius", "must be positive");
    return {Json{{"type", type}, {"s", s}, {"d", d}, {"radius", radius}}, TargetSampler::uniform_sphere(s, d, radius)};
  }
  if (type == "discrete") {
    auto mu = measure_from_json(j);
    return {measure_to_json(mu), TargetSampler::discrete(mu)};
  }
  if (type == "empirical") {
    const Json& p = field(j, "path", "target");
    if (!p.is_string()) bad("target.path", "expected a string");
    std::filesystem::path path = p.get<std::string>();
    const std::filesystem::path resolved = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    return {Json{{"type", type}, {"path", p.get<std::string>()}}, load_empirical(resolved)};
  }
  if (type == "mixture") {
    const Json& comps = field(j, "components", "target");
    if (!comps.is_array() || comps.empty()) bad("target.components", "expected a nonempty array");
    auto w = numbers(field(j, "weights", "target"), "target.weights");
    if (w.size() != comps.size()) bad("target.weights", "needs one weight per component");
    std::vector<TargetSampler> parts;
    Json norm = Json::array();
    for (const auto& c : comps) {
      auto spec = parse_target_spec(c, base_dir);
      norm.push_back(spec.json);
      parts.push_back(std::move(spec.sampler));
    }
    auto sampler = TargetSampler::mixture(std::move(parts), w);
    return {Json{{"type", type}, {"components", std::move(norm)}, {"weights", w}}, std::move(sampler)};
  }
  bad("target.type", "unknown family '" + type + "'");
}

TargetSpec load_target_spec(const std::filesystem::path& path) {
  return parse_target_spec(read_json_file(path), path.parent_path());
}

}  // namespace gencap
