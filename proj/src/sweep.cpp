#include "gencap/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gencap/detail/numfmt.hpp"
#include "gencap/error.hpp"
#include "gencap/quantize.hpp"
#include "gencap/transport.hpp"

namespace gencap {

namespace {

class ConfigReader {
 public:
  ConfigReader(const Json& j, std::string origin) : j_(j), origin_(std::move(origin)) {
    if (!j_.is_object()) fail("", "expected a JSON object");
  }

  [[noreturn]] void fail(const std::string& name, const std::string& what) const {
    throw Error(ErrorCode::InvalidConfig,
                origin_ + (name.empty() ? std::string() : ": field '" + name + "'") + ": " + what);
  }

  const Json* find(const Json& obj, const std::string& name) const {
    auto it = obj.find(name);
    return it == obj.end() ? nullptr : &*it;
  }

  const Json& require(const std::string& name) const {
    const Json* v = find(j_, name);
    if (!v) fail(name, "missing");
    return *v;
  }

  double real(const Json& v, const std::string& name) const {
    if (!v.is_number()) fail(name, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(name, "must be finite");
    return x;
  }

  std::size_t whole(const Json& v, const std::string& name) const {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(name, "expected a nonnegative integer");
    return v.get<std::size_t>();
  }

  const Json& root() const { return j_; }

 private:
  const Json& j_;
  std::string origin_;
};

std::uint64_t row_seed(std::uint64_t seed, std::size_t index) { return seed + index; }

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

SweepConfig parse_sweep_config(const Json& j, const std::string& origin, const std::filesystem::path& base_dir) {
  ConfigReader r(j, origin);
  SweepConfig cfg;

  try {
    cfg.target = parse_target_spec(r.require("target"), base_dir);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw;
    r.fail("target", e.what());
  }
  const std::size_t d = cfg.target.sampler.dim();

  if (const Json* s = r.find(j, "source")) {
    if (!s->is_string()) r.fail("source", "expected a string such as \"uniform:0,1\"");
    try {
      cfg.source = SourceDistribution::parse(s->get<std::string>());
    } catch (const Error& e) {
      r.fail("source", e.what());
    }
  }

  cfg.p = r.real(r.require("p"), "p");
  cfg.q = r.real(r.require("q"), "q");
  if (!(cfg.p >= 1.0)) r.fail("p", "must be at least 1");
  if (!(cfg.q > cfg.p)) r.fail("q", "must exceed p");

  const Json& budgets = r.require("budgets");
  if (!budgets.is_array() || budgets.empty()) r.fail("budgets", "expected a nonempty array of [W, L] pairs");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    const std::string name = "budgets[" + std::to_string(i) + "]";
    const Json& b = budgets[i];
    NetworkBudget nb{0, 0, d};
    if (b.is_array() && b.size() == 2) {
      nb.W = r.whole(b[0], name + "[0]");
      nb.L = r.whole(b[1], name + "[1]");
    } else if (b.is_object()) {
      nb.W = r.whole(b.contains("W") ? b["W"] : Json(), name + ".W");
      nb.L = r.whole(b.contains("L") ? b["L"] : Json(), name + ".L");
    } else {
      r.fail(name, "expected [W, L] or {\"W\":..,\"L\":..}");
    }
    try {
      validate_budget(nb);
    } catch (const Error& e) {
      r.fail(name, e.what());
    }
    cfg.budgets.push_back(nb);
  }
  std::stable_sort(cfg.budgets.begin(), cfg.budgets.end(), [](const NetworkBudget& a, const NetworkBudget& b) {
    return a.W * a.W * a.L < b.W * b.W * b.L;
  });

  if (const Json* mc = r.find(j, "mc")) {
    if (!mc->is_object()) r.fail("mc", "expected an object");
    if (const Json* v = r.find(*mc, "batch_a")) cfg.mc.batch_a = r.whole(*v, "mc.batch_a");
    if (const Json* v = r.find(*mc, "batch_b")) cfg.mc.batch_b = r.whole(*v, "mc.batch_b");
    if (const Json* v = r.find(*mc, "batch")) cfg.mc.batch_a = cfg.mc.batch_b = r.whole(*v, "mc.batch");
    if (const Json* v = r.find(*mc, "reps")) cfg.mc.reps = r.whole(*v, "mc.reps");
    if (const Json* v = r.find(*mc, "snap")) cfg.mc.snap = r.real(*v, "mc.snap");
  }
  if (cfg.mc.batch_a == 0) r.fail("mc.batch_a", "must be positive");
  if (cfg.mc.batch_b == 0) r.fail("mc.batch_b", "must be positive");
  if (cfg.mc.reps < 3) r.fail("mc.reps", "must be at least 3");
  if (cfg.mc.snap < 0.0) r.fail("mc.snap", "must be nonnegative");

  if (const Json* v = r.find(j, "target_samples")) cfg.target_samples = r.whole(*v, "target_samples");
  if (cfg.target_samples == 0) r.fail("target_samples", "must be positive");
  if (const Json* v = r.find(j, "seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      r.fail("seed", "expected a nonnegative integer");
    }
    cfg.seed = v->get<std::uint64_t>();
  }
  if (const Json* v = r.find(j, "method")) {
    const std::string m = v->is_string() ? v->get<std::string>() : "";
    if (m == "shells") {
      cfg.method = QuantizeMethod::Shells;
    } else if (m == "cover") {
      cfg.method = QuantizeMethod::Cover;
    } else {
      r.fail("method", "expected \"shells\" or \"cover\"");
    }
  }
  if (const Json* v = r.find(j, "eps_fraction")) cfg.eps_fraction = r.real(*v, "eps_fraction");
  if (!(cfg.eps_fraction > 0.0 && cfg.eps_fraction < 1.0)) r.fail("eps_fraction", "must lie in (0, 1)");
  if (const Json* v = r.find(j, "out")) {
    if (!v->is_string()) r.fail("out", "expected a path string");
    cfg.out = v->get<std::string>();
  }
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = read_json_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return parse_sweep_config(j, path.string(), path.parent_path());
}

Json sweep_config_to_json(const SweepConfig& cfg) {
  Json budgets = Json::array();
  for (const auto& b : cfg.budgets) budgets.push_back({b.W, b.L});
  return Json{{"target", cfg.target.json},
              {"source", cfg.source.to_string()},
              {"p", cfg.p},
              {"q", cfg.q},
              {"budgets", std::move(budgets)},
              {"mc", {{"batch_a", cfg.mc.batch_a}, {"batch_b", cfg.mc.batch_b}, {"reps", cfg.mc.reps}, {"snap", cfg.mc.snap}}},
              {"target_samples", cfg.target_samples},
              {"seed", cfg.seed},
              {"method", cfg.method == QuantizeMethod::Shells ? "shells" : "cover"},
              {"eps_fraction", cfg.eps_fraction},
              {"out", cfg.out.string()}};
}

bool SweepRow::ok() const { return std::isfinite(wp); }

bool same_row(const SweepRow& a, const SweepRow& b, bool compare_time) {
  return a.W == b.W && a.L == b.L && a.capacity == b.capacity && a.atoms == b.atoms && same_double(a.wp, b.wp) &&
         same_double(a.ci, b.ci) && same_double(a.eps, b.eps) && (!compare_time || same_double(a.seconds, b.seconds));
}

SlopeFit fit_slope(const std::vector<SweepRow>& rows) {
  std::vector<const SweepRow*> order;
  for (const auto& r : rows) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(),
                   [](const SweepRow* a, const SweepRow* b) { return a->complexity() < b->complexity(); });
  if (order.size() >= 5) order.erase(order.begin());

  std::vector<double> xs, ys;
  for (const SweepRow* r : order) {
    if (r->ok() && r->wp > 0.0) {
      xs.push_back(std::log(r->complexity()));
      ys.push_back(std::log(r->wp));
    }
  }
  SlopeFit fit;
  fit.used = xs.size();
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) return fit;
  fit.defined = true;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

bool SweepResult::any_failed() const {
  return std::any_of(errors.begin(), errors.end(), [](const std::string& e) { return !e.empty(); });
}

namespace {

struct RowArtifacts {
  DiscreteMeasure quantized;
  Generator generator;
  double eps;
};

RowArtifacts build_generator(const TargetSampler& target, const SourceDistribution& source, const NetworkBudget& b,
                             double p, double q, QuantizeMethod method, std::size_t target_samples,
                             double eps_fraction, std::uint64_t seed) {
  const std::size_t cap = budget_max_atoms(b);
  const PointSet samples = target.sample(target_samples, mix_seed(seed));
  const double m_q = empirical_moment(samples, q);
  DiscreteMeasure nu = method == QuantizeMethod::Shells ? quantize_shells(samples, cap, p, q, m_q)
                                                        : quantize_cover(samples, cap, p, q, m_q);
  const auto plan = make_plan_spec(nu, source, p, std::nullopt);
  const double eps = nu.size() > 1 ? eps_fraction * feasibility_sup(plan.target, p) : plan.epsilon;
  Generator g = synthesize_network(nu, source, eps, p, b);
  return {std::move(nu), std::move(g), eps};
}

PointSampler generator_sampler(const ReluNetwork& net, const SourceDistribution& source) {
  return [&net, source](std::size_t n, std::uint64_t seed) { return pushforward_sample(net, source, n, seed); };
}

}  // namespace

SweepRow run_sweep_row(const SweepConfig& cfg, std::size_t index) {
  const auto t0 = std::chrono::steady_clock::now();
  const NetworkBudget& b = cfg.budgets.at(index);
  SweepRow row;
  row.W = b.W;
  row.L = b.L;
  row.capacity = budget_max_atoms(b);
  const std::uint64_t seed = row_seed(cfg.seed, index);
  auto art = build_generator(cfg.target.sampler, cfg.source, b, cfg.p, cfg.q, cfg.method, cfg.target_samples,
                             cfg.eps_fraction, seed);
  row.atoms = art.quantized.size();
  row.eps = art.eps;
  const auto est = wasserstein_mc(as_point_sampler(cfg.target.sampler),
                                  generator_sampler(art.generator.network, cfg.source), cfg.p, cfg.mc,
                                  mix_seed(seed + 1));
  row.wp = est.estimate;
  row.ci = est.ci_halfwidth;
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

SweepResult rate_sweep(const SweepConfig& cfg) {
  SweepResult res;
  for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
    try {
      res.rows.push_back(run_sweep_row(cfg, i));
      res.errors.emplace_back();
    } catch (const std::exception& e) {
      SweepRow row;
      row.W = cfg.budgets[i].W;
      row.L = cfg.budgets[i].L;
      row.capacity = budget_max_atoms(cfg.budgets[i]);
      row.wp = row.ci = row.eps = std::nan("");
      res.rows.push_back(row);
      res.errors.emplace_back(e.what());
    }
  }
  res.fit = fit_slope(res.rows);
  return res;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  using detail::format_double;
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.W << ',' << r.L << ',' << r.capacity << ',' << r.atoms << ',' << format_double(r.wp) << ','
       << format_double(r.ci) << ',' << format_double(r.eps) << ',' << format_double(r.seconds) << '\n';
  }
  return os.str();
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line) || detail::trim(line) != kSweepCsvHeader) {
    throw ParseError(1, 1, std::string("expected header ") + kSweepCsvHeader);
  }
  ++lineno;
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw ParseError(lineno, cells.size(), "expected 8 columns");
    auto num = [&](std::size_t c) {
      auto v = detail::parse_double(cells[c]);
      if (!v) throw ParseError(lineno, c + 1, "not a number: '" + cells[c] + "'");
      return *v;
    };
    auto whole = [&](std::size_t c) {
      const double v = num(c);
      if (!(v >= 0.0) || v != std::floor(v)) throw ParseError(lineno, c + 1, "expected a nonnegative integer");
      return static_cast<std::size_t>(v);
    };
    SweepRow r;
    r.W = whole(0);
    r.L = whole(1);
    r.capacity = whole(2);
    r.atoms = whole(3);
    r.wp = num(4);
    r.ci = num(5);
    r.eps = num(6);
    r.seconds = num(7);
    rows.push_back(r);
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << format_sweep_csv(rows);
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::vector<CircleDemoRow> circle_fdiv_demo(const std::vector<NetworkBudget>& budgets, std::uint64_t seed,
                                            const CircleDemoOptions& opt) {
  const TargetSampler circle = TargetSampler::uniform_sphere(1, 2, 1.0);
  const SourceDistribution source = SourceDistribution::uniform(0.0, 1.0);
  const auto& js = generator(Divergence::JS);
  std::vector<CircleDemoRow> rows;
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    NetworkBudget b = budgets[i];
    b.d = 2;
    CircleDemoRow row;
    row.W = b.W;
    row.L = b.L;
    row.complexity = static_cast<double>(b.W) * static_cast<double>(b.W) * static_cast<double>(b.L);
    const std::uint64_t s = row_seed(seed, i);
    try {
      validate_budget(b);
      auto art = build_generator(circle, source, b, 1.0, 10.0, QuantizeMethod::Shells, opt.target_samples,
                                 opt.eps_fraction, s);
      row.atoms = art.quantized.size();
      const auto& net = art.generator.network;
      const auto est = wasserstein_mc(as_point_sampler(circle), generator_sampler(net, source), 1.0, opt.mc,
                                      mix_seed(s + 1));
      row.w1 = est.estimate;
      row.ci = est.ci_halfwidth;
      // Supports compared atom by atom: generator draws lie on segments
      // between quantizer atoms, circle draws on the circle.
      const auto gen = DiscreteMeasure::uniform(pushforward_sample(net, source, opt.support_samples, mix_seed(s + 2)));
      const auto cir = DiscreteMeasure::uniform(circle.sample(opt.support_samples, mix_seed(s + 3)));
      row.js = singularity_gap(gen, cir, js);
    } catch (const std::exception& e) {
      row.w1 = row.ci = row.js = std::nan("");
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_circle_csv(const std::vector<CircleDemoRow>& rows) {
  using detail::format_double;
  std::ostringstream os;
  os << "W,L,complexity,atoms,w1,ci,js\n";
  for (const auto& r : rows) {
    os << r.W << ',' << r.L << ',' << format_double(r.complexity) << ',' << r.atoms << ',' << format_double(r.w1)
       << ',' << format_double(r.ci) << ',' << format_double(r.js) << '\n';
  }
  return os.str();
}

}  // namespace gencap
