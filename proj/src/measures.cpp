#include "gencap/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "gencap/detail/numfmt.hpp"
#include "gencap/error.hpp"

namespace gencap {

namespace {

struct LexLess {
  bool operator()(const std::vector<double>& a, const std::vector<double>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

}  // namespace

DiscreteMeasure DiscreteMeasure::make(const PointSet& atoms, std::span<const double> weights) {
  if (atoms.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(atoms.size()) + " atoms but " +
                                                  std::to_string(weights.size()) + " weights");
  }
  if (atoms.empty()) throw Error(ErrorCode::EmptyMeasure, "no atoms");
  for (double c : atoms.coords()) {
    if (!std::isfinite(c)) throw Error(ErrorCode::DomainError, "non-finite atom coordinate");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw Error(ErrorCode::DomainError, "weights must be finite and nonnegative");
    total += w;
  }
  if (total <= 0.0) throw Error(ErrorCode::EmptyMeasure, "all weights are zero");

  // Merge exact duplicates; the first occurrence keeps its slot.
  std::map<std::vector<double>, std::size_t, LexLess> seen;
  std::vector<std::size_t> slot_of_first;
  std::vector<double> merged;
  std::vector<std::size_t> source_row;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (weights[i] == 0.0) continue;
    auto r = atoms[i];
    std::vector<double> key(r.begin(), r.end());
    for (double& k : key) {
      if (k == 0.0) k = 0.0;  // -0 and +0 are the same point
    }
    auto [it, inserted] = seen.emplace(std::move(key), merged.size());
    if (inserted) {
      merged.push_back(weights[i]);
      source_row.push_back(i);
    } else {
      merged[it->second] += weights[i];
    }
  }

  DiscreteMeasure m;
  m.atoms_ = PointSet(atoms.dim());
  m.atoms_.reserve(source_row.size());
  for (std::size_t i : source_row) m.atoms_.push_back(atoms[i]);
  double sum = 0.0;
  for (double w : merged) sum += w;
  // Renormalize only when needed so that make(make(x)) == make(x) bit for bit.
  if (std::abs(sum - 1.0) > 1e-12) {
    for (double& w : merged) w /= sum;
  }
  m.weights_ = std::move(merged);
  return m;
}

DiscreteMeasure DiscreteMeasure::make(const std::vector<std::vector<double>>& atoms,
                                      const std::vector<double>& weights) {
  if (atoms.empty()) throw Error(ErrorCode::EmptyMeasure, "no atoms");
  const std::size_t d = atoms.front().size();
  for (const auto& a : atoms) {
    if (a.size() != d) throw Error(ErrorCode::DimensionMismatch, "atoms have differing lengths");
  }
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "atoms of dimension 0");
  return make(PointSet::from_rows(atoms), weights);
}

DiscreteMeasure DiscreteMeasure::uniform(const PointSet& points) {
  std::vector<double> w(points.size(), 1.0);
  return make(points, w);
}

DiscreteMeasure DiscreteMeasure::dirac(std::span<const double> point) {
  PointSet p(point.size());
  p.push_back(point);
  const double w = 1.0;
  return make(p, std::span<const double>(&w, 1));
}

// ---------------------------------------------------------------------------

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

double acklam(double u) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double lo = 0.02425;
  if (u < lo) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (u > 1.0 - lo) {
    const double q = std::sqrt(-2.0 * std::log1p(-u));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double standard_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorCode::DomainError, "quantile level must lie in (0,1)");
  // 1 - u is exact here, and the lower tail keeps full relative precision.
  if (u > 0.5) return -standard_normal_quantile(1.0 - u);
  double x = acklam(u);
  // Halley refinement against the erfc-based CDF.  The rational stage is
  // good to ~1e-9 relative; one step brings it to round-off.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
  const double g = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= g / (1.0 + 0.5 * x * g);
  return x;
}

SourceDistribution SourceDistribution::uniform(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
    throw Error(ErrorCode::DomainError, "uniform source needs finite a < b");
  }
  return SourceDistribution(Family::Uniform, a, b);
}

SourceDistribution SourceDistribution::gaussian(double mean, double stddev) {
  if (!std::isfinite(mean) || !std::isfinite(stddev) || !(stddev > 0.0)) {
    throw Error(ErrorCode::DomainError, "gaussian source needs a finite mean and stddev > 0");
  }
  return SourceDistribution(Family::Gaussian, mean, stddev);
}

SourceDistribution SourceDistribution::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::string_view rest(text);
    rest.remove_prefix(colon + 1);
    std::size_t col = 0;
    while (true) {
      const auto comma = rest.find(',');
      auto v = detail::parse_double(rest.substr(0, comma));
      if (!v) throw ParseError(1, col + 1, "bad source parameter in '" + text + "'");
      args.push_back(*v);
      ++col;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  if (name == "uniform") {
    if (args.empty()) return uniform(0.0, 1.0);
    if (args.size() != 2) throw Error(ErrorCode::InvalidConfig, "uniform source takes two parameters a,b");
    return uniform(args[0], args[1]);
  }
  if (name == "gaussian" || name == "normal") {
    if (args.empty()) return gaussian(0.0, 1.0);
    if (args.size() != 2) throw Error(ErrorCode::InvalidConfig, "gaussian source takes two parameters mean,stddev");
    return gaussian(args[0], args[1]);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown source family '" + name + "'");
}

double SourceDistribution::cdf(double x) const {
  if (family_ == Family::Uniform) {
    if (x <= first_) return 0.0;
    if (x >= second_) return 1.0;
    return (x - first_) / (second_ - first_);
  }
  return standard_normal_cdf((x - first_) / second_);
}

double SourceDistribution::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorCode::DomainError, "quantile level must lie in (0,1)");
  if (family_ == Family::Uniform) return first_ + u * (second_ - first_);
  return first_ + second_ * standard_normal_quantile(u);
}

double SourceDistribution::sample(Rng& rng) const { return quantile(uniform_open(rng)); }

std::vector<double> SourceDistribution::sample(std::size_t n, std::uint64_t seed) const {
  Rng rng = make_rng(seed);
  std::vector<double> out(n);
  for (auto& z : out) z = sample(rng);
  return out;
}

std::string SourceDistribution::to_string() const {
  return std::string(family_ == Family::Uniform ? "uniform:" : "gaussian:") + detail::format_double(first_) +
         "," + detail::format_double(second_);
}

// ---------------------------------------------------------------------------

TargetSampler TargetSampler::uniform_cube(std::size_t d) {
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "dimension must be at least 1");
  TargetSampler t;
  t.family_ = Family::UniformCube;
  t.dim_ = d;
  t.intrinsic_ = d;
  return t;
}

TargetSampler TargetSampler::uniform_sphere(std::size_t s, std::size_t d, double radius) {
  if (s + 1 > d) throw Error(ErrorCode::DimensionMismatch, "an s-sphere needs ambient dimension >= s+1");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorCode::DomainError, "radius must be positive");
  TargetSampler t;
  t.family_ = Family::UniformSphere;
  t.dim_ = d;
  t.intrinsic_ = s;
  t.radius_ = radius;
  return t;
}

TargetSampler TargetSampler::gaussian(std::size_t d) {
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "dimension must be at least 1");
  TargetSampler t;
  t.family_ = Family::Gaussian;
  t.dim_ = d;
  t.intrinsic_ = d;
  return t;
}

TargetSampler TargetSampler::mixture(std::vector<TargetSampler> components, std::vector<double> weights) {
  if (components.empty()) throw Error(ErrorCode::EmptyMeasure, "mixture without components");
  if (components.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "mixture needs one weight per component");
  }
  TargetSampler t;
  t.family_ = Family::Mixture;
  t.dim_ = components.front().dim();
  double total = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].dim() != t.dim_) throw Error(ErrorCode::DimensionMismatch, "mixture components differ in dimension");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw Error(ErrorCode::DomainError, "bad mixture weight");
    total += weights[i];
    t.intrinsic_ = std::max(t.intrinsic_, components[i].intrinsic_dim());
  }
  if (total <= 0.0) throw Error(ErrorCode::EmptyMeasure, "mixture weights are all zero");
  double acc = 0.0;
  for (double& w : weights) {
    w /= total;
    acc += w;
    t.cumulative_.push_back(acc);
  }
  t.cumulative_.back() = 1.0;
  t.components_ = std::move(components);
  t.weights_ = std::move(weights);
  return t;
}

TargetSampler TargetSampler::empirical(PointSet points) {
  if (points.empty()) throw Error(ErrorCode::EmptyMeasure, "empirical target without points");
  TargetSampler t;
  t.family_ = Family::Empirical;
  t.dim_ = points.dim();
  t.intrinsic_ = 0;
  t.points_ = std::move(points);
  return t;
}

TargetSampler TargetSampler::discrete(const DiscreteMeasure& measure) {
  TargetSampler t;
  t.family_ = Family::Discrete;
  t.dim_ = measure.dim();
  t.intrinsic_ = 0;
  t.points_ = measure.atoms();
  t.weights_.assign(measure.weights().begin(), measure.weights().end());
  double acc = 0.0;
  for (double w : t.weights_) {
    acc += w;
    t.cumulative_.push_back(acc);
  }
  t.cumulative_.back() = 1.0;
  return t;
}

namespace {

std::size_t pick(std::span<const double> cumulative, double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace

void TargetSampler::draw(Rng& rng, std::span<double> out) const {
  switch (family_) {
    case Family::UniformCube:
      for (double& x : out) x = uniform_open(rng);
      return;
    case Family::Gaussian:
      for (double& x : out) x = standard_normal_quantile(uniform_open(rng));
      return;
    case Family::UniformSphere: {
      std::fill(out.begin(), out.end(), 0.0);
      double r2 = 0.0;
      do {
        r2 = 0.0;
        for (std::size_t k = 0; k <= intrinsic_; ++k) {
          out[k] = standard_normal_quantile(uniform_open(rng));
          r2 += out[k] * out[k];
        }
      } while (r2 < 1e-300);
      const double scale = radius_ / std::sqrt(r2);
      for (std::size_t k = 0; k <= intrinsic_; ++k) out[k] *= scale;
      return;
    }
    case Family::Mixture:
      components_[pick(cumulative_, uniform_open(rng))].draw(rng, out);
      return;
    case Family::Empirical: {
      const auto n = points_.size();
      auto i = static_cast<std::size_t>(uniform_open(rng) * static_cast<double>(n));
      if (i >= n) i = n - 1;
      auto r = points_[i];
      std::copy(r.begin(), r.end(), out.begin());
      return;
    }
    case Family::Discrete: {
      auto r = points_[pick(cumulative_, uniform_open(rng))];
      std::copy(r.begin(), r.end(), out.begin());
      return;
    }
  }
}

PointSet TargetSampler::sample(std::size_t n, std::uint64_t seed) const {
  Rng rng = make_rng(seed);
  PointSet out(dim_);
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) draw(rng, out.row(i));
  return out;
}

PointSampler as_point_sampler(const TargetSampler& sampler) {
  return [sampler](std::size_t n, std::uint64_t seed) { return sampler.sample(n, seed); };
}

double empirical_moment(const PointSet& samples, double q) {
  if (!(q >= 1.0)) throw Error(ErrorCode::DomainError, "moment order must be >= 1");
  if (samples.empty()) throw Error(ErrorCode::EmptyMeasure, "no samples");
  double s = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) s += std::pow(norm(samples[i]), q);
  return std::pow(s / static_cast<double>(samples.size()), 1.0 / q);
}

MomentProfile estimate_moment(const TargetSampler& sampler, double q, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::DomainError, "need at least one draw");
  MomentProfile m;
  m.q = q;
  m.m_q = empirical_moment(sampler.sample(n, seed), q);
  m.sample_count = n;
  return m;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<double>> parse_table(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<double> row;
    std::size_t col = 0;
    while (true) {
      const auto comma = line.find(',');
      ++col;
      auto v = detail::parse_double(line.substr(0, comma));
      if (!v) throw ParseError(line_no, col, "not a number: '" + std::string(detail::trim(line.substr(0, comma))) + "'");
      row.push_back(*v);
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::RaggedRows, "row " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                                             " columns, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

PointSet parse_points_csv(const std::string& text) {
  auto rows = parse_table(text);
  if (rows.empty()) return PointSet();
  return PointSet::from_rows(rows);
}

PointSet read_points_csv(const std::filesystem::path& path) { return parse_points_csv(slurp(path)); }

std::string format_points_csv(const PointSet& points) {
  std::string out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto r = points[i];
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out += ',';
      out += detail::format_double(r[k]);
    }
    out += '\n';
  }
  return out;
}

void write_points_csv(const std::filesystem::path& path, const PointSet& points) {
  spit(path, format_points_csv(points));
}

TargetSampler load_empirical(const std::filesystem::path& path) {
  auto pts = read_points_csv(path);
  if (pts.empty()) throw Error(ErrorCode::EmptyMeasure, path.string() + " contains no points");
  return TargetSampler::empirical(std::move(pts));
}

void save_measure_csv(const std::filesystem::path& path, const DiscreteMeasure& measure) {
  std::string out;
  for (std::size_t i = 0; i < measure.size(); ++i) {
    for (double c : measure.atoms()[i]) {
      out += detail::format_double(c);
      out += ',';
    }
    out += detail::format_double(measure.weights()[i]);
    out += '\n';
  }
  spit(path, out);
}

DiscreteMeasure load_measure_csv(const std::filesystem::path& path) {
  auto rows = parse_table(slurp(path));
  if (rows.empty()) throw Error(ErrorCode::EmptyMeasure, path.string() + " contains no atoms");
  if (rows.front().size() < 2) throw Error(ErrorCode::DimensionMismatch, "measure rows need coordinates and a weight");
  PointSet atoms(rows.front().size() - 1);
  std::vector<double> w;
  for (auto& r : rows) {
    w.push_back(r.back());
    r.pop_back();
    atoms.push_back(r);
  }
  return DiscreteMeasure::make(atoms, w);
}

}  // namespace gencap
