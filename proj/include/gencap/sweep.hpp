#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gencap/compiler.hpp"
#include "gencap/json_io.hpp"
#include "gencap/measures.hpp"
#include "gencap/metrics.hpp"

namespace gencap {

enum class QuantizeMethod { Shells, Cover };

struct SweepConfig {
  TargetSpec target;
  SourceDistribution source = SourceDistribution::uniform(0.0, 1.0);
  double p = 1.0;
  double q = 10.0;
  std::vector<NetworkBudget> budgets;  // sorted by W^2 L
  // batch_a target samples against batch_b generator samples per rep. The
  // generator output is snapped to a 1e-7 grid by default so repeated
  // plateau values collapse into single atoms.
  McOptions mc{1000, 1000, 10, 1e-7};
  std::size_t target_samples = 10000;
  std::uint64_t seed = 0;
  QuantizeMethod method = QuantizeMethod::Shells;
  double eps_fraction = 0.05;  // epsilon as a fraction of the feasibility bound
  std::filesystem::path out;
};

/// Required fields: target, p, q, budgets. Errors are Error(InvalidConfig)
/// whose message starts with "<origin>: field '<name>'".
SweepConfig parse_sweep_config(const Json& j, const std::string& origin = "config",
                               const std::filesystem::path& base_dir = {});
SweepConfig load_sweep_config(const std::filesystem::path& path);
/// Normalized form: every field present, budgets sorted.
Json sweep_config_to_json(const SweepConfig& cfg);

struct SweepRow {
  std::size_t W = 0;
  std::size_t L = 0;
  std::size_t capacity = 0;
  std::size_t atoms = 0;
  double wp = 0.0;  // NaN for a failed row
  double ci = 0.0;
  double eps = 0.0;
  double seconds = 0.0;

  double complexity() const { return static_cast<double>(W) * static_cast<double>(W) * static_cast<double>(L); }
  bool ok() const;
};

/// Field-wise equality; NaN compares equal to NaN.
bool same_row(const SweepRow& a, const SweepRow& b, bool compare_time = true);

struct SlopeFit {
  bool defined = false;  // false when fewer than two positive finite rows remain
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log-log residuals
  std::size_t used = 0;
};

/// Least squares of log wp against log(W^2 L) over the successful rows. The
/// smallest budget is dropped when five or more budgets are present.
SlopeFit fit_slope(const std::vector<SweepRow>& rows);

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> errors;  // per row, empty on success
  SlopeFit fit;
  bool any_failed() const;
};

/// One row: quantize target samples to the budget's capacity, synthesize the
/// generator and estimate W_p(target, generator) by Monte-Carlo.
SweepRow run_sweep_row(const SweepConfig& cfg, std::size_t index);
SweepResult rate_sweep(const SweepConfig& cfg);

inline constexpr const char* kSweepCsvHeader = "W,L,capacity,atoms,wp,ci,eps,seconds";
std::string format_sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

struct CircleDemoOptions {
  std::size_t target_samples = 10000;
  McOptions mc{1000, 1000, 10, 1e-7};
  double eps_fraction = 0.05;
  std::size_t support_samples = 2000;  // generator and circle draws for the divergence
};

struct CircleDemoRow {
  std::size_t W = 0;
  std::size_t L = 0;
  double complexity = 0.0;  // W^2 L
  std::size_t atoms = 0;
  double w1 = 0.0;
  double ci = 0.0;
  double js = 0.0;
  std::string error;
};

/// Unit circle in R^2 against generators of growing size: W_1 shrinks while
/// the Jensen-Shannon divergence between sampled supports stays at ln 2.
std::vector<CircleDemoRow> circle_fdiv_demo(const std::vector<NetworkBudget>& budgets, std::uint64_t seed,
                                            const CircleDemoOptions& opt = {});
std::string format_circle_csv(const std::vector<CircleDemoRow>& rows);

}  // namespace gencap
