#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gencap/dimension.hpp"
#include "gencap/error.hpp"
#include "gencap/json_io.hpp"
#include "gencap/metrics.hpp"
#include "gencap/quantize.hpp"
#include "gencap/sweep.hpp"
#include "gencap/transport.hpp"

using namespace gencap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitRowFailures = 3;

bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::DimensionMismatch:
    case ErrorCode::EmptyMeasure:
    case ErrorCode::DomainError:
    case ErrorCode::ParseError:
    case ErrorCode::RaggedRows:
    case ErrorCode::BudgetTooSmall:
    case ErrorCode::TooManyBreakpoints:
    case ErrorCode::InfeasibleEpsilon:
    case ErrorCode::EpsilonBelowResolution:
    case ErrorCode::CapacityExceeded:
    case ErrorCode::SizeLimit:
    case ErrorCode::NotSingular:
    case ErrorCode::DegenerateGrid:
    case ErrorCode::InvalidConfig:
    case ErrorCode::IoError:
      return true;
    default:
      return false;
  }
}

void emit(const Json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(out, j);
  }
}

std::vector<NetworkBudget> parse_budgets(const std::string& text) {
  // "15x2,15x4" -> {(15,2), (15,4)}
  std::vector<NetworkBudget> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw Error(ErrorCode::InvalidConfig, "budget '" + item + "' is not WxL");
    try {
      out.push_back({std::stoul(item.substr(0, x)), std::stoul(item.substr(x + 1)), 2});
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, "budget '" + item + "' is not WxL");
    }
  }
  if (out.empty()) throw Error(ErrorCode::InvalidConfig, "no budgets given");
  return out;
}

DiscreteMeasure load_discrete(const std::string& path) {
  const auto spec = load_target_spec(path);
  if (spec.sampler.family() != TargetSampler::Family::Discrete) {
    throw Error(ErrorCode::InvalidConfig, path + ": expected a discrete measure (run discretize first)");
  }
  return measure_from_json(spec.json);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ReLU generators for discrete and low-dimensional targets"};
  app.require_subcommand(1);

  // synthesize
  auto* syn = app.add_subcommand("synthesize", "Build a ReLU generator for a discrete target");
  std::string syn_target, syn_source = "uniform:0,1", syn_out, syn_cert;
  double syn_eps = 0.0, syn_p = 1.0;
  std::size_t syn_W = 0, syn_L = 0;
  syn->add_option("--target", syn_target, "Discrete measure JSON")->required();
  syn->add_option("--source", syn_source, "Source law, e.g. uniform:0,1 or gaussian:0,1");
  syn->add_option("--eps", syn_eps, "Transport error (default: half the feasibility bound)");
  syn->add_option("--p", syn_p, "Wasserstein order");
  syn->add_option("--width", syn_W, "Width budget W")->required();
  syn->add_option("--depth", syn_L, "Depth budget L")->required();
  syn->add_option("--out", syn_out, "Network JSON output")->required();
  syn->add_option("--cert", syn_cert, "Certificate JSON output (default: stdout)");

  // discretize
  auto* dis = app.add_subcommand("discretize", "Quantize a target to at most n atoms");
  std::string dis_target, dis_method = "shells", dis_out;
  std::size_t dis_n = 64, dis_samples = 10000;
  double dis_p = 1.0, dis_q = 4.0;
  std::uint64_t dis_seed = 0;
  dis->add_option("--target", dis_target, "Target spec JSON")->required();
  dis->add_option("--n", dis_n, "Atom budget");
  dis->add_option("--p", dis_p, "Wasserstein order");
  dis->add_option("--q", dis_q, "Moment order");
  dis->add_option("--method", dis_method, "shells or cover")->check(CLI::IsMember({"shells", "cover"}));
  dis->add_option("--samples", dis_samples, "Target samples");
  dis->add_option("--seed", dis_seed, "Random seed");
  dis->add_option("--out", dis_out, "Measure JSON output (default: stdout)");

  // wasserstein
  auto* was = app.add_subcommand("wasserstein", "Exact W_p between two discrete measures");
  std::string was_a, was_b;
  double was_p = 1.0;
  was->add_option("--a", was_a, "Measure JSON")->required();
  was->add_option("--b", was_b, "Measure JSON")->required();
  was->add_option("--p", was_p, "Wasserstein order");

  // fdiv
  auto* fdv = app.add_subcommand("fdiv", "f-divergence between two discrete measures");
  std::string fdv_a, fdv_b, fdv_gen = "js";
  fdv->add_option("--a", fdv_a, "Measure JSON")->required();
  fdv->add_option("--b", fdv_b, "Measure JSON")->required();
  fdv->add_option("--gen", fdv_gen, "kl, reverse_kl, js, tv or chi2");

  // dimension
  auto* dim = app.add_subcommand("dimension", "Covering-number dimension estimates");
  std::string dim_target, dim_kind = "upper", dim_grid;
  std::size_t dim_samples = 10000;
  double dim_p = 2.0, dim_delta = 0.05;
  std::uint64_t dim_seed = 0;
  dim->add_option("--target", dim_target, "Target spec JSON")->required();
  dim->add_option("--samples", dim_samples, "Target samples");
  dim->add_option("--kind", dim_kind, "upper, lower or minkowski")
      ->check(CLI::IsMember({"upper", "lower", "minkowski"}));
  dim->add_option("--p", dim_p, "Order for the upper dimension");
  dim->add_option("--delta", dim_delta, "Mass allowance for the lower dimension");
  dim->add_option("--grid", dim_grid, "Comma separated, strictly decreasing radii");
  dim->add_option("--seed", dim_seed, "Random seed");

  // rate-sweep
  auto* swp = app.add_subcommand("rate-sweep", "Approximation error against network size");
  std::string swp_config, swp_out;
  std::uint64_t swp_seed = 0;
  auto* swp_seed_opt = swp->add_option("--seed", swp_seed, "Override the config seed");
  swp->add_option("--config", swp_config, "Sweep config JSON")->required();
  swp->add_option("--out", swp_out, "CSV output (overrides the config)");

  // circle-demo
  auto* cir = app.add_subcommand("circle-demo", "W_1 shrinks while JS stays at ln 2");
  std::string cir_budgets = "15x2,15x4,15x8,15x16", cir_out;
  std::uint64_t cir_seed = 0;
  cir->add_option("--budgets", cir_budgets, "Comma separated WxL list");
  cir->add_option("--seed", cir_seed, "Random seed");
  cir->add_option("--out", cir_out, "CSV output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*syn) {
      const auto target = load_discrete(syn_target);
      const auto source = SourceDistribution::parse(syn_source);
      std::optional<double> eps;
      if (syn->count("--eps")) eps = syn_eps;
      const auto gen = synthesize_network(target, source, eps, syn_p, NetworkBudget{syn_W, syn_L, target.dim()});
      write_json_file(syn_out, network_to_json(gen.network));
      emit(certificate_to_json(gen.transport.certificate), syn_cert);
    } else if (*dis) {
      const auto spec = load_target_spec(dis_target);
      const auto samples = spec.sampler.sample(dis_samples, dis_seed);
      const double m_q = empirical_moment(samples, dis_q);
      const auto nu = dis_method == "shells" ? quantize_shells(samples, dis_n, dis_p, dis_q, m_q)
                                             : quantize_cover(samples, dis_n, dis_p, dis_q, m_q);
      emit(measure_to_json(nu), dis_out);
    } else if (*was) {
      const auto a = load_discrete(was_a);
      const auto b = load_discrete(was_b);
      const auto r = wasserstein_discrete(a, b, was_p);
      emit(Json{{"value", r.value}, {"dual_gap", r.plan.dual_gap}, {"plan_nnz", r.plan.entries.size()}}, "");
    } else if (*fdv) {
      const auto a = load_discrete(fdv_a);
      const auto b = load_discrete(fdv_b);
      const double v = f_divergence(a, b, generator(fdv_gen));
      emit(Json{{"generator", fdv_gen}, {"value", std::isinf(v) ? Json("inf") : Json(v)}}, "");
    } else if (*dim) {
      const auto spec = load_target_spec(dim_target);
      const auto samples = spec.sampler.sample(dim_samples, dim_seed);
      std::vector<double> grid;
      if (dim_grid.empty()) {
        grid = default_grid(samples);
      } else {
        std::stringstream ss(dim_grid);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
          try {
            grid.push_back(std::stod(cell));
          } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "grid entry '" + cell + "' is not a number");
          }
        }
      }
      const auto kind = parse_dimension_kind(dim_kind);
      const auto est = kind == DimensionKind::UpperP  ? estimate_upper_dimension(samples, dim_p, grid)
                       : kind == DimensionKind::Lower ? estimate_lower_dimension(samples, dim_delta, grid)
                                                      : estimate_minkowski(samples, grid);
      emit(Json{{"kind", to_string(est.kind)},
                {"parameter", est.parameter},
                {"grid", est.grid},
                {"counts", est.counts},
                {"raw_counts", est.raw_counts},
                {"slope", est.value},
                {"residual", est.residual},
                {"degenerate", est.degenerate}},
           "");
    } else if (*swp) {
      auto cfg = load_sweep_config(swp_config);
      if (swp_seed_opt->count()) cfg.seed = swp_seed;
      if (!swp_out.empty()) cfg.out = swp_out;
      const auto res = rate_sweep(cfg);
      if (cfg.out.empty()) {
        std::cout << format_sweep_csv(res.rows);
      } else {
        write_sweep_csv(cfg.out, res.rows);
      }
      Json summary{{"rows", res.rows.size()}, {"slope_defined", res.fit.defined}};
      if (res.fit.defined) {
        summary["slope"] = res.fit.slope;
        summary["residual"] = res.fit.residual;
      }
      Json errs = Json::array();
      for (std::size_t i = 0; i < res.errors.size(); ++i) {
        if (!res.errors[i].empty()) errs.push_back({{"row", i}, {"error", res.errors[i]}});
      }
      summary["failures"] = errs;
      std::cerr << summary.dump(2) << '\n';
      return res.any_failed() ? kExitRowFailures : kExitOk;
    } else if (*cir) {
      const auto rows = circle_fdiv_demo(parse_budgets(cir_budgets), cir_seed);
      const std::string csv = format_circle_csv(rows);
      if (cir_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(cir_out) << csv;
      }
      bool failed = false;
      for (const auto& r : rows) {
        if (!r.error.empty()) {
          std::cerr << "W=" << r.W << " L=" << r.L << ": " << r.error << '\n';
          failed = true;
        }
      }
      return failed ? kExitRowFailures : kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_input_error(e.code()) ? kExitInvalid : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
