#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gencap/cpwl.hpp"
#include "gencap/measures.hpp"
#include "gencap/network.hpp"
#include "gencap/transport.hpp"

namespace gencap {

using Json = nlohmann::json;

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

/// {"layers":[{"weights":[[...]],"bias":[...]}...], "activation":"relu"};
/// the output layer carries "linear":true. Doubles are written with
/// round-trip precision, so load(save(net)) == net for finite weights.
Json network_to_json(const ReluNetwork& net);
ReluNetwork network_from_json(const Json& j);

/// {"type":"discrete","atoms":[[...]],"weights":[...]}
Json measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const Json& j);

/// {"breakpoints":[...],"values":[[...]]}
Json cpwl_to_json(const CpwlMap& f);
CpwlMap cpwl_from_json(const Json& j);

Json certificate_to_json(const TransportCertificate& cert);

/// A target description together with its sampler. `json` is the
/// normalized form (defaults filled in), so parsing it again gives the same
/// sampler.
struct TargetSpec {
  Json json = Json{{"type", "uniform_cube"}, {"d", 1}};
  TargetSampler sampler = TargetSampler::uniform_cube(1);
};

/// Families: discrete, uniform_cube, uniform_sphere, gaussian,
/// empirical (CSV path, resolved against base_dir when relative) and
/// mixture {"components":[...],"weights":[...]}.
TargetSpec parse_target_spec(const Json& j, const std::filesystem::path& base_dir = {});
TargetSpec load_target_spec(const std::filesystem::path& path);

}  // namespace gencap
