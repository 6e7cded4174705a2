#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcsbench/circuits.h"
#include "rcsbench/mcwf.h"
#include "rcsbench/noise.h"
#include "rcsbench/presets.h"
#include "rcsbench/protocols.h"
#include "rcsbench/stats.h"

namespace rcsbench::io {

// Object keys are kept sorted, so dump() is canonical.
using Json = nlohmann::json;

inline constexpr const char* kToolName = "rcsbench";
inline constexpr const char* kToolVersion = "0.1.0";

Json to_json(const Circuit& circuit);
Circuit circuit_from_json(const Json& j);

Json to_json(const NoiseModel& model);
NoiseModel noise_model_from_json(const Json& j);

// Accepts "none", a preset name, {"preset": name, "lambda": x} or a model
// object with "terms". Presets default to lambda = 0.05.
std::optional<NoiseModel> noise_from_spec(const Json& spec, int n, Boundary boundary);

Json to_json(const BenchmarkConfig& config);
// Unknown keys and bad values raise ConfigError.
BenchmarkConfig config_from_json(const Json& j);
// "10:25" or "10:25:5" or "10,12,14".
std::vector<int> parse_depths(const std::string& s);
std::pair<int, int> parse_range(const std::string& s);

Json to_json(const RbConfig& config);
RbConfig rb_config_from_json(const Json& j);
Json to_json(const VirtualConfig& config);
VirtualConfig virtual_config_from_json(const Json& j);
Json to_json(const VarianceConfig& config);
VarianceConfig variance_config_from_json(const Json& j);
Json to_json(const SpinConfig& config);
SpinConfig spin_config_from_json(const Json& j);

Json to_json(const DecayFit& fit);
Json to_json(const DepthPoint& point);
Json to_json(const BenchmarkReport& report);
Json to_json(const TrajectoryAccumulator& acc);
Json to_json(const RbReport& report);
Json to_json(const VirtualResult& result);
Json to_json(const Theorem1Result& result);
Json to_json(const AlCovarianceResult& result);

// estimator,depth,mean,stderr,L,M
std::string per_depth_csv(const BenchmarkReport& report);
// circuit_seed,depth,kind,value,stderr
std::string per_circuit_csv(const BenchmarkReport& report);

// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const Json& config);

// uint64 little-endian count followed by that many little-endian doubles.
void write_probability_table(const std::string& path, const std::vector<double>& probs);
std::vector<double> read_probability_table(const std::string& path);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string utc_timestamp();

}  // namespace rcsbench::io
