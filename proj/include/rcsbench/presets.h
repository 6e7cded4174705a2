#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcsbench/protocols.h"

namespace rcsbench {

struct VarianceConfig {
  int n = 8;
  std::vector<int> depths;
  int L = 200;
  int K = 0;  // error positions per layer; <= 0 enumerates all qubits
  double eps = 0.001;
  std::vector<GateSet> gate_sets{GateSet::haar2q, GateSet::cnot_haar1q};
  uint64_t seed = 1;
  int threads = 1;
};

struct SpinConfig {
  int n = 8;
  int l_max = 60;
  std::string pauli = "X";  // label on the first qubits; padded with I
  double eps = 0.001;       // first-order table
  int d_max = 30;
};

struct PresetInfo {
  std::string name;
  std::string command;  // benchmark | rb | virtual-exp | variance | spinmodel
  std::string description;
};

std::vector<PresetInfo> list_presets();

// Unknown names raise ConfigError. n overrides the preset's qubit count and
// rescales depth grids and noise rates to keep lambda_true fixed.
BenchmarkConfig benchmark_preset(const std::string& name, std::optional<int> n = std::nullopt);
RbConfig rb_preset(const std::string& name, std::optional<int> n = std::nullopt);
// RCS comparison run paired with an rb preset (same noise model).
BenchmarkConfig rb_comparison_preset(const RbConfig& rb);
VirtualConfig virtual_preset(const std::string& name, std::optional<int> n = std::nullopt);
VarianceConfig variance_preset(const std::string& name, std::optional<int> n = std::nullopt);
SpinConfig spin_preset(const std::string& name, std::optional<int> n = std::nullopt);

}  // namespace rcsbench
