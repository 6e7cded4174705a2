#include <gtest/gtest.h>

#include <cstdio>
#include <algorithm>
#include <filesystem>

#include "rcsbench/io.h"
#include "rcsbench/statevec.h"

using namespace rcsbench;
using io::Json;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("rcsbench_test_" + name)).string();
}

}  // namespace

TEST(IoCircuit, RoundTripIsExact) {
  Circuit c = sample_rqc(5, 4, GateSet::cnot_haar1q, Boundary::open, 77);
  c = inject_pauli(c, {"IXIZY", 2});
  const Json j = io::to_json(c);
  const Circuit back = io::circuit_from_json(Json::parse(j.dump()));
  ASSERT_EQ(back.layers.size(), c.layers.size());
  EXPECT_EQ(back.n, c.n);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.boundary, c.boundary);
  EXPECT_EQ(back.gate_set, c.gate_set);
  for (size_t l = 0; l < c.layers.size(); ++l) {
    EXPECT_EQ(back.layers[l].injected, c.layers[l].injected);
    ASSERT_EQ(back.layers[l].gates.size(), c.layers[l].gates.size());
    for (size_t g = 0; g < c.layers[l].gates.size(); ++g) {
      EXPECT_EQ(back.layers[l].gates[g].targets, c.layers[l].gates[g].targets);
      EXPECT_TRUE(back.layers[l].gates[g].matrix == c.layers[l].gates[g].matrix);
    }
  }
  EXPECT_EQ(io::to_json(back).dump(), j.dump());
  const auto a = run_circuit(c), b = run_circuit(back);
  EXPECT_EQ(std::abs(inner_product(a, b)), std::abs(inner_product(a, a)));
}

TEST(IoCircuit, RejectsMalformedInput) {
  Json j = io::to_json(sample_rqc(4, 2, GateSet::haar2q, Boundary::ring, 1));
  Json bad = j;
  bad["layers"][0][0]["targets"] = {0, 9};
  EXPECT_ANY_THROW(io::circuit_from_json(bad));
  bad = j;
  bad["extra"] = 1;
  EXPECT_ANY_THROW(io::circuit_from_json(bad));
}

TEST(IoNoise, RoundTrip) {
  for (const char* name : {"t1t2", "pauli_x", "corr_xx", "weight_nm1"}) {
    const auto m = *preset_model(name, 6, 0.07);
    const auto back = io::noise_model_from_json(Json::parse(io::to_json(m).dump()));
    ASSERT_EQ(back.terms.size(), m.terms.size()) << name;
    EXPECT_EQ(back.n, m.n);
    for (size_t i = 0; i < m.terms.size(); ++i) {
      EXPECT_EQ(back.terms[i].kind, m.terms[i].kind);
      EXPECT_EQ(back.terms[i].support, m.terms[i].support);
      EXPECT_EQ(back.terms[i].gamma, m.terms[i].gamma);
      EXPECT_EQ(back.terms[i].pauli, m.terms[i].pauli);
    }
    EXPECT_EQ(enr_of_model(back), enr_of_model(m));
  }
}

TEST(IoNoise, SpecForms) {
  EXPECT_FALSE(io::noise_from_spec(Json(nullptr), 4, Boundary::ring));
  const auto a = io::noise_from_spec("pauli_x", 4, Boundary::ring);
  EXPECT_NEAR(enr_of_model(*a), 0.05, 1e-15);
  const auto b = io::noise_from_spec(Json{{"preset", "t1t2"}, {"lambda", 0.1}}, 4, Boundary::ring);
  EXPECT_NEAR(enr_of_model(*b), 0.1, 1e-15);
  EXPECT_THROW(io::noise_from_spec("bogus", 4, Boundary::ring), ConfigError);
  EXPECT_THROW(io::noise_from_spec(Json{{"preset", "t1t2"}, {"rate", 0.1}}, 4, Boundary::ring), ConfigError);
  EXPECT_THROW(io::noise_from_spec(io::to_json(*a), 6, Boundary::ring), ConfigError);
}

TEST(IoConfig, RoundTrip) {
  BenchmarkConfig c;
  c.name = "rt";
  c.n = 6;
  c.depths = {3, 5, 7, 9};
  c.L = 12;
  c.backend = Backend::mcwf;
  c.trajectories = 33;
  c.noise = preset_model("corr_xx", 6, 0.08);
  c.estimators = {EstimatorKind::uXEB, EstimatorKind::HOG};
  c.master_seed = 987654321987ULL;
  c.circuit_mode = CircuitMode::prefix;
  c.fit_min = 5;
  c.fit_max = 9;
  const Json j = io::to_json(c);
  const BenchmarkConfig back = io::config_from_json(Json::parse(j.dump()));
  EXPECT_EQ(io::to_json(back).dump(), j.dump());
  EXPECT_EQ(back.master_seed, c.master_seed);
  EXPECT_EQ(back.depths, c.depths);
  EXPECT_EQ(io::config_hash(io::to_json(back)), io::config_hash(j));
}

TEST(IoConfig, OtherConfigsRoundTrip) {
  RbConfig r;
  r.n = 6;
  r.noise = preset_model("weight_nm1", 6, 0.05);
  r.lengths = {1, 3, 9};
  const Json rj = io::to_json(r);
  EXPECT_EQ(io::to_json(io::rb_config_from_json(Json::parse(rj.dump()))).dump(), rj.dump());

  VirtualConfig v;
  v.n = 4;
  v.gamma3 = 0.005;
  v.rcs.depths = {4, 5, 6};
  const Json vj = io::to_json(v);
  EXPECT_EQ(io::to_json(io::virtual_config_from_json(Json::parse(vj.dump()))).dump(), vj.dump());

  VarianceConfig w;
  w.depths = {1, 2};
  const Json wj = io::to_json(w);
  EXPECT_EQ(io::to_json(io::variance_config_from_json(Json::parse(wj.dump()))).dump(), wj.dump());

  SpinConfig s;
  s.pauli = "XZ";
  const Json sj = io::to_json(s);
  EXPECT_EQ(io::to_json(io::spin_config_from_json(Json::parse(sj.dump()))).dump(), sj.dump());
}

TEST(IoConfig, HashIgnoresKeyOrder) {
  const auto a = Json::parse(R"({"n": 4, "depths": [1, 2], "seed": 3, "noise": "pauli_x"})");
  const auto b = Json::parse(R"({"noise": "pauli_x", "seed": 3, "depths": [1, 2], "n": 4})");
  EXPECT_EQ(io::config_hash(a), io::config_hash(b));
  EXPECT_EQ(io::config_hash(a).size(), 16u);
  const auto c = Json::parse(R"({"n": 4, "depths": [1, 2], "seed": 4, "noise": "pauli_x"})");
  EXPECT_NE(io::config_hash(a), io::config_hash(c));
}

TEST(IoConfig, StrictKeysAndValues) {
  const auto ok = Json::parse(R"({"n": 4, "depths": "2:6", "noise": "t1t2"})");
  const auto c = io::config_from_json(ok);
  EXPECT_EQ(c.depths, (std::vector<int>{2, 3, 4, 5, 6}));
  for (const char* text :
       {R"({"n": 4, "depths": [1, 2], "nosie": "t1t2"})", R"({"n": 4})", R"({"n": "four", "depths": [1]})",
        R"({"n": 4, "depths": [1], "backend": "gpu"})", R"({"n": 4, "depths": [1], "fit_range": [1]})",
        R"({"n": 4, "depths": [2, 1]})", R"({"n": 4, "depths": {"from": 1, "to": 3, "by": 1}})",
        R"({"n": 4, "depths": [1], "integrator": "euler"})", R"({"n": 4, "depths": [1], "estimators": ["XEBB"]})"}) {
    EXPECT_THROW(io::config_from_json(Json::parse(text)), ConfigError) << text;
  }
}

TEST(IoConfig, ParseDepths) {
  EXPECT_EQ(io::parse_depths("10:14:2"), (std::vector<int>{10, 12, 14}));
  EXPECT_EQ(io::parse_depths("3,1,2"), (std::vector<int>{3, 1, 2}));
  EXPECT_THROW(io::parse_depths("1:2:3:4"), ConfigError);
  EXPECT_THROW(io::parse_depths("1:5:0"), ConfigError);
  EXPECT_THROW(io::parse_depths("x"), ConfigError);
  EXPECT_EQ(io::parse_range("4:9"), std::make_pair(4, 9));
}

TEST(IoProbabilities, BinaryRoundTrip) {
  const auto probs = probabilities(run_circuit(sample_rqc(6, 5, GateSet::haar2q, Boundary::ring, 3)));
  const std::string path = tmp_path("probs.bin");
  io::write_probability_table(path, probs);
  EXPECT_EQ(std::filesystem::file_size(path), 8 + 8 * probs.size());
  EXPECT_EQ(io::read_probability_table(path), probs);
  std::filesystem::resize_file(path, 20);
  EXPECT_ANY_THROW(io::read_probability_table(path));
  std::remove(path.c_str());
}

TEST(IoReport, CsvShapes) {
  BenchmarkConfig c;
  c.n = 4;
  c.depths = {2, 3, 4};
  c.L = 3;
  c.noise = preset_model("pauli_x", 4, 0.1);
  c.estimators = {EstimatorKind::F, EstimatorKind::uXEB};
  const auto r = rcs_benchmark(c);
  const std::string pd = io::per_depth_csv(r), pc = io::per_circuit_csv(r);
  EXPECT_EQ(pd.substr(0, pd.find('\n')), "estimator,depth,mean,stderr,L,M");
  EXPECT_EQ(std::count(pd.begin(), pd.end(), '\n'), 1 + 2 * 3);
  EXPECT_EQ(pc.substr(0, pc.find('\n')), "circuit_seed,depth,kind,value,stderr");
  EXPECT_EQ(std::count(pc.begin(), pc.end(), '\n'), 1 + 2 * 3 * 3);
  const Json j = io::to_json(r);
  EXPECT_FALSE(j.contains("threads"));
  EXPECT_TRUE(j.contains("config"));
}
