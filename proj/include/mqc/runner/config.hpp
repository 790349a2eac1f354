#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mqc/dynamics.hpp"
#include "mqc/states.hpp"

namespace mqc::runner {

using json = nlohmann::json;

enum class InitialKind { Thermal, Cluster, Ghz };

struct InitialState {
  InitialKind kind = InitialKind::Thermal;
  ClusterSpec cluster;  // used for Cluster
  double dephasing = 0.0;
};

struct BasisInfoParams {
  int n_spins = 0;
  bool labels = true;
};

struct BuildClusterParams {
  ClusterSpec cluster;
  double dephasing = 0.0;
};

struct ScanParams {
  int n_spins = 0;
  InitialState initial;
  EvolutionConfig evolution;
  int phase_points = 181;
  bool suppress_zero = false;
  ScanMethod method = ScanMethod::Auto;
  bool fit = true;
};

struct JitterSweepParams {
  int n_spins = 0;
  InitialState initial;
  EvolutionConfig evolution;
  std::vector<double> deltas;
  std::vector<int> m_c;
  int phase_points = 181;
  bool suppress_zero = true;
};

struct QfiSweepParams {
  int n_spins = 0;
  std::vector<int> m_c;
  std::vector<double> p;
  std::vector<WeightMode> modes;
  std::optional<double> gaussian_width;
  double mixing = 1.0;
};

struct OracleParams {
  std::vector<int> n_spins;
  int samples = 20;
};

struct Pipeline {
  std::string type;
  std::string name;  // output subdirectory; empty writes into the run root
  std::optional<BasisInfoParams> basis_info;
  std::optional<BuildClusterParams> build_cluster;
  std::optional<ScanParams> scan;
  std::optional<JitterSweepParams> jitter_sweep;
  std::optional<QfiSweepParams> qfi_sweep;
  std::optional<OracleParams> oracle;
};

struct RunConfig {
  std::uint64_t seed = 0;
  int threads = 1;
  bool plots = false;
  std::vector<Pipeline> pipelines;
  // Every parameter with defaults filled in. Threads are left out: they do
  // not change any output.
  json resolved;
  std::string source_digest;  // SHA-256 of the input text

  // First 16 hex digits of the SHA-256 of the resolved parameters.
  std::string run_id() const;
};

const std::vector<std::string>& pipeline_types();

// Parses and validates a config document. A manifest written by a previous
// run is accepted too; its recorded parameters are used. Syntax errors are
// reported as "<origin>:<line>:<column>: ...", schema errors as
// "<origin>: <field path>: ...". Throws ConfigError.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::filesystem::path& path);

std::string sha256_hex(const std::string& data);

}  // namespace mqc::runner
