#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mqc/runner/config.hpp"

namespace mqc::runner {

struct RunResult {
  std::filesystem::path out_dir;
  std::vector<std::string> files;  // relative to out_dir, in write order
  json manifest;
  bool oracle_failures = false;
};

// Executes every pipeline in order and writes manifest.json last. Numerical
// warnings go to the manifest; only invalid input or I/O errors throw.
RunResult run(const RunConfig& cfg, const std::filesystem::path& out_dir);

SymOperator initial_state(const InitialState& s, const BasisPtr& basis);

struct OracleCheck {
  std::string test;
  int n_spins = 0;
  int samples = 0;
  double tolerance = 0.0;
  double max_deviation = 0.0;
  bool pass() const { return max_deviation < tolerance; }
};

// Randomized comparison of the symmetric engine with the dense oracle for
// multiply, rotate_z, dephase, propagate, coherence_spectrum and qfi. Sample
// k at n spins draws from a generator seeded by (seed, n, k).
std::vector<OracleCheck> oracle_checks(const std::vector<int>& n_spins, int samples,
                                       std::uint64_t seed, int threads = 1);

}  // namespace mqc::runner
