#pragma once

#include <cstdint>
#include <string>

#include "evmine/evidence.hpp"

namespace evmine {

// Full run configuration. Defaults are emitted into every output for
// provenance. CLI flags override config-file values override defaults.
struct RunConfig {
  double alpha = 0.7;
  int k_clusters = 4;
  int k_bands = 8;
  int k1 = 4;
  double tau = 2.0;
  int patch_size = 16;
  double sigma = 1.0;
  double epsilon = 1e-6;
  uint64_t seed = 42;
  std::string embeddings_path;     // empty -> intrinsic descriptors
  std::string backend = "mock";    // "mock" | "http"
  std::string prompt_template_path;
  std::string out_dir = "out";
  bool include_full_image = false;
  int jobs = 1;

  PackParams pack_params() const {
    return PackParams{alpha, k_clusters, k1, tau, k_bands, patch_size, sigma, epsilon, seed};
  }
};

// Rejects every invariant violation with a distinct error kind/message
// before any computation. Throws InvalidConfig / NegativeAlpha /
// NonPositiveSigma.
void validate(const RunConfig& cfg);

}  // namespace evmine
