#include "evmine/config.hpp"

#include "evmine/error.hpp"

namespace evmine {

void validate(const RunConfig& cfg) {
  if (cfg.alpha < 0.0) throw Error(ErrorKind::NegativeAlpha, "alpha must be >= 0");
  if (cfg.k_clusters < 1) throw Error(ErrorKind::InvalidConfig, "k-clusters must be >= 1");
  if (cfg.k1 < 1) throw Error(ErrorKind::InvalidConfig, "k1 must be >= 1");
  if (cfg.tau < 0.0) throw Error(ErrorKind::InvalidConfig, "tau must be >= 0");
  if (cfg.patch_size < 4) throw Error(ErrorKind::InvalidConfig, "patch-size must be >= 4");
  if (cfg.sigma <= 0.0) throw Error(ErrorKind::NonPositiveSigma, "sigma must be > 0");
  if (cfg.epsilon <= 0.0) throw Error(ErrorKind::InvalidConfig, "epsilon must be > 0");
  if (cfg.k_bands < 1 || cfg.k_bands > 2 * (cfg.patch_size - 1)) {
    throw Error(ErrorKind::InvalidConfig, "k-bands must be in [1, 2*(patch_size-1)]");
  }
  if (cfg.backend != "mock" && cfg.backend != "http") {
    throw Error(ErrorKind::InvalidConfig, "backend must be 'mock' or 'http'");
  }
  if (cfg.jobs < 1) throw Error(ErrorKind::InvalidConfig, "jobs must be >= 1");
}

}  // namespace evmine
