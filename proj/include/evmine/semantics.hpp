#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evmine/mat.hpp"
#include "evmine/patch_grid.hpp"

namespace evmine {

enum class EmbeddingSource { Ingested, Intrinsic };

// CLS anchor plus one embedding per grid patch. Finite values only; patch
// vectors are guaranteed nonzero after the zero-vector repair rule (a zero
// row is replaced by the unit vector along dimension 0 and counted).
struct EmbeddingSet {
  int dim = 0;
  int g_h = 0;
  int g_w = 0;
  std::vector<double> cls;
  std::vector<std::vector<double>> patches;  // row-major, g_h*g_w rows
  EmbeddingSource source = EmbeddingSource::Intrinsic;
  int zero_repairs = 0;
};

// Spherical k-means result. Centroids are unit norm, assignment ids are
// 1-based and every cluster id occurs at least once.
struct ClusterModel {
  int k_clusters = 0;
  std::vector<std::vector<double>> centroids;
  std::vector<int> assignment;  // row-major over the grid, ids in [1, k]
  int iterations_run = 0;
  uint64_t seed = 0;
  // Total cosine objective after each assignment pass; non-decreasing.
  std::vector<double> objective_trace;
};

// Loads and validates the embedding JSON file (schema: dim, grid, cls,
// patches; unknown fields rejected). Throws SchemaError, GridMismatch,
// NonFiniteValue.
EmbeddingSet ingest_embeddings(const std::string& path, int expected_gh, int expected_gw);

// Offline fallback descriptor per patch: band distribution (k_bands), mean
// luma and luma standard deviation, unit-normalized. CLS is the normalized
// mean of all patch descriptors.
EmbeddingSet intrinsic_embed(const PatchGrid& grid, int k_bands);

// Spherical k-means on unit-normalized embeddings: cosine argmax assignment
// (ties to the lowest cluster id), centroids re-normalized each update,
// k-means++-style cosine seeding, farthest-point repair for empty clusters.
// Deterministic given seed. Throws TooManyClusters.
ClusterModel spherical_kmeans(const EmbeddingSet& emb, int k_clusters,
                              uint64_t seed, int max_iter = 100);

// 1 - cos(t, cls), in [0, 2]. Throws ZeroVector.
double semantic_discrepancy(const std::vector<double>& t, const std::vector<double>& cls);

// Per-patch semantic scores against the set's CLS anchor.
Mat semantic_scores(const EmbeddingSet& emb);

double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace evmine
