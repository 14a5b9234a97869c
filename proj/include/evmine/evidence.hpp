#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evmine/image.hpp"
#include "evmine/mat.hpp"
#include "evmine/patch_grid.hpp"
#include "evmine/semantics.hpp"

namespace evmine {

// One scored grid cell, carrying its fused score and the three components
// it was fused from.
struct Candidate {
  PatchCoord coord;
  double score = 0.0;
  int cluster = 0;
  double sem = 0.0;
  double freq = 0.0;
  double noise = 0.0;
};

// Parameter snapshot embedded into every pack for provenance.
struct PackParams {
  double alpha = 0.7;
  int k_clusters = 4;
  int k1 = 4;
  double tau = 2.0;
  int k_bands = 8;
  int patch_size = 16;
  double sigma = 1.0;
  double epsilon = 1e-6;
  uint64_t seed = 42;
};

struct EvidenceEntry {
  Candidate candidate;
  PixelBox box;          // exact patch rectangle in source pixels
  ImageBuffer crop;      // margin-expanded crop around the box
  std::string crop_file; // "ev_<idx>.png" once serialized
};

// Final ordered evidence selection. Entries are sorted by
// (cluster max score desc, score desc, row-major coord).
struct EvidencePack {
  std::string image_id;
  PackParams params;
  std::vector<EvidenceEntry> entries;
  int patches_total = 0;  // grid size the pack was mined from
};

// Elementwise S = sem + alpha * (freq + noise). Throws DimensionMismatch,
// NegativeAlpha.
Mat fuse(const Mat& sem, const Mat& freq, const Mat& noise, double alpha);

// Builds candidates for the grid from the fused scores and components.
std::vector<Candidate> make_candidates(const Mat& fused, const Mat& sem,
                                       const Mat& freq, const Mat& noise,
                                       const ClusterModel& model);

// Per cluster, the k1 highest-scored members (all of them when the cluster
// is smaller), ties broken by row-major coordinate. Result indexed by
// cluster id - 1.
std::vector<std::vector<Candidate>> topk_per_cluster(const std::vector<Candidate>& candidates,
                                                     int k_clusters, int k1);

// Greedy suppression in descending score order (ties row-major): a candidate
// is kept iff its grid L2 distance to every kept candidate is >= tau.
std::vector<Candidate> grid_nms(std::vector<Candidate> candidates, double tau);

// Orders the union of the per-cluster survivors and attaches pixel boxes and
// crops. Throws EmptyEvidence when no cluster kept anything.
EvidencePack assemble_pack(const std::vector<std::vector<Candidate>>& per_cluster,
                           const PatchGrid& grid, const ImageBuffer& img,
                           const PackParams& params, const std::string& image_id,
                           int crop_margin = 8);

// Writes pack.json plus one PNG crop per entry ("ev_<idx>.png") into out_dir.
// Returns the manifest path. Throws IoError.
std::string serialize_pack(const EvidencePack& pack, const std::string& out_dir);

// Reads a serialized pack back, including crop pixels.
EvidencePack deserialize_pack(const std::string& manifest_path);

}  // namespace evmine
