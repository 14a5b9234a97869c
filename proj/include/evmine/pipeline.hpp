#pragma once

#include <string>

#include "evmine/config.hpp"
#include "evmine/evidence.hpp"
#include "evmine/image.hpp"
#include "evmine/residual.hpp"
#include "evmine/semantics.hpp"

namespace evmine {

// Everything one mining run produces, kept around so callers can report
// score summaries and run diagnostics without recomputation.
struct MineResult {
  EvidencePack pack;
  Mat sem;
  Mat freq;
  Mat fused;
  NoiseScores noise;
  ClusterModel clusters;
  int g_h = 0;
  int g_w = 0;
};

// grid -> spectral -> residual -> embeddings -> clustering -> fusion ->
// per-cluster top-k -> grid NMS -> pack.
MineResult mine_evidence(const ImageBuffer& img, const RunConfig& cfg,
                         const std::string& image_id);

MineResult mine_evidence_file(const std::string& image_path, const RunConfig& cfg);

// Filename stem, used as the image id in packs and batch rows.
std::string image_id_from_path(const std::string& path);

}  // namespace evmine
