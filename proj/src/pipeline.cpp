#include "evmine/pipeline.hpp"

#include <filesystem>

#include "evmine/error.hpp"
#include "evmine/spectral.hpp"

namespace evmine {

std::string image_id_from_path(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

MineResult mine_evidence(const ImageBuffer& img, const RunConfig& cfg,
                         const std::string& image_id) {
  validate(cfg);
  if (img.width < cfg.patch_size || img.height < cfg.patch_size) {
    throw Error(ErrorKind::ImageTooSmall, "image smaller than one patch");
  }

  MineResult result;
  const LumaPlane luma = to_luma(img);
  const PatchGrid grid = decompose(luma, cfg.patch_size);
  result.g_h = grid.g_h;
  result.g_w = grid.g_w;

  result.freq = frequency_scores(grid, cfg.k_bands);
  result.noise = noise_anomaly(residual_field(grid, cfg.sigma), cfg.epsilon);

  const EmbeddingSet emb = cfg.embeddings_path.empty()
                               ? intrinsic_embed(grid, cfg.k_bands)
                               : ingest_embeddings(cfg.embeddings_path, grid.g_h, grid.g_w);
  result.sem = semantic_scores(emb);
  result.clusters = spherical_kmeans(emb, cfg.k_clusters, cfg.seed);

  result.fused = fuse(result.sem, result.freq, result.noise.scores, cfg.alpha);
  const auto candidates =
      make_candidates(result.fused, result.sem, result.freq, result.noise.scores, result.clusters);
  auto per_cluster = topk_per_cluster(candidates, cfg.k_clusters, cfg.k1);
  for (auto& cluster : per_cluster) {
    cluster = grid_nms(std::move(cluster), cfg.tau);
  }
  result.pack = assemble_pack(per_cluster, grid, img, cfg.pack_params(), image_id);
  return result;
}

MineResult mine_evidence_file(const std::string& image_path, const RunConfig& cfg) {
  const ImageBuffer img = load_image(image_path, cfg.patch_size);
  return mine_evidence(img, cfg, image_id_from_path(image_path));
}

}  // namespace evmine
