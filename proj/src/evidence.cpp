#include "evmine/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "evmine/error.hpp"

namespace evmine {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Score-descending order with the row-major coordinate as tie-breaker; the
// one deterministic ordering used for ranking, NMS and pack layout.
bool score_order(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.coord < b.coord;
}

double grid_distance(PatchCoord a, PatchCoord b) {
  const double dr = a.r - b.r;
  const double dc = a.c - b.c;
  return std::sqrt(dr * dr + dc * dc);
}

}  // namespace

Mat fuse(const Mat& sem, const Mat& freq, const Mat& noise, double alpha) {
  if (!sem.same_shape(freq) || !sem.same_shape(noise)) {
    throw Error(ErrorKind::DimensionMismatch, "score grids differ in shape");
  }
  if (alpha < 0.0) throw Error(ErrorKind::NegativeAlpha, "alpha must be >= 0");
  Mat fused(sem.rows, sem.cols);
  for (size_t i = 0; i < fused.size(); ++i) {
    fused.data[i] = sem.data[i] + alpha * (freq.data[i] + noise.data[i]);
  }
  return fused;
}

std::vector<Candidate> make_candidates(const Mat& fused, const Mat& sem, const Mat& freq,
                                       const Mat& noise, const ClusterModel& model) {
  std::vector<Candidate> out;
  out.reserve(fused.size());
  for (int r = 0; r < fused.rows; ++r) {
    for (int c = 0; c < fused.cols; ++c) {
      const size_t i = static_cast<size_t>(r) * fused.cols + c;
      out.push_back({{r + 1, c + 1}, fused.data[i], model.assignment[i], sem.data[i],
                     freq.data[i], noise.data[i]});
    }
  }
  return out;
}

std::vector<std::vector<Candidate>> topk_per_cluster(const std::vector<Candidate>& candidates,
                                                     int k_clusters, int k1) {
  if (k1 < 1) throw Error(ErrorKind::InvalidConfig, "k1 must be >= 1");
  std::vector<std::vector<Candidate>> clusters(k_clusters);
  for (const Candidate& cand : candidates) {
    clusters[cand.cluster - 1].push_back(cand);
  }
  for (auto& members : clusters) {
    std::sort(members.begin(), members.end(), score_order);
    if (members.size() > static_cast<size_t>(k1)) members.resize(k1);
  }
  return clusters;
}

std::vector<Candidate> grid_nms(std::vector<Candidate> candidates, double tau) {
  std::sort(candidates.begin(), candidates.end(), score_order);
  std::vector<Candidate> kept;
  for (const Candidate& cand : candidates) {
    bool keep = true;
    for (const Candidate& k : kept) {
      if (grid_distance(cand.coord, k.coord) < tau) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(cand);
  }
  return kept;
}

EvidencePack assemble_pack(const std::vector<std::vector<Candidate>>& per_cluster,
                           const PatchGrid& grid, const ImageBuffer& img,
                           const PackParams& params, const std::string& image_id,
                           int crop_margin) {
  // Cluster max scores drive the block order of the pack.
  std::vector<double> cluster_max(per_cluster.size(), 0.0);
  std::vector<Candidate> all;
  for (size_t k = 0; k < per_cluster.size(); ++k) {
    double mx = -std::numeric_limits<double>::infinity();
    for (const Candidate& cand : per_cluster[k]) mx = std::max(mx, cand.score);
    cluster_max[k] = mx;
    all.insert(all.end(), per_cluster[k].begin(), per_cluster[k].end());
  }
  if (all.empty()) throw Error(ErrorKind::EmptyEvidence, "no evidence candidates selected");

  std::sort(all.begin(), all.end(), [&](const Candidate& a, const Candidate& b) {
    const double ma = cluster_max[a.cluster - 1];
    const double mb = cluster_max[b.cluster - 1];
    if (ma != mb) return ma > mb;
    return score_order(a, b);
  });

  EvidencePack pack;
  pack.image_id = image_id;
  pack.params = params;
  pack.patches_total = grid.count();
  pack.entries.reserve(all.size());
  for (size_t i = 0; i < all.size(); ++i) {
    EvidenceEntry entry;
    entry.candidate = all[i];
    entry.box = grid.box(all[i].coord);
    entry.crop = crop_with_margin(img, entry.box, crop_margin);
    entry.crop_file = "ev_" + std::to_string(i) + ".png";
    pack.entries.push_back(std::move(entry));
  }
  return pack;
}

std::string serialize_pack(const EvidencePack& pack, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  ordered_json doc;
  doc["image_id"] = pack.image_id;
  doc["params"] = {
      {"alpha", pack.params.alpha},       {"k_clusters", pack.params.k_clusters},
      {"k1", pack.params.k1},             {"tau", pack.params.tau},
      {"k_bands", pack.params.k_bands},   {"patch_size", pack.params.patch_size},
      {"sigma", pack.params.sigma},       {"epsilon", pack.params.epsilon},
      {"seed", pack.params.seed},
  };
  doc["entries"] = ordered_json::array();
  for (const EvidenceEntry& entry : pack.entries) {
    const Candidate& cand = entry.candidate;
    doc["entries"].push_back({
        {"r", cand.coord.r},
        {"c", cand.coord.c},
        {"cluster", cand.cluster},
        {"score", cand.score},
        {"sem", cand.sem},
        {"freq", cand.freq},
        {"noise", cand.noise},
        {"box", {entry.box.x, entry.box.y, entry.box.w, entry.box.h}},
        {"crop", entry.crop_file},
    });
    save_png(entry.crop, (fs::path(out_dir) / entry.crop_file).string());
  }

  const std::string manifest = (fs::path(out_dir) / "pack.json").string();
  std::ofstream out(manifest);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + manifest);
  out << doc.dump(2) << "\n";
  if (!out.good()) throw Error(ErrorKind::IoError, "write failed: " + manifest);
  return manifest;
}

EvidencePack deserialize_pack(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + manifest_path);
  ordered_json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::SchemaError, manifest_path + ": not valid JSON");
  }

  EvidencePack pack;
  try {
    pack.image_id = doc.at("image_id").get<std::string>();
    const auto& p = doc.at("params");
    pack.params.alpha = p.at("alpha").get<double>();
    pack.params.k_clusters = p.at("k_clusters").get<int>();
    pack.params.k1 = p.at("k1").get<int>();
    pack.params.tau = p.at("tau").get<double>();
    pack.params.k_bands = p.at("k_bands").get<int>();
    pack.params.patch_size = p.at("patch_size").get<int>();
    pack.params.sigma = p.at("sigma").get<double>();
    pack.params.epsilon = p.at("epsilon").get<double>();
    pack.params.seed = p.at("seed").get<uint64_t>();

    const fs::path dir = fs::path(manifest_path).parent_path();
    for (const auto& e : doc.at("entries")) {
      EvidenceEntry entry;
      entry.candidate.coord = {e.at("r").get<int>(), e.at("c").get<int>()};
      entry.candidate.cluster = e.at("cluster").get<int>();
      entry.candidate.score = e.at("score").get<double>();
      entry.candidate.sem = e.at("sem").get<double>();
      entry.candidate.freq = e.at("freq").get<double>();
      entry.candidate.noise = e.at("noise").get<double>();
      entry.box = {e.at("box")[0].get<int>(), e.at("box")[1].get<int>(),
                   e.at("box")[2].get<int>(), e.at("box")[3].get<int>()};
      entry.crop_file = e.at("crop").get<std::string>();
      entry.crop = load_image((dir / entry.crop_file).string());
      pack.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::SchemaError, manifest_path + ": " + ex.what());
  }
  return pack;
}

}  // namespace evmine
