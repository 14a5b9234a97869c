#include "evmine/semantics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evmine/error.hpp"
#include "evmine/rng.hpp"
#include "evmine/spectral.hpp"

namespace evmine {

namespace {

double norm2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

std::vector<double> normalized(const std::vector<double>& v) {
  const double n = norm2(v);
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Replaces zero-norm rows with the unit vector along dimension 0 so every
// embedding has a direction. Returns the number of repairs.
int repair_zero_rows(std::vector<std::vector<double>>& rows) {
  int repairs = 0;
  for (auto& row : rows) {
    if (norm2(row) == 0.0) {
      std::fill(row.begin(), row.end(), 0.0);
      row[0] = 1.0;
      ++repairs;
    }
  }
  return repairs;
}

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::NonFiniteValue, std::string(what) + " contains a non-finite value");
    }
  }
}

}  // namespace

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorKind::ZeroVector, "cosine with a zero vector");
  }
  return dot(a, b) / (na * nb);
}

double semantic_discrepancy(const std::vector<double>& t, const std::vector<double>& cls) {
  if (t.size() != cls.size()) {
    throw Error(ErrorKind::LengthMismatch, "embedding and cls dimension mismatch");
  }
  return 1.0 - cosine(t, cls);
}

Mat semantic_scores(const EmbeddingSet& emb) {
  Mat scores(emb.g_h, emb.g_w);
  for (size_t i = 0; i < emb.patches.size(); ++i) {
    scores.data[i] = semantic_discrepancy(emb.patches[i], emb.cls);
  }
  return scores;
}

EmbeddingSet ingest_embeddings(const std::string& path, int expected_gh, int expected_gw) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    // Python's json module emits bare NaN/Infinity tokens, which are not
    // valid JSON; classify those as value errors rather than schema errors.
    if (text.find("NaN") != std::string::npos || text.find("Infinity") != std::string::npos) {
      throw Error(ErrorKind::NonFiniteValue, path + ": non-finite value in embedding file");
    }
    throw Error(ErrorKind::SchemaError, path + ": not valid JSON");
  }

  if (!doc.is_object()) throw Error(ErrorKind::SchemaError, "embedding file must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "dim" && key != "grid" && key != "cls" && key != "patches") {
      throw Error(ErrorKind::SchemaError, "unknown field '" + key + "'");
    }
  }
  if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<int>() < 1) {
    throw Error(ErrorKind::SchemaError, "'dim' must be a positive integer");
  }
  if (!doc.contains("grid") || !doc["grid"].is_array() || doc["grid"].size() != 2 ||
      !doc["grid"][0].is_number_integer() || !doc["grid"][1].is_number_integer()) {
    throw Error(ErrorKind::SchemaError, "'grid' must be [g_h, g_w]");
  }
  if (!doc.contains("cls") || !doc["cls"].is_array()) {
    throw Error(ErrorKind::SchemaError, "'cls' must be an array");
  }
  if (!doc.contains("patches") || !doc["patches"].is_array()) {
    throw Error(ErrorKind::SchemaError, "'patches' must be an array of arrays");
  }

  EmbeddingSet set;
  set.dim = doc["dim"].get<int>();
  set.g_h = doc["grid"][0].get<int>();
  set.g_w = doc["grid"][1].get<int>();
  set.source = EmbeddingSource::Ingested;

  if (set.g_h != expected_gh || set.g_w != expected_gw) {
    throw Error(ErrorKind::GridMismatch,
                "file declares grid " + std::to_string(set.g_h) + "x" + std::to_string(set.g_w) +
                    ", image decomposes to " + std::to_string(expected_gh) + "x" +
                    std::to_string(expected_gw));
  }

  if (doc["cls"].size() != static_cast<size_t>(set.dim)) {
    throw Error(ErrorKind::SchemaError, "'cls' length does not match dim");
  }
  set.cls = doc["cls"].get<std::vector<double>>();
  check_finite(set.cls, "cls");
  if (norm2(set.cls) == 0.0) {
    throw Error(ErrorKind::SchemaError, "'cls' must have nonzero norm");
  }

  const size_t expected_rows = static_cast<size_t>(set.g_h) * set.g_w;
  if (doc["patches"].size() != expected_rows) {
    throw Error(ErrorKind::SchemaError,
                "'patches' holds " + std::to_string(doc["patches"].size()) + " rows, grid needs " +
                    std::to_string(expected_rows));
  }
  set.patches.reserve(expected_rows);
  for (const auto& row : doc["patches"]) {
    if (!row.is_array() || row.size() != static_cast<size_t>(set.dim)) {
      throw Error(ErrorKind::SchemaError, "every patch row must hold dim floats");
    }
    set.patches.push_back(row.get<std::vector<double>>());
    check_finite(set.patches.back(), "patch embedding");
  }
  set.zero_repairs = repair_zero_rows(set.patches);
  return set;
}

EmbeddingSet intrinsic_embed(const PatchGrid& grid, int k_bands) {
  const BandPartition part = BandPartition::make(grid.patch_size, k_bands);
  EmbeddingSet set;
  set.dim = k_bands + 2;
  set.g_h = grid.g_h;
  set.g_w = grid.g_w;
  set.source = EmbeddingSource::Intrinsic;
  set.patches.reserve(grid.patches.size());

  for (const Mat& patch : grid.patches) {
    const BandDistribution q = band_distribution(band_energies(dct2(patch), part));
    double mean = 0.0;
    for (double v : patch.data) mean += v;
    mean /= static_cast<double>(patch.size());
    double var = 0.0;
    for (double v : patch.data) var += (v - mean) * (v - mean);
    var /= static_cast<double>(patch.size());

    std::vector<double> desc(q.begin(), q.end());
    desc.push_back(mean);
    desc.push_back(std::sqrt(std::max(0.0, var)));
    set.patches.push_back(normalized(desc));
  }
  set.zero_repairs = repair_zero_rows(set.patches);

  std::vector<double> mean_desc(set.dim, 0.0);
  for (const auto& d : set.patches) {
    for (int i = 0; i < set.dim; ++i) mean_desc[i] += d[i];
  }
  for (double& v : mean_desc) v /= static_cast<double>(set.patches.size());
  if (norm2(mean_desc) == 0.0) mean_desc[0] = 1.0;
  set.cls = normalized(mean_desc);
  return set;
}

namespace {

// Cosine analog of k-means++ seeding: first centroid uniform, later ones
// sampled proportional to 1 - max cosine against the centroids chosen so far.
std::vector<std::vector<double>> seed_centroids(const std::vector<std::vector<double>>& points,
                                                int k, Rng& rng) {
  const size_t n = points.size();
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  centroids.push_back(points[rng.index(n)]);

  std::vector<double> weight(n);
  while (centroids.size() < static_cast<size_t>(k)) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double best = -1.0;
      for (const auto& c : centroids) best = std::max(best, dot(points[i], c));
      weight[i] = std::max(0.0, 1.0 - best);
      total += weight[i];
    }
    size_t chosen;
    if (total <= 1e-300) {
      chosen = rng.index(n);  // all points coincide with chosen centroids
    } else {
      const double x = rng.uniform() * total;
      double cum = 0.0;
      chosen = n - 1;
      for (size_t i = 0; i < n; ++i) {
        cum += weight[i];
        if (cum >= x) {
          chosen = i;
          break;
        }
      }
    }
    centroids.push_back(points[chosen]);
  }
  return centroids;
}

}  // namespace

ClusterModel spherical_kmeans(const EmbeddingSet& emb, int k_clusters, uint64_t seed,
                              int max_iter) {
  const int n = static_cast<int>(emb.patches.size());
  if (k_clusters < 1) throw Error(ErrorKind::InvalidConfig, "k_clusters must be >= 1");
  if (k_clusters > n) {
    throw Error(ErrorKind::TooManyClusters,
                std::to_string(k_clusters) + " clusters for " + std::to_string(n) + " patches");
  }

  std::vector<std::vector<double>> points;
  points.reserve(n);
  for (const auto& p : emb.patches) points.push_back(normalized(p));

  Rng rng(seed);
  std::vector<std::vector<double>> centroids = seed_centroids(points, k_clusters, rng);

  ClusterModel model;
  model.k_clusters = k_clusters;
  model.seed = seed;

  std::vector<int> assignment(n, 0);  // 0-based during the loop
  std::vector<int> previous;
  std::vector<int> member_count(k_clusters, 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment: cosine argmax, ties to the lowest cluster id.
    std::fill(member_count.begin(), member_count.end(), 0);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_cos = dot(points[i], centroids[0]);
      for (int j = 1; j < k_clusters; ++j) {
        const double c = dot(points[i], centroids[j]);
        if (c > best_cos) {
          best_cos = c;
          best = j;
        }
      }
      assignment[i] = best;
      ++member_count[best];
    }

    // Farthest-point repair: an empty cluster takes the point (from a donor
    // cluster with at least two members) least aligned with its centroid.
    for (int k = 0; k < k_clusters; ++k) {
      if (member_count[k] > 0) continue;
      int farthest = -1;
      double worst = 2.0;
      for (int i = 0; i < n; ++i) {
        if (member_count[assignment[i]] < 2) continue;
        const double c = dot(points[i], centroids[k]);
        if (c < worst) {
          worst = c;
          farthest = i;
        }
      }
      assert(farthest >= 0);
      --member_count[assignment[farthest]];
      assignment[farthest] = k;
      ++member_count[k];
      centroids[k] = points[farthest];
    }

    double objective = 0.0;
    for (int i = 0; i < n; ++i) objective += dot(points[i], centroids[assignment[i]]);
    assert(model.objective_trace.empty() || objective >= model.objective_trace.back() - 1e-9);
    model.objective_trace.push_back(objective);
    model.iterations_run = iter + 1;

    if (assignment == previous) break;
    previous = assignment;

    // Centroid update: renormalized member mean. A cancelled (zero) sum
    // keeps the previous centroid.
    std::vector<std::vector<double>> sums(k_clusters, std::vector<double>(emb.dim, 0.0));
    for (int i = 0; i < n; ++i) {
      auto& s = sums[assignment[i]];
      for (int d = 0; d < emb.dim; ++d) s[d] += points[i][d];
    }
    for (int k = 0; k < k_clusters; ++k) {
      if (norm2(sums[k]) > 1e-12) centroids[k] = normalized(sums[k]);
    }
  }

  model.centroids = std::move(centroids);
  model.assignment.resize(n);
  for (int i = 0; i < n; ++i) model.assignment[i] = assignment[i] + 1;
  return model;
}

}  // namespace evmine
