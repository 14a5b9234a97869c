// evmine — training-free forgery-evidence mining CLI.
//
//   evmine mine <image>        score patches, select evidence, write pack
//   evmine detect <image>      mine + query a multimodal backend for Real/Fake
//   evmine bench <dir>         batch detection with optional labels CSV
//   evmine synthbench          synthetic manipulation localization suite

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evmine/bench.hpp"
#include "evmine/config.hpp"
#include "evmine/error.hpp"
#include "evmine/gateway.hpp"
#include "evmine/pipeline.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace evmine;

namespace {

struct CliOptions {
  RunConfig run;
  BackendConfig backend;
  std::string image_path;
  std::string dir_path;
  std::string labels_path;
  // synthbench
  int n_seeds = 100;
  std::string kind = "splice_noise";
  std::vector<int> region = {96, 96, 32, 32};
  double strength = 0.2;
  uint64_t manip_seed = 1;
};

void add_run_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--alpha", opt.run.alpha, "Low-level cue weight in the fused score");
  cmd->add_option("--k-clusters", opt.run.k_clusters, "Semantic cluster count");
  cmd->add_option("--k-bands", opt.run.k_bands, "DCT frequency band count");
  cmd->add_option("--k1", opt.run.k1, "Candidates kept per cluster before NMS");
  cmd->add_option("--tau", opt.run.tau, "Grid NMS L2 distance threshold");
  cmd->add_option("--patch-size", opt.run.patch_size, "Patch edge length in pixels");
  cmd->add_option("--sigma", opt.run.sigma, "Gaussian blur sigma for the residual");
  cmd->add_option("--epsilon", opt.run.epsilon, "MAD stabilizer");
  cmd->add_option("--seed", opt.run.seed, "Clustering seed");
  cmd->add_option("--embeddings", opt.run.embeddings_path, "Embedding JSON file (default: intrinsic)");
  cmd->add_option("--backend", opt.run.backend, "Verdict backend: mock or http");
  cmd->add_option("--prompt-template", opt.run.prompt_template_path, "Prompt template JSON file");
  cmd->add_option("--out-dir", opt.run.out_dir, "Output directory");
  cmd->add_flag("--include-full-image", opt.run.include_full_image, "Append the full image to the prompt");
  cmd->add_option("--jobs", opt.run.jobs, "Concurrent images in bench mode");
  cmd->add_option("--mock-threshold", opt.backend.mock_threshold,
                  "Mock backend: mean pack score above this answers Fake");
  cmd->add_option("--timeout", opt.backend.timeout_seconds, "HTTP timeout in seconds");
  cmd->add_option("--retries", opt.backend.retries, "HTTP retry count");
  cmd->add_option("--backoff", opt.backend.backoff_seconds, "Initial retry backoff in seconds");
  cmd->set_config("--config", "", "Config file with key=value lines");
}

void finalize_backend(CliOptions& opt) {
  opt.backend.use_mock = opt.run.backend == "mock";
  if (const char* v = std::getenv("EVIDENCE_LVLM_ENDPOINT")) opt.backend.endpoint = v;
  if (const char* v = std::getenv("EVIDENCE_LVLM_TOKEN")) opt.backend.auth_token = v;
  if (const char* v = std::getenv("EVIDENCE_LVLM_MODEL")) opt.backend.model_name = v;
  if (!opt.backend.use_mock && opt.backend.endpoint.empty()) {
    throw Error(ErrorKind::InvalidConfig,
                "http backend selected but EVIDENCE_LVLM_ENDPOINT is not set");
  }
}

PromptTemplate load_template(const std::string& path) {
  if (path.empty()) return PromptTemplate::defaults();
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::SchemaError, path + ": not valid JSON");
  }
  PromptTemplate t = PromptTemplate::defaults();
  if (doc.contains("system_text")) t.system_text = doc["system_text"].get<std::string>();
  if (doc.contains("per_evidence_caption"))
    t.per_evidence_caption = doc["per_evidence_caption"].get<std::string>();
  if (doc.contains("question_text")) t.question_text = doc["question_text"].get<std::string>();
  if (t.question_text.empty()) {
    throw Error(ErrorKind::InvalidConfig, "question_text must be non-empty");
  }
  return t;
}

double token_reduction(const EvidencePack& pack) {
  if (pack.patches_total <= 0) return 0.0;
  return 1.0 - static_cast<double>(pack.entries.size()) / pack.patches_total;
}

struct DetectOutcome {
  MineResult mined;
  Verdict verdict;
  double mine_seconds = 0.0;
  double total_seconds = 0.0;
};

DetectOutcome run_detect(const std::string& image_path, const CliOptions& opt,
                         const PromptTemplate& tmpl) {
  DetectOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const ImageBuffer img = load_image(image_path, opt.run.patch_size);
  out.mined = mine_evidence(img, opt.run, image_id_from_path(image_path));
  const auto t1 = std::chrono::steady_clock::now();

  const DetectionRequest req =
      build_request(out.mined.pack, tmpl, opt.run.include_full_image,
                    opt.run.include_full_image ? &img : nullptr, opt.backend.model_name);
  out.verdict = query_backend(req, opt.backend);
  const auto t2 = std::chrono::steady_clock::now();

  // Timings are measurements; under the mock backend every reported time is
  // pinned to zero so reruns emit byte-identical JSON.
  if (!opt.backend.use_mock) {
    out.mine_seconds = std::chrono::duration<double>(t1 - t0).count();
    out.total_seconds = std::chrono::duration<double>(t2 - t0).count();
  }
  return out;
}

int cmd_mine(const CliOptions& opt) {
  const MineResult result = mine_evidence_file(opt.image_path, opt.run);
  const std::string manifest = serialize_pack(result.pack, opt.run.out_dir);

  ordered_json doc;
  doc["image_id"] = result.pack.image_id;
  doc["manifest"] = manifest;
  doc["entries"] = result.pack.entries.size();
  doc["patches_total"] = result.pack.patches_total;
  doc["token_reduction"] = token_reduction(result.pack);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_detect(const CliOptions& opt) {
  const PromptTemplate tmpl = load_template(opt.run.prompt_template_path);
  const DetectOutcome out = run_detect(opt.image_path, opt, tmpl);

  ordered_json doc;
  doc["image_id"] = out.mined.pack.image_id;
  doc["label"] = verdict_label_name(out.verdict.label);
  doc["raw_text"] = out.verdict.raw_text;
  doc["latency"] = out.verdict.latency_seconds;
  doc["pack_size"] = out.mined.pack.entries.size();
  doc["patches_total"] = out.mined.pack.patches_total;
  doc["token_reduction"] = token_reduction(out.mined.pack);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

std::vector<std::pair<std::string, std::string>> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path);
  std::vector<std::pair<std::string, std::string>> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == "image_id,label") continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::SchemaError, "labels line missing comma: " + line);
    }
    labels.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  return labels;
}

int cmd_bench(const CliOptions& opt) {
  std::vector<std::string> images;
  if (!fs::is_directory(opt.dir_path)) {
    throw Error(ErrorKind::FileNotFound, opt.dir_path + " is not a directory");
  }
  for (const auto& entry : fs::directory_iterator(opt.dir_path)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") {
      images.push_back(entry.path().string());
    }
  }
  if (images.empty()) {
    throw Error(ErrorKind::EmptyDirectory, "no PNG or JPEG files in " + opt.dir_path);
  }
  std::sort(images.begin(), images.end());

  std::vector<std::pair<std::string, std::string>> labels;
  if (!opt.labels_path.empty()) labels = read_labels(opt.labels_path);
  const auto label_for = [&](const std::string& id) -> std::string {
    for (const auto& [lid, label] : labels) {
      if (lid == id) return label;
    }
    return "";
  };

  const PromptTemplate tmpl = load_template(opt.run.prompt_template_path);
  std::vector<ordered_json> rows(images.size());
  std::vector<std::string> row_errors(images.size());
  std::atomic<size_t> next{0};

  const auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < images.size(); i = next.fetch_add(1)) {
      try {
        const DetectOutcome out = run_detect(images[i], opt, tmpl);
        double fused_mean = 0.0;
        double fused_max = out.mined.fused.data.empty() ? 0.0 : out.mined.fused.data[0];
        for (double v : out.mined.fused.data) {
          fused_mean += v;
          fused_max = std::max(fused_max, v);
        }
        fused_mean /= static_cast<double>(out.mined.fused.size());

        ordered_json row;
        row["image_id"] = out.mined.pack.image_id;
        row["verdict"] = verdict_label_name(out.verdict.label);
        row["raw_text"] = out.verdict.raw_text;
        row["pack_size"] = out.mined.pack.entries.size();
        row["fused_mean"] = fused_mean;
        row["fused_max"] = fused_max;
        row["timing"] = {{"mine", out.mine_seconds},
                         {"query", out.verdict.latency_seconds},
                         {"total", out.total_seconds}};
        rows[i] = std::move(row);
      } catch (const Error& e) {
        row_errors[i] = std::string(e.kind_name()) + ": " + e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.run.jobs, static_cast<int>(images.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (size_t i = 0; i < images.size(); ++i) {
    if (!row_errors[i].empty()) {
      throw Error(ErrorKind::IoError, images[i] + ": " + row_errors[i]);
    }
  }

  // Accuracy / F1 with Fake as the positive class; Unparsed rows are counted
  // separately and excluded from both metrics.
  int tp = 0, fp = 0, fn = 0, tn = 0, unparsed = 0, labeled = 0;
  for (const auto& row : rows) {
    const std::string verdict = row["verdict"].get<std::string>();
    if (verdict == "Unparsed") {
      ++unparsed;
      continue;
    }
    const std::string truth = label_for(row["image_id"].get<std::string>());
    if (truth.empty()) continue;
    ++labeled;
    const bool pred_fake = verdict == "Fake";
    const bool is_fake = truth == "Fake";
    if (pred_fake && is_fake) ++tp;
    else if (pred_fake && !is_fake) ++fp;
    else if (!pred_fake && is_fake) ++fn;
    else ++tn;
  }

  ordered_json doc;
  doc["images"] = images.size();
  doc["unparsed"] = unparsed;
  if (labeled > 0) {
    doc["accuracy"] = static_cast<double>(tp + tn) / labeled;
    const int denom_p = tp + fp;
    const int denom_r = tp + fn;
    if (denom_p == 0 && denom_r == 0) {
      doc["f1"] = nullptr;  // no positives anywhere: F1 undefined
    } else if (tp == 0) {
      doc["f1"] = 0.0;
    } else {
      const double precision = static_cast<double>(tp) / denom_p;
      const double recall = static_cast<double>(tp) / denom_r;
      doc["f1"] = 2.0 * precision * recall / (precision + recall);
    }
  } else {
    doc["accuracy"] = nullptr;
    doc["f1"] = nullptr;
  }
  doc["rows"] = rows;
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_synthbench(const CliOptions& opt) {
  if (opt.region.size() != 4) {
    throw Error(ErrorKind::InvalidConfig, "--region needs x y w h");
  }
  ManipulationSpec spec;
  spec.kind = manipulation_kind_from_name(opt.kind);
  spec.region = {opt.region[0], opt.region[1], opt.region[2], opt.region[3]};
  spec.strength = opt.strength;
  spec.seed = opt.manip_seed;

  const LocalizationReport report = evaluate_localization(opt.n_seeds, spec, opt.run);

  ordered_json doc;
  doc["kind"] = opt.kind;
  doc["strength"] = spec.strength;
  doc["region"] = {spec.region.x, spec.region.y, spec.region.w, spec.region.h};
  doc["n_seeds"] = report.n_seeds;
  doc["hit_at_k"] = report.hit_at_k;
  doc["hit_std"] = report.hit_std;
  doc["mask_recall"] = report.mask_recall;
  doc["recall_std"] = report.recall_std;
  doc["records"] = ordered_json::array();
  for (const SeedRecord& rec : report.records) {
    doc["records"].push_back({{"seed", rec.seed},
                              {"hit", rec.hit},
                              {"recall", rec.recall},
                              {"pack_size", rec.pack_size}});
  }

  std::error_code ec;
  fs::create_directories(opt.run.out_dir, ec);
  const std::string report_path = (fs::path(opt.run.out_dir) / "report.json").string();
  std::ofstream out(report_path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + report_path);
  out << doc.dump(2) << "\n";

  ordered_json summary;
  summary["kind"] = opt.kind;
  summary["n_seeds"] = report.n_seeds;
  summary["hit_at_k"] = report.hit_at_k;
  summary["mask_recall"] = report.mask_recall;
  summary["report"] = report_path;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int error_exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Timeout:
    case ErrorKind::HttpError:
    case ErrorKind::MalformedResponse:
      return 3;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch-level forgery evidence miner"};
  app.require_subcommand(1);
  CliOptions opt;

  CLI::App* mine = app.add_subcommand("mine", "Mine an evidence pack from one image");
  mine->add_option("image", opt.image_path, "PNG or JPEG input")->required();
  add_run_flags(mine, opt);

  CLI::App* detect = app.add_subcommand("detect", "Mine evidence and query the verdict backend");
  detect->add_option("image", opt.image_path, "PNG or JPEG input")->required();
  add_run_flags(detect, opt);

  CLI::App* bench = app.add_subcommand("bench", "Batch detection over a directory");
  bench->add_option("dir", opt.dir_path, "Directory of images")->required();
  bench->add_option("--labels", opt.labels_path, "CSV file: image_id,label");
  add_run_flags(bench, opt);

  CLI::App* synth = app.add_subcommand("synthbench", "Synthetic manipulation localization suite");
  synth->add_option("--n-seeds", opt.n_seeds, "Number of seeded trials");
  synth->add_option("--kind", opt.kind, "splice_noise|splice_blur|spectral_boost|copy_move");
  synth->add_option("--region", opt.region, "Manipulated rectangle: x y w h")->expected(4);
  synth->add_option("--strength", opt.strength, "Manipulation strength");
  synth->add_option("--manip-seed", opt.manip_seed, "Base seed for the trials");
  add_run_flags(synth, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    validate(opt.run);
    finalize_backend(opt);
    if (mine->parsed()) return cmd_mine(opt);
    if (detect->parsed()) return cmd_detect(opt);
    if (bench->parsed()) return cmd_bench(opt);
    if (synth->parsed()) return cmd_synthbench(opt);
  } catch (const Error& e) {
    ordered_json err;
    err["error"] = e.kind_name();
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return error_exit_code(e.kind());
  } catch (const std::exception& e) {
    ordered_json err;
    err["error"] = "Internal";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 4;
  }
  return 0;
}
