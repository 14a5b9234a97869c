#pragma once

#include <string>
#include <vector>

#include "evmine/evidence.hpp"

namespace evmine {

// Prompt skeleton. The caption template may use {idx}, {r}, {c} and {score}
// placeholders; question_text must instruct the model to answer with exactly
// "Real" or "Fake".
struct PromptTemplate {
  std::string system_text;
  std::string per_evidence_caption;
  std::string question_text;

  static PromptTemplate defaults();
};

struct MessagePart {
  enum class Kind { Text, Image } kind = Kind::Text;
  std::string text;          // for Text parts
  ImageBuffer image;         // for Image parts (encoded as base64 PNG on the wire)
};

struct DetectionRequest {
  std::string model_name;
  std::vector<MessagePart> parts;  // [system, (caption, crop)*, full?, question]
  double temperature = 0.0;
  int max_tokens = 16;
};

enum class VerdictLabel { Real, Fake, Unparsed };

struct Verdict {
  VerdictLabel label = VerdictLabel::Unparsed;
  std::string raw_text;
  double latency_seconds = 0.0;
  std::string backend;
};

struct BackendConfig {
  std::string endpoint;       // e.g. http://host:port/v1/chat/completions
  std::string auth_token;
  std::string model_name;
  double timeout_seconds = 60.0;
  int retries = 3;
  double backoff_seconds = 1.0;  // doubled after each failed attempt
  double mock_threshold = 1.0;   // mean fused score above this => "Fake"
  bool use_mock = true;
};

const char* verdict_label_name(VerdictLabel label);

// Assembles the part sequence from the pack in pack order. Throws
// EmptyEvidence.
DetectionRequest build_request(const EvidencePack& pack, const PromptTemplate& tmpl,
                               bool include_full_image = false,
                               const ImageBuffer* full_image = nullptr,
                               const std::string& model_name = "");

// Case-insensitive whole-word scan for "real"/"fake"; when both occur the
// last occurrence wins; neither -> Unparsed.
VerdictLabel parse_verdict(const std::string& text);

// Deterministic offline backend: answers "Fake" iff the mean of the
// "score=<v>" values found in the request's text parts exceeds threshold.
std::string mock_backend(const DetectionRequest& req, double threshold);

// Sends the request to the configured backend (or the mock) and parses the
// verdict. HTTP transport uses the chat-completions wire format with base64
// PNG image parts. Throws Timeout, HttpError, MalformedResponse. A verdict
// that fails to parse is returned as Unparsed, never retried.
Verdict query_backend(const DetectionRequest& req, const BackendConfig& cfg);

// Serializes the request to the exact JSON body sent over the wire
// (deterministic; exposed for tests and request auditing).
std::string request_body_json(const DetectionRequest& req);

}  // namespace evmine
