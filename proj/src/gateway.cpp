#include "evmine/gateway.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "evmine/error.hpp"

namespace evmine {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string base64_encode(const std::vector<uint8_t>& bytes) {
  static const char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(table[(v >> 6) & 63]);
    out.push_back(table[v & 63]);
  }
  const size_t rest = bytes.size() - i;
  if (rest == 1) {
    const uint32_t v = bytes[i] << 16;
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(table[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::InvalidConfig, "endpoint must include a scheme: " + url);
  }
  const size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

// Pulls "score=<number>" values out of the request's text parts.
std::vector<double> extract_scores(const DetectionRequest& req) {
  std::vector<double> scores;
  for (const MessagePart& part : req.parts) {
    if (part.kind != MessagePart::Kind::Text) continue;
    size_t pos = 0;
    while ((pos = part.text.find("score=", pos)) != std::string::npos) {
      pos += 6;
      const char* start = part.text.c_str() + pos;
      char* end = nullptr;
      const double v = std::strtod(start, &end);
      if (end != start) scores.push_back(v);
    }
  }
  return scores;
}

std::string response_text(const std::string& body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::MalformedResponse, "backend response is not JSON");
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    throw Error(ErrorKind::MalformedResponse, "backend response has no choices");
  }
  const auto& message = doc["choices"][0];
  if (message.contains("message") && message["message"].contains("content")) {
    const auto& content = message["message"]["content"];
    if (content.is_string()) return content.get<std::string>();
    if (content.is_array()) {
      std::string text;
      for (const auto& part : content) {
        if (part.contains("text") && part["text"].is_string()) {
          text += part["text"].get<std::string>();
        }
      }
      return text;
    }
  }
  throw Error(ErrorKind::MalformedResponse, "backend response is missing the text field");
}

}  // namespace

PromptTemplate PromptTemplate::defaults() {
  PromptTemplate t;
  t.system_text =
      "You are a forensic image analyst. The user provides cropped evidence patches "
      "mined from a single photograph, each with its grid position and an anomaly "
      "score (higher means more suspicious). Judge whether the photograph has been "
      "manipulated or synthesized.";
  t.per_evidence_caption = "Evidence {idx}: grid cell ({r},{c}), score={score}.";
  t.question_text =
      "Considering all evidence patches above, is the source image authentic or "
      "manipulated? Answer with exactly one word: Real or Fake.";
  return t;
}

const char* verdict_label_name(VerdictLabel label) {
  switch (label) {
    case VerdictLabel::Real: return "Real";
    case VerdictLabel::Fake: return "Fake";
    case VerdictLabel::Unparsed: return "Unparsed";
  }
  return "Unparsed";
}

DetectionRequest build_request(const EvidencePack& pack, const PromptTemplate& tmpl,
                               bool include_full_image, const ImageBuffer* full_image,
                               const std::string& model_name) {
  if (pack.entries.empty()) throw Error(ErrorKind::EmptyEvidence, "cannot prompt with an empty pack");

  DetectionRequest req;
  req.model_name = model_name;
  req.parts.push_back({MessagePart::Kind::Text, tmpl.system_text, {}});
  int idx = 1;
  for (const EvidenceEntry& entry : pack.entries) {
    std::string caption = tmpl.per_evidence_caption;
    replace_all(caption, "{idx}", std::to_string(idx));
    replace_all(caption, "{r}", std::to_string(entry.candidate.coord.r));
    replace_all(caption, "{c}", std::to_string(entry.candidate.coord.c));
    replace_all(caption, "{score}", format_score(entry.candidate.score));
    req.parts.push_back({MessagePart::Kind::Text, caption, {}});
    req.parts.push_back({MessagePart::Kind::Image, "", entry.crop});
    ++idx;
  }
  if (include_full_image && full_image != nullptr) {
    req.parts.push_back({MessagePart::Kind::Image, "", *full_image});
  }
  req.parts.push_back({MessagePart::Kind::Text, tmpl.question_text, {}});
  return req;
}

VerdictLabel parse_verdict(const std::string& text) {
  // Whole-word, case-insensitive; when both labels occur the last one wins.
  long last_real = -1;
  long last_fake = -1;
  const auto is_letter = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  };
  std::string lower(text);
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  for (const std::string word : {std::string("real"), std::string("fake")}) {
    size_t pos = 0;
    while ((pos = lower.find(word, pos)) != std::string::npos) {
      const bool left_ok = pos == 0 || !is_letter(lower[pos - 1]);
      const size_t end = pos + word.size();
      const bool right_ok = end >= lower.size() || !is_letter(lower[end]);
      if (left_ok && right_ok) {
        if (word == "real") {
          last_real = static_cast<long>(pos);
        } else {
          last_fake = static_cast<long>(pos);
        }
      }
      pos += 1;
    }
  }
  if (last_real < 0 && last_fake < 0) return VerdictLabel::Unparsed;
  if (last_fake > last_real) return VerdictLabel::Fake;
  return VerdictLabel::Real;
}

std::string mock_backend(const DetectionRequest& req, double threshold) {
  const std::vector<double> scores = extract_scores(req);
  double mean = 0.0;
  if (!scores.empty()) {
    for (double s : scores) mean += s;
    mean /= static_cast<double>(scores.size());
  }
  return mean > threshold ? "Fake" : "Real";
}

std::string request_body_json(const DetectionRequest& req) {
  ordered_json body;
  body["model"] = req.model_name;
  body["messages"] = ordered_json::array();

  size_t first_user_part = 0;
  if (!req.parts.empty() && req.parts.front().kind == MessagePart::Kind::Text) {
    body["messages"].push_back({{"role", "system"}, {"content", req.parts.front().text}});
    first_user_part = 1;
  }
  ordered_json content = ordered_json::array();
  for (size_t i = first_user_part; i < req.parts.size(); ++i) {
    const MessagePart& part = req.parts[i];
    if (part.kind == MessagePart::Kind::Text) {
      content.push_back({{"type", "text"}, {"text", part.text}});
    } else {
      content.push_back(
          {{"type", "image_url"},
           {"image_url",
            {{"url", "data:image/png;base64," + base64_encode(encode_png(part.image))}}}});
    }
  }
  body["messages"].push_back({{"role", "user"}, {"content", content}});
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_tokens;
  return body.dump();
}

Verdict query_backend(const DetectionRequest& req, const BackendConfig& cfg) {
  Verdict verdict;
  if (cfg.use_mock) {
    // Offline path: no transport, latency pinned to zero for reproducibility.
    verdict.raw_text = mock_backend(req, cfg.mock_threshold);
    verdict.label = parse_verdict(verdict.raw_text);
    verdict.latency_seconds = 0.0;
    verdict.backend = "mock";
    return verdict;
  }

  const ParsedUrl url = split_url(cfg.endpoint);
  const std::string body = request_body_json(req);

  httplib::Client client(url.base);
  client.set_connection_timeout(std::chrono::duration<double>(cfg.timeout_seconds));
  client.set_read_timeout(std::chrono::duration<double>(cfg.timeout_seconds));
  client.set_write_timeout(std::chrono::duration<double>(cfg.timeout_seconds));
  httplib::Headers headers;
  if (!cfg.auth_token.empty()) {
    headers.emplace("Authorization", "Bearer " + cfg.auth_token);
  }

  double backoff = cfg.backoff_seconds;
  const auto start = std::chrono::steady_clock::now();
  for (int attempt = 0;; ++attempt) {
    httplib::Result res = client.Post(url.path, headers, body, "application/json");
    if (res) {
      if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorKind::HttpError,
                    "backend returned status " + std::to_string(res->status));
      }
      verdict.raw_text = response_text(res->body);
      verdict.label = parse_verdict(verdict.raw_text);
      verdict.latency_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      verdict.backend = "http";
      return verdict;
    }
    if (attempt >= cfg.retries) {
      throw Error(ErrorKind::Timeout, "backend unreachable after " +
                                          std::to_string(attempt + 1) + " attempts: " +
                                          httplib::to_string(res.error()));
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
    backoff *= 2.0;
  }
}

}  // namespace evmine
