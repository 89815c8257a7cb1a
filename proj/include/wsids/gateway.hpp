#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

#include "wsids/detector.hpp"

namespace wsids {

struct GatewayConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;  // 0 picks a free port
  std::string upstream = "http://127.0.0.1:9000";
  std::filesystem::path model_dir = "model";
  int reject_status = 403;
  std::filesystem::path alarm_log = "alarms.jsonl";
  std::size_t body_cap = 4 << 20;  // bytes

  // The cap must leave room for any message the node limit admits, so that
  // oversize payloads are judged by the detector rather than cut short.
  // Throws ConfigError.
  void validate(const DetectorConfig& detector) const;
};

// Hex SHA-256 over rules.xml followed by profile.tsv.
std::string model_fingerprint(const std::filesystem::path& model_dir);

// Inline filter in front of a SOAP service. POSTs with an XML content type
// are classified; Allow is forwarded to the upstream and its response relayed,
// alarms are answered with reject_status and a SOAP fault. Every rejection is
// appended to the alarm log as one JSON line.
class Gateway {
 public:
  Gateway(GatewayConfig config, std::shared_ptr<const DetectionModel> model, std::string fingerprint);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Returns the bound port. Throws IoFailure.
  int bind();
  // Serves until stop() is called.
  void run();
  void stop();
  void wait_until_ready() const;

  std::size_t forwarded() const noexcept;
  std::size_t rejected() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Loads the model from config.model_dir and serves until the process stops.
// Throws on startup failure.
void serve(const GatewayConfig& config, const DetectorConfig& detector);

}  // namespace wsids
