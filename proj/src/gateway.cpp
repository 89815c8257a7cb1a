#include "wsids/gateway.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "wsids/error.hpp"
#include "wsids/forest.hpp"

namespace wsids {

namespace fs = std::filesystem;
using nlohmann::json;

void GatewayConfig::validate(const DetectorConfig& detector) const {
  if (listen_port < 0 || listen_port > 65535) throw Error(ErrorKind::ConfigError, "listen_port out of range");
  if (reject_status < 400 || reject_status > 599) {
    throw Error(ErrorKind::ConfigError, "reject_status must be a 4xx or 5xx code");
  }
  // "<a/>" is the smallest element, so 4 bytes per admitted node.
  if (body_cap < 4 * detector.max_nodes) {
    throw Error(ErrorKind::ConfigError, "body_cap must be at least 4 * max_nodes = " +
                                            std::to_string(4 * detector.max_nodes) + " bytes");
  }
  if (!upstream.starts_with("http://")) throw Error(ErrorKind::ConfigError, "upstream must be an http:// URL");
}

std::string model_fingerprint(const fs::path& model_dir) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::IoFailure, "SHA-256 unavailable");
  }
  for (auto name : {kRulesFile, kProfileFile}) {
    const std::string bytes = read_file(model_dir / name);
    EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size());
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

namespace {

constexpr const char* kVerdictHeader = "X-WS-IDS-Verdict";

struct Upstream {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing '/'
};

Upstream split_upstream(const std::string& url) {
  const auto slash = url.find('/', std::string("http://").size());
  Upstream u;
  u.origin = url.substr(0, slash);
  if (slash != std::string::npos) u.prefix = url.substr(slash);
  while (!u.prefix.empty() && u.prefix.back() == '/') u.prefix.pop_back();
  return u;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fault_body(Outcome outcome) {
  return std::string("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n") +
         "<soap:Envelope xmlns:soap=\"http://schemas.xmlsoap.org/soap/envelope/\"><soap:Body><soap:Fault>"
         "<faultcode>soap:Client</faultcode><faultstring>request rejected: " +
         std::string(to_string(outcome)) + "</faultstring></soap:Fault></soap:Body></soap:Envelope>\n";
}

bool xml_content_type(const std::string& type) {
  return type.find("xml") != std::string::npos;
}

}  // namespace

struct Gateway::Impl {
  GatewayConfig config;
  std::shared_ptr<const DetectionModel> model;
  std::string fingerprint;
  Upstream upstream;
  httplib::Server server;
  std::mutex log_mutex;
  std::ofstream log;
  std::atomic<std::size_t> forwarded{0};
  std::atomic<std::size_t> rejected{0};

  void record(const httplib::Request& req, const Verdict& verdict, int status) {
    json reasons = json::array();
    for (const auto& r : verdict.reasons) reasons.push_back({{"where", r.where}, {"why", r.why}});
    const json line = {{"time", utc_now()},     {"remote", req.remote_addr}, {"path", req.path},
                       {"status", status},      {"outcome", to_string(verdict.outcome)},
                       {"reasons", std::move(reasons)}};
    const std::lock_guard<std::mutex> lock(log_mutex);
    log << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    log.flush();
  }

  void reject(const httplib::Request& req, httplib::Response& res, const Verdict& verdict, int status) {
    ++rejected;
    record(req, verdict, status);
    res.status = status;
    res.set_header(kVerdictHeader, std::string(to_string(verdict.outcome)));
    res.set_content(fault_body(verdict.outcome), "text/xml; charset=utf-8");
  }

  void handle_post(const httplib::Request& req, httplib::Response& res) {
    if (!xml_content_type(req.get_header_value("Content-Type"))) {
      res.status = 415;
      res.set_content("unsupported media type\n", "text/plain");
      return;
    }
    if (req.body.size() > config.body_cap) {
      reject(req, res, Verdict{Outcome::ParseAlarm, {{"message", "body exceeds the size cap"}}}, 413);
      return;
    }
    const Verdict verdict = classify(model, req.body);
    if (verdict.alarm()) {
      reject(req, res, verdict, config.reject_status);
      return;
    }
    httplib::Client client(upstream.origin);
    client.set_connection_timeout(5);
    client.set_read_timeout(30);
    httplib::Headers headers;
    for (const char* name : {"SOAPAction"}) {
      if (req.has_header(name)) headers.emplace(name, req.get_header_value(name));
    }
    auto result = client.Post(upstream.prefix + req.path, headers, req.body, req.get_header_value("Content-Type"));
    if (!result) {
      std::cerr << "gateway: upstream " << config.upstream << " failed: " << httplib::to_string(result.error())
                << '\n';
      res.status = 502;
      res.set_content("upstream unavailable\n", "text/plain");
      return;
    }
    ++forwarded;
    res.status = result->status;
    res.set_header(kVerdictHeader, std::string(to_string(Outcome::Allow)));
    const std::string type =
        result->has_header("Content-Type") ? result->get_header_value("Content-Type") : "text/xml";
    res.set_content(result->body, type);
  }
};

Gateway::Gateway(GatewayConfig config, std::shared_ptr<const DetectionModel> model, std::string fingerprint)
    : impl_(std::make_unique<Impl>()) {
  if (!model) throw Error(ErrorKind::ModelNotLoaded, "gateway needs a detection model");
  config.validate(model->config());
  impl_->config = std::move(config);
  impl_->model = std::move(model);
  impl_->fingerprint = std::move(fingerprint);
  impl_->upstream = split_upstream(impl_->config.upstream);
  impl_->log.open(impl_->config.alarm_log, std::ios::app);
  if (!impl_->log) throw Error(ErrorKind::IoFailure, "cannot open alarm log " + impl_->config.alarm_log.string());

  auto& svr = impl_->server;
  Impl* self = impl_.get();
  svr.set_payload_max_length(self->config.body_cap);
  svr.Get("/health", [self](const httplib::Request&, httplib::Response& res) {
    const json body = {{"status", "ok"}, {"fingerprint", self->fingerprint}};
    res.set_content(body.dump() + "\n", "application/json");
  });
  svr.Post(".*", [self](const httplib::Request& req, httplib::Response& res) { self->handle_post(req, res); });
  const auto not_allowed = [](const httplib::Request&, httplib::Response& res) {
    res.status = 405;
    res.set_header("Allow", "POST");
    res.set_content("method not allowed\n", "text/plain");
  };
  svr.Get(".*", not_allowed);
  svr.Put(".*", not_allowed);
  svr.Delete(".*", not_allowed);
  svr.Patch(".*", not_allowed);
  svr.Options(".*", not_allowed);
  svr.set_error_handler([self](const httplib::Request& req, httplib::Response& res) {
    if (res.status != 413 || res.has_header(kVerdictHeader)) return httplib::Server::HandlerResponse::Unhandled;
    // The body was too large to be read at all.
    self->reject(req, res, Verdict{Outcome::ParseAlarm, {{"message", "body exceeds the size cap"}}}, 413);
    return httplib::Server::HandlerResponse::Handled;
  });
}

Gateway::~Gateway() { stop(); }

int Gateway::bind() {
  auto& svr = impl_->server;
  const auto& c = impl_->config;
  if (c.listen_port == 0) {
    const int port = svr.bind_to_any_port(c.listen_host);
    if (port < 0) throw Error(ErrorKind::IoFailure, "cannot bind " + c.listen_host);
    return port;
  }
  if (!svr.bind_to_port(c.listen_host, c.listen_port)) {
    throw Error(ErrorKind::IoFailure, "cannot bind " + c.listen_host + ":" + std::to_string(c.listen_port));
  }
  return c.listen_port;
}

void Gateway::run() { impl_->server.listen_after_bind(); }

void Gateway::stop() {
  if (impl_) impl_->server.stop();
}

void Gateway::wait_until_ready() const { impl_->server.wait_until_ready(); }

std::size_t Gateway::forwarded() const noexcept { return impl_->forwarded; }
std::size_t Gateway::rejected() const noexcept { return impl_->rejected; }

void serve(const GatewayConfig& config, const DetectorConfig& detector) {
  auto model = std::make_shared<const DetectionModel>(load_model_dir(config.model_dir, detector));
  Gateway gateway(config, std::move(model), model_fingerprint(config.model_dir));
  const int port = gateway.bind();
  std::cerr << "gateway: listening on " << config.listen_host << ":" << port << ", upstream " << config.upstream
            << '\n';
  gateway.run();
}

}  // namespace wsids
