#include "httplib.h"

#include "forge/errors.hpp"
#include "forge/planner.hpp"

namespace forge {

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("llm endpoint must start with http:// or https://");
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("llm endpoint must start with http:// or https://");
  const auto path_start = url.find('/', scheme_end + 3);
  Url out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (out.origin.size() <= scheme_end + 3) throw ConfigError("llm endpoint has no host");
  return out;
}

}  // namespace

LlmTransport http_transport(const LlmConfig& config) {
  const Url url = split_url(config.endpoint);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.origin.starts_with("https")) throw ConfigError("this build has no TLS support; use an http:// endpoint");
#endif
  const auto timeout = config.timeout;
  const std::string key = config.api_key;
  return [url, timeout, key](const std::string& body) -> std::string {
    httplib::Client client(url.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
    auto res = client.Post(url.path, headers, body, "application/json");
    if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) throw TransportError("HTTP status " + std::to_string(res->status));
    return res->body;
  };
}

}  // namespace forge
