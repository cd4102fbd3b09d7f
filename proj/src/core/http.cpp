#include "xlv/http.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "xlv/errors.hpp"

namespace xlv {

Url Url::parse(const std::string& text) {
  Url url;
  const auto scheme_end = text.find("://");
  if (scheme_end == std::string::npos) throw NetworkError("not an absolute URL: " + text);
  url.scheme = text.substr(0, scheme_end);
  if (url.scheme != "http" && url.scheme != "https") throw NetworkError("unsupported URL scheme: " + text);
  const auto rest = text.substr(scheme_end + 3);
  const auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  url.path = slash == std::string::npos ? "/" : rest.substr(slash);
  url.port = url.scheme == "https" ? 443 : 80;
  if (const auto colon = authority.rfind(':'); colon != std::string::npos) {
    try {
      url.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw NetworkError("bad port in URL: " + text);
    }
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw NetworkError("missing host in URL: " + text);
  url.host = authority;
  return url;
}

std::string Url::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

HttpResponse http_request(const std::string& url_text, const std::string& body,
                          const std::map<std::string, std::string>& headers, std::chrono::seconds timeout) {
  const Url url = Url::parse(url_text);
  httplib::Client client(url.origin());
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_follow_location(true);
  httplib::Headers h;
  std::string content_type = "application/json";
  for (const auto& [key, value] : headers) {
    if (key == "Content-Type") {
      content_type = value;
    } else {
      h.emplace(key, value);
    }
  }
  httplib::Result res = body.empty() ? client.Get(url.path, h) : client.Post(url.path, h, body, content_type);
  if (!res) throw NetworkError("request to " + url_text + " failed: " + httplib::to_string(res.error()));
  return HttpResponse{res->status, res->body};
}

}  // namespace xlv
