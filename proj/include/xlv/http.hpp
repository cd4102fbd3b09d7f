#pragma once

#include <chrono>
#include <map>
#include <string>

namespace xlv {

struct HttpResponse {
  int status = 0;
  std::string body;
};

struct Url {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;  // includes query, starts with '/'

  /// Throws NetworkError on anything that is not an http(s) URL.
  static Url parse(const std::string& text);
  std::string origin() const;
};

/// GET or POST (when `body` is non-empty). Throws NetworkError when no HTTP
/// response is obtained; non-2xx statuses are returned, not thrown.
HttpResponse http_request(const std::string& url, const std::string& body = {},
                          const std::map<std::string, std::string>& headers = {},
                          std::chrono::seconds timeout = std::chrono::seconds(30));

}  // namespace xlv
