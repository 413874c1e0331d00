#pragma once

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "kgnet/error.hpp"

namespace kgnet::net {

/// `scheme://host[:port]` plus the path, split for httplib.
struct Url {
  std::string origin;
  std::string path;
};

inline Url split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw UserError("not an absolute URL: " + std::string(url));
  }
  const std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw UserError("unsupported URL scheme '" + std::string(scheme) + "' in " + std::string(url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Url out;
  if (path_start == std::string_view::npos) {
    out.origin = std::string(url);
    out.path = "/";
  } else {
    out.origin = std::string(url.substr(0, path_start));
    out.path = std::string(url.substr(path_start));
  }
  if (out.origin.size() <= scheme_end + 3) throw UserError("URL has no host: " + std::string(url));
  return out;
}

inline std::unique_ptr<httplib::Client> make_client(const std::string& origin,
                                                    std::chrono::milliseconds timeout) {
  auto client = std::make_unique<httplib::Client>(origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client->set_connection_timeout(secs.count(), usecs.count());
  client->set_read_timeout(secs.count(), usecs.count());
  client->set_write_timeout(secs.count(), usecs.count());
  client->set_keep_alive(false);
  return client;
}

}  // namespace kgnet::net
