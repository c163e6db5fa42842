#pragma once

#include <httplib.h>

#include "lightcast/ingest.hpp"

namespace lightcast {

/// Live transport on cpp-httplib. Splits the URL into base and path so the
/// client negotiates TLS when built with OpenSSL support.
inline HttpGetFn make_http_transport(double timeout_seconds = 30.0) {
    return [timeout_seconds](const std::string& url) -> HttpResponse {
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) return {0, ""};
        const auto path_start = url.find('/', scheme_end + 3);
        const std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
        const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

        httplib::Client client(base);
        client.set_connection_timeout(std::chrono::duration<double>(timeout_seconds));
        client.set_read_timeout(std::chrono::duration<double>(timeout_seconds));
        client.set_follow_location(true);
        auto result = client.Get(path);
        if (!result) return {0, ""};
        return {result->status, result->body};
    };
}

} // namespace lightcast
