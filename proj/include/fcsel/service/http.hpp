#pragma once

#include <string>

// Before httplib: <resolv.h> defines a _res macro that collides with Eigen.
#include "fcsel/service/api.hpp"

#include <httplib.h>

namespace fcsel::service {

/// Binds every method on every path to `api`. The caller owns the server's
/// lifetime (listen / stop).
inline void mount(httplib::Server& server, Api& api) {
    auto forward = [&api](const httplib::Request& req, httplib::Response& res) {
        ApiRequest ar{req.method, req.path, {}, req.body};
        for (const auto& [k, v] : req.params) ar.query.emplace(k, v);
        auto out = api.handle(ar);
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json");
    };
    const std::string any = R"(/.*)";
    server.Get(any, forward);
    server.Post(any, forward);
    server.Put(any, forward);
    server.Delete(any, forward);
}

}  // namespace fcsel::service
