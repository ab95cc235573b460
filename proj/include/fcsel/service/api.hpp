#pragma once

#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fcsel/error.hpp"
#include "fcsel/json_io.hpp"
#include "fcsel/service/session.hpp"

namespace fcsel::service {

struct ApiRequest {
    std::string method;  // GET, POST, PUT, DELETE
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    json body;
};

inline int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::validation: return 400;
        case ErrorCode::not_found: return 404;
        case ErrorCode::unprocessable:
        case ErrorCode::insufficient_history:
        case ErrorCode::degenerate: return 422;
        case ErrorCode::runtime: return 500;
    }
    return 500;
}

/// Routes the session endpoints:
///   POST   /sessions                                   {dataset_path, config} or {snapshot}
///   GET    /sessions/{id}/projection
///   GET    /sessions/{id}/models
///   GET    /sessions/{id}/snapshot
///   PUT    /sessions/{id}/cluster                      {product_ids: [...]}
///   PUT    /sessions/{id}/weights                      {w_accuracy, w_variance, w_applicability, top_k?}
///   GET    /sessions/{id}/products/{pid}
///   GET    /sessions/{id}/products/{pid}/risk?n=10
///   DELETE /sessions/{id}/products/{pid}/similar/{rid}?n=10
/// Errors come back as {code, message, details}.
class Api {
public:
    explicit Api(SessionStore& store) : store_(store) {}

    ApiResponse handle(const ApiRequest& req) {
        try {
            return route(req);
        } catch (const Error& e) {
            json details = json::object();
            if (!e.subjects().empty()) details["ids"] = e.subjects();
            return {http_status(e.code()), error_payload(e.code(), e.what(), std::move(details))};
        } catch (const json::exception& e) {
            return {400, error_payload(ErrorCode::validation, std::string("malformed JSON: ") + e.what())};
        } catch (const std::exception& e) {
            return {500, error_payload(ErrorCode::runtime, e.what())};
        }
    }

private:
    static std::vector<std::string> segments(std::string_view path) {
        std::vector<std::string> out;
        for (auto s : detail::split(path, '/'))
            if (!s.empty()) out.emplace_back(s);
        return out;
    }

    static json parse_body(const ApiRequest& req) {
        if (detail::trim(req.body).empty()) return json::object();
        return json::parse(req.body);
    }

    static std::size_t neighbours(const ApiRequest& req) {
        auto it = req.query.find("n");
        if (it == req.query.end()) return kDefaultNeighbours;
        std::size_t n = 0;
        auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), n);
        if (ec != std::errc{} || ptr != it->second.data() + it->second.size() || n < 1)
            throw Error(ErrorCode::validation, "query parameter n must be a positive integer");
        return n;
    }

    static ApiResponse method_not_allowed(const ApiRequest& req) {
        return {405, error_payload(ErrorCode::validation, "method " + req.method + " not allowed on " + req.path)};
    }

    ApiResponse route(const ApiRequest& req) {
        const auto seg = segments(req.path);
        if (seg.empty() || seg[0] != "sessions")
            return {404, error_payload(ErrorCode::not_found, "no route for " + req.path)};

        if (seg.size() == 1) {
            if (req.method != "POST") return method_not_allowed(req);
            return create(parse_body(req));
        }

        auto session = store_.get(seg[1]);
        const std::string& m = req.method;
        if (seg.size() == 3 && seg[2] == "projection") {
            if (m != "GET") return method_not_allowed(req);
            return {200, session->projection()};
        }
        if (seg.size() == 3 && seg[2] == "models") {
            if (m != "GET") return method_not_allowed(req);
            return {200, session->models()};
        }
        if (seg.size() == 3 && seg[2] == "snapshot") {
            if (m != "GET") return method_not_allowed(req);
            return {200, session->snapshot()};
        }
        if (seg.size() == 3 && seg[2] == "cluster") {
            if (m != "PUT") return method_not_allowed(req);
            auto body = parse_body(req);
            return {200, session->set_cluster(detail::get_as<std::vector<std::string>>(body, "product_ids"))};
        }
        if (seg.size() == 3 && seg[2] == "weights") {
            if (m != "PUT") return method_not_allowed(req);
            auto body = parse_body(req);
            std::optional<int> top_k;
            if (body.contains("top_k")) top_k = detail::get_as<int>(body, "top_k");
            return {200, session->set_weights(weights_from_json(body), top_k)};
        }
        if (seg.size() >= 4 && seg[2] == "products") {
            const auto& pid = seg[3];
            if (seg.size() == 4) {
                if (m != "GET") return method_not_allowed(req);
                return {200, session->product_detail(pid)};
            }
            if (seg.size() == 5 && seg[4] == "risk") {
                if (m != "GET") return method_not_allowed(req);
                return {200, session->risk_view(pid, neighbours(req))};
            }
            if (seg.size() == 6 && seg[4] == "similar") {
                if (m != "DELETE") return method_not_allowed(req);
                return {200, session->remove_similar(pid, seg[5], neighbours(req))};
            }
        }
        return {404, error_payload(ErrorCode::not_found, "no route for " + req.path)};
    }

    ApiResponse create(const json& body) {
        std::shared_ptr<Session> session;
        if (body.contains("snapshot")) {
            session = store_.restore(body["snapshot"]);
        } else {
            auto path = detail::get_as<std::string>(body, "dataset_path");
            session = store_.create(path, session_config_from_json(body.value("config", json::object())));
        }
        return {200, session->summary()};
    }

    SessionStore& store_;
};

}  // namespace fcsel::service
