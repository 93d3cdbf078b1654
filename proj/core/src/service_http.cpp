#include "httplib.h"

#include "duet/service.hpp"

namespace duet::service {

namespace {

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, const Error& e) {
    res.status = http_status(e.code());
    res.set_content(e.to_json().dump(), kJson);
}

std::string bearer(const httplib::Request& req) {
    const auto header = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (header.rfind(prefix, 0) != 0) throw Error(ErrorCode::Unauthorized, "missing bearer token");
    return header.substr(prefix.size());
}

Json body_json(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    return parse_json(req.body, ErrorCode::BadArguments, "request body");
}

Json command_response(const session::CommandResult& r) {
    Json j{{"version", r.version}, {"result", r.result}};
    if (r.event) j["event"] = session::to_frame(*r.event);
    if (!r.warning.empty()) j["warning"] = r.warning;
    return j;
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            send_error(res, e);
        } catch (const std::exception& e) {
            send_error(res, Error(ErrorCode::BadArguments, e.what()));
        }
    };
}

std::uint64_t query_u64(const httplib::Request& req, const char* key, std::uint64_t fallback) {
    if (!req.has_param(key)) return fallback;
    try {
        return std::stoull(req.get_param_value(key));
    } catch (const std::exception&) {
        throw Error(ErrorCode::BadArguments, std::string("query parameter '") + key + "' is not a number");
    }
}

}  // namespace

void mount(httplib::Server& server, Service& service) {
    server.Post("/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    const Json body = body_json(req);
                    auto config = required_field<profile::SessionConfig>(body, "config", ErrorCode::InvalidConfig);
                    const auto opened =
                        service.create_session(optional_field<std::string>(body, "session_id", ""), std::move(config));
                    res.status = 201;
                    res.set_content(Json{{"session_id", opened.session_id}, {"tokens", opened.tokens}}.dump(), kJson);
                }));

    server.Post(R"(/sessions/([^/]+)/join)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    const auto r = service.join(req.matches[1], bearer(req));
                    res.set_content(command_response(r).dump(), kJson);
                }));

    server.Post(R"(/sessions/([^/]+)/commands/([^/]+))",
                guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    const auto r = service.command(req.matches[1], bearer(req), req.matches[2], body_json(req));
                    res.set_content(command_response(r).dump(), kJson);
                }));

    server.Get(R"(/sessions/([^/]+)/events)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                   const std::string id = req.matches[1];
                   const std::string token = bearer(req);
                   const auto after = query_u64(req, "after", 0);
                   const int wait_ms = static_cast<int>(query_u64(req, "wait_ms", 0));
                   service.authenticate(id, token);
                   if (req.get_header_value("Accept").find("text/event-stream") == std::string::npos) {
                       const auto frames = service.frames(id, token, after, wait_ms);
                       res.set_content(Json{{"frames", frames}}.dump(), kJson);
                       return;
                   }
                   // Server-sent events; `limit` closes the stream after that many frames.
                   const auto limit = query_u64(req, "limit", 0);
                   auto cursor = std::make_shared<std::uint64_t>(after);
                   auto sent = std::make_shared<std::uint64_t>(0);
                   res.set_chunked_content_provider(
                       "text/event-stream",
                       [&service, id, token, cursor, sent, limit](std::size_t, httplib::DataSink& sink) {
                           if (!sink.is_writable()) return false;
                           std::vector<Json> frames;
                           try {
                               frames = service.frames(id, token, *cursor, 500);
                           } catch (const Error&) {
                               sink.done();
                               return true;
                           }
                           for (const auto& f : frames) {
                               const std::string chunk = "id: " + std::to_string(f.at("seq").get<std::uint64_t>()) +
                                                         "\nevent: " + f.at("kind").get<std::string>() +
                                                         "\ndata: " + f.dump() + "\n\n";
                               if (!sink.write(chunk.data(), chunk.size())) return false;
                               *cursor = f.at("seq").get<std::uint64_t>();
                               if (limit && ++*sent >= limit) {
                                   sink.done();
                                   return true;
                               }
                           }
                           return true;
                       });
               }));

    server.Get(R"(/sessions/([^/]+)/snapshot)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                   res.set_content(service.save_snapshot(req.matches[1], bearer(req)).dump(), kJson);
               }));

    server.Put(R"(/sessions/([^/]+)/snapshot)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                   const Json snapshot = body_json(req);
                   const std::string id = req.matches[1];
                   if (snapshot.contains("state") && snapshot.at("state").value("session_id", "") != id) {
                       throw Error(ErrorCode::BadArguments, "snapshot belongs to another session");
                   }
                   // Replacing a live session needs its coordinator credential.
                   const auto existing = service.session_ids();
                   if (std::find(existing.begin(), existing.end(), id) != existing.end() &&
                       service.authenticate(id, bearer(req)).role != session::ParticipantRole::coordinator) {
                       throw Error(ErrorCode::Unauthorized, "snapshots are coordinator-only");
                   }
                   const std::string restored = service.restore_snapshot(snapshot);
                   res.set_content(Json{{"session_id", restored}}.dump(), kJson);
               }));
}

}  // namespace duet::service
