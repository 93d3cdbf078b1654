#include "httplib.h"

#include "duet/gateway.hpp"

namespace duet::gateway {

namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::InvalidConfig, "endpoint '" + url + "' lacks a scheme");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

Json post_json(const ProviderConfig& config, const std::string& endpoint, const Json& body) {
    if (endpoint.empty()) throw Error(ErrorCode::ProviderError, "no endpoint configured");
    const Url url = split_url(endpoint);
    httplib::Client client(url.origin);
    const auto seconds = config.timeout_ms / 1000;
    const auto micros = (config.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    if (!config.auth_token.empty()) client.set_bearer_token_auth(config.auth_token);

    note_network_operation();
    auto res = client.Post(url.path, body.dump(), "application/json");
    if (!res) {
        throw Error(ErrorCode::ProviderError, "request to " + endpoint + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorCode::ProviderError, "provider returned HTTP " + std::to_string(res->status),
                    Json{{"body", res->body}});
    }
    try {
        return Json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ProviderError, std::string("provider body is not JSON: ") + e.what());
    }
}

}  // namespace

HttpProvider::HttpProvider(ProviderConfig config) : config_(std::move(config)) {}

std::string HttpProvider::complete(const RenderedPrompt& prompt) {
    const Json body{{"model", config_.model},
                    {"temperature", 0},
                    {"response_format", {{"type", "json_object"}}},
                    {"messages", Json::array({{{"role", "user"}, {"content", prompt.text}}})}};
    const Json reply = post_json(config_, config_.endpoint, body);
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::ProviderError, "unexpected completion envelope", Json{{"body", reply}});
    }
}

std::string HttpProvider::generate_image(const RenderedPrompt& prompt) {
    const Json body{{"model", config_.image_model}, {"prompt", prompt.text}, {"n", 1}};
    const Json reply = post_json(config_, config_.image_endpoint, body);
    try {
        return reply.at("data").at(0).at("url").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::ProviderError, "image reply carries no url", Json{{"body", reply}});
    }
}

}  // namespace duet::gateway
