#include "duet/gateway.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <sstream>

namespace duet::gateway {

// Defined in the generated builtin_templates.cpp.
const std::vector<std::pair<std::string_view, std::string_view>>& builtin_template_sources();

namespace {

std::atomic<std::uint64_t> g_network_operations{0};

bool valid_placeholder_name(std::string_view name) {
    if (name.empty()) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

}  // namespace

std::set<std::string> placeholders_in(std::string_view body) {
    std::set<std::string> out;
    std::size_t pos = 0;
    while ((pos = body.find("{{", pos)) != std::string_view::npos) {
        const std::size_t close = body.find("}}", pos + 2);
        if (close == std::string_view::npos) break;
        const std::string_view name = body.substr(pos + 2, close - pos - 2);
        if (valid_placeholder_name(name)) {
            out.emplace(name);
            pos = close + 2;
        } else {
            pos += 2;
        }
    }
    return out;
}

PromptTemplate::PromptTemplate(std::string template_id, std::string body)
    : id_(std::move(template_id)), body_(std::move(body)), required_(placeholders_in(body_)) {}

PromptTemplate::PromptTemplate(std::string template_id, std::string body, std::set<std::string> required)
    : PromptTemplate(std::move(template_id), std::move(body)) {
    if (required != required_) {
        throw Error(ErrorCode::InvariantViolation,
                    "template '" + id_ + "' declares variables that differ from its placeholders");
    }
}

RenderedPrompt render_template(const PromptTemplate& tmpl, const std::map<std::string, std::string>& variables) {
    for (const auto& name : tmpl.required_variables()) {
        if (!variables.count(name)) throw Error(ErrorCode::UnboundVariable, name);
    }
    for (const auto& [name, value] : variables) {
        if (!tmpl.required_variables().count(name)) throw Error(ErrorCode::UnknownVariable, name);
    }

    RenderedPrompt out{tmpl.id(), variables, {}};
    const std::string& body = tmpl.body();
    out.text.reserve(body.size() * 2);
    std::size_t pos = 0;
    while (pos < body.size()) {
        const std::size_t open = body.find("{{", pos);
        if (open == std::string::npos) {
            out.text.append(body, pos, std::string::npos);
            break;
        }
        const std::size_t close = body.find("}}", open + 2);
        if (close == std::string::npos) {
            out.text.append(body, pos, std::string::npos);
            break;
        }
        const std::string name = body.substr(open + 2, close - open - 2);
        if (!valid_placeholder_name(name)) {
            out.text.append(body, pos, open + 2 - pos);
            pos = open + 2;
            continue;
        }
        out.text.append(body, pos, open - pos);
        out.text += variables.at(name);
        pos = close + 2;
    }
    return out;
}

TemplateLibrary TemplateLibrary::builtin() {
    TemplateLibrary lib;
    for (const auto& [id, body] : builtin_template_sources()) {
        lib.add(PromptTemplate(std::string(id), std::string(body)));
    }
    return lib;
}

TemplateLibrary TemplateLibrary::load_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "templates directory '" + dir + "' not found");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    TemplateLibrary lib;
    for (const auto& path : files) {
        lib.add(PromptTemplate(path.stem().string(), read_text_file(path.string())));
    }
    return lib;
}

void TemplateLibrary::add(PromptTemplate tmpl) {
    templates_[tmpl.id()] = std::move(tmpl);
}

void TemplateLibrary::merge(const TemplateLibrary& other) {
    for (const auto& [id, tmpl] : other.templates_) templates_[id] = tmpl;
}

const PromptTemplate& TemplateLibrary::get(std::string_view id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw Error(ErrorCode::InvalidConfig, "unknown template '" + std::string(id) + "'");
    return it->second;
}

bool TemplateLibrary::contains(std::string_view id) const {
    return templates_.find(id) != templates_.end();
}

std::vector<std::string> TemplateLibrary::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, t] : templates_) out.push_back(id);
    return out;
}

namespace {

bool type_matches(const std::string& type, const Json& v) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "integer") return v.is_number_integer();
    if (type == "number") return v.is_number();
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    return false;
}

std::optional<std::string> violation_at(const Json& schema, const Json& value, const std::string& where) {
    if (schema.contains("type")) {
        const Json& t = schema.at("type");
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(t.get<std::string>(), value);
        } else if (t.is_array()) {
            for (const auto& alt : t) ok = ok || type_matches(alt.get<std::string>(), value);
        }
        if (!ok) return where + ": expected type " + t.dump();
    }
    if (schema.contains("enum")) {
        const Json& options = schema.at("enum");
        if (std::find(options.begin(), options.end(), value) == options.end()) {
            return where + ": value " + value.dump() + " not in enum";
        }
    }
    if (value.is_string() && schema.contains("minLength")) {
        if (value.get<std::string>().size() < schema.at("minLength").get<std::size_t>()) {
            return where + ": string shorter than minLength";
        }
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema.at("required")) {
                if (!value.contains(key.get<std::string>())) {
                    return where + ": missing required property '" + key.get<std::string>() + "'";
                }
            }
        }
        if (schema.contains("properties")) {
            for (const auto& [key, sub] : schema.at("properties").items()) {
                if (value.contains(key)) {
                    if (auto v = violation_at(sub, value.at(key), where + "/" + key)) return v;
                }
            }
        }
    }
    if (value.is_array()) {
        if (schema.contains("minItems") && value.size() < schema.at("minItems").get<std::size_t>()) {
            return where + ": fewer items than minItems";
        }
        if (schema.contains("items")) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (auto v = violation_at(schema.at("items"), value.at(i), where + "/" + std::to_string(i))) return v;
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> schema_violation(const Json& schema, const Json& value) {
    return violation_at(schema, value, "");
}

Json parse_reply(const std::string& raw) {
    std::string body = raw;
    const auto fence = body.find("```");
    if (fence != std::string::npos) {
        auto start = body.find('\n', fence);
        auto end = body.rfind("```");
        if (start != std::string::npos && end != std::string::npos && end > start) {
            body = body.substr(start + 1, end - start - 1);
        }
    }
    try {
        return Json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedOutput, std::string("reply is not JSON: ") + e.what(), Json{{"raw", raw}});
    }
}

// ---------------------------------------------------------------------------

namespace {

std::string_view kind_name(CallKind k) {
    return k == CallKind::text ? "text" : "image";
}

CallKind kind_from(const std::string& s) {
    if (s == "text") return CallKind::text;
    if (s == "image") return CallKind::image;
    throw Error(ErrorCode::SchemaMismatch, "unknown transcript entry kind '" + s + "'");
}

}  // namespace

Transcript Transcript::load(const std::string& path) {
    return from_json(read_json_file(path, ErrorCode::SchemaMismatch));
}

Transcript Transcript::from_json(const Json& j) {
    const int version = required_field<int>(j, "schema_version", ErrorCode::SchemaMismatch);
    if (version != kSchemaVersion) {
        throw Error(ErrorCode::SchemaMismatch, "transcript schema_version " + std::to_string(version));
    }
    Transcript t;
    for (const auto& e : required_field<Json>(j, "entries", ErrorCode::SchemaMismatch)) {
        TranscriptEntry entry;
        entry.key = required_field<std::string>(e, "key", ErrorCode::SchemaMismatch);
        entry.template_id = required_field<std::string>(e, "template_id", ErrorCode::SchemaMismatch);
        entry.ordinal = required_field<int>(e, "ordinal", ErrorCode::SchemaMismatch);
        entry.kind = kind_from(required_field<std::string>(e, "kind", ErrorCode::SchemaMismatch));
        entry.prompt = optional_field<std::string>(e, "prompt", "");
        entry.reply = required_field<Json>(e, "reply", ErrorCode::SchemaMismatch);
        t.append(std::move(entry));
    }
    return t;
}

Json Transcript::to_json() const {
    Json entries = Json::array();
    for (const auto& e : entries_) {
        entries.push_back(Json{{"key", e.key},
                               {"template_id", e.template_id},
                               {"ordinal", e.ordinal},
                               {"kind", std::string(kind_name(e.kind))},
                               {"prompt", e.prompt},
                               {"reply", e.reply}});
    }
    return Json{{"schema_version", kSchemaVersion}, {"entries", entries}};
}

void Transcript::save(const std::string& path) const {
    write_text_file_atomic(path, dump_stable(to_json()));
}

const TranscriptEntry* Transcript::find(const std::string& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &entries_[it->second];
}

void Transcript::append(TranscriptEntry entry) {
    index_[entry.key] = entries_.size();
    entries_.push_back(std::move(entry));
}

std::string transcript_key(std::string_view template_id, std::string_view text, int ordinal) {
    std::string material;
    material.reserve(template_id.size() + text.size() + 16);
    material.append(template_id);
    material.push_back('\x1f');
    material.append(text);
    material.push_back('\x1f');
    material.append(std::to_string(ordinal));

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(material.data(), material.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

void to_json(Json& j, const ImageDescriptor& d) {
    j = Json{{"prompt_text", d.prompt_text}, {"uri", d.uri}, {"style", d.style}, {"placeholder", d.placeholder}};
}

void from_json(const Json& j, ImageDescriptor& d) {
    d.prompt_text = required_field<std::string>(j, "prompt_text");
    d.uri = optional_field<std::string>(j, "uri", "");
    d.style = optional_field<std::string>(j, "style", "cartoon");
    d.placeholder = optional_field<bool>(j, "placeholder", false);
}

std::string_view to_string(GatewayMode mode) {
    switch (mode) {
        case GatewayMode::live: return "live";
        case GatewayMode::record: return "record";
        case GatewayMode::replay: return "replay";
    }
    return "?";
}

GatewayMode gateway_mode_from_string(std::string_view text) {
    if (text == "live") return GatewayMode::live;
    if (text == "record") return GatewayMode::record;
    if (text == "replay") return GatewayMode::replay;
    throw Error(ErrorCode::InvalidConfig, "unknown provider mode '" + std::string(text) + "'");
}

ProviderConfig ProviderConfig::from_json(const Json& root) {
    const Json& j = root.contains("provider") ? root.at("provider") : root;
    constexpr auto code = ErrorCode::InvalidConfig;
    ProviderConfig c;
    c.kind = optional_field<std::string>(j, "kind", c.kind, code);
    c.endpoint = optional_field<std::string>(j, "endpoint", "", code);
    c.image_endpoint = optional_field<std::string>(j, "image_endpoint", "", code);
    c.model = optional_field<std::string>(j, "model", "", code);
    c.image_model = optional_field<std::string>(j, "image_model", "", code);
    c.auth_token = optional_field<std::string>(j, "auth_token", "", code);
    c.mode = gateway_mode_from_string(optional_field<std::string>(j, "mode", "replay", code));
    c.timeout_ms = optional_field<int>(j, "timeout_ms", c.timeout_ms, code);
    c.canned_path = optional_field<std::string>(j, "canned_path", "", code);
    return c;
}

ProviderConfig ProviderConfig::load(const std::string& path) {
    ProviderConfig c = from_json(read_json_file(path, ErrorCode::InvalidConfig));
    if (!c.canned_path.empty() && std::filesystem::path(c.canned_path).is_relative()) {
        c.canned_path = (std::filesystem::path(path).parent_path() / c.canned_path).string();
    }
    c.apply_env_overrides();
    return c;
}

void ProviderConfig::apply_env_overrides() {
    auto env = [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (v == nullptr || *v == '\0') return std::nullopt;
        return std::string(v);
    };
    if (auto v = env("DUET_PROVIDER_KIND")) kind = *v;
    if (auto v = env("DUET_PROVIDER_ENDPOINT")) endpoint = *v;
    if (auto v = env("DUET_PROVIDER_IMAGE_ENDPOINT")) image_endpoint = *v;
    if (auto v = env("DUET_PROVIDER_MODEL")) model = *v;
    if (auto v = env("DUET_PROVIDER_IMAGE_MODEL")) image_model = *v;
    if (auto v = env("DUET_PROVIDER_TOKEN")) auth_token = *v;
    if (auto v = env("DUET_PROVIDER_MODE")) mode = gateway_mode_from_string(*v);
    if (auto v = env("DUET_PROVIDER_TIMEOUT_MS")) timeout_ms = std::stoi(*v);
    if (auto v = env("DUET_PROVIDER_CANNED_PATH")) canned_path = *v;
}

CannedProvider::CannedProvider(Json canned) : canned_(std::move(canned)) {}

std::unique_ptr<CannedProvider> CannedProvider::load(const std::string& path) {
    return std::make_unique<CannedProvider>(read_json_file(path, ErrorCode::InvalidConfig));
}

std::string CannedProvider::complete(const RenderedPrompt& prompt) {
    const Json* queue = nullptr;
    if (canned_.contains("text") && canned_["text"].contains(prompt.template_id)) {
        queue = &canned_["text"][prompt.template_id];
    }
    std::size_t& cursor = text_cursor_[prompt.template_id];
    if (queue == nullptr || cursor >= queue->size()) {
        throw Error(ErrorCode::ProviderError, "canned provider has no more replies for '" + prompt.template_id + "'");
    }
    const Json& reply = (*queue)[cursor++];
    return reply.is_string() ? reply.get<std::string>() : reply.dump();
}

std::string CannedProvider::generate_image(const RenderedPrompt& prompt) {
    const Json* queue = nullptr;
    if (canned_.contains("image") && canned_["image"].contains(prompt.template_id)) {
        queue = &canned_["image"][prompt.template_id];
    }
    std::size_t& cursor = image_cursor_[prompt.template_id];
    if (queue == nullptr || cursor >= queue->size()) {
        throw Error(ErrorCode::ProviderError, "canned provider has no image for '" + prompt.template_id + "'");
    }
    return (*queue)[cursor++].get<std::string>();
}

std::uint64_t network_operations() {
    return g_network_operations.load();
}

void note_network_operation() {
    g_network_operations.fetch_add(1);
}

// ---------------------------------------------------------------------------

Gateway::Gateway(Transcript transcript) : Gateway(GatewayMode::replay, nullptr, std::move(transcript)) {}

Gateway::Gateway(GatewayMode mode, std::unique_ptr<Provider> provider, Transcript transcript,
                 std::string transcript_path)
    : mode_(mode),
      provider_(std::move(provider)),
      transcript_(std::move(transcript)),
      transcript_path_(std::move(transcript_path)) {
    if (mode_ != GatewayMode::replay && !provider_) {
        throw Error(ErrorCode::InvalidConfig, "live and record modes need a provider");
    }
}

std::unique_ptr<Gateway> Gateway::from_config(const ProviderConfig& config, const std::string& transcript_path) {
    if (config.mode == GatewayMode::replay) {
        return std::make_unique<Gateway>(Transcript::load(transcript_path));
    }
    std::unique_ptr<Provider> provider;
    if (config.kind == "canned") {
        provider = CannedProvider::load(config.canned_path);
    } else if (config.kind == "http") {
        provider = std::make_unique<HttpProvider>(config);
    } else {
        throw Error(ErrorCode::InvalidConfig, "unknown provider kind '" + config.kind + "'");
    }
    return std::make_unique<Gateway>(config.mode, std::move(provider), Transcript{},
                                     config.mode == GatewayMode::record ? transcript_path : std::string{});
}

int Gateway::next_ordinal(const RenderedPrompt& prompt) {
    std::string id = prompt.template_id;
    id.push_back('\x1f');
    id += prompt.text;
    return ordinals_[id]++;
}

void Gateway::record(TranscriptEntry entry) {
    transcript_.append(std::move(entry));
    if (!transcript_path_.empty()) transcript_.save(transcript_path_);
}

Reply Gateway::complete(const RenderedPrompt& prompt, const Json& output_schema) {
    std::lock_guard lock(mutex_);
    completions_.fetch_add(1);
    const int ordinal = next_ordinal(prompt);
    const std::string key = transcript_key(prompt.template_id, prompt.text, ordinal);
    const std::string correlation = prompt.template_id + "#" + key.substr(0, 12);

    Json value;
    if (mode_ == GatewayMode::replay) {
        const TranscriptEntry* entry = transcript_.find(key);
        if (entry == nullptr || entry->kind != CallKind::text) {
            throw Error(ErrorCode::MissingFixture, key,
                        Json{{"template_id", prompt.template_id}, {"ordinal", ordinal}});
        }
        value = entry->reply;
    } else {
        provider_calls_.fetch_add(1);
        const std::string raw = provider_->complete(prompt);
        value = parse_reply(raw);
    }

    // Recorded even when invalid so a replay reproduces the same MalformedOutput.
    if (mode_ == GatewayMode::record) {
        record(TranscriptEntry{key, prompt.template_id, ordinal, CallKind::text, prompt.text, value});
    }
    if (auto violation = schema_violation(output_schema, value)) {
        throw Error(ErrorCode::MalformedOutput, prompt.template_id + *violation, Json{{"raw", value}});
    }
    return Reply{std::move(value), key, correlation};
}

ImageDescriptor Gateway::generate_image(const RenderedPrompt& prompt, std::string style) {
    std::lock_guard lock(mutex_);
    const int ordinal = next_ordinal(prompt);
    const std::string key = transcript_key(prompt.template_id, prompt.text, ordinal);
    ImageDescriptor out{prompt.text, {}, std::move(style), false};

    if (mode_ == GatewayMode::replay) {
        const TranscriptEntry* entry = transcript_.find(key);
        if (entry != nullptr && entry->kind == CallKind::image && entry->reply.contains("uri")) {
            out.uri = entry->reply.at("uri").get<std::string>();
            out.placeholder = optional_field<bool>(entry->reply, "placeholder", false);
        } else {
            out.uri = "placeholder:image/" + key.substr(0, 16);
            out.placeholder = true;
        }
        return out;
    }

    provider_calls_.fetch_add(1);
    out.uri = provider_->generate_image(prompt);
    if (mode_ == GatewayMode::record) {
        record(TranscriptEntry{key, prompt.template_id, ordinal, CallKind::image, prompt.text,
                               Json{{"uri", out.uri}}});
    }
    return out;
}

Transcript Gateway::transcript() const {
    std::lock_guard lock(mutex_);
    return transcript_;
}

bool is_generation_failure(const Error& e) {
    switch (e.code()) {
        case ErrorCode::MissingFixture:
        case ErrorCode::ProviderError:
        case ErrorCode::MalformedOutput:
        case ErrorCode::GenerationUnavailable:
            return true;
        default:
            return false;
    }
}

}  // namespace duet::gateway

namespace duet::gateway {

Error generation_unavailable(const Error& cause) {
    if (cause.code() == ErrorCode::GenerationUnavailable) return cause;
    Json details{{"cause", std::string(to_string(cause.code()))}};
    if (!cause.details().is_null()) details["cause_details"] = cause.details();
    return Error(ErrorCode::GenerationUnavailable, cause.what(), std::move(details));
}

}  // namespace duet::gateway
