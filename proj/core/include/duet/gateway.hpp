#pragma once

#include "duet/json_util.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace duet::gateway {

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

/// Plain-text prompt body with `{{name}}` placeholders.
class PromptTemplate {
public:
    PromptTemplate() = default;
    /// Derives required_variables from the placeholders in `body`.
    PromptTemplate(std::string template_id, std::string body);
    /// Throws InvariantViolation unless `required` equals the body's placeholder set.
    PromptTemplate(std::string template_id, std::string body, std::set<std::string> required);

    const std::string& id() const { return id_; }
    const std::string& body() const { return body_; }
    const std::set<std::string>& required_variables() const { return required_; }

private:
    std::string id_;
    std::string body_;
    std::set<std::string> required_;
};

std::set<std::string> placeholders_in(std::string_view body);

struct RenderedPrompt {
    std::string template_id;
    std::map<std::string, std::string> bound_variables;
    std::string text;

    bool operator==(const RenderedPrompt&) const = default;
};

/// Pure substitution. UnboundVariable names the first missing placeholder;
/// UnknownVariable names the first variable the template does not declare.
RenderedPrompt render_template(const PromptTemplate& tmpl, const std::map<std::string, std::string>& variables);

class TemplateLibrary {
public:
    /// Templates compiled into the library.
    static TemplateLibrary builtin();
    /// Loads every `*.txt` in `dir`; the file stem is the template id. Files
    /// override builtin templates of the same id when layered via `merge`.
    static TemplateLibrary load_dir(const std::string& dir);

    void add(PromptTemplate tmpl);
    void merge(const TemplateLibrary& other);
    const PromptTemplate& get(std::string_view id) const;
    bool contains(std::string_view id) const;
    std::vector<std::string> ids() const;

    RenderedPrompt render(std::string_view id, const std::map<std::string, std::string>& variables) const {
        return render_template(get(id), variables);
    }

private:
    std::map<std::string, PromptTemplate, std::less<>> templates_;
};

// ---------------------------------------------------------------------------
// Output schemas
// ---------------------------------------------------------------------------

/// Validates `value` against a JSON-Schema subset: type, properties, required,
/// items, enum, minItems, minLength. Returns the first violation as a JSON
/// pointer-prefixed message, or nullopt when valid.
std::optional<std::string> schema_violation(const Json& schema, const Json& value);

/// Extracts the JSON payload from a provider reply, tolerating ``` fences.
Json parse_reply(const std::string& raw);

// ---------------------------------------------------------------------------
// Transcript
// ---------------------------------------------------------------------------

enum class CallKind { text, image };

struct TranscriptEntry {
    std::string key;
    std::string template_id;
    int ordinal = 0;
    CallKind kind = CallKind::text;
    std::string prompt;
    Json reply;

    bool operator==(const TranscriptEntry&) const = default;
};

/// Recorded provider replies keyed by content hash.
class Transcript {
public:
    static constexpr int kSchemaVersion = 1;

    static Transcript load(const std::string& path);
    static Transcript from_json(const Json& j);
    Json to_json() const;
    void save(const std::string& path) const;

    const TranscriptEntry* find(const std::string& key) const;
    void append(TranscriptEntry entry);
    const std::vector<TranscriptEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<TranscriptEntry> entries_;
    std::map<std::string, std::size_t> index_;
};

/// SHA-256 (hex) over template id, rendered text and per-prompt call ordinal.
std::string transcript_key(std::string_view template_id, std::string_view text, int ordinal);

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

struct ImageDescriptor {
    std::string prompt_text;
    std::string uri;
    std::string style = "cartoon";
    bool placeholder = false;

    bool operator==(const ImageDescriptor&) const = default;
};

void to_json(Json& j, const ImageDescriptor& d);
void from_json(const Json& j, ImageDescriptor& d);

class Provider {
public:
    virtual ~Provider() = default;
    /// Raw completion text for the prompt. Throws ProviderError.
    virtual std::string complete(const RenderedPrompt& prompt) = 0;
    /// Image URI for the prompt. Throws ProviderError.
    virtual std::string generate_image(const RenderedPrompt& prompt) = 0;
};

enum class GatewayMode { live, record, replay };
std::string_view to_string(GatewayMode mode);
GatewayMode gateway_mode_from_string(std::string_view text);

struct ProviderConfig {
    std::string kind = "http";  // "http" or "canned"
    std::string endpoint;
    std::string image_endpoint;
    std::string model;
    std::string image_model;
    std::string auth_token;
    GatewayMode mode = GatewayMode::replay;
    int timeout_ms = 60000;
    std::string canned_path;

    /// Reads `provider.*` keys from a JSON file, then applies DUET_PROVIDER_*
    /// environment overrides (ENDPOINT, MODEL, MODE, TIMEOUT_MS, TOKEN, ...).
    static ProviderConfig load(const std::string& path);
    static ProviderConfig from_json(const Json& j);
    void apply_env_overrides();
};

/// OpenAI-compatible chat-completions client.
class HttpProvider final : public Provider {
public:
    explicit HttpProvider(ProviderConfig config);
    std::string complete(const RenderedPrompt& prompt) override;
    std::string generate_image(const RenderedPrompt& prompt) override;

private:
    ProviderConfig config_;
};

/// Offline provider that answers each template id from a queue of scripted
/// replies (JSON file: {"text": {template_id: [reply...]}, "image": {...}}).
/// Used to author replay fixtures without a hosted model.
class CannedProvider final : public Provider {
public:
    explicit CannedProvider(Json canned);
    static std::unique_ptr<CannedProvider> load(const std::string& path);

    std::string complete(const RenderedPrompt& prompt) override;
    std::string generate_image(const RenderedPrompt& prompt) override;

private:
    Json canned_;
    std::map<std::string, std::size_t> text_cursor_;
    std::map<std::string, std::size_t> image_cursor_;
};

/// Counts outbound network requests issued by providers in this process.
std::uint64_t network_operations();
void note_network_operation();

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

struct Reply {
    Json value;
    std::string key;
    std::string correlation_id;
};

class Gateway {
public:
    /// Replay-only gateway; never touches a provider.
    explicit Gateway(Transcript transcript);
    /// `transcript_path` receives every appended entry in record mode.
    Gateway(GatewayMode mode, std::unique_ptr<Provider> provider, Transcript transcript = {},
            std::string transcript_path = {});

    static std::unique_ptr<Gateway> from_config(const ProviderConfig& config, const std::string& transcript_path);

    /// Structured completion validated against `output_schema`.
    /// Errors: MissingFixture (replay), ProviderError (live/record), MalformedOutput.
    Reply complete(const RenderedPrompt& prompt, const Json& output_schema);

    /// In replay mode a transcript miss yields a deterministic placeholder.
    ImageDescriptor generate_image(const RenderedPrompt& prompt, std::string style = "cartoon");

    GatewayMode mode() const { return mode_; }
    std::uint64_t completions() const { return completions_.load(); }
    std::uint64_t provider_calls() const { return provider_calls_.load(); }
    Transcript transcript() const;

private:
    int next_ordinal(const RenderedPrompt& prompt);
    void record(TranscriptEntry entry);

    GatewayMode mode_;
    std::unique_ptr<Provider> provider_;
    mutable std::mutex mutex_;
    Transcript transcript_;
    std::string transcript_path_;
    std::map<std::string, int> ordinals_;
    std::atomic<std::uint64_t> completions_{0};
    std::atomic<std::uint64_t> provider_calls_{0};
};

/// True for the errors call sites treat as "generation unavailable".
bool is_generation_failure(const Error& e);

/// Wraps a generation failure as GenerationUnavailable, keeping the original
/// code under details.cause.
Error generation_unavailable(const Error& cause);

}  // namespace duet::gateway
