#pragma once

#include "duet/error.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace nlohmann {

template <typename T>
struct adl_serializer<std::optional<T>> {
    static void to_json(json& j, const std::optional<T>& value) {
        if (value) {
            j = *value;
        } else {
            j = nullptr;
        }
    }

    static void from_json(const json& j, std::optional<T>& value) {
        if (j.is_null()) {
            value.reset();
        } else {
            value = j.get<T>();
        }
    }
};

}  // namespace nlohmann

namespace duet {

using Json = nlohmann::json;

/// Reads a mandatory field, converting nlohmann type errors into BadArguments
/// that name the offending key.
template <typename T>
T required_field(const Json& j, const char* key, ErrorCode code = ErrorCode::BadArguments) {
    if (!j.is_object() || !j.contains(key)) {
        throw Error(code, std::string("missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(code, std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
T optional_field(const Json& j, const char* key, T fallback, ErrorCode code = ErrorCode::BadArguments) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(code, std::string("field '") + key + "': " + e.what());
    }
}

/// Parses a JSON document; parse failures become `code`.
Json parse_json(const std::string& text, ErrorCode code, const std::string& what);

/// Reads and parses a JSON file; missing files raise IoError.
Json read_json_file(const std::string& path, ErrorCode parse_code);

std::string read_text_file(const std::string& path);

/// Writes via a temporary sibling and rename so readers never observe a torn file.
void write_text_file_atomic(const std::string& path, const std::string& content);

/// Stable pretty-printed form used for every file the project emits.
std::string dump_stable(const Json& j);

}  // namespace duet
