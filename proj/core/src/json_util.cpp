#include "duet/json_util.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace duet {

Json parse_json(const std::string& text, ErrorCode code, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(code, what + ": " + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json_file(const std::string& path, ErrorCode parse_code) {
    return parse_json(read_text_file(path), parse_code, path);
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw Error(ErrorCode::IoError, "short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error(ErrorCode::IoError, "rename to '" + path + "' failed: " + ec.message());
}

std::string dump_stable(const Json& j) {
    return j.dump(2) + "\n";
}

}  // namespace duet
