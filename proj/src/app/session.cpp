#include "session.hpp"

#include "sasc/app/cli.hpp"
#include "sasc/app/config.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace sasc::app {

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("SASC_LOG");
        if (!env) return LogLevel::kWarn;
        const std::string v = env;
        if (v == "error") return LogLevel::kError;
        if (v == "info") return LogLevel::kInfo;
        if (v == "debug") return LogLevel::kDebug;
        return LogLevel::kWarn;
    }();
    return level;
}

void log(LogLevel level, const std::string& message) {
    if (static_cast<int>(level) > static_cast<int>(log_level())) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::cerr << "sasc: " << names[static_cast<int>(level)] << ": " << message << '\n';
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

Session::Session(nlohmann::json cfg, std::string command, unsigned threads)
    : cfg_(std::move(cfg)), command_(std::move(command)), threads_(threads == 0 ? 1 : threads),
      hash_(config_hash(cfg_)), timestamp_(utc_timestamp()) {}

bool Session::csv() const { return cfg_.at("output").at("format") == "csv"; }

std::vector<std::string> Session::metadata_lines() const {
    return {
        std::string("tool sasc ") + tool_version(),
        "command " + command_,
        "config_hash fnv1a64:" + hash_,
        "parameters " + cfg_.at("system").dump(),
        "generated " + timestamp_,
    };
}

nlohmann::json Session::metadata() const {
    return {{"tool", "sasc"},
            {"version", tool_version()},
            {"command", command_},
            {"config_hash", "fnv1a64:" + hash_},
            {"parameters", cfg_.at("system")},
            {"generated", timestamp_}};
}

std::string Session::file_name(const std::string& name, const char* ext) const {
    return cfg_.at("output").at("prefix").get<std::string>() + name + ext;
}

void Session::table(const std::string& name, const SpectrumTable& t) {
    std::ostringstream os;
    if (csv()) {
        write_csv(os, t, metadata_lines());
        files_.push_back({file_name(name, ".csv"), os.str()});
    } else {
        os << nlohmann::json{{"metadata", metadata()}, {"data", to_json(t)}}.dump(1) << '\n';
        files_.push_back({file_name(name, ".json"), os.str()});
    }
}

void Session::rows(const std::string& name, const RowTable& t) {
    std::ostringstream os;
    if (csv()) {
        write_csv(os, t, metadata_lines());
        files_.push_back({file_name(name, ".csv"), os.str()});
    } else {
        os << nlohmann::json{{"metadata", metadata()}, {"data", to_json(t)}}.dump(1) << '\n';
        files_.push_back({file_name(name, ".json"), os.str()});
    }
}

void Session::report(const std::string& name, const nlohmann::json& data) {
    files_.push_back(
        {file_name(name, ".json"), nlohmann::json{{"metadata", metadata()}, {"data", data}}.dump(1) + "\n"});
}

void Session::text(const std::string& file, const std::string& content) {
    files_.push_back({cfg_.at("output").at("prefix").get<std::string>() + file, content});
}

std::vector<std::string> Session::flush() {
    const std::filesystem::path dir = cfg_.at("output").at("dir").get<std::string>();
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    for (const auto& f : files_) {
        const auto path = dir / f.file;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << f.content;
        written.push_back(path.string());
        log(LogLevel::kInfo, "wrote " + path.string());
    }
    files_.clear();
    return written;
}

}  // namespace sasc::app
