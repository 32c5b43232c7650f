// session.hpp: per-invocation output collection and logging for the CLI.
#pragma once

#include "sasc/table.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace sasc::app {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Level from SASC_LOG (error|warn|info|debug), default warn.
LogLevel log_level();
void log(LogLevel level, const std::string& message);

// Collects every artifact in memory; nothing touches the disk until flush(),
// so a command that fails part way leaves no partial output behind.
class Session {
public:
    Session(nlohmann::json cfg, std::string command, unsigned threads);

    const nlohmann::json& cfg() const noexcept { return cfg_; }
    const std::string& hash() const noexcept { return hash_; }
    unsigned threads() const noexcept { return threads_; }
    bool csv() const;

    std::vector<std::string> metadata_lines() const;
    nlohmann::json metadata() const;

    void table(const std::string& name, const SpectrumTable& t);
    void rows(const std::string& name, const RowTable& t);
    void report(const std::string& name, const nlohmann::json& data);
    void text(const std::string& file_name, const std::string& content);

    // Writes all artifacts under output.dir; returns the written paths.
    std::vector<std::string> flush();

private:
    struct Pending {
        std::string file;
        std::string content;
    };
    std::string file_name(const std::string& name, const char* ext) const;

    nlohmann::json cfg_;
    std::string command_;
    unsigned threads_;
    std::string hash_;
    std::string timestamp_;
    std::vector<Pending> files_;
};

}  // namespace sasc::app
