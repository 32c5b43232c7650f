// cli.hpp: entry point of the sasc command-line tool.
#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace sasc::app {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitUnstable = 3,
    kExitNumerical = 4,
    kExitOracle = 5,
};

const char* tool_version() noexcept;

// Directory holding the built-in figure configs (fig2.json, ...).
std::filesystem::path builtin_config_dir();

struct RunOptions {
    std::string command;  // spectrum | asymmetry | snr | fmap | chain | oracle | optimize | figures
    std::string figure;   // figures only
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;  // empty: output.dir from the config
    std::string format;   // empty: output.format from the config
    long long seed = -1;  // < 0: task.oracle.seed from the config
    unsigned threads = 1;
};

// Runs one command and returns its exit code. Diagnostics go to stderr.
int run(const RunOptions& options);

int main_entry(int argc, char** argv);

}  // namespace sasc::app
