#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gel/numeric/dense.hpp"

namespace gel::cli {

enum ExitCode : int {
    kSuccess = 0,
    kInternal = 1,
    kUsage = 2,
    kNumerical = 3,
    kIo = 4,
};

/// Flag values that take precedence over the JSON config file.
struct Overrides {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
    std::optional<unsigned> workers;
    bool metrics = false;
    bool baseline = false;
    std::optional<Index> k;
    std::optional<std::filesystem::path> features;
    std::optional<std::filesystem::path> edges;
    std::optional<std::filesystem::path> labels;
    std::optional<std::filesystem::path> checkpoint;
    std::optional<std::size_t> epochs;
    std::optional<double> learning_rate;
    std::optional<Index> latent_dim;
    std::optional<std::string> grid;
    std::optional<std::vector<double>> values;
    std::optional<std::size_t> seeds;
};

/// Defaults, then the config file, then flags. The result carries every
/// section (data, synthetic, train, score, sweep) in canonical form and is
/// what gets written to `resolved_config.json`.
nlohmann::json resolve_config(const std::string& command, const Overrides& flags);

void cmd_generate(const nlohmann::json& cfg);
void cmd_train(const nlohmann::json& cfg);
void cmd_score(const nlohmann::json& cfg);
void cmd_sweep(const nlohmann::json& cfg);

/// Parses `args` (without the program name), runs the command and maps
/// failures to exit codes: 2 usage or validation, 3 numerical abort, 4 IO.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gel::cli
