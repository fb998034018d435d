#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sivcav::scenarios {

enum class Format { text, document };

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    Format format = Format::document;
};

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 2 validation error, 3 fit non-convergence
    std::string message;
    std::vector<std::filesystem::path> files;  // artifacts, in write order
};

// Known scenario ids: cavity-report, modes-infer, ple, g2, zeeman, spin,
// purcell-fit, sensitivity, sweep.
bool scenario_known(const std::string& id);

// Execute one experiment config (JSON text). Never throws: problems come
// back as exit codes with a message naming the offending field.
RunOutcome run_config_text(const std::string& config_json, const RunOptions& options);
RunOutcome run_config_file(const std::filesystem::path& config_path, const RunOptions& options);

}  // namespace sivcav::scenarios
