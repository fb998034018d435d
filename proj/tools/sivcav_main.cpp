// Command line front end. `run` executes one experiment config and writes its
// artifacts; `reproduce` recomputes the pinned reference checks and prints a
// reference-vs-computed table.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sivcav/acceptance.hpp"
#include "sivcav/scenarios.hpp"

namespace {

int run_command(const std::string& config, const std::string& out_dir, bool have_seed,
                std::uint64_t seed, const std::string& format) {
    sivcav::scenarios::RunOptions options;
    options.out_dir = out_dir;
    if (have_seed) options.seed_override = seed;
    options.format = format == "text" ? sivcav::scenarios::Format::text
                                      : sivcav::scenarios::Format::document;

    const sivcav::scenarios::RunOutcome outcome =
        sivcav::scenarios::run_config_file(config, options);
    if (!outcome.message.empty())
        (outcome.exit_code == 0 ? std::cout : std::cerr) << outcome.message << "\n";
    for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << "\n";
    return outcome.exit_code;
}

int reproduce_command() {
    const auto results = sivcav::acceptance::run_all();
    std::cout << sivcav::acceptance::format_table(results);
    return sivcav::acceptance::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator and estimation toolkit for an emitter coupled to a "
                 "hemispherical microcavity"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::string format = "document";

    CLI::App* run = app.add_subcommand("run", "execute one experiment config");
    run->add_option("--config", config, "experiment config (JSON)")->required();
    CLI::Option* seed_opt =
        run->add_option("--seed", seed, "override the RNG seed in the config");
    run->add_option("--out", out_dir, "directory for output artifacts");
    run->add_option("--format", format, "artifact format")
        ->check(CLI::IsMember({"text", "document"}));

    CLI::App* reproduce =
        app.add_subcommand("reproduce", "recompute the pinned reference checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        // Usage problems are validation problems: report the offending flag
        // and use the same exit code as a bad config field.
        std::cerr << e.what() << "\n";
        return 2;
    }

    if (reproduce->parsed()) return reproduce_command();
    return run_command(config, out_dir, static_cast<bool>(*seed_opt), seed, format);
}
