#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "treise/commands.hpp"
#include "treise/version.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

treise::RunConfig build_config(const CommonArgs& args) {
    treise::RunConfig cfg;
    if (!args.config_path.empty()) cfg = treise::load_config_file(args.config_path);
    treise::apply_overrides(cfg, args.overrides);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed_set) cfg.seed = args.seed;
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "Key=value configuration file");
    cmd->add_option("-s,--set", args.overrides,
                    "Override a config entry as key=value (repeatable; wins over the file)");
    cmd->add_option("-o,--out", args.out_dir, "Run directory (overrides out_dir)");
    cmd->add_option("--seed", args.seed, "Root seed (overrides seed)")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized-mask attribution for time-series classifiers"};
    app.set_version_flag("--version", std::string("treise ") + treise::kVersion);
    app.require_subcommand(1);

    CommonArgs args;
    const std::vector<std::string> commands = {"generate", "train",  "attribute",
                                               "evaluate", "bench",  "report"};
    const std::vector<std::string> descriptions = {
        "Generate the synthetic anomaly dataset with ground truth",
        "Train the linear softmax classifier",
        "Compute attribution maps for the evaluation subset",
        "Run the evaluation metrics over stored maps",
        "Measure mask-generation/attribution runtime and pass counts",
        "Re-render tables from a stored metric summary"};
    for (std::size_t i = 0; i < commands.size(); ++i)
        add_common(app.add_subcommand(commands[i], descriptions[i]), args);

    CLI11_PARSE(app, argc, argv);

    try {
        const treise::RunConfig cfg = build_config(args);
        for (const auto& name : commands)
            if (app.got_subcommand(name)) return treise::dispatch_command(name, cfg);
        return treise::kExitConfigError;
    } catch (const treise::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return treise::kExitConfigError;
    } catch (const treise::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return treise::kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return treise::kExitInternalError;
    }
}
