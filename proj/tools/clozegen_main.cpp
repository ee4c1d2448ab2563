#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cloze/error.hpp"
#include "cloze/pipeline.hpp"

namespace {

struct StageArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> workdir;
    std::optional<int> jobs;
};

void add_common_flags(CLI::App* cmd, StageArgs& args) {
    cmd->add_option("--config", args.config, "pipeline config file (JSON)")->required();
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--workdir", args.workdir, "override the artifact directory");
    cmd->add_option("--jobs", args.jobs, "worker threads where a stage supports them");
}

cloze::PipelineConfig make_config(const StageArgs& args) {
    cloze::CliOverrides overrides;
    overrides.seed = args.seed;
    if (args.workdir) overrides.workdir = std::filesystem::path(*args.workdir);
    overrides.jobs = args.jobs;
    return cloze::load_config(args.config, overrides);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cloze test dataset builder and evaluation harness"};
    app.require_subcommand(1);

    StageArgs args;
    CLI::App* mine = app.add_subcommand("mine", "extract and filter stems from the corpus");
    CLI::App* embed = app.add_subcommand("embed", "train word vectors on the corpus");
    CLI::App* generate = app.add_subcommand("generate", "build candidate sets and question files");
    CLI::App* evaluate = app.add_subcommand("evaluate", "train/evaluate the scoring model grid");
    CLI::App* report = app.add_subcommand("report", "aggregate the report CSV to stdout");
    for (CLI::App* cmd : {mine, embed, generate, evaluate, report}) add_common_flags(cmd, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad flags are configuration errors
    }

    try {
        const cloze::PipelineConfig cfg = make_config(args);
        if (mine->parsed()) {
            cloze::run_mine(cfg, std::cerr);
        } else if (embed->parsed()) {
            cloze::run_embed(cfg, std::cerr);
        } else if (generate->parsed()) {
            cloze::run_generate(cfg, std::cerr);
        } else if (evaluate->parsed()) {
            cloze::run_evaluate(cfg, std::cerr);
        } else if (report->parsed()) {
            cloze::run_report(cfg, std::cout);
        }
    } catch (const cloze::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const cloze::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
