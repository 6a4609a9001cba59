// Command-line front end: run experiment cells, compare two cells, or run
// the built-in selftest.
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "foxbench/error.hpp"
#include "foxbench/harness.hpp"

namespace {

void apply_kv_overrides(foxbench::ExperimentConfig& cfg,
                        const std::vector<std::string>& pairs) {
    for (const auto& pair : pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos) {
            throw foxbench::DomainError("--set wants key=value, got '" + pair + "'");
        }
        foxbench::apply_override(cfg, pair.substr(0, eq), pair.substr(eq + 1));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"foxbench: population-search SGD against plain SGD and Adam"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Execute one experiment cell");
    std::string config_path;
    std::string dataset, model, optimizer, out_dir;
    std::vector<std::string> overrides;
    int setting = -1;
    std::int64_t seed = -1;
    std::int64_t runs = -1;
    run->add_option("--config", config_path, "key = value config file");
    run->add_option("--dataset", dataset, "synth | csv | mnist");
    run->add_option("--model", model, "logreg | mlp | logreg_dropout");
    run->add_option("--optimizer", optimizer, "foxtsage | sgd | adam");
    run->add_option("--setting", setting, "1 (I=5,P=10), 2 (I=50,P=30), or 0 (custom)");
    run->add_option("--seed", seed, "root seed");
    run->add_option("--runs", runs, "runs per cell");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--set", overrides, "extra key=value overrides (repeatable)");

    // compare
    auto* cmp = app.add_subcommand("compare", "Compare two finished cells");
    std::string dir_a, dir_b, format = "md", cmp_out = ".";
    cmp->add_option("--a", dir_a, "baseline cell directory")->required();
    cmp->add_option("--b", dir_b, "candidate cell directory")->required();
    cmp->add_option("--format", format, "csv | json | md");
    cmp->add_option("--out", cmp_out, "directory for the comparison files");

    // selftest
    auto* selftest = app.add_subcommand("selftest", "Run the built-in sanity checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            foxbench::ExperimentConfig cfg;
            if (!config_path.empty()) cfg = foxbench::load_config(config_path);
            if (!dataset.empty()) cfg.dataset = dataset;
            if (!model.empty()) cfg.model = model;
            if (!optimizer.empty()) cfg.optimizer = optimizer;
            if (setting >= 0) cfg.setting = setting;
            if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
            if (runs > 0) cfg.runs = static_cast<std::size_t>(runs);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            apply_kv_overrides(cfg, overrides);

            const auto records = foxbench::run_cell(cfg);
            std::size_t failed = 0;
            for (const auto& rec : records) failed += rec.failed ? 1 : 0;
            std::cout << "cell " << records.front().fingerprint << ": " << records.size()
                      << " runs, " << failed << " failed, records in " << cfg.out_dir
                      << '\n';
            return failed == records.size() ? 1 : 0;
        }
        if (cmp->parsed()) {
            const auto a = foxbench::load_records(dir_a);
            const auto b = foxbench::load_records(dir_b);
            const auto comparison = foxbench::compare(a, b);
            const std::string path = foxbench::emit_report(comparison, format, cmp_out);
            std::cout << "wrote " << path << '\n';
            return 0;
        }
        if (selftest->parsed()) {
            return foxbench::selftest(std::cout) == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "{\"error\": \"" << e.what() << "\"}\n";
        return 1;
    }
    return 0;
}
