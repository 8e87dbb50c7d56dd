// qnmqed — scenario-driven front end for dissipative cavity-QED calculations
// with quantized quasinormal modes.
//
// Subcommands:
//   run       execute every scenario (or the sweep block) in a config file
//   sweep     alias of run for sweep configs
//   criteria  emit the derived-criteria table for QNM parameter files
//   validate  parse and check a config without running it
//
// Exit codes: 0 ok, 2 config error, 3 physics error, 4 numerical failure.

#include "qnmqed/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

int dispatch(const std::function<qnmqed::scen::RunReport()>& action) {
    try {
        const auto report = action();
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& a : report.artifacts) std::cout << a << "\n";
        return 0;
    } catch (const qnmqed::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qnmqed::PhysicsError& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return 3;
    } catch (const qnmqed::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dissipative cavity-QED with quantized quasinormal modes"};
    app.require_subcommand(1);

    qnmqed::scen::Overrides overrides;
    std::string policy_flag;
    bool secular = false;
    int n_fock = 0, keep = 0, workers = 0;
    std::string out_dir;
    std::string data_dir;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_flag_callback(
            "--allow-negative-rates",
            [&] { overrides.policy = qnmqed::liou::NegativeRatePolicy::Allow; },
            "keep negative loss rates (study mode)");
        cmd->add_flag_callback(
            "--clamp-negative-rates",
            [&] { overrides.policy = qnmqed::liou::NegativeRatePolicy::ClampZero; },
            "zero out negative loss rates with a warning");
        cmd->add_flag("--secular", secular, "secular (diagonal) dissipator assembly");
        cmd->add_option("--fock", n_fock, "override Fock truncation");
        cmd->add_option("--keep", keep, "override retained dressed levels");
        cmd->add_option("--workers", workers, "sweep worker threads");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--data-dir", data_dir, "QNM parameter directory");
    };

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "run scenarios from a config file");
    run_cmd->add_option("config", config_path, "config file (JSON)")->required();
    add_common(run_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "run a sweep config");
    sweep_cmd->add_option("config", config_path, "config file (JSON)")->required();
    add_common(sweep_cmd);

    auto* validate_cmd = app.add_subcommand("validate", "validate a config file");
    validate_cmd->add_option("config", config_path, "config file (JSON)")->required();
    add_common(validate_cmd);

    std::vector<std::string> qnm_files;
    std::string qnm_dir;
    auto* criteria_cmd = app.add_subcommand("criteria", "derived-criteria table");
    criteria_cmd->add_option("--qnm", qnm_files, "QNM parameter file(s)");
    criteria_cmd->add_option("--qnm-dir", qnm_dir, "directory of QNM parameter files");
    add_common(criteria_cmd);

    CLI11_PARSE(app, argc, argv);

    if (secular) overrides.secular = true;
    if (n_fock > 0) overrides.n_fock = n_fock;
    if (keep > 0) overrides.keep = keep;
    if (workers > 0) overrides.workers = workers;
    if (!out_dir.empty()) overrides.out_dir = out_dir;
    if (!data_dir.empty()) overrides.data_dir = data_dir;

    if (run_cmd->parsed() || sweep_cmd->parsed()) {
        return dispatch([&] { return qnmqed::scen::run_config(config_path, overrides); });
    }
    if (validate_cmd->parsed()) {
        return dispatch([&] {
            qnmqed::scen::validate_config(config_path, overrides);
            std::cerr << "config ok: " << config_path << "\n";
            return qnmqed::scen::RunReport{};
        });
    }
    if (criteria_cmd->parsed()) {
        return dispatch([&] {
            std::vector<std::string> files = qnm_files;
            if (files.empty()) {
                const std::string dir =
                    !qnm_dir.empty() ? qnm_dir
                                     : overrides.data_dir.value_or(
                                           qnmqed::scen::default_data_dir());
                namespace fs = std::filesystem;
                if (!fs::is_directory(dir)) {
                    throw qnmqed::ConfigError("criteria: not a directory: " + dir);
                }
                std::vector<fs::path> paths;
                for (const auto& e : fs::directory_iterator(dir)) {
                    if (e.is_regular_file() && e.path().extension() == ".json") {
                        paths.push_back(e.path());
                    }
                }
                std::sort(paths.begin(), paths.end());
                for (const auto& p : paths) files.push_back(p.string());
            }
            return qnmqed::scen::run_criteria(files, overrides.out_dir.value_or("."));
        });
    }
    return 0;
}
