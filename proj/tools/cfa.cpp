#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cfa/cfa.hpp"

int main(int argc, char** argv) {
    CLI::App app{"constructive functional-analysis toolkit"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = ".";
    std::string format = "csv";

    CLI::App* run = app.add_subcommand("run", "run a scenario file and emit its artifacts");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory (default: current directory)");
    run->add_option("--format", format, "table format: csv or text")
        ->check(CLI::IsMember({"csv", "text"}));

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "check a scenario file without running");
    validate->add_option("scenario", validate_path, "scenario file")->required();

    CLI::App* list = app.add_subcommand("list-kinds", "list the scenario kinds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& [kind, description] : cfa::scenario_kinds()) {
                std::cout << kind << "  " << description << "\n";
            }
            return 0;
        }
        if (validate->parsed()) {
            cfa::Scenario s = cfa::parse_scenario_file(validate_path);
            cfa::validate_scenario(s);
            std::cout << "ok: " << validate_path << " (" << s.kind << ")\n";
            return 0;
        }
        cfa::Scenario s = cfa::parse_scenario_file(scenario_path);
        cfa::RunOutcome outcome = cfa::run_scenario(
            s, out_dir, format == "csv" ? cfa::OutputFormat::Csv : cfa::OutputFormat::Text);
        for (const auto& path : outcome.artifacts) {
            std::cout << "wrote " << path.string() << "\n";
        }
        if (outcome.status != 0) {
            std::cerr << "error: " << outcome.diagnostic << "\n";
        }
        return outcome.status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cfa::exit_code_for_error(e);
    }
}
