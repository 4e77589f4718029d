// imdr: build, validate and render area-level composite risk indices.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "imdr/imdr.hpp"

namespace {

imdr::RunConfig load_config(const std::string& path) {
    imdr::RunConfig config = imdr::load_run_config(path);
    if (const char* dir = std::getenv("IMDR_OUTPUT_DIR"); dir && *dir)
        config.output_dir = dir;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"imdr: area-level composite risk index toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string exclude_name;
    std::string control_name;
    std::string radar_selector;
    int histogram_bins = 0;
    bool draw_map = false;

    auto* build = app.add_subcommand("build", "ingest inputs and write index scores");
    build->add_option("--config", config_path, "run config (JSON)")->required();

    auto* correlate =
        app.add_subcommand("correlate", "correlation reports against validation measures");
    correlate->add_option("--config", config_path, "run config (JSON)")->required();
    correlate->add_option("--exclude", exclude_name, "named exclusion list from the config");
    correlate->add_option("--control", control_name,
                          "validation measure id to control for (partial correlation)");

    auto* render = app.add_subcommand("render", "write SVG / GeoJSON artifacts");
    render->add_option("--config", config_path, "run config (JSON)")->required();
    render->add_flag("--map", draw_map, "choropleth maps + scores.geojson");
    render->add_option("--radar", radar_selector, "'top N', 'bottom N' or an area code");
    render->add_option("--histogram", histogram_bins, "histogram of weighted scores with N bins")
        ->check(CLI::PositiveNumber);

    auto* describe = app.add_subcommand("describe", "print the run configuration");
    describe->add_option("--config", config_path, "run config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (build->parsed()) {
            const imdr::RunConfig config = load_config(config_path);
            imdr::cmd_build(config);
            std::cout << "wrote scores.csv, normalized.csv, audit.txt to "
                      << config.output_dir.string() << "\n";
        } else if (correlate->parsed()) {
            const imdr::RunConfig config = load_config(config_path);
            imdr::CorrelateOptions options;
            if (!exclude_name.empty()) options.exclude = exclude_name;
            if (!control_name.empty()) options.control = control_name;
            const imdr::CorrelationReport report = imdr::cmd_correlate(config, options);
            std::cout << imdr::correlation_report_text(report);
            std::cout << "wrote " << imdr::correlate_file_stem(options) << ".{txt,csv} to "
                      << config.output_dir.string() << "\n";
        } else if (render->parsed()) {
            const imdr::RunConfig config = load_config(config_path);
            imdr::RenderOptions options;
            options.map = draw_map;
            if (!radar_selector.empty()) options.radar = radar_selector;
            if (histogram_bins > 0) options.histogram_bins = histogram_bins;
            if (!options.map && !options.radar && !options.histogram_bins)
                throw imdr::ConfigError(
                    "render: nothing to do (pass --map, --radar or --histogram)");
            imdr::cmd_render(config, options);
            std::cout << "wrote render artifacts to " << config.output_dir.string() << "\n";
        } else if (describe->parsed()) {
            const imdr::RunConfig config = load_config(config_path);
            std::cout << imdr::describe(config);
        }
    } catch (const imdr::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const imdr::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
