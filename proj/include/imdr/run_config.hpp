#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "imdr/data_model.hpp"
#include "imdr/errors.hpp"

namespace imdr {

/// One indicator's input file plus optional transforms, applied in order:
/// boundary merge first, then count -> rate conversion.
struct InputSpec {
    std::filesystem::path csv;
    std::string area_column = "code";
    std::string value_column = "rate";
    std::string name_column = "name";
    bool values_are_counts = false;
    // population (old-boundary codes): required for count -> rate conversion
    // and for the population-weighted merge of rate data across boundaries
    std::filesystem::path population_csv;
    double rate_scale = 100.0;
    std::optional<std::filesystem::path> boundary_mapping_csv;
};

struct MeasureSpec {
    std::string id;
    std::string label;
    std::filesystem::path csv;
    std::string area_column = "code";
    std::string value_column = "value";
};

struct RenderSpec {
    std::filesystem::path geometry_geojson;
    std::string key_property = "code";
    std::string name_property;
    std::vector<std::string> palette; // empty = built-in sequential palette
    int class_count = 6;
};

/// Whole run description: the index plus every file it touches.
struct RunConfig {
    IndexConfig index;
    std::vector<std::pair<std::string, InputSpec>> inputs; // config indicator order
    std::vector<MeasureSpec> validation;
    std::map<std::string, std::vector<std::string>> exclusions;
    std::optional<RenderSpec> render;
    std::filesystem::path output_dir = "out";
    std::filesystem::path base_dir; // directory of the config file
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const std::string& key,
                                     const std::string& context) {
    if (!obj.contains(key))
        throw ConfigError(context + ": missing required key '" + key + "'");
    return obj.at(key);
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

inline void require_file(const std::filesystem::path& p, const std::string& context) {
    if (!std::filesystem::exists(p))
        throw ConfigError(context + ": file not found: " + p.string());
}

} // namespace detail

/// Parse and validate a JSON run config. Relative paths resolve against the
/// config file's directory; every referenced file must exist.
inline RunConfig load_run_config(const std::filesystem::path& config_path) {
    std::ifstream in(config_path);
    if (!in)
        throw ConfigError("file not found: " + config_path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(config_path.string() + ": " + e.what());
    }

    RunConfig config;
    config.base_dir = config_path.parent_path();
    const std::string context = config_path.string();
    try {
        const auto& index = detail::require(doc, "index", context);
        config.index.name = detail::require(index, "name", context + ": index").get<std::string>();
        config.index.display_decimals = index.value("display_decimals", 4);
        for (const auto& spec : detail::require(index, "indicators", context + ": index")) {
            IndicatorSpec indicator;
            indicator.id = detail::require(spec, "id", context + ": indicator").get<std::string>();
            indicator.label = spec.value("label", indicator.id);
            const std::string polarity =
                spec.value("polarity", std::string("risk_increasing"));
            if (polarity == "risk_increasing")
                indicator.polarity = Polarity::RiskIncreasing;
            else if (polarity == "risk_decreasing")
                indicator.polarity = Polarity::RiskDecreasing;
            else
                throw ConfigError(context + ": indicator '" + indicator.id +
                                  "': polarity must be risk_increasing or risk_decreasing");
            indicator.weight_percent =
                detail::require(spec, "weight_percent", context + ": indicator '" + indicator.id + "'")
                    .get<double>();
            indicator.source_note = spec.value("source_note", std::string());
            config.index.indicators.push_back(std::move(indicator));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(context + ": index section: " + e.what());
    }

    const auto violations = validate_config(config.index);
    if (!violations.empty()) {
        std::string msg = context + ": invalid index config:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw ConfigError(msg);
    }

    try {
        const auto& inputs = detail::require(doc, "inputs", context);
        for (const auto& spec : config.index.indicators) {
            if (!inputs.contains(spec.id))
                throw ConfigError(context + ": no input for indicator '" + spec.id + "'");
            const auto& entry = inputs.at(spec.id);
            InputSpec input;
            input.csv = detail::resolve(
                config.base_dir,
                detail::require(entry, "csv", context + ": input '" + spec.id + "'")
                    .get<std::string>());
            input.area_column = entry.value("area_column", std::string("code"));
            input.value_column = entry.value("value_column", std::string("rate"));
            input.name_column = entry.value("name_column", std::string("name"));
            if (entry.contains("counts_to_rates")) {
                const auto& counts = entry.at("counts_to_rates");
                input.values_are_counts = true;
                input.population_csv = detail::resolve(
                    config.base_dir,
                    detail::require(counts, "population_csv",
                                    context + ": input '" + spec.id + "' counts_to_rates")
                        .get<std::string>());
                input.rate_scale = counts.value("scale", 100.0);
            }
            if (entry.contains("boundary_mapping_csv"))
                input.boundary_mapping_csv = detail::resolve(
                    config.base_dir, entry.at("boundary_mapping_csv").get<std::string>());
            if (entry.contains("population_csv") && !input.values_are_counts)
                input.population_csv = detail::resolve(
                    config.base_dir, entry.at("population_csv").get<std::string>());
            if (input.boundary_mapping_csv && !input.values_are_counts &&
                input.population_csv.empty())
                throw ConfigError(context + ": input '" + spec.id +
                                  "': boundary merging of rate data needs population_csv "
                                  "to weight the merge");
            config.inputs.emplace_back(spec.id, std::move(input));
        }
        for (auto it = inputs.begin(); it != inputs.end(); ++it)
            if (!config.index.find_indicator(it.key()))
                throw ConfigError(context + ": input '" + it.key() +
                                  "' does not match any configured indicator");

        if (doc.contains("validation")) {
            for (const auto& entry : doc.at("validation")) {
                MeasureSpec measure;
                measure.id =
                    detail::require(entry, "id", context + ": validation").get<std::string>();
                measure.label = entry.value("label", measure.id);
                measure.csv = detail::resolve(
                    config.base_dir,
                    detail::require(entry, "csv", context + ": validation '" + measure.id + "'")
                        .get<std::string>());
                measure.area_column = entry.value("area_column", std::string("code"));
                measure.value_column = entry.value("value_column", std::string("value"));
                for (const auto& existing : config.validation)
                    if (existing.id == measure.id)
                        throw ConfigError(context + ": duplicate validation measure '" +
                                          measure.id + "'");
                config.validation.push_back(std::move(measure));
            }
        }

        if (doc.contains("exclusions")) {
            const auto& exclusions = doc.at("exclusions");
            for (auto it = exclusions.begin(); it != exclusions.end(); ++it) {
                std::vector<std::string> codes;
                for (const auto& code : it.value()) codes.push_back(code.get<std::string>());
                config.exclusions.emplace(it.key(), std::move(codes));
            }
        }

        if (doc.contains("render")) {
            const auto& render = doc.at("render");
            RenderSpec spec;
            spec.geometry_geojson = detail::resolve(
                config.base_dir,
                detail::require(render, "geometry_geojson", context + ": render")
                    .get<std::string>());
            spec.key_property = render.value("key_property", std::string("code"));
            spec.name_property = render.value("name_property", std::string());
            if (render.contains("palette"))
                for (const auto& color : render.at("palette"))
                    spec.palette.push_back(color.get<std::string>());
            spec.class_count = render.value("class_count", 6);
            if (spec.class_count != 4 && spec.class_count != 6)
                throw ConfigError(context + ": render.class_count must be 4 or 6");
            if (!spec.palette.empty() &&
                static_cast<int>(spec.palette.size()) != spec.class_count)
                throw ConfigError(context + ": render.palette has " +
                                  std::to_string(spec.palette.size()) + " colors for " +
                                  std::to_string(spec.class_count) + " classes");
            config.render = std::move(spec);
        }

        config.output_dir =
            detail::resolve(config.base_dir, doc.value("output_dir", std::string("out")));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(context + ": " + e.what());
    }

    for (const auto& [id, input] : config.inputs) {
        detail::require_file(input.csv, context + ": input '" + id + "'");
        if (!input.population_csv.empty())
            detail::require_file(input.population_csv, context + ": input '" + id + "'");
        if (input.boundary_mapping_csv)
            detail::require_file(*input.boundary_mapping_csv, context + ": input '" + id + "'");
    }
    for (const auto& measure : config.validation)
        detail::require_file(measure.csv, context + ": validation '" + measure.id + "'");
    if (config.render)
        detail::require_file(config.render->geometry_geojson, context + ": render");

    return config;
}

} // namespace imdr
