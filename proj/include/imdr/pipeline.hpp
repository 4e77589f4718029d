#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imdr/correlate.hpp"
#include "imdr/csv.hpp"
#include "imdr/data_model.hpp"
#include "imdr/errors.hpp"
#include "imdr/format.hpp"
#include "imdr/ingest.hpp"
#include "imdr/render.hpp"
#include "imdr/run_config.hpp"
#include "imdr/stats.hpp"

namespace imdr {

/// Write-to-temp-then-rename so failures never leave partial files behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot write " + tmp.string());
        out << content;
        if (!out)
            throw DataError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

struct BuildArtifacts {
    IndicatorTable table;
    NormalizedTable normalized; // post-polarity
    IndexResult result;
    std::vector<RankedArea> ranking_weighted;
};

/// Ingest every input column (boundary merge, then count -> rate conversion),
/// assemble the table, and run the full scoring pass.
inline BuildArtifacts run_build(const RunConfig& config) {
    std::vector<std::pair<std::string, std::vector<AreaValue>>> columns;
    for (const auto& [id, input] : config.inputs) {
        std::vector<AreaValue> records = load_indicator_csv(input.csv, input.area_column,
                                                            input.value_column, input.name_column);
        std::optional<BoundaryMapping> mapping;
        if (input.boundary_mapping_csv)
            mapping = load_boundary_mapping_csv(*input.boundary_mapping_csv);

        if (input.values_are_counts) {
            PopulationTable population = load_population_csv(input.population_csv);
            if (mapping) {
                PopulationTable merged = merge_population(population, *mapping, records);
                records = merge_by_boundary(records, *mapping, nullptr, MergeKind::Count);
                records = counts_to_rates(records, merged, input.rate_scale);
            } else {
                records = counts_to_rates(records, population, input.rate_scale);
            }
        } else if (mapping) {
            PopulationTable population = load_population_csv(input.population_csv);
            records = merge_by_boundary(records, *mapping, &population, MergeKind::Rate);
        }
        columns.emplace_back(id, std::move(records));
    }

    BuildArtifacts artifacts;
    artifacts.table = assemble_table(columns, config.index);
    artifacts.normalized = apply_polarity(min_max_normalize(artifacts.table), config.index);

    IndexResult result;
    result.config_name = config.index.name;
    result.areas = artifacts.normalized.areas;
    result.column_labels = artifacts.normalized.column_labels;
    result.normalized = artifacts.normalized.values;
    result.unweighted_score = unweighted_index(artifacts.normalized);
    result.weighted_score = weighted_index(artifacts.normalized, config.index);
    artifacts.result = std::move(result);

    std::vector<std::pair<AreaId, double>> weighted;
    for (std::size_t a = 0; a < artifacts.result.areas.size(); ++a)
        weighted.emplace_back(artifacts.result.areas[a], artifacts.result.weighted_score[a]);
    artifacts.ranking_weighted = rank_areas(weighted, RankDirection::Descending);
    return artifacts;
}

struct BuildOutputs {
    std::string scores_csv;
    std::string normalized_csv;
    std::string audit_log;
};

/// Deterministic text of the three build artifacts.
inline BuildOutputs format_build_outputs(const BuildArtifacts& artifacts,
                                         const IndexConfig& config) {
    BuildOutputs out;

    std::map<std::string, int> rank_of;
    for (const auto& ranked : artifacts.ranking_weighted)
        rank_of[ranked.area.code] = ranked.rank;

    out.scores_csv = "area_code,area_name,unweighted,weighted,rank_weighted,"
                     "unweighted_display,weighted_display\n";
    const IndexResult& result = artifacts.result;
    for (std::size_t a = 0; a < result.areas.size(); ++a) {
        out.scores_csv += csv_line(
            {result.areas[a].code, result.areas[a].name, format_full(result.unweighted_score[a]),
             format_full(result.weighted_score[a]),
             std::to_string(rank_of.at(result.areas[a].code)),
             format_display(result.unweighted_score[a], config.display_decimals),
             format_display(result.weighted_score[a], config.display_decimals)});
    }

    std::vector<std::string> header = {"area_code", "area_name"};
    for (const auto& label : result.column_labels) header.push_back(label);
    out.normalized_csv = csv_line(header);
    for (std::size_t a = 0; a < result.areas.size(); ++a) {
        std::vector<std::string> row = {result.areas[a].code, result.areas[a].name};
        for (std::size_t c = 0; c < result.column_labels.size(); ++c)
            row.push_back(format_full(result.normalized.at(a, c)));
        out.normalized_csv += csv_line(row);
    }

    std::string& log = out.audit_log;
    log = "index: " + config.name + "\n";
    log += "areas: " + std::to_string(result.areas.size()) + "\n";
    log += "indicators: " + std::to_string(config.indicators.size()) + "\n";
    log += "normalized weights:\n";
    for (const auto& [id, w] : normalized_weights(config))
        log += "  " + id + " = " + format_full(w) + "\n";
    log += "column ranges (raw min, max):\n";
    for (std::size_t c = 0; c < artifacts.normalized.indicator_ids.size(); ++c) {
        const auto& [lo, hi] = artifacts.normalized.column_ranges[c];
        log += "  " + artifacts.normalized.indicator_ids[c] + " = [" + format_full(lo) + ", " +
               format_full(hi) + "]\n";
    }
    log += "reversed columns:\n";
    bool any = false;
    for (std::size_t c = 0; c < artifacts.normalized.indicator_ids.size(); ++c) {
        if (!artifacts.normalized.reversed[c]) continue;
        log += "  " + artifacts.normalized.indicator_ids[c] + " -> " +
               artifacts.normalized.column_labels[c] + "\n";
        any = true;
    }
    if (!any) log += "  (none)\n";
    return out;
}

/// cmd build: scores.csv, normalized.csv, audit.txt under the output dir.
inline BuildArtifacts cmd_build(const RunConfig& config) {
    BuildArtifacts artifacts = run_build(config);
    const BuildOutputs outputs = format_build_outputs(artifacts, config.index);
    write_file_atomic(config.output_dir / "scores.csv", outputs.scores_csv);
    write_file_atomic(config.output_dir / "normalized.csv", outputs.normalized_csv);
    write_file_atomic(config.output_dir / "audit.txt", outputs.audit_log);
    return artifacts;
}

/// IMDR scores plus every validation measure, aligned by area code.
inline VariableSet assemble_validation_set(const RunConfig& config,
                                           const BuildArtifacts& artifacts) {
    VariableSet vars;
    vars.areas = artifacts.result.areas;
    VariableSet::Variable weighted{"IMDR (W)", artifacts.result.weighted_score};
    VariableSet::Variable unweighted{"IMDR (Uw)", artifacts.result.unweighted_score};
    vars.variables.push_back(std::move(weighted));
    vars.variables.push_back(std::move(unweighted));
    for (const auto& measure : config.validation) {
        std::map<std::string, double> lookup;
        for (const auto& rec :
             load_indicator_csv(measure.csv, measure.area_column, measure.value_column))
            lookup.emplace(rec.area.code, rec.value);
        VariableSet::Variable var;
        var.name = measure.label;
        std::vector<std::string> missing;
        for (const auto& area : vars.areas) {
            auto it = lookup.find(area.code);
            if (it == lookup.end()) {
                missing.push_back(area.code);
                continue;
            }
            var.values.push_back(it->second);
        }
        if (!missing.empty()) {
            std::string msg = "validation measure '" + measure.id + "' missing areas:";
            for (const auto& code : missing) msg += " " + code;
            throw CoverageError(msg);
        }
        vars.variables.push_back(std::move(var));
    }
    vars.validate();
    return vars;
}

struct CorrelateOptions {
    std::optional<std::string> exclude; // named exclusion list
    std::optional<std::string> control; // validation measure id
};

/// cmd correlate: Pearson (or partial) matrix over IMDR scores and validation
/// measures, with optional named-area exclusion.
inline CorrelationReport run_correlate(const RunConfig& config, const BuildArtifacts& artifacts,
                                       const CorrelateOptions& options) {
    VariableSet vars = assemble_validation_set(config, artifacts);
    if (options.exclude) {
        auto it = config.exclusions.find(*options.exclude);
        if (it == config.exclusions.end())
            throw ConfigError("unknown exclusion list '" + *options.exclude + "'");
        vars = exclude_areas(vars, it->second);
    }
    if (options.control) {
        const MeasureSpec* control = nullptr;
        for (const auto& measure : config.validation)
            if (measure.id == *options.control) control = &measure;
        if (!control)
            throw ConfigError("unknown control measure '" + *options.control + "'");
        return partial_correlation_matrix(vars, control->label);
    }
    return correlation_matrix(vars);
}

inline std::string correlate_file_stem(const CorrelateOptions& options) {
    std::string stem = "correlation";
    if (options.control) stem += "_partial_" + *options.control;
    if (options.exclude) stem += "_excl_" + *options.exclude;
    return stem;
}

inline CorrelationReport cmd_correlate(const RunConfig& config, const CorrelateOptions& options) {
    const BuildArtifacts artifacts = run_build(config);
    const CorrelationReport report = run_correlate(config, artifacts, options);
    const std::string stem = correlate_file_stem(options);
    write_file_atomic(config.output_dir / (stem + ".txt"), correlation_report_text(report));
    write_file_atomic(config.output_dir / (stem + ".csv"), correlation_report_csv(report));
    return report;
}

struct RenderOptions {
    bool map = false;
    std::optional<std::string> radar;       // "top N", "bottom N" or an area code
    std::optional<int> histogram_bins;
};

/// Which areas a radar selector names: "top N" / "bottom N" by weighted score,
/// anything else is a single area code.
inline std::vector<std::string> select_radar_areas(const std::string& selector,
                                                   const std::vector<RankedArea>& ranking) {
    auto parse_count = [&](const std::string& prefix) -> std::optional<std::size_t> {
        if (selector.rfind(prefix, 0) != 0) return std::nullopt;
        std::string rest = selector.substr(prefix.size());
        std::size_t at = 0;
        while (at < rest.size() && (rest[at] == ' ' || rest[at] == ':')) ++at;
        rest = rest.substr(at);
        if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos)
            throw ConfigError("radar selector '" + selector + "': expected '" + prefix + " N'");
        return static_cast<std::size_t>(std::stoul(rest));
    };
    std::vector<std::string> codes;
    if (auto top = parse_count("top")) {
        for (std::size_t i = 0; i < std::min(*top, ranking.size()); ++i)
            codes.push_back(ranking[i].area.code);
        return codes;
    }
    if (auto bottom = parse_count("bottom")) {
        const std::size_t take = std::min(*bottom, ranking.size());
        for (std::size_t i = ranking.size() - take; i < ranking.size(); ++i)
            codes.push_back(ranking[i].area.code);
        return codes;
    }
    codes.push_back(selector);
    return codes;
}

/// cmd render: choropleths + scores.geojson (--map), radar plots (--radar),
/// histogram (--histogram), all as deterministic files under output_dir.
inline void cmd_render(const RunConfig& config, const RenderOptions& options) {
    const BuildArtifacts artifacts = run_build(config);
    const IndexResult& result = artifacts.result;

    std::vector<std::pair<AreaId, double>> weighted_scores;
    std::vector<std::pair<AreaId, double>> unweighted_scores;
    for (std::size_t a = 0; a < result.areas.size(); ++a) {
        weighted_scores.emplace_back(result.areas[a], result.weighted_score[a]);
        unweighted_scores.emplace_back(result.areas[a], result.unweighted_score[a]);
    }

    if (options.map) {
        if (!config.render)
            throw ConfigError("render: --map requires a render section (geometry) in the config");
        const RenderSpec& spec = *config.render;
        const GeoLayer layer =
            load_geojson(spec.geometry_geojson, spec.key_property, spec.name_property);
        const std::vector<std::string> palette =
            spec.palette.empty() ? default_palette(spec.class_count) : spec.palette;

        const ClassifiedLayer classified_w = sd_classify(weighted_scores, spec.class_count);
        const ClassifiedLayer classified_u = sd_classify(unweighted_scores, spec.class_count);
        write_file_atomic(config.output_dir / "map_weighted.svg",
                          choropleth_svg(layer, classified_w, palette,
                                         config.index.name + " (weighted)"));
        write_file_atomic(config.output_dir / "map_unweighted.svg",
                          choropleth_svg(layer, classified_u, palette,
                                         config.index.name + " (unweighted)"));

        std::map<std::string, double> weighted_map;
        std::map<std::string, double> unweighted_map;
        for (std::size_t a = 0; a < result.areas.size(); ++a) {
            weighted_map[result.areas[a].code] = result.weighted_score[a];
            unweighted_map[result.areas[a].code] = result.unweighted_score[a];
        }
        const GeojsonInjection injected =
            inject_geojson_properties(spec.geometry_geojson, weighted_map, unweighted_map,
                                      classified_w, spec.key_property);
        write_file_atomic(config.output_dir / "scores.geojson", injected.document);
    }

    if (options.radar) {
        double max_axis = 0.0;
        for (const auto& area : result.areas)
            for (const auto& [label, value] :
                 contribution_breakdown(artifacts.normalized, config.index, area.code))
                max_axis = std::max(max_axis, value);
        if (max_axis <= 0.0) max_axis = 1.0;
        for (const auto& code : select_radar_areas(*options.radar, artifacts.ranking_weighted)) {
            const auto breakdown =
                contribution_breakdown(artifacts.normalized, config.index, code);
            std::string name = code;
            for (const auto& area : result.areas)
                if (area.code == code) name = area.name;
            write_file_atomic(config.output_dir / ("radar_" + code + ".svg"),
                              radar_svg(breakdown, max_axis, name));
        }
    }

    if (options.histogram_bins) {
        const auto bins = histogram(result.weighted_score,
                                    static_cast<std::size_t>(*options.histogram_bins));
        write_file_atomic(config.output_dir / "histogram.svg",
                          histogram_svg(bins, config.index.name + " weighted score"));
    }
}

/// cmd describe: human-readable config summary.
inline std::string describe(const RunConfig& config) {
    std::string out;
    out += "index: " + config.index.name + "\n";
    out += "indicators: " + std::to_string(config.index.indicators.size()) +
           " (display decimals " + std::to_string(config.index.display_decimals) + ")\n\n";
    const auto weights = normalized_weights(config.index);
    out += "  id            label                     polarity          weight%   weight\n";
    for (std::size_t i = 0; i < config.index.indicators.size(); ++i) {
        const IndicatorSpec& spec = config.index.indicators[i];
        std::string id = spec.id;
        id.resize(std::max<std::size_t>(id.size(), 14), ' ');
        std::string label = spec.label;
        label.resize(std::max<std::size_t>(label.size(), 26), ' ');
        std::string polarity = spec.polarity == Polarity::RiskDecreasing
                                   ? "risk-decreasing"
                                   : "risk-increasing";
        polarity.resize(18, ' ');
        std::string pct = format_compact(spec.weight_percent);
        pct.resize(std::max<std::size_t>(pct.size(), 10), ' ');
        out += "  " + id + label + polarity + pct + format_compact(weights[i].second);
        if (spec.polarity == Polarity::RiskDecreasing)
            out += "   (reversed: NOT " + spec.label + ")";
        out += "\n";
    }
    out += "\ninputs:\n";
    for (const auto& [id, input] : config.inputs) {
        out += "  " + id + ": " + input.csv.string();
        if (input.values_are_counts)
            out += " (counts -> rates, scale " + format_compact(input.rate_scale) +
                   ", population " + input.population_csv.string() + ")";
        if (input.boundary_mapping_csv)
            out += " (boundary mapping " + input.boundary_mapping_csv->string() + ")";
        out += "\n";
    }
    if (!config.validation.empty()) {
        out += "validation measures:\n";
        for (const auto& measure : config.validation)
            out += "  " + measure.id + " (" + measure.label + "): " + measure.csv.string() + "\n";
    }
    if (!config.exclusions.empty()) {
        out += "exclusion lists:\n";
        for (const auto& [name, codes] : config.exclusions)
            out += "  " + name + ": " + std::to_string(codes.size()) + " areas\n";
    }
    if (config.render)
        out += "geometry: " + config.render->geometry_geojson.string() + " (key property '" +
               config.render->key_property + "', " +
               std::to_string(config.render->class_count) + " classes)\n";
    out += "output dir: " + config.output_dir.string() + "\n";
    return out;
}

} // namespace imdr
