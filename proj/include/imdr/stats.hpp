#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "imdr/data_model.hpp"
#include "imdr/errors.hpp"
#include "imdr/format.hpp"

namespace imdr {

/// Min-max rescaled table. Keeps the per-column (min, max) actually used and,
/// after apply_polarity, which columns were reversed ("NOT <label>").
struct NormalizedTable {
    std::vector<AreaId> areas;
    std::vector<std::string> indicator_ids;
    std::vector<std::string> column_labels; // defaults to ids until polarity annotates
    Matrix values;
    std::vector<std::pair<double, double>> column_ranges; // raw (min, max) per column
    std::vector<bool> reversed;
};

/// x_norm = (x - x_min) / (x_max - x_min), per column over the full table.
/// Each column attains 0 and 1 exactly at its extremes.
inline NormalizedTable min_max_normalize(const IndicatorTable& table) {
    if (table.areas.empty() || table.indicator_ids.empty())
        throw ShapeError("min_max_normalize: empty table");
    NormalizedTable out;
    out.areas = table.areas;
    out.indicator_ids = table.indicator_ids;
    out.column_labels = table.indicator_ids;
    out.values = Matrix(table.areas.size(), table.indicator_ids.size());
    out.column_ranges.resize(table.indicator_ids.size());
    out.reversed.assign(table.indicator_ids.size(), false);

    for (std::size_t c = 0; c < table.indicator_ids.size(); ++c) {
        double lo = table.values.at(0, c);
        double hi = lo;
        for (std::size_t a = 1; a < table.areas.size(); ++a) {
            lo = std::min(lo, table.values.at(a, c));
            hi = std::max(hi, table.values.at(a, c));
        }
        if (!(hi > lo))
            throw DegenerateError("min_max_normalize: column '" + table.indicator_ids[c] +
                                  "' is constant at " + format_compact(lo));
        const double range = hi - lo;
        for (std::size_t a = 0; a < table.areas.size(); ++a)
            out.values.at(a, c) = (table.values.at(a, c) - lo) / range;
        out.column_ranges[c] = {lo, hi};
    }
    return out;
}

/// Reverse RiskDecreasing columns (1 - value) and annotate them "NOT <label>".
/// Applying twice restores the input.
inline NormalizedTable apply_polarity(const NormalizedTable& norm, const IndexConfig& config) {
    if (norm.indicator_ids.size() != config.indicators.size())
        throw SchemaError("apply_polarity: table has " + std::to_string(norm.indicator_ids.size()) +
                          " columns, config has " + std::to_string(config.indicators.size()));
    for (std::size_t c = 0; c < norm.indicator_ids.size(); ++c)
        if (norm.indicator_ids[c] != config.indicators[c].id)
            throw SchemaError("apply_polarity: column '" + norm.indicator_ids[c] +
                              "' does not match config indicator '" + config.indicators[c].id + "'");

    NormalizedTable out = norm;
    for (std::size_t c = 0; c < config.indicators.size(); ++c) {
        const IndicatorSpec& spec = config.indicators[c];
        if (spec.polarity != Polarity::RiskDecreasing) {
            if (!out.reversed[c]) out.column_labels[c] = spec.label;
            continue;
        }
        for (std::size_t a = 0; a < out.areas.size(); ++a)
            out.values.at(a, c) = 1.0 - out.values.at(a, c);
        out.reversed[c] = !out.reversed[c];
        out.column_labels[c] = out.reversed[c] ? "NOT " + spec.label : spec.label;
    }
    return out;
}

/// Arithmetic mean of each area's normalized row; polarity must be applied.
/// Fixed left-to-right summation in column order keeps results bit-stable.
inline std::vector<double> unweighted_index(const NormalizedTable& norm) {
    std::vector<double> scores;
    scores.reserve(norm.areas.size());
    const double k = static_cast<double>(norm.indicator_ids.size());
    for (std::size_t a = 0; a < norm.areas.size(); ++a) {
        double sum = 0.0;
        for (std::size_t c = 0; c < norm.indicator_ids.size(); ++c)
            sum += norm.values.at(a, c);
        scores.push_back(sum / k);
    }
    return scores;
}

/// Dot product with the normalized fraction weights, in config order.
inline std::vector<double> weighted_index(const NormalizedTable& norm, const IndexConfig& config) {
    if (norm.indicator_ids.size() != config.indicators.size())
        throw SchemaError("weighted_index: table/config column count mismatch");
    for (std::size_t c = 0; c < norm.indicator_ids.size(); ++c)
        if (norm.indicator_ids[c] != config.indicators[c].id)
            throw SchemaError("weighted_index: column '" + norm.indicator_ids[c] +
                              "' does not match config indicator '" + config.indicators[c].id + "'");
    const std::vector<double> weights = normalized_weight_values(config);
    std::vector<double> scores;
    scores.reserve(norm.areas.size());
    for (std::size_t a = 0; a < norm.areas.size(); ++a) {
        double sum = 0.0;
        for (std::size_t c = 0; c < weights.size(); ++c)
            sum += norm.values.at(a, c) * weights[c];
        scores.push_back(sum);
    }
    return scores;
}

struct RankedArea {
    int rank = 0;
    AreaId area;
    double score = 0.0;
};

enum class RankDirection { Descending, Ascending };

/// Ordinal ranks 1..n; ties broken lexicographically by area code so output
/// is reproducible. Scores stay at full precision; display rounding is the
/// caller's concern.
inline std::vector<RankedArea> rank_areas(const std::vector<std::pair<AreaId, double>>& scores,
                                          RankDirection direction) {
    std::vector<RankedArea> ranked;
    ranked.reserve(scores.size());
    for (const auto& [area, score] : scores) ranked.push_back({0, area, score});
    std::sort(ranked.begin(), ranked.end(), [direction](const RankedArea& a, const RankedArea& b) {
        if (a.score != b.score)
            return direction == RankDirection::Descending ? a.score > b.score : a.score < b.score;
        return a.area.code < b.area.code;
    });
    for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = static_cast<int>(i) + 1;
    return ranked;
}

/// Weighted contribution of every indicator to one area's score, in config
/// order with post-polarity labels. Sums to the area's weighted score.
inline std::vector<std::pair<std::string, double>> contribution_breakdown(
    const NormalizedTable& norm, const IndexConfig& config, const std::string& area_code) {
    std::size_t row = norm.areas.size();
    for (std::size_t a = 0; a < norm.areas.size(); ++a)
        if (norm.areas[a].code == area_code) row = a;
    if (row == norm.areas.size())
        throw LookupError("contribution_breakdown: unknown area '" + area_code + "'");
    const std::vector<double> weights = normalized_weight_values(config);
    if (weights.size() != norm.indicator_ids.size())
        throw SchemaError("contribution_breakdown: table/config column count mismatch");
    std::vector<std::pair<std::string, double>> contributions;
    contributions.reserve(weights.size());
    for (std::size_t c = 0; c < weights.size(); ++c)
        contributions.emplace_back(norm.column_labels[c], norm.values.at(row, c) * weights[c]);
    return contributions;
}

/// Full scoring pass: normalized matrix (polarity applied) plus both scores.
inline IndexResult compute_index(const IndicatorTable& table, const IndexConfig& config) {
    const NormalizedTable norm = apply_polarity(min_max_normalize(table), config);
    IndexResult result;
    result.config_name = config.name;
    result.areas = norm.areas;
    result.column_labels = norm.column_labels;
    result.normalized = norm.values;
    result.unweighted_score = unweighted_index(norm);
    result.weighted_score = weighted_index(norm, config);
    return result;
}

} // namespace imdr
