#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imdr/errors.hpp"
#include "imdr/format.hpp"

namespace imdr {

/// Areal unit identity. `code` is the join key everywhere; `name` is display only.
struct AreaId {
    std::string code;
    std::string name;

    bool operator==(const AreaId& other) const { return code == other.code; }
};

enum class Polarity {
    RiskIncreasing, // higher raw value, higher risk
    RiskDecreasing  // higher raw value, lower risk; reversed as 1 - x_norm
};

/// One risk factor: identity, direction and relative weight (percent units).
struct IndicatorSpec {
    std::string id;
    std::string label;
    Polarity polarity = Polarity::RiskIncreasing;
    double weight_percent = 0.0;
    std::string source_note;
};

struct IndexConfig {
    std::string name;
    std::vector<IndicatorSpec> indicators;
    int display_decimals = 4;

    std::optional<std::size_t> find_indicator(const std::string& id) const {
        for (std::size_t i = 0; i < indicators.size(); ++i)
            if (indicators[i].id == id) return i;
        return std::nullopt;
    }
};

/// Dense row-major matrix, just enough for area x indicator tables.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Rectangular area x indicator matrix of rates. Construction enforces the
/// shape and uniqueness rules; values are checked finite at ingestion.
struct IndicatorTable {
    std::vector<AreaId> areas;
    std::vector<std::string> indicator_ids;
    Matrix values; // |areas| x |indicator_ids|

    std::optional<std::size_t> find_area(const std::string& code) const {
        for (std::size_t i = 0; i < areas.size(); ++i)
            if (areas[i].code == code) return i;
        return std::nullopt;
    }
};

/// Per-area outcome of a build: post-polarity normalized matrix and both scores.
struct IndexResult {
    std::string config_name;
    std::vector<AreaId> areas;
    std::vector<std::string> column_labels; // reversed columns read "NOT <label>"
    Matrix normalized;                      // in [0,1], polarity applied
    std::vector<double> unweighted_score;   // arithmetic mean of the row
    std::vector<double> weighted_score;     // dot product with normalized weights
};

enum class CorrelationKind { Pearson, PartialControllingFor };

struct CorrelationCell {
    double r = 1.0;
    double t = 0.0;
    double p = 0.0;
    bool saturated = false; // |r| = 1: p pinned to 0 instead of dividing by zero
};

/// Symmetric correlation matrix with per-cell significance.
struct CorrelationReport {
    std::vector<std::string> variable_names;
    std::vector<CorrelationCell> cells; // k*k row-major
    std::size_t n = 0;                  // observations after exclusion
    long df = 0;                        // n - 2 - controls
    CorrelationKind kind = CorrelationKind::Pearson;
    std::string control_variable; // set when kind == PartialControllingFor
    std::vector<AreaId> excluded_areas;

    std::size_t size() const { return variable_names.size(); }
    const CorrelationCell& cell(std::size_t i, std::size_t j) const {
        return cells[i * variable_names.size() + j];
    }
    double r(std::size_t i, std::size_t j) const { return cell(i, j).r; }
    double p(std::size_t i, std::size_t j) const { return cell(i, j).p; }
};

/// Star coding used throughout the reports.
inline const char* significance_stars(double p) {
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

/// Per-area class assignment for choropleth output.
struct ClassifiedLayer {
    std::vector<double> breaks;          // strictly increasing boundary ladder
    std::vector<std::string> labels;     // one per class
    std::map<std::string, int> assignment; // area code -> class index

    int class_count() const { return static_cast<int>(labels.size()); }
};

/// Returns every violated config invariant as a human-readable message;
/// an empty list means the config is valid.
inline std::vector<std::string> validate_config(const IndexConfig& config) {
    std::vector<std::string> violations;
    if (config.indicators.size() < 2)
        violations.push_back("at least 2 indicators required");
    for (const auto& spec : config.indicators) {
        if (spec.id.empty())
            violations.push_back("indicator with empty id");
        if (spec.weight_percent <= 0.0)
            violations.push_back("indicator '" + spec.id + "' has non-positive weight " +
                                 format_compact(spec.weight_percent));
    }
    for (std::size_t i = 0; i < config.indicators.size(); ++i)
        for (std::size_t j = i + 1; j < config.indicators.size(); ++j)
            if (config.indicators[i].id == config.indicators[j].id)
                violations.push_back("duplicate indicator id '" + config.indicators[i].id + "'");
    if (!config.indicators.empty()) {
        double sum = 0.0;
        for (const auto& spec : config.indicators) sum += spec.weight_percent;
        if (std::fabs(sum - 100.0) > 0.01)
            violations.push_back("weights sum to " + format_compact(sum) +
                                 " (must be 100 within ±0.01)");
    }
    if (config.display_decimals < 0 || config.display_decimals > 15)
        violations.push_back("display_decimals must be in [0, 15]");
    return violations;
}

/// Percent weights rescaled to fractions summing to 1 (config order preserved).
inline std::vector<std::pair<std::string, double>> normalized_weights(const IndexConfig& config) {
    const auto violations = validate_config(config);
    if (!violations.empty()) {
        std::string msg = "invalid config '" + config.name + "':";
        for (const auto& v : violations) msg += " " + v + ";";
        throw ConfigError(msg);
    }
    double sum = 0.0;
    for (const auto& spec : config.indicators) sum += spec.weight_percent;
    std::vector<std::pair<std::string, double>> weights;
    weights.reserve(config.indicators.size());
    for (const auto& spec : config.indicators)
        weights.emplace_back(spec.id, spec.weight_percent / sum);
    return weights;
}

/// Fraction weights only, aligned with config indicator order.
inline std::vector<double> normalized_weight_values(const IndexConfig& config) {
    std::vector<double> out;
    for (auto& [id, w] : normalized_weights(config)) {
        (void)id;
        out.push_back(w);
    }
    return out;
}

} // namespace imdr
