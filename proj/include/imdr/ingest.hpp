#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "imdr/csv.hpp"
#include "imdr/data_model.hpp"
#include "imdr/errors.hpp"
#include "imdr/format.hpp"

namespace imdr {

struct AreaValue {
    AreaId area;
    double value = 0.0;
};

enum class BoundaryMode { Accretion, MinorChange };

/// Old-boundary code -> new-boundary code. A new code fed by several old codes
/// is an accretion; a 1:1 entry is treated as a straight rename.
class BoundaryMapping {
public:
    void add(const std::string& old_code, const std::string& new_code) {
        if (mapping_.count(old_code))
            throw DuplicateError("boundary mapping: old code '" + old_code +
                                 "' maps to more than one new code");
        mapping_.emplace(old_code, new_code);
        ++fan_in_[new_code];
    }

    const std::string& target(const std::string& old_code) const {
        auto it = mapping_.find(old_code);
        if (it == mapping_.end())
            throw MappingError("boundary mapping: no entry for area '" + old_code + "'");
        return it->second;
    }

    bool contains(const std::string& old_code) const { return mapping_.count(old_code) != 0; }

    BoundaryMode mode(const std::string& new_code) const {
        auto it = fan_in_.find(new_code);
        return (it != fan_in_.end() && it->second > 1) ? BoundaryMode::Accretion
                                                       : BoundaryMode::MinorChange;
    }

    std::size_t size() const { return mapping_.size(); }

private:
    std::map<std::string, std::string> mapping_;
    std::map<std::string, int> fan_in_;
};

/// Mid-year population estimates; all counts strictly positive.
class PopulationTable {
public:
    PopulationTable() = default;

    void add(const AreaId& area, double count) {
        if (!(count > 0.0) || !std::isfinite(count))
            throw DataError("population for area '" + area.code + "' must be > 0, got " +
                            format_compact(count));
        if (counts_.count(area.code))
            throw DuplicateError("duplicate population entry for area '" + area.code + "'");
        counts_.emplace(area.code, count);
    }

    bool contains(const std::string& code) const { return counts_.count(code) != 0; }

    double at(const std::string& code) const {
        auto it = counts_.find(code);
        if (it == counts_.end())
            throw CoverageError("no population for area '" + code + "'");
        return it->second;
    }

    std::size_t size() const { return counts_.size(); }

private:
    std::map<std::string, double> counts_;
};

/// Load one indicator column: one record per data row, values finite.
/// A "name" column, when present (or named explicitly), supplies area names.
inline std::vector<AreaValue> load_indicator_csv(const std::filesystem::path& path,
                                                 const std::string& area_column,
                                                 const std::string& value_column,
                                                 const std::string& name_column = "name") {
    const CsvTable csv = read_csv(path);
    const std::size_t area_idx = csv.column(area_column);
    const std::size_t value_idx = csv.column(value_column);
    const bool has_name = !name_column.empty() && csv.has_column(name_column);
    const std::size_t name_idx = has_name ? csv.column(name_column) : 0;

    std::vector<AreaValue> records;
    records.reserve(csv.rows.size());
    std::set<std::string> seen;
    std::vector<std::string> duplicates;
    for (std::size_t row = 0; row < csv.rows.size(); ++row) {
        const auto& fields = csv.rows[row];
        AreaValue rec;
        rec.area.code = fields[area_idx];
        if (rec.area.code.empty())
            throw ParseError(csv.source + ": row " + std::to_string(row + 1) +
                             ": empty area code");
        rec.area.name = has_name ? fields[name_idx] : rec.area.code;
        bool ok = false;
        rec.value = parse_double(fields[value_idx], ok);
        if (!ok || !std::isfinite(rec.value))
            throw ParseError(csv.source + ": row " + std::to_string(row + 1) +
                             ": value '" + fields[value_idx] + "' in column '" + value_column +
                             "' is not a finite number");
        if (!seen.insert(rec.area.code).second)
            duplicates.push_back(rec.area.code);
        records.push_back(std::move(rec));
    }
    if (!duplicates.empty()) {
        std::string msg = csv.source + ": duplicate area codes:";
        for (const auto& code : duplicates) msg += " " + code;
        throw DuplicateError(msg);
    }
    return records;
}

/// rate = scale * count / population. Scale 100 gives percentages.
inline std::vector<AreaValue> counts_to_rates(const std::vector<AreaValue>& counts,
                                              const PopulationTable& population,
                                              double scale = 100.0) {
    if (!(scale > 0.0))
        throw ConfigError("counts_to_rates: scale must be positive");
    std::vector<std::string> missing;
    for (const auto& rec : counts)
        if (!population.contains(rec.area.code)) missing.push_back(rec.area.code);
    if (!missing.empty()) {
        std::string msg = "counts_to_rates: areas missing from population:";
        for (const auto& code : missing) msg += " " + code;
        throw CoverageError(msg);
    }
    std::vector<AreaValue> rates;
    rates.reserve(counts.size());
    for (const auto& rec : counts)
        rates.push_back({rec.area, scale * rec.value / population.at(rec.area.code)});
    return rates;
}

enum class MergeKind { Count, Rate };

/// Re-express records on the mapping's new boundaries. Counts add; rates take
/// the population-weighted mean of the constituents present in the records.
/// New areas appear in order of first constituent appearance.
inline std::vector<AreaValue> merge_by_boundary(const std::vector<AreaValue>& records,
                                                const BoundaryMapping& mapping,
                                                const PopulationTable* population,
                                                MergeKind kind) {
    std::vector<std::string> unmapped;
    for (const auto& rec : records)
        if (!mapping.contains(rec.area.code)) unmapped.push_back(rec.area.code);
    if (!unmapped.empty()) {
        std::string msg = "merge_by_boundary: unmapped areas:";
        for (const auto& code : unmapped) msg += " " + code;
        throw MappingError(msg);
    }
    if (kind == MergeKind::Rate) {
        if (!population)
            throw ConfigError("merge_by_boundary: rate merge requires a population table");
        std::vector<std::string> missing;
        for (const auto& rec : records)
            if (!population->contains(rec.area.code)) missing.push_back(rec.area.code);
        if (!missing.empty()) {
            std::string msg = "merge_by_boundary: rate merge areas missing from population:";
            for (const auto& code : missing) msg += " " + code;
            throw CoverageError(msg);
        }
    }

    struct Accumulator {
        double weighted_sum = 0.0;
        double weight = 0.0; // population for rates, unused for counts
        int constituents = 0;
        std::string first_name;
    };
    std::vector<std::string> order;
    std::map<std::string, Accumulator> merged;
    for (const auto& rec : records) {
        const std::string& new_code = mapping.target(rec.area.code);
        auto [it, inserted] = merged.try_emplace(new_code);
        if (inserted) order.push_back(new_code);
        Accumulator& acc = it->second;
        if (kind == MergeKind::Count) {
            acc.weighted_sum += rec.value;
        } else {
            const double pop = population->at(rec.area.code);
            acc.weighted_sum += rec.value * pop;
            acc.weight += pop;
        }
        ++acc.constituents;
        if (acc.first_name.empty()) acc.first_name = rec.area.name;
    }

    std::vector<AreaValue> out;
    out.reserve(order.size());
    for (const auto& new_code : order) {
        const Accumulator& acc = merged.at(new_code);
        AreaValue rec;
        rec.area.code = new_code;
        // renamed 1:1 areas keep their name; accretions take the new code as name
        rec.area.name = acc.constituents == 1 ? acc.first_name : new_code;
        rec.value = kind == MergeKind::Count ? acc.weighted_sum : acc.weighted_sum / acc.weight;
        out.push_back(std::move(rec));
    }
    return out;
}

/// Assemble the final table over an identical area set per column; any hole
/// fails with the full (area, indicator) list rather than imputing.
inline IndicatorTable assemble_table(
    const std::vector<std::pair<std::string, std::vector<AreaValue>>>& columns,
    const IndexConfig& config) {
    if (columns.size() != config.indicators.size()) {
        std::string msg = "assemble_table: expected " +
                          std::to_string(config.indicators.size()) + " columns, got " +
                          std::to_string(columns.size());
        throw SchemaError(msg);
    }
    for (const auto& [id, records] : columns) {
        (void)records;
        if (!config.find_indicator(id))
            throw SchemaError("assemble_table: column '" + id + "' is not in the config");
    }
    for (const auto& spec : config.indicators) {
        bool found = false;
        for (const auto& [id, records] : columns) {
            (void)records;
            if (id == spec.id) found = true;
        }
        if (!found)
            throw SchemaError("assemble_table: no column for indicator '" + spec.id + "'");
    }

    // union of codes in first-appearance order, then hole detection
    std::vector<AreaId> areas;
    std::set<std::string> known;
    for (const auto& [id, records] : columns) {
        (void)id;
        for (const auto& rec : records) {
            if (known.insert(rec.area.code).second) areas.push_back(rec.area);
        }
    }
    std::vector<std::map<std::string, double>> lookup(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        for (const auto& rec : columns[c].second) {
            if (!lookup[c].emplace(rec.area.code, rec.value).second)
                throw DuplicateError("assemble_table: duplicate area '" + rec.area.code +
                                     "' in column '" + columns[c].first + "'");
        }
    }
    std::vector<std::string> holes;
    for (const auto& area : areas)
        for (std::size_t c = 0; c < columns.size(); ++c)
            if (!lookup[c].count(area.code))
                holes.push_back("(" + area.code + ", " + columns[c].first + ")");
    if (!holes.empty()) {
        std::string msg = "assemble_table: missing cells:";
        for (const auto& hole : holes) msg += " " + hole;
        throw CoverageError(msg);
    }

    IndicatorTable table;
    table.areas = std::move(areas);
    table.values = Matrix(table.areas.size(), config.indicators.size());
    for (const auto& spec : config.indicators) table.indicator_ids.push_back(spec.id);
    for (std::size_t i = 0; i < config.indicators.size(); ++i) {
        std::size_t source = 0;
        for (std::size_t c = 0; c < columns.size(); ++c)
            if (columns[c].first == config.indicators[i].id) source = c;
        for (std::size_t a = 0; a < table.areas.size(); ++a)
            table.values.at(a, i) = lookup[source].at(table.areas[a].code);
    }
    return table;
}

/// Boundary mapping file: CSV with columns old_code,new_code.
inline BoundaryMapping load_boundary_mapping_csv(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    const std::size_t old_idx = csv.column("old_code");
    const std::size_t new_idx = csv.column("new_code");
    BoundaryMapping mapping;
    for (std::size_t row = 0; row < csv.rows.size(); ++row) {
        const auto& fields = csv.rows[row];
        if (fields[old_idx].empty() || fields[new_idx].empty())
            throw ParseError(csv.source + ": row " + std::to_string(row + 1) +
                             ": empty area code");
        mapping.add(fields[old_idx], fields[new_idx]);
    }
    return mapping;
}

/// Population file: CSV with columns code,population (optional name column).
inline PopulationTable load_population_csv(const std::filesystem::path& path) {
    PopulationTable population;
    for (const auto& rec : load_indicator_csv(path, "code", "population"))
        population.add(rec.area, rec.value);
    return population;
}

/// Count-merge a population table through a boundary mapping, so converted
/// rates on new boundaries divide by the pooled constituent populations.
inline PopulationTable merge_population(const PopulationTable& population,
                                        const BoundaryMapping& mapping,
                                        const std::vector<AreaValue>& records) {
    std::vector<AreaValue> as_records;
    for (const auto& rec : records)
        as_records.push_back({rec.area, population.at(rec.area.code)});
    PopulationTable merged;
    for (const auto& rec : merge_by_boundary(as_records, mapping, nullptr, MergeKind::Count))
        merged.add(rec.area, rec.value);
    return merged;
}

} // namespace imdr
