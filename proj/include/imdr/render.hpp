#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "imdr/correlate.hpp"
#include "imdr/data_model.hpp"
#include "imdr/errors.hpp"
#include "imdr/format.hpp"
#include "imdr/svg.hpp"

namespace imdr {

using Ring = std::vector<std::array<double, 2>>;    // closed: first == last
using PolygonRings = std::vector<Ring>;             // outer ring + holes

/// Area geometry in projected planar coordinates (e.g. British National Grid).
struct GeoFeature {
    AreaId area;
    std::vector<PolygonRings> polygons;
};

struct GeoLayer {
    std::vector<GeoFeature> features;
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;

    const GeoFeature* find(const std::string& code) const {
        for (const auto& f : features)
            if (f.area.code == code) return &f;
        return nullptr;
    }
};

namespace detail {

inline Ring parse_ring(const nlohmann::json& coords, const std::string& context) {
    Ring ring;
    for (const auto& pt : coords) {
        if (!pt.is_array() || pt.size() < 2)
            throw ParseError(context + ": ring coordinate is not an [x, y] pair");
        ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    if (ring.size() < 4)
        throw ParseError(context + ": ring has fewer than 4 points");
    if (ring.front() != ring.back())
        throw ParseError(context + ": ring is not closed (first point != last)");
    return ring;
}

} // namespace detail

/// Load an RFC 7946 FeatureCollection of Polygon/MultiPolygon features keyed
/// by `key_property`. Coordinates are taken as already-projected planar x/y.
inline GeoLayer load_geojson(const std::filesystem::path& path, const std::string& key_property,
                             const std::string& name_property = "") {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("file not found: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection")
        throw SchemaError(path.string() + ": not a FeatureCollection");

    GeoLayer layer;
    std::set<std::string> seen;
    bool first_point = true;
    std::size_t index = 0;
    for (const auto& feature : doc.at("features")) {
        const std::string context = path.string() + ": feature " + std::to_string(index++);
        if (!feature.contains("properties") || !feature["properties"].contains(key_property))
            throw SchemaError(context + ": missing property '" + key_property + "'");
        GeoFeature out;
        out.area.code = feature["properties"][key_property].get<std::string>();
        if (!seen.insert(out.area.code).second)
            throw DuplicateError(path.string() + ": duplicate feature code '" + out.area.code +
                                 "'");
        if (!name_property.empty() && feature["properties"].contains(name_property))
            out.area.name = feature["properties"][name_property].get<std::string>();
        else
            out.area.name = out.area.code;

        const auto& geometry = feature.at("geometry");
        const std::string type = geometry.value("type", "");
        const auto& coords = geometry.at("coordinates");
        if (type == "Polygon") {
            PolygonRings rings;
            for (const auto& ring : coords) rings.push_back(detail::parse_ring(ring, context));
            out.polygons.push_back(std::move(rings));
        } else if (type == "MultiPolygon") {
            for (const auto& polygon : coords) {
                PolygonRings rings;
                for (const auto& ring : polygon)
                    rings.push_back(detail::parse_ring(ring, context));
                out.polygons.push_back(std::move(rings));
            }
        } else {
            throw SchemaError(context + ": unsupported geometry type '" + type + "'");
        }
        if (out.polygons.empty() || out.polygons.front().empty())
            throw ParseError(context + ": no rings");
        for (const auto& polygon : out.polygons) {
            for (const auto& ring : polygon) {
                for (const auto& pt : ring) {
                    if (first_point) {
                        layer.min_x = layer.max_x = pt[0];
                        layer.min_y = layer.max_y = pt[1];
                        first_point = false;
                    } else {
                        layer.min_x = std::min(layer.min_x, pt[0]);
                        layer.max_x = std::max(layer.max_x, pt[0]);
                        layer.min_y = std::min(layer.min_y, pt[1]);
                        layer.max_y = std::max(layer.max_y, pt[1]);
                    }
                }
            }
        }
        layer.features.push_back(std::move(out));
    }
    return layer;
}

/// Standard-deviation interval classification. For N classes the break ladder
/// holds N values at mean + (k - N/2 + 0.5) * sd; the first N-1 act as class
/// dividers, so class 0 is "< b0" and class N-1 runs from b[N-2] upward. The
/// final break stays in the ladder for audit and label clamping.
inline ClassifiedLayer sd_classify(const std::vector<std::pair<AreaId, double>>& scores,
                                   int class_count = 6) {
    if (class_count != 4 && class_count != 6)
        throw ConfigError("sd_classify: class_count must be 4 or 6, got " +
                          std::to_string(class_count));
    if (scores.size() < 2)
        throw ShapeError("sd_classify: need at least 2 areas");
    double mean = 0.0;
    for (const auto& [area, score] : scores) mean += score;
    mean /= static_cast<double>(scores.size());
    double ss = 0.0;
    bool distinct = false;
    for (const auto& [area, score] : scores) {
        ss += (score - mean) * (score - mean);
        if (score != scores.front().second) distinct = true;
    }
    if (!distinct)
        throw DegenerateError("sd_classify: all scores equal (" +
                              format_compact(scores.front().second) + ")");
    const double sd = std::sqrt(ss / static_cast<double>(scores.size() - 1));

    ClassifiedLayer layer;
    for (int k = 0; k < class_count; ++k)
        layer.breaks.push_back(mean + (static_cast<double>(k) - class_count / 2.0 + 0.5) * sd);
    layer.labels.push_back("< " + format_compact(layer.breaks.front()));
    for (int k = 1; k + 1 < class_count; ++k)
        layer.labels.push_back(format_compact(layer.breaks[k - 1]) + " to " +
                               format_compact(layer.breaks[k]));
    layer.labels.push_back("> " + format_compact(layer.breaks[class_count - 2]));

    for (const auto& [area, score] : scores) {
        int cls = 0;
        for (int k = 0; k + 1 < class_count; ++k)
            if (score >= layer.breaks[k]) cls = k + 1;
        layer.assignment[area.code] = cls;
    }
    return layer;
}

/// Default sequential light-to-dark palette (6 steps).
inline std::vector<std::string> default_palette(int class_count = 6) {
    const std::vector<std::string> six = {"#f7fbff", "#d0e1f2", "#94c4df",
                                          "#4a98c9", "#1764ab", "#08306b"};
    if (class_count == 6) return six;
    return {six[0], six[2], six[3], six[5]};
}

/// Choropleth map: one path per feature filled by class, plus a legend row per
/// class (empty classes included). Same input, byte-identical output.
inline std::string choropleth_svg(const GeoLayer& layer, const ClassifiedLayer& classified,
                                  const std::vector<std::string>& palette,
                                  const std::string& title = "") {
    if (static_cast<int>(palette.size()) != classified.class_count())
        throw ConfigError("choropleth_svg: palette has " + std::to_string(palette.size()) +
                          " colors for " + std::to_string(classified.class_count()) + " classes");
    std::vector<std::string> missing;
    for (const auto& [code, cls] : classified.assignment) {
        (void)cls;
        if (!layer.find(code)) missing.push_back(code);
    }
    if (!missing.empty()) {
        std::string msg = "choropleth_svg: classified areas without geometry:";
        for (const auto& code : missing) msg += " " + code;
        throw CoverageError(msg);
    }

    const double map_w = 640.0;
    const double map_h = 760.0;
    const double legend_w = 210.0;
    const double margin = 20.0;
    const double title_h = title.empty() ? 0.0 : 30.0;
    SvgDocument doc(map_w + legend_w + 3 * margin, map_h + 2 * margin + title_h);

    const double span_x = std::max(layer.max_x - layer.min_x, 1e-9);
    const double span_y = std::max(layer.max_y - layer.min_y, 1e-9);
    const double scale = std::min(map_w / span_x, map_h / span_y);
    auto to_px = [&](const std::array<double, 2>& pt) {
        // y axis flips: projected north-up becomes SVG top-down
        const double x = margin + (pt[0] - layer.min_x) * scale;
        const double y = margin + title_h + (layer.max_y - pt[1]) * scale;
        return std::pair<double, double>{x, y};
    };

    if (!title.empty())
        doc.text(margin, margin + 2.0, 16.0, title, "start");

    for (const auto& feature : layer.features) {
        std::string d;
        for (const auto& polygon : feature.polygons) {
            for (const auto& ring : polygon) {
                for (std::size_t i = 0; i + 1 < ring.size(); ++i) { // skip closing point
                    const auto [x, y] = to_px(ring[i]);
                    d += (i == 0 ? "M" : "L") + svg_num(x) + " " + svg_num(y) + " ";
                }
                d += "Z ";
            }
        }
        if (!d.empty()) d.pop_back();
        auto it = classified.assignment.find(feature.area.code);
        const std::string fill =
            it != classified.assignment.end() ? palette[static_cast<std::size_t>(it->second)]
                                              : "#ffffff";
        doc.path(d, fill, "#555555", 0.5);
    }

    // legend: one row per class, top class listed first
    const double lx = map_w + 2 * margin;
    double ly = margin + title_h + 10.0;
    doc.text(lx, ly, 13.0, "Classes", "start");
    ly += 10.0;
    for (int cls = classified.class_count() - 1; cls >= 0; --cls) {
        doc.rect(lx, ly, 18.0, 14.0, palette[static_cast<std::size_t>(cls)], "#555555",
                 "class=\"legend-swatch\"");
        doc.text(lx + 26.0, ly + 11.0, 12.0, classified.labels[static_cast<std::size_t>(cls)],
                 "start");
        ly += 22.0;
    }
    return doc.str();
}

/// Radar plot of one area's weighted contributions. Axes run clockwise from
/// 12 o'clock in the given order; vertex radius is contribution / max_axis.
inline std::string radar_svg(const std::vector<std::pair<std::string, double>>& breakdown,
                             double max_axis, const std::string& title = "") {
    if (breakdown.size() < 3)
        throw ShapeError("radar_svg: need at least 3 axes, got " +
                         std::to_string(breakdown.size()));
    if (!(max_axis > 0.0))
        throw ConfigError("radar_svg: max_axis must be positive");
    for (const auto& [label, value] : breakdown)
        if (value < 0.0)
            throw ShapeError("radar_svg: negative contribution on axis '" + label + "'");

    const double size = 520.0;
    const double cx = size / 2.0;
    const double cy = size / 2.0 + (title.empty() ? 0.0 : 12.0);
    const double radius = 165.0;
    SvgDocument doc(size, size + 40.0);
    if (!title.empty())
        doc.text(cx, 24.0, 15.0, title, "middle");

    const std::size_t k = breakdown.size();
    auto vertex = [&](std::size_t axis, double fraction) {
        const double angle =
            -std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * static_cast<double>(axis) /
                                          static_cast<double>(k);
        return std::pair<double, double>{cx + radius * fraction * std::cos(angle),
                                         cy + radius * fraction * std::sin(angle)};
    };

    for (int ring = 1; ring <= 4; ++ring)
        doc.circle(cx, cy, radius * ring / 4.0, "none", "#cccccc");
    for (std::size_t axis = 0; axis < k; ++axis) {
        const auto [x, y] = vertex(axis, 1.0);
        doc.line(cx, cy, x, y, "#aaaaaa", 0.75);
        const auto [lx, ly] = vertex(axis, 1.18);
        std::string anchor = "middle";
        if (lx > cx + 8.0) anchor = "start";
        else if (lx < cx - 8.0) anchor = "end";
        doc.text(lx, ly + 4.0, 11.0, breakdown[axis].first, anchor);
    }
    std::vector<std::pair<double, double>> points;
    for (std::size_t axis = 0; axis < k; ++axis) {
        const double fraction = std::clamp(breakdown[axis].second / max_axis, 0.0, 1.0);
        points.push_back(vertex(axis, fraction));
    }
    doc.polygon(points, "#4a98c9", "#1764ab", 1.5, "fill-opacity=\"0.55\"");
    doc.text(size - 8.0, size + 28.0, 10.0, "axis max " + format_compact(max_axis), "end");
    return doc.str();
}

/// Histogram of scores: one bar per bin, empty bins at zero height.
inline std::string histogram_svg(const std::vector<HistogramBin>& bins,
                                 const std::string& title = "") {
    if (bins.empty())
        throw ShapeError("histogram_svg: no bins");
    const double plot_w = 640.0;
    const double plot_h = 360.0;
    const double margin = 46.0;
    const double title_h = title.empty() ? 0.0 : 26.0;
    SvgDocument doc(plot_w + 2 * margin, plot_h + 2 * margin + title_h);
    if (!title.empty())
        doc.text(margin, 20.0, 15.0, title);

    std::size_t max_count = 1;
    std::size_t total = 0;
    for (const auto& bin : bins) {
        max_count = std::max(max_count, bin.count);
        total += bin.count;
    }
    const double bar_w = plot_w / static_cast<double>(bins.size());
    const double base_y = margin + title_h + plot_h;
    for (std::size_t b = 0; b < bins.size(); ++b) {
        const double h = plot_h * static_cast<double>(bins[b].count) /
                         static_cast<double>(max_count);
        doc.rect(margin + bar_w * static_cast<double>(b), base_y - h, bar_w, h, "#4a98c9",
                 "#1764ab", "class=\"bar\"");
    }
    doc.line(margin, base_y, margin + plot_w, base_y, "#000000", 1.0);
    doc.line(margin, margin + title_h, margin, base_y, "#000000", 1.0);
    doc.text(margin, base_y + 18.0, 11.0, format_compact(bins.front().lower), "middle");
    doc.text(margin + plot_w, base_y + 18.0, 11.0, format_compact(bins.back().upper), "middle");
    doc.text(margin - 6.0, margin + title_h + 4.0, 11.0, std::to_string(max_count), "end");
    doc.text(margin - 6.0, base_y + 4.0, 11.0, "0", "end");
    doc.text(margin + plot_w / 2.0, base_y + 34.0, 12.0,
             "n = " + std::to_string(total), "middle");
    return doc.str();
}

struct GeojsonInjection {
    std::string document;                 // serialized GeoJSON
    std::vector<std::string> warnings;    // feature codes without scores
};

/// Add imdr_weighted / imdr_unweighted / imdr_class properties to features
/// matched by `key_property`; geometry and all other content pass through
/// (formatting aside). Unmatched features are warned about, not failed.
inline GeojsonInjection inject_geojson_properties(
    const std::filesystem::path& geojson_in, const std::map<std::string, double>& weighted,
    const std::map<std::string, double>& unweighted, const ClassifiedLayer& classified,
    const std::string& key_property) {
    std::ifstream in(geojson_in);
    if (!in)
        throw ConfigError("file not found: " + geojson_in.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(geojson_in.string() + ": " + e.what());
    }
    if (!doc.contains("features"))
        throw SchemaError(geojson_in.string() + ": no features array");

    GeojsonInjection out;
    std::set<std::string> seen;
    std::size_t index = 0;
    for (auto& feature : doc["features"]) {
        const std::string context = geojson_in.string() + ": feature " + std::to_string(index++);
        if (!feature.contains("properties") || !feature["properties"].contains(key_property))
            throw SchemaError(context + ": missing property '" + key_property + "'");
        const std::string code = feature["properties"][key_property].get<std::string>();
        if (!seen.insert(code).second)
            throw DuplicateError(geojson_in.string() + ": duplicate feature code '" + code + "'");
        auto w = weighted.find(code);
        if (w == weighted.end()) {
            out.warnings.push_back(code);
            continue;
        }
        feature["properties"]["imdr_weighted"] = w->second;
        auto u = unweighted.find(code);
        if (u != unweighted.end())
            feature["properties"]["imdr_unweighted"] = u->second;
        auto cls = classified.assignment.find(code);
        if (cls != classified.assignment.end())
            feature["properties"]["imdr_class"] = cls->second;
    }
    out.document = doc.dump(2);
    out.document += "\n";
    return out;
}

} // namespace imdr
