// Regenerates the bundled fixtures under data/.
//
//   imdr_make_fixtures [output_root]   (default: data)
//
// Everything is deterministic: the synthetic 207-area fixture draws from a
// fixed-seed mt19937_64 with hand-rolled uniform/normal conversion, so the
// committed files are reproducible byte for byte on any platform. The mini
// fixture uses hand-picked dyadic values whose normalized forms are exact.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "imdr/csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSeed = 20170913ULL;
constexpr int kAreaCount = 207;
constexpr int kLondonCount = 32; // last 32 areas form the "london_ccgs" cluster
constexpr int kIndicatorCount = 9;

// Pairwise indicator correlation induced by the shared latent factor. Tuned so
// the weighted-vs-unweighted index correlation lands near 0.96 for the Table 4
// weight profile (band checked by the acceptance suite: [0.94, 0.98]).
constexpr double kFactorShare = 0.36;

struct Rng {
    std::mt19937_64 gen;
    bool has_cache = false;
    double cache = 0.0;

    explicit Rng(std::uint64_t seed) : gen(seed) {}

    // top 53 bits -> [0, 1); bit-identical on every conforming implementation
    double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

    double normal() {
        if (has_cache) {
            has_cache = false;
            return cache;
        }
        double u1 = uniform();
        while (u1 <= 1e-12) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cache = radius * std::sin(angle);
        has_cache = true;
        return radius * std::cos(angle);
    }
};

std::string fmt(double v, const char* spec) {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        std::exit(1);
    }
}

std::string area_code(int j) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "C%03d", j + 1);
    return buf;
}

std::string area_name(int j) {
    static const std::array<const char*, 21> stems = {
        "Ash",   "Birch", "Clay",  "Dove",  "Elm",    "Fern",  "Gorse",
        "Hazel", "Iris",  "Kest",  "Larch", "Maple",  "Nett",  "Oak",
        "Pine",  "Quarr", "Rowan", "Sorrel", "Thorn", "Upton", "Wren"};
    static const std::array<const char*, 10> endings = {
        "field", "ford", "bridge", "mere", "ton", "wick", "bury", "dale", "holt", "combe"};
    return std::string(stems[static_cast<std::size_t>(j) % stems.size()]) +
           endings[(static_cast<std::size_t>(j) / stems.size()) % endings.size()];
}

json square(double x0, double y0, double side) {
    return json::array({json::array({
        json::array({x0, y0}),
        json::array({x0 + side, y0}),
        json::array({x0 + side, y0 + side}),
        json::array({x0, y0 + side}),
        json::array({x0, y0}),
    })});
}

// ---------------------------------------------------------------------------
// mini fixture: 6 areas x 3 indicators, every normalized value an exact dyadic
// ---------------------------------------------------------------------------

void write_mini(const fs::path& root) {
    const fs::path dir = root / "mini";
    const std::array<const char*, 6> codes = {"M1", "M2", "M3", "M4", "M5", "M6"};
    const std::array<const char*, 6> names = {"Ashford Vale", "Bryn Heath", "Calder Moss",
                                              "Derwent Edge", "Eskdale",    "Farrow Bank"};
    const std::array<double, 6> smoking = {2, 4, 6, 8, 7, 10};
    const std::array<double, 6> education = {40, 56, 48, 36, 44, 68};
    const std::array<double, 6> obesity = {10, 18, 26, 14, 22, 12};

    auto column_csv = [&](const std::array<double, 6>& values) {
        std::string out = "code,name,rate\n";
        for (int j = 0; j < 6; ++j)
            out += imdr::csv_line({codes[j], names[j], fmt(values[j], "%.0f")});
        return out;
    };
    write_file(dir / "smoking.csv", column_csv(smoking));
    write_file(dir / "education.csv", column_csv(education));
    write_file(dir / "obesity.csv", column_csv(obesity));

    json config;
    config["index"]["name"] = "Mini Risk Index";
    config["index"]["display_decimals"] = 4;
    config["index"]["indicators"] = json::array({
        json{{"id", "smoking"},
             {"label", "Smoking"},
             {"polarity", "risk_increasing"},
             {"weight_percent", 50},
             {"source_note", "hand-picked demo data"}},
        json{{"id", "education"},
             {"label", "Education"},
             {"polarity", "risk_decreasing"},
             {"weight_percent", 30},
             {"source_note", "hand-picked demo data"}},
        json{{"id", "obesity"},
             {"label", "Obesity"},
             {"polarity", "risk_increasing"},
             {"weight_percent", 20},
             {"source_note", "hand-picked demo data"}},
    });
    for (const char* id : {"smoking", "education", "obesity"})
        config["inputs"][id] = json{{"csv", std::string(id) + ".csv"},
                                    {"area_column", "code"},
                                    {"value_column", "rate"}};
    config["render"] = json{{"geometry_geojson", "geometry.geojson"},
                            {"key_property", "code"},
                            {"name_property", "name"},
                            {"class_count", 6}};
    config["output_dir"] = "../../out/mini";
    write_file(dir / "config.json", config.dump(2) + "\n");

    json geo;
    geo["type"] = "FeatureCollection";
    geo["features"] = json::array();
    for (int j = 0; j < 6; ++j) {
        json feature;
        feature["type"] = "Feature";
        feature["properties"] = json{{"code", codes[j]}, {"name", names[j]}};
        feature["geometry"] = json{{"type", "Polygon"},
                                   {"coordinates", square(100.0 * j, 0.0, 90.0)}};
        geo["features"].push_back(feature);
    }
    write_file(dir / "geometry.geojson", geo.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// 207-area synthetic fixture
// ---------------------------------------------------------------------------

struct IndicatorDef {
    const char* id;
    const char* label;
    bool risk_decreasing;
    int weight;
    const char* source_note;
    double base;
    double spread; // negative-polarity columns subtract
};

void write_imdr(const fs::path& root) {
    const fs::path dir = root / "imdr";

    const std::array<IndicatorDef, kIndicatorCount> defs = {{
        {"obesity", "Obesity", false, 6,
         "Recorded prevalence of obesity (16+), 2013/14", 9.8, 2.1},
        {"alcohol", "E. Alcohol C.", false, 21,
         "Modelled prevalence of binge drinking (16+), 2006-08", 17.5, 3.4},
        {"education", "Education", true, 21,
         "GCSE achievement, 5 A*-C incl. English & Maths, 2013/14", 57.0, 4.8},
        {"hearing_loss", "Hearing Loss", false, 18,
         "Estimated count of hearing loss >= 25 dBHL, 2014 (counts on 2013 boundaries)", 9.2,
         1.5},
        {"smoking", "Smoking", false, 12,
         "Recorded prevalence of smoking (15+), 2013/14", 17.0, 3.1},
        {"depression", "Depression", false, 8,
         "Recorded prevalence of depression (18+), 2013/14", 7.2, 1.3},
        {"hypertension", "Hypertension", false, 4,
         "Recorded prevalence of hypertension (all ages), 2013/14", 13.4, 2.1},
        {"diet", "Healthy Diet", true, 8,
         "Estimated prevalence of healthy-eating adults (16+), 2006-08", 28.5, 3.2},
        {"diabetes", "Diabetes", false, 2,
         "Recorded prevalence of diabetes (18+), 2013/14", 6.1, 1.0},
    }};

    Rng rng(kSeed);

    // draw order is part of the format: populations, latent factors, noise
    // channels, then one noise vector per indicator, then the measures
    std::array<double, kAreaCount> population{};
    for (int j = 0; j < kAreaCount; ++j)
        population[j] = 110000.0 + std::floor(rng.uniform() * 240000.0);

    std::array<double, kAreaCount> factor{};
    for (int j = 0; j < kAreaCount; ++j) {
        const bool london = j >= kAreaCount - kLondonCount;
        factor[j] = london ? rng.normal() * 0.45 - 1.35 : rng.normal() * 0.92 + 0.21;
    }
    std::array<double, kAreaCount> age_noise{};
    std::array<double, kAreaCount> prev_core{};
    std::array<double, kAreaCount> rec_noise{};
    std::array<double, kAreaCount> est_noise{};
    std::array<double, kAreaCount> imd_noise{};
    for (int j = 0; j < kAreaCount; ++j) age_noise[j] = rng.normal();
    for (int j = 0; j < kAreaCount; ++j) prev_core[j] = rng.normal();
    for (int j = 0; j < kAreaCount; ++j) rec_noise[j] = rng.normal();
    for (int j = 0; j < kAreaCount; ++j) est_noise[j] = rng.normal();
    for (int j = 0; j < kAreaCount; ++j) imd_noise[j] = rng.normal();

    const double factor_load = std::sqrt(kFactorShare);
    const double noise_load = std::sqrt(1.0 - kFactorShare);
    std::array<std::array<double, kAreaCount>, kIndicatorCount> risk{};
    for (int i = 0; i < kIndicatorCount; ++i)
        for (int j = 0; j < kAreaCount; ++j)
            risk[i][j] = factor_load * factor[j] + noise_load * rng.normal();

    auto raw_value = [&](int i, int j) {
        const IndicatorDef& def = defs[static_cast<std::size_t>(i)];
        return def.risk_decreasing ? def.base - def.spread * risk[i][j]
                                   : def.base + def.spread * risk[i][j];
    };

    // plain rate columns (everything except hearing_loss, which ships as counts)
    for (int i = 0; i < kIndicatorCount; ++i) {
        if (std::string(defs[i].id) == "hearing_loss") continue;
        std::string csv = "code,name,rate\n";
        for (int j = 0; j < kAreaCount; ++j)
            csv += imdr::csv_line({area_code(j), area_name(j), fmt(raw_value(i, j), "%.6f")});
        write_file(dir / (std::string(defs[i].id) + ".csv"), csv);
    }

    // hearing loss: counts on "2013" boundaries. C001 and C002 are accretions
    // of two old units each; C003 is a straight rename from X003.
    {
        const int hearing = 3; // index of hearing_loss in defs
        std::string counts_csv = "code,name,count\n";
        std::string pop_csv = "code,name,population\n";
        std::string map_csv = "old_code,new_code\n";

        auto emit = [&](const std::string& old_code, const std::string& old_name,
                        const std::string& new_code, double rate, double pop) {
            const double count = std::floor(rate / 100.0 * pop + 0.5);
            counts_csv += imdr::csv_line({old_code, old_name, fmt(count, "%.0f")});
            pop_csv += imdr::csv_line({old_code, old_name, fmt(pop, "%.0f")});
            map_csv += imdr::csv_line({old_code, new_code});
        };

        for (int j = 0; j < kAreaCount; ++j) {
            const std::string code = area_code(j);
            const double rate = raw_value(hearing, j);
            if (j == 0 || j == 1) {
                emit(code + "A", area_name(j) + std::string(" North"), code, rate,
                     std::floor(population[j] * 0.45));
                emit(code + "B", area_name(j) + std::string(" South"), code, rate,
                     population[j] - std::floor(population[j] * 0.45));
            } else if (j == 2) {
                emit("X003", area_name(j), code, rate, population[j]);
            } else {
                emit(code, area_name(j), code, rate, population[j]);
            }
        }
        write_file(dir / "hearing_loss.csv", counts_csv);
        write_file(dir / "hearing_population.csv", pop_csv);
        write_file(dir / "hearing_boundary_mapping.csv", map_csv);
    }

    // validation measures
    {
        std::string age_csv = "code,name,age\n";
        std::string imd_csv = "code,name,score\n";
        std::string rec_csv = "code,name,rate\n";
        std::string est_csv = "code,name,rate\n";
        std::string pop_csv = "code,name,population\n";
        for (int j = 0; j < kAreaCount; ++j) {
            const bool london = j >= kAreaCount - kLondonCount;
            const double age = 40.5 + 2.2 * (0.50 * factor[j] + 0.87 * age_noise[j]);
            const double imd = 21.0 + 6.0 * (0.55 * factor[j] - 0.45 * age_noise[j] +
                                             0.70 * imd_noise[j]) +
                               (london ? 5.5 : 0.0);
            const double rec = 4.3 + 0.5 * (0.85 * prev_core[j] + 0.45 * rec_noise[j] +
                                            0.15 * imd_noise[j]) +
                               0.03 * factor[j] + (london ? 0.25 : 0.0);
            const double est = 66.0 + 6.0 * (0.85 * prev_core[j] + 0.25 * est_noise[j] +
                                             0.20 * imd_noise[j] - 0.30 * age_noise[j]) +
                               0.9 * factor[j] - (london ? 1.0 : 0.0);
            age_csv += imdr::csv_line({area_code(j), area_name(j), fmt(age, "%.2f")});
            imd_csv += imdr::csv_line({area_code(j), area_name(j), fmt(imd, "%.3f")});
            rec_csv += imdr::csv_line({area_code(j), area_name(j), fmt(rec, "%.4f")});
            est_csv += imdr::csv_line({area_code(j), area_name(j), fmt(est, "%.4f")});
            pop_csv += imdr::csv_line({area_code(j), area_name(j), fmt(population[j], "%.0f")});
        }
        write_file(dir / "avg_age.csv", age_csv);
        write_file(dir / "imd.csv", imd_csv);
        write_file(dir / "dementia_recorded.csv", rec_csv);
        write_file(dir / "dementia_estimated.csv", est_csv);
        write_file(dir / "population.csv", pop_csv);
    }

    // run config
    {
        json config;
        config["index"]["name"] = "IMDR";
        config["index"]["display_decimals"] = 4;
        config["index"]["indicators"] = json::array();
        for (const auto& def : defs) {
            config["index"]["indicators"].push_back(
                json{{"id", def.id},
                     {"label", def.label},
                     {"polarity", def.risk_decreasing ? "risk_decreasing" : "risk_increasing"},
                     {"weight_percent", def.weight},
                     {"source_note", def.source_note}});
        }
        for (const auto& def : defs) {
            if (std::string(def.id) == "hearing_loss") {
                config["inputs"][def.id] =
                    json{{"csv", "hearing_loss.csv"},
                         {"area_column", "code"},
                         {"value_column", "count"},
                         {"counts_to_rates",
                          json{{"population_csv", "hearing_population.csv"}, {"scale", 100}}},
                         {"boundary_mapping_csv", "hearing_boundary_mapping.csv"}};
            } else {
                config["inputs"][def.id] = json{{"csv", std::string(def.id) + ".csv"},
                                                {"area_column", "code"},
                                                {"value_column", "rate"}};
            }
        }
        config["validation"] = json::array({
            json{{"id", "imd"},
                 {"label", "IMD (2015)"},
                 {"csv", "imd.csv"},
                 {"value_column", "score"}},
            json{{"id", "dem_recorded"},
                 {"label", "Dem.Rec.Prev."},
                 {"csv", "dementia_recorded.csv"},
                 {"value_column", "rate"}},
            json{{"id", "dem_estimated"},
                 {"label", "Dem.Est.Prev."},
                 {"csv", "dementia_estimated.csv"},
                 {"value_column", "rate"}},
            json{{"id", "avg_age"},
                 {"label", "Avg. Age"},
                 {"csv", "avg_age.csv"},
                 {"value_column", "age"}},
        });
        json london = json::array();
        for (int j = kAreaCount - kLondonCount; j < kAreaCount; ++j)
            london.push_back(area_code(j));
        config["exclusions"]["london_ccgs"] = london;
        config["render"] = json{{"geometry_geojson", "geometry.geojson"},
                                {"key_property", "ccg_code"},
                                {"name_property", "ccg_name"},
                                {"class_count", 6}};
        config["output_dir"] = "../../out/imdr";
        write_file(dir / "config.json", config.dump(2) + "\n");
    }

    // geometry: 15-column grid of squares on planar pseudo-national-grid
    // coordinates; the london cluster occupies the southern rows
    {
        json geo;
        geo["type"] = "FeatureCollection";
        geo["features"] = json::array();
        for (int j = 0; j < kAreaCount; ++j) {
            const int col = j % 15;
            const int row = j / 15;
            const double x0 = 400000.0 + col * 9000.0;
            const double y0 = 60000.0 + (13 - row) * 9000.0;
            json feature;
            feature["type"] = "Feature";
            feature["properties"] = json{{"ccg_code", area_code(j)}, {"ccg_name", area_name(j)}};
            feature["geometry"] = json{{"type", "Polygon"},
                                       {"coordinates", square(x0, y0, 8600.0)}};
            geo["features"].push_back(feature);
        }
        write_file(dir / "geometry.geojson", geo.dump(2) + "\n");
    }
}

} // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("data");
    write_mini(root);
    write_imdr(root);
    std::cout << "fixtures written under " << root.string() << "\n";
    return 0;
}
