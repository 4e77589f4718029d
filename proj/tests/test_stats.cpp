#include <catch2/catch_amalgamated.hpp>

#include "imdr/stats.hpp"

#include <algorithm>

#include "oracles.hpp"

using namespace imdr;

namespace {

IndicatorTable single_column(const char* id, std::initializer_list<double> values) {
    IndicatorTable table;
    table.indicator_ids = {id};
    int i = 0;
    table.values = Matrix(values.size(), 1);
    for (double v : values) {
        table.areas.push_back({"A" + std::to_string(i), "Area " + std::to_string(i)});
        table.values.at(i, 0) = v;
        ++i;
    }
    return table;
}

IndexConfig table4_config() {
    IndexConfig config;
    config.name = "IMDR";
    const struct {
        const char* id;
        const char* label;
        double weight;
        Polarity polarity;
    } rows[] = {
        {"obesity", "Obesity", 6, Polarity::RiskIncreasing},
        {"alcohol", "E. Alcohol C.", 21, Polarity::RiskIncreasing},
        {"education", "Education", 21, Polarity::RiskDecreasing},
        {"hearing_loss", "Hearing Loss", 18, Polarity::RiskIncreasing},
        {"smoking", "Smoking", 12, Polarity::RiskIncreasing},
        {"depression", "Depression", 8, Polarity::RiskIncreasing},
        {"hypertension", "Hypertension", 4, Polarity::RiskIncreasing},
        {"diet", "Healthy Diet", 8, Polarity::RiskDecreasing},
        {"diabetes", "Diabetes", 2, Polarity::RiskIncreasing},
    };
    for (const auto& row : rows)
        config.indicators.push_back({row.id, row.label, row.polarity, row.weight, ""});
    return config;
}

// random table with guaranteed per-column spread
IndicatorTable random_table(oracle::TestRng& rng, std::size_t areas, std::size_t cols) {
    IndicatorTable table;
    table.values = Matrix(areas, cols);
    for (std::size_t a = 0; a < areas; ++a)
        table.areas.push_back({"R" + std::to_string(a), ""});
    for (std::size_t c = 0; c < cols; ++c) {
        table.indicator_ids.push_back("col" + std::to_string(c));
        for (std::size_t a = 0; a < areas; ++a)
            table.values.at(a, c) = rng.uniform(0.0, 100.0);
        // force distinct extremes so x_max > x_min always holds
        table.values.at(0, c) = -1.0;
        table.values.at(areas - 1, c) = 101.0;
    }
    return table;
}

IndexConfig uniform_config(std::size_t cols) {
    IndexConfig config;
    config.name = "uniform";
    for (std::size_t c = 0; c < cols; ++c)
        config.indicators.push_back({"col" + std::to_string(c), "Col " + std::to_string(c),
                                     Polarity::RiskIncreasing, 100.0 / cols, ""});
    return config;
}

} // namespace

TEST_CASE("min_max_normalize rescales endpoints and midpoints") {
    const auto norm = min_max_normalize(single_column("x", {0, 5, 10}));
    CHECK(norm.values.at(0, 0) == 0.0);
    CHECK(norm.values.at(1, 0) == 0.5);
    CHECK(norm.values.at(2, 0) == 1.0);
    CHECK(norm.column_ranges[0].first == 0.0);
    CHECK(norm.column_ranges[0].second == 10.0);
}

TEST_CASE("min_max_normalize matches hand arithmetic") {
    const auto norm = min_max_normalize(single_column("x", {4.2, 5.1, 4.65}));
    CHECK(norm.values.at(0, 0) == 0.0);
    CHECK(norm.values.at(1, 0) == 1.0);
    CHECK_THAT(norm.values.at(2, 0),
               Catch::Matchers::WithinAbs((4.65 - 4.2) / (5.1 - 4.2), 1e-15));
}

TEST_CASE("min_max_normalize rejects constant columns by name") {
    try {
        min_max_normalize(single_column("steady", {7, 7, 7}));
        FAIL("expected DegenerateError");
    } catch (const DegenerateError& e) {
        CHECK(std::string(e.what()).find("steady") != std::string::npos);
    }
}

TEST_CASE("apply_polarity reverses only risk-decreasing columns") {
    IndicatorTable table;
    table.areas = {{"A", ""}, {"B", ""}, {"C", ""}};
    table.indicator_ids = {"up", "down"};
    table.values = Matrix(3, 2);
    const double ups[] = {0.0, 3.0, 10.0};
    const double downs[] = {0.0, 3.0, 10.0};
    for (int i = 0; i < 3; ++i) {
        table.values.at(i, 0) = ups[i];
        table.values.at(i, 1) = downs[i];
    }
    IndexConfig config;
    config.name = "mixed";
    config.indicators.push_back({"up", "Up", Polarity::RiskIncreasing, 50, ""});
    config.indicators.push_back({"down", "Down", Polarity::RiskDecreasing, 50, ""});

    const auto flipped = apply_polarity(min_max_normalize(table), config);
    CHECK(flipped.values.at(0, 0) == 0.0);
    CHECK(flipped.values.at(2, 0) == 1.0);
    CHECK(flipped.values.at(0, 1) == 1.0);
    CHECK_THAT(flipped.values.at(1, 1), Catch::Matchers::WithinAbs(0.7, 1e-15));
    CHECK(flipped.values.at(2, 1) == 0.0);
    CHECK(flipped.column_labels[0] == "Up");
    CHECK(flipped.column_labels[1] == "NOT Down");
    CHECK_FALSE(flipped.reversed[0]);
    CHECK(flipped.reversed[1]);
}

TEST_CASE("apply_polarity is the identity for all-increasing configs") {
    oracle::TestRng rng(11);
    const auto table = random_table(rng, 8, 3);
    const auto config = uniform_config(3);
    const auto norm = min_max_normalize(table);
    const auto same = apply_polarity(norm, config);
    for (std::size_t a = 0; a < 8; ++a)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(same.values.at(a, c) == norm.values.at(a, c));
}

TEST_CASE("apply_polarity on the reference config reverses education and diet only") {
    oracle::TestRng rng(12);
    const auto config = table4_config();
    IndicatorTable table;
    table.values = Matrix(5, 9);
    for (int a = 0; a < 5; ++a) table.areas.push_back({"A" + std::to_string(a), ""});
    for (const auto& spec : config.indicators) table.indicator_ids.push_back(spec.id);
    for (std::size_t c = 0; c < 9; ++c)
        for (std::size_t a = 0; a < 5; ++a) table.values.at(a, c) = rng.uniform(0, 50);
    for (std::size_t c = 0; c < 9; ++c) {
        table.values.at(0, c) = -5; // pin extremes
        table.values.at(4, c) = 55;
    }
    const auto flipped = apply_polarity(min_max_normalize(table), config);
    for (std::size_t c = 0; c < 9; ++c) {
        const bool expect = config.indicators[c].id == "education" ||
                            config.indicators[c].id == "diet";
        CHECK(flipped.reversed[c] == expect);
        if (expect)
            CHECK(flipped.column_labels[c] == "NOT " + config.indicators[c].label);
    }
}

TEST_CASE("apply_polarity twice restores the input") {
    oracle::TestRng rng(13);
    IndexConfig config;
    config.name = "alldown";
    config.indicators.push_back({"a", "A", Polarity::RiskDecreasing, 40, ""});
    config.indicators.push_back({"b", "B", Polarity::RiskDecreasing, 60, ""});
    auto table = random_table(rng, 12, 2);
    table.indicator_ids = {"a", "b"};
    const auto norm = min_max_normalize(table);
    const auto twice = apply_polarity(apply_polarity(norm, config), config);
    for (std::size_t a = 0; a < 12; ++a)
        for (std::size_t c = 0; c < 2; ++c)
            CHECK_THAT(twice.values.at(a, c),
                       Catch::Matchers::WithinAbs(norm.values.at(a, c), 1e-12));
    CHECK(twice.column_labels[0] == "A");
    CHECK_FALSE(twice.reversed[0]);
}

TEST_CASE("unweighted_index is the row mean") {
    NormalizedTable norm;
    norm.areas = {{"A", ""}, {"B", ""}, {"C", ""}};
    norm.indicator_ids = {"1", "2", "3"};
    norm.column_labels = norm.indicator_ids;
    norm.values = Matrix(3, 3);
    const double rows[3][3] = {{1, 1, 1}, {0, 0, 0}, {0.2, 0.4, 0.9}};
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) norm.values.at(a, c) = rows[a][c];
    const auto scores = unweighted_index(norm);
    CHECK(scores[0] == 1.0);
    CHECK(scores[1] == 0.0);
    CHECK_THAT(scores[2], Catch::Matchers::WithinAbs(0.5, 1e-15));
}

TEST_CASE("weighted_index follows the dot-product contract") {
    NormalizedTable norm;
    norm.areas = {{"A", ""}};
    norm.indicator_ids = {"x", "y", "z"};
    norm.column_labels = norm.indicator_ids;
    norm.values = Matrix(1, 3);
    norm.values.at(0, 0) = 1.0;
    norm.values.at(0, 1) = 0.5;
    norm.values.at(0, 2) = 0.0;
    IndexConfig config;
    config.name = "dot";
    config.indicators.push_back({"x", "X", Polarity::RiskIncreasing, 21, ""});
    config.indicators.push_back({"y", "Y", Polarity::RiskIncreasing, 18, ""});
    config.indicators.push_back({"z", "Z", Polarity::RiskIncreasing, 61, ""});
    const auto scores = weighted_index(norm, config);
    CHECK_THAT(scores[0], Catch::Matchers::WithinAbs(0.30, 1e-15)); // 0.21 + 0.09

    // all-ones row scores exactly the weight total
    NormalizedTable ones = norm;
    for (int c = 0; c < 3; ++c) ones.values.at(0, c) = 1.0;
    CHECK_THAT(weighted_index(ones, config)[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("uniform weights reduce the weighted index to the unweighted index") {
    oracle::TestRng rng(14);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t areas = 3 + static_cast<std::size_t>(rng.uniform(0, 18));
        const std::size_t cols = 2 + static_cast<std::size_t>(rng.uniform(0, 8));
        const auto table = random_table(rng, areas, cols);
        const auto config = uniform_config(cols);
        const auto norm = apply_polarity(min_max_normalize(table), config);
        const auto weighted = weighted_index(norm, config);
        const auto unweighted = unweighted_index(norm);
        for (std::size_t a = 0; a < areas; ++a)
            CHECK_THAT(weighted[a], Catch::Matchers::WithinAbs(unweighted[a], 1e-12));
    }
}

TEST_CASE("normalization properties: bounds, extremes, monotonicity, idempotence") {
    oracle::TestRng rng(15);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t areas = 2 + static_cast<std::size_t>(rng.uniform(0, 25));
        const std::size_t cols = 1 + static_cast<std::size_t>(rng.uniform(0, 6));
        const auto table = random_table(rng, areas, cols);
        const auto norm = min_max_normalize(table);
        for (std::size_t c = 0; c < cols; ++c) {
            bool hit_zero = false, hit_one = false;
            for (std::size_t a = 0; a < areas; ++a) {
                const double v = norm.values.at(a, c);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
                if (v == 0.0) hit_zero = true;
                if (v == 1.0) hit_one = true;
            }
            CHECK(hit_zero);
            CHECK(hit_one);
            // monotone: raw order implies normalized order
            for (std::size_t a = 1; a < areas; ++a) {
                if (table.values.at(a - 1, c) < table.values.at(a, c))
                    CHECK(norm.values.at(a - 1, c) <= norm.values.at(a, c));
            }
        }
        // idempotent on a column already spanning [0,1]
        IndicatorTable again;
        again.areas = norm.areas;
        again.indicator_ids = norm.indicator_ids;
        again.values = norm.values;
        const auto twice = min_max_normalize(again);
        for (std::size_t c = 0; c < cols; ++c)
            for (std::size_t a = 0; a < areas; ++a)
                CHECK_THAT(twice.values.at(a, c),
                           Catch::Matchers::WithinAbs(norm.values.at(a, c), 1e-12));
    }
}

TEST_CASE("positive affine transforms leave scores and rankings unchanged") {
    oracle::TestRng rng(16);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t areas = 4 + static_cast<std::size_t>(rng.uniform(0, 20));
        const std::size_t cols = 2 + static_cast<std::size_t>(rng.uniform(0, 6));
        const auto table = random_table(rng, areas, cols);
        const auto config = uniform_config(cols);

        IndicatorTable transformed = table;
        for (std::size_t c = 0; c < cols; ++c) {
            const double a = rng.uniform(0.5, 20.0);
            const double b = rng.uniform(-100.0, 100.0);
            for (std::size_t r = 0; r < areas; ++r)
                transformed.values.at(r, c) = a * table.values.at(r, c) + b;
        }
        const auto norm1 = apply_polarity(min_max_normalize(table), config);
        const auto norm2 = apply_polarity(min_max_normalize(transformed), config);
        for (std::size_t r = 0; r < areas; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                CHECK_THAT(norm2.values.at(r, c),
                           Catch::Matchers::WithinAbs(norm1.values.at(r, c), 1e-9));

        const auto w1 = weighted_index(norm1, config);
        const auto w2 = weighted_index(norm2, config);
        std::vector<std::pair<AreaId, double>> s1, s2;
        for (std::size_t r = 0; r < areas; ++r) {
            s1.emplace_back(table.areas[r], w1[r]);
            s2.emplace_back(table.areas[r], w2[r]);
            CHECK_THAT(w2[r], Catch::Matchers::WithinAbs(w1[r], 1e-9));
        }
        const auto rank1 = rank_areas(s1, RankDirection::Descending);
        const auto rank2 = rank_areas(s2, RankDirection::Descending);
        for (std::size_t r = 0; r < areas; ++r)
            CHECK(rank1[r].area.code == rank2[r].area.code);
    }
}

TEST_CASE("rank_areas orders descending scores with ordinal ranks") {
    std::vector<std::pair<AreaId, double>> scores = {
        {{"B", "Sunderland"}, 0.69},
        {{"A", "Blackpool"}, 0.73},
        {{"C", "Barnsley"}, 0.68},
    };
    const auto ranked = rank_areas(scores, RankDirection::Descending);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].rank == 1);
    CHECK(ranked[0].area.code == "A");
    CHECK(ranked[0].score == 0.73);
    CHECK(ranked[1].rank == 2);
    CHECK(ranked[1].area.code == "B");
    CHECK(ranked[2].rank == 3);
    CHECK(ranked[2].area.code == "C");
}

TEST_CASE("rank_areas breaks ties by area code and handles edge sizes") {
    std::vector<std::pair<AreaId, double>> tied = {{{"E2", ""}, 0.5}, {{"E1", ""}, 0.5}};
    const auto ranked = rank_areas(tied, RankDirection::Descending);
    CHECK(ranked[0].area.code == "E1");
    CHECK(ranked[0].rank == 1);
    CHECK(ranked[1].area.code == "E2");
    CHECK(ranked[1].rank == 2);

    const auto single = rank_areas({{{"X", ""}, 0.25}}, RankDirection::Ascending);
    REQUIRE(single.size() == 1);
    CHECK(single[0].rank == 1);

    CHECK(rank_areas({}, RankDirection::Descending).empty());
}

TEST_CASE("display rounding is half-up at the configured decimals") {
    CHECK(format_display(0.73, 4) == "0.7300");
    CHECK(format_display(0.291666666, 4) == "0.2917");
    CHECK(format_display(0.00005, 4) == "0.0001");
    CHECK(format_display(1.0, 4) == "1.0000");
    CHECK(format_display(0.0, 2) == "0.00");
    CHECK(format_display(-0.4735, 3) == "-0.474"); // away from zero
}

TEST_CASE("contribution_breakdown sums to the weighted score") {
    oracle::TestRng rng(17);
    const auto config = table4_config();
    IndicatorTable table;
    table.values = Matrix(6, 9);
    for (int a = 0; a < 6; ++a) table.areas.push_back({"A" + std::to_string(a), ""});
    for (const auto& spec : config.indicators) table.indicator_ids.push_back(spec.id);
    for (std::size_t c = 0; c < 9; ++c) {
        for (std::size_t a = 0; a < 6; ++a) table.values.at(a, c) = rng.uniform(2, 30);
        table.values.at(0, c) = 1;
        table.values.at(5, c) = 31;
    }
    const auto norm = apply_polarity(min_max_normalize(table), config);
    const auto weighted = weighted_index(norm, config);
    for (std::size_t a = 0; a < 6; ++a) {
        const auto breakdown = contribution_breakdown(norm, config, table.areas[a].code);
        REQUIRE(breakdown.size() == 9);
        double sum = 0.0;
        for (const auto& [label, value] : breakdown) sum += value;
        CHECK_THAT(sum, Catch::Matchers::WithinAbs(weighted[a], 1e-12));
    }
    CHECK_THROWS_AS(contribution_breakdown(norm, config, "nope"), LookupError);
}

TEST_CASE("contribution_breakdown: zero rows and uniform rows behave as derived") {
    const auto config = table4_config();
    NormalizedTable norm;
    norm.areas = {{"Z", "Zero"}, {"U", "Uniform"}};
    for (const auto& spec : config.indicators) {
        norm.indicator_ids.push_back(spec.id);
        norm.column_labels.push_back(spec.label);
    }
    norm.values = Matrix(2, 9, 0.0);
    for (int c = 0; c < 9; ++c) norm.values.at(1, c) = 1.0;
    norm.column_ranges.assign(9, {0.0, 1.0});
    norm.reversed.assign(9, false);

    for (const auto& [label, value] : contribution_breakdown(norm, config, "Z"))
        CHECK(value == 0.0);

    // on a uniform row the biggest contributors are the biggest weights:
    // alcohol and education (21%) then hearing loss (18%)
    auto breakdown = contribution_breakdown(norm, config, "U");
    std::sort(breakdown.begin(), breakdown.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    CHECK((breakdown[0].first == "E. Alcohol C." || breakdown[0].first == "Education"));
    CHECK((breakdown[1].first == "E. Alcohol C." || breakdown[1].first == "Education"));
    CHECK(breakdown[2].first == "Hearing Loss");
}
