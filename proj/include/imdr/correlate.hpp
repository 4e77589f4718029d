#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "imdr/csv.hpp"
#include "imdr/data_model.hpp"
#include "imdr/errors.hpp"
#include "imdr/format.hpp"

namespace imdr {

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr double eps = 3.0e-15;
    constexpr double tiny = 1.0e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - bt * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Two-tailed Student-t tail probability: P(|T_df| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
inline double student_t_two_tailed_p(double t, double df) {
    if (t == 0.0) return 1.0;
    const double x = df / (df + t * t);
    double p = regularized_incomplete_beta(0.5 * df, 0.5, x);
    return std::clamp(p, 0.0, 1.0);
}

/// Sample Pearson product-moment correlation via centered two-pass sums.
/// Values within 4 ulp of +/-1 snap to exactly +/-1 so exact linear dependence
/// is reported as saturation downstream.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ShapeError("pearson: length mismatch (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
    const std::size_t n = x.size();
    if (n < 3)
        throw ShapeError("pearson: need at least 3 observations, got " + std::to_string(n));
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0)
        throw DegenerateError("pearson: first variable is constant");
    if (syy == 0.0)
        throw DegenerateError("pearson: second variable is constant");
    double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
    r = std::clamp(r, -1.0, 1.0);
    constexpr double snap = 4.0 * std::numeric_limits<double>::epsilon();
    if (r > 1.0 - snap) r = 1.0;
    if (r < -1.0 + snap) r = -1.0;
    return r;
}

struct Significance {
    double t = 0.0;
    double p = 1.0;
    long df = 0;
    bool saturated = false;
};

/// df = n - 2 - controls; t = r * sqrt(df / (1 - r^2)); p two-tailed.
/// |r| = 1 is reported as p = 0 with the saturation flag.
inline Significance significance(double r, std::size_t n, int controls = 0) {
    Significance sig;
    sig.df = static_cast<long>(n) - 2 - controls;
    if (sig.df < 1)
        throw ShapeError("significance: df = n - 2 - controls must be >= 1, got " +
                         std::to_string(sig.df));
    if (std::fabs(r) > 1.0)
        throw ShapeError("significance: |r| > 1");
    if (std::fabs(r) == 1.0) {
        sig.saturated = true;
        sig.t = std::numeric_limits<double>::infinity() * (r > 0 ? 1.0 : -1.0);
        sig.p = 0.0;
        return sig;
    }
    sig.t = r * std::sqrt(static_cast<double>(sig.df) / (1.0 - r * r));
    sig.p = student_t_two_tailed_p(sig.t, static_cast<double>(sig.df));
    return sig;
}

/// First-order partial correlation r_xy.z.
inline double partial_correlation(std::span<const double> x, std::span<const double> y,
                                  std::span<const double> z) {
    if (x.size() != y.size() || x.size() != z.size())
        throw ShapeError("partial_correlation: length mismatch");
    if (x.size() < 4)
        throw ShapeError("partial_correlation: need at least 4 observations, got " +
                         std::to_string(x.size()));
    const double r_xy = pearson(x, y);
    const double r_xz = pearson(x, z);
    const double r_yz = pearson(y, z);
    if (std::fabs(r_xz) == 1.0 || std::fabs(r_yz) == 1.0)
        throw CollinearityError("partial_correlation: control explains a variable exactly");
    const double denom = std::sqrt((1.0 - r_xz * r_xz) * (1.0 - r_yz * r_yz));
    double r = (r_xy - r_xz * r_yz) / denom;
    return std::clamp(r, -1.0, 1.0);
}

/// Named, area-aligned vectors of equal length. Alignment is by area code.
struct VariableSet {
    struct Variable {
        std::string name;
        std::vector<double> values;
    };

    std::vector<AreaId> areas;
    std::vector<Variable> variables;
    std::vector<AreaId> excluded_areas;

    std::size_t n() const { return areas.size(); }

    void validate() const {
        if (areas.size() < 4)
            throw ShapeError("variable set: need at least 4 areas, got " +
                             std::to_string(areas.size()));
        std::set<std::string> names;
        for (const auto& var : variables) {
            if (var.values.size() != areas.size())
                throw ShapeError("variable '" + var.name + "' has " +
                                 std::to_string(var.values.size()) + " values for " +
                                 std::to_string(areas.size()) + " areas");
            if (!names.insert(var.name).second)
                throw DuplicateError("duplicate variable name '" + var.name + "'");
        }
    }

    const Variable& variable(const std::string& name) const {
        for (const auto& var : variables)
            if (var.name == name) return var;
        throw LookupError("unknown variable '" + name + "'");
    }
};

/// Remove the listed areas from every variable, preserving alignment.
inline VariableSet exclude_areas(const VariableSet& vars, const std::vector<std::string>& codes) {
    std::set<std::string> to_drop;
    std::vector<std::string> unknown;
    for (const auto& code : codes) {
        bool found = false;
        for (const auto& area : vars.areas)
            if (area.code == code) found = true;
        if (!found) unknown.push_back(code);
        to_drop.insert(code);
    }
    if (!unknown.empty()) {
        std::string msg = "exclude_areas: unknown area codes:";
        for (const auto& code : unknown) msg += " " + code;
        throw LookupError(msg);
    }
    VariableSet out;
    out.excluded_areas = vars.excluded_areas;
    for (std::size_t i = 0; i < vars.areas.size(); ++i) {
        if (to_drop.count(vars.areas[i].code)) {
            out.excluded_areas.push_back(vars.areas[i]);
            continue;
        }
        out.areas.push_back(vars.areas[i]);
    }
    for (const auto& var : vars.variables) {
        VariableSet::Variable kept;
        kept.name = var.name;
        for (std::size_t i = 0; i < vars.areas.size(); ++i)
            if (!to_drop.count(vars.areas[i].code)) kept.values.push_back(var.values[i]);
        out.variables.push_back(std::move(kept));
    }
    out.validate();
    return out;
}

/// Full symmetric Pearson matrix; k(k-1)/2 coefficient computations, each
/// mirrored into both cells. Diagonal is exactly 1 with saturation.
inline CorrelationReport correlation_matrix(const VariableSet& vars) {
    vars.validate();
    const std::size_t k = vars.variables.size();
    CorrelationReport report;
    report.n = vars.n();
    report.df = static_cast<long>(report.n) - 2;
    report.kind = CorrelationKind::Pearson;
    report.excluded_areas = vars.excluded_areas;
    for (const auto& var : vars.variables) report.variable_names.push_back(var.name);
    report.cells.assign(k * k, CorrelationCell{});
    for (std::size_t i = 0; i < k; ++i) {
        CorrelationCell diag;
        diag.r = 1.0;
        diag.t = std::numeric_limits<double>::infinity();
        diag.p = 0.0;
        diag.saturated = true;
        report.cells[i * k + i] = diag;
        for (std::size_t j = 0; j < i; ++j) {
            const double r = pearson(vars.variables[i].values, vars.variables[j].values);
            const Significance sig = significance(r, report.n, 0);
            CorrelationCell cell{r, sig.t, sig.p, sig.saturated};
            report.cells[i * k + j] = cell;
            report.cells[j * k + i] = cell;
        }
    }
    return report;
}

/// Partial correlation matrix among all variables except the control,
/// each pair controlling for it; significance uses controls = 1.
inline CorrelationReport partial_correlation_matrix(const VariableSet& vars,
                                                    const std::string& control_name) {
    vars.validate();
    const auto& control = vars.variable(control_name);
    CorrelationReport report;
    report.n = vars.n();
    report.df = static_cast<long>(report.n) - 3;
    report.kind = CorrelationKind::PartialControllingFor;
    report.control_variable = control_name;
    report.excluded_areas = vars.excluded_areas;
    std::vector<const VariableSet::Variable*> kept;
    for (const auto& var : vars.variables) {
        if (var.name == control_name) continue;
        kept.push_back(&var);
        report.variable_names.push_back(var.name);
    }
    if (kept.size() < 2)
        throw ShapeError("partial correlation matrix needs at least 2 non-control variables");
    const std::size_t k = kept.size();
    report.cells.assign(k * k, CorrelationCell{});
    for (std::size_t i = 0; i < k; ++i) {
        CorrelationCell diag;
        diag.r = 1.0;
        diag.t = std::numeric_limits<double>::infinity();
        diag.p = 0.0;
        diag.saturated = true;
        report.cells[i * k + i] = diag;
        for (std::size_t j = 0; j < i; ++j) {
            const double r =
                partial_correlation(kept[i]->values, kept[j]->values, control.values);
            const Significance sig = significance(r, report.n, 1);
            CorrelationCell cell{r, sig.t, sig.p, sig.saturated};
            report.cells[i * k + j] = cell;
            report.cells[j * k + i] = cell;
        }
    }
    return report;
}

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

/// Equal-width bins over [min, max]; bins are [lo, hi) except the last, which
/// is closed. With zero spread every value sits on the shared right edge and
/// lands in the last bin.
inline std::vector<HistogramBin> histogram(std::span<const double> values,
                                           std::size_t bin_count) {
    if (values.empty())
        throw ShapeError("histogram: no values");
    if (bin_count < 1)
        throw ConfigError("histogram: bin_count must be >= 1");
    double lo = values[0];
    double hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double width = (hi - lo) / static_cast<double>(bin_count);
    std::vector<HistogramBin> bins(bin_count);
    for (std::size_t b = 0; b < bin_count; ++b) {
        bins[b].lower = lo + width * static_cast<double>(b);
        bins[b].upper = b + 1 == bin_count ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (double v : values) {
        std::size_t idx;
        if (width == 0.0 || v >= bins[bin_count - 1].lower) {
            idx = bin_count - 1;
        } else {
            idx = static_cast<std::size_t>((v - lo) / width);
            if (idx >= bin_count) idx = bin_count - 1;
            // half-open convention: push boundary values into the upper bin
            if (v >= bins[idx].upper) ++idx;
            if (idx >= bin_count) idx = bin_count - 1;
        }
        ++bins[idx].count;
    }
    return bins;
}

/// Lower-triangle text rendering with star annotations, table style:
/// coefficients to 3 decimals without a leading zero (".960**").
inline std::string correlation_report_text(const CorrelationReport& report) {
    auto short_r = [](double r) {
        std::string s = format_display(r, 3);
        if (s.rfind("0.", 0) == 0) s = s.substr(1);
        else if (s.rfind("-0.", 0) == 0) s = "-" + s.substr(2);
        return s;
    };
    const std::size_t k = report.size();
    std::vector<std::vector<std::string>> grid(k + 1, std::vector<std::string>(k + 1));
    grid[0][0] = "Measure";
    for (std::size_t j = 0; j < k; ++j) grid[0][j + 1] = "(" + std::to_string(j + 1) + ")";
    for (std::size_t i = 0; i < k; ++i) {
        grid[i + 1][0] = "(" + std::to_string(i + 1) + ") " + report.variable_names[i];
        for (std::size_t j = 0; j < k; ++j) {
            if (j > i) {
                grid[i + 1][j + 1] = "-";
            } else if (j == i) {
                grid[i + 1][j + 1] = "1";
            } else {
                const CorrelationCell& cell = report.cell(i, j);
                grid[i + 1][j + 1] = short_r(cell.r) + significance_stars(cell.p);
            }
        }
    }
    std::vector<std::size_t> widths(k + 1, 0);
    for (const auto& row : grid)
        for (std::size_t c = 0; c <= k; ++c) widths[c] = std::max(widths[c], row[c].size());
    std::string out;
    if (report.kind == CorrelationKind::PartialControllingFor)
        out += "Partial correlation analysis, controlling for " + report.control_variable + "\n";
    else
        out += "Correlation analysis\n";
    out += "n = " + std::to_string(report.n);
    if (!report.excluded_areas.empty())
        out += " (excluding " + std::to_string(report.excluded_areas.size()) + " areas)";
    out += "\n\n";
    for (const auto& row : grid) {
        for (std::size_t c = 0; c <= k; ++c) {
            std::string field = row[c];
            field.resize(std::max(field.size(), widths[c] + 2), ' ');
            out += field;
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += "\n";
    }
    out += "\n(*) Significant at the 0.05 level (**) Significant at the 0.01 level (df=" +
           std::to_string(report.df) + ")\n";
    return out;
}

/// Machine-readable matrix: one row per lower-triangle pair.
inline std::string correlation_report_csv(const CorrelationReport& report) {
    std::string out = "variable_a,variable_b,r,t,p,df,stars\n";
    const std::size_t k = report.size();
    for (std::size_t i = 1; i < k; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const CorrelationCell& cell = report.cell(i, j);
            out += csv_line({report.variable_names[i], report.variable_names[j],
                             format_full(cell.r), format_full(cell.t), format_full(cell.p),
                             std::to_string(report.df), significance_stars(cell.p)});
        }
    }
    return out;
}

} // namespace imdr
