#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace imdr {

/// Fixed two-decimal coordinate formatting keeps documents byte-deterministic.
inline std::string svg_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

/// Minimal SVG 1.1 document assembler. Elements are appended in call order;
/// text uses generic font families only.
class SvgDocument {
public:
    SvgDocument(double width, double height) : width_(width), height_(height) {}

    void path(const std::string& d, const std::string& fill, const std::string& stroke,
              double stroke_width, const std::string& extra = "") {
        body_ += "  <path d=\"" + d + "\" fill=\"" + fill + "\" stroke=\"" + stroke +
                 "\" stroke-width=\"" + svg_num(stroke_width) + "\" fill-rule=\"evenodd\"" +
                 (extra.empty() ? "" : " " + extra) + "/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width) {
        body_ += "  <line x1=\"" + svg_num(x1) + "\" y1=\"" + svg_num(y1) + "\" x2=\"" +
                 svg_num(x2) + "\" y2=\"" + svg_num(y2) + "\" stroke=\"" + stroke +
                 "\" stroke-width=\"" + svg_num(stroke_width) + "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke, const std::string& extra = "") {
        body_ += "  <rect x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\" width=\"" +
                 svg_num(w) + "\" height=\"" + svg_num(h) + "\" fill=\"" + fill +
                 "\" stroke=\"" + stroke + "\"" + (extra.empty() ? "" : " " + extra) + "/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& stroke) {
        body_ += "  <circle cx=\"" + svg_num(cx) + "\" cy=\"" + svg_num(cy) + "\" r=\"" +
                 svg_num(r) + "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\"/>\n";
    }

    void polygon(const std::vector<std::pair<double, double>>& points, const std::string& fill,
                 const std::string& stroke, double stroke_width,
                 const std::string& extra = "") {
        std::string pts;
        for (const auto& [x, y] : points) {
            if (!pts.empty()) pts += " ";
            pts += svg_num(x) + "," + svg_num(y);
        }
        body_ += "  <polygon points=\"" + pts + "\" fill=\"" + fill + "\" stroke=\"" + stroke +
                 "\" stroke-width=\"" + svg_num(stroke_width) + "\"" +
                 (extra.empty() ? "" : " " + extra) + "/>\n";
    }

    void text(double x, double y, double size, const std::string& content,
              const std::string& anchor = "start", const std::string& fill = "#000000") {
        body_ += "  <text x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\" font-size=\"" +
                 svg_num(size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
                 "\" fill=\"" + fill + "\">" + xml_escape(content) + "</text>\n";
    }

    void raw(const std::string& fragment) { body_ += fragment; }

    std::string str() const {
        std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
               svg_num(width_) + "\" height=\"" + svg_num(height_) + "\" viewBox=\"0 0 " +
               svg_num(width_) + " " + svg_num(height_) + "\">\n";
        out += body_;
        out += "</svg>\n";
        return out;
    }

private:
    double width_;
    double height_;
    std::string body_;
};

} // namespace imdr
