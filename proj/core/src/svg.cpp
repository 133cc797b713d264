#include "fgnam/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"

namespace fgnam {

namespace {

constexpr int kPanelW = 220;
constexpr int kPanelH = 160;
constexpr int kMargin = 34;
constexpr int kCols = 4;

std::string num(double v) { return fmt_fixed(v, 2); }

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("svg: cannot write " + path);
  out << body;
  if (!out) throw Error("svg: write failed for " + path);
}

std::string escape_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

void render_shape_svg(const std::vector<ShapeCurve>& curves, const std::string& path) {
  if (curves.empty()) throw Error("svg: no curves to render");
  const int n = static_cast<int>(curves.size());
  const int cols = std::min(kCols, n);
  const int rows = (n + cols - 1) / cols;
  const int width = cols * (kPanelW + kMargin) + kMargin;
  const int height = rows * (kPanelH + kMargin) + kMargin;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

  for (int c = 0; c < n; ++c) {
    const ShapeCurve& curve = curves[static_cast<std::size_t>(c)];
    const int px = kMargin + (c % cols) * (kPanelW + kMargin);
    const int py = kMargin + (c / cols) * (kPanelH + kMargin);

    double x_lo = curve.grid.front(), x_hi = curve.grid.back();
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    double y_lo = *std::min_element(curve.values.begin(), curve.values.end());
    double y_hi = *std::max_element(curve.values.begin(), curve.values.end());
    y_lo = std::min(y_lo, 0.0);
    y_hi = std::max(y_hi, 0.0);
    if (y_hi == y_lo) {
      y_lo -= 1.0;
      y_hi += 1.0;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    auto sx = [&](double x) { return px + (x - x_lo) / (x_hi - x_lo) * kPanelW; };
    auto sy = [&](double y) { return py + kPanelH - (y - y_lo) / (y_hi - y_lo) * kPanelH; };

    svg << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << kPanelW << "\" height=\""
        << kPanelH << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << px << "\" y1=\"" << num(sy(0.0)) << "\" x2=\"" << px + kPanelW
        << "\" y2=\"" << num(sy(0.0)) << "\" stroke=\"#bbb\" stroke-width=\"1\" "
        << "stroke-dasharray=\"4 3\"/>\n";

    svg << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
    for (std::size_t g = 0; g < curve.grid.size(); ++g) {
      if (g) svg << ' ';
      svg << num(sx(curve.grid[g])) << ',' << num(sy(curve.values[g]));
    }
    svg << "\"/>\n";

    svg << "<text x=\"" << px << "\" y=\"" << py - 6 << "\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << escape_text(curve.feature_name) << " (risk " << curve.risk
        << ")</text>\n";
    svg << "<text x=\"" << px << "\" y=\"" << py + kPanelH + 14
        << "\" font-family=\"sans-serif\" font-size=\"9\">" << num(x_lo) << "</text>\n";
    svg << "<text x=\"" << px + kPanelW << "\" y=\"" << py + kPanelH + 14
        << "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"end\">" << num(x_hi)
        << "</text>\n";
  }
  svg << "</svg>\n";
  write_file(path, svg.str());
}

void render_importance_svg(const ImportanceTable& table, int risk, const std::string& path) {
  const int p = static_cast<int>(table.scores.rows());
  if (p == 0) throw Error("svg: empty importance table");
  if (risk < 1 || risk > static_cast<int>(table.scores.cols()))
    throw Error("svg: risk out of range");

  const auto& order = table.ranking[static_cast<std::size_t>(risk - 1)];
  const double max_score = std::max(table.scores.col(risk - 1).maxCoeff(), 1e-300);

  const int bar_h = 18, gap = 6, label_w = 170;
  const int width = label_w + 320 + 2 * kMargin;
  const int height = kMargin * 2 + p * (bar_h + gap);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kMargin << "\" y=\"" << kMargin - 12
      << "\" font-family=\"sans-serif\" font-size=\"12\">feature importance, risk " << risk
      << "</text>\n";

  for (int pos = 0; pos < p; ++pos) {
    const int i = order[static_cast<std::size_t>(pos)];
    const double score = table.scores(i, risk - 1);
    const double w = 320.0 * score / max_score;
    const int y = kMargin + pos * (bar_h + gap);
    const std::string name = i < static_cast<int>(table.feature_names.size())
                                 ? table.feature_names[static_cast<std::size_t>(i)]
                                 : "x" + std::to_string(i + 1);
    svg << "<text x=\"" << kMargin + label_w - 6 << "\" y=\"" << y + bar_h - 5
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
        << escape_text(name) << "</text>\n";
    svg << "<rect x=\"" << kMargin + label_w << "\" y=\"" << y << "\" width=\"" << num(w)
        << "\" height=\"" << bar_h << "\" fill=\"#b2451f\"/>\n";
    svg << "<text x=\"" << num(kMargin + label_w + w + 4) << "\" y=\"" << y + bar_h - 5
        << "\" font-family=\"sans-serif\" font-size=\"9\">" << fmt_fixed(score, 4)
        << "</text>\n";
  }
  svg << "</svg>\n";
  write_file(path, svg.str());
}

}  // namespace fgnam
