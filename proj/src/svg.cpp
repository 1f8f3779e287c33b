#include "wageband/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wageband/io.hpp"

namespace wageband::svg {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

/// "Nice" tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = (norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0) * mag;
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

}  // namespace

Plot::Plot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

std::string Plot::next_color() {
  return kPalette[palette_index_++ % (sizeof kPalette / sizeof kPalette[0])];
}

Plot& Plot::line(const std::vector<double>& x, const std::vector<double>& y, std::string label,
                 std::string color) {
  if (color.empty()) color = next_color();
  series_.push_back({x, y, std::move(label), std::move(color), false, 0.0});
  return *this;
}

Plot& Plot::scatter(const std::vector<double>& x, const std::vector<double>& y, std::string label,
                    std::string color, double radius) {
  if (color.empty()) color = next_color();
  series_.push_back({x, y, std::move(label), std::move(color), true, radius});
  return *this;
}

Plot& Plot::vline(double x, std::string label, std::string color) {
  markers_.push_back({x, std::move(label), std::move(color)});
  return *this;
}

std::string Plot::render(int width, int height) const {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series_)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  for (const auto& m : markers_)
    if (std::isfinite(m.x)) {
      x0 = std::min(x0, m.x);
      x1 = std::max(x1, m.x);
    }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 <= x0) x0 -= 0.5, x1 += 0.5;
  if (y1 <= y0) y0 -= 0.5, y1 += 0.5;
  const double pad_y = 0.05 * (y1 - y0);
  y0 -= pad_y;
  y1 += pad_y;

  const double left = 80, right = 170, top = 50, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"#ffffff\"/>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">\n";
  os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(title_) << "</text>\n";
  os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw)
     << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#444444\"/>\n";
  for (double t : ticks(x0, x1)) {
    os << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(px(t))
       << "\" y2=\"" << fmt(top + ph + 5) << "\" stroke=\"#444444\"/>\n";
    os << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(top + ph + 18)
       << "\" text-anchor=\"middle\">" << io::format_number(io::round_significant(t)) << "</text>\n";
  }
  for (double t : ticks(y0, y1)) {
    os << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(left)
       << "\" y2=\"" << fmt(py(t)) << "\" stroke=\"#444444\"/>\n";
    os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(left + pw)
       << "\" y2=\"" << fmt(py(t)) << "\" stroke=\"#eeeeee\"/>\n";
    os << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py(t) + 4)
       << "\" text-anchor=\"end\">" << io::format_number(io::round_significant(t)) << "</text>\n";
  }
  os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << (height - 15)
     << "\" text-anchor=\"middle\">" << escape(x_label_) << "</text>\n";
  os << "<text x=\"20\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << fmt(top + ph / 2) << ")\">" << escape(y_label_) << "</text>\n";
  os << "</g>\n";

  for (const auto& m : markers_) {
    if (!std::isfinite(m.x)) continue;
    os << "<line x1=\"" << fmt(px(m.x)) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(px(m.x))
       << "\" y2=\"" << fmt(top + ph) << "\" stroke=\"" << m.color
       << "\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (const auto& s : series_) {
    if (s.points) {
      os << "<g fill=\"" << s.color << "\" fill-opacity=\"0.75\">\n";
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          os << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\""
             << fmt(s.radius) << "\"/>\n";
      os << "</g>\n";
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\" points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << (first ? "" : " ") << fmt(px(s.x[i])) << "," << fmt(py(s.y[i]));
        first = false;
      }
      os << "\"/>\n";
    }
  }
  // Legend
  os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">\n";
  double ly = top + 10;
  auto legend = [&](const std::string& label, const std::string& color, bool dashed) {
    os << "<line x1=\"" << fmt(left + pw + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\""
       << fmt(left + pw + 32) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"3\"" << (dashed ? " stroke-dasharray=\"4 3\"" : "") << "/>\n";
    os << "<text x=\"" << fmt(left + pw + 38) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(label)
       << "</text>\n";
    ly += 18;
  };
  for (const auto& s : series_)
    if (!s.label.empty()) legend(s.label, s.color, false);
  for (const auto& m : markers_)
    if (!m.label.empty()) legend(m.label, m.color, true);
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace wageband::svg
