#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "gtvseg/evalx/metrics.hpp"

namespace gtvseg::cli {
namespace {

constexpr double kW = 640, kH = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 60, kBottom = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axis {
  double lo, hi;
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Axis range_of(const std::vector<double>& v) {
  if (v.empty()) return {0, 1};
  double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void header(std::ostringstream& os, const std::string& title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kW << "\" height=\"" << kH
     << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << xml_escape(title) << "</text>\n";
}

void y_axis(std::ostringstream& os, const Axis& ax, const std::string& label) {
  const double y0 = kH - kBottom, y1 = kTop;
  os << "<line x1=\"" << kLeft << "\" y1=\"" << y0 << "\" x2=\"" << kLeft << "\" y2=\"" << y1
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = ax.lo + (ax.hi - ax.lo) * i / 4.0;
    const double y = ax.map(v, y0, y1);
    os << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft << "\" y2=\"" << num(y)
       << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(v) << "</text>\n";
  }
  os << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"12\" transform=\"rotate(-90 16 " << (y0 + y1) / 2 << ")\">" << xml_escape(label)
     << "</text>\n";
}

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string boxplot_svg(const std::vector<BoxGroup>& groups, const std::string& title,
                        const std::string& y_label) {
  std::vector<double> all;
  for (const auto& g : groups) all.insert(all.end(), g.values.begin(), g.values.end());
  const Axis ax = range_of(all);
  std::ostringstream os;
  header(os, title);
  y_axis(os, ax, y_label);
  const double y0 = kH - kBottom, y1 = kTop;
  const double slot = (kW - kLeft - kRight) / std::max<std::size_t>(1, groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double cx = kLeft + slot * (i + 0.5);
    const double half = std::min(30.0, slot * 0.3);
    os << "<text x=\"" << num(cx) << "\" y=\"" << y0 + 20
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << xml_escape(groups[i].label) << " (n=" << groups[i].values.size() << ")</text>\n";
    if (groups[i].values.empty()) continue;
    const auto& v = groups[i].values;
    const double q1 = eval::percentile_linear(v, 0.25), med = eval::percentile_linear(v, 0.5),
                 q3 = eval::percentile_linear(v, 0.75);
    const double iqr = q3 - q1;
    double wlo = q3, whi = q1;
    for (double x : v) {
      if (x >= q1 - 1.5 * iqr) wlo = std::min(wlo, x);
      if (x <= q3 + 1.5 * iqr) whi = std::max(whi, x);
    }
    auto Y = [&](double x) { return num(ax.map(x, y0, y1)); };
    os << "<line x1=\"" << num(cx) << "\" y1=\"" << Y(wlo) << "\" x2=\"" << num(cx) << "\" y2=\"" << Y(whi)
       << "\" stroke=\"black\"/>\n";
    os << "<rect x=\"" << num(cx - half) << "\" y=\"" << Y(q3) << "\" width=\"" << num(2 * half)
       << "\" height=\"" << num(ax.map(q1, y0, y1) - ax.map(q3, y0, y1))
       << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << num(cx - half) << "\" y1=\"" << Y(med) << "\" x2=\"" << num(cx + half)
       << "\" y2=\"" << Y(med) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    for (double w : {wlo, whi}) {
      os << "<line x1=\"" << num(cx - half / 2) << "\" y1=\"" << Y(w) << "\" x2=\"" << num(cx + half / 2)
         << "\" y2=\"" << Y(w) << "\" stroke=\"black\"/>\n";
    }
    for (double x : v) {
      if (x < wlo || x > whi) {
        os << "<circle cx=\"" << num(cx) << "\" cy=\"" << Y(x) << "\" r=\"3\" fill=\"none\" stroke=\"black\"/>\n";
      }
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::string& annotation) {
  if (x.size() != y.size()) throw std::invalid_argument("scatter_svg: x and y differ in length");
  const Axis ax = range_of(x), ay = range_of(y);
  std::ostringstream os;
  header(os, title);
  os << "<text x=\"" << kW / 2 << "\" y=\"44\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"12\">" << xml_escape(annotation) << "</text>\n";
  y_axis(os, ay, y_label);
  const double y0 = kH - kBottom, x0 = kLeft, x1 = kW - kRight;
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = ax.lo + (ax.hi - ax.lo) * i / 4.0;
    const double px = ax.map(v, x0, x1);
    os << "<text x=\"" << num(px) << "\" y=\"" << y0 + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(v) << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kH - 16
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(x_label)
     << "</text>\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << "<circle cx=\"" << num(ax.map(x[i], x0, x1)) << "\" cy=\"" << num(ay.map(y[i], y0, kTop))
       << "\" r=\"4\" fill=\"#3182bd\" fill-opacity=\"0.7\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace gtvseg::cli
