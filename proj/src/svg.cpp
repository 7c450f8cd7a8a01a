#include "sbl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sbl {
namespace {

constexpr double kW = 640, kH = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 48;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

void SvgPlot::add_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const std::string& label, const std::string& color, double width,
                       bool dashed) {
  series_.push_back({x, y, label, color, width, dashed, false});
}

void SvgPlot::add_scatter(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                          const std::string& label, const std::string& color, double radius) {
  series_.push_back({x, y, label, color, radius, false, true});
}

std::string SvgPlot::rainbow_color(int index, int count) {
  const double t = count <= 1 ? 0.0 : static_cast<double>(index) / (count - 1);
  const int r = static_cast<int>(30 + 215 * t);
  const int g = static_cast<int>(60 + 60 * std::sin(M_PI * t));
  const int b = static_cast<int>(245 - 215 * t);
  std::ostringstream os;
  os << "rgb(" << r << ',' << g << ',' << b << ')';
  return os.str();
}

void SvgPlot::write(const std::string& path) const {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto tx = [&](double v) { return log_x_ ? std::log10(std::max(v, 1e-300)) : v; };
  auto ty = [&](double v) { return log_y_ ? std::log10(std::max(v, 1e-300)) : v; };
  for (const auto& s : series_)
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
      if (log_x_ && s.x(i) <= 0) continue;
      if (log_y_ && s.y(i) <= 0) continue;
      xmin = std::min(xmin, tx(s.x(i)));
      xmax = std::max(xmax, tx(s.x(i)));
      ymin = std::min(ymin, ty(s.y(i)));
      ymax = std::max(ymax, ty(s.y(i)));
    }
  if (!(xmin < xmax)) { xmin -= 0.5; xmax += 0.5; }
  if (!(ymin < ymax)) { ymin -= 0.5; ymax += 0.5; }
  const double xspan = xmax - xmin, yspan = ymax - ymin;
  xmin -= 0.03 * xspan; xmax += 0.03 * xspan;
  ymin -= 0.05 * yspan; ymax += 0.05 * yspan;

  auto px = [&](double v) { return kLeft + (tx(v) - xmin) / (xmax - xmin) * (kW - kLeft - kRight); };
  auto py = [&](double v) { return kH - kBottom - (ty(v) - ymin) / (ymax - ymin) * (kH - kTop - kBottom); };

  std::ofstream f(path);
  if (!f) throw std::runtime_error("SvgPlot: cannot open " + path);
  f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
    << "' viewBox='0 0 " << kW << ' ' << kH << "'>\n"
    << "<rect width='100%' height='100%' fill='white'/>\n"
    << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title_
    << "</text>\n";

  // Frame and ticks.
  f << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << kW - kLeft - kRight
    << "' height='" << kH - kTop - kBottom << "' fill='none' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    const double gx = kLeft + (kW - kLeft - kRight) * i / 5.0;
    const double gy = kH - kBottom - (kH - kTop - kBottom) * i / 5.0;
    const double lx = log_x_ ? std::pow(10.0, fx) : fx;
    const double ly = log_y_ ? std::pow(10.0, fy) : fy;
    f << "<line x1='" << gx << "' y1='" << kH - kBottom << "' x2='" << gx << "' y2='"
      << kH - kBottom + 4 << "' stroke='black'/>\n"
      << "<text x='" << gx << "' y='" << kH - kBottom + 16 << "' text-anchor='middle' font-size='10'>"
      << fmt(lx) << "</text>\n"
      << "<line x1='" << kLeft - 4 << "' y1='" << gy << "' x2='" << kLeft << "' y2='" << gy
      << "' stroke='black'/>\n"
      << "<text x='" << kLeft - 6 << "' y='" << gy + 3 << "' text-anchor='end' font-size='10'>"
      << fmt(ly) << "</text>\n";
  }
  f << "<text x='" << kW / 2 << "' y='" << kH - 12 << "' text-anchor='middle' font-size='12'>"
    << xlabel_ << "</text>\n"
    << "<text x='16' y='" << kH / 2 << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
    << kH / 2 << ")'>" << ylabel_ << "</text>\n";

  for (const auto& s : series_) {
    if (s.scatter) {
      for (Eigen::Index i = 0; i < s.x.size(); ++i) {
        if ((log_x_ && s.x(i) <= 0) || (log_y_ && s.y(i) <= 0)) continue;
        f << "<circle cx='" << px(s.x(i)) << "' cy='" << py(s.y(i)) << "' r='" << s.width
          << "' fill='" << s.color << "'/>\n";
      }
    } else {
      f << "<polyline fill='none' stroke='" << s.color << "' stroke-width='" << s.width << "'";
      if (s.dashed) f << " stroke-dasharray='6,4'";
      f << " points='";
      for (Eigen::Index i = 0; i < s.x.size(); ++i) {
        if ((log_x_ && s.x(i) <= 0) || (log_y_ && s.y(i) <= 0)) continue;
        f << px(s.x(i)) << ',' << py(s.y(i)) << ' ';
      }
      f << "'/>\n";
    }
  }

  // Legend.
  double ly = kTop + 12;
  for (const auto& s : series_) {
    if (s.label.empty()) continue;
    f << "<line x1='" << kW - kRight - 130 << "' y1='" << ly << "' x2='" << kW - kRight - 108
      << "' y2='" << ly << "' stroke='" << s.color << "' stroke-width='2'"
      << (s.dashed ? " stroke-dasharray='6,4'" : "") << "/>\n"
      << "<text x='" << kW - kRight - 102 << "' y='" << ly + 3 << "' font-size='10'>" << s.label
      << "</text>\n";
    ly += 14;
  }
  f << "</svg>\n";
  if (!f) throw std::runtime_error("SvgPlot: write failed for " + path);
}

}  // namespace sbl
