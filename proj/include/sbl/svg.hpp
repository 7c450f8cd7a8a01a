#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sbl {

// Minimal self-contained SVG line/scatter plotter with optional log axes.
// Plots are derived artifacts: they never feed back into any computation.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel);

  void set_log_x(bool v) { log_x_ = v; }
  void set_log_y(bool v) { log_y_ = v; }

  void add_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::string& label,
                const std::string& color, double width = 1.5, bool dashed = false);
  void add_scatter(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::string& label,
                   const std::string& color, double radius = 2.0);

  void write(const std::string& path) const;

  // Blue-to-red interpolation for indexed curve families.
  static std::string rainbow_color(int index, int count);

 private:
  struct Series {
    Eigen::VectorXd x, y;
    std::string label, color;
    double width = 1.5;
    bool dashed = false;
    bool scatter = false;
  };
  std::string title_, xlabel_, ylabel_;
  bool log_x_ = false, log_y_ = false;
  std::vector<Series> series_;
};

}  // namespace sbl
