#pragma once

#include <string>
#include <vector>

#include "sbl/quadrature.hpp"

namespace sbl {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Node-set CSV: one `x,y[,z]` line per point, 17 significant digits.
void save_nodes_csv(const SpherePointSet& nodes, const std::string& path);
SpherePointSet load_nodes_csv(const std::string& path);

// Rule CSV: `x,y[,z],c` lines. The certified degree is carried in a
// `# degree N` comment line so a rule round-trips through one file.
void save_rule_csv(const QuadratureRule& rule, const std::string& path);
QuadratureRule load_rule_csv(const std::string& path);

// Generic numeric table with a header row, written with full precision.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::initializer_list<double> vals);
};

void save_table_csv(const CsvTable& table, const std::string& path);
CsvTable load_table_csv(const std::string& path);

std::string format_full(double v);

}  // namespace sbl
