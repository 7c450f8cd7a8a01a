#include "sbl/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sbl {
namespace {

std::vector<double> parse_line(const std::string& line, const std::string& path) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(',', pos);
    if (next == std::string::npos) next = line.size();
    const std::string tok = line.substr(pos, next - pos);
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw IoError("bad numeric field '" + tok + "' in " + path);
    }
    pos = next + 1;
    if (next == line.size()) break;
  }
  return vals;
}

}  // namespace

std::string format_full(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void save_nodes_csv(const SpherePointSet& nodes, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  for (int i = 0; i < nodes.size(); ++i) {
    for (int j = 0; j < nodes.dim(); ++j) {
      if (j) f << ',';
      f << format_full(nodes.matrix()(i, j));
    }
    f << '\n';
  }
  if (!f) throw IoError("write failed for " + path);
}

SpherePointSet load_nodes_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(parse_line(line, path));
    if (rows.back().size() != rows.front().size())
      throw IoError("inconsistent column count in " + path);
  }
  if (rows.empty()) throw IoError("no points in " + path);
  Matrix pts(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return SpherePointSet(std::move(pts));
}

void save_rule_csv(const QuadratureRule& rule, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "# degree " << rule.certified_degree() << '\n';
  for (int i = 0; i < rule.size(); ++i) {
    for (int j = 0; j < rule.dim(); ++j) f << format_full(rule.nodes().matrix()(i, j)) << ',';
    f << format_full(rule.weights()(i)) << '\n';
  }
  if (!f) throw IoError("write failed for " + path);
}

QuadratureRule load_rule_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int degree = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream is(line.substr(1));
      std::string word;
      if (is >> word && word == "degree") is >> degree;
      continue;
    }
    rows.push_back(parse_line(line, path));
    if (rows.back().size() != rows.front().size())
      throw IoError("inconsistent column count in " + path);
  }
  if (rows.empty()) throw IoError("no rows in " + path);
  const std::size_t cols = rows[0].size();
  if (cols < 3) throw IoError("rule CSV needs x,y[,z],c columns in " + path);
  Matrix pts(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols - 1));
  Vector w(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j + 1 < cols; ++j)
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    w(static_cast<Eigen::Index>(i)) = rows[i][cols - 1];
  }
  return QuadratureRule(SpherePointSet(std::move(pts)), std::move(w), degree);
}

void CsvTable::add_row(std::initializer_list<double> vals) {
  rows.emplace_back(vals);
}

void save_table_csv(const CsvTable& table, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j) f << ',';
    f << table.columns[j];
  }
  f << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) f << ',';
      f << format_full(row[j]);
    }
    f << '\n';
  }
  if (!f) throw IoError("write failed for " + path);
}

CsvTable load_table_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(f, line)) throw IoError("empty table " + path);
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(',', pos);
    if (next == std::string::npos) next = line.size();
    t.columns.push_back(line.substr(pos, next - pos));
    pos = next + 1;
    if (next == line.size()) break;
  }
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    t.rows.push_back(parse_line(line, path));
  }
  return t;
}

}  // namespace sbl
