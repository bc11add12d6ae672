#include "uic/csvio.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "uic/errors.hpp"
#include "uic/version.hpp"

namespace uic {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
    throw ConfigError("csv parse error at row " + std::to_string(row) +
                      ", column " + std::to_string(col + 1) + ": '" + cell +
                      "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

CsvDataset load_csv_dataset(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("empty dataset file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);

  std::vector<std::size_t> feature_idx;
  for (const std::string& name : schema.feature_columns) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ConfigError("dataset missing feature column '" + name + "'");
    feature_idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  const auto lit =
      std::find(header.begin(), header.end(), schema.label_column);
  if (lit == header.end())
    throw ConfigError("dataset missing label column '" + schema.label_column +
                      "'");
  const std::size_t label_idx = static_cast<std::size_t>(lit - header.begin());

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ConfigError("csv row " + std::to_string(row_no) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(header.size()));
    std::vector<double> feats;
    feats.reserve(feature_idx.size());
    for (std::size_t k : feature_idx)
      feats.push_back(parse_cell(cells[k], row_no, k));
    const double y = parse_cell(cells[label_idx], row_no, label_idx);
    if (y != 0.0 && y != 1.0)
      throw ConfigError("non-binary label at row " + std::to_string(row_no) +
                        ": '" + cells[label_idx] + "'");
    rows.push_back(std::move(feats));
    labels.push_back(static_cast<int>(y));
  }
  if (rows.empty()) throw ConfigError("dataset has a header but no rows: " + path);

  CsvDataset out;
  out.data.x.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(feature_idx.size()));
  out.data.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      out.data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          rows[i][k];
    out.data.y(static_cast<Eigen::Index>(i)) = labels[i];
    (labels[i] == 1 ? out.n_positive : out.n_negative) += 1;
  }
  return out;
}

void write_samples(const std::string& path, const Dataset& data,
                   const CsvSchema& schema) {
  if (static_cast<Eigen::Index>(schema.feature_columns.size()) !=
      data.x.cols())
    throw DomainError("write_samples: schema width mismatch");
  std::ostringstream out;
  for (std::size_t k = 0; k < schema.feature_columns.size(); ++k)
    out << schema.feature_columns[k] << ",";
  out << schema.label_column << "\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index k = 0; k < data.x.cols(); ++k)
      out << format_double(data.x(i, k)) << ",";
    out << data.y(i) << "\n";
  }
  write_file(path, out.str());
}

void write_curve(const std::string& path,
                 const std::vector<CurvePoint>& pts) {
  std::ostringstream out;
  out << "x,mean,std,n_seeds\n";
  for (const CurvePoint& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.mean) || !std::isfinite(p.std))
      throw DomainError("write_curve: non-finite value");
    out << format_double(p.x) << "," << format_double(p.mean) << ","
        << format_double(p.std) << "," << p.n_seeds << "\n";
  }
  write_file(path, out.str());
}

void write_boundary(const std::string& path,
                    const std::vector<Eigen::Vector2d>& points) {
  std::ostringstream out;
  out << "x1,x2\n";
  for (const Eigen::Vector2d& p : points) {
    if (!p.allFinite()) throw DomainError("write_boundary: non-finite point");
    out << format_double(p(0)) << "," << format_double(p(1)) << "\n";
  }
  write_file(path, out.str());
}

void write_result_table(const std::string& path, std::vector<ResultRow> rows,
                        const std::string& config_hash) {
  std::sort(rows.begin(), rows.end(),
            [](const ResultRow& a, const ResultRow& b) {
              return std::tie(a.experiment_id, a.family, a.params, a.seed,
                              a.metric) < std::tie(b.experiment_id, b.family,
                                                   b.params, b.seed, b.metric);
            });
  std::ostringstream out;
  out << "# artifact_version=" << kVersion << "\n";
  out << "# config_hash=" << config_hash << "\n";
  out << "experiment_id,seed,family,params,metric,value\n";
  for (const ResultRow& r : rows)
    out << r.experiment_id << "," << r.seed << "," << r.family << ","
        << r.params << "," << r.metric << "," << format_double(r.value)
        << "\n";
  write_file(path, out.str());
}

}  // namespace uic
