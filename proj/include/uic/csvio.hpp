#ifndef UIC_CSVIO_HPP_
#define UIC_CSVIO_HPP_

#include <string>
#include <vector>

#include "uic/gaussmix.hpp"

namespace uic {

/// Column layout of a labeled CSV dataset: named feature columns plus one
/// binary label column. Columns are matched against the file header.
struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::string label_column = "y";
};

struct CsvDataset {
  Dataset data;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
};

/// Parses a CSV file against the schema. Throws IoError when the file is
/// missing and ConfigError with row/column positions on malformed cells or
/// non-binary labels. A header-only file is an error.
CsvDataset load_csv_dataset(const std::string& path, const CsvSchema& schema);

/// Writes samples with the given schema; numbers are emitted with 17
/// significant digits so decimal-representable values round-trip bit-exactly.
void write_samples(const std::string& path, const Dataset& data,
                   const CsvSchema& schema);

/// One aggregated curve point: x, mean over seeds, std over seeds.
struct CurvePoint {
  double x;
  double mean;
  double std;
  int n_seeds;
};

/// CSV with header "x,mean,std,n_seeds"; UTF-8, LF line endings, '.' decimal
/// separator, byte-deterministic given identical inputs.
void write_curve(const std::string& path, const std::vector<CurvePoint>& pts);

/// CSV with header "x1,x2" for 2-D boundary polylines.
void write_boundary(const std::string& path,
                    const std::vector<Eigen::Vector2d>& points);

/// Result-table row of a recipe run.
struct ResultRow {
  std::string experiment_id;
  std::uint64_t seed;
  std::string family;
  std::string params;
  std::string metric;
  double value;
};

/// Sorts rows by (experiment_id, family, params, seed, metric) and writes
/// them with two leading comment lines carrying the artifact version and the
/// config hash. Byte-deterministic.
void write_result_table(const std::string& path, std::vector<ResultRow> rows,
                        const std::string& config_hash);

/// Formats a double with enough digits to round-trip.
std::string format_double(double v);

/// utility: read a whole file (IoError on failure).
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace uic

#endif  // UIC_CSVIO_HPP_
