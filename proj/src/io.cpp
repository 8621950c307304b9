#include "zipscan/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace zipscan {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> split_any_whitespace(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string token;
  while (in >> token) fields.push_back(token);
  return fields;
}

int parse_int(const std::string& token, const std::string& file, int line,
              const std::string& what) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(file, line, what + " is not an integer: '" + token + "'");
  }
  return value;
}

double parse_double(const std::string& token, const std::string& file, int line,
                    const std::string& what) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(file, line, what + " is not a number: '" + token + "'");
  }
  return value;
}

// Lines of the file with 1-based numbers; trailing \r stripped, empty lines
// dropped.
struct NumberedLine {
  int number;
  std::string text;
};

std::vector<NumberedLine> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::vector<NumberedLine> lines;
  std::string text;
  int number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    lines.push_back({number, text});
  }
  return lines;
}

// Long-form tables share the id/time bookkeeping; `values` receives the
// remaining fields of each row.
struct LongRows {
  std::vector<std::string> location_ids;
  int periods = 0;
  // per row: location index, 0-based time, line number
  std::vector<std::array<int, 3>> cells;
  std::vector<std::vector<std::string>> values;
};

LongRows read_long_table(const std::filesystem::path& path,
                         const std::string& header, size_t n_fields) {
  const std::string file = path.string();
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(file, 0, "empty file");
  if (lines[0].text != header) {
    throw ParseError(file, lines[0].number, "expected header '" + header + "'");
  }
  if (lines.size() == 1) throw ParseError(file, 0, "no data rows");

  LongRows rows;
  std::unordered_map<std::string, int> id_index;
  for (size_t r = 1; r < lines.size(); ++r) {
    const auto& [number, text] = lines[r];
    const auto fields = split(text, ',');
    if (fields.size() != n_fields) {
      throw ParseError(file, number,
                       "expected " + std::to_string(n_fields) + " fields, found " +
                           std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(file, number, "empty location_id");
    const int time = parse_int(fields[1], file, number, "time");
    if (time < 1) throw ParseError(file, number, "time must be at least 1");
    auto [it, inserted] =
        id_index.emplace(fields[0], static_cast<int>(rows.location_ids.size()));
    if (inserted) rows.location_ids.push_back(fields[0]);
    rows.periods = std::max(rows.periods, time);
    rows.cells.push_back({it->second, time - 1, number});
    rows.values.emplace_back(fields.begin() + 2, fields.end());
  }
  // Every cell exactly once.
  const int n = static_cast<int>(rows.location_ids.size());
  std::vector<char> seen(static_cast<size_t>(n) * rows.periods, 0);
  for (size_t r = 0; r < rows.cells.size(); ++r) {
    const auto [loc, t, number] = rows.cells[r];
    char& flag = seen[static_cast<size_t>(loc) * rows.periods + t];
    if (flag) {
      throw ParseError(file, number,
                       "duplicate cell for location '" + rows.location_ids[loc] +
                           "' at time " + std::to_string(t + 1));
    }
    flag = 1;
  }
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < rows.periods; ++t) {
      if (!seen[static_cast<size_t>(i) * rows.periods + t]) {
        throw ParseError(file, 0,
                         "missing cell for location '" + rows.location_ids[i] +
                             "' at time " + std::to_string(t + 1));
      }
    }
  }
  return rows;
}

}  // namespace

CountData ingest_counts(const std::filesystem::path& path) {
  const std::string file = path.string();
  LongRows rows = read_long_table(path, "location_id,time,count", 3);
  CountData data;
  data.location_ids = std::move(rows.location_ids);
  data.grid = CountGrid(static_cast<int>(data.location_ids.size()), rows.periods);
  for (size_t r = 0; r < rows.cells.size(); ++r) {
    const auto [loc, t, number] = rows.cells[r];
    const int count = parse_int(rows.values[r][0], file, number, "count");
    if (count < 0) throw ParseError(file, number, "count must be non-negative");
    data.grid.set(loc, t, count);
  }
  return data;
}

void write_counts(const std::filesystem::path& path, const CountData& data) {
  if (static_cast<int>(data.location_ids.size()) != data.grid.n_locations()) {
    throw DimensionError("location ids do not match the grid");
  }
  std::ofstream out(path);
  if (!out) throw ParseError(path.string(), 0, "cannot open file for writing");
  out << "location_id,time,count\n";
  for (int i = 0; i < data.grid.n_locations(); ++i) {
    for (int t = 0; t < data.grid.periods(); ++t) {
      out << data.location_ids[i] << ',' << t + 1 << ',' << data.grid.at(i, t)
          << '\n';
    }
  }
  if (!out) throw ParseError(path.string(), 0, "write failed");
}

BaselineData ingest_baselines(const std::filesystem::path& path) {
  const std::string file = path.string();
  LongRows rows = read_long_table(path, "location_id,time,p,mu", 4);
  BaselineData data;
  data.location_ids = std::move(rows.location_ids);
  data.grid = BaselineGrid(static_cast<int>(data.location_ids.size()), rows.periods);
  for (size_t r = 0; r < rows.cells.size(); ++r) {
    const auto [loc, t, number] = rows.cells[r];
    const double p = parse_double(rows.values[r][0], file, number, "p");
    const double mu = parse_double(rows.values[r][1], file, number, "mu");
    if (!std::isfinite(p) || p < 0.0 || p >= 1.0 - kPUpperMargin) {
      throw ParseError(file, number, "p must lie in [0, 1)");
    }
    if (!std::isfinite(mu) || mu <= kMuLowerBound) {
      throw ParseError(file, number, "mu must be positive");
    }
    data.grid.set(loc, t, {p, mu});
  }
  return data;
}

GeometryData ingest_geometry(const std::filesystem::path& path) {
  const std::string file = path.string();
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(file, 0, "empty file");

  GeometryData data;
  if (lines[0].text == "location_id,x,y") {
    data.kind = GeometryKind::kCoordinates;
    if (lines.size() == 1) throw ParseError(file, 0, "no data rows");
    std::unordered_map<std::string, int> id_index;
    for (size_t r = 1; r < lines.size(); ++r) {
      const auto& [number, text] = lines[r];
      const auto fields = split(text, ',');
      if (fields.size() != 3) {
        throw ParseError(file, number, "expected 3 fields, found " +
                                           std::to_string(fields.size()));
      }
      if (fields[0].empty()) throw ParseError(file, number, "empty location_id");
      if (!id_index.emplace(fields[0], static_cast<int>(data.location_ids.size()))
               .second) {
        throw ParseError(file, number, "duplicate location '" + fields[0] + "'");
      }
      const double x = parse_double(fields[1], file, number, "x");
      const double y = parse_double(fields[2], file, number, "y");
      if (!std::isfinite(x) || !std::isfinite(y)) {
        throw ParseError(file, number, "coordinates must be finite");
      }
      data.location_ids.push_back(fields[0]);
      data.points.push_back({x, y});
    }
    try {
      data.distances = DistanceMatrix::from_points(data.points);
    } catch (const ParameterError&) {
      throw ParseError(file, 0, "coincident locations produce a zero distance");
    }
    return data;
  }

  // Raw matrix: n rows of n values.
  data.kind = GeometryKind::kMatrix;
  const int n = static_cast<int>(lines.size());
  std::vector<std::vector<double>> matrix(n);
  for (int i = 0; i < n; ++i) {
    const auto& [number, text] = lines[i];
    const auto fields = text.find(',') != std::string::npos
                            ? split(text, ',')
                            : split_any_whitespace(text);
    if (static_cast<int>(fields.size()) != n) {
      throw ParseError(file, number,
                       "matrix must be square: " + std::to_string(n) +
                           " rows but " + std::to_string(fields.size()) +
                           " values in this row");
    }
    matrix[i].reserve(n);
    for (const auto& token : fields) {
      matrix[i].push_back(parse_double(token, file, number, "distance"));
    }
  }
  data.distances = DistanceMatrix(n);
  for (int i = 0; i < n; ++i) {
    const int number = lines[i].number;
    if (matrix[i][i] != 0.0) {
      throw ParseError(file, number, "diagonal distances must be zero");
    }
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (matrix[i][j] != matrix[j][i]) {
        throw ParseError(file, number,
                         "matrix must be symmetric; entries (" + std::to_string(i) +
                             "," + std::to_string(j) + ") disagree");
      }
      if (j > i) {
        try {
          data.distances.set(i, j, matrix[i][j]);
        } catch (const ParameterError&) {
          throw ParseError(file, number,
                           "off-diagonal distances must be finite and positive");
        }
      }
    }
  }
  return data;
}

std::vector<double> ingest_history(const std::filesystem::path& path) {
  const std::string file = path.string();
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(file, 0, "empty file");
  if (lines[0].text != "replicate,lambda") {
    throw ParseError(file, lines[0].number, "expected header 'replicate,lambda'");
  }
  if (lines.size() == 1) throw ParseError(file, 0, "no data rows");
  std::vector<double> values;
  for (size_t r = 1; r < lines.size(); ++r) {
    const auto& [number, text] = lines[r];
    const auto fields = split(text, ',');
    if (fields.size() != 2) {
      throw ParseError(file, number, "expected 2 fields, found " +
                                         std::to_string(fields.size()));
    }
    const int index = parse_int(fields[0], file, number, "replicate");
    if (index != static_cast<int>(r)) {
      throw ParseError(file, number, "replicates must be numbered 1.. in order");
    }
    const double lambda = parse_double(fields[1], file, number, "lambda");
    if (!std::isfinite(lambda)) {
      throw ParseError(file, number, "lambda must be finite");
    }
    values.push_back(lambda);
  }
  return values;
}

void write_history(const std::filesystem::path& path,
                   const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw ParseError(path.string(), 0, "cannot open file for writing");
  out << "replicate,lambda\n";
  char buffer[64];
  for (size_t j = 0; j < values.size(); ++j) {
    std::snprintf(buffer, sizeof buffer, "%.17g", values[j]);
    out << j + 1 << ',' << buffer << '\n';
  }
  if (!out) throw ParseError(path.string(), 0, "write failed");
}

std::string method_name(Statistic statistic) {
  switch (statistic) {
    case Statistic::kEbZip:
      return "eb-zip";
    case Statistic::kEbPoisson:
      return "eb-poisson";
  }
  throw ParameterError("unknown statistic");
}

Statistic parse_method(const std::string& name) {
  if (name == "eb-zip") return Statistic::kEbZip;
  if (name == "eb-poisson") return Statistic::kEbPoisson;
  throw ParameterError("unknown statistic '" + name +
                       "' (expected eb-zip or eb-poisson)");
}

std::string format_table_double(double value) {
  if (std::isnan(value)) return "NA";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return buffer;
}

std::string experiment_table_csv(const ExperimentTable& table) {
  std::string out =
      "scenario,locations,p,mu,relative_risk,outbreak_size,method,alpha,week,"
      "datasets,first_detections,detected_by,prop_detected_by,precision_median,"
      "recall_median,f_median,f_p05,f_p95\n";
  for (const auto& row : table.rows) {
    out += std::to_string(row.scenario_index);
    out += ',';
    out += std::to_string(row.locations);
    out += ',';
    out += format_table_double(row.p);
    out += ',';
    out += format_table_double(row.mu);
    out += ',';
    out += format_table_double(row.relative_risk);
    out += ',';
    out += std::to_string(row.outbreak_size);
    out += ',';
    out += method_name(row.method);
    out += ',';
    out += format_table_double(row.alpha);
    out += ',';
    out += std::to_string(row.week);
    out += ',';
    out += std::to_string(row.datasets);
    out += ',';
    out += std::to_string(row.first_detections);
    out += ',';
    out += std::to_string(row.detected_by);
    out += ',';
    out += format_table_double(row.prop_detected_by);
    out += ',';
    out += format_table_double(row.precision_median);
    out += ',';
    out += format_table_double(row.recall_median);
    out += ',';
    out += format_table_double(row.f_median);
    out += ',';
    out += format_table_double(row.f_p05);
    out += ',';
    out += format_table_double(row.f_p95);
    out += '\n';
  }
  return out;
}

void write_experiment_table(const std::filesystem::path& path,
                            const ExperimentTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string(), 0, "cannot open file for writing");
  out << experiment_table_csv(table);
  if (!out) throw ParseError(path.string(), 0, "write failed");
}

}  // namespace zipscan
