#include "kelcap/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "kelcap/version.hpp"

namespace kelcap::csv {

namespace {

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\r\n") != std::string::npos;
}

std::string quoted(const std::string& field) {
  if (!needs_quoting(field)) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

// one logical CSV record, honoring quoted fields (which may contain newlines)
bool read_record(std::istream& is, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int ch;
  while ((ch = is.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (is.peek() == '"') {
          field += '"';
          is.get();
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (!any) return false;
  fields.push_back(field);
  return true;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& os, const experiments::ExperimentResult& result) {
  if (result.columns.empty()) throw std::invalid_argument("write_csv: no columns");
  const Eigen::Index rows = result.columns.front().second.size();
  for (const auto& [name, values] : result.columns)
    if (values.size() != rows)
      throw std::invalid_argument("write_csv: column '" + name + "' has mismatched length");
  for (std::size_t c = 0; c < result.columns.size(); ++c) {
    if (c) os << ',';
    os << quoted(result.columns[c].first);
  }
  os << '\n';
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < result.columns.size(); ++c) {
      if (c) os << ',';
      os << format_double(result.columns[c].second[r]);
    }
    os << '\n';
  }
}

void write_meta(std::ostream& os, const experiments::ExperimentResult& result,
                double wall_seconds) {
  os << "experiment=" << result.name << '\n';
  for (const auto& [key, value] : result.metadata) os << key << '=' << value << '\n';
  for (const auto& [key, value] : result.summary)
    os << "summary." << key << '=' << format_double(value) << '\n';
  os << "library_version=" << kVersion << '\n';
  os << "wall_clock_seconds=" << format_double(wall_seconds) << '\n';
}

void write_result_files(const std::filesystem::path& out_dir,
                        const experiments::ExperimentResult& result, double wall_seconds) {
  std::filesystem::create_directories(out_dir);
  const auto csv_path = out_dir / (result.name + ".csv");
  std::ofstream csv_file(csv_path);
  if (!csv_file) throw std::runtime_error("cannot open " + csv_path.string());
  write_csv(csv_file, result);
  if (!csv_file.good()) throw std::runtime_error("write failed: " + csv_path.string());

  const auto meta_path = out_dir / (result.name + ".meta");
  std::ofstream meta_file(meta_path);
  if (!meta_file) throw std::runtime_error("cannot open " + meta_path.string());
  write_meta(meta_file, result, wall_seconds);
  if (!meta_file.good()) throw std::runtime_error("write failed: " + meta_path.string());
}

std::vector<std::pair<std::string, Eigen::ArrayXd>> read_csv_columns(std::istream& is) {
  std::vector<std::string> header;
  if (!read_record(is, header)) throw std::runtime_error("read_csv_columns: empty input");
  std::vector<std::vector<double>> data(header.size());
  std::vector<std::string> fields;
  while (read_record(is, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing newline
    if (fields.size() != header.size())
      throw std::runtime_error("read_csv_columns: ragged row");
    for (std::size_t c = 0; c < fields.size(); ++c) {
      char* end = nullptr;
      const double value = std::strtod(fields[c].c_str(), &end);
      if (end == fields[c].c_str())
        throw std::runtime_error("read_csv_columns: non-numeric cell '" + fields[c] + "'");
      data[c].push_back(value);
    }
  }
  std::vector<std::pair<std::string, Eigen::ArrayXd>> out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    Eigen::ArrayXd column(static_cast<Eigen::Index>(data[c].size()));
    for (std::size_t r = 0; r < data[c].size(); ++r)
      column[static_cast<Eigen::Index>(r)] = data[c][r];
    out.emplace_back(header[c], std::move(column));
  }
  return out;
}

}  // namespace kelcap::csv
