#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kelcap/experiments.hpp"

namespace kelcap::csv {

// shortest decimal form that round-trips a double (17 significant digits)
std::string format_double(double x);

void write_csv(std::ostream& os, const experiments::ExperimentResult& result);
void write_meta(std::ostream& os, const experiments::ExperimentResult& result,
                double wall_seconds);

// writes <out_dir>/<name>.csv and <out_dir>/<name>.meta
void write_result_files(const std::filesystem::path& out_dir,
                        const experiments::ExperimentResult& result, double wall_seconds);

// minimal RFC-4180 reader used for round-trip checks
std::vector<std::pair<std::string, Eigen::ArrayXd>> read_csv_columns(std::istream& is);

}  // namespace kelcap::csv
