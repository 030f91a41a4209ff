#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nasa {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Strict numeric CSV with a header line; errors name the file and line.
CsvTable read_csv(const std::filesystem::path& path);

struct Curve {
  std::string label;
  std::vector<double> x, mean, stddev;
};

// Runs are grouped by their parent directory name with a trailing
// "seed<N>" / "-seed<N>" / "_seed<N>" removed, so out/nasa-td3_seed1 and
// out/nasa-td3_seed2 form one "nasa-td3" curve.
std::string run_label(const std::filesystem::path& csv);

// Mean +- stddev across the files of each group, for one column. Long
// per-step series are averaged into at most `max_points` bins first.
std::vector<Curve> aggregate(const std::vector<std::filesystem::path>& csvs, const std::vector<CsvTable>& tables,
                             const std::string& column, std::size_t max_points = 400);

std::string render_svg(const std::string& title, const std::vector<Curve>& curves);

// Writes one <column>.svg per metric column found in the inputs; returns the
// written paths in column order.
std::vector<std::filesystem::path> plot_metrics(const std::vector<std::filesystem::path>& csvs,
                                                const std::filesystem::path& out_dir);

}  // namespace nasa
