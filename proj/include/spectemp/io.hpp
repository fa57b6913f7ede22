#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "spectemp/experiments.hpp"
#include "spectemp/graph.hpp"
#include "spectemp/recovery.hpp"

namespace spectemp {

// Edge list: a "# nodes N" header, then one "i j" pair per line (0-based,
// i < j). Blank lines and further '#' lines are ignored on input.
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);

// Dense matrix as CSV, one row per line. Numbers are written in their
// shortest round-trip form, so a write/read cycle reproduces every double.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& in);

// Table with a header row; cells are kept as text. Numbers written through
// format_number read back to the same double.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

std::string format_number(double x);
void write_table_csv(std::ostream& out, const CsvTable& table);
CsvTable read_table_csv(std::istream& in);

CsvTable phase_table(const std::vector<PhaseCell>& cells);
CsvTable rankhist_table(const RankHistogram& hist);
CsvTable noisy_table(const NoisyCurve& curve);

nlohmann::json to_json(const RecoveryResult& result);
nlohmann::json to_json(const ExperimentConfig& cfg);

// Overwrites the fields present in `j`; unknown keys are rejected with
// ParameterError.
void apply_config_json(const nlohmann::json& j, ExperimentConfig& cfg);

// File helpers. Failures to open, read or parse raise IoError (a missing
// file included); parent directories are created on write.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
Graph load_edge_list(const std::filesystem::path& path);
void save_edge_list(const std::filesystem::path& path, const Graph& g);
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);
void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
void save_table_csv(const std::filesystem::path& path, const CsvTable& table);
nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace spectemp
