#include "spectemp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string_view>

#include "spectemp/errors.hpp"

namespace spectemp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

[[noreturn]] void parse_error(int line, const std::string& what) {
  throw IoError("line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view text, int line) {
  double x = 0.0;
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    parse_error(line, "not a number: '" + std::string(text) + "'");
  return x;
}

int parse_int(std::string_view text, int line) {
  int x = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    parse_error(line, "not an integer: '" + std::string(text) + "'");
  return x;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

template <class Fn>
auto parse_file(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in = open_in(path);
  try {
    return fn(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

template <class Fn>
void emit_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out = open_out(path);
  fn(out);
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.num_nodes() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  int lineno = 0;
  int n = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (n < 0) {
        std::istringstream hs{std::string(t.substr(1))};
        std::string word;
        int count = -1;
        if (!(hs >> word >> count) || word != "nodes" || count < 1) parse_error(lineno, "expected '# nodes N'");
        n = count;
      }
      continue;
    }
    if (n < 0) parse_error(lineno, "edge before the '# nodes N' header");
    std::istringstream ls{std::string(t)};
    std::string a, b, extra;
    if (!(ls >> a >> b) || (ls >> extra)) parse_error(lineno, "expected 'i j'");
    const int i = parse_int(a, lineno), j = parse_int(b, lineno);
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) parse_error(lineno, "invalid edge " + std::string(t));
    edges.push_back({std::min(i, j), std::max(i, j)});
  }
  if (n < 0) throw IoError("missing '# nodes N' header");
  return Graph(n, std::move(edges));
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_number(m(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (std::string_view cell : split(line, ',')) row.push_back(parse_double(cell, lineno));
    if (!rows.empty() && row.size() != rows.front().size())
      parse_error(lineno, "expected " + std::to_string(rows.front().size()) + " columns");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("empty matrix file");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_table_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

CsvTable read_table_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    for (std::string_view cell : split(line, ',')) cells.emplace_back(cell);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      parse_error(lineno, "expected " + std::to_string(table.header.size()) + " columns");
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw IoError("empty table");
  return table;
}

CsvTable phase_table(const std::vector<PhaseCell>& cells) {
  CsvTable t;
  t.header = {"n", "p", "trials", "unique_fraction", "recovery_fraction", "mean_rank", "degenerate", "failures"};
  for (const auto& c : cells)
    t.rows.push_back({std::to_string(c.n), format_number(c.p), std::to_string(c.trials),
                      format_number(c.unique_fraction), format_number(c.recovery_fraction),
                      format_number(c.mean_rank), c.degenerate ? "1" : "0", std::to_string(c.failures)});
  return t;
}

CsvTable rankhist_table(const RankHistogram& hist) {
  CsvTable t;
  t.header = {"rank", "count", "frequency", "unique", "recovered"};
  for (const auto& b : hist.buckets)
    t.rows.push_back({std::to_string(b.rank), std::to_string(b.count),
                      format_number(hist.trials > 0 ? static_cast<double>(b.count) / hist.trials : 0.0),
                      std::to_string(b.unique), std::to_string(b.recovered)});
  return t;
}

CsvTable noisy_table(const NoisyCurve& curve) {
  CsvTable t;
  t.header = {"m", "mean_error", "std_error", "repetitions", "mean_epsilon", "failures"};
  for (const auto& p : curve.points)
    t.rows.push_back({std::to_string(p.m), format_number(p.mean_error), format_number(p.std_error),
                      std::to_string(p.repetitions), format_number(p.mean_epsilon), std::to_string(p.failures)});
  // Exact-covariance limit.
  t.rows.push_back({"inf", format_number(curve.surrogate_error), "0", "1", "0", "0"});
  return t;
}

nlohmann::json to_json(const RecoveryResult& r) {
  nlohmann::json j;
  j["mode"] = std::string(to_string(r.mode));
  j["n"] = r.s_hat.rows();
  j["lambda_hat"] = std::vector<double>(r.lambda_hat.data(), r.lambda_hat.data() + r.lambda_hat.size());
  j["lambda_min"] = r.lambda_min ? nlohmann::json(*r.lambda_min) : nlohmann::json(nullptr);
  j["q"] = r.q;
  j["unique"] = r.unique;
  j["degenerate_spectrum"] = r.degenerate_spectrum;
  j["noisy"] = r.noisy;
  j["epsilon_used"] = r.epsilon_used;
  j["d_min_estimate"] = r.d_min_estimate ? nlohmann::json(*r.d_min_estimate) : nlohmann::json(nullptr);
  nlohmann::json edges = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.binarized.rows(); ++i)
    for (Eigen::Index j2 = i + 1; j2 < r.binarized.cols(); ++j2)
      if (r.binarized(i, j2) != 0.0) edges.push_back({i, j2});
  j["edges"] = std::move(edges);
  j["reweight_trace"] = r.reweight_trace;
  j["support_trace"] = r.support_trace;
  j["lp_iterations"] = r.lp_iterations;
  return j;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["n_values"] = cfg.n_values;
  j["p_values"] = cfg.p_values;
  j["trials"] = cfg.trials;
  j["mode"] = std::string(to_string(cfg.recovery.mode));
  j["filter"] = cfg.filter;
  j["sample_sizes"] = cfg.sample_sizes;
  j["repetitions"] = cfg.repetitions;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  j["delta"] = cfg.recovery.delta;
  j["max_reweight"] = cfg.recovery.max_reweight;
  j["eta"] = cfg.recovery.eta;
  j["epsilon"] = cfg.recovery.auto_epsilon ? nlohmann::json("auto") : nlohmann::json(cfg.recovery.epsilon);
  j["binarize_threshold"] = cfg.recovery.binarize_threshold;
  return j;
}

void apply_config_json(const nlohmann::json& j, ExperimentConfig& cfg) {
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_values") cfg.n_values = value.get<std::vector<int>>();
      else if (key == "p_values") cfg.p_values = value.get<std::vector<double>>();
      else if (key == "trials") cfg.trials = value.get<int>();
      else if (key == "mode") cfg.recovery.mode = shift_kind_from_string(value.get<std::string>());
      else if (key == "filter") cfg.filter = value.get<std::vector<double>>();
      else if (key == "sample_sizes") cfg.sample_sizes = value.get<std::vector<int>>();
      else if (key == "repetitions") cfg.repetitions = value.get<int>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
      else if (key == "threads") cfg.threads = value.get<int>();
      else if (key == "delta") cfg.recovery.delta = value.get<double>();
      else if (key == "max_reweight") cfg.recovery.max_reweight = value.get<int>();
      else if (key == "eta") cfg.recovery.eta = value.get<double>();
      else if (key == "binarize_threshold") cfg.recovery.binarize_threshold = value.get<double>();
      else if (key == "epsilon") {
        if (value.is_string() && value.get<std::string>() == "auto") {
          cfg.recovery.auto_epsilon = true;
          cfg.recovery.epsilon = 0.0;
        } else {
          cfg.recovery.auto_epsilon = false;
          cfg.recovery.epsilon = value.get<double>();
        }
      } else {
        throw ParameterError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  emit_file(path, [&](std::ostream& out) { out << text; });
}

Graph load_edge_list(const std::filesystem::path& path) {
  return parse_file(path, [](std::istream& in) { return read_edge_list(in); });
}

void save_edge_list(const std::filesystem::path& path, const Graph& g) {
  emit_file(path, [&](std::ostream& out) { write_edge_list(out, g); });
}

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path) {
  return parse_file(path, [](std::istream& in) { return read_matrix_csv(in); });
}

void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  emit_file(path, [&](std::ostream& out) { write_matrix_csv(out, m); });
}

void save_table_csv(const std::filesystem::path& path, const CsvTable& table) {
  emit_file(path, [&](std::ostream& out) { write_table_csv(out, table); });
}

nlohmann::json load_json(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace spectemp
