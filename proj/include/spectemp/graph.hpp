#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spectemp {

// Undirected edge with u < v.
struct Edge {
  int u = 0;
  int v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Undirected, unweighted, loop-free graph on nodes 0..n-1. Edges are kept
// sorted and unique; (i,j) and (j,i) name the same edge.
class Graph {
 public:
  explicit Graph(int num_nodes, std::vector<Edge> edges = {});

  int num_nodes() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }
  bool has_edge(int i, int j) const;

  Eigen::MatrixXd adjacency() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int n_;
  std::vector<Edge> edges_;
};

enum class ShiftKind { Adjacency, NormalizedLaplacian, CombinatorialLaplacian, GenericSymmetric };

std::string_view to_string(ShiftKind kind);
ShiftKind shift_kind_from_string(std::string_view name);

// Dense symmetric shift operator tagged with what it represents. The
// constructor enforces symmetry and the kind-specific structure (hollow 0/1
// adjacency, unit-diagonal normalized Laplacian, zero-row-sum combinatorial
// Laplacian); PSD-ness of the Laplacians is not re-checked here.
class ShiftMatrix {
 public:
  ShiftMatrix(ShiftKind kind, Eigen::MatrixXd data);

  ShiftKind kind() const { return kind_; }
  const Eigen::MatrixXd& matrix() const { return data_; }
  int size() const { return static_cast<int>(data_.rows()); }
  double operator()(int i, int j) const { return data_(i, j); }

 private:
  ShiftKind kind_;
  Eigen::MatrixXd data_;
};

inline constexpr double kSymmetryTol = 1e-12;

Graph erdos_renyi(int n, double p, std::uint64_t seed);

// Resamples erdos_renyi on successive streams of `seed` until the graph is
// connected. Empty after max_attempts failures.
std::optional<Graph> connected_erdos_renyi(int n, double p, std::uint64_t seed, int max_attempts = 1000);

Eigen::VectorXd degrees(const Graph& g);

bool is_connected(const Graph& g);

ShiftMatrix build_shift(const Graph& g, ShiftKind kind);

// Graph whose edges are the off-diagonal entries with |m_ij| > tol (upper triangle).
Graph support_graph(const Eigen::MatrixXd& m, double tol);

// Named small graphs used throughout tests and examples.
Graph path_graph(int n);
Graph cycle_graph(int n);
Graph complete_graph(int n);
Graph star_graph(int leaves);

}  // namespace spectemp
