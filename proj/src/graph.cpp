#include "spectemp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spectemp/errors.hpp"
#include "spectemp/rng.hpp"

namespace spectemp {

Graph::Graph(int num_nodes, std::vector<Edge> edges) : n_(num_nodes), edges_(std::move(edges)) {
  if (n_ < 1) throw ParameterError("graph must have at least one node");
  for (auto& e : edges_) {
    if (e.u == e.v) throw ParameterError("self-loop at node " + std::to_string(e.u));
    if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_)
      throw ParameterError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                           ") out of range for " + std::to_string(n_) + " nodes");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool Graph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

Eigen::MatrixXd Graph::adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& e : edges_) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

std::string_view to_string(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::Adjacency: return "adjacency";
    case ShiftKind::NormalizedLaplacian: return "nlaplacian";
    case ShiftKind::CombinatorialLaplacian: return "claplacian";
    case ShiftKind::GenericSymmetric: return "symmetric";
  }
  return "unknown";
}

ShiftKind shift_kind_from_string(std::string_view name) {
  if (name == "adjacency") return ShiftKind::Adjacency;
  if (name == "nlaplacian") return ShiftKind::NormalizedLaplacian;
  if (name == "claplacian") return ShiftKind::CombinatorialLaplacian;
  if (name == "symmetric") return ShiftKind::GenericSymmetric;
  throw ParameterError("unknown shift kind '" + std::string(name) + "'");
}

ShiftMatrix::ShiftMatrix(ShiftKind kind, Eigen::MatrixXd data) : kind_(kind), data_(std::move(data)) {
  const Eigen::Index n = data_.rows();
  if (n == 0 || data_.cols() != n) throw DimensionMismatch("shift matrix must be square and non-empty");
  if ((data_ - data_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
    throw ContractViolation("shift matrix is not symmetric");
  switch (kind_) {
    case ShiftKind::Adjacency:
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const double x = data_(i, j);
          if (i == j ? x != 0.0 : (x != 0.0 && x != 1.0))
            throw ContractViolation("adjacency must be hollow with 0/1 entries");
        }
      break;
    case ShiftKind::NormalizedLaplacian:
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const double x = data_(i, j);
          const bool ok = i == j ? std::abs(x - 1.0) <= kSymmetryTol : (x <= 0.0 && x >= -1.0);
          if (!ok) throw ContractViolation("normalized Laplacian needs unit diagonal and off-diagonal in [-1,0]");
        }
      break;
    case ShiftKind::CombinatorialLaplacian:
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(data_.row(i).sum()) > 1e-9 * std::max(1.0, std::abs(data_(i, i))))
          throw ContractViolation("combinatorial Laplacian rows must sum to zero");
        for (Eigen::Index j = 0; j < n; ++j)
          if (i != j && data_(i, j) > 0.0)
            throw ContractViolation("combinatorial Laplacian off-diagonal must be non-positive");
      }
      break;
    case ShiftKind::GenericSymmetric:
      break;
  }
}

Graph erdos_renyi(int n, double p, std::uint64_t seed) {
  if (n < 2) throw ParameterError("erdos_renyi needs n >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("erdos_renyi needs p in [0,1]");
  Rng rng = make_stream(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) edges.push_back({i, j});
  return Graph(n, std::move(edges));
}

std::optional<Graph> connected_erdos_renyi(int n, double p, std::uint64_t seed, int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Graph g = erdos_renyi(n, p, attempt == 0 ? seed : stream_seed(seed, static_cast<std::uint64_t>(attempt)));
    if (is_connected(g)) return g;
  }
  return std::nullopt;
}

Eigen::VectorXd degrees(const Graph& g) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(g.num_nodes());
  for (const auto& e : g.edges()) {
    d(e.u) += 1.0;
    d(e.v) += 1.0;
  }
  return d;
}

bool is_connected(const Graph& g) {
  const int n = g.num_nodes();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n;
  for (const auto& e : g.edges()) {
    const int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

ShiftMatrix build_shift(const Graph& g, ShiftKind kind) {
  const Eigen::MatrixXd a = g.adjacency();
  const Eigen::VectorXd d = degrees(g);
  switch (kind) {
    case ShiftKind::Adjacency:
    case ShiftKind::GenericSymmetric:
      return ShiftMatrix(kind, a);
    case ShiftKind::CombinatorialLaplacian: {
      Eigen::MatrixXd l = -a;
      l.diagonal() = d;
      return ShiftMatrix(kind, l);
    }
    case ShiftKind::NormalizedLaplacian: {
      if (d.minCoeff() < 1.0) throw DegenerateDegreeError("normalized Laplacian undefined: graph has an isolated node");
      const Eigen::VectorXd inv_sqrt = d.cwiseSqrt().cwiseInverse();
      Eigen::MatrixXd l = -(inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal());
      l.diagonal().setOnes();
      return ShiftMatrix(kind, l);
    }
  }
  throw ParameterError("unsupported shift kind");
}

Graph support_graph(const Eigen::MatrixXd& m, double tol) {
  std::vector<Edge> edges;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > tol) edges.push_back({i, j});
  return Graph(static_cast<int>(m.rows()), std::move(edges));
}

Graph path_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph(n, std::move(edges));
}

Graph cycle_graph(int n) {
  Graph p = path_graph(n);
  std::vector<Edge> edges = p.edges();
  if (n >= 3) edges.push_back({0, n - 1});
  return Graph(n, std::move(edges));
}

Graph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  return Graph(n, std::move(edges));
}

Graph star_graph(int leaves) {
  std::vector<Edge> edges;
  for (int i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return Graph(leaves + 1, std::move(edges));
}

}  // namespace spectemp
