#include "graphukf/graph.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "graphukf/errors.hpp"

namespace graphukf {

namespace {

void require_symmetric(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + ": matrix is not square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ShapeError(std::string(what) + ": matrix is not symmetric");
  }
}

}  // namespace

GraphTopology::GraphTopology(Eigen::MatrixXd weights, std::uint64_t seed)
    : weights_(std::move(weights)), seed_(seed) {
  if (weights_.rows() != weights_.cols() || weights_.rows() < 1) {
    throw ShapeError("GraphTopology: weight matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    if (weights_(i, i) != 0.0) {
      throw InputError("GraphTopology: self loops are not allowed");
    }
    for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
      if (!(weights_(i, j) >= 0.0) || !std::isfinite(weights_(i, j))) {
        throw InputError("GraphTopology: weights must be finite and nonnegative");
      }
      if (weights_(i, j) != weights_(j, i)) {
        throw InputError("GraphTopology: weights must be symmetric");
      }
    }
  }
}

bool GraphTopology::is_connected() const {
  const int count = n();
  std::vector<bool> seen(count, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int w = 0; w < count; ++w) {
      if (!seen[w] && weights_(u, w) > 0.0) {
        seen[w] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == count;
}

GftBasis GftBasis::identity(int n) {
  return {Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n)};
}

Eigen::MatrixXd build_laplacian(const GraphTopology& topology) {
  if (!topology.is_connected()) {
    throw ConnectivityError("build_laplacian: graph is not connected");
  }
  const Eigen::MatrixXd& a = topology.weights();
  Eigen::MatrixXd lap = -a;
  lap.diagonal() = a.rowwise().sum();
  return lap;
}

GftBasis eigendecompose(const Eigen::MatrixXd& laplacian) {
  require_symmetric(laplacian, "eigendecompose");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecompose: eigensolver did not converge");
  }
  GftBasis basis{solver.eigenvectors(), solver.eigenvalues()};
  for (Eigen::Index c = 0; c < basis.v.cols(); ++c) {
    for (Eigen::Index r = 0; r < basis.v.rows(); ++r) {
      const double value = basis.v(r, c);
      if (std::abs(value) > 1e-12) {
        if (value < 0.0) basis.v.col(c) *= -1.0;
        break;
      }
    }
  }
  return basis;
}

GraphSignal gft(const GraphSignal& signal, const GftBasis& basis) {
  if (signal.domain != SignalDomain::Vertex) {
    throw DomainError("gft: expected a vertex-domain signal");
  }
  if (signal.values.size() != basis.n()) {
    throw ShapeError("gft: signal length does not match basis");
  }
  return {basis.v.transpose() * signal.values, SignalDomain::Spectral};
}

GraphSignal igft(const GraphSignal& signal, const GftBasis& basis) {
  if (signal.domain != SignalDomain::Spectral) {
    throw DomainError("igft: expected a spectral-domain signal");
  }
  if (signal.values.size() != basis.n()) {
    throw ShapeError("igft: signal length does not match basis");
  }
  return {basis.v * signal.values, SignalDomain::Vertex};
}

Eigen::MatrixXd gft_matrix(const Eigen::MatrixXd& m, const GftBasis& basis) {
  if (m.rows() != basis.n() || m.cols() != basis.n()) {
    throw ShapeError("gft_matrix: matrix shape does not match basis");
  }
  return basis.v.transpose() * m * basis.v;
}

GraphTopology generate_topology(int n, const TopologyModel& model, std::uint64_t seed) {
  if (n < 2) {
    throw InputError("generate_topology: need at least two vertices");
  }
  if (std::holds_alternative<Ring>(model)) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      w(i, j) = 1.0;
      w(j, i) = 1.0;
    }
    return GraphTopology(std::move(w), seed);
  }
  if (const auto* er = std::get_if<ErdosRenyi>(&model)) {
    if (!(er->p > 0.0 && er->p <= 1.0)) {
      throw InputError("generate_topology: Erdos-Renyi p must lie in (0, 1]");
    }
  }
  if (const auto* rg = std::get_if<RandomGeometric>(&model)) {
    if (!(rg->radius > 0.0)) {
      throw InputError("generate_topology: geometric radius must be positive");
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight_dist(0.5, 1.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < kMaxTopologyRetries; ++attempt) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    if (const auto* er = std::get_if<ErdosRenyi>(&model)) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (unit(rng) < er->p) {
            w(i, j) = w(j, i) = weight_dist(rng);
          }
        }
      }
    } else {
      const double radius = std::get<RandomGeometric>(model).radius;
      Eigen::MatrixXd pts(n, 2);
      for (int i = 0; i < n; ++i) {
        pts(i, 0) = unit(rng);
        pts(i, 1) = unit(rng);
      }
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if ((pts.row(i) - pts.row(j)).norm() < radius) {
            w(i, j) = w(j, i) = weight_dist(rng);
          }
        }
      }
    }
    GraphTopology topology(std::move(w), seed);
    if (topology.is_connected()) return topology;
  }
  throw GenerationError("generate_topology: no connected graph after " +
                        std::to_string(kMaxTopologyRetries) + " attempts");
}

void write_edge_list(const GraphTopology& topology, std::ostream& out) {
  out << "n " << topology.n() << '\n';
  out << std::setprecision(17);
  const Eigen::MatrixXd& w = topology.weights();
  for (int i = 0; i < topology.n(); ++i) {
    for (int j = i + 1; j < topology.n(); ++j) {
      if (w(i, j) != 0.0) out << i << ' ' << j << ' ' << w(i, j) << '\n';
    }
  }
}

void save_edge_list(const GraphTopology& topology, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_edge_list(topology, out);
  if (!out) throw IoError("failed writing " + path.string());
}

GraphTopology read_edge_list(std::istream& in) {
  std::string tag;
  int n = 0;
  if (!(in >> tag >> n) || tag != "n" || n < 1) {
    throw InputError("edge list: expected header 'n <count>'");
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    int i = 0;
    int j = 0;
    double weight = 0.0;
    if (!(fields >> i >> j >> weight)) {
      throw InputError("edge list: malformed line '" + line + "'");
    }
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw InputError("edge list: vertex index out of range in '" + line + "'");
    }
    w(i, j) = w(j, i) = weight;
  }
  return GraphTopology(std::move(w));
}

GraphTopology load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_edge_list(in);
}

}  // namespace graphukf
