#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>

#include <Eigen/Core>

namespace graphukf {

/// Weighted undirected graph. Construction validates symmetry, zero diagonal,
/// nonnegative weights; connectivity is checked by build_laplacian.
class GraphTopology {
 public:
  explicit GraphTopology(Eigen::MatrixXd weights, std::uint64_t seed = 0);

  int n() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  std::uint64_t seed() const { return seed_; }

  bool is_connected() const;

 private:
  Eigen::MatrixXd weights_;
  std::uint64_t seed_;
};

/// Laplacian eigenbasis: L = v * diag(delta) * v^T, delta ascending.
struct GftBasis {
  Eigen::MatrixXd v;
  Eigen::VectorXd delta;

  int n() const { return static_cast<int>(v.rows()); }
  static GftBasis identity(int n);
};

enum class SignalDomain { Vertex, Spectral };

struct GraphSignal {
  Eigen::VectorXd values;
  SignalDomain domain = SignalDomain::Vertex;
};

/// L = D - A with D the weighted degree matrix. Throws ConnectivityError for a
/// disconnected graph.
Eigen::MatrixXd build_laplacian(const GraphTopology& topology);

/// Symmetric eigendecomposition. Each eigenvector is sign-normalized so that
/// its first component with magnitude above 1e-12 is positive.
GftBasis eigendecompose(const Eigen::MatrixXd& laplacian);

GraphSignal gft(const GraphSignal& signal, const GftBasis& basis);
GraphSignal igft(const GraphSignal& signal, const GftBasis& basis);

/// v^T * m * v
Eigen::MatrixXd gft_matrix(const Eigen::MatrixXd& m, const GftBasis& basis);

struct ErdosRenyi {
  double p = 0.5;
};
struct Ring {};
struct RandomGeometric {
  double radius = 0.5;
};
using TopologyModel = std::variant<ErdosRenyi, Ring, RandomGeometric>;

inline constexpr int kMaxTopologyRetries = 1000;

/// Random models draw weights from U(0.5, 1.5) and retry until connected.
GraphTopology generate_topology(int n, const TopologyModel& model, std::uint64_t seed);

// Edge-list text format: "n <count>" header then one "i j w" line per edge
// (i < j), weights printed with 17 significant digits.
void write_edge_list(const GraphTopology& topology, std::ostream& out);
void save_edge_list(const GraphTopology& topology, const std::filesystem::path& path);
GraphTopology read_edge_list(std::istream& in);
GraphTopology load_edge_list(const std::filesystem::path& path);

}  // namespace graphukf
