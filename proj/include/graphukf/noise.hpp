#pragma once

#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace graphukf {

using Rng = std::mt19937_64;

struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
};

struct MixtureComponent {
  double prob;
  double mean;
  double variance;
};

struct Mixture {
  std::vector<MixtureComponent> components;
};

/// Stable law with characteristic function
///   exp{ j*omega*k - delta*|k|^alpha * [1 + j*beta*sign(k)*L(k, alpha)] },
/// L = tan(alpha*pi/2) for alpha != 1 and (2/pi)*log|k| for alpha == 1.
/// delta is the dispersion (scale^alpha), omega the location.
struct AlphaStable {
  double alpha = 2.0;
  double beta = 0.0;
  double delta = 1.0;
  double omega = 0.0;
};

/// Rayleigh with density (k/tau^2) exp(-k^2 / (2 tau^2)).
struct Rayleigh {
  double tau = 1.0;
};

using NoiseSpec = std::variant<Gaussian, Mixture, AlphaStable, Rayleigh>;

/// Throws InputError on invalid parameters.
void validate(const NoiseSpec& spec);

double sample_one(const NoiseSpec& spec, Rng& rng);
std::vector<double> sample_noise(const NoiseSpec& spec, std::size_t count, Rng& rng);
Eigen::VectorXd sample_vector(const NoiseSpec& spec, int n, Rng& rng);

/// Named scenario presets: caseA1, caseA100, caseB1, caseB2, caseC,
/// caseD_stable, caseD_rayleigh. Throws ConfigError for unknown names.
NoiseSpec scenario_noise(const std::string& name);
const std::vector<std::string>& scenario_names();

}  // namespace graphukf
