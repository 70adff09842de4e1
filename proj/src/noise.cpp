#include "graphukf/noise.hpp"

#include <cmath>
#include <numbers>

#include "graphukf/errors.hpp"

namespace graphukf {

namespace {

constexpr double kPi = std::numbers::pi;

// Chambers-Mallows-Stuck draw of a unit-scale stable variate whose
// characteristic function is exp{-|k|^a [1 + j b sign(k) L(k, a)]}.
double standard_stable(double alpha, double beta, Rng& rng) {
  std::uniform_real_distribution<double> angle(-0.5 * kPi, 0.5 * kPi);
  std::exponential_distribution<double> expo(1.0);
  double v = angle(rng);
  while (v == -0.5 * kPi) v = angle(rng);
  const double w = expo(rng);

  if (alpha == 1.0) {
    const double t = 0.5 * kPi + beta * v;
    return (2.0 / kPi) * (t * std::tan(v) - beta * std::log((0.5 * kPi * w * std::cos(v)) / t));
  }
  // The (1 + j b ...) convention flips the skew sign relative to the
  // (1 - j b ...) form the construction is usually stated in.
  const double b = -beta;
  const double tan_term = b * std::tan(0.5 * kPi * alpha);
  const double shift = std::atan(tan_term) / alpha;
  const double scale = std::pow(1.0 + tan_term * tan_term, 1.0 / (2.0 * alpha));
  const double lead = std::sin(alpha * (v + shift)) / std::pow(std::cos(v), 1.0 / alpha);
  const double tail = std::pow(std::cos(v - alpha * (v + shift)) / w, (1.0 - alpha) / alpha);
  return scale * lead * tail;
}

}  // namespace

void validate(const NoiseSpec& spec) {
  if (const auto* g = std::get_if<Gaussian>(&spec)) {
    if (!(g->variance >= 0.0) || !std::isfinite(g->mean)) {
      throw InputError("Gaussian: variance must be nonnegative and mean finite");
    }
  } else if (const auto* m = std::get_if<Mixture>(&spec)) {
    if (m->components.empty()) throw InputError("Mixture: no components");
    double total = 0.0;
    for (const auto& c : m->components) {
      if (!(c.prob > 0.0) || !(c.variance >= 0.0)) {
        throw InputError("Mixture: probabilities must be positive and variances nonnegative");
      }
      total += c.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("Mixture: probabilities must sum to 1");
  } else if (const auto* s = std::get_if<AlphaStable>(&spec)) {
    if (!(s->alpha > 0.0 && s->alpha <= 2.0) || !(s->beta >= -1.0 && s->beta <= 1.0) ||
        !(s->delta >= 0.0) || !std::isfinite(s->omega)) {
      throw InputError("AlphaStable: need alpha in (0,2], beta in [-1,1], delta >= 0");
    }
  } else if (const auto* r = std::get_if<Rayleigh>(&spec)) {
    if (!(r->tau > 0.0)) throw InputError("Rayleigh: tau must be positive");
  }
}

double sample_one(const NoiseSpec& spec, Rng& rng) {
  if (const auto* g = std::get_if<Gaussian>(&spec)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    return g->mean + std::sqrt(g->variance) * normal(rng);
  }
  if (const auto* m = std::get_if<Mixture>(&spec)) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double u = unit(rng);
    double acc = 0.0;
    const MixtureComponent* chosen = &m->components.back();
    for (const auto& c : m->components) {
      acc += c.prob;
      if (u < acc) {
        chosen = &c;
        break;
      }
    }
    return chosen->mean + std::sqrt(chosen->variance) * normal(rng);
  }
  if (const auto* s = std::get_if<AlphaStable>(&spec)) {
    const double sigma = std::pow(s->delta, 1.0 / s->alpha);
    const double z = standard_stable(s->alpha, s->beta, rng);
    if (s->alpha == 1.0) {
      const double drift = sigma > 0.0 ? (2.0 / kPi) * s->beta * sigma * std::log(sigma) : 0.0;
      return sigma * z + drift + s->omega;
    }
    return sigma * z + s->omega;
  }
  const auto& r = std::get<Rayleigh>(spec);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = 1.0 - unit(rng);  // (0, 1]
  return r.tau * std::sqrt(-2.0 * std::log(u));
}

std::vector<double> sample_noise(const NoiseSpec& spec, std::size_t count, Rng& rng) {
  validate(spec);
  std::vector<double> out(count);
  for (auto& value : out) value = sample_one(spec, rng);
  return out;
}

Eigen::VectorXd sample_vector(const NoiseSpec& spec, int n, Rng& rng) {
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) out(k) = sample_one(spec, rng);
  return out;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"caseA1", "caseA100", "caseB1",        "caseB2",
                                              "caseC",  "caseD_stable", "caseD_rayleigh"};
  return names;
}

NoiseSpec scenario_noise(const std::string& name) {
  if (name == "caseA1") return Gaussian{0.0, 1.0};
  if (name == "caseA100") return Gaussian{0.0, 100.0};
  if (name == "caseB1") return Mixture{{{0.99, 0.0, 10.0}, {0.01, 0.0, 10000.0}}};
  if (name == "caseB2") return Mixture{{{0.99, -0.1, 10.0}, {0.01, 0.1, 10000.0}}};
  if (name == "caseC") {
    return Mixture{{{0.8, 0.0, 1.0}, {0.1, 1.0, 1000.0}, {0.1, -1.0, 1000.0}}};
  }
  // lambda(1.2, 1, 0, 1) read as alpha=1.2, beta=1, location 0, dispersion 1.
  if (name == "caseD_stable") return AlphaStable{1.2, 1.0, 1.0, 0.0};
  if (name == "caseD_rayleigh") return Rayleigh{3.0};
  throw ConfigError("unknown noise scenario '" + name + "'");
}

}  // namespace graphukf
