#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "graphukf/experiment.hpp"

namespace graphukf {

// INI-style experiment configuration:
//
//   [experiment]  n, steps, trials, seed, scenario, filters, phi, q_var,
//                 r_nominal, init_var, threads, out
//   [graph]       model (erdos_renyi | ring | geometric), p, radius, seed
//   [loss]        gr_beta, gr_gamma, huber_sigma, cauchy_sigma
//   [ut]          alpha, beta, kappa
//   [irls]        threshold, max_iters, gsp_gain (full | diagonal)
//
// Missing keys keep their defaults; unknown keys are rejected.

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Apply the keys in `in` on top of `base`.
ExperimentConfig merge_config(ExperimentConfig base, std::istream& in);

void write_config(const ExperimentConfig& config, std::ostream& out);

std::vector<std::string> split_list(const std::string& text);
GainMode parse_gain_mode(const std::string& text);
std::string to_string(GainMode mode);
TopologyModel parse_topology_model(const std::string& name, double p, double radius);
std::string topology_model_name(const TopologyModel& model);

}  // namespace graphukf
