#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace zoexp {

// Synthetic planted least squares, or a logistic regression over a LIBSVM
// file. The generator seed is part of the problem identity, not a run seed.
struct ProblemSpec {
    std::string family = "least_squares";  // least_squares | logistic
    int d = 2;
    int p = 2;
    std::uint64_t seed = 1;
    double condition_target = 10.0;
    std::string dataset;  // logistic only
};

struct EstimatorSpec {
    std::string mode = "kernel_onepoint";  // kernel_onepoint | central_l2
    int beta = 3;                          // kernel smoothness order
    int B = 1;                             // batch size
    double h = 0.1;                        // smoothing radius
};

struct NoiseSpec {
    std::string variant = "none";  // none | uniform | gaussian_clipped | adversarial_sign
    double delta = 0.0;
};

struct OptimizerSpec {
    double eta = 0.0;  // 0 derives the default 1/(rho_B L)
    bool conservative_eta = false;
    std::int64_t iterations = 1000;
    std::int64_t record_stride = 1;
    double target_gap = -1.0;  // < 0 disables early stopping
};

// Everything a run needs, archivable as JSON. The resolved sidecar emitted
// next to each output is itself a valid config and loads back to the same
// resolved sidecar byte for byte.
struct ExperimentConfig {
    ProblemSpec problem;
    std::string method = "zo_acc_sgd";  // zo_acc_sgd | zo_sgd
    EstimatorSpec estimator;
    NoiseSpec noise;
    OptimizerSpec optimizer;
    std::vector<std::uint64_t> seeds = {1};
    std::string output_dir = ".";
    std::string stem;  // output file stem; defaults to the config file's stem
};

// Throws zo::UsageError on malformed JSON, unknown enum values, numeric
// fields out of range, or a dataset path that does not exist.
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace zoexp
