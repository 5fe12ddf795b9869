#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "zo/accsgd.hpp"
#include "zo/oracle.hpp"

namespace zoexp {

// Problem spec turned into something runnable. f_star comes from the planted
// solution (least squares) or from a cached reference solve (datasets).
struct ResolvedProblem {
    zo::Objective objective;
    zo::Vec x0;  // runs start at the origin
    double f_star = 0.0;
    bool f_star_known = false;
    double kappa = 0.0;  // estimator kernel constant feeding rho_B
};

ResolvedProblem resolve_problem(const ExperimentConfig& cfg);

// One grid cell: (method, eta, B) x seed, everything else from the config.
struct CellResult {
    zo::RunTrace trace;
    double final_gap = 0.0;
    bool diverged = false;
};

CellResult run_cell(const ResolvedProblem& prob, const ExperimentConfig& cfg,
                    const std::string& method, double eta, int B, std::uint64_t seed);

// `zoexp run`: one trace CSV per seed plus a resolved-config sidecar.
// Returns 0, or 2 when any seed diverged.
int cmd_run(const ExperimentConfig& cfg);

// `zoexp sweep`: every (method, eta, B) x seed cell, summary CSV with the
// per-(method, B) best eta marked. Returns 0, exits via UsageError on an
// empty grid.
int cmd_sweep(const ExperimentConfig& cfg, const std::vector<std::string>& methods,
              const std::vector<double>& etas, const std::vector<int>& Bs);

}  // namespace zoexp
