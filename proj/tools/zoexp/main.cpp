// zoexp: reproducible zero-order optimization experiments.
//
//   run          one configured experiment, a trace CSV per seed
//   sweep        step-size/batch grid search with a summary CSV
//   plan         closed-form iteration/sample complexity as JSON
//   check-kernel validate a smoothing kernel's moment conditions
//   parse-data   validate a LIBSVM file and print its metadata
//
// Exit codes: 0 success, 1 config or usage error, 2 a run diverged,
// 3 a kernel check failed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "runner.hpp"
#include "zo/errors.hpp"
#include "zo/kernel.hpp"
#include "zo/planner.hpp"
#include "zo/problems.hpp"

namespace {

// Flag-level overrides shared by run and sweep; a flag the user did not pass
// leaves the config value alone.
struct Overrides {
    std::optional<std::string> method, mode, variant, output_dir, stem;
    std::optional<double> eta, h, delta, target_gap;
    std::optional<int> B, beta;
    std::optional<std::int64_t> iterations, stride;
    std::vector<std::uint64_t> seeds;
    bool conservative = false;
};

void add_override_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--method", o.method, "zo_acc_sgd or zo_sgd");
    cmd->add_option("--mode", o.mode, "estimator mode: kernel_onepoint or central_l2");
    cmd->add_option("--noise", o.variant, "noise variant");
    cmd->add_option("--eta", o.eta, "step size (0 = default 1/(rho_B L))");
    cmd->add_option("--smoothing", o.h, "smoothing radius h");
    cmd->add_option("--delta", o.delta, "noise level");
    cmd->add_option("--target-gap", o.target_gap, "stop early at this f gap");
    cmd->add_option("--B", o.B, "estimator batch size");
    cmd->add_option("--beta", o.beta, "kernel smoothness order");
    cmd->add_option("--iterations", o.iterations, "iteration budget");
    cmd->add_option("--stride", o.stride, "record every k-th iteration");
    cmd->add_option("--seeds", o.seeds, "run seeds")->delimiter(',');
    cmd->add_option("--output-dir", o.output_dir, "output directory");
    cmd->add_option("--stem", o.stem, "output file stem");
    cmd->add_flag("--conservative-eta", o.conservative, "use 1/(2 rho_B L) as the default");
}

void apply_overrides(zoexp::ExperimentConfig& cfg, const Overrides& o) {
    if (o.method) cfg.method = *o.method;
    if (o.mode) cfg.estimator.mode = *o.mode;
    if (o.variant) cfg.noise.variant = *o.variant;
    if (o.eta) cfg.optimizer.eta = *o.eta;
    if (o.h) cfg.estimator.h = *o.h;
    if (o.delta) cfg.noise.delta = *o.delta;
    if (o.target_gap) cfg.optimizer.target_gap = *o.target_gap;
    if (o.B) cfg.estimator.B = *o.B;
    if (o.beta) cfg.estimator.beta = *o.beta;
    if (o.iterations) cfg.optimizer.iterations = *o.iterations;
    if (o.stride) cfg.optimizer.record_stride = *o.stride;
    if (!o.seeds.empty()) cfg.seeds = o.seeds;
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    if (o.stem) cfg.stem = *o.stem;
    if (o.conservative) cfg.optimizer.conservative_eta = true;
}

nlohmann::json plan_to_json(const zo::ComplexityPlan& plan) {
    nlohmann::json j;
    j["case"] = zo::to_string(plan.case_id);
    j["N"] = plan.N;
    j["T"] = plan.T;
    j["h"] = plan.h;
    j["delta_max"] = plan.delta_max;
    j["rho_B"] = plan.rho_B;
    j["kappa"] = plan.kappa;
    j["convention"] = zo::to_string(plan.convention);
    j["inputs"]["d"] = plan.d;
    j["inputs"]["beta"] = plan.beta;
    j["inputs"]["L"] = plan.L;
    j["inputs"]["R"] = plan.R;
    j["inputs"]["eps"] = plan.eps;
    j["inputs"]["B"] = plan.B;
    if (plan.required_B) j["required_B"] = *plan.required_B;
    return j;
}

int do_plan(int d, double beta, double L, double R, double eps, int B,
            std::optional<double> delta_target) {
    if (beta > 6.0)
        throw zo::UsageError("no shipped kernel serves beta > 6");
    const auto kernel = zo::legendre_kernel(beta <= 4.0 ? 3 : 5);
    const auto constants =
        zo::compute_constants(kernel, beta, 128, zo::KappaConvention::expectation);
    std::optional<double> target;
    if (delta_target) target = *delta_target;
    const auto plan = zo::plan(d, beta, L, R, eps, B, constants, target);
    std::cout << plan_to_json(plan).dump(2) << "\n";
    return 0;
}

int do_check_kernel(std::optional<int> beta_flag, std::optional<std::string> kernel_file) {
    zo::KernelSpec spec;
    double beta = 0.0;
    if (beta_flag && kernel_file)
        throw zo::UsageError("--beta and --kernel-file are mutually exclusive");
    if (beta_flag) {
        spec = zo::legendre_kernel(*beta_flag);  // unsupported beta exits 1 here
        beta = *beta_flag;
    } else if (kernel_file) {
        std::ifstream in(*kernel_file);
        if (!in) throw zo::UsageError("cannot open kernel file: " + *kernel_file);
        nlohmann::json j;
        try {
            in >> j;
            beta = j.at("beta").get<double>();
            spec.coefficients = j.at("coefficients").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            throw zo::UsageError(std::string("bad kernel file: ") + e.what());
        }
        if (spec.coefficients.empty()) throw zo::UsageError("kernel has no coefficients");
        spec.l = j.value("l", spec.degree());
        spec.beta_targets = {static_cast<int>(beta)};
    } else {
        throw zo::UsageError("check-kernel needs --beta or --kernel-file");
    }

    const auto report = zo::validate_moments(spec, 64);
    nlohmann::json j;
    j["beta"] = beta;
    j["degree"] = spec.degree();
    j["l"] = spec.l;
    j["tolerance"] = report.tolerance;
    j["all_pass"] = report.all_pass;
    for (const auto& m : report.moments) {
        nlohmann::json mj;
        mj["j"] = m.j;
        mj["value"] = m.value;
        mj["target"] = m.target;
        mj["pass"] = m.pass;
        j["moments"].push_back(mj);
    }
    if (!report.all_pass) {
        std::cout << j.dump(2) << "\n";
        std::fprintf(stderr, "kernel moment check failed at %s\n",
                     report.first_failure.c_str());
        return 3;
    }
    try {
        const auto plain = zo::compute_constants(spec, beta, 128,
                                                 zo::KappaConvention::plain_integral);
        const auto expect = zo::compute_constants(spec, beta, 128,
                                                  zo::KappaConvention::expectation);
        j["kappa"]["plain_integral"] = plain.kappa;
        j["kappa"]["expectation"] = expect.kappa;
        j["kappa_beta"]["plain_integral"] = plain.kappa_beta;
        j["kappa_beta"]["expectation"] = expect.kappa_beta;
    } catch (const zo::InternalError& e) {
        std::cout << j.dump(2) << "\n";
        std::fprintf(stderr, "kernel bound check failed: %s\n", e.what());
        return 3;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int do_parse_data(const std::string& path) {
    const auto data = zo::parse_libsvm_file(path);
    nlohmann::json j;
    j["name"] = data.meta.name;
    j["M"] = data.meta.M;
    j["d"] = data.meta.d;
    j["source_path"] = data.meta.source_path;
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-order optimization experiment runner"};
    app.require_subcommand(1);

    std::string run_config, sweep_config, dataset_path;
    Overrides run_over, sweep_over;
    std::vector<std::string> sweep_methods;
    std::vector<double> sweep_etas;
    std::vector<int> sweep_Bs;

    auto* run_cmd = app.add_subcommand("run", "run one configured experiment");
    run_cmd->add_option("config", run_config, "JSON experiment config")->required();
    add_override_options(run_cmd, run_over);

    auto* sweep_cmd = app.add_subcommand("sweep", "grid search over step sizes and batches");
    sweep_cmd->add_option("config", sweep_config, "JSON experiment config")->required();
    sweep_cmd->add_option("--etas", sweep_etas, "step-size grid")->delimiter(',');
    sweep_cmd->add_option("--Bs", sweep_Bs, "batch-size grid")->delimiter(',');
    sweep_cmd->add_option("--methods", sweep_methods, "methods to race")->delimiter(',');
    add_override_options(sweep_cmd, sweep_over);

    int plan_d = 0, plan_B = 1;
    double plan_beta = 0.0, plan_L = 0.0, plan_R = 0.0, plan_eps = 0.0;
    std::optional<double> plan_delta_target;
    auto* plan_cmd = app.add_subcommand("plan", "print the complexity plan as JSON");
    plan_cmd->add_option("--d", plan_d, "dimension")->required();
    plan_cmd->add_option("--beta", plan_beta, "smoothness order (> 2)")->required();
    plan_cmd->add_option("--L", plan_L, "gradient Lipschitz constant")->required();
    plan_cmd->add_option("--R", plan_R, "initial distance bound")->required();
    plan_cmd->add_option("--eps", plan_eps, "target accuracy in (0,1)")->required();
    plan_cmd->add_option("--B", plan_B, "batch size (default 1)");
    plan_cmd->add_option("--delta-target", plan_delta_target,
                         "also report the batch size needed for this noise level");

    std::optional<int> ck_beta;
    std::optional<std::string> ck_file;
    auto* ck_cmd = app.add_subcommand("check-kernel", "validate kernel moment conditions");
    ck_cmd->add_option("--beta", ck_beta, "shipped kernel order (3..6)");
    ck_cmd->add_option("--kernel-file", ck_file,
                       "JSON {\"beta\": .., \"coefficients\": [ascending powers]}");

    auto* pd_cmd = app.add_subcommand("parse-data", "validate a LIBSVM file");
    pd_cmd->add_option("file", dataset_path, "LIBSVM text file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run_cmd) {
            auto cfg = zoexp::load_config(run_config);
            apply_overrides(cfg, run_over);
            return zoexp::cmd_run(cfg);
        }
        if (*sweep_cmd) {
            auto cfg = zoexp::load_config(sweep_config);
            apply_overrides(cfg, sweep_over);
            return zoexp::cmd_sweep(cfg, sweep_methods, sweep_etas, sweep_Bs);
        }
        if (*plan_cmd)
            return do_plan(plan_d, plan_beta, plan_L, plan_R, plan_eps, plan_B,
                           plan_delta_target);
        if (*ck_cmd) return do_check_kernel(ck_beta, ck_file);
        if (*pd_cmd) return do_parse_data(dataset_path);
    } catch (const zo::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
