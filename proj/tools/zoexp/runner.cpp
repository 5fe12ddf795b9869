#include "runner.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "zo/errors.hpp"
#include "zo/estimator.hpp"
#include "zo/kernel.hpp"
#include "zo/problems.hpp"
#include "zo/version.hpp"

namespace zoexp {

namespace {

constexpr int kMomentQuadPoints = 64;
constexpr int kConstantQuadPoints = 128;

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw zo::UsageError("cannot open file: " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Reference optimum for a dataset problem, cached next to the dataset and
// keyed by a checksum of its bytes so a changed file forces a re-solve.
double dataset_f_star(const std::string& dataset_path,
                      const zo::LogisticRegressionProblem& problem) {
    const std::string cache_path = dataset_path + ".fstar.json";
    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "fnv1a:%016" PRIx64,
                  fnv1a(read_file_bytes(dataset_path)));

    if (std::filesystem::exists(cache_path)) {
        try {
            nlohmann::json j;
            std::ifstream in(cache_path);
            in >> j;
            if (j.at("checksum").get<std::string>() == checksum)
                return j.at("f_star").get<double>();
        } catch (const nlohmann::json::exception&) {
            // unreadable cache: fall through and rebuild it
        }
    }

    const auto sol = zo::solve_reference(problem);
    if (sol.hit_cap)
        std::fprintf(stderr,
                     "warning: reference solve hit the iteration cap; "
                     "f_star for %s is approximate (grad norm %.3e)\n",
                     dataset_path.c_str(), sol.grad_norm);
    nlohmann::json j;
    j["checksum"] = checksum;
    j["f_star"] = sol.f;
    j["grad_norm"] = sol.grad_norm;
    j["iterations"] = sol.iterations;
    j["hit_cap"] = sol.hit_cap;
    std::ofstream out(cache_path, std::ios::binary);
    out << j.dump(2) << "\n";
    return sol.f;
}

zo::EstimatorConfig make_estimator_config(const EstimatorSpec& spec, int B) {
    zo::EstimatorConfig cfg;
    cfg.h = spec.h;
    cfg.B = B;
    if (spec.mode == "kernel_onepoint") {
        cfg.mode = zo::EstimatorMode::kernel_onepoint;
        cfg.kernel = zo::legendre_kernel(spec.beta);
    } else {
        cfg.mode = zo::EstimatorMode::central_l2;
    }
    return cfg;
}

// Fixed job pool over [0, n); each job owns its outputs, so any schedule
// produces the same results. First exception wins and is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = static_cast<std::size_t>(zo::resolve_worker_count());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

void write_trace_csv(const std::string& path, const zo::RunTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw zo::UsageError("cannot write trace file: " + path);
    out << "iteration,oracle_calls,f_gap,wall_ms,seed\n";
    char row[160];
    for (const auto& r : trace.records) {
        std::snprintf(row, sizeof(row), "%lld,%lld,%.17g,%.3f,%llu\n",
                      static_cast<long long>(r.iteration),
                      static_cast<long long>(r.oracle_calls), r.f_value, r.wall_ms,
                      static_cast<unsigned long long>(r.seed));
        out << row;
    }
}

nlohmann::json derived_block(const ResolvedProblem& prob, double rho_B, double eta) {
    nlohmann::json d;
    d["dim"] = prob.objective.dim;
    d["L"] = prob.objective.L;
    d["kappa"] = prob.kappa;
    d["rho_B"] = rho_B;
    d["eta"] = eta;
    d["f_star"] = prob.f_star;
    d["f_star_known"] = prob.f_star_known;
    d["x0"] = "origin";
    return d;
}

void write_sidecar(const std::string& path, nlohmann::json j) {
    j["version"] = zo::version;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw zo::UsageError("cannot write sidecar: " + path);
    out << j.dump(2) << "\n";
}

double resolved_eta(const ResolvedProblem& prob, const ExperimentConfig& cfg, double eta,
                    double rho_B) {
    if (eta > 0.0) return eta;
    if (prob.objective.L <= 0.0)
        throw zo::UsageError("optimizer.eta is required when the smoothness constant is unknown");
    const double base = 1.0 / (rho_B * prob.objective.L);
    return cfg.optimizer.conservative_eta ? 0.5 * base : base;
}

}  // namespace

ResolvedProblem resolve_problem(const ExperimentConfig& cfg) {
    ResolvedProblem out;
    if (cfg.problem.family == "least_squares") {
        const auto problem =
            zo::least_squares_make(cfg.problem.d, cfg.problem.p, cfg.problem.seed,
                                   cfg.problem.condition_target);
        out.objective = zo::to_objective(problem);
        out.f_star = 0.0;  // planted: b = A x_star exactly
        out.f_star_known = true;
    } else {
        const auto data = zo::parse_libsvm_file(cfg.problem.dataset);
        zo::LogisticRegressionProblem problem{data.matrix, data.labels};
        out.objective = zo::to_objective(problem);
        out.f_star = dataset_f_star(cfg.problem.dataset, problem);
        out.f_star_known = true;
    }
    out.x0 = zo::Vec(static_cast<std::size_t>(out.objective.dim), 0.0);

    if (cfg.estimator.mode == "kernel_onepoint") {
        const auto kernel = zo::legendre_kernel(cfg.estimator.beta);
        out.kappa = zo::compute_constants(kernel, cfg.estimator.beta, kConstantQuadPoints,
                                          zo::KappaConvention::expectation)
                        .kappa;
    } else {
        out.kappa = 1.0;  // plain central difference: unit kernel weight
    }
    return out;
}

CellResult run_cell(const ResolvedProblem& prob, const ExperimentConfig& cfg,
                    const std::string& method, double eta, int B, std::uint64_t seed) {
    zo::ZeroOrderOracle oracle(prob.objective,
                               {zo::noise_variant_from_string(cfg.noise.variant),
                                cfg.noise.delta});
    const auto est_cfg = make_estimator_config(cfg.estimator, B);
    const double rho_B = zo::rho_b(prob.objective.dim, prob.kappa, B);

    zo::StopRule stop;
    stop.max_iterations = cfg.optimizer.iterations;
    stop.record_stride = cfg.optimizer.record_stride;
    stop.target_gap = cfg.optimizer.target_gap;
    stop.f_star = prob.f_star;
    stop.f_star_known = prob.f_star_known;

    CellResult result;
    if (method == "zo_acc_sgd") {
        zo::AccSgdParams params;
        params.eta = eta;
        params.rho_B = rho_B;
        params.L = prob.objective.L;
        params.conservative_eta = cfg.optimizer.conservative_eta;
        if (eta <= 0.0 && prob.objective.L <= 0.0)
            throw zo::UsageError(
                "optimizer.eta is required when the smoothness constant is unknown");
        result.trace = zo::run_zo_acc_sgd(oracle, est_cfg, params, prob.x0, stop, seed);
    } else {
        const double step = resolved_eta(prob, cfg, eta, rho_B);
        result.trace = zo::run_zo_sgd(oracle, est_cfg, step, prob.x0, stop, seed);
    }
    result.diverged = result.trace.diverged;
    result.final_gap = result.trace.records.empty()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : result.trace.records.back().f_value;
    return result;
}

int cmd_run(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const auto prob = resolve_problem(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    const auto base = std::filesystem::path(cfg.output_dir) / cfg.stem;

    std::vector<CellResult> results(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), [&](std::size_t i) {
        results[i] = run_cell(prob, cfg, cfg.method, cfg.optimizer.eta, cfg.estimator.B,
                              cfg.seeds[i]);
    });

    bool any_diverged = false;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        const auto path = base.string() + ".seed" + std::to_string(cfg.seeds[i]) + ".csv";
        write_trace_csv(path, results[i].trace);
        std::fprintf(stderr, "wrote %s\n", path.c_str());
        if (results[i].trace.h_cancellation_warning)
            std::fprintf(stderr, "warning: seed %llu: h is small enough to cancel in f(x+hre)-f(x-hre)\n",
                         static_cast<unsigned long long>(cfg.seeds[i]));
        if (results[i].diverged) {
            any_diverged = true;
            std::fprintf(stderr, "error: seed %llu diverged: %s\n",
                         static_cast<unsigned long long>(cfg.seeds[i]),
                         results[i].trace.note.c_str());
        }
    }

    const double rho_B = zo::rho_b(prob.objective.dim, prob.kappa, cfg.estimator.B);
    nlohmann::json sidecar = config_to_json(cfg);
    sidecar["derived"] =
        derived_block(prob, rho_B,
                      cfg.optimizer.eta > 0.0 ? cfg.optimizer.eta
                                              : resolved_eta(prob, cfg, 0.0, rho_B));
    write_sidecar(base.string() + ".resolved.json", std::move(sidecar));
    std::fprintf(stderr, "wrote %s.resolved.json\n", base.string().c_str());

    return any_diverged ? 2 : 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::vector<std::string>& methods_in,
              const std::vector<double>& etas, const std::vector<int>& Bs_in) {
    validate_config(cfg);
    if (etas.empty()) throw zo::UsageError("sweep needs a non-empty --etas grid");
    const std::vector<std::string> methods =
        methods_in.empty() ? std::vector<std::string>{cfg.method} : methods_in;
    const std::vector<int> Bs = Bs_in.empty() ? std::vector<int>{cfg.estimator.B} : Bs_in;
    for (const auto& m : methods)
        if (m != "zo_acc_sgd" && m != "zo_sgd")
            throw zo::UsageError("unknown method in --methods: " + m);
    for (int b : Bs)
        if (b < 1) throw zo::UsageError("batch sizes in --Bs must be >= 1");
    for (double e : etas)
        if (!(e > 0.0)) throw zo::UsageError("step sizes in --etas must be > 0");

    const auto prob = resolve_problem(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    const auto base = std::filesystem::path(cfg.output_dir) / cfg.stem;

    // Cells laid out method-major, then B, then eta, then seed, so the
    // summary row order is stable and a cell's index is direct arithmetic.
    struct Cell {
        std::size_t method, eta, B, seed;  // grid indices
    };
    std::vector<Cell> cells;
    for (std::size_t m = 0; m < methods.size(); ++m)
        for (std::size_t b = 0; b < Bs.size(); ++b)
            for (std::size_t e = 0; e < etas.size(); ++e)
                for (std::size_t s = 0; s < cfg.seeds.size(); ++s)
                    cells.push_back({m, e, b, s});
    const auto cell_index = [&](std::size_t m, std::size_t b, std::size_t e, std::size_t s) {
        return ((m * Bs.size() + b) * etas.size() + e) * cfg.seeds.size() + s;
    };

    std::vector<CellResult> results(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) {
        const Cell& c = cells[i];
        results[i] = run_cell(prob, cfg, methods[c.method], etas[c.eta], Bs[c.B],
                              cfg.seeds[c.seed]);
    });

    // Best eta per (method, B): lowest mean final gap over seeds, a diverged
    // seed pushing that eta's mean to +inf. Ties keep the earlier eta.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_eta(methods.size() * Bs.size(),
                                      std::numeric_limits<std::size_t>::max());
    for (std::size_t m = 0; m < methods.size(); ++m) {
        for (std::size_t b = 0; b < Bs.size(); ++b) {
            double best_mean = inf;
            for (std::size_t e = 0; e < etas.size(); ++e) {
                double mean = 0.0;
                for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
                    const auto& r = results[cell_index(m, b, e, s)];
                    mean += (r.diverged || !std::isfinite(r.final_gap)) ? inf : r.final_gap;
                }
                mean /= static_cast<double>(cfg.seeds.size());
                if (mean < best_mean) {
                    best_mean = mean;
                    best_eta[m * Bs.size() + b] = e;
                }
            }
        }
    }

    const auto summary_path = base.string() + ".sweep.csv";
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) throw zo::UsageError("cannot write summary: " + summary_path);
    out << "method,eta,B,seed,final_f_gap,diverged,best\n";
    char row[224];
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i];
        const auto& r = results[i];
        const bool bad = r.diverged || !std::isfinite(r.final_gap);
        char gap[40];
        if (bad)
            std::snprintf(gap, sizeof(gap), "inf");
        else
            std::snprintf(gap, sizeof(gap), "%.10g", r.final_gap);
        const bool best = best_eta[c.method * Bs.size() + c.B] == c.eta;
        std::snprintf(row, sizeof(row), "%s,%g,%d,%llu,%s,%s,%d\n",
                      methods[c.method].c_str(), etas[c.eta], Bs[c.B],
                      static_cast<unsigned long long>(cfg.seeds[c.seed]), gap,
                      bad ? "true" : "false", best ? 1 : 0);
        out << row;
    }
    out.close();
    std::fprintf(stderr, "wrote %s\n", summary_path.c_str());

    nlohmann::json sidecar = config_to_json(cfg);
    sidecar["sweep"]["methods"] = methods;
    sidecar["sweep"]["etas"] = etas;
    sidecar["sweep"]["Bs"] = Bs;
    write_sidecar(base.string() + ".sweep.resolved.json", std::move(sidecar));
    return 0;
}

}  // namespace zoexp
