#include "config.hpp"

#include <filesystem>
#include <fstream>

#include "zo/errors.hpp"
#include "zo/noise.hpp"

namespace zoexp {

namespace {

// Pull a field if present, leaving the default otherwise; wrong JSON types
// surface as UsageError with the field path.
template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw zo::UsageError(where + "." + key + ": " + e.what());
    }
}

std::string file_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw zo::UsageError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw zo::UsageError(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    if (j.contains("problem")) {
        const auto& p = j.at("problem");
        read_field(p, "family", cfg.problem.family, "problem");
        read_field(p, "d", cfg.problem.d, "problem");
        read_field(p, "p", cfg.problem.p, "problem");
        read_field(p, "seed", cfg.problem.seed, "problem");
        read_field(p, "condition_target", cfg.problem.condition_target, "problem");
        read_field(p, "dataset", cfg.problem.dataset, "problem");
    }
    read_field(j, "method", cfg.method, "config");
    if (j.contains("estimator")) {
        const auto& e = j.at("estimator");
        read_field(e, "mode", cfg.estimator.mode, "estimator");
        read_field(e, "beta", cfg.estimator.beta, "estimator");
        read_field(e, "B", cfg.estimator.B, "estimator");
        read_field(e, "h", cfg.estimator.h, "estimator");
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        read_field(n, "variant", cfg.noise.variant, "noise");
        read_field(n, "delta", cfg.noise.delta, "noise");
    }
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        read_field(o, "eta", cfg.optimizer.eta, "optimizer");
        read_field(o, "conservative_eta", cfg.optimizer.conservative_eta, "optimizer");
        read_field(o, "iterations", cfg.optimizer.iterations, "optimizer");
        read_field(o, "record_stride", cfg.optimizer.record_stride, "optimizer");
        read_field(o, "target_gap", cfg.optimizer.target_gap, "optimizer");
    }
    read_field(j, "seeds", cfg.seeds, "config");
    read_field(j, "output_dir", cfg.output_dir, "config");
    read_field(j, "stem", cfg.stem, "config");
    if (cfg.stem.empty()) cfg.stem = file_stem(path);
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    const auto& p = cfg.problem;
    if (p.family == "least_squares") {
        if (p.d < 1 || p.p < 1) throw zo::UsageError("problem.d and problem.p must be >= 1");
        if (p.condition_target < 1.0)
            throw zo::UsageError("problem.condition_target must be >= 1");
    } else if (p.family == "logistic") {
        if (p.dataset.empty()) throw zo::UsageError("problem.dataset is required for logistic");
        if (!std::filesystem::exists(p.dataset))
            throw zo::UsageError("dataset file does not exist: " + p.dataset);
    } else {
        throw zo::UsageError("unknown problem.family: " + p.family +
                             " (expected least_squares or logistic)");
    }

    if (cfg.method != "zo_acc_sgd" && cfg.method != "zo_sgd")
        throw zo::UsageError("unknown method: " + cfg.method +
                             " (expected zo_acc_sgd or zo_sgd)");

    const auto& e = cfg.estimator;
    if (e.mode != "kernel_onepoint" && e.mode != "central_l2")
        throw zo::UsageError("unknown estimator.mode: " + e.mode +
                             " (expected kernel_onepoint or central_l2)");
    if (e.B < 1) throw zo::UsageError("estimator.B must be >= 1");
    if (!(e.h > 0.0)) throw zo::UsageError("estimator.h must be > 0");

    zo::noise_variant_from_string(cfg.noise.variant);  // throws on unknown
    if (cfg.noise.delta < 0.0) throw zo::UsageError("noise.delta must be >= 0");

    const auto& o = cfg.optimizer;
    if (o.eta < 0.0) throw zo::UsageError("optimizer.eta must be >= 0 (0 = default)");
    if (o.iterations < 1) throw zo::UsageError("optimizer.iterations must be >= 1");
    if (o.record_stride < 1) throw zo::UsageError("optimizer.record_stride must be >= 1");

    if (cfg.seeds.empty()) throw zo::UsageError("seeds must not be empty");
    if (cfg.stem.empty()) throw zo::UsageError("stem must not be empty");
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["problem"]["family"] = cfg.problem.family;
    if (cfg.problem.family == "least_squares") {
        j["problem"]["d"] = cfg.problem.d;
        j["problem"]["p"] = cfg.problem.p;
        j["problem"]["seed"] = cfg.problem.seed;
        j["problem"]["condition_target"] = cfg.problem.condition_target;
    } else {
        j["problem"]["dataset"] = cfg.problem.dataset;
    }
    j["method"] = cfg.method;
    j["estimator"]["mode"] = cfg.estimator.mode;
    j["estimator"]["beta"] = cfg.estimator.beta;
    j["estimator"]["B"] = cfg.estimator.B;
    j["estimator"]["h"] = cfg.estimator.h;
    j["noise"]["variant"] = cfg.noise.variant;
    j["noise"]["delta"] = cfg.noise.delta;
    j["optimizer"]["eta"] = cfg.optimizer.eta;
    j["optimizer"]["conservative_eta"] = cfg.optimizer.conservative_eta;
    j["optimizer"]["iterations"] = cfg.optimizer.iterations;
    j["optimizer"]["record_stride"] = cfg.optimizer.record_stride;
    j["optimizer"]["target_gap"] = cfg.optimizer.target_gap;
    j["seeds"] = cfg.seeds;
    j["output_dir"] = cfg.output_dir;
    j["stem"] = cfg.stem;
    return j;
}

}  // namespace zoexp
