// End-to-end checks of the zoexp binary: exit codes, file outputs, and the
// determinism contract. Each invocation is a real child process.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch_root() {
    static const fs::path p = [] {
        const auto dir = fs::temp_directory_path() / "zoexp-cli-tests";
        fs::remove_all(dir);
        fs::create_directories(dir);
        return dir;
    }();
    return p;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

struct CmdResult {
    int code = -1;
    std::string out, err;
};

CmdResult zoexp(const std::string& args) {
    static int counter = 0;
    const auto out_path = scratch_root() / ("stdout." + std::to_string(counter));
    const auto err_path = scratch_root() / ("stderr." + std::to_string(counter));
    ++counter;
    const std::string cmd = std::string(ZOEXP_BINARY) + " " + args + " >" +
                            out_path.string() + " 2>" + err_path.string();
    const int rc = std::system(cmd.c_str());
    CmdResult r;
    r.code = (rc != -1 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

// The determinism contract excludes wall_ms (column 4 of 5).
std::string drop_wall_ms(const std::string& csv) {
    std::string out;
    for (const auto& line : split_lines(csv)) {
        auto f = split_csv(line);
        REQUIRE(f.size() == 5);
        out += f[0] + "," + f[1] + "," + f[2] + "," + f[4] + "\n";
    }
    return out;
}

fs::path write_base_config(const std::string& name, const fs::path& out_dir) {
    nlohmann::json j;
    j["problem"] = {{"family", "least_squares"}, {"d", 8},      {"p", 8},
                    {"seed", 3},                 {"condition_target", 10.0}};
    j["method"] = "zo_acc_sgd";
    j["estimator"] = {{"mode", "kernel_onepoint"}, {"beta", 3}, {"B", 4}, {"h", 0.1}};
    j["noise"] = {{"variant", "uniform"}, {"delta", 1e-4}};
    j["optimizer"] = {{"eta", 0.0}, {"iterations", 50}, {"record_stride", 10}};
    j["seeds"] = {1, 2};
    j["output_dir"] = out_dir.string();
    const auto path = scratch_root() / name;
    spit(path, j.dump(2) + "\n");
    return path;
}

}  // namespace

TEST_CASE("cli: run writes one trace per seed with the exact header") {
    const auto out_dir = scratch_root() / "run_out";
    const auto config = write_base_config("cfg.json", out_dir);
    const auto r = zoexp("run " + config.string());
    CHECK(r.code == 0);

    for (int seed : {1, 2}) {
        const auto trace_path = out_dir / ("cfg.seed" + std::to_string(seed) + ".csv");
        REQUIRE(fs::exists(trace_path));
        const auto lines = split_lines(slurp(trace_path));
        CHECK(lines.front() == "iteration,oracle_calls,f_gap,wall_ms,seed");
        // initial record + one per stride: 1 + 50/10 data rows
        CHECK(lines.size() == 7);
        for (std::size_t i = 1; i < lines.size(); ++i)
            CHECK(split_csv(lines[i])[4] == std::to_string(seed));
    }

    const auto sidecar = slurp(out_dir / "cfg.resolved.json");
    CHECK(sidecar.find("\"version\"") != std::string::npos);
    CHECK(sidecar.find("\"rho_B\"") != std::string::npos);
}

TEST_CASE("cli: reruns are byte-identical outside wall_ms") {
    const auto dir_a = scratch_root() / "rerun_a";
    const auto dir_b = scratch_root() / "rerun_b";
    const auto config = write_base_config("rerun.json", dir_a);
    REQUIRE(zoexp("run " + config.string()).code == 0);
    REQUIRE(zoexp("run " + config.string() + " --output-dir " + dir_b.string()).code == 0);

    for (int seed : {1, 2}) {
        const auto name = "rerun.seed" + std::to_string(seed) + ".csv";
        const auto a = slurp(dir_a / name);
        const auto b = slurp(dir_b / name);
        REQUIRE_FALSE(a.empty());
        CHECK(drop_wall_ms(a) == drop_wall_ms(b));
    }
}

TEST_CASE("cli: the resolved sidecar loads back to itself") {
    const auto out_dir = scratch_root() / "roundtrip_out";
    const auto config = write_base_config("roundtrip.json", out_dir);
    REQUIRE(zoexp("run " + config.string()).code == 0);
    const auto sidecar_path = out_dir / "roundtrip.resolved.json";
    const auto first = slurp(sidecar_path);
    REQUIRE_FALSE(first.empty());

    // The sidecar names its own stem and output_dir, so running it as the
    // config overwrites the same files with the same bytes.
    REQUIRE(zoexp("run " + sidecar_path.string()).code == 0);
    CHECK(slurp(sidecar_path) == first);
}

TEST_CASE("cli: config errors exit 1 with a message") {
    CHECK(zoexp("run /nonexistent/config.json").code == 1);

    const auto bad_json = scratch_root() / "bad.json";
    spit(bad_json, "{not json");
    CHECK(zoexp("run " + bad_json.string()).code == 1);

    const auto bad_field = scratch_root() / "badfield.json";
    spit(bad_field, R"({"estimator": {"B": 0}})");
    const auto r = zoexp("run " + bad_field.string());
    CHECK(r.code == 1);
    CHECK(r.err.find("B") != std::string::npos);

    const auto bad_method = scratch_root() / "badmethod.json";
    spit(bad_method, R"({"method": "newton"})");
    CHECK(zoexp("run " + bad_method.string()).code == 1);
}

TEST_CASE("cli: a diverging run exits 2 and still writes its trace") {
    const auto out_dir = scratch_root() / "diverge_out";
    const auto config = write_base_config("diverge.json", out_dir);
    const auto r = zoexp("run " + config.string() + " --eta 100 --seeds 1");
    CHECK(r.code == 2);
    CHECK(r.err.find("diverged") != std::string::npos);
    CHECK(fs::exists(out_dir / "diverge.seed1.csv"));
}

TEST_CASE("cli: sweep emits the full grid and marks the best step size") {
    const auto out_dir = scratch_root() / "sweep_out";
    const auto config = write_base_config("sweep.json", out_dir);
    // L = 2 * condition_target^2 = 200 here, so stay inside eta < 2/L = 0.01
    const auto r = zoexp("sweep " + config.string() + " --etas 0.0005,0.002 --Bs 4");
    CHECK(r.code == 0);

    const auto lines = split_lines(slurp(out_dir / "sweep.sweep.csv"));
    REQUIRE(lines.size() == 5);  // header + 2 etas x 1 B x 2 seeds
    CHECK(lines.front() == "method,eta,B,seed,final_f_gap,diverged,best");
    int best_rows = 0;
    std::string best_eta;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv(lines[i]);
        REQUIRE(f.size() == 7);
        CHECK(f[0] == "zo_acc_sgd");
        CHECK((f[1] == "0.0005" || f[1] == "0.002"));
        CHECK(f[2] == "4");
        CHECK(f[5] == "false");
        if (f[6] == "1") {
            ++best_rows;
            if (best_eta.empty()) best_eta = f[1];
            CHECK(f[1] == best_eta);  // all best rows share one eta
        }
    }
    CHECK(best_rows == 2);  // both seeds of the winning eta
    CHECK(fs::exists(out_dir / "sweep.sweep.resolved.json"));
}

TEST_CASE("cli: diverged sweep cells use the inf sentinel and win nothing") {
    const auto out_dir = scratch_root() / "sweepdiv_out";
    const auto config = write_base_config("sweepdiv.json", out_dir);
    const auto r = zoexp("sweep " + config.string() + " --etas 100 --seeds 1");
    CHECK(r.code == 0);  // divergence is data for a sweep, not a failure
    const auto lines = split_lines(slurp(out_dir / "sweepdiv.sweep.csv"));
    REQUIRE(lines.size() == 2);
    const auto f = split_csv(lines[1]);
    REQUIRE(f.size() == 7);
    CHECK(f[4] == "inf");
    CHECK(f[5] == "true");
    CHECK(f[6] == "0");
}

TEST_CASE("cli: an empty sweep grid exits 1") {
    const auto out_dir = scratch_root() / "sweepempty_out";
    const auto config = write_base_config("sweepempty.json", out_dir);
    const auto r = zoexp("sweep " + config.string());
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("cli: plan prints the complexity plan as JSON") {
    const auto r = zoexp("plan --d 10 --beta 3 --L 4 --R 2 --eps 0.01");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("case").get<std::string>() == "B_eq_1");
    CHECK(j.at("N").get<double>() == doctest::Approx(400.0).epsilon(1e-12));
    CHECK(j.at("inputs").at("d").get<int>() == 10);
    CHECK_FALSE(j.contains("required_B"));

    const auto r5 = zoexp("plan --d 10 --beta 3 --L 4 --R 2 --eps 0.01 --B 5");
    REQUIRE(r5.code == 0);
    const auto j5 = nlohmann::json::parse(r5.out);
    CHECK(j5.at("case").get<std::string>() == "B_lt_4dk");
    CHECK(j5.at("N").get<double>() == doctest::Approx(80.0).epsilon(1e-12));

    const auto rt =
        zoexp("plan --d 100 --beta 3 --L 4 --R 2 --eps 0.01 --delta-target 0.01");
    REQUIRE(rt.code == 0);
    const auto jt = nlohmann::json::parse(rt.out);
    CHECK(jt.at("required_B").get<double>() == doctest::Approx(1e5).epsilon(1e-9));

    CHECK(zoexp("plan --d 10 --beta 3 --L 4 --R 2").code == 1);  // missing --eps
}

TEST_CASE("cli: check-kernel validates shipped and custom kernels") {
    const auto r3 = zoexp("check-kernel --beta 3");
    REQUIRE(r3.code == 0);
    const auto j3 = nlohmann::json::parse(r3.out);
    CHECK(j3.at("all_pass").get<bool>());
    CHECK(j3.at("kappa").at("plain_integral").get<double>() ==
          doctest::Approx(37.5).epsilon(1e-9));
    CHECK(j3.at("kappa").at("expectation").get<double>() ==
          doctest::Approx(18.75).epsilon(1e-9));

    CHECK(zoexp("check-kernel --beta 7").code == 1);  // unsupported
    CHECK(zoexp("check-kernel").code == 1);           // neither flag

    const auto corrupt = scratch_root() / "corrupt_kernel.json";
    spit(corrupt, R"({"beta": 3, "coefficients": [0.0, 3.0, 0.0, -26.25]})");
    const auto rc = zoexp("check-kernel --kernel-file " + corrupt.string());
    CHECK(rc.code == 3);
    CHECK(rc.err.find("j=1") != std::string::npos);
}

TEST_CASE("cli: parse-data prints metadata and rejects malformed files") {
    const auto r = zoexp(std::string("parse-data ") + ZO_TEST_DATA_DIR + "/tiny.libsvm");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("name").get<std::string>() == "tiny");
    CHECK(j.at("M").get<int>() == 2);
    CHECK(j.at("d").get<int>() == 3);

    const auto bad = scratch_root() / "bad.libsvm";
    spit(bad, "+1 1:0.5 0:2\n");
    const auto rb = zoexp("parse-data " + bad.string());
    CHECK(rb.code == 1);
    CHECK(rb.err.find("line 1") != std::string::npos);

    CHECK(zoexp("parse-data /nonexistent.libsvm").code == 1);
}
