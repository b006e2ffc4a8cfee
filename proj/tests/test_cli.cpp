#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "simbound/certificate.hpp"
#include "simbound/network.hpp"

using namespace simbound;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string &args, const fs::path &dir) {
    const fs::path out_path = dir / "stdout.txt";
    const fs::path err_path = dir / "stderr.txt";
    const std::string cmd = std::string(SIMBOUND_CLI_PATH) + " " + args + " > \"" + out_path.string() + "\" 2> \"" +
                            err_path.string() + "\"";
    const int rc = std::system(cmd.c_str());
    auto slurp = [](const fs::path &p) {
        std::ifstream in(p);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    return {WEXITSTATUS(rc), slurp(out_path), slurp(err_path)};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("simbound_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const std::string demo_model = std::string(SIMBOUND_MODELS_DIR) + "/demo_relu.json";

std::string strip_timing(std::string text) {
    text = std::regex_replace(text, std::regex("\"(solve|total|mean_solve)_seconds\": [^,\n}]+"),
                              "\"$1_seconds\": T");
    text = std::regex_replace(text, std::regex("\"iterations\": [0-9]+"), "\"iterations\": T");
    return text;
}

} // namespace

TEST_CASE("cli: certify a quantised model and check the certificate") {
    TempDir dir;
    const fs::path cert = dir.path / "cert.json";
    const RunResult certify = run_cli(
        "certify --model \"" + demo_model + "\" --quantise 8,2 --box -1,1 --out \"" + cert.string() + "\"",
        dir.path);
    CAPTURE(certify.err);
    REQUIRE(certify.exit_code == 0);
    CHECK(certify.out.find("status: optimal") != std::string::npos);
    CHECK(fs::exists(cert));
    CHECK(fs::exists(dir.path / "cert.json.config.json")); // snapshot beside the output

    const RunResult check = run_cli(
        "check --cert \"" + cert.string() + "\" --model \"" + demo_model + "\" --quantise 8,2 --box -1,1",
        dir.path);
    CAPTURE(check.out);
    CHECK(check.exit_code == 0);
    CHECK(check.out.find("valid") != std::string::npos);
}

TEST_CASE("cli: tampered certificates are rejected with exit code 2") {
    TempDir dir;
    const fs::path cert = dir.path / "cert.json";
    REQUIRE(run_cli("certify --model \"" + demo_model + "\" --quantise 8,2 --out \"" + cert.string() + "\"",
                    dir.path)
                .exit_code == 0);

    BoundCertificate loaded = load_certificate(cert);
    loaded.gammas.x1 *= 0.25;
    loaded.gammas.x2 *= 0.25;
    loaded.gammas.x *= 0.25;
    loaded.gammas.affine *= 0.25;
    save_certificate(loaded, cert);
    const RunResult check =
        run_cli("check --cert \"" + cert.string() + "\" --model \"" + demo_model + "\" --quantise 8,2", dir.path);
    CHECK(check.exit_code == 2);
    CHECK(check.out.find("INVALID") != std::string::npos);
}

TEST_CASE("cli: malformed certificate file gives parse diagnostics") {
    TempDir dir;
    const fs::path cert = dir.path / "broken.json";
    std::ofstream(cert) << "{ this is not json";
    const RunResult check =
        run_cli("check --cert \"" + cert.string() + "\" --model \"" + demo_model + "\"", dir.path);
    CHECK(check.exit_code == 1);
    CHECK(check.err.find("parse") != std::string::npos);
}

TEST_CASE("cli: missing model file fails with a message on stderr") {
    TempDir dir;
    const RunResult r = run_cli("certify --model /nonexistent/net.json", dir.path);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("cannot open model file") != std::string::npos);
}

TEST_CASE("cli: transform quantises onto the grid and prune count=0 is semantically identity") {
    TempDir dir;
    const fs::path quantised = dir.path / "q.json";
    REQUIRE(run_cli("transform --model \"" + demo_model + "\" --quantise 8,2 --out \"" + quantised.string() + "\"",
                    dir.path)
                .exit_code == 0);
    const NeuralNetwork q = load_model(quantised);
    for (const Layer &layer : q.layers()) {
        for (Eigen::Index r = 0; r < layer.W.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.W.cols(); ++c)
                CHECK(layer.W(r, c) == std::round(layer.W(r, c) * 4.0) / 4.0);
        for (Eigen::Index r = 0; r < layer.b.size(); ++r)
            CHECK(layer.b[r] == std::round(layer.b[r] * 4.0) / 4.0);
    }

    const fs::path pruned = dir.path / "p.json";
    REQUIRE(run_cli("transform --model \"" + demo_model + "\" --prune count=0 --out \"" + pruned.string() + "\"",
                    dir.path)
                .exit_code == 0);
    const NeuralNetwork original = load_model(demo_model);
    const NeuralNetwork p = load_model(pruned);
    for (double x : {-0.9, -0.3, 0.0, 0.4, 0.8}) {
        const Eigen::VectorXd v = Eigen::VectorXd::Constant(1, x);
        CHECK(evaluate(original, v).output == evaluate(p, v).output);
    }
}

TEST_CASE("cli: usage errors exit with code 1") {
    TempDir dir;
    CHECK(run_cli("experiment --suite nosuchsuite --out-dir \"" + (dir.path / "x").string() + "\"", dir.path)
              .exit_code == 1);
    CHECK(run_cli("transform --model \"" + demo_model + "\"", dir.path).exit_code == 1); // no transform chosen
    CHECK(run_cli("certify --model \"" + demo_model + "\" --quantise 8,2 --prune count=1", dir.path).exit_code ==
          1); // mutually exclusive
}

TEST_CASE("cli: small experiment run emits the documented outputs and reproduces bit-identically") {
    TempDir dir;
    const fs::path cfg = dir.path / "cfg.json";
    std::ofstream(cfg) << R"({"suite":"similarity","num_seeds":5,"layer_counts":[1],"width":10,)"
                       << R"("tightness_grid":20})";
    const fs::path out1 = dir.path / "run1";
    const fs::path out2 = dir.path / "run2";
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r1 =
        run_cli("experiment --config \"" + cfg.string() + "\" --out-dir \"" + out1.string() + "\"", dir.path);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CAPTURE(r1.err);
    REQUIRE(r1.exit_code == 0);
    CHECK(elapsed < 60.0);
    REQUIRE(run_cli("experiment --config \"" + cfg.string() + "\" --out-dir \"" + out2.string() + "\"", dir.path)
                .exit_code == 0);
    for (const char *name : {"config.json", "report.json", "per_seed.csv"})
        CHECK(fs::exists(out1 / name));

    auto slurp = [](const fs::path &p) {
        std::ifstream in(p);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    CHECK(slurp(out1 / "config.json") == slurp(out2 / "config.json"));
    // per-seed rows are identical except the two timing columns
    std::istringstream a(slurp(out1 / "per_seed.csv")), b(slurp(out2 / "per_seed.csv"));
    std::string la, lb;
    while (std::getline(a, la) && std::getline(b, lb)) {
        const auto cut = [](const std::string &s) {
            size_t pos = s.size();
            for (int i = 0; i < 2; ++i)
                pos = s.rfind(',', pos - 1);
            return s.substr(0, pos);
        };
        CHECK(cut(la) == cut(lb));
    }
    CHECK(strip_timing(slurp(out1 / "report.json")) == strip_timing(slurp(out2 / "report.json")));
}

TEST_CASE("cli: certify reruns reproduce the certificate bit-identically modulo timing") {
    TempDir dir;
    const fs::path cert1 = dir.path / "c1.json";
    const fs::path cert2 = dir.path / "c2.json";
    const std::string flags = "certify --model \"" + demo_model + "\" --quantise 8,2 --box -1,1 --out \"";
    REQUIRE(run_cli(flags + cert1.string() + "\"", dir.path).exit_code == 0);
    REQUIRE(run_cli(flags + cert2.string() + "\"", dir.path).exit_code == 0);
    auto slurp = [](const fs::path &p) {
        std::ifstream in(p);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    CHECK(strip_timing(slurp(cert1)) == strip_timing(slurp(cert2)));
}
