#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

// Path to the built executable, injected by the build system.
#ifndef QBOOT_CLI_PATH
#error "QBOOT_CLI_PATH must be defined"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr, interleaved
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(QBOOT_CLI_PATH) + " " + args + " 2>&1";
  std::FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buffer;
  std::size_t got = 0;
  while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), got);
  }
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// Temp data file removed on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("qboot_cli_test_" + std::to_string(++counter) + "_" +
             std::to_string(static_cast<unsigned>(::getpid())));
    std::ofstream out(path_);
    out << contents;
  }
  ~TempFile() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  std::string path() const { return path_.string(); }

 private:
  fs::path path_;
};

const std::string kSampleData =
    "3.1\n1.2\n5.6\n2.2\n4.4\n0.9\n7.0\n1.1\n3.3\n2.8\n"
    "6.1\n0.4\n2.0\n3.9\n5.0\n1.8\n4.1\n2.6\n3.5\n4.8\n";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("ci quantile emits a JSON confidence interval") {
    const TempFile data(kSampleData);
    const auto r = run_cli("ci quantile --input " + data.path() +
                           " --q 0.5 --alpha 0.05 --method fast");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j.at("report") == "confidence_interval");
    CHECK(j.at("method") == "fast");
    CHECK(j.at("q") == 0.5);
    CHECK(j.at("lower").is_number());
    CHECK(j.at("upper").is_number());
  }

  TEST_CASE("repeated classic runs with one seed are byte-identical") {
    const TempFile data(kSampleData);
    const std::string cmd = "ci quantile --input " + data.path() +
                            " --q 0.5 --method classic --bootstrap 10000 "
                            "--seed 42";
    const auto first = run_cli(cmd);
    const auto second = run_cli(cmd);
    REQUIRE(first.exit_code == 0);
    REQUIRE(second.exit_code == 0);
    CHECK(first.output == second.output);
  }

  TEST_CASE("out-of-range quantile is a usage error naming the flag") {
    const TempFile data(kSampleData);
    const auto r =
        run_cli("ci quantile --input " + data.path() + " --q 1.5");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("--q") != std::string::npos);
    CHECK(r.output.find("(0, 1)") != std::string::npos);
  }

  TEST_CASE("diff-quantile requires both groups") {
    const TempFile data(kSampleData);
    const auto r =
        run_cli("ci diff-quantile --treatment " + data.path() + " --q 0.9");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("--control") != std::string::npos);
  }

  TEST_CASE("diff-quantile runs on two files") {
    const TempFile t(kSampleData);
    const TempFile c(kSampleData);
    const auto r = run_cli("ci diff-quantile --treatment " + t.path() +
                           " --control " + c.path() +
                           " --q 0.9 --bootstrap 2000 --seed 7");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j.at("method") == "fast");
    CHECK(j.at("b_replications") == 2000);
  }

  TEST_CASE("a missing input file is a runtime error") {
    const auto r =
        run_cli("ci quantile --input /nonexistent/data.txt --q 0.5");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("error") != std::string::npos);
  }

  TEST_CASE("unknown subcommands are usage errors") {
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("ci").exit_code == 2);  // a ci subcommand is required
  }

  TEST_CASE("reads a sample from standard input") {
    const TempFile data(kSampleData);
    const std::string cmd = std::string("cat ") + data.path() + " | " +
                            QBOOT_CLI_PATH + " ci quantile --input - --q 0.5";
    std::FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    std::array<char, 4096> buffer;
    std::size_t got = 0;
    while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
      output.append(buffer.data(), got);
    }
    const int status = ::pclose(pipe);
    REQUIRE(WIFEXITED(status));
    REQUIRE(WEXITSTATUS(status) == 0);
    CHECK(json::parse(output).at("report") == "confidence_interval");
  }

  TEST_CASE("csv input with a named column") {
    const TempFile data("run,latency\n1,10.5\n2,11.5\n3,9.0\n4,12.25\n"
                        "5,10.0\n6,11.0\n7,9.5\n8,10.75\n");
    const auto r = run_cli("ci quantile --input " + data.path() +
                           " --input-format csv --column latency --q 0.5");
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.output).at("report") == "confidence_interval");
  }

  TEST_CASE("column selection without csv is a usage error") {
    const TempFile data(kSampleData);
    const auto r = run_cli("ci quantile --input " + data.path() +
                           " --column latency --q 0.5");
    CHECK(r.exit_code == 2);
  }

  TEST_CASE("table output renders text, not JSON") {
    const TempFile data(kSampleData);
    const auto r = run_cli("ci quantile --input " + data.path() +
                           " --q 0.5 --format table");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("confidence interval") != std::string::npos);
    CHECK(r.output.find('{') == std::string::npos);
  }

  TEST_CASE("reports can be written to a file") {
    const TempFile data(kSampleData);
    const TempFile out("");
    const auto r = run_cli("ci quantile --input " + data.path() +
                           " --q 0.5 --output " + out.path());
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.empty());
    std::ifstream in(out.path());
    const json j = json::parse(in);
    CHECK(j.at("report") == "confidence_interval");
  }

  TEST_CASE("study index-dist compares empirical and binomial pmfs") {
    const auto r = run_cli(
        "study index-dist --n 40 --q 0.25 --bootstrap 20000 --seed 1");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j.at("report") == "index_dist");
    // Both laws are reported over the union support 0..N+1.
    CHECK(j.at("empirical").at("probs").size() == 42);
    CHECK(j.at("binomial").at("probs").size() == 42);
    CHECK(j.at("max_abs_diff").is_number());
  }

  TEST_CASE("study index-dist can include the exact distribution") {
    const auto r = run_cli(
        "study index-dist --n 25 --q 0.5 --bootstrap 5000 --seed 2 --exact");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j.at("exact").at("probs").size() == 25);
    CHECK(j.at("max_abs_diff_exact").is_number());
  }

  TEST_CASE("study coverage runs a small design") {
    const auto r = run_cli(
        "study coverage --mode two-sample --n 80 --replications 100 "
        "--bootstrap 200 --q 0.25,0.5 --alpha 0.05 --seed 3");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j.at("report") == "coverage");
    CHECK(j.at("config").at("mode") == "two-sample");
    CHECK(j.at("rows").size() == 2);
  }

  TEST_CASE("study approx-table runs a small grid") {
    const auto r = run_cli(
        "study approx-table --n 10,20 --q 0.25,0.5 --bootstrap 4000 --seed 4");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j.at("report") == "approx_table");
    CHECK(j.at("max_abs_diff").size() == 2);
  }

  TEST_CASE("bench rejects zero evaluations as a usage error") {
    const auto r = run_cli("bench --n 20 --bootstrap 50 --evaluations 0");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("--evaluations") != std::string::npos);
  }

  TEST_CASE("bench reports both methods") {
    const auto r = run_cli(
        "bench --n 20 --bootstrap 50 --evaluations 10 --seed 9");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j.at("report") == "bench");
    CHECK(j.at("rows").size() == 2);
    CHECK(j.at("speedup_median").is_number());
  }

  TEST_CASE("help is available and succeeds") {
    const auto r = run_cli("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("ci") != std::string::npos);
    CHECK(r.output.find("study") != std::string::npos);
    CHECK(r.output.find("bench") != std::string::npos);
  }
}
