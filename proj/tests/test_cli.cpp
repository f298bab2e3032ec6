#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(WFDEPLOY_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) {
    out.append(buf.data(), n);
  }
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Scratch {
 public:
  Scratch() : dir_(fs::temp_directory_path() / ("wfdeploy_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
    write("chain.wf", "service s1 r1 5.5 2\nservice s2 r2 2 5.5\nedge s1 s2\n");
    write("chain.mx", "locations r1 r2\nr1 0.4 2\nr2 2 0.4\n");
    write("cycle.wf", "service a r1 1 1\nservice b r1 1 1\nedge a b\nedge b a\n");
  }
  ~Scratch() { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

}  // namespace

TEST_CASE("cli validate exit codes") {
  Scratch s;
  Run ok = run("validate " + s.path("chain.wf") + " " + s.path("chain.mx"));
  CHECK(ok.code == 0);
  CHECK(ok.out == "OK\n");

  Run cyclic = run("validate " + s.path("cycle.wf") + " " + s.path("chain.mx"));
  CHECK(cyclic.code == 1);
  CHECK(cyclic.out.find("a") != std::string::npos);
  CHECK(cyclic.out.find("b") != std::string::npos);

  CHECK(run("validate " + s.path("missing.wf") + " " + s.path("chain.mx")).code == 2);
  s.write("bad.wf", "service s1 r1 lots 2\n");
  CHECK(run("validate " + s.path("bad.wf") + " " + s.path("chain.mx")).code == 2);
}

TEST_CASE("cli solve prints a deployment plan") {
  Scratch s;
  std::string args = s.path("chain.wf") + " " + s.path("chain.mx");
  Run r = run("solve " + args + " --overhead 0");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("s1 --> r1\ns2 --> r2\n", 0) == 0);
  CHECK(r.out.find("# total 10\n") != std::string::npos);

  Run single = run("solve " + args + " --max-engines 1");
  REQUIRE(single.code == 0);
  CHECK(single.out.rfind("s1 --> r1\ns2 --> r1\n", 0) == 0);

  CHECK(run("solve " + args + " --oracle --threads 2").code == 0);
  CHECK(run("solve " + s.path("cycle.wf") + " " + s.path("chain.mx")).code == 1);
  CHECK(run("solve " + args + " --overhead -1").code == 2);

  // Output is byte-stable across runs.
  CHECK(run("solve " + args).out == r.out);
}

TEST_CASE("cli sweep") {
  Scratch s;
  std::string args = s.path("chain.wf") + " " + s.path("chain.mx");
  Run r = run("sweep " + args + " --rates 0,10,20");
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "rate\tengines\tmovement\ttotal\n"
        "0\t2\t10\t10\n"
        "10\t1\t18\t18\n"
        "20\t1\t18\t18\n");
  CHECK(run("sweep " + args + " --rates ,").code == 2);
  CHECK(run("sweep " + args + " --rates 1,x").code == 2);
  CHECK(run("sweep " + args).code == 2);
}

TEST_CASE("cli simulate makespan matches the solved movement") {
  Scratch s;
  std::string args = s.path("chain.wf") + " " + s.path("chain.mx");
  Run solved = run("solve " + args);
  REQUIRE(solved.code == 0);
  std::string plan = s.write("plan.txt", solved.out);
  Run r = run("simulate " + args + " " + plan + " --exec-plan " + s.path("exec.txt"));
  REQUIRE(r.code == 0);
  CHECK(r.out == "service s1 done 3\nservice s2 done 10\nmakespan 10\n");
  CHECK(fs::file_size(s.path("exec.txt")) > 0);

  std::string partial = s.write("partial.txt", "s1 --> r1\n");
  CHECK(run("simulate " + args + " " + partial).code == 1);
}

TEST_CASE("cli compare") {
  Scratch s;
  std::string args = s.path("chain.wf") + " " + s.path("chain.mx");
  Run r = run("compare " + args + " --baseline-region r1 --overhead 0");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("baseline_movement 18\n") != std::string::npos);
  CHECK(r.out.find("optimized_movement 10\n") != std::string::npos);
  CHECK(r.out.find("speedup 1.8\n") != std::string::npos);

  // With a large overhead the optimum is the baseline itself.
  Run same = run("compare " + args + " --baseline-region r1 --overhead 10");
  REQUIRE(same.code == 0);
  CHECK(same.out.find("speedup 1\n") != std::string::npos);

  CHECK(run("compare " + args + " --baseline-region mars").code == 1);
}
