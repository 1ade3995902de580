#include <rankad/rankad.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  static fs::path dir() {
    static const fs::path d = [] {
      auto p = fs::temp_directory_path() / "rankad_cli_test";
      fs::remove_all(p);
      fs::create_directories(p);
      return p;
    }();
    return d;
  }

  static std::string path(const std::string& name) { return (dir() / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static Outcome run(const std::string& args) {
    const auto out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = std::string(RANKAD_CLI) + " " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    return {WEXITSTATUS(status), slurp(out), slurp(err)};
  }

  static std::size_t lines(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  }

  static void SetUpTestSuite() {
    ASSERT_EQ(run("synth --density toy-twin --n 300 --seed 1 -o " + path("train.csv")).code, 0);
    ASSERT_EQ(run("train " + path("train.csv") + " -o " + path("model.json") + " --cap 3000 --seed 2").code, 0);
  }
};

}  // namespace

TEST_F(Cli, SynthCounts) {
  auto r = run("synth --density toy-cross --n 600 --seed 3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out), 601u);
  EXPECT_EQ(r.out.substr(0, 6), "x0,x1\n");
  r = run("synth --n 10 --anomalies 5 --seed 3");
  EXPECT_EQ(lines(r.out), 16u);
  EXPECT_EQ(r.out.substr(0, 12), "x0,x1,label\n");
  EXPECT_NE(run("synth --density nope").code, 0);
}

TEST_F(Cli, TrainReportsAndIsDeterministic) {
  const auto r = run("train " + path("train.csv") + " -o " + path("again.json") + " --cap 3000 --seed 2");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n=300"), std::string::npos);
  EXPECT_NE(r.out.find("pairs=3000"), std::string::npos);
  EXPECT_NE(r.out.find("support_pairs="), std::string::npos);
  EXPECT_NE(r.out.find("converged="), std::string::npos);
  EXPECT_EQ(slurp(path("again.json")), slurp(path("model.json")));
}

TEST_F(Cli, ScoreTrainingFile) {
  const auto r = run("score " + path("train.csv") + " -m " + path("model.json") + " --alpha 0.05");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 16), "g,score,verdict\n");
  std::size_t flagged = 0, pos = 0;
  while ((pos = r.out.find(",anomalous", pos)) != std::string::npos) {
    ++flagged;
    ++pos;
  }
  EXPECT_EQ(lines(r.out), 301u);
  EXPECT_NEAR(static_cast<double>(flagged), 15.0, 1.0);
}

TEST_F(Cli, ScoreEmptyFileAndBadAlpha) {
  std::ofstream(path("empty.csv")) << "x0,x1\n";
  auto r = run("score " + path("empty.csv") + " -m " + path("model.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "g,score,verdict\n");
  r = run("score " + path("train.csv") + " -m " + path("model.json") + " --alpha 1.0");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("open interval"), std::string::npos) << r.err;
}

TEST_F(Cli, ScoreDimensionMismatch) {
  std::ofstream(path("three.csv")) << "x0,x1,x2\n1,2,3\n";
  const auto r = run("score " + path("three.csv") + " -m " + path("model.json"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("detector"), std::string::npos) << r.err;
}

TEST_F(Cli, EvalReport) {
  ASSERT_EQ(run("synth --density toy-twin --n 100 --anomalies 100 --box -2,10 --seed 9 -o " + path("labeled.csv")).code,
            0);
  auto r = run("eval " + path("labeled.csv") + " -m " + path("model.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("auc="), std::string::npos);
  EXPECT_NE(r.out.find("false_alarm@0.05="), std::string::npos);
  EXPECT_NE(r.out.find("seconds_per_point="), std::string::npos);

  std::ofstream(path("nominal_only.csv")) << "x0,x1,label\n4,1,0\n4,-1,0\n";
  r = run("eval " + path("nominal_only.csv") + " -m " + path("model.json"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("no positive class"), std::string::npos) << r.err;
}

TEST_F(Cli, GridRows) {
  const auto r = run("grid -m " + path("model.json") + " --bounds 0,8,-4,4 --resolution 100 -o " + path("grid.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(path("grid.csv"));
  EXPECT_EQ(text.substr(0, 12), "x,y,g,score\n");
  EXPECT_EQ(lines(text), 10001u);
}

TEST_F(Cli, CvOnFixedCell) {
  const auto r = run("cv " + path("train.csv") + " --cost 1 --sigma 0.5 --k 10 --rounds 2 --cap 500");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out), 2u);
  EXPECT_NE(r.err.find("best cost=1 sigma=0.5"), std::string::npos) << r.err;
}

TEST_F(Cli, DegenerateTrainingNamesStage) {
  {
    std::ofstream f(path("same.csv"));
    f << "x0,x1\n";
    for (int i = 0; i < 60; ++i) f << "1,1\n";
  }
  const auto r = run("train " + path("same.csv") + " -o " + path("same.json") + " --sigma 1");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("rank_trainer"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("degenerate ranking"), std::string::npos) << r.err;
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  std::ofstream(path("cfg.toml")) << "[train]\nk = 5\nlevels = 4\ncap = 2000\n";
  const auto a = run("--config " + path("cfg.toml") + " train " + path("train.csv") + " -o " + path("cfg.json"));
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("pairs=2000"), std::string::npos) << a.out;
  const auto meta = slurp(path("cfg.json"));
  EXPECT_NE(meta.find("\"k\": 5"), std::string::npos);
  EXPECT_NE(meta.find("\"m\": 4"), std::string::npos);
  const auto b =
      run("--config " + path("cfg.toml") + " train " + path("train.csv") + " -o " + path("cfg2.json") + " --cap 1500");
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_NE(b.out.find("pairs=1500"), std::string::npos) << b.out;
}
