#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "json.hpp"
#include "pldc/cli.hpp"
#include "pldc/io.hpp"

using namespace pldc;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("pldc_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, FitInterpolatesTwoPoints) {
  const auto data = write("two.csv", "x,y\n0,0\n1,1\n");
  const CliRun r = cli({"fit", "--data", data, "--loss", "l2", "--lambda", "1e-8", "--out", path("m.json"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = nlohmann::json::parse(r.out);
  EXPECT_LE(rep["training_mse"].get<double>(), 1e-4);
}

TEST_F(Cli, MissingTargetColumn) {
  const auto data = write("d.csv", "a,b\n0,0\n1,1\n");
  const CliRun r = cli({"fit", "--data", data, "--lambda", "1", "--out", path("m.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'y'"), std::string::npos) << r.err;
}

TEST_F(Cli, MalformedCsvNamesCell) {
  const auto data = write("d.csv", "x,y\n0,0\n1,one\n");
  const CliRun r = cli({"fit", "--data", data, "--lambda", "1", "--out", path("m.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
  EXPECT_NE(r.err.find("'y'"), std::string::npos);
}

TEST_F(Cli, CvPicksFromGridAndListsTable) {
  ASSERT_EQ(cli({"synth", "--n", "20", "--d", "2", "--noise", "0.25", "--seed", "3", "--out", path("s.csv")}).code, 0);
  const CliRun r = cli({"fit", "--data", path("s.csv"), "--cv", "5", "--max-iters", "1500", "--out", path("m.json"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = nlohmann::json::parse(r.out);
  const auto grid = rep["lambda_grid"].get<std::vector<double>>();
  ASSERT_EQ(grid.size(), 10u);
  EXPECT_NE(std::find(grid.begin(), grid.end(), rep["lambda"].get<double>()), grid.end());
  EXPECT_EQ(rep["cv"].size(), 10u);
}

TEST_F(Cli, PredictReproducesFittedValues) {
  ASSERT_EQ(cli({"synth", "--n", "15", "--d", "1", "--seed", "2", "--out", path("s.csv")}).code, 0);
  ASSERT_EQ(cli({"fit", "--data", path("s.csv"), "--loss", "l1", "--lambda", "0.1", "--max-iters", "2000", "--out",
                 path("m.json"), "--fitted", path("fitted.csv")})
                .code,
            0);
  const CliRun p = cli({"predict", "--model", path("m.json"), "--data", path("s.csv"), "--out", path("p.csv")});
  ASSERT_EQ(p.code, 0) << p.err;
  std::ifstream a(path("fitted.csv")), b(path("p.csv"));
  const Table fa = read_csv(a), fb = read_csv(b);
  ASSERT_EQ(fa.values.rows(), 15);
  EXPECT_LE((fa.values - fb.values).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_F(Cli, PredictEdgeCases) {
  ASSERT_EQ(cli({"synth", "--n", "8", "--d", "2", "--seed", "2", "--out", path("s.csv")}).code, 0);
  ASSERT_EQ(cli({"fit", "--data", path("s.csv"), "--lambda", "0.1", "--max-iters", "500", "--out", path("m.json")}).code, 0);
  const CliRun empty = cli({"predict", "--model", path("m.json"), "--data", write("e.csv", "")});
  EXPECT_EQ(empty.code, 0);
  EXPECT_EQ(empty.out, "");
  const CliRun dim = cli({"predict", "--model", path("m.json"), "--data", write("w.csv", "a,b,c\n1,2,3\n")});
  EXPECT_EQ(dim.code, 2);
  const CliRun bad = cli({"predict", "--model", write("bad.json", "{\"version\": 1, \"task\": "), "--data", path("s.csv")});
  EXPECT_EQ(bad.code, 2);
}

TEST_F(Cli, HingeBinaryAndMulticlass) {
  write("b.csv", "x,y\n0,3\n1,3\n2,7\n3,7\n");
  ASSERT_EQ(cli({"fit", "--data", path("b.csv"), "--loss", "hinge", "--lambda", "0.01", "--max-iters", "3000", "--out",
                 path("b.json")})
                .code,
            0);
  EXPECT_EQ(load_model_file(path("b.json")).task, Task::binary);
  const CliRun pb = cli({"predict", "--model", path("b.json"), "--data", path("b.csv")});
  EXPECT_EQ(pb.out.substr(0, 11), "label,score");
  EXPECT_NE(pb.out.find("\n3,"), std::string::npos);
  EXPECT_NE(pb.out.find("\n7,"), std::string::npos);

  write("m.csv", "x,y\n0,1\n0.1,1\n2,2\n2.1,2\n4,3\n4.1,3\n");
  ASSERT_EQ(cli({"fit", "--data", path("m.csv"), "--loss", "hinge", "--lambda", "0.01", "--max-iters", "3000", "--out",
                 path("m.json")})
                .code,
            0);
  const CliRun pm = cli({"predict", "--model", path("m.json"), "--data", path("m.csv")});
  EXPECT_EQ(pm.out.substr(0, pm.out.find('\n')), "label,score_1,score_2,score_3");
}

TEST_F(Cli, DiscrepancyValues) {
  const auto data = write("two.csv", "x\n0\n1\n");
  auto value = [&](const std::vector<std::string>& extra) {
    std::vector<std::string> args{"discrepancy", "--data", data, "--json"};
    args.insert(args.end(), extra.begin(), extra.end());
    const CliRun r = cli(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return nlohmann::json::parse(r.out)["discrepancy"].get<double>();
  };
  EXPECT_NEAR(value({}), 2.0, 1e-6);
  EXPECT_NEAR(value({"--L", "2"}), 4.0, 1e-6);
  const CliRun odd = cli({"discrepancy", "--data", write("odd.csv", "x\n0\n1\n5\n")});
  EXPECT_EQ(odd.code, 0);
  EXPECT_NE(odd.err.find("row"), std::string::npos);
  EXPECT_EQ(cli({"discrepancy", "--data", write("one.csv", "x\n0\n")}).code, 2);
}

TEST_F(Cli, EvalOfMeanPredictorIsAbout100) {
  ASSERT_EQ(cli({"synth", "--n", "2000", "--d", "1", "--noise", "0", "--seed", "5", "--out", path("t.csv")}).code, 0);
  std::ifstream in(path("t.csv"));
  const double mean = read_csv(in).values.col(1).mean();
  ModelFile file;
  file.models.emplace_back(MaxAffine::constant(1, mean), MaxAffine::constant(1, 0.0));
  save_model_file(path("mean.json"), file);
  const CliRun r = cli({"eval", "--model", path("mean.json"), "--test", path("t.csv"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out)["nmse"].get<double>(), 100.0, 1e-6);
}

TEST_F(Cli, ConvertRoundTrip) {
  const auto net_path = write("net.json",
                              "{\"version\": 1, \"append_one\": true, \"weights\": [[[1, -2, 0.5], [0.3, 0.7, -1]]], "
                              "\"output\": [1.5, -1]}");
  ASSERT_EQ(cli({"convert", "--relu", net_path, "--to", "pldc", "--out", path("m.json")}).code, 0);
  ASSERT_EQ(cli({"convert", "--model", path("m.json"), "--to", "relu", "--out", path("back.json")}).code, 0);
  ASSERT_EQ(cli({"synth", "--n", "10", "--d", "2", "--seed", "8", "--out", path("s.csv")}).code, 0);
  const CliRun p = cli({"predict", "--model", path("m.json"), "--data", path("s.csv")});
  ASSERT_EQ(p.code, 0) << p.err;
  std::istringstream ip(p.out);
  const Table tp = read_csv(ip);
  std::ifstream is(path("s.csv"));
  const Table ts = read_csv(is);
  std::ifstream in_net(net_path), in_back(path("back.json"));
  const ReluNet net = load_relu(in_net), back = load_relu(in_back);
  ASSERT_EQ(tp.values.rows(), 10);
  for (Index i = 0; i < 10; ++i) {
    const Vector x = ts.values.row(i).head(2).transpose();
    EXPECT_NEAR(tp.values(i, 0), net.forward(x), 1e-9);
    EXPECT_NEAR(back.forward(x), net.forward(x), 1e-9);
  }
}

TEST_F(Cli, SeededCommandsAreByteIdentical) {
  auto twice = [&](std::vector<std::string> args, const std::string& out_file) {
    std::string first_file;
    const CliRun a = cli(args);
    if (!out_file.empty()) first_file = slurp(out_file);
    const CliRun b = cli(args);
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    if (!out_file.empty()) EXPECT_EQ(first_file, slurp(out_file));
  };
  twice({"synth", "--n", "12", "--d", "2", "--seed", "4", "--out", path("s.csv")}, path("s.csv"));
  twice({"discrepancy", "--data", path("s.csv"), "--seed", "4"}, "");
  twice({"fit", "--data", path("s.csv"), "--cv", "3", "--seed", "4", "--max-iters", "800", "--out", path("m.json")},
        path("m.json"));
  twice({"predict", "--model", path("m.json"), "--data", path("s.csv")}, "");
  twice({"eval", "--model", path("m.json"), "--test", path("s.csv")}, "");
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"fit", "--data", "x.csv"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}
