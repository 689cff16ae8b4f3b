#include <sstream>

#include <gtest/gtest.h>

#include "pldc/error.hpp"
#include "pldc/io.hpp"
#include "support.hpp"

using namespace pldc;
using pldc::testing::vec;

TEST(Csv, ParsesHeaderAndBody) {
  std::istringstream in("a, b ,y\r\n1,2.5,-3e2\n\n4,5,6\n");
  const Table t = read_csv(in);
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b", "y"}));
  ASSERT_EQ(t.values.rows(), 2);
  EXPECT_EQ(t.values(0, 2), -300.0);
  EXPECT_EQ(t.values(1, 1), 5.0);
}

TEST(Csv, RejectsNonNumericWithLocation) {
  std::istringstream in("x1,x2,y\n1,2,3\n4,abc,6\n");
  try {
    read_csv(in, "d.csv");
    FAIL();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'x2'"), std::string::npos) << msg;
  }
}

TEST(Csv, NeverCoerces) {
  for (const char* bad : {"1,2x\n", "1,\n", "1,nan\n", "1,inf\n", "1,1,5\n", "1,0x10\n", "1,3,\n"}) {
    std::istringstream in(std::string("a,b\n") + bad);
    EXPECT_THROW(read_csv(in), DataError) << bad;
  }
}

TEST(Csv, EmptyInputs) {
  std::istringstream empty("");
  const Table t = read_csv(empty);
  EXPECT_TRUE(t.header.empty());
  EXPECT_EQ(t.values.rows(), 0);
  std::istringstream header_only("x,y\n");
  EXPECT_EQ(read_csv(header_only).values.rows(), 0);
}

TEST(Csv, TargetSelection) {
  std::istringstream in("y,x1,label\n1,2,3\n");
  const Table t = read_csv(in);
  const LabeledTable a = split_target(t);
  EXPECT_EQ(a.feature_names, (std::vector<std::string>{"x1", "label"}));
  EXPECT_EQ(a.y[0], 1.0);
  const LabeledTable b = split_target(t, "label");
  EXPECT_EQ(b.y[0], 3.0);
  try {
    split_target(t, "price");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("price"), std::string::npos);
  }
}

TEST(Csv, WriteReadRoundTripIsExact) {
  RowMatrix v(2, 2);
  v << 0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789;
  std::stringstream io;
  write_csv(io, {"a", "b"}, v);
  EXPECT_TRUE(read_csv(io).values == v);
}

namespace {

ModelFile sample_file(Task task) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  auto part = [&](Index K) {
    RowMatrix s(K, 2);
    Vector o(K);
    for (Index k = 0; k < K; ++k) {
      s(k, 0) = g(rng);
      s(k, 1) = g(rng);
      o[k] = g(rng) / 3.0;
    }
    return MaxAffine(s, o);
  };
  const Standardizer st{vec({0.1, -0.7}), vec({1.3, 0.9})};
  FitRecord meta;
  meta.method = "admm";
  meta.lambda = 0.123;
  meta.variant = "a-term=y";
  ModelFile file;
  file.task = task;
  file.feature_names = {"u", "v"};
  const int count = task == Task::multiclass ? 3 : 1;
  for (int c = 0; c < count; ++c) {
    MaxAffine p1 = part(3);
    MaxAffine p2 = part(2);
    file.models.emplace_back(p1, p2, st, meta);
  }
  if (task == Task::binary) file.classes = {0, 1};
  if (task == Task::multiclass) file.classes = {2, 5, 9};
  return file;
}

}  // namespace

TEST(ModelJson, RoundTripBitExact) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  RowMatrix x(50, 2);
  for (Index i = 0; i < 50; ++i) x.row(i) << g(rng), g(rng);
  for (Task task : {Task::regression, Task::binary, Task::multiclass}) {
    const ModelFile file = sample_file(task);
    std::stringstream io;
    save_model(io, file);
    const ModelFile back = load_model(io);
    EXPECT_EQ(back.task, task);
    EXPECT_EQ(back.feature_names, file.feature_names);
    EXPECT_EQ(back.classes, file.classes);
    EXPECT_TRUE(back.scores(x) == file.scores(x));
    EXPECT_TRUE(back.predict(x) == file.predict(x));
    EXPECT_EQ(back.models[0].meta().lambda, 0.123);
  }
}

TEST(ModelJson, VersionAndCorruption) {
  std::stringstream io;
  save_model(io, sample_file(Task::regression));
  const std::string text = io.str();
  EXPECT_NE(text.find("\"version\": 1"), std::string::npos);
  std::istringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(load_model(truncated), DataError);
  std::string v2 = text;
  v2.replace(v2.find("\"version\": 1"), 12, "\"version\": 2");
  std::istringstream wrong(v2);
  EXPECT_THROW(load_model(wrong), DataError);
}

TEST(ReluJson, RoundTrip) {
  ReluNet net;
  net.append_one = true;
  net.weights.push_back(RowMatrix(2, 3));
  net.weights[0] << 1, -2, 0.5, 0.1, 0.2, 0.3;
  net.output = vec({1.5, -1});
  std::stringstream io;
  save_relu(io, net);
  const ReluNet back = load_relu(io);
  EXPECT_TRUE(back.weights[0] == net.weights[0]);
  EXPECT_TRUE(back.output == net.output);
  EXPECT_TRUE(back.append_one);
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(0.1), "0.1");
  const double v = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(v)), v);
}
