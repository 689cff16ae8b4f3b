#include <cmath>

#include <gtest/gtest.h>

#include "pldc/error.hpp"
#include "pldc/relu.hpp"
#include "support.hpp"

using namespace pldc;
using pldc::testing::vec;

namespace {

ReluNet random_net(std::mt19937_64& rng, Index d, Index depth, Index max_width, bool append_one) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<Index> width(1, max_width);
  ReluNet net;
  net.append_one = append_one;
  Index in = d + (append_one ? 1 : 0);
  for (Index l = 0; l < depth; ++l) {
    const Index w = width(rng);
    RowMatrix W(w, in);
    for (Index r = 0; r < w; ++r)
      for (Index c = 0; c < in; ++c) W(r, c) = g(rng);
    net.weights.push_back(W);
    in = w;
  }
  net.output.resize(in);
  for (Index c = 0; c < in; ++c) net.output[c] = g(rng);
  return net;
}

PLDCModel random_model(std::mt19937_64& rng, Index d, Index K1, Index K2, bool standardized) {
  std::normal_distribution<double> g;
  auto part = [&](Index K) {
    RowMatrix s(K, d);
    Vector o(K);
    for (Index k = 0; k < K; ++k) {
      for (Index c = 0; c < d; ++c) s(k, c) = g(rng);
      o[k] = g(rng);
    }
    return MaxAffine(s, o);
  };
  std::optional<Standardizer> st;
  if (standardized) st = Standardizer{Vector::Constant(d, 0.3), Vector::Constant(d, 1.7)};
  MaxAffine p1 = part(K1);
  MaxAffine p2 = part(K2);
  return PLDCModel(p1, p2, st);
}

Vector random_point(std::mt19937_64& rng, Index d) {
  std::normal_distribution<double> g(0.0, 2.0);
  Vector x(d);
  for (Index c = 0; c < d; ++c) x[c] = g(rng);
  return x;
}

Index ceil_log2(Index K) {
  Index r = 0;
  while ((Index{1} << r) < K) ++r;
  return r;
}

}  // namespace

TEST(ReluToPldc, SingleUnit) {
  ReluNet net;
  net.weights.push_back(RowMatrix::Constant(1, 1, 1.0));
  net.output = vec({1});
  const PLDCModel m = relu_to_pldc(net);
  for (double t : {-1.0, 0.0, 2.0}) EXPECT_DOUBLE_EQ(m.evaluate(vec({t})), std::max(t, 0.0));
  EXPECT_EQ(m.phi1().size(), 2);
  EXPECT_EQ(m.phi2().size(), 1);
}

TEST(ReluToPldc, RandomNetsMatchForwardPass) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 30; ++t) {
    const Index d = 1 + t % 2;
    const ReluNet net = random_net(rng, d, 1 + t % 2, 3, t % 3 == 0);
    const PLDCModel m = relu_to_pldc(net);
    for (int k = 0; k < 200; ++k) {
      const Vector x = random_point(rng, d);
      ASSERT_NEAR(m.evaluate(x), net.forward(x), 1e-9);
    }
    EXPECT_LE(seminorm_bound(m), seminorm_certificate(net) * (1.0 + 1e-12) + 1e-12);
  }
}

TEST(ReluToPldc, CapacityCap) {
  std::mt19937_64 rng(2);
  const ReluNet net = random_net(rng, 2, 2, 3, true);
  EXPECT_THROW(relu_to_pldc(net, 1), CapacityError);
}

TEST(PldcToRelu, AffineCaseIsOneLayer) {
  std::mt19937_64 rng(3);
  const PLDCModel m = random_model(rng, 2, 1, 1, false);
  const ReluNet net = pldc_to_relu(m);
  EXPECT_EQ(net.depth(), 1);
  for (int k = 0; k < 100; ++k) {
    const Vector x = random_point(rng, 2);
    EXPECT_NEAR(net.forward(x), m.evaluate(x), 1e-10);
  }
}

TEST(PldcToRelu, TwoPlanesDepthTwo) {
  std::mt19937_64 rng(4);
  const PLDCModel m = random_model(rng, 1, 2, 2, false);
  const ReluNet net = pldc_to_relu(m);
  EXPECT_EQ(net.depth(), 2);
  for (int k = 0; k < 200; ++k) {
    const Vector x = random_point(rng, 1);
    EXPECT_NEAR(net.forward(x), m.evaluate(x), 1e-9);
  }
}

TEST(PldcToRelu, RandomModelsWithinResourceBounds) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Index> planes(1, 8);
  for (int t = 0; t < 30; ++t) {
    const Index d = 1 + t % 3;
    const PLDCModel m = random_model(rng, d, planes(rng), planes(rng), t % 2 == 0);
    const Index K = std::max(m.phi1().size(), m.phi2().size());
    const ReluNet net = pldc_to_relu(m);
    EXPECT_LE(net.depth(), std::max<Index>(1, 2 * ceil_log2(K)));
    EXPECT_LE(net.max_width(), 8 * K);
    for (int k = 0; k < 200; ++k) {
      const Vector x = random_point(rng, d);
      ASSERT_NEAR(net.forward(x), m.evaluate(x), 1e-9);
    }
  }
}

TEST(PldcToRelu, RoundTripFromSmallNet) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 5; ++t) {
    const ReluNet net = random_net(rng, 2, 1, 3, true);
    const ReluNet again = pldc_to_relu(relu_to_pldc(net));
    for (int k = 0; k < 200; ++k) {
      const Vector x = random_point(rng, 2);
      ASSERT_NEAR(again.forward(x), net.forward(x), 1e-9);
    }
  }
}

TEST(Certificate, HandProductAndZero) {
  ReluNet net;
  net.weights.push_back(RowMatrix(1, 2));
  net.weights[0] << 1, -2;
  net.output = vec({3});
  EXPECT_EQ(seminorm_certificate(net), 9.0);
  net.weights[0].setZero();
  net.output.setZero();
  EXPECT_EQ(seminorm_certificate(net), 0.0);
}

TEST(Certificate, OutputScalingIsExact) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    ReluNet net = random_net(rng, 2, 2, 3, false);
    const double base = seminorm_certificate(net);
    net.output *= -4.0;
    EXPECT_EQ(seminorm_certificate(net), 4.0 * base);
  }
}

TEST(Net, ShapeValidation) {
  ReluNet net;
  net.weights.push_back(RowMatrix::Ones(2, 1));
  net.weights.push_back(RowMatrix::Ones(1, 3));
  net.output = vec({1});
  EXPECT_THROW(net.validate(), DimensionError);
}
