#include <algorithm>
#include <cmath>

#include "pldc/error.hpp"
#include "pldc/relu.hpp"

namespace pldc {

Index ReluNet::input_dim() const {
  if (weights.empty()) return 0;
  return weights.front().cols() - (append_one ? 1 : 0);
}

Index ReluNet::max_width() const {
  Index w = 0;
  for (const auto& W : weights) w = std::max(w, W.rows());
  return w;
}

void ReluNet::validate() const {
  if (weights.empty()) throw DimensionError("network needs at least one hidden layer");
  if (append_one && weights.front().cols() < 1) throw DimensionError("first layer has no column for the constant");
  for (std::size_t l = 1; l < weights.size(); ++l) {
    if (weights[l].cols() != weights[l - 1].rows()) {
      throw DimensionError("layer " + std::to_string(l + 1) + " expects " + std::to_string(weights[l].cols()) +
                           " inputs but layer " + std::to_string(l) + " has width " +
                           std::to_string(weights[l - 1].rows()));
    }
  }
  if (output.size() != weights.back().rows()) throw DimensionError("output weights do not match the last width");
}

double ReluNet::forward(const VectorRef& x) const {
  validate();
  if (x.size() != input_dim()) {
    throw DimensionError("network expects " + std::to_string(input_dim()) + " inputs, got " +
                         std::to_string(x.size()));
  }
  Vector a(weights.front().cols());
  a.head(x.size()) = x;
  if (append_one) a[x.size()] = 1.0;
  for (const auto& W : weights) a = (W * a).cwiseMax(0.0);
  return output.dot(a);
}

double seminorm_certificate(const ReluNet& net) {
  net.validate();
  Vector acc = Vector::Ones(net.weights.front().cols());
  for (const auto& W : net.weights) acc = W.cwiseAbs() * acc;
  return net.output.cwiseAbs().dot(acc);
}

namespace {

struct Node {
  MaxAffine U;
  MaxAffine V;
};

MaxAffine scaled(const MaxAffine& f, double c) { return MaxAffine(c * f.slopes(), c * f.offsets()); }

MaxAffine shifted(const MaxAffine& f, const Vector& slope) {
  RowMatrix s = f.slopes();
  s.rowwise() -= slope.transpose();
  return MaxAffine(std::move(s), f.offsets());
}

// sum_k W_k (U_k - V_k) as P - N.
Node combine(const std::vector<Node>& in, const Eigen::Ref<const Eigen::RowVectorXd>& w, Index dim,
             std::size_t cap) {
  MaxAffine P = MaxAffine::constant(dim, 0.0);
  MaxAffine N = MaxAffine::constant(dim, 0.0);
  for (Index k = 0; k < w.size(); ++k) {
    const double c = w[k];
    if (c == 0.0) continue;
    const auto& node = in[static_cast<std::size_t>(k)];
    if (c > 0.0) {
      P = dedupe_planes(minkowski_sum(P, scaled(node.U, c), cap));
      N = dedupe_planes(minkowski_sum(N, scaled(node.V, c), cap));
    } else {
      P = dedupe_planes(minkowski_sum(P, scaled(node.V, -c), cap));
      N = dedupe_planes(minkowski_sum(N, scaled(node.U, -c), cap));
    }
  }
  return Node{std::move(P), std::move(N)};
}

Node relu(const Node& h) {
  const auto& s = h.V.slopes();
  const Vector mid = 0.5 * (s.colwise().maxCoeff() + s.colwise().minCoeff()).transpose();
  return Node{dedupe_planes(shifted(plane_union(h.U, h.V), mid)), shifted(h.V, mid)};
}

}  // namespace

PLDCModel relu_to_pldc(const ReluNet& net, std::size_t plane_cap) {
  net.validate();
  const Index d = net.input_dim();
  std::vector<Node> layer;
  for (Index k = 0; k < d; ++k) {
    RowMatrix e = RowMatrix::Zero(1, d);
    e(0, k) = 1.0;
    layer.push_back(Node{MaxAffine(e, Vector::Zero(1)), MaxAffine::constant(d, 0.0)});
  }
  if (net.append_one) layer.push_back(Node{MaxAffine::constant(d, 1.0), MaxAffine::constant(d, 0.0)});

  for (const auto& W : net.weights) {
    std::vector<Node> next;
    next.reserve(static_cast<std::size_t>(W.rows()));
    for (Index j = 0; j < W.rows(); ++j) next.push_back(relu(combine(layer, W.row(j), d, plane_cap)));
    layer = std::move(next);
  }
  Node out = combine(layer, net.output.transpose(), d, plane_cap);
  FitRecord meta;
  meta.method = "relu";
  return PLDCModel(std::move(out.U), std::move(out.V), std::nullopt, std::move(meta));
}

namespace {

// Planes of one part as rows (slope, offset), padded to K rows by repeating
// the first plane (a repeated plane leaves the max unchanged).
RowMatrix augmented_planes(const MaxAffine& f, Index K) {
  const Index d = f.dim();
  RowMatrix out(K, d + 1);
  for (Index k = 0; k < K; ++k) {
    const Index src = k < f.size() ? k : 0;
    out.row(k).head(d) = f.slopes().row(src);
    out(k, d) = f.offsets()[src];
  }
  return out;
}

}  // namespace

ReluNet pldc_to_relu(const PLDCModel& model) {
  const PLDCModel m = fold_standardizer(model);
  Index K = 1;
  while (K < std::max(m.phi1().size(), m.phi2().size())) K *= 2;

  ReluNet net;
  net.append_one = true;
  // value[p] maps the previous layer to the K current values of part p.
  std::vector<RowMatrix> value{augmented_planes(m.phi1(), K), augmented_planes(m.phi2(), K)};

  if (K == 1) {
    const Index in = value[0].cols();
    RowMatrix W(4, in);
    W << value[0], -value[0], value[1], -value[1];
    net.weights.push_back(std::move(W));
    net.output = Vector(4);
    net.output << 1.0, -1.0, -1.0, 1.0;
    return net;
  }

  for (Index cur = K; cur > 1; cur /= 2) {
    const Index in = value[0].cols();
    const Index half = cur / 2;
    // Layer A, per part and pair j: relu(v_2j - v_2j+1), relu(v_2j+1), relu(-v_2j+1).
    RowMatrix A(2 * 3 * half, in);
    for (Index p = 0; p < 2; ++p) {
      for (Index j = 0; j < half; ++j) {
        const Index r = (p * half + j) * 3;
        A.row(r) = value[static_cast<std::size_t>(p)].row(2 * j) - value[static_cast<std::size_t>(p)].row(2 * j + 1);
        A.row(r + 1) = value[static_cast<std::size_t>(p)].row(2 * j + 1);
        A.row(r + 2) = -value[static_cast<std::size_t>(p)].row(2 * j + 1);
      }
    }
    // Layer B: relu(+-(h0 + h1 - h2)), where h0 + h1 - h2 = max(v_2j, v_2j+1).
    RowMatrix B = RowMatrix::Zero(2 * 2 * half, A.rows());
    for (Index p = 0; p < 2; ++p) {
      for (Index j = 0; j < half; ++j) {
        const Index a = (p * half + j) * 3;
        const Index r = (p * half + j) * 2;
        B(r, a) = 1.0;
        B(r, a + 1) = 1.0;
        B(r, a + 2) = -1.0;
        B(r + 1, a) = -1.0;
        B(r + 1, a + 1) = -1.0;
        B(r + 1, a + 2) = 1.0;
      }
    }
    for (Index p = 0; p < 2; ++p) {
      RowMatrix v = RowMatrix::Zero(half, B.rows());
      for (Index j = 0; j < half; ++j) {
        const Index r = (p * half + j) * 2;
        v(j, r) = 1.0;
        v(j, r + 1) = -1.0;
      }
      value[static_cast<std::size_t>(p)] = std::move(v);
    }
    net.weights.push_back(std::move(A));
    net.weights.push_back(std::move(B));
  }
  net.output = (value[0].row(0) - value[1].row(0)).transpose();
  return net;
}

}  // namespace pldc
