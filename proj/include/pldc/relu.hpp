#pragma once

#include <cstddef>
#include <vector>

#include "pldc/core.hpp"

namespace pldc {

/// Bias-free ReLU network x -> w^T relu(W^D ... relu(W^1 x)). With
/// `append_one` the input is extended by a trailing constant 1 before W^1,
/// which is how affine pieces get their offsets.
struct ReluNet {
  std::vector<RowMatrix> weights;  // W^l is width_l x width_{l-1}
  Vector output;                   // w^{D+1}, length width_D
  bool append_one = false;

  Index input_dim() const;
  Index depth() const { return static_cast<Index>(weights.size()); }
  Index max_width() const;
  double forward(const VectorRef& x) const;
  void validate() const;
};

/// Exact PLDC form of the network. Each node is carried as a difference
/// U - V of max-affine functions; a ReLU becomes
///   relu(U - V) = (max(U, V) - c) - (V - c)
/// with c the linear function whose slope is the coordinate-wise midrange of
/// V's slopes. Subtracting c does not change the node, but it keeps the
/// slope bound of the result within the weight-product certificate.
/// Throws CapacityError if a plane list would exceed `plane_cap`.
PLDCModel relu_to_pldc(const ReluNet& net, std::size_t plane_cap = kDefaultPlaneCap);

/// Network computing the model: the standardizer is folded in, the input is
/// augmented with 1, and each part is reduced by pairwise-max stages (two
/// hidden layers per halving). Parts are padded to a common power of two K
/// by repeating a plane. Depth is 2 log2 K for K >= 2 and 1 for K = 1;
/// width is at most 4K.
ReluNet pldc_to_relu(const PLDCModel& model);

/// |w^{D+1}|^T |W^D| ... |W^1| 1.
double seminorm_certificate(const ReluNet& net);

}  // namespace pldc
