#pragma once

#include <cstddef>
#include <vector>

#include "yannrl/matrix.hpp"

namespace yannrl {

enum class Act { Identity, Relu, Tanh, Step };

enum class LayerKind { Affine, Activation, PairwiseProduct, Concat, GroupSum };

// One node of a feed-forward DAG. `inputs` lists node ids: -1 is the network
// input, any other id must be a lower layer index, which keeps the graph
// acyclic by construction. Affine layers take exactly one input (concatenate
// explicitly first), PairwiseProduct exactly two of equal width.
struct Layer {
  LayerKind kind = LayerKind::Affine;
  std::vector<int> inputs{-1};

  // Affine: y = W x (+ b). Masks are 1 where the entry is trainable and are
  // always shaped like their parameter; optimizers scale updates by them.
  Matrix W;
  Vec b;
  bool has_bias = true;
  Matrix w_mask;
  Vec b_mask;

  Act act = Act::Identity;  // Activation layers

  std::size_t group = 1;  // GroupSum: values summed per output
};

Layer affine_layer(Matrix W, Vec b, bool trainable, std::vector<int> inputs = {-1});
Layer affine_layer_no_bias(Matrix W, bool trainable, std::vector<int> inputs = {-1});
Layer activation_layer(Act act, std::vector<int> inputs = {-1});
Layer concat_layer(std::vector<int> inputs);
Layer pairwise_product_layer(std::vector<int> inputs);
Layer group_sum_layer(std::size_t group, std::vector<int> inputs = {-1});

struct LayerGrad {
  Matrix dW;  // empty for parameterless layers
  Vec db;
};

struct GradientResult {
  std::vector<LayerGrad> layers;
  Vec d_input;
};

// Sequence of layers wired as a DAG; the last layer is the output node.
struct LayeredNetwork {
  std::vector<Layer> layers;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;

  // Throws std::invalid_argument on bad wiring or inconsistent widths.
  void validate() const;

  // Deterministic evaluation; step fires at exactly 0. Throws NumericError
  // when any intermediate value is non-finite.
  Vec forward(const Vec& x) const;

  // Reverse-mode pass. Gradients are produced for every affine parameter,
  // masked or not; callers apply masks when updating. Step propagates zero;
  // the relu subgradient at 0 is 0.
  GradientResult gradients(const Vec& x, const Vec& upstream) const;

  std::size_t total_parameters() const;
  std::size_t trainable_parameters() const;
};

}  // namespace yannrl
