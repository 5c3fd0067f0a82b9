#include "yannrl/net.hpp"

#include <cmath>
#include <string>

#include "yannrl/errors.hpp"
#include "yannrl/kernels.hpp"

namespace yannrl {

Layer affine_layer(Matrix W, Vec b, bool trainable, std::vector<int> inputs) {
  Layer l;
  l.kind = LayerKind::Affine;
  l.inputs = std::move(inputs);
  l.w_mask = Matrix(W.rows(), W.cols(), trainable ? 1.0 : 0.0);
  l.b_mask = Vec(b.size(), trainable ? 1.0 : 0.0);
  l.W = std::move(W);
  l.b = std::move(b);
  l.has_bias = true;
  return l;
}

Layer affine_layer_no_bias(Matrix W, bool trainable, std::vector<int> inputs) {
  Layer l;
  l.kind = LayerKind::Affine;
  l.inputs = std::move(inputs);
  l.w_mask = Matrix(W.rows(), W.cols(), trainable ? 1.0 : 0.0);
  l.W = std::move(W);
  l.has_bias = false;
  return l;
}

Layer activation_layer(Act act, std::vector<int> inputs) {
  Layer l;
  l.kind = LayerKind::Activation;
  l.inputs = std::move(inputs);
  l.act = act;
  return l;
}

Layer concat_layer(std::vector<int> inputs) {
  Layer l;
  l.kind = LayerKind::Concat;
  l.inputs = std::move(inputs);
  return l;
}

Layer pairwise_product_layer(std::vector<int> inputs) {
  Layer l;
  l.kind = LayerKind::PairwiseProduct;
  l.inputs = std::move(inputs);
  return l;
}

Layer group_sum_layer(std::size_t group, std::vector<int> inputs) {
  Layer l;
  l.kind = LayerKind::GroupSum;
  l.inputs = std::move(inputs);
  l.group = group;
  return l;
}

namespace {

// Output width of each node, checking wiring and shape agreement as we go.
std::vector<std::size_t> node_widths(const LayeredNetwork& net) {
  std::vector<std::size_t> w(net.layers.size(), 0);
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const Layer& l = net.layers[k];
    require(!l.inputs.empty(), "net: layer has no inputs");
    std::vector<std::size_t> in_w;
    for (int id : l.inputs) {
      require(id >= -1 && id < static_cast<int>(k),
              "net: layer " + std::to_string(k) + " references node " + std::to_string(id));
      in_w.push_back(id < 0 ? net.input_dim : w[static_cast<std::size_t>(id)]);
    }
    switch (l.kind) {
      case LayerKind::Affine: {
        require(l.inputs.size() == 1, "net: affine layers take one input");
        require(l.W.cols() == in_w[0], "net: affine width mismatch at layer " + std::to_string(k));
        require(!l.has_bias || l.b.size() == l.W.rows(), "net: affine bias length");
        require(l.w_mask.rows() == l.W.rows() && l.w_mask.cols() == l.W.cols(),
                "net: weight mask shape");
        require(!l.has_bias || l.b_mask.size() == l.b.size(), "net: bias mask shape");
        w[k] = l.W.rows();
        break;
      }
      case LayerKind::Activation:
        require(l.inputs.size() == 1, "net: activation layers take one input");
        w[k] = in_w[0];
        break;
      case LayerKind::PairwiseProduct:
        require(l.inputs.size() == 2 && in_w[0] == in_w[1],
                "net: pairwise product needs two inputs of equal width");
        w[k] = in_w[0];
        break;
      case LayerKind::Concat: {
        std::size_t total = 0;
        for (std::size_t s : in_w) total += s;
        w[k] = total;
        break;
      }
      case LayerKind::GroupSum:
        require(l.inputs.size() == 1, "net: group sum takes one input");
        require(l.group > 0 && in_w[0] % l.group == 0,
                "net: group sum width not divisible at layer " + std::to_string(k));
        w[k] = in_w[0] / l.group;
        break;
    }
  }
  return w;
}

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Evaluates every node, leaving the outputs in evaluation order. Shared by
// forward() and gradients() so the two passes cannot drift apart.
std::vector<Vec> forward_all(const LayeredNetwork& net, const Vec& x) {
  require(x.size() == net.input_dim, "net: input size");
  const Kernels& K = kernels();
  std::vector<Vec> out(net.layers.size());
  auto value_of = [&](int id) -> const Vec& {
    return id < 0 ? x : out[static_cast<std::size_t>(id)];
  };

  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const Layer& l = net.layers[k];
    Vec& y = out[k];
    switch (l.kind) {
      case LayerKind::Affine: {
        const Vec& in = value_of(l.inputs[0]);
        y.assign(l.W.rows(), 0.0);
        K.gemv(l.W.data(), l.W.rows(), l.W.cols(), in.data(), y.data());
        if (l.has_bias) K.axpy(1.0, l.b.data(), y.data(), y.size());
        break;
      }
      case LayerKind::Activation: {
        y = value_of(l.inputs[0]);
        switch (l.act) {
          case Act::Identity:
            break;
          case Act::Relu:
            K.relu(y.data(), y.data(), y.size());
            break;
          case Act::Tanh:
            for (double& v : y) v = std::tanh(v);
            break;
          case Act::Step:
            for (double& v : y) v = (v >= 0.0) ? 1.0 : 0.0;
            break;
        }
        break;
      }
      case LayerKind::PairwiseProduct: {
        const Vec& a = value_of(l.inputs[0]);
        const Vec& b = value_of(l.inputs[1]);
        y.resize(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] * b[i];
        break;
      }
      case LayerKind::Concat: {
        for (int id : l.inputs) {
          const Vec& part = value_of(id);
          y.insert(y.end(), part.begin(), part.end());
        }
        break;
      }
      case LayerKind::GroupSum: {
        const Vec& in = value_of(l.inputs[0]);
        y.assign(in.size() / l.group, 0.0);
        for (std::size_t i = 0; i < in.size(); ++i) y[i / l.group] += in[i];
        break;
      }
    }
    if (!all_finite(y))
      throw NumericError("net: non-finite value at layer " + std::to_string(k));
  }
  return out;
}

}  // namespace

void LayeredNetwork::validate() const {
  require(input_dim > 0, "net: input_dim must be positive");
  require(!layers.empty(), "net: no layers");
  std::vector<std::size_t> w = node_widths(*this);
  require(w.back() == output_dim, "net: output_dim disagrees with final layer");
}

Vec LayeredNetwork::forward(const Vec& x) const { return forward_all(*this, x).back(); }

GradientResult LayeredNetwork::gradients(const Vec& x, const Vec& upstream) const {
  require(upstream.size() == output_dim, "net: upstream size");
  const Kernels& K = kernels();
  std::vector<Vec> out = forward_all(*this, x);
  auto value_of = [&](int id) -> const Vec& {
    return id < 0 ? x : out[static_cast<std::size_t>(id)];
  };

  GradientResult res;
  res.layers.resize(layers.size());
  res.d_input.assign(input_dim, 0.0);

  std::vector<Vec> adj(layers.size());
  for (std::size_t k = 0; k < layers.size(); ++k) adj[k].assign(out[k].size(), 0.0);
  adj.back() = upstream;

  auto adjoint_of = [&](int id) -> Vec& {
    return id < 0 ? res.d_input : adj[static_cast<std::size_t>(id)];
  };

  for (std::size_t k = layers.size(); k-- > 0;) {
    const Layer& l = layers[k];
    const Vec& a = adj[k];
    switch (l.kind) {
      case LayerKind::Affine: {
        const Vec& in = value_of(l.inputs[0]);
        LayerGrad& g = res.layers[k];
        g.dW = Matrix(l.W.rows(), l.W.cols());
        K.ger(g.dW.data(), g.dW.rows(), g.dW.cols(), 1.0, a.data(), in.data());
        if (l.has_bias) g.db = a;
        Vec back(l.W.cols(), 0.0);
        K.gemv_t(l.W.data(), l.W.rows(), l.W.cols(), a.data(), back.data());
        K.axpy(1.0, back.data(), adjoint_of(l.inputs[0]).data(), back.size());
        break;
      }
      case LayerKind::Activation: {
        Vec& d = adjoint_of(l.inputs[0]);
        const Vec& in = value_of(l.inputs[0]);
        switch (l.act) {
          case Act::Identity:
            K.axpy(1.0, a.data(), d.data(), a.size());
            break;
          case Act::Relu:
            // subgradient 0 at the kink
            for (std::size_t i = 0; i < a.size(); ++i)
              if (in[i] > 0.0) d[i] += a[i];
            break;
          case Act::Tanh:
            for (std::size_t i = 0; i < a.size(); ++i)
              d[i] += a[i] * (1.0 - out[k][i] * out[k][i]);
            break;
          case Act::Step:
            break;  // flat almost everywhere
        }
        break;
      }
      case LayerKind::PairwiseProduct: {
        const Vec& va = value_of(l.inputs[0]);
        const Vec& vb = value_of(l.inputs[1]);
        Vec& da = adjoint_of(l.inputs[0]);
        Vec& db = adjoint_of(l.inputs[1]);
        for (std::size_t i = 0; i < a.size(); ++i) {
          da[i] += a[i] * vb[i];
          db[i] += a[i] * va[i];
        }
        break;
      }
      case LayerKind::Concat: {
        std::size_t off = 0;
        for (int id : l.inputs) {
          Vec& d = adjoint_of(id);
          for (std::size_t i = 0; i < d.size(); ++i) d[i] += a[off + i];
          off += d.size();
        }
        break;
      }
      case LayerKind::GroupSum: {
        Vec& d = adjoint_of(l.inputs[0]);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += a[i / l.group];
        break;
      }
    }
  }
  return res;
}

std::size_t LayeredNetwork::total_parameters() const {
  std::size_t n = 0;
  for (const Layer& l : layers)
    if (l.kind == LayerKind::Affine) n += l.W.rows() * l.W.cols() + (l.has_bias ? l.b.size() : 0);
  return n;
}

std::size_t LayeredNetwork::trainable_parameters() const {
  std::size_t n = 0;
  for (const Layer& l : layers) {
    if (l.kind != LayerKind::Affine) continue;
    for (std::size_t i = 0; i < l.w_mask.rows(); ++i)
      for (std::size_t j = 0; j < l.w_mask.cols(); ++j)
        if (l.w_mask(i, j) != 0.0) ++n;
    if (l.has_bias)
      for (double m : l.b_mask)
        if (m != 0.0) ++n;
  }
  return n;
}

}  // namespace yannrl
