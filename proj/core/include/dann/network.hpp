#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dann/jet.hpp"
#include "dann/tape.hpp"

namespace dann {

using ad::Jet2;
using ad::Jet2d;

enum class Act : std::uint8_t { Identity, Tanh, Sigmoid, Softplus };
enum class Model : std::uint8_t { PINN, APINN, QRES, ISC, QSC, DANN };

const char* to_string(Act a);
const char* to_string(Model m);
Act act_from_string(const std::string& s);
Model model_from_string(const std::string& s);

// Hidden-layer stack description. The output layer is always purely linear.
//
// Layer maps, x = layer input, z = W1 x (pre-bias), zb = z + b:
//   PINN   y = s1(zb)
//   APINN  y = s1(n*a * zb)        a trainable per layer, init 1/n
//   ISC    y = s1(zb) + x          skip only on width-preserving layers
//   QRES   y = s1(W2x . z + zb)
//   QSC    y =    W2x . z + s1(zb)
//   DANN   y = s1(W2x . z) + s2(zb)
struct Architecture {
  Model model = Model::DANN;
  int input_dim = 2;          // 1 + spatial dimension
  std::vector<int> widths;    // one entry per hidden layer
  Act sigma1 = Act::Tanh;
  Act sigma2 = Act::Tanh;     // used by DANN only
  double apinn_n = 5.0;

  int depth() const { return static_cast<int>(widths.size()); }
  bool two_weight() const {
    return model == Model::QRES || model == Model::QSC || model == Model::DANN;
  }
  // Throws std::invalid_argument on malformed stacks (ISC width change across
  // hidden layers, identity activation anywhere but DANN's sigma1, ...).
  void validate() const;
};

// Offsets into the flat parameter vector. W1/W2 are row-major
// (fan_out x fan_in); `a` is the APINN per-layer slope.
struct LayerSlice {
  int w1 = -1, b = -1, w2 = -1, a = -1;
  int n_in = 0, n_out = 0;
};

struct Layout {
  std::vector<LayerSlice> hidden;
  int out_w = -1, out_b = -1;
  int out_in = 0;  // fan-in of the linear output layer
  int total = 0;
};

Layout make_layout(const Architecture& arch);

// Xavier/Glorot uniform init: W ~ U(-r, r), r = sqrt(6/(fan_in+fan_out)),
// biases zero, APINN slopes 1/n. Draw order is fixed: stream mix(seed,1)
// fills all single-weight matrices (hidden W1s in layer order, then the
// output weights), stream mix(seed,2) independently fills all W2s.
std::vector<double> xavier_init(const Architecture& arch, const Layout& lay,
                                std::uint64_t seed);

template <class S>
struct NetScratch {
  std::vector<S> x, y, z1, z2;
};

template <class S, class P>
S apply_act(Act a, const S& s) {
  using std::tanh;
  using ad::tanh;
  using ad::sigmoid;
  using ad::softplus;
  switch (a) {
    case Act::Identity: return s;
    case Act::Tanh: return tanh(s);
    case Act::Sigmoid: return sigmoid(s);
    case Act::Softplus: return softplus(s);
  }
  return s;
}

// Reference forward pass over any scalar type S with parameter scalar P.
// The arithmetic term order here is mirrored exactly by the tape recorder
// below so that both paths produce bit-identical values.
template <class S, class P>
S net_forward(const Architecture& arch, const Layout& lay, std::span<const P> theta,
              std::span<const S> input, NetScratch<S>& ws) {
  ws.x.assign(input.begin(), input.end());
  for (int l = 0; l < arch.depth(); ++l) {
    const LayerSlice& sl = lay.hidden[static_cast<std::size_t>(l)];
    ws.y.clear();
    ws.z1.clear();
    ws.z2.clear();
    for (int j = 0; j < sl.n_out; ++j) {
      S acc{};
      const P* w = theta.data() + sl.w1 + j * sl.n_in;
      for (int k = 0; k < sl.n_in; ++k) acc = acc + ws.x[static_cast<std::size_t>(k)] * w[k];
      ws.z1.push_back(acc);
      if (arch.two_weight()) {
        S acc2{};
        const P* w2 = theta.data() + sl.w2 + j * sl.n_in;
        for (int k = 0; k < sl.n_in; ++k) acc2 = acc2 + ws.x[static_cast<std::size_t>(k)] * w2[k];
        ws.z2.push_back(acc2);
      }
    }
    for (int j = 0; j < sl.n_out; ++j) {
      const S& u = ws.z1[static_cast<std::size_t>(j)];
      const S zb = u + theta[static_cast<std::size_t>(sl.b + j)];
      switch (arch.model) {
        case Model::PINN:
          ws.y.push_back(apply_act<S, P>(arch.sigma1, zb));
          break;
        case Model::APINN: {
          const P s = arch.apinn_n * theta[static_cast<std::size_t>(sl.a)];
          ws.y.push_back(apply_act<S, P>(arch.sigma1, zb * s));
          break;
        }
        case Model::ISC: {
          // The first layer stays plain: its input is the raw coordinate
          // vector, not a feature map worth preserving.
          S v = apply_act<S, P>(arch.sigma1, zb);
          if (l > 0 && sl.n_in == sl.n_out) v = v + ws.x[static_cast<std::size_t>(j)];
          ws.y.push_back(v);
          break;
        }
        case Model::QRES: {
          const S q = ws.z2[static_cast<std::size_t>(j)] * u;
          ws.y.push_back(apply_act<S, P>(arch.sigma1, q + zb));
          break;
        }
        case Model::QSC: {
          const S q = ws.z2[static_cast<std::size_t>(j)] * u;
          ws.y.push_back(q + apply_act<S, P>(arch.sigma1, zb));
          break;
        }
        case Model::DANN: {
          const S q = ws.z2[static_cast<std::size_t>(j)] * u;
          ws.y.push_back(apply_act<S, P>(arch.sigma1, q) + apply_act<S, P>(arch.sigma2, zb));
          break;
        }
      }
    }
    ws.x.swap(ws.y);
  }
  S acc{};
  for (int k = 0; k < lay.out_in; ++k)
    acc = acc + ws.x[static_cast<std::size_t>(k)] * theta[static_cast<std::size_t>(lay.out_w + k)];
  return acc + theta[static_cast<std::size_t>(lay.out_b)];
}

// Network output with directional first derivatives (one per input axis) and
// the spatial Laplacian sum_{p>=1} d^2u/dx_p^2. The Laplacian is propagated
// as a single carrier through the layers rather than one second-order probe
// per axis, which removes most of the per-axis affine work. lap is constant
// zero when it was not requested.
struct ProbeOut {
  ad::Rev v;
  std::vector<ad::Rev> d1;
  ad::Rev lap;
};

// Records the network forward pass on a tape using fused block nodes. The
// parameter vector must be registered as tape leaves at ids
// [theta_base, theta_base + layout.total). The value pass is emitted once and
// shared by all probe directions; each component block is contiguous so the
// adjoint sweep runs over dense ranges.
//
// The value components mirror net_forward's arithmetic term order exactly, so
// recorded values are bit-identical to the reference forward at the same
// point and parameters. Activation derivative factors are emitted as
// arithmetic over the activation value (e.g. tanh' = 1 - y^2), which keeps
// transcendental evaluations to one per neuron and lets the adjoint sweep
// differentiate the factors without any stored third derivatives.
class TapeNet {
 public:
  TapeNet(ad::Tape& tape, const Architecture& arch, const Layout& lay,
          std::int32_t theta_base)
      : t_(tape), arch_(arch), lay_(lay), base_(theta_base) {}

  // Forward pass with first derivatives along every input axis and, when
  // with_lap is set, the spatial Laplacian.
  ProbeOut forward_probes(std::span<const double> input, bool with_lap);

  // Value-only forward; inputs may be tape variables (delayed self-evaluation
  // at a recorded lag time).
  ad::Rev forward_value(std::span<const ad::Rev> input);

 private:
  // Per-layer activation state: value block, per-axis first-derivative
  // blocks, spatial Laplacian block. Base id -1 marks a block that is
  // identically zero and was never emitted.
  struct State {
    std::int32_t v = -1;
    std::vector<std::int32_t> d1;
    std::int32_t lap = -1;
    int n = 0;
  };

  // Activation value together with the first/second derivative factor blocks
  // (already chained through the arithmetic expansion).
  struct ActBlocks {
    std::int32_t f0 = -1, f1 = -1, f2 = -1;
  };

  std::int32_t block_fn(ad::Fn f, int k, std::int32_t src, int n);
  std::int32_t block_mul(std::int32_t a, std::int32_t b, int n);
  std::int32_t block_add(std::int32_t a, std::int32_t b, int n);
  std::int32_t block_affine(std::int32_t x_base, int w_off, int n_in, int n_out);
  std::int32_t block_bias(std::int32_t src, int b_off, int n);
  std::int32_t block_cmul(double c, std::int32_t a, int n);
  std::int32_t block_csub(double c, std::int32_t a, int n);
  std::int32_t block_mul_scalar(std::int32_t a, ad::Rev s, int n);
  std::int32_t block_dot2(std::int32_t a1, std::int32_t b1, std::int32_t a2,
                          std::int32_t b2, int n);
  // Per-element dot over `m` strided block pairs: out_j = sum_k a_k[j] b_k[j].
  std::int32_t block_dot_many(std::span<const std::int32_t> a_bases,
                              std::span<const std::int32_t> b_bases, int n);

  ActBlocks act_factors(Act act, std::int32_t zv, int n, bool need_f1, bool need_f2);
  State act_state(Act act, const State& z);
  State layer_state(int l, const State& in);
  std::int32_t materialize(std::span<const ad::Rev> input);

  ad::Tape& t_;
  const Architecture& arch_;
  const Layout& lay_;
  std::int32_t base_;
  bool with_lap_ = false;
  std::vector<std::int32_t> ibuf_, ibuf2_;
};

}  // namespace dann
