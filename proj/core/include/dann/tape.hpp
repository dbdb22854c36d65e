#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "dann/jet.hpp"

namespace dann::ad {

// Reverse-mode record of a scalar computation. Jet-valued computations are
// recorded through Jet2<Rev>, whose three components are tape variables; the
// adjoint sweep is plain real arithmetic per component.
//
// Invariants:
//  - nodes are append-only; operands always precede their results,
//  - the backward sweep visits nodes in strict reverse insertion order, so a
//    given record produces bit-identical gradients on every run,
//  - replay() recomputes every recorded value (and cached local derivative)
//    from the current leaf values, reproducing the forward pass bit-exactly.
enum class Op : std::uint8_t {
  Leaf,    // independent input; val set by the caller
  Konst,   // pinned constant; val = aux
  Copy,    // val[a]
  Add,     // val[a] + val[b]
  Sub,     // val[a] - val[b]
  Mul,     // val[a] * val[b]
  Div,     // val[a] / val[b]
  Neg,     // -val[a]
  CAdd,    // aux + val[a]
  CSub,    // aux - val[a]
  CMul,    // aux * val[a]
  CDiv,    // aux / val[a]
  Fun,     // f^(k)(val[a]); fid/k in fk, PowInt exponent in n, aux caches f^(k+1)
  Affine,  // sum_i val[b+i] * val[a+i]; a = value block, b = weight block
  WSum,    // sum_i xaux[b+i] * val[xargs[a+i]]
  Dot,     // sum_i val[xargs[a+2i]] * val[xargs[a+2i+1]], n pairs
  Sum,     // sum_i val[xargs[a+i]], n terms
};

class Tape;

namespace detail {
inline thread_local Tape* active_tape = nullptr;
}

// Tape variable handle. id < 0 marks a constant that lives outside the tape;
// arithmetic on constants folds eagerly and records nothing.
struct Rev {
  double v = 0.0;
  std::int32_t id = -1;

  Rev() = default;
  Rev(double value) : v(value), id(-1) {}  // NOLINT: implicit by design
  Rev(double value, std::int32_t node) : v(value), id(node) {}

  bool is_const() const { return id < 0; }
};

class Tape {
 public:
  struct Node {
    Op op;
    std::uint8_t fk;  // Fun: fid<<2 | derivative order
    std::uint16_t n;  // Affine/WSum/Dot/Sum arity; Fun: PowInt exponent
    std::int32_t a = -1, b = -1;
    double aux = 0.0;
  };

  // Rewind point: node/arg/aux counts taken together restore a prefix.
  struct Mark {
    std::size_t nodes, xargs, xaux;
  };

  void reset() {
    nodes_.clear();
    val_.clear();
    xargs_.clear();
    xaux_.clear();
    n_leaf_ = 0;
  }

  Mark mark() const { return {nodes_.size(), xargs_.size(), xaux_.size()}; }

  void rewind(const Mark& m) {
    nodes_.resize(m.nodes);
    val_.resize(m.nodes);
    xargs_.resize(m.xargs);
    xaux_.resize(m.xaux);
  }

  std::size_t size() const { return nodes_.size(); }
  int leaf_count() const { return n_leaf_; }
  double value(std::int32_t id) const { return val_[static_cast<std::size_t>(id)]; }
  void set_leaf(std::int32_t id, double v) {
    assert(id >= 0 && id < n_leaf_ && nodes_[static_cast<std::size_t>(id)].op == Op::Leaf);
    val_[static_cast<std::size_t>(id)] = v;
  }

  Rev leaf(double v) {
    assert(nodes_.size() == static_cast<std::size_t>(n_leaf_) &&
           "leaves must be registered before interior nodes");
    ++n_leaf_;
    return Rev{v, push(Op::Leaf, v, {})};
  }

  // Materializes a constant as a node (needed when a block of contiguous node
  // ids must be formed from mixed constant/variable scalars).
  Rev pin(Rev x) {
    if (!x.is_const()) return x;
    Node nd{};
    nd.op = Op::Konst;
    nd.aux = x.v;
    return Rev{x.v, push(nd, x.v)};
  }

  Rev copy(Rev x) {
    if (x.is_const()) return x;
    Node nd{};
    nd.op = Op::Copy;
    nd.a = x.id;
    return Rev{x.v, push(nd, x.v)};
  }

  Rev binary(Op op, Rev a, Rev b, double v) {
    Node nd{};
    nd.op = op;
    nd.a = a.id;
    nd.b = b.id;
    return Rev{v, push(nd, v)};
  }

  Rev cop(Op op, double c, Rev a, double v) {
    Node nd{};
    nd.op = op;
    nd.a = a.id;
    nd.aux = c;
    return Rev{v, push(nd, v)};
  }

  Rev unary_neg(Rev a) {
    Node nd{};
    nd.op = Op::Neg;
    nd.a = a.id;
    return Rev{-a.v, push(nd, -a.v)};
  }

  Rev fun(Fn f, int k, Rev a, int pn = 0) {
    double v, aux;
    fn_eval2(f, k, a.v, pn, v, aux);
    Node nd{};
    nd.op = Op::Fun;
    nd.fk = static_cast<std::uint8_t>((static_cast<int>(f) << 2) | k);
    nd.n = static_cast<std::uint16_t>(static_cast<std::int16_t>(pn));
    nd.a = a.id;
    nd.aux = aux;
    return Rev{v, push(nd, v)};
  }

  // Dot product of two contiguous blocks of tape variables. Both blocks must
  // already live on the tape; the caller guarantees contiguity.
  Rev affine(std::int32_t x_base, std::int32_t w_base, int n) {
    double s = 0.0;
    const double* vx = val_.data() + x_base;
    const double* vw = val_.data() + w_base;
    for (int i = 0; i < n; ++i) s += vw[i] * vx[i];
    Node nd{};
    nd.op = Op::Affine;
    nd.n = static_cast<std::uint16_t>(n);
    nd.a = x_base;
    nd.b = w_base;
    return Rev{s, push(nd, s)};
  }

  // Weighted sum of tape variables with constant coefficients; zero
  // coefficients are dropped at record time.
  Rev wsum(std::span<const std::int32_t> ids, std::span<const double> coeffs) {
    assert(ids.size() == coeffs.size());
    const auto arg0 = static_cast<std::int32_t>(xargs_.size());
    const auto aux0 = static_cast<std::int32_t>(xaux_.size());
    double s = 0.0;
    int kept = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (coeffs[i] == 0.0) continue;
      xargs_.push_back(ids[i]);
      xaux_.push_back(coeffs[i]);
      s += coeffs[i] * val_[static_cast<std::size_t>(ids[i])];
      ++kept;
    }
    if (kept == 0) {
      xargs_.resize(static_cast<std::size_t>(arg0));
      xaux_.resize(static_cast<std::size_t>(aux0));
      return Rev{0.0};
    }
    Node nd{};
    nd.op = Op::WSum;
    nd.n = static_cast<std::uint16_t>(kept);
    nd.a = arg0;
    nd.b = aux0;
    return Rev{s, push(nd, s)};
  }

  // Sum of products over explicit pairs; all operands must be tape variables.
  Rev dot(std::span<const std::int32_t> pair_ids) {
    assert(pair_ids.size() % 2 == 0);
    const auto arg0 = static_cast<std::int32_t>(xargs_.size());
    double s = 0.0;
    for (std::size_t i = 0; i < pair_ids.size(); i += 2) {
      xargs_.push_back(pair_ids[i]);
      xargs_.push_back(pair_ids[i + 1]);
      s += val_[static_cast<std::size_t>(pair_ids[i])] *
           val_[static_cast<std::size_t>(pair_ids[i + 1])];
    }
    Node nd{};
    nd.op = Op::Dot;
    nd.n = static_cast<std::uint16_t>(pair_ids.size() / 2);
    nd.a = arg0;
    return Rev{s, push(nd, s)};
  }

  Rev sum_ids(std::span<const std::int32_t> ids) {
    const auto arg0 = static_cast<std::int32_t>(xargs_.size());
    double s = 0.0;
    for (std::int32_t id : ids) {
      xargs_.push_back(id);
      s += val_[static_cast<std::size_t>(id)];
    }
    Node nd{};
    nd.op = Op::Sum;
    nd.n = static_cast<std::uint16_t>(ids.size());
    nd.a = arg0;
    return Rev{s, push(nd, s)};
  }

  // Recomputes all node values (and cached Fun derivatives) in insertion
  // order from the current leaf values.
  void replay() {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      Node& nd = nodes_[i];
      switch (nd.op) {
        case Op::Leaf: break;
        case Op::Konst: val_[i] = nd.aux; break;
        case Op::Copy: val_[i] = val_[static_cast<std::size_t>(nd.a)]; break;
        case Op::Add: val_[i] = val_[static_cast<std::size_t>(nd.a)] + val_[static_cast<std::size_t>(nd.b)]; break;
        case Op::Sub: val_[i] = val_[static_cast<std::size_t>(nd.a)] - val_[static_cast<std::size_t>(nd.b)]; break;
        case Op::Mul: val_[i] = val_[static_cast<std::size_t>(nd.a)] * val_[static_cast<std::size_t>(nd.b)]; break;
        case Op::Div: val_[i] = val_[static_cast<std::size_t>(nd.a)] / val_[static_cast<std::size_t>(nd.b)]; break;
        case Op::Neg: val_[i] = -val_[static_cast<std::size_t>(nd.a)]; break;
        case Op::CAdd: val_[i] = nd.aux + val_[static_cast<std::size_t>(nd.a)]; break;
        case Op::CSub: val_[i] = nd.aux - val_[static_cast<std::size_t>(nd.a)]; break;
        case Op::CMul: val_[i] = nd.aux * val_[static_cast<std::size_t>(nd.a)]; break;
        case Op::CDiv: val_[i] = nd.aux / val_[static_cast<std::size_t>(nd.a)]; break;
        case Op::Fun: {
          const Fn f = static_cast<Fn>(nd.fk >> 2);
          const int k = nd.fk & 3;
          const int pn = static_cast<std::int16_t>(nd.n);
          const double x = val_[static_cast<std::size_t>(nd.a)];
          fn_eval2(f, k, x, pn, val_[i], nd.aux);
          break;
        }
        case Op::Affine: {
          const double* vx = val_.data() + nd.a;
          const double* vw = val_.data() + nd.b;
          double s = 0.0;
          for (int t = 0; t < nd.n; ++t) s += vw[t] * vx[t];
          val_[i] = s;
          break;
        }
        case Op::WSum: {
          double s = 0.0;
          for (int t = 0; t < nd.n; ++t)
            s += xaux_[static_cast<std::size_t>(nd.b + t)] *
                 val_[static_cast<std::size_t>(xargs_[static_cast<std::size_t>(nd.a + t)])];
          val_[i] = s;
          break;
        }
        case Op::Dot: {
          double s = 0.0;
          for (int t = 0; t < nd.n; ++t)
            s += val_[static_cast<std::size_t>(xargs_[static_cast<std::size_t>(nd.a + 2 * t)])] *
                 val_[static_cast<std::size_t>(xargs_[static_cast<std::size_t>(nd.a + 2 * t + 1)])];
          val_[i] = s;
          break;
        }
        case Op::Sum: {
          double s = 0.0;
          for (int t = 0; t < nd.n; ++t)
            s += val_[static_cast<std::size_t>(xargs_[static_cast<std::size_t>(nd.a + t)])];
          val_[i] = s;
          break;
        }
      }
    }
  }

  // Adjoint sweep from `out`, strict reverse insertion order. `bar` is the
  // caller-owned scratch adjoint buffer; on return bar[0..leaf_count) holds
  // the gradient of val[out] with respect to the leaves.
  void backward(std::int32_t out, std::vector<double>& bar) const {
    bar.assign(nodes_.size(), 0.0);
    bar[static_cast<std::size_t>(out)] = 1.0;
    for (std::int32_t i = out; i >= n_leaf_; --i) {
      const double g = bar[static_cast<std::size_t>(i)];
      if (g == 0.0) continue;
      const Node& nd = nodes_[static_cast<std::size_t>(i)];
      switch (nd.op) {
        case Op::Leaf:
        case Op::Konst:
          break;
        case Op::Copy:
        case Op::CAdd:
          bar[static_cast<std::size_t>(nd.a)] += g;
          break;
        case Op::Add:
          bar[static_cast<std::size_t>(nd.a)] += g;
          bar[static_cast<std::size_t>(nd.b)] += g;
          break;
        case Op::Sub:
          bar[static_cast<std::size_t>(nd.a)] += g;
          bar[static_cast<std::size_t>(nd.b)] -= g;
          break;
        case Op::Mul:
          bar[static_cast<std::size_t>(nd.a)] += g * val_[static_cast<std::size_t>(nd.b)];
          bar[static_cast<std::size_t>(nd.b)] += g * val_[static_cast<std::size_t>(nd.a)];
          break;
        case Op::Div: {
          const double inv = 1.0 / val_[static_cast<std::size_t>(nd.b)];
          bar[static_cast<std::size_t>(nd.a)] += g * inv;
          bar[static_cast<std::size_t>(nd.b)] -= g * val_[static_cast<std::size_t>(i)] * inv;
          break;
        }
        case Op::Neg:
        case Op::CSub:
          bar[static_cast<std::size_t>(nd.a)] -= g;
          break;
        case Op::CMul:
          bar[static_cast<std::size_t>(nd.a)] += g * nd.aux;
          break;
        case Op::CDiv:
          bar[static_cast<std::size_t>(nd.a)] -=
              g * val_[static_cast<std::size_t>(i)] / val_[static_cast<std::size_t>(nd.a)];
          break;
        case Op::Fun:
          bar[static_cast<std::size_t>(nd.a)] += g * nd.aux;
          break;
        case Op::Affine: {
          double* bx = bar.data() + nd.a;
          double* bw = bar.data() + nd.b;
          const double* vx = val_.data() + nd.a;
          const double* vw = val_.data() + nd.b;
          for (int t = 0; t < nd.n; ++t) {
            bx[t] += g * vw[t];
            bw[t] += g * vx[t];
          }
          break;
        }
        case Op::WSum:
          for (int t = 0; t < nd.n; ++t)
            bar[static_cast<std::size_t>(xargs_[static_cast<std::size_t>(nd.a + t)])] +=
                g * xaux_[static_cast<std::size_t>(nd.b + t)];
          break;
        case Op::Dot:
          for (int t = 0; t < nd.n; ++t) {
            const auto p = static_cast<std::size_t>(xargs_[static_cast<std::size_t>(nd.a + 2 * t)]);
            const auto q = static_cast<std::size_t>(xargs_[static_cast<std::size_t>(nd.a + 2 * t + 1)]);
            bar[p] += g * val_[q];
            bar[q] += g * val_[p];
          }
          break;
        case Op::Sum:
          for (int t = 0; t < nd.n; ++t)
            bar[static_cast<std::size_t>(xargs_[static_cast<std::size_t>(nd.a + t)])] += g;
          break;
      }
    }
  }

  std::span<const double> values() const { return val_; }
  std::span<const Node> nodes() const { return nodes_; }

 private:
  std::int32_t push(Op op, double v, Node proto) {
    proto.op = op;
    return push(proto, v);
  }
  std::int32_t push(const Node& nd, double v) {
    nodes_.push_back(nd);
    val_.push_back(v);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
  std::vector<double> val_;
  std::vector<std::int32_t> xargs_;
  std::vector<double> xaux_;
  int n_leaf_ = 0;
};

// Scoped activation of a tape for the free-operator syntax below.
class TapeScope {
 public:
  explicit TapeScope(Tape& t) : prev_(detail::active_tape) { detail::active_tape = &t; }
  ~TapeScope() { detail::active_tape = prev_; }
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* prev_;
};

inline Tape& active() {
  assert(detail::active_tape && "no active tape in scope");
  return *detail::active_tape;
}

// Arithmetic with eager constant folding. Folds that drop a variable operand
// (0*x, 1*x, x+0) assume finite values, which training code guarantees.
inline Rev operator+(Rev a, Rev b) {
  if (a.is_const() && b.is_const()) return Rev{a.v + b.v};
  if (a.is_const()) return a.v == 0.0 ? b : active().cop(Op::CAdd, a.v, b, a.v + b.v);
  if (b.is_const()) return b.v == 0.0 ? a : active().cop(Op::CAdd, b.v, a, a.v + b.v);
  return active().binary(Op::Add, a, b, a.v + b.v);
}

inline Rev operator-(Rev a, Rev b) {
  if (a.is_const() && b.is_const()) return Rev{a.v - b.v};
  if (a.is_const())
    return a.v == 0.0 ? active().unary_neg(b) : active().cop(Op::CSub, a.v, b, a.v - b.v);
  if (b.is_const()) return b.v == 0.0 ? a : active().cop(Op::CAdd, -b.v, a, a.v - b.v);
  return active().binary(Op::Sub, a, b, a.v - b.v);
}

inline Rev operator-(Rev a) {
  if (a.is_const()) return Rev{-a.v};
  return active().unary_neg(a);
}

inline Rev operator*(Rev a, Rev b) {
  if (a.is_const() && b.is_const()) return Rev{a.v * b.v};
  if (a.is_const()) {
    if (a.v == 0.0) return Rev{0.0};
    if (a.v == 1.0) return b;
    if (a.v == -1.0) return active().unary_neg(b);
    return active().cop(Op::CMul, a.v, b, a.v * b.v);
  }
  if (b.is_const()) {
    if (b.v == 0.0) return Rev{0.0};
    if (b.v == 1.0) return a;
    if (b.v == -1.0) return active().unary_neg(a);
    return active().cop(Op::CMul, b.v, a, a.v * b.v);
  }
  return active().binary(Op::Mul, a, b, a.v * b.v);
}

inline Rev operator/(Rev a, Rev b) {
  if (a.is_const() && b.is_const()) return Rev{a.v / b.v};
  if (b.is_const()) {
    if (b.v == 1.0) return a;
    // a/c is recorded exactly (not rewritten as a*(1/c)).
    Rev pb = active().pin(b);
    return active().binary(Op::Div, a, pb, a.v / b.v);
  }
  if (a.is_const()) {
    if (a.v == 0.0) return Rev{0.0};
    return active().cop(Op::CDiv, a.v, b, a.v / b.v);
  }
  return active().binary(Op::Div, a, b, a.v / b.v);
}

inline Rev& operator+=(Rev& a, Rev b) { return a = a + b; }
inline Rev& operator-=(Rev& a, Rev b) { return a = a - b; }
inline Rev& operator*=(Rev& a, Rev b) { return a = a * b; }

inline Rev fn_val(Fn f, int k, Rev a, int pn = 0) {
  if (a.is_const()) return Rev{fn_eval(f, k, a.v, pn)};
  return active().fun(f, k, a, pn);
}

inline Rev exp(Rev a) { return fn_val(Fn::Exp, 0, a); }
inline Rev log(Rev a) { return fn_val(Fn::Log, 0, a); }
inline Rev sin(Rev a) { return fn_val(Fn::Sin, 0, a); }
inline Rev cos(Rev a) { return fn_val(Fn::Cos, 0, a); }
inline Rev sqrt(Rev a) { return fn_val(Fn::Sqrt, 0, a); }
inline Rev tanh(Rev a) { return fn_val(Fn::Tanh, 0, a); }
inline Rev sigmoid(Rev a) { return fn_val(Fn::Sigmoid, 0, a); }
inline Rev softplus(Rev a) { return fn_val(Fn::Softplus, 0, a); }
inline Rev pow_int(Rev a, int n) { return fn_val(Fn::PowInt, 0, a, n); }

// Detaches a value from the gradient path (used by the lag-frozen diagnostic
// mode where the delay argument is treated as data).
inline Rev detach(Rev a) { return Rev{a.v}; }

using JetR = Jet2<Rev>;

inline JetR lift(const Jet2d& j) { return {Rev{j.v}, Rev{j.d1}, Rev{j.d2}}; }

}  // namespace dann::ad
