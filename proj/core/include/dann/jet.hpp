#pragma once

#include <cmath>
#include <cstdint>
#include <type_traits>

namespace dann::ad {

// Elementary scalar functions available to jet and tape arithmetic. Each entry
// supplies analytic derivatives up to third order: second order feeds the
// truncated Taylor algebra, third order feeds the reverse pass through it.
enum class Fn : std::uint8_t {
  Neg, Exp, Log, Sin, Cos, Sqrt, Tanh, Sigmoid, Softplus, PowInt
};

// Integer power by squaring; bit-stable across libm implementations.
inline double powi(double x, int n) {
  if (n < 0) return 1.0 / powi(x, -n);
  double r = 1.0, b = x;
  for (unsigned m = static_cast<unsigned>(n); m != 0; m >>= 1) {
    if (m & 1u) r *= b;
    b *= b;
  }
  return r;
}

inline double sigmoid_val(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// softplus(x) = ln(1+e^x); for x > 20 the overflow-safe form x + ln(1+e^-x).
inline double softplus_val(double x) {
  if (x > 20.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// k-th derivative of f at x, k in [0,3]. pn is the exponent for PowInt.
inline double fn_eval(Fn f, int k, double x, int pn = 0) {
  switch (f) {
    case Fn::Neg:
      return k == 0 ? -x : (k == 1 ? -1.0 : 0.0);
    case Fn::Exp:
      return std::exp(x);
    case Fn::Log:
      switch (k) {
        case 0: return std::log(x);
        case 1: return 1.0 / x;
        case 2: return -1.0 / (x * x);
        default: return 2.0 / (x * x * x);
      }
    case Fn::Sin:
      switch (k & 3) {
        case 0: return std::sin(x);
        case 1: return std::cos(x);
        case 2: return -std::sin(x);
        default: return -std::cos(x);
      }
    case Fn::Cos:
      switch (k & 3) {
        case 0: return std::cos(x);
        case 1: return -std::sin(x);
        case 2: return -std::cos(x);
        default: return std::sin(x);
      }
    case Fn::Sqrt: {
      const double s = std::sqrt(x);
      switch (k) {
        case 0: return s;
        case 1: return 0.5 / s;
        case 2: return -0.25 / (x * s);
        default: return 0.375 / (x * x * s);
      }
    }
    case Fn::Tanh: {
      const double t = std::tanh(x);
      const double sech2 = 1.0 - t * t;
      switch (k) {
        case 0: return t;
        case 1: return sech2;
        case 2: return -2.0 * t * sech2;
        default: return sech2 * (6.0 * t * t - 2.0);
      }
    }
    case Fn::Sigmoid: {
      const double s = sigmoid_val(x);
      const double p = s * (1.0 - s);
      switch (k) {
        case 0: return s;
        case 1: return p;
        case 2: return p * (1.0 - 2.0 * s);
        default: return p * (1.0 - 6.0 * s + 6.0 * s * s);
      }
    }
    case Fn::Softplus: {
      if (k == 0) return softplus_val(x);
      const double s = sigmoid_val(x);
      switch (k) {
        case 1: return s;
        case 2: return s * (1.0 - s);
        default: return s * (1.0 - s) * (1.0 - 2.0 * s);
      }
    }
    case Fn::PowInt: {
      double c = 1.0;
      for (int i = 0; i < k; ++i) c *= static_cast<double>(pn - i);
      return c == 0.0 ? 0.0 : c * powi(x, pn - k);
    }
  }
  return 0.0;
}

/// fn_val: f^(k)(x) over a differentiable scalar. The double overload closes
// the recursion; tape.hpp adds an overload for recorded variables.
inline double fn_val(Fn f, int k, double x, int pn = 0) {
  return fn_eval(f, k, x, pn);
}

// f^(k) and f^(k+1) at x with the shared transcendental evaluated once.
// Results are bit-identical to two separate fn_eval calls; k must be <= 2.
inline void fn_eval2(Fn f, int k, double x, int pn, double& v0, double& v1) {
  switch (f) {
    case Fn::Tanh: {
      const double t = std::tanh(x);
      const double sech2 = 1.0 - t * t;
      const double d[4] = {t, sech2, -2.0 * t * sech2,
                           sech2 * (6.0 * t * t - 2.0)};
      v0 = d[k];
      v1 = d[k + 1];
      return;
    }
    case Fn::Sigmoid: {
      const double s = sigmoid_val(x);
      const double p = s * (1.0 - s);
      const double d[4] = {s, p, p * (1.0 - 2.0 * s),
                           p * (1.0 - 6.0 * s + 6.0 * s * s)};
      v0 = d[k];
      v1 = d[k + 1];
      return;
    }
    default:
      v0 = fn_eval(f, k, x, pn);
      v1 = fn_eval(f, k + 1, x, pn);
  }
}

// Named double overloads so generic code resolves these alongside the Rev and
// jet versions without implicit conversions.
inline double sigmoid(double x) { return sigmoid_val(x); }
inline double softplus(double x) { return softplus_val(x); }
inline double pow_int(double x, int n) { return powi(x, n); }

// Scalar carrying value plus first and second directional derivatives along
// one probe direction: the truncated Taylor algebra of forward mode.
template <class T>
struct Jet2 {
  T v{}, d1{}, d2{};
};

using Jet2d = Jet2<double>;

template <class T>
Jet2<T> jet_const(T v) {
  return {v, T{}, T{}};
}

template <class T>
struct is_jet : std::false_type {};
template <class T>
struct is_jet<Jet2<T>> : std::true_type {};
template <class T>
inline constexpr bool is_jet_v = is_jet<T>::value;

template <class T>
Jet2<T> operator+(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
}

template <class T>
Jet2<T> operator-(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
}

template <class T>
Jet2<T> operator-(const Jet2<T>& a) {
  return {-a.v, -a.d1, -a.d2};
}

template <class T>
Jet2<T> operator*(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.v * b.v,
          a.d1 * b.v + a.v * b.d1,
          a.d2 * b.v + 2.0 * (a.d1 * b.d1) + a.v * b.d2};
}

template <class T>
Jet2<T> operator/(const Jet2<T>& a, const Jet2<T>& b) {
  const T v = a.v / b.v;
  const T d1 = (a.d1 - v * b.d1) / b.v;
  const T d2 = (a.d2 - v * b.d2 - 2.0 * (d1 * b.d1)) / b.v;
  return {v, d1, d2};
}

// Jet-scalar combinations; the scalar is constant along the probe direction.
template <class T, class S> requires (!is_jet_v<S>)
Jet2<T> operator+(const Jet2<T>& a, const S& s) {
  return {a.v + s, a.d1, a.d2};
}
template <class T, class S> requires (!is_jet_v<S>)
Jet2<T> operator+(const S& s, const Jet2<T>& a) {
  return {s + a.v, a.d1, a.d2};
}
template <class T, class S> requires (!is_jet_v<S>)
Jet2<T> operator-(const Jet2<T>& a, const S& s) {
  return {a.v - s, a.d1, a.d2};
}
template <class T, class S> requires (!is_jet_v<S>)
Jet2<T> operator-(const S& s, const Jet2<T>& a) {
  return {s - a.v, -a.d1, -a.d2};
}
template <class T, class S> requires (!is_jet_v<S>)
Jet2<T> operator*(const Jet2<T>& a, const S& s) {
  return {a.v * s, a.d1 * s, a.d2 * s};
}
template <class T, class S> requires (!is_jet_v<S>)
Jet2<T> operator*(const S& s, const Jet2<T>& a) {
  return {s * a.v, s * a.d1, s * a.d2};
}
template <class T, class S> requires (!is_jet_v<S>)
Jet2<T> operator/(const Jet2<T>& a, const S& s) {
  return {a.v / s, a.d1 / s, a.d2 / s};
}
template <class T, class S> requires (!is_jet_v<S>)
Jet2<T> operator/(const S& s, const Jet2<T>& a) {
  return Jet2<T>{static_cast<T>(s), T{}, T{}} / a;
}

// Chain rule for one elementary function:
//   d1 = f'(v) a1,   d2 = f''(v) a1^2 + f'(v) a2.
template <class T>
Jet2<T> jet_fn(Fn f, const Jet2<T>& a, int pn = 0) {
  const T f0 = fn_val(f, 0, a.v, pn);
  const T f1 = fn_val(f, 1, a.v, pn);
  const T f2 = fn_val(f, 2, a.v, pn);
  return {f0, f1 * a.d1, f2 * (a.d1 * a.d1) + f1 * a.d2};
}

template <class T> Jet2<T> exp(const Jet2<T>& a) { return jet_fn(Fn::Exp, a); }
template <class T> Jet2<T> log(const Jet2<T>& a) { return jet_fn(Fn::Log, a); }
template <class T> Jet2<T> sin(const Jet2<T>& a) { return jet_fn(Fn::Sin, a); }
template <class T> Jet2<T> cos(const Jet2<T>& a) { return jet_fn(Fn::Cos, a); }
template <class T> Jet2<T> sqrt(const Jet2<T>& a) { return jet_fn(Fn::Sqrt, a); }
template <class T> Jet2<T> tanh(const Jet2<T>& a) { return jet_fn(Fn::Tanh, a); }
template <class T> Jet2<T> sigmoid(const Jet2<T>& a) { return jet_fn(Fn::Sigmoid, a); }
template <class T> Jet2<T> softplus(const Jet2<T>& a) { return jet_fn(Fn::Softplus, a); }
template <class T> Jet2<T> pow_int(const Jet2<T>& a, int n) { return jet_fn(Fn::PowInt, a, n); }

}  // namespace dann::ad
