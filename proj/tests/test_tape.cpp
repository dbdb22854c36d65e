#include <cmath>
#include <cstdint>
#include <vector>

#include "dann/tape.hpp"
#include "doctest.h"

namespace {

using dann::ad::Fn;
using dann::ad::Op;
using dann::ad::Rev;
using dann::ad::Tape;
using dann::ad::TapeScope;

}  // namespace

TEST_SUITE_BEGIN("tape");

TEST_CASE("recorded expression reproduces value and analytic gradient") {
  Tape t;
  TapeScope scope(t);
  const double av = 1.3, bv = -0.7;
  Rev a = t.leaf(av);
  Rev b = t.leaf(bv);
  Rev r = fn_val(Fn::Exp, 0, a) * fn_val(Fn::Sin, 0, b) + a / b;

  CHECK(r.v == doctest::Approx(std::exp(av) * std::sin(bv) + av / bv));

  std::vector<double> bar;
  t.backward(r.id, bar);
  CHECK(bar[static_cast<std::size_t>(a.id)] ==
        doctest::Approx(std::exp(av) * std::sin(bv) + 1.0 / bv));
  CHECK(bar[static_cast<std::size_t>(b.id)] ==
        doctest::Approx(std::exp(av) * std::cos(bv) - av / (bv * bv)));
}

TEST_CASE("replay after set_leaf matches a fresh recording bitwise") {
  auto build = [](Tape& t, double av, double bv) {
    TapeScope scope(t);
    Rev a = t.leaf(av);
    Rev b = t.leaf(bv);
    Rev s = fn_val(Fn::Tanh, 0, a * b) + fn_val(Fn::Sqrt, 0, b * b + Rev{1.0});
    return s / (a + Rev{2.0});
  };
  Tape t1;
  Rev r1 = build(t1, 0.4, -1.2);
  t1.set_leaf(0, 0.9);
  t1.set_leaf(1, 2.3);
  t1.replay();

  Tape t2;
  Rev r2 = build(t2, 0.9, 2.3);
  CHECK(t1.value(r1.id) == r2.v);

  // Gradients after replay also match the fresh tape.
  std::vector<double> g1, g2;
  t1.backward(r1.id, g1);
  t2.backward(r2.id, g2);
  CHECK(g1[0] == g2[0]);
  CHECK(g1[1] == g2[1]);
}

TEST_CASE("rewind truncates to the mark and the segment can be rebuilt") {
  Tape t;
  TapeScope scope(t);
  Rev a = t.leaf(2.0);
  auto m = t.mark();
  const std::size_t base = t.size();

  Rev r1 = a * a + Rev{3.0} * a;
  CHECK(t.size() > base);
  std::vector<double> bar;
  t.backward(r1.id, bar);
  CHECK(bar[0] == doctest::Approx(2.0 * 2.0 + 3.0));

  t.rewind(m);
  CHECK(t.size() == base);

  Rev r2 = fn_val(Fn::Exp, 0, a);
  t.backward(r2.id, bar);
  CHECK(bar[0] == doctest::Approx(std::exp(2.0)));
}

TEST_CASE("constant subexpressions fold without touching the tape") {
  Tape t;
  TapeScope scope(t);
  Rev x = t.leaf(1.5);
  const std::size_t n = t.size();

  Rev c = Rev{2.0} + Rev{3.0};
  CHECK(c.is_const());
  CHECK(c.v == 5.0);

  Rev z = Rev{0.25} * Rev{8.0} - Rev{1.0};
  CHECK(z.is_const());
  CHECK(z.v == 1.0);

  CHECK((Rev{0.0} + x).id == x.id);   // additive identity
  CHECK((x * Rev{1.0}).id == x.id);   // multiplicative identity
  CHECK(t.size() == n);               // nothing was recorded
}

TEST_CASE("squaring an alias accumulates both product adjoints") {
  Tape t;
  TapeScope scope(t);
  Rev x = t.leaf(-1.7);
  Rev y = x * x;
  std::vector<double> bar;
  t.backward(y.id, bar);
  CHECK(bar[0] == doctest::Approx(2.0 * -1.7));
}

TEST_CASE("affine node contracts a dense block and routes adjoints") {
  Tape t;
  TapeScope scope(t);
  const double xv[3] = {0.5, -1.0, 2.0};
  const double wv[3] = {3.0, 0.25, -1.5};
  Rev x0 = t.leaf(xv[0]);
  t.leaf(xv[1]);
  t.leaf(xv[2]);
  Rev w0 = t.leaf(wv[0]);
  t.leaf(wv[1]);
  t.leaf(wv[2]);

  Rev s = t.affine(x0.id, w0.id, 3);
  double want = 0.0;
  for (int i = 0; i < 3; ++i) want += wv[i] * xv[i];
  CHECK(s.v == want);

  std::vector<double> bar;
  t.backward(s.id, bar);
  for (int i = 0; i < 3; ++i) {
    CHECK(bar[static_cast<std::size_t>(x0.id + i)] == wv[i]);
    CHECK(bar[static_cast<std::size_t>(w0.id + i)] == xv[i]);
  }
}

TEST_CASE("weighted sum drops zero coefficients and keeps the rest") {
  Tape t;
  TapeScope scope(t);
  Rev a = t.leaf(1.0);
  Rev b = t.leaf(2.0);
  Rev c = t.leaf(3.0);
  const std::int32_t ids[3] = {a.id, b.id, c.id};
  const double coeffs[3] = {2.0, 0.0, -3.0};
  Rev s = t.wsum(ids, coeffs);
  CHECK(s.v == 2.0 * 1.0 - 3.0 * 3.0);

  std::vector<double> bar;
  t.backward(s.id, bar);
  CHECK(bar[static_cast<std::size_t>(a.id)] == 2.0);
  CHECK(bar[static_cast<std::size_t>(b.id)] == 0.0);
  CHECK(bar[static_cast<std::size_t>(c.id)] == -3.0);

  const double zeros[3] = {0.0, 0.0, 0.0};
  Rev z = t.wsum(ids, zeros);
  CHECK(z.is_const());
  CHECK(z.v == 0.0);
}

TEST_CASE("dot node sums pairwise products with symmetric adjoints") {
  Tape t;
  TapeScope scope(t);
  Rev a = t.leaf(1.5);
  Rev b = t.leaf(-2.0);
  Rev c = t.leaf(0.5);
  Rev d = t.leaf(4.0);
  const std::int32_t pairs[4] = {a.id, b.id, c.id, d.id};
  Rev s = t.dot(pairs);
  CHECK(s.v == 1.5 * -2.0 + 0.5 * 4.0);

  std::vector<double> bar;
  t.backward(s.id, bar);
  CHECK(bar[static_cast<std::size_t>(a.id)] == -2.0);
  CHECK(bar[static_cast<std::size_t>(b.id)] == 1.5);
  CHECK(bar[static_cast<std::size_t>(c.id)] == 4.0);
  CHECK(bar[static_cast<std::size_t>(d.id)] == 0.5);
}

TEST_CASE("detach blocks gradient flow but keeps the value") {
  Tape t;
  TapeScope scope(t);
  Rev x = t.leaf(0.8);
  Rev y = fn_val(Fn::Sin, 0, x);
  Rev frozen = detach(y);
  CHECK(frozen.is_const());
  CHECK(frozen.v == y.v);

  Rev r = frozen * x;
  std::vector<double> bar;
  t.backward(r.id, bar);
  CHECK(bar[0] == y.v);  // only the direct factor, no chain through sin
}

TEST_CASE("derivative-order nodes backpropagate through the next order") {
  // Record f''(x) for f = tanh as a k=2 node; its adjoint uses f'''(x).
  Tape t;
  TapeScope scope(t);
  const double xv = 0.37;
  Rev x = t.leaf(xv);
  Rev d2 = fn_val(Fn::Tanh, 2, x);
  std::vector<double> bar;
  t.backward(d2.id, bar);
  CHECK(bar[0] == doctest::Approx(dann::ad::fn_eval(Fn::Tanh, 3, xv, 0)));
}

TEST_CASE("replay refreshes transcendental auxiliaries") {
  Tape t;
  TapeScope scope(t);
  Rev x = t.leaf(0.3);
  Rev y = fn_val(Fn::Tanh, 0, x);
  t.set_leaf(0, -1.9);
  t.replay();
  CHECK(t.value(y.id) == std::tanh(-1.9));
  std::vector<double> bar;
  t.backward(y.id, bar);
  const double th = std::tanh(-1.9);
  CHECK(bar[0] == doctest::Approx(1.0 - th * th));
}

TEST_CASE("pin materializes constants and copy forwards adjoints") {
  Tape t;
  TapeScope scope(t);
  Rev k = t.pin(Rev{2.5});
  CHECK(!k.is_const());
  CHECK(t.value(k.id) == 2.5);

  Rev x = t.leaf(1.0);
  Rev y = t.copy(x);
  Rev r = y * k;
  std::vector<double> bar;
  t.backward(r.id, bar);
  CHECK(bar[static_cast<std::size_t>(x.id)] == 2.5);
}

TEST_SUITE_END();
