#pragma once

#include <array>
#include <cmath>

namespace contdef {

/// Truncated Taylor series about a point: coeff[k] = f^(k)(t0)/k!.
/// Order 4 is enough for everything the snap-level planner needs; all
/// trajectory derivative chains run through this type so the chain rule
/// never has to be written out by hand.
template <int Order>
struct Jet {
  std::array<double, Order + 1> coeff{};

  Jet() = default;
  explicit Jet(double value) { coeff[0] = value; }

  static Jet variable(double value) {
    Jet j;
    j.coeff[0] = value;
    if constexpr (Order >= 1) j.coeff[1] = 1.0;
    return j;
  }

  double value() const { return coeff[0]; }

  double derivative(int order) const {
    double factorial = 1.0;
    for (int k = 2; k <= order; ++k) factorial *= k;
    return coeff[static_cast<size_t>(order)] * factorial;
  }

  Jet operator-() const {
    Jet r;
    for (int k = 0; k <= Order; ++k) r.coeff[k] = -coeff[k];
    return r;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= Order; ++k) r.coeff[k] = a.coeff[k] + b.coeff[k];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= Order; ++k) r.coeff[k] = a.coeff[k] - b.coeff[k];
    return r;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= Order; ++k)
      for (int j = 0; j <= k; ++j) r.coeff[k] += a.coeff[j] * b.coeff[k - j];
    return r;
  }
  friend Jet operator*(double s, const Jet& a) {
    Jet r;
    for (int k = 0; k <= Order; ++k) r.coeff[k] = s * a.coeff[k];
    return r;
  }
  friend Jet operator*(const Jet& a, double s) { return s * a; }
  friend Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.coeff[0] += s;
    return r;
  }
  friend Jet operator+(double s, const Jet& a) { return a + s; }
  friend Jet operator-(const Jet& a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }

  Jet& operator+=(const Jet& b) { return *this = *this + b; }
  Jet& operator-=(const Jet& b) { return *this = *this - b; }
  Jet& operator*=(const Jet& b) { return *this = *this * b; }
};

/// sin/cos share the coupled recurrence s' = c g', c' = -s g'.
template <int Order>
void sincos(const Jet<Order>& g, Jet<Order>& s, Jet<Order>& c) {
  s.coeff.fill(0.0);
  c.coeff.fill(0.0);
  s.coeff[0] = std::sin(g.coeff[0]);
  c.coeff[0] = std::cos(g.coeff[0]);
  for (int k = 1; k <= Order; ++k) {
    double sk = 0.0, ck = 0.0;
    for (int j = 1; j <= k; ++j) {
      sk += j * g.coeff[j] * c.coeff[k - j];
      ck -= j * g.coeff[j] * s.coeff[k - j];
    }
    s.coeff[k] = sk / k;
    c.coeff[k] = ck / k;
  }
}

template <int Order>
Jet<Order> sin(const Jet<Order>& g) {
  Jet<Order> s, c;
  sincos(g, s, c);
  return s;
}

template <int Order>
Jet<Order> cos(const Jet<Order>& g) {
  Jet<Order> s, c;
  sincos(g, s, c);
  return c;
}

using Jet4 = Jet<4>;

}  // namespace contdef
