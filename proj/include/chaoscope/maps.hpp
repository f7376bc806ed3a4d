#pragma once

// The quadratic family Q_a(x) = 1 - a x^2 and the Henon family
// H_{a,b}(x, y) = (1 - a x^2 + y, b x), with derivatives and orbit iteration.
//
// Evaluation order is fixed so that bitwise comparisons between families are
// meaningful:
//   quad_apply   : 1.0 - a * (x * x)
//   henon_apply  : (1.0 - a * (x * x)) + y,   b * x
//   derivatives  : (-2.0 * a) * x

#include <cmath>
#include <concepts>
#include <cstddef>
#include <vector>

namespace chaoscope {

inline constexpr double default_escape_radius = 10.0;
inline constexpr double default_henon_b0 = 0.4;

struct QuadraticParams {
  double a = 2.0;

  // 0 < a <= 2 is the window where classification runs are meaningful.
  bool in_classification_window() const noexcept { return a > 0.0 && a <= 2.0; }
};

struct HenonParams {
  double a = 1.4;
  double b = 0.3;

  bool in_classification_window(double b0 = default_henon_b0) const noexcept {
    return a > 0.0 && a <= 2.0 && std::abs(b) < b0;
  }
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Row-major 2x2 matrix.
struct Mat2 {
  double m00 = 0.0, m01 = 0.0;
  double m10 = 0.0, m11 = 0.0;

  double det() const noexcept { return m00 * m11 - m01 * m10; }

  Point2 operator*(Point2 v) const noexcept { return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y}; }

  Mat2 operator*(const Mat2& o) const noexcept {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
            m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
  }

  friend bool operator==(const Mat2&, const Mat2&) = default;
};

inline double norm(Point2 v) noexcept { return std::hypot(v.x, v.y); }

inline double quad_apply(QuadraticParams p, double x) noexcept { return 1.0 - p.a * (x * x); }

inline double quad_derivative(QuadraticParams p, double x) noexcept { return (-2.0 * p.a) * x; }

inline Point2 henon_apply(HenonParams p, Point2 z) noexcept {
  return {(1.0 - p.a * (z.x * z.x)) + z.y, p.b * z.x};
}

inline Mat2 henon_jacobian(HenonParams p, Point2 z) noexcept {
  return {(-2.0 * p.a) * z.x, 1.0, p.b, 0.0};
}

// Map adaptors consumed by the generic orbit machinery.
template <class M>
concept DynamicalMap = requires(const M& m, typename M::state_type s) {
  { m(s) } -> std::convertible_to<typename M::state_type>;
  { m.magnitude(s) } -> std::convertible_to<double>;
};

struct QuadraticMap {
  using state_type = double;
  QuadraticParams params;

  double operator()(double x) const noexcept { return quad_apply(params, x); }
  double derivative(double x) const noexcept { return quad_derivative(params, x); }
  double magnitude(double x) const noexcept { return std::abs(x); }
  static double distance(double x, double y) noexcept { return std::abs(x - y); }
};

struct HenonMap {
  using state_type = Point2;
  HenonParams params;

  Point2 operator()(Point2 z) const noexcept { return henon_apply(params, z); }
  Mat2 jacobian(Point2 z) const noexcept { return henon_jacobian(params, z); }
  double magnitude(Point2 z) const noexcept { return norm(z); }
  static double distance(Point2 u, Point2 v) noexcept { return std::hypot(u.x - v.x, u.y - v.y); }
};

template <class State>
struct OrbitState {
  State value{};
  std::size_t step = 0;
  bool escaped = false;
};

// Lazily produces the orbit of `start`. The first state is the start itself at
// step 0; once a state's magnitude exceeds the escape radius (or stops being
// finite) it is emitted with escaped = true and the stream ends.
template <DynamicalMap Map>
class OrbitStream {
 public:
  using state_type = typename Map::state_type;

  OrbitStream(Map map, state_type start, std::size_t n, double escape_radius = default_escape_radius)
      : map_(map), current_{start, 0, exceeds(map, start, escape_radius)}, n_(n), radius_(escape_radius) {}

  bool done() const noexcept { return finished_; }

  // Returns the next state; must not be called once done().
  OrbitState<state_type> next() {
    OrbitState<state_type> out = current_;
    if (out.escaped || out.step == n_) {
      finished_ = true;
    } else {
      state_type v = map_(current_.value);
      current_ = {v, current_.step + 1, exceeds(map_, v, radius_)};
    }
    return out;
  }

 private:
  static bool exceeds(const Map& m, const state_type& s, double radius) {
    double r = m.magnitude(s);
    return !(r <= radius);  // NaN counts as escaped
  }

  Map map_;
  OrbitState<state_type> current_;
  std::size_t n_;
  double radius_;
  bool finished_ = false;
};

template <DynamicalMap Map>
struct Orbit {
  std::vector<OrbitState<typename Map::state_type>> states;
  bool escaped = false;
};

// Collects up to n + 1 states (start plus n applications).
template <DynamicalMap Map>
Orbit<Map> iterate(const Map& map, typename Map::state_type start, std::size_t n,
                   double escape_radius = default_escape_radius) {
  Orbit<Map> orbit;
  OrbitStream<Map> stream(map, start, n, escape_radius);
  while (!stream.done()) {
    auto s = stream.next();
    orbit.escaped = orbit.escaped || s.escaped;
    orbit.states.push_back(s);
  }
  return orbit;
}

// Iterate the map n times without recording (n applications).
template <DynamicalMap Map>
typename Map::state_type advance(const Map& map, typename Map::state_type x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x = map(x);
  return x;
}

}  // namespace chaoscope
