#include "divesim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace divesim::num {

namespace {

// 15-point Kronrod extension of 7-point Gauss, positive abscissae.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class T>
double vnorm(const T& v) {
  return std::abs(v);
}

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T>
Panel<T> gk15(const std::function<T(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  T kron = kWgk[7] * fv[7];
  T gauss = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kron += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  kron *= h;
  gauss *= h;
  double err = vnorm<T>(kron - gauss);
  // quadpack-style sharpening of the raw G-K difference
  err = std::min(err, 200.0 * err * std::sqrt(std::max(err, 1e-300)));
  return {a, b, kron, err};
}

template <class T>
T adaptive(const std::function<T(double)>& f, double a, double b,
           const std::vector<double>& breaks, const QuadOptions& opt) {
  if (a == b) return T{};
  std::priority_queue<Panel<T>> heap;
  T total{};
  double total_err = 0.0;
  double lo = a;
  std::vector<double> edges = breaks;
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  for (double e : edges) {
    if (e <= lo || e > b) continue;
    Panel<T> p = gk15<T>(f, lo, e);
    total += p.value;
    total_err += p.error;
    heap.push(p);
    lo = e;
  }
  int n = static_cast<int>(heap.size());
  while (total_err > opt.abs_tol + opt.rel_tol * vnorm<T>(total) &&
         n < opt.max_segments) {
    Panel<T> worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // interval exhausted
    Panel<T> left = gk15<T>(f, worst.a, mid);
    Panel<T> right = gk15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt) {
  return adaptive<double>(f, a, b, {}, opt);
}

cx integrate_cx(const std::function<cx(double)>& f, double a, double b,
                const QuadOptions& opt) {
  return adaptive<cx>(f, a, b, {}, opt);
}

double integrate_segmented(const std::function<double(double)>& f, double a,
                           double b, const std::vector<double>& breaks,
                           const QuadOptions& opt) {
  return adaptive<double>(f, a, b, breaks, opt);
}

cx integrate_segmented_cx(const std::function<cx(double)>& f, double a,
                          double b, const std::vector<double>& breaks,
                          const QuadOptions& opt) {
  return adaptive<cx>(f, a, b, breaks, opt);
}

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb, double xtol, double ftol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0))
    throw std::invalid_argument("brent_root: endpoints do not bracket a root");
  const double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double xm = 0.5 * (c - b);
    const double tol1 = 2.0 * eps * std::fabs(b) + 0.5 * xtol;
    if (std::fabs(xm) <= tol1 || fb == 0.0 || std::fabs(fb) <= ftol) return b;
    if (std::fabs(e) < tol1 || std::fabs(fa) <= std::fabs(fb)) {
      d = xm;
      e = d;
    } else {
      double p, q;
      const double s = fb / fa;
      if (a != c) {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      } else {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      }
      if (p > 0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q),
                             std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    }
    a = b;
    fa = fb;
    if (std::fabs(d) > tol1)
      b += d;
    else
      b += std::copysign(tol1, xm);
    fb = f(b);
  }
  return b;
}

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol, double ftol) {
  return brent_root(f, a, b, f(a), f(b), xtol, ftol);
}

double brent_minimize(const std::function<double(double)>& f, double a,
                      double b, double xtol, double* fmin) {
  const double gold = 0.3819660112501051;
  const double eps = std::sqrt(std::numeric_limits<double>::epsilon());
  double x = a + gold * (b - a), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double m = 0.5 * (a + b);
    const double tol = eps * std::fabs(x) + xtol;
    if (std::fabs(x - m) <= 2.0 * tol - 0.5 * (b - a)) break;
    double p = 0, q = 0, r = 0;
    if (std::fabs(e) > tol) {
      r = (x - w) * (fx - fv);
      q = (x - v) * (fx - fw);
      p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0) p = -p;
      q = std::fabs(q);
      const double e_old = e;
      e = d;
      if (std::fabs(p) < std::fabs(0.5 * q * e_old) && p > q * (a - x) &&
          p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < 2 * tol || b - u < 2 * tol) d = std::copysign(tol, m - x);
      } else {
        e = (x < m) ? b - x : a - x;
        d = gold * e;
      }
    } else {
      e = (x < m) ? b - x : a - x;
      d = gold * e;
    }
    const double u =
        (std::fabs(d) >= tol) ? x + d : x + std::copysign(tol, d);
    const double fu = f(u);
    if (fu <= fx) {
      if (u < x)
        b = x;
      else
        a = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  if (fmin) *fmin = fx;
  return x;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("fit_line: need at least 3 points");
  const size_t n = x.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.slope * x[i] - fit.intercept;
    ss_res += r * r;
  }
  fit.slope_stderr =
      std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx);
  return fit;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const size_t n = x_.size();
  if (n < 3 || y_.size() != n)
    throw std::invalid_argument("CubicSpline: need >= 3 matching points");
  for (size_t i = 1; i < n; ++i)
    if (x_[i] <= x_[i - 1])
      throw std::invalid_argument("CubicSpline: abscissae must increase");
  d2_.assign(n, 0.0);
  std::vector<double> u(n, 0.0);
  for (size_t i = 1; i + 1 < n; ++i) {
    const double sig = (x_[i] - x_[i - 1]) / (x_[i + 1] - x_[i - 1]);
    const double p = sig * d2_[i - 1] + 2.0;
    d2_[i] = (sig - 1.0) / p;
    u[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]) -
           (y_[i] - y_[i - 1]) / (x_[i] - x_[i - 1]);
    u[i] = (6.0 * u[i] / (x_[i + 1] - x_[i - 1]) - sig * u[i - 1]) / p;
  }
  d2_[n - 1] = 0.0;
  for (size_t k = n - 1; k-- > 0;) d2_[k] = d2_[k] * d2_[k + 1] + u[k];
}

double CubicSpline::operator()(double t) const {
  size_t lo = 0, hi = x_.size() - 1;
  if (t <= x_[0]) {
    hi = 1;
  } else if (t >= x_[hi]) {
    lo = hi - 1;
  } else {
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      if (x_[mid] > t)
        hi = mid;
      else
        lo = mid;
    }
  }
  const double h = x_[hi] - x_[lo];
  const double a = (x_[hi] - t) / h;
  const double b = (t - x_[lo]) / h;
  return a * y_[lo] + b * y_[hi] +
         ((a * a * a - a) * d2_[lo] + (b * b * b - b) * d2_[hi]) * h * h / 6.0;
}

void filon_moments(double theta, cx& m0, cx& m1, cx& m2) {
  if (std::fabs(theta) < 0.5) {
    // M_k = sum_n 2 (-i theta)^n / (n! (n+k+1)), n+k even
    m0 = m1 = m2 = 0.0;
    cx pow{1.0, 0.0};  // (-i theta)^n / n!
    const cx step = cx(0.0, -theta);
    for (int n = 0; n <= 24; ++n) {
      const double dn = static_cast<double>(n);
      if (n % 2 == 0) {
        m0 += pow * (2.0 / (dn + 1.0));
        m2 += pow * (2.0 / (dn + 3.0));
      } else {
        m1 += pow * (2.0 / (dn + 2.0));
      }
      pow *= step / (dn + 1.0);
      if (std::abs(pow) < 1e-18) break;
    }
    return;
  }
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double t2 = theta * theta;
  m0 = cx(2.0 * s / theta, 0.0);
  m1 = cx(0.0, 2.0 * (theta * c - s) / t2);
  m2 = cx(2.0 * ((t2 - 2.0) * s + 2.0 * theta * c) / (t2 * theta), 0.0);
}

void ramp_moments(double theta, cx& c0, cx& c1) {
  if (std::fabs(theta) < 0.5) {
    c0 = c1 = 0.0;
    cx pow{1.0, 0.0};
    const cx step = cx(0.0, -theta);
    for (int n = 0; n <= 24; ++n) {
      const double dn = static_cast<double>(n);
      c0 += pow / (dn + 1.0);
      c1 += pow / (dn + 2.0);
      pow *= step / (dn + 1.0);
      if (std::abs(pow) < 1e-18) break;
    }
    return;
  }
  const cx e = std::exp(cx(0.0, -theta));
  const cx it = cx(0.0, theta);
  c0 = (1.0 - e) / it;
  c1 = cx(0.0, 1.0) * e / theta - (1.0 - e) / (theta * theta);
}

}  // namespace divesim::num
