#ifndef GRAPHNLS_ANALYTIC_HPP
#define GRAPHNLS_ANALYTIC_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

namespace graphnls {

/// Problem data for u'' + |u|^{p-2} u = lambda u.
struct ProblemParams {
  double lambda = 1.0;
  double p = 4.0;

  double kappa() const { return 0.5 - 1.0 / p; }

  void validate() const {
    if (!(p > 2.0)) throw std::invalid_argument("p must exceed 2");
    if (!std::isfinite(lambda)) throw std::invalid_argument("lambda not finite");
  }

  void require_positive_lambda() const {
    validate();
    if (!(lambda > 0.0))
      throw std::invalid_argument("lambda must be positive here");
  }
};

namespace quadrature {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

// Odd-index Kronrod nodes are the embedded Gauss-7 nodes (index 7 = center).
template <typename F>
Estimate gk15(const F& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    double x = h * kXgk[i];
    double fv = (i == 7) ? f(c) : f(c - x) + f(c + x);
    resk += kWgk[i] * fv;
    if (i % 2 == 1) resg += kWg[i / 2] * fv;
  }
  return Estimate{resk * h, std::abs(resk - resg) * std::abs(h)};
}

/// Adaptive bisection with Gauss-Kronrod panels.
template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-12,
                 int max_depth = 30) {
  struct Rec {
    const F& f;
    double tol_scale;
    double run(double a, double b, const Estimate& e, int depth) const {
      if (depth <= 0 || e.error <= tol_scale * std::abs(e.value) ||
          e.error <= 1e-300)
        return e.value;
      double m = 0.5 * (a + b);
      Estimate l = gk15(f, a, m), r = gk15(f, m, b);
      return run(a, m, l, depth - 1) + run(m, b, r, depth - 1);
    }
  };
  Rec rec{f, rel_tol};
  return rec.run(a, b, gk15(f, a, b), max_depth);
}

}  // namespace quadrature

/// The positive even localized solution on the real line:
///   phi(x) = A sech^{2/(p-2)}( (p-2) sqrt(lambda) x / 2 ),
/// with peak A = (p lambda / 2)^{1/(p-2)} and far-field decay rate
/// sqrt(lambda).
class Soliton {
 public:
  Soliton(double lambda, double p) : lambda_(lambda), p_(p) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("soliton requires lambda > 0");
    if (!(p > 2.0)) throw std::invalid_argument("soliton requires p > 2");
    amplitude_ = std::pow(p * lambda / 2.0, 1.0 / (p - 2.0));
    width_exponent_ = 2.0 / (p - 2.0);
    argument_rate_ = 0.5 * (p - 2.0) * std::sqrt(lambda);
  }

  explicit Soliton(const ProblemParams& params)
      : Soliton(params.lambda, params.p) {}

  double operator()(double x) const {
    // sech^w(z) computed through exp to stay finite for large |z|.
    double z = argument_rate_ * std::abs(x);
    double sech = 2.0 / (std::exp(z) + std::exp(-z));
    return amplitude_ * std::pow(sech, width_exponent_);
  }

  double amplitude() const { return amplitude_; }
  double decay_rate() const { return std::sqrt(lambda_); }
  double width_exponent() const { return width_exponent_; }
  double lambda() const { return lambda_; }
  double p() const { return p_; }

  /// Half-width of the window outside which the p-th power tail is below
  /// any practical tolerance.
  double support_radius() const { return 40.0 / ((p_ - 2.0) * decay_rate()); }

 private:
  double lambda_, p_;
  double amplitude_, width_exponent_, argument_rate_;
};

/// Ground-state action level on the real line: kappa * ||phi||_p^p, by
/// quadrature of the closed form. Scales as lambda^{(p+2)/(2(p-2))}.
inline double s_level(double lambda, double p) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("s_level requires lambda > 0");
  Soliton phi(lambda, p);
  double X = phi.support_radius();
  double integral = 2.0 * quadrature::integrate(
                              [&](double x) { return std::pow(phi(x), p); },
                              0.0, X, 1e-13);
  // Tail bound: phi(x)^p <= A^p 2^{p w} e^{-p sqrt(lambda) x} for x >= X.
  double w = phi.width_exponent();
  double tail = std::pow(phi.amplitude(), p) * std::pow(2.0, p * w) *
                std::exp(-p * std::sqrt(lambda) * X) /
                (p * std::sqrt(lambda));
  integral += 2.0 * tail;
  double kappa = 0.5 - 1.0 / p;
  return kappa * integral;
}

inline double s_level(const ProblemParams& params) {
  return s_level(params.lambda, params.p);
}

/// Comparison constants used by the classifier and the acceptance suite.
struct Thresholds {
  double s = 0.0;         // line level
  double half_s = 0.0;    // half-line level, lower bound for graphs with one
  double double_s = 0.0;  // twice the line level
  /// Upper bound for the nodal level given a measured ground level.
  double s_plus(double inf_N) const { return s + inf_N; }
};

inline Thresholds thresholds(double lambda, double p) {
  double s = s_level(lambda, p);
  return Thresholds{s, 0.5 * s, 2.0 * s};
}

inline Thresholds thresholds(const ProblemParams& params) {
  return thresholds(params.lambda, params.p);
}

/// Smallest eigenvalue of -d^2/dx^2 on a length-L segment with one Dirichlet
/// and one free end; reference value for eigensolver validation.
inline double dirichlet_free_segment_eigenvalue(double L) {
  double k = M_PI / (2.0 * L);
  return k * k;
}

}  // namespace graphnls

#endif  // GRAPHNLS_ANALYTIC_HPP
