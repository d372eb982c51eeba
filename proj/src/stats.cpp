#include "stkde/stats.hpp"

#include <cmath>
#include <limits>

namespace stkde {

namespace stats_detail {

namespace {

// Continued fraction for the incomplete beta, evaluated with the modified
// Lentz algorithm. Converges quickly for x < (a + 1) / (a + b + 2).
Scalar beta_continued_fraction(Scalar a, Scalar b, Scalar x) {
  constexpr Scalar tiny = 1e-300;
  constexpr Scalar eps = 1e-15;
  constexpr int max_iterations = 500;

  Scalar c = 1.0;
  Scalar d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  Scalar h = d;

  for (int m = 1; m <= max_iterations; ++m) {
    const Scalar fm = static_cast<Scalar>(m);
    // even step
    Scalar numerator = fm * (b - fm) * x / ((a + 2.0 * fm - 1.0) * (a + 2.0 * fm));
    d = 1.0 + numerator * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + numerator / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    // odd step
    numerator = -(a + fm) * (a + b + fm) * x / ((a + 2.0 * fm) * (a + 2.0 * fm + 1.0));
    d = 1.0 + numerator * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + numerator / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const Scalar delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) {
      break;
    }
  }
  return h;
}

}  // namespace

Scalar regularized_incomplete_beta(Scalar a, Scalar b, Scalar x) {
  if (!(a > 0) || !(b > 0)) {
    throw std::invalid_argument("regularized_incomplete_beta: a and b must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  const Scalar log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const Scalar front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

Scalar f_survival(Scalar f, Scalar df1, Scalar df2) {
  if (f <= 0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

Scalar t_two_sided(Scalar t, Scalar df) {
  if (t == 0) return 1.0;
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

}  // namespace stats_detail

namespace {

struct Moments {
  Scalar n = 0;
  Scalar mean = 0;
  Scalar ss = 0;  // sum of squared deviations from the mean

  Scalar variance() const { return ss / (n - 1); }
};

Moments moments_of(const std::vector<Scalar>& values) {
  Moments m;
  m.n = static_cast<Scalar>(values.size());
  for (Scalar v : values) m.mean += v;
  m.mean /= m.n;
  for (Scalar v : values) m.ss += (v - m.mean) * (v - m.mean);
  return m;
}

}  // namespace

TestResult anova_one_way(const std::vector<std::vector<Scalar>>& groups) {
  if (groups.size() < 2) {
    throw ValidationError("anova_one_way: needs at least two groups");
  }
  Scalar total_n = 0;
  Scalar grand_sum = 0;
  std::vector<Moments> per_group;
  per_group.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.size() < 2) {
      throw ValidationError("anova_one_way: every group needs at least two values");
    }
    per_group.push_back(moments_of(g));
    total_n += per_group.back().n;
    grand_sum += per_group.back().mean * per_group.back().n;
  }
  const Scalar grand_mean = grand_sum / total_n;
  const Scalar k = static_cast<Scalar>(groups.size());

  Scalar ssb = 0;
  Scalar ssw = 0;
  for (const Moments& m : per_group) {
    ssb += m.n * (m.mean - grand_mean) * (m.mean - grand_mean);
    ssw += m.ss;
  }
  const Scalar df1 = k - 1;
  const Scalar df2 = total_n - k;
  const Scalar msb = ssb / df1;
  const Scalar msw = ssw / df2;

  if (msw == 0.0) {
    if (msb == 0.0) {
      return {0.0, 1.0};
    }
    return {std::numeric_limits<Scalar>::infinity(), 0.0};
  }
  const Scalar f = msb / msw;
  return {f, stats_detail::f_survival(f, df1, df2)};
}

TestResult welch_t_test(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw ValidationError("welch_t_test: both samples need at least two values");
  }
  const Moments ma = moments_of(a);
  const Moments mb = moments_of(b);
  const Scalar va = ma.variance() / ma.n;
  const Scalar vb = mb.variance() / mb.n;
  const Scalar diff = ma.mean - mb.mean;

  if (va + vb == 0.0) {
    if (diff == 0.0) {
      return {0.0, 1.0};
    }
    return {std::copysign(std::numeric_limits<Scalar>::infinity(), diff), 0.0};
  }
  const Scalar t = diff / std::sqrt(va + vb);
  const Scalar df = (va + vb) * (va + vb) /
                    (va * va / (ma.n - 1) + vb * vb / (mb.n - 1));
  return {t, stats_detail::t_two_sided(t, df)};
}

}  // namespace stkde
