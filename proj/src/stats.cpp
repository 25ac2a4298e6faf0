#include "eegdec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "eegdec/rng.hpp"

namespace eegdec {

namespace {

void check_two_classes(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw std::runtime_error("auc: " + std::to_string(scores.size()) + " scores vs " +
                             std::to_string(labels.size()) + " labels");
  if (scores.empty()) throw std::runtime_error("auc: empty input");
  bool any0 = false, any1 = false;
  for (int y : labels) {
    if (y == 0) any0 = true;
    else if (y == 1) any1 = true;
    else throw std::runtime_error("auc: labels must be 0 or 1");
  }
  if (!any0 || !any1) throw std::runtime_error("auc: only one class present");
}

// Average ranks (1-based); ties share the mean of the ranks they occupy.
// Midranks are multiples of 0.5, so the rank sums below are exact in double.
std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double auc_unchecked(const std::vector<double>& scores, const std::vector<int>& labels) {
  const std::vector<double> ranks = average_ranks(scores);
  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      rank_sum_pos += ranks[i];
      ++n_pos;
    }
  }
  const std::size_t n_neg = labels.size() - n_pos;
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                                      static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::runtime_error("correlation undefined (zero variance)");
  return sxy / std::sqrt(sxx * syy);
}

// Continued fraction for I_x(a,b), modified Lentz iteration.
double beta_cf(double a, double b, double x) {
  constexpr int max_iter = 300;
  constexpr double eps = 3e-15;
  constexpr double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double md = static_cast<double>(m);
    double aa = md * (b - md) * x / ((qam + 2.0 * md) * (a + 2.0 * md));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + 2.0 * md) * (qap + 2.0 * md));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::runtime_error("incomplete_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        b * std::log1p(-x) + a * std::log(x)) *
                   beta_cf(b, a, 1.0 - x) / b;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_two_classes(scores, labels);
  return auc_unchecked(scores, labels);
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& scores,
                                       const std::vector<int>& labels, int n_boot,
                                       std::uint64_t rng_seed) {
  check_two_classes(scores, labels);
  if (n_boot < 1) throw std::runtime_error("bootstrap_ci: n_boot must be >= 1");
  const std::size_t n = scores.size();
  std::vector<double> aucs(static_cast<std::size_t>(n_boot));
  std::vector<double> s(n);
  std::vector<int> y(n);
  for (int b = 0; b < n_boot; ++b) {
    // One stream per draw: redraws on degenerate resamples stay inside the
    // draw's own stream, so draw b never depends on other draws.
    Rng rng(seed_mix(rng_seed, static_cast<std::uint64_t>(b)));
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 10000)
        throw std::runtime_error("bootstrap_ci: cannot draw a two-class resample");
      bool any0 = false, any1 = false;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = rng.uniform_int(n);
        s[i] = scores[j];
        y[i] = labels[j];
        (y[i] == 1 ? any1 : any0) = true;
      }
      if (any0 && any1) break;
    }
    aucs[static_cast<std::size_t>(b)] = auc_unchecked(s, y);
  }
  std::sort(aucs.begin(), aucs.end());
  auto nearest_rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(n_boot)));
    return aucs[std::min(std::max<std::size_t>(idx, 1), aucs.size()) - 1];
  };
  return {nearest_rank(0.025), nearest_rank(0.975)};
}

double perm_test_vs_chance(const std::vector<double>& scores,
                           const std::vector<int>& labels, int n_perm,
                           std::uint64_t rng_seed) {
  check_two_classes(scores, labels);
  if (n_perm < 1) throw std::runtime_error("perm_test_vs_chance: n_perm must be >= 1");
  const double observed = auc_unchecked(scores, labels);
  int count = 0;
  std::vector<int> y = labels;
  for (int p = 0; p < n_perm; ++p) {
    Rng rng(seed_mix(rng_seed, static_cast<std::uint64_t>(p)));
    y = labels;
    rng.shuffle(y);
    if (auc_unchecked(scores, y) >= observed) ++count;
  }
  return static_cast<double>(1 + count) / static_cast<double>(1 + n_perm);
}

double perm_test_vs_chance_exact(const std::vector<double>& scores,
                                 const std::vector<int>& labels) {
  check_two_classes(scores, labels);
  const std::size_t n = scores.size();
  if (n > 20) throw std::runtime_error("perm_test_vs_chance_exact: n too large to enumerate");
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const double observed = auc_unchecked(scores, labels);

  // Walk every n-choose-n_pos placement of the positive labels.
  std::vector<std::size_t> comb(n_pos);
  std::iota(comb.begin(), comb.end(), std::size_t{0});
  std::vector<int> y(n);
  long long total = 0, count = 0;
  for (;;) {
    std::fill(y.begin(), y.end(), 0);
    for (std::size_t i : comb) y[i] = 1;
    ++total;
    if (auc_unchecked(scores, y) >= observed) ++count;
    // Next combination in lexicographic order.
    std::size_t k = n_pos;
    while (k > 0 && comb[k - 1] == n - n_pos + k - 1) --k;
    if (k == 0) break;
    ++comb[k - 1];
    for (std::size_t j = k; j < n_pos; ++j) comb[j] = comb[j - 1] + 1;
  }
  // No plus-one here: the enumeration already contains the observed
  // assignment, so count >= 1 and this is the sampled test's n_perm limit.
  return static_cast<double>(count) / static_cast<double>(total);
}

AucWithCi auc_with_ci(const std::vector<double>& scores, const std::vector<int>& labels,
                      int n_boot, int n_perm, std::uint64_t rng_seed) {
  AucWithCi out;
  out.auc = auc(scores, labels);
  const auto [lo, hi] = bootstrap_ci(scores, labels, n_boot, seed_mix(rng_seed, 1));
  out.ci_lo = std::min(lo, out.auc);
  out.ci_hi = std::max(hi, out.auc);
  out.p_vs_chance = perm_test_vs_chance(scores, labels, n_perm, seed_mix(rng_seed, 2));
  out.n_boot = n_boot;
  out.n_perm = n_perm;
  return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::runtime_error("spearman: length mismatch");
  if (x.size() < 3) throw std::runtime_error("spearman: need at least 3 pairs");
  return pearson(average_ranks(x), average_ranks(y));
}

double spearman_perm_p(const std::vector<double>& x, const std::vector<double>& y,
                       int n_perm, std::uint64_t rng_seed) {
  const double observed = std::abs(spearman(x, y));
  int count = 0;
  std::vector<double> yp = y;
  for (int p = 0; p < n_perm; ++p) {
    Rng rng(seed_mix(rng_seed, static_cast<std::uint64_t>(p)));
    yp = y;
    rng.shuffle(yp);
    double rho;
    try {
      rho = spearman(x, yp);
    } catch (const std::exception&) {
      rho = 0.0;  // permuted ranks degenerate; count as a null value at 0
    }
    if (std::abs(rho) >= observed) ++count;
  }
  return static_cast<double>(1 + count) / static_cast<double>(1 + n_perm);
}

double perm_compare_correlations(const std::vector<double>& pred,
                                 const std::vector<double>& q1,
                                 const std::vector<double>& q2, int n_perm,
                                 std::uint64_t rng_seed) {
  if (pred.size() != q1.size() || pred.size() != q2.size())
    throw std::runtime_error("perm_compare_correlations: length mismatch");
  const double observed = std::abs(spearman(pred, q1) - spearman(pred, q2));
  int count = 0;
  const std::size_t n = pred.size();
  std::vector<double> a(n), b(n);
  for (int p = 0; p < n_perm; ++p) {
    Rng rng(seed_mix(rng_seed, static_cast<std::uint64_t>(p)));
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.coin()) {
        a[i] = q2[i];
        b[i] = q1[i];
      } else {
        a[i] = q1[i];
        b[i] = q2[i];
      }
    }
    const double delta = std::abs(spearman(pred, a) - spearman(pred, b));
    if (delta >= observed) ++count;
  }
  return static_cast<double>(1 + count) / static_cast<double>(1 + n_perm);
}

std::vector<TTestResult> ttest_bonferroni(
    const std::vector<std::vector<double>>& groups,
    const std::vector<std::pair<std::size_t, std::size_t>>& comparisons) {
  auto mean_var = [](const std::vector<double>& g) {
    if (g.size() < 2) throw std::runtime_error("ttest: group needs n >= 2");
    const auto n = static_cast<double>(g.size());
    double m = 0.0;
    for (double v : g) m += v;
    m /= n;
    double s2 = 0.0;
    for (double v : g) s2 += (v - m) * (v - m);
    s2 /= (n - 1.0);
    return std::pair<double, double>{m, s2};
  };

  std::vector<TTestResult> out;
  const auto n_comp = static_cast<double>(comparisons.size());
  for (const auto& [ia, ib] : comparisons) {
    if (ia >= groups.size() || ib >= groups.size())
      throw std::runtime_error("ttest_bonferroni: comparison index out of range");
    const auto [m1, v1] = mean_var(groups[ia]);
    const auto [m2, v2] = mean_var(groups[ib]);
    const double n1 = static_cast<double>(groups[ia].size());
    const double n2 = static_cast<double>(groups[ib].size());
    const double se2 = v1 / n1 + v2 / n2;
    TTestResult r;
    r.group_a = ia;
    r.group_b = ib;
    if (se2 == 0.0) {
      // Both groups constant: identical means give p = 1, different means
      // give an infinite statistic and p = 0 in the limit.
      r.t = (m1 == m2) ? 0.0 : std::numeric_limits<double>::infinity() * (m1 > m2 ? 1 : -1);
      r.df = n1 + n2 - 2.0;
      r.p_raw = (m1 == m2) ? 1.0 : 0.0;
    } else {
      r.t = (m1 - m2) / std::sqrt(se2);
      r.df = se2 * se2 /
             ((v1 / n1) * (v1 / n1) / (n1 - 1.0) + (v2 / n2) * (v2 / n2) / (n2 - 1.0));
      const double x = r.df / (r.df + r.t * r.t);
      r.p_raw = incomplete_beta(0.5 * r.df, 0.5, x);
    }
    r.p_adj = std::min(1.0, r.p_raw * n_comp);
    r.significant = r.p_adj <= 0.05;
    out.push_back(r);
  }
  return out;
}

}  // namespace eegdec
