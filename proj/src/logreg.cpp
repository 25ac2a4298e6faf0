#include "eegdec/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eegdec {

namespace {

// log(1 + exp(-m)) without overflow for large |m|.
double log1p_exp_neg(double m) {
  if (m >= 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

void check_inputs(const Matrix& X, const std::vector<int>& y) {
  if (X.rows != y.size())
    throw std::runtime_error("fit: " + std::to_string(X.rows) + " rows vs " +
                             std::to_string(y.size()) + " labels");
  if (X.rows < 2 || X.cols < 1) throw std::runtime_error("fit: need n >= 2 and d >= 1");
  bool any0 = false, any1 = false;
  for (int v : y) {
    if (v == 0) any0 = true;
    else if (v == 1) any1 = true;
    else throw std::runtime_error("fit: labels must be 0 or 1");
  }
  if (!any0 || !any1) throw std::runtime_error("fit: single-class input");
  for (double v : X.data)
    if (!std::isfinite(v)) throw std::runtime_error("fit: non-finite feature value");
}

struct SmoothEval {
  double value = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

// Value and gradient of the smooth logistic part at (w, b).
SmoothEval eval_smooth(const Matrix& X, const std::vector<int>& y,
                       const std::vector<double>& w, double b) {
  const std::size_t n = X.rows, d = X.cols;
  SmoothEval out;
  out.grad_w.assign(d, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = X.row(i);
    double z = b;
    for (std::size_t j = 0; j < d; ++j) z += w[j] * xi[j];
    const double yt = y[i] == 1 ? 1.0 : -1.0;
    const double m = yt * z;
    out.value += log1p_exp_neg(m);
    // d/dz log(1+exp(-yt z)) = -yt * sigma(-yt z)
    const double coef = -yt * sigmoid(-m) * inv_n;
    for (std::size_t j = 0; j < d; ++j) out.grad_w[j] += coef * xi[j];
    out.grad_b += coef;
  }
  out.value *= inv_n;
  return out;
}

double smooth_value(const Matrix& X, const std::vector<int>& y,
                    const std::vector<double>& w, double b) {
  const std::size_t n = X.rows, d = X.cols;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = X.row(i);
    double z = b;
    for (std::size_t j = 0; j < d; ++j) z += w[j] * xi[j];
    const double yt = y[i] == 1 ? 1.0 : -1.0;
    acc += log1p_exp_neg(yt * z);
  }
  return acc / static_cast<double>(n);
}

LogRegModel fit_standardized(const Matrix& X, const std::vector<int>& y,
                             const FitConfig& cfg, std::vector<double>* trace) {
  const std::size_t d = X.cols;

  std::vector<double> w(d, 0.0);
  double b = 0.0;
  if (cfg.init_jitter > 0.0) {
    Rng rng(cfg.rng_seed);
    for (double& v : w) v = cfg.init_jitter * (2.0 * rng.uniform() - 1.0);
    b = cfg.init_jitter * (2.0 * rng.uniform() - 1.0);
  }

  SmoothEval cur = eval_smooth(X, y, w, b);
  auto l1 = [&](const std::vector<double>& ww) {
    double s = 0.0;
    for (double v : ww) s += std::abs(v);
    return s;
  };
  if (trace) {
    trace->clear();
    trace->push_back(cur.value + cfg.lambda * l1(w));
  }

  double step = 1.0;
  std::vector<double> w_next(d);
  LogRegModel model;
  model.lambda = cfg.lambda;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    double b_next = 0.0;
    double g_next = 0.0;
    // Backtrack until the quadratic upper bound at the current point holds;
    // this guarantees the full objective never increases.
    for (;;) {
      for (std::size_t j = 0; j < d; ++j)
        w_next[j] = soft_threshold(w[j] - step * cur.grad_w[j], cfg.lambda * step);
      b_next = b - step * cur.grad_b;
      g_next = smooth_value(X, y, w_next, b_next);
      double quad = cur.value, sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double dj = w_next[j] - w[j];
        quad += cur.grad_w[j] * dj;
        sq += dj * dj;
      }
      const double db = b_next - b;
      quad += cur.grad_b * db;
      sq += db * db;
      quad += sq / (2.0 * step);
      if (g_next <= quad + 1e-15 || step < 1e-18) break;
      step *= 0.5;
    }

    double max_delta = std::abs(b_next - b);
    for (std::size_t j = 0; j < d; ++j)
      max_delta = std::max(max_delta, std::abs(w_next[j] - w[j]));

    std::swap(w, w_next);
    b = b_next;
    model.n_iter_run = iter + 1;
    cur = eval_smooth(X, y, w, b);
    if (trace) trace->push_back(cur.value + cfg.lambda * l1(w));

    if (max_delta / step <= cfg.tol) {
      model.converged = true;
      break;
    }
    // Let the step recover after conservative backtracks.
    step = std::min(step * 1.25, 1.0e4);
  }

  model.weights = std::move(w);
  model.intercept = b;
  return model;
}

}  // namespace

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logreg_objective(const Matrix& X, const std::vector<int>& y,
                        const std::vector<double>& w, double b, double lambda) {
  double penalty = 0.0;
  for (double v : w) penalty += std::abs(v);
  return smooth_value(X, y, w, b) + lambda * penalty;
}

void logreg_smooth_gradient(const Matrix& X, const std::vector<int>& y,
                            const std::vector<double>& w, double b,
                            std::vector<double>& grad_w, double& grad_b) {
  SmoothEval e = eval_smooth(X, y, w, b);
  grad_w = std::move(e.grad_w);
  grad_b = e.grad_b;
}

LogRegModel fit(const Matrix& X, const std::vector<int>& y, const FitConfig& cfg,
                std::vector<double>* objective_trace) {
  check_inputs(X, y);
  if (cfg.max_iter < 1) throw std::runtime_error("fit: max_iter must be >= 1");
  if (!(cfg.tol > 0.0)) throw std::runtime_error("fit: tol must be > 0");
  if (cfg.lambda < 0.0) throw std::runtime_error("fit: lambda must be >= 0");

  if (!cfg.standardize) return fit_standardized(X, y, cfg, objective_trace);

  const std::size_t n = X.rows, d = X.cols;
  std::vector<double> mu(d, 0.0), sd(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = X.row(i);
    for (std::size_t j = 0; j < d; ++j) mu[j] += xi[j];
  }
  for (std::size_t j = 0; j < d; ++j) mu[j] /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = X.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double dv = xi[j] - mu[j];
      sd[j] += dv * dv;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
    if (sd[j] < 1e-12) sd[j] = 1.0;  // constant column: centered to zero, weight stays 0
  }

  Matrix Z(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = X.row(i);
    double* zi = Z.row(i);
    for (std::size_t j = 0; j < d; ++j) zi[j] = (xi[j] - mu[j]) / sd[j];
  }

  LogRegModel model = fit_standardized(Z, y, cfg, objective_trace);
  // Map back: w.z + b == (w/sd).x + (b - sum w*mu/sd). Dividing by sd keeps
  // exact zeros exact.
  double shift = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    shift += model.weights[j] * mu[j] / sd[j];
    model.weights[j] /= sd[j];
  }
  model.intercept -= shift;
  return model;
}

std::vector<double> predict_proba(const LogRegModel& model, const Matrix& X) {
  if (X.cols != model.weights.size())
    throw std::runtime_error("predict_proba: model has " +
                             std::to_string(model.weights.size()) + " weights, input has " +
                             std::to_string(X.cols) + " features");
  std::vector<double> out(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double* xi = X.row(i);
    double z = model.intercept;
    for (std::size_t j = 0; j < X.cols; ++j) z += model.weights[j] * xi[j];
    out[i] = sigmoid(z);
  }
  return out;
}

std::vector<bool> nonzero_support(const LogRegModel& model) {
  std::vector<bool> out(model.weights.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = model.weights[j] != 0.0;
  return out;
}

std::vector<std::size_t> oversample_indices(const std::vector<int>& y, Rng& rng) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
  std::vector<std::size_t> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = i;
  if (pos.empty() || neg.empty() || pos.size() == neg.size()) return out;
  const auto& minority = pos.size() < neg.size() ? pos : neg;
  const std::size_t deficit =
      (pos.size() < neg.size() ? neg.size() : pos.size()) - minority.size();
  for (std::size_t k = 0; k < deficit; ++k)
    out.push_back(minority[rng.uniform_int(minority.size())]);
  return out;
}

}  // namespace eegdec
