#include "gridcast/models/arima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridcast/error.hpp"

namespace gridcast {

std::vector<double> difference(std::span<const double> values, std::size_t d) {
  std::vector<double> w(values.begin(), values.end());
  for (std::size_t k = 0; k < d; ++k) {
    if (w.size() < 2) return {};
    for (std::size_t i = 0; i + 1 < w.size(); ++i) w[i] = w[i + 1] - w[i];
    w.pop_back();
  }
  return w;
}

std::vector<double> arma_residuals(std::span<const double> w, const ArimaCoefficients& coef) {
  const std::size_t p = coef.ar.size(), q = coef.ma.size();
  std::vector<double> e(w.size(), 0.0);
  for (std::size_t t = p; t < w.size(); ++t) {
    double v = w[t] - coef.constant;
    for (std::size_t i = 0; i < p; ++i) v -= coef.ar[i] * w[t - 1 - i];
    for (std::size_t j = 0; j < q && j < t; ++j) v -= coef.ma[j] * e[t - 1 - j];
    e[t] = v;
  }
  return e;
}

namespace {

// Solves A x = b in place (Gaussian elimination, partial pivoting); false
// when A is numerically singular.
bool solve(std::vector<double> a, std::vector<double> b, std::size_t n, std::vector<double>& x) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < 1e-300) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    for (std::size_t c = i + 1; c < n; ++c) v -= a[i * n + c] * x[c];
    x[i] = v / a[i * n + i];
  }
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

// Ordinary least squares of y on the rows of X (row-major, n x m).
bool least_squares(const std::vector<double>& X, const std::vector<double>& y, std::size_t m,
                   std::vector<double>& beta) {
  const std::size_t n = y.size();
  std::vector<double> xtx(m * m, 0.0), xty(m, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = X.data() + r * m;
    for (std::size_t i = 0; i < m; ++i) {
      xty[i] += row[i] * y[r];
      for (std::size_t j = 0; j < m; ++j) xtx[i * m + j] += row[i] * row[j];
    }
  }
  return solve(std::move(xtx), std::move(xty), m, beta);
}

// Regresses w_t on [1, w_{t-1..t-p}, e_{t-1..t-q}] for t >= start.
bool regress(std::span<const double> w, std::span<const double> e, std::size_t p, std::size_t q, std::size_t start,
             ArimaCoefficients& coef) {
  const std::size_t m = 1 + p + q;
  std::vector<double> X, y;
  for (std::size_t t = start; t < w.size(); ++t) {
    X.push_back(1.0);
    for (std::size_t i = 1; i <= p; ++i) X.push_back(w[t - i]);
    for (std::size_t j = 1; j <= q; ++j) X.push_back(e[t - j]);
    y.push_back(w[t]);
  }
  std::vector<double> beta;
  if (y.size() < m || !least_squares(X, y, m, beta)) return false;
  coef.constant = beta[0];
  coef.ar.assign(beta.begin() + 1, beta.begin() + 1 + long(p));
  coef.ma.assign(beta.begin() + 1 + long(p), beta.end());
  return true;
}

double css(std::span<const double> w, const ArimaCoefficients& coef) {
  const auto e = arma_residuals(w, coef);
  double s = 0.0;
  for (std::size_t t = coef.ar.size(); t < e.size(); ++t) s += e[t] * e[t];
  return s;
}

std::vector<double> pack(const ArimaCoefficients& c) {
  std::vector<double> v{c.constant};
  v.insert(v.end(), c.ar.begin(), c.ar.end());
  v.insert(v.end(), c.ma.begin(), c.ma.end());
  return v;
}

ArimaCoefficients unpack(const std::vector<double>& v, std::size_t p, std::size_t q) {
  ArimaCoefficients c;
  c.constant = v[0];
  c.ar.assign(v.begin() + 1, v.begin() + 1 + long(p));
  c.ma.assign(v.begin() + 1 + long(p), v.begin() + 1 + long(p + q));
  return c;
}

// Residuals and their Jacobian w.r.t. (c, phi, theta), rows t >= p.
void residual_jacobian(std::span<const double> w, const ArimaCoefficients& coef, std::vector<double>& e,
                       std::vector<double>& jac) {
  const std::size_t p = coef.ar.size(), q = coef.ma.size(), m = 1 + p + q, n = w.size();
  e = arma_residuals(w, coef);
  jac.assign(n * m, 0.0);
  for (std::size_t t = p; t < n; ++t) {
    double* row = jac.data() + t * m;
    row[0] = -1.0;
    for (std::size_t i = 0; i < p; ++i) row[1 + i] = -w[t - 1 - i];
    for (std::size_t j = 0; j < q && j < t; ++j) row[1 + p + j] -= e[t - 1 - j];
    for (std::size_t j = 0; j < q && j < t; ++j) {
      const double* prev = jac.data() + (t - 1 - j) * m;
      for (std::size_t c = 0; c < m; ++c) row[c] -= coef.ma[j] * prev[c];
    }
  }
}

}  // namespace

ArimaCoefficients fit_arima(std::span<const double> values, const ArimaConfig& config) {
  validate(config);
  const std::size_t p = config.p, q = config.q, d = config.d;
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "ARIMA input contains non-finite values");
  }
  const std::size_t needed = d + std::max(p, q) + p + q + 2;
  if (values.size() < needed) {
    fail(ErrorCode::SeriesTooShort, "ARIMA(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) +
                                        ") needs at least " + std::to_string(needed) + " observations, got " +
                                        std::to_string(values.size()));
  }
  const std::vector<double> w = difference(values, d);
  const std::size_t n = w.size();
  ArimaCoefficients coef;

  if (p == 0 && q == 0) {
    double s = 0.0;
    for (double v : w) s += v;
    coef.constant = s / double(n);
    coef.sigma2 = css(w, coef) / double(n);
    return coef;
  }

  // Hannan-Rissanen start: long autoregression for residual proxies.
  std::vector<double> e(n, 0.0);
  std::size_t start = p;
  if (q > 0) {
    std::size_t long_order = std::min<std::size_t>(std::max<std::size_t>(20, 2 * (p + q)), n / 4);
    long_order = std::max(long_order, p + q);
    ArimaCoefficients ar_long;
    if (long_order == 0 || !regress(w, e, long_order, 0, long_order, ar_long)) {
      fail(ErrorCode::SeriesTooShort, "series too short for the MA start regression");
    }
    auto proxy = arma_residuals(w, ar_long);
    e = std::move(proxy);
    start = long_order + q;
    if (start >= n) start = long_order;
  }
  if (!regress(w, e, p, q, std::max(start, std::max(p, q)), coef)) {
    // Degenerate regression (e.g. constant series): start from white noise.
    coef = ArimaCoefficients{};
    coef.ar.assign(p, 0.0);
    coef.ma.assign(q, 0.0);
  }
  // MA starts outside the invertible region make the residual recursion diverge.
  for (auto& th : coef.ma) th = std::clamp(th, -0.95, 0.95);

  const std::size_t m = 1 + p + q;
  std::vector<double> theta = pack(coef);
  double f = css(w, coef);
  if (!std::isfinite(f)) {
    std::fill(theta.begin() + 1, theta.end(), 0.0);
    coef = unpack(theta, p, q);
    f = css(w, coef);
  }
  double lambda = 1e-3;
  bool converged = false;
  std::size_t it = 0;
  std::vector<double> res, jac, step;
  for (; it < config.max_iterations && !converged; ++it) {
    residual_jacobian(w, coef, res, jac);
    std::vector<double> jtj(m * m, 0.0), g(m, 0.0);
    for (std::size_t t = p; t < n; ++t) {
      const double* row = jac.data() + t * m;
      for (std::size_t i = 0; i < m; ++i) {
        g[i] -= row[i] * res[t];
        for (std::size_t j = 0; j < m; ++j) jtj[i * m + j] += row[i] * row[j];
      }
    }
    bool improved = false;
    while (lambda < 1e12) {
      auto damped = jtj;
      for (std::size_t i = 0; i < m; ++i) damped[i * m + i] += lambda * std::max(jtj[i * m + i], 1e-12);
      if (solve(damped, g, m, step)) {
        std::vector<double> trial = theta;
        for (std::size_t i = 0; i < m; ++i) trial[i] += step[i];
        const auto tc = unpack(trial, p, q);
        const double tf = css(w, tc);
        if (std::isfinite(tf) && tf <= f) {
          const double rel = (f - tf) / std::max(f, 1e-300);
          double move = 0.0;
          for (std::size_t i = 0; i < m; ++i) move = std::max(move, std::abs(step[i]) / (std::abs(theta[i]) + 1e-8));
          theta = trial;
          coef = tc;
          f = tf;
          lambda = std::max(lambda / 10.0, 1e-12);
          improved = true;
          converged = rel < config.tolerance || move < 1e-10;
          break;
        }
      }
      lambda *= 10.0;
    }
    // No damping improves the objective: a (local) minimum of the CSS.
    if (!improved) converged = true;
  }
  if (!converged) {
    fail(ErrorCode::NonConvergence, "conditional least squares did not converge in " +
                                        std::to_string(config.max_iterations) + " iterations");
  }
  coef.iterations = it;
  coef.sigma2 = f / double(n - p);
  return coef;
}

std::vector<double> forecast_arima(const ArimaCoefficients& coef, std::size_t d, std::span<const double> history,
                                   std::size_t steps) {
  const std::size_t p = coef.ar.size(), q = coef.ma.size();
  if (history.size() < d + std::max<std::size_t>(p, 1)) {
    fail(ErrorCode::SeriesTooShort, "ARIMA forecast needs at least " + std::to_string(d + std::max<std::size_t>(p, 1)) +
                                        " history values");
  }
  // levels[i] is the i-th difference of the history.
  std::vector<std::vector<double>> levels{std::vector<double>(history.begin(), history.end())};
  for (std::size_t i = 0; i < d; ++i) levels.push_back(difference(levels.back(), 1));
  std::vector<double> w = levels.back();
  std::vector<double> e = arma_residuals(w, coef);
  const std::size_t n = w.size();
  for (std::size_t h = 0; h < steps; ++h) {
    const std::size_t t = n + h;
    double v = coef.constant;
    for (std::size_t i = 0; i < p; ++i) v += coef.ar[i] * w[t - 1 - i];
    for (std::size_t j = 0; j < q; ++j) v += coef.ma[j] * e[t - 1 - j];
    w.push_back(v);
    e.push_back(0.0);
  }
  std::vector<double> out(w.end() - long(steps), w.end());
  for (std::size_t lvl = d; lvl-- > 0;) {
    double last = levels[lvl].back();
    for (auto& v : out) {
      last += v;
      v = last;
    }
  }
  return out;
}

TrainedModel arima_fit(const Series& series, const ArimaConfig& config) {
  TrainedModel model;
  model.config = config;
  model.series_ids = {series.id()};
  ModelMember member;
  member.series_ids = {series.id()};
  member.arima = fit_arima(series.values(), config);
  model.members.push_back(std::move(member));
  return model;
}

Series arima_forecast(const TrainedModel& model, const Series& history, std::size_t steps) {
  const auto& config = std::get<ArimaConfig>(model.config);
  const auto& member = model.member_for(history.id());
  auto values = forecast_arima(*member.arima, config.d, history.values(), steps);
  return Series(history.id(), HourlyIndex(history.index().end(), steps), std::move(values), history.unit());
}

TrainedModel train_arima(const ArimaConfig& config, std::span<const CovariateFrame> frames, const SplitSpec& split) {
  validate(config);
  if (frames.empty()) fail(ErrorCode::InvalidArgument, "no training series");
  TrainedModel model;
  model.config = config;
  model.schema = frames.front().schema;
  for (const auto& f : frames) {
    require_schema(model.schema, f.schema);
    const std::size_t rows = split_point(f.index, split);
    const auto consumption = f.past_known.slice_rows(0, rows).column(0);
    ModelMember member;
    member.series_ids = {f.series_id};
    member.arima = fit_arima(consumption, config);
    model.series_ids.push_back(f.series_id);
    model.members.push_back(std::move(member));
  }
  return model;
}

std::vector<std::vector<double>> arima_forecast_windows(const TrainedModel& model,
                                                        std::span<const ForecastWindow> windows) {
  const auto& config = std::get<ArimaConfig>(model.config);
  std::vector<std::vector<double>> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    require_schema(model.schema, w.schema);
    const auto& member = model.member_for(w.series_id);
    const auto history = w.past.column(0);
    const std::size_t keep = std::min(history.size(), config.history);
    out.push_back(forecast_arima(*member.arima, config.d, std::span(history).last(keep), config.horizon));
  }
  return out;
}

std::vector<double> seasonal_naive(std::span<const double> history, std::size_t season, std::size_t steps) {
  if (season == 0) fail(ErrorCode::InvalidArgument, "season must be >= 1");
  if (history.size() < season) {
    fail(ErrorCode::SeriesTooShort, "seasonal naive needs " + std::to_string(season) + " hours of history, got " +
                                        std::to_string(history.size()));
  }
  std::vector<double> out(steps);
  const std::size_t base = history.size() - season;
  for (std::size_t t = 0; t < steps; ++t) out[t] = history[base + t % season];
  return out;
}

Series seasonal_naive(const Series& history, std::size_t season, std::size_t steps) {
  return Series(history.id(), HourlyIndex(history.index().end(), steps),
                seasonal_naive(history.values(), season, steps), history.unit());
}

TrainedModel make_naive_model(const NaiveConfig& config, std::span<const CovariateFrame> frames) {
  validate(config);
  if (frames.empty()) fail(ErrorCode::InvalidArgument, "no series");
  TrainedModel model;
  model.config = config;
  model.schema = frames.front().schema;
  ModelMember member;
  for (const auto& f : frames) {
    require_schema(model.schema, f.schema);
    model.series_ids.push_back(f.series_id);
    member.series_ids.push_back(f.series_id);
  }
  model.members.push_back(std::move(member));
  return model;
}

std::vector<std::vector<double>> naive_forecast_windows(const TrainedModel& model,
                                                        std::span<const ForecastWindow> windows) {
  const auto& config = std::get<NaiveConfig>(model.config);
  std::vector<std::vector<double>> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    require_schema(model.schema, w.schema);
    out.push_back(seasonal_naive(w.past.column(0), config.season, config.horizon));
  }
  return out;
}

}  // namespace gridcast
