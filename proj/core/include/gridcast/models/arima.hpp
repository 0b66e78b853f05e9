#pragma once

#include <span>
#include <vector>

#include "gridcast/models/config.hpp"
#include "gridcast/models/trained_model.hpp"
#include "gridcast/series.hpp"

namespace gridcast {

// d-th order differences; output is d values shorter.
std::vector<double> difference(std::span<const double> values, std::size_t d);

// One-step residuals e_t = w_t - c - sum phi_i w_{t-i} - sum theta_j e_{t-j}
// with e_t = 0 for t < p.
std::vector<double> arma_residuals(std::span<const double> w, const ArimaCoefficients& coef);

// Conditional least squares: Hannan-Rissanen regression start, then
// Levenberg-Marquardt on the conditional sum of squares.
ArimaCoefficients fit_arima(std::span<const double> values, const ArimaConfig& config);

// Recursive forecast from the end of `history`, undoing the differencing.
std::vector<double> forecast_arima(const ArimaCoefficients& coef, std::size_t d, std::span<const double> history,
                                   std::size_t steps);

TrainedModel arima_fit(const Series& series, const ArimaConfig& config);
Series arima_forecast(const TrainedModel& model, const Series& history, std::size_t steps);

TrainedModel train_arima(const ArimaConfig& config, std::span<const CovariateFrame> frames, const SplitSpec& split);
std::vector<std::vector<double>> arima_forecast_windows(const TrainedModel& model,
                                                        std::span<const ForecastWindow> windows);

// forecast_t = y_{n - season + (t mod season)}.
std::vector<double> seasonal_naive(std::span<const double> history, std::size_t season, std::size_t steps);
Series seasonal_naive(const Series& history, std::size_t season, std::size_t steps);

TrainedModel make_naive_model(const NaiveConfig& config, std::span<const CovariateFrame> frames);
std::vector<std::vector<double>> naive_forecast_windows(const TrainedModel& model,
                                                        std::span<const ForecastWindow> windows);

}  // namespace gridcast
