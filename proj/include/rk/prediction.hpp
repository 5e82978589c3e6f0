#pragma once

#include "rk/data.hpp"
#include "rk/rk_fit.hpp"

namespace rk {

// One dynamic-prediction request: survival to prediction_time given
// survival to base_time and covariate observations up to base_time.
// lower_time is the left end of the event-sum window; it equals base_time
// for the plain predictor and the censoring time T_i for the conditional
// variant used in the prediction-error estimator.
struct PredictionQuery {
  Subject subject;
  double base_time = 0.0;
  double prediction_time = 0.0;
  double lower_time = -1.0;  // < 0 means "use base_time"
};

double predict_rk(const FittedRkModel& fitted, const Subject& subject,
                  double base_time, double prediction_time, double lower_time);

double predict_rk(const FittedRkModel& fitted, const PredictionQuery& query);

}  // namespace rk
