#include "rk/cox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rk {

double BaseHazard::sum_open_closed(double lo, double hi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < jump_times.size(); ++i)
    if (jump_times[i] > lo && jump_times[i] <= hi) s += jumps[i];
  return s;
}

double BaseHazard::sum_closed(double lo, double hi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < jump_times.size(); ++i)
    if (jump_times[i] >= lo && jump_times[i] <= hi) s += jumps[i];
  return s;
}

StaticCoxEngine::StaticCoxEngine(std::vector<double> times,
                                 std::vector<bool> events)
    : times_(std::move(times)), events_(std::move(events)) {
  if (times_.size() != events_.size())
    throw std::invalid_argument("cox: times/events length mismatch");
  order_.resize(times_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return times_[a] > times_[b];
  });
  for (bool e : events_) n_events_ += e ? 1 : 0;
  if (n_events_ == 0) throw std::invalid_argument("cox: no events in data");
}

double StaticCoxEngine::neg_log_pl(const std::vector<double>& lp) const {
  const std::size_t n = times_.size();
  if (lp.size() != n) throw std::invalid_argument("cox: lp length mismatch");

  // Single global shift keeps every summand in [0, 1]; the running suffix
  // sum over descending times yields each risk-set denominator.
  double shift = lp[0];
  for (double v : lp) shift = std::max(shift, v);

  double nll = 0.0;
  double denom = 0.0;
  std::size_t i = 0;
  while (i < n) {
    // add the whole tie group to the risk set first
    std::size_t j = i;
    const double t = times_[order_[i]];
    while (j < n && times_[order_[j]] == t) {
      denom += std::exp(lp[order_[j]] - shift);
      ++j;
    }
    const double log_denom = std::log(denom) + shift;
    for (std::size_t k = i; k < j; ++k) {
      const std::size_t subj = order_[k];
      if (events_[subj]) nll += log_denom - lp[subj];
    }
    i = j;
  }
  return nll;
}

BaseHazard StaticCoxEngine::breslow(const std::vector<double>& lp) const {
  const std::size_t n = times_.size();
  if (lp.size() != n) throw std::invalid_argument("cox: lp length mismatch");
  double shift = lp[0];
  for (double v : lp) shift = std::max(shift, v);

  BaseHazard h;
  double denom = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    const double t = times_[order_[i]];
    int d = 0;
    while (j < n && times_[order_[j]] == t) {
      denom += std::exp(lp[order_[j]] - shift);
      if (events_[order_[j]]) ++d;
      ++j;
    }
    if (d > 0) {
      h.jump_times.push_back(t);
      h.jumps.push_back(std::exp(std::log(static_cast<double>(d)) -
                                 std::log(denom) - shift));
    }
    i = j;
  }
  std::reverse(h.jump_times.begin(), h.jump_times.end());
  std::reverse(h.jumps.begin(), h.jumps.end());
  return h;
}

}  // namespace rk
