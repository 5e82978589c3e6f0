#include "rk/trajectory.hpp"

#include <algorithm>
#include <stdexcept>

namespace rk {

StepTrajectory StepTrajectory::from_observations(std::span<const double> times,
                                                 std::span<const double> values) {
  if (times.empty()) throw std::invalid_argument("trajectory: no observations");
  if (times.size() != values.size())
    throw std::invalid_argument("trajectory: times/values length mismatch");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("trajectory: observation times not strictly increasing");

  StepTrajectory traj;
  traj.segment_values_.assign(values.begin(), values.end());
  traj.change_points_.resize(times.size() - 1);
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    traj.change_points_[i] = 0.5 * (times[i] + times[i + 1]);
  traj.domain_end_ = times.back();
  return traj;
}

double StepTrajectory::value_at(double t) const {
  // first change point strictly greater than t -> piece index
  const auto it = std::upper_bound(change_points_.begin(), change_points_.end(), t);
  return segment_values_[static_cast<std::size_t>(it - change_points_.begin())];
}

std::vector<Segment> StepTrajectory::segments_up_to(double limit) const {
  if (limit < 0.0) throw std::invalid_argument("segments_up_to: negative limit");
  std::vector<Segment> out;
  double start = 0.0;
  for (std::size_t i = 0; i < segment_values_.size() && start < limit; ++i) {
    const double end = i < change_points_.size()
                           ? std::min(change_points_[i], limit)
                           : limit;
    if (end > start) out.push_back({start, end, segment_values_[i]});
    start = end;
  }
  return out;
}

}  // namespace rk
