#pragma once

#include <span>
#include <vector>

namespace rk {

// One constant piece of a step function on [start, end).
struct Segment {
  double start;
  double end;
  double value;
};

// Nearest-neighbour step interpolation of one covariate's observations.
// The value switches half way between consecutive observation times; the
// first piece extends down to 0 and the last one up to +infinity.
// domain_end records the final observation time s; callers decide how far
// to evaluate (integrals never go past min(s, t)).
class StepTrajectory {
 public:
  static StepTrajectory from_observations(std::span<const double> times,
                                          std::span<const double> values);

  // Right-continuous at change points: the later observation wins there.
  double value_at(double t) const;

  // Contiguous cover of [0, limit] by constant pieces. limit == 0 gives an
  // empty sequence; limit may exceed domain_end (the last piece extends).
  std::vector<Segment> segments_up_to(double limit) const;

  const std::vector<double>& change_points() const { return change_points_; }
  const std::vector<double>& segment_values() const { return segment_values_; }
  double domain_end() const { return domain_end_; }

 private:
  std::vector<double> change_points_;   // midpoints, size n-1
  std::vector<double> segment_values_;  // size n
  double domain_end_ = 0.0;             // s_i
};

}  // namespace rk
