#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rk {

// One individual: observed event (or censoring) time T, event indicator
// delta, observation grid t_{i1}=0 < ... < t_{i n_i} = s_i <= T, one row of
// observed values per longitudinal covariate, and the fixed covariates.
struct Subject {
  std::string id;
  double event_time = 0.0;
  bool event = false;
  std::vector<double> obs_times;
  std::vector<std::vector<double>> obs_values;  // p rows, n_i columns each
  std::vector<double> fixed_covariates;         // q entries

  double final_obs_time() const { return obs_times.back(); }  // s_i
};

struct Dataset {
  std::vector<Subject> subjects;
  std::vector<std::string> long_names;
  std::vector<std::string> fixed_names;
  std::string time_unit;

  std::size_t n_long() const { return long_names.size(); }
  std::size_t n_fixed() const { return fixed_names.size(); }
  std::size_t n_events() const;
};

// Column-name mapping for the long CSV format (one row per observation,
// fixed covariates repeated on every row of an id).
struct CsvSchema {
  std::string id;
  std::string time;
  std::string event_time;
  std::string event;
  std::vector<std::string> longitudinal;
  std::vector<std::string> fixed;
  bool rebase = false;  // shift each subject's first observation time to 0
};

struct SplitSpec {
  std::uint64_t seed = 0;
  double fraction = 0.5;
  int n_splits = 20;
};

// CSV/structure problems, each message carrying subject id and line number.
class DataError : public std::runtime_error {
 public:
  explicit DataError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

// Structural invariants (first obs at 0, increasing times, s_i <= T_i,
// consistent p/q). Throws DataError listing every violation.
void validate(const Dataset& data);

Dataset load_long_csv(const std::string& path, const CsvSchema& schema,
                      const std::string& time_unit = "");

void save_long_csv(const Dataset& data, const std::string& path,
                   const CsvSchema& schema);

// Deterministic half split: shuffles ids with a generator seeded by
// (spec.seed, k) and takes the first round(fraction*N) as the training half.
// Subject order inside each half follows the input dataset.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec,
                                  int k);

// FNV-1a hash of a canonical text serialization; ties fit files to the
// exact dataset they were computed from.
std::string dataset_digest(const Dataset& data);

std::string fnv1a_digest(const std::string& bytes);

}  // namespace rk
