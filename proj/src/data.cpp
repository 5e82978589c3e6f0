#include "rk/data.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace rk {

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Minimal CSV field splitter: handles quoted fields and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_event(const std::string& s, bool& out) {
  std::string t;
  for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "1" || t == "true") {
    out = true;
    return true;
  }
  if (t == "0" || t == "false") {
    out = false;
    return true;
  }
  return false;
}

struct RawRow {
  long line = 0;
  double time = 0.0;
  double event_time = 0.0;
  bool event = false;
  std::vector<double> long_values;
  std::vector<double> fixed_values;
};

}  // namespace

DataError::DataError(std::vector<std::string> messages)
    : std::runtime_error([&] {
        std::string all;
        for (const auto& m : messages) {
          if (!all.empty()) all += '\n';
          all += m;
        }
        return all.empty() ? std::string("invalid dataset") : all;
      }()),
      messages_(std::move(messages)) {}

std::size_t Dataset::n_events() const {
  std::size_t n = 0;
  for (const auto& s : subjects) n += s.event ? 1 : 0;
  return n;
}

void validate(const Dataset& data) {
  std::vector<std::string> errs;
  const std::size_t p = data.long_names.size();
  const std::size_t q = data.fixed_names.size();
  for (const auto& s : data.subjects) {
    if (s.obs_times.empty()) {
      errs.push_back("subject " + s.id + ": no observations");
      continue;
    }
    if (s.obs_times.front() != 0.0)
      errs.push_back("subject " + s.id + ": first observation time is not 0");
    for (std::size_t i = 1; i < s.obs_times.size(); ++i)
      if (!(s.obs_times[i] > s.obs_times[i - 1])) {
        errs.push_back("subject " + s.id + ": observation times not strictly increasing");
        break;
      }
    if (s.obs_times.back() > s.event_time)
      errs.push_back("subject " + s.id + ": s_i exceeds event time");
    if (s.event_time < 0.0)
      errs.push_back("subject " + s.id + ": negative event time");
    if (s.obs_values.size() != p)
      errs.push_back("subject " + s.id + ": wrong number of longitudinal covariates");
    for (const auto& row : s.obs_values)
      if (row.size() != s.obs_times.size()) {
        errs.push_back("subject " + s.id + ": observation value/time count mismatch");
        break;
      }
    if (s.fixed_covariates.size() != q)
      errs.push_back("subject " + s.id + ": wrong number of fixed covariates");
  }
  if (!errs.empty()) throw DataError(std::move(errs));
}

Dataset load_long_csv(const std::string& path, const CsvSchema& schema,
                      const std::string& time_unit) {
  std::ifstream in(path);
  if (!in) throw DataError({"cannot open file: " + path});

  std::string header_line;
  if (!std::getline(in, header_line)) throw DataError({"empty file: " + path});
  const auto header = split_csv_line(header_line);

  auto col_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw DataError({"column not found in " + path + ": " + name});
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t ci = col_of(schema.id);
  const std::size_t ct = col_of(schema.time);
  const std::size_t cet = col_of(schema.event_time);
  const std::size_t cev = col_of(schema.event);
  std::vector<std::size_t> clong, cfixed;
  for (const auto& n : schema.longitudinal) clong.push_back(col_of(n));
  for (const auto& n : schema.fixed) cfixed.push_back(col_of(n));

  std::vector<std::string> errs;
  std::vector<std::string> order;                       // ids by first appearance
  std::map<std::string, std::vector<RawRow>> by_id;

  std::string line;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      errs.push_back("line " + std::to_string(line_no) + ": expected " +
                     std::to_string(header.size()) + " fields, got " +
                     std::to_string(f.size()));
      continue;
    }
    const std::string& id = f[ci];
    RawRow row;
    row.line = line_no;
    bool ok = true;
    auto num = [&](std::size_t c, double& out) {
      if (!parse_double(f[c], out)) {
        errs.push_back("id " + id + ", line " + std::to_string(line_no) +
                       ": non-numeric value '" + f[c] + "' in column " + header[c]);
        ok = false;
      }
    };
    num(ct, row.time);
    num(cet, row.event_time);
    if (!parse_event(f[cev], row.event)) {
      errs.push_back("id " + id + ", line " + std::to_string(line_no) +
                     ": event indicator must be one of {0,1,true,false}, got '" +
                     f[cev] + "'");
      ok = false;
    }
    row.long_values.resize(clong.size());
    for (std::size_t j = 0; j < clong.size(); ++j) num(clong[j], row.long_values[j]);
    row.fixed_values.resize(cfixed.size());
    for (std::size_t j = 0; j < cfixed.size(); ++j) num(cfixed[j], row.fixed_values[j]);
    if (!ok) continue;
    if (by_id.find(id) == by_id.end()) order.push_back(id);
    by_id[id].push_back(std::move(row));
  }

  Dataset out;
  out.long_names = schema.longitudinal;
  out.fixed_names = schema.fixed;
  out.time_unit = time_unit;

  for (const auto& id : order) {
    auto rows = by_id[id];
    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].time == rows[i - 1].time)
        errs.push_back("id " + id + ", line " + std::to_string(rows[i].line) +
                       ": duplicate observation time " + fmt_double(rows[i].time));
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].event_time != rows[0].event_time || rows[i].event != rows[0].event)
        errs.push_back("id " + id + ", line " + std::to_string(rows[i].line) +
                       ": event time/indicator not constant within id");
      for (std::size_t j = 0; j < cfixed.size(); ++j)
        if (rows[i].fixed_values[j] != rows[0].fixed_values[j])
          errs.push_back("id " + id + ", line " + std::to_string(rows[i].line) +
                         ": non-constant fixed covariate " + schema.fixed[j]);
    }

    Subject s;
    s.id = id;
    s.event_time = rows[0].event_time;
    s.event = rows[0].event;
    s.fixed_covariates = rows[0].fixed_values;
    const double base = schema.rebase ? rows[0].time : 0.0;
    if (!schema.rebase && rows[0].time != 0.0)
      errs.push_back("id " + id + ", line " + std::to_string(rows[0].line) +
                     ": first observation time is " + fmt_double(rows[0].time) +
                     ", not 0 (set rebase to shift)");
    s.obs_values.assign(clong.size(), {});
    for (const auto& r : rows) {
      s.obs_times.push_back(r.time - base);
      for (std::size_t j = 0; j < clong.size(); ++j)
        s.obs_values[j].push_back(r.long_values[j]);
    }
    if (!s.obs_times.empty() && s.obs_times.back() > s.event_time)
      errs.push_back("id " + id + ": s_i exceeds event time (s=" +
                     fmt_double(s.obs_times.back()) + ", T=" +
                     fmt_double(s.event_time) + ")");
    out.subjects.push_back(std::move(s));
  }

  if (!errs.empty()) throw DataError(std::move(errs));
  if (out.subjects.empty()) throw DataError({"no data rows in " + path});
  validate(out);
  return out;
}

void save_long_csv(const Dataset& data, const std::string& path,
                   const CsvSchema& schema) {
  std::ofstream outf(path);
  if (!outf) throw DataError({"cannot write file: " + path});
  outf << schema.id << ',' << schema.time << ',' << schema.event_time << ','
       << schema.event;
  for (const auto& n : schema.longitudinal) outf << ',' << n;
  for (const auto& n : schema.fixed) outf << ',' << n;
  outf << '\n';
  for (const auto& s : data.subjects) {
    for (std::size_t l = 0; l < s.obs_times.size(); ++l) {
      outf << s.id << ',' << fmt_double(s.obs_times[l]) << ','
           << fmt_double(s.event_time) << ',' << (s.event ? 1 : 0);
      for (std::size_t mu = 0; mu < s.obs_values.size(); ++mu)
        outf << ',' << fmt_double(s.obs_values[mu][l]);
      for (double v : s.fixed_covariates) outf << ',' << fmt_double(v);
      outf << '\n';
    }
  }
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec,
                                  int k) {
  if (k < 0 || k >= spec.n_splits)
    throw std::invalid_argument("split: index out of range");
  if (!(spec.fraction > 0.0 && spec.fraction < 1.0))
    throw std::invalid_argument("split: fraction must lie in (0,1)");

  const std::size_t n = data.subjects.size();
  const auto n_train =
      static_cast<std::size_t>(std::lround(spec.fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n)
    throw std::invalid_argument("split: empty train or test half");

  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(k) + 1u};
  std::mt19937_64 rng(seq);
  // Fisher-Yates with an explicit draw so the partition is identical across
  // standard library implementations.
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(idx[i], idx[j]);
  }

  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[idx[i]] = true;

  Dataset train, test;
  train.long_names = test.long_names = data.long_names;
  train.fixed_names = test.fixed_names = data.fixed_names;
  train.time_unit = test.time_unit = data.time_unit;
  for (std::size_t i = 0; i < n; ++i)
    (in_train[i] ? train : test).subjects.push_back(data.subjects[i]);
  return {std::move(train), std::move(test)};
}

std::string dataset_digest(const Dataset& data) {
  std::ostringstream os;
  os << data.time_unit << '|';
  for (const auto& n : data.long_names) os << n << ';';
  os << '|';
  for (const auto& n : data.fixed_names) os << n << ';';
  for (const auto& s : data.subjects) {
    os << '|' << s.id << ':' << fmt_double(s.event_time) << ':' << s.event << ':';
    for (double t : s.obs_times) os << fmt_double(t) << ',';
    for (const auto& row : s.obs_values) {
      os << '/';
      for (double v : row) os << fmt_double(v) << ',';
    }
    os << '/';
    for (double v : s.fixed_covariates) os << fmt_double(v) << ',';
  }
  return fnv1a_digest(os.str());
}

std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016" PRIx64, h);
  return buf;
}

}  // namespace rk
