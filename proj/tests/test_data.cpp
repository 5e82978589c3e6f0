#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rk/data.hpp"
#include "support/synth.hpp"

using rk::CsvSchema;
using rk::Dataset;
using rk::SplitSpec;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "rk_test_tmp_" + std::to_string(counter++) + ".csv";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

CsvSchema basic_schema() {
  CsvSchema s;
  s.id = "id";
  s.time = "time";
  s.event_time = "T";
  s.event = "status";
  s.longitudinal = {"z"};
  s.fixed = {"age"};
  return s;
}

}  // namespace

TEST_CASE("minimal well-formed file") {
  TempFile f("id,time,T,status,z,age\n"
             "a,0,2,1,1.5,50\n"
             "a,1,2,1,1.7,50\n");
  const Dataset d = rk::load_long_csv(f.path, basic_schema(), "years");
  REQUIRE(d.subjects.size() == 1);
  const auto& s = d.subjects[0];
  CHECK(s.obs_times == std::vector<double>{0.0, 1.0});
  CHECK(s.final_obs_time() == 1.0);
  CHECK(s.event_time == 2.0);
  CHECK(s.event);
  CHECK(s.obs_values[0] == std::vector<double>{1.5, 1.7});
  CHECK(s.fixed_covariates == std::vector<double>{50.0});
  CHECK(d.time_unit == "years");
}

TEST_CASE("event indicator accepts 0/1/true/false") {
  TempFile f("id,time,T,status,z,age\n"
             "a,0,2,true,1,50\n"
             "b,0,3,FALSE,2,60\n"
             "c,0,4,0,3,70\n"
             "d,0,5,1,4,80\n");
  const Dataset d = rk::load_long_csv(f.path, basic_schema());
  CHECK(d.subjects[0].event);
  CHECK_FALSE(d.subjects[1].event);
  CHECK_FALSE(d.subjects[2].event);
  CHECK(d.subjects[3].event);
}

TEST_CASE("rows may arrive out of order; subjects keep file order") {
  TempFile f("id,time,T,status,z,age\n"
             "b,1,4,0,2.5,60\n"
             "a,0,2,1,1.5,50\n"
             "b,0,4,0,2.0,60\n");
  const Dataset d = rk::load_long_csv(f.path, basic_schema());
  REQUIRE(d.subjects.size() == 2);
  CHECK(d.subjects[0].id == "b");
  CHECK(d.subjects[0].obs_times == std::vector<double>{0.0, 1.0});
  CHECK(d.subjects[1].id == "a");
}

TEST_CASE("s_i beyond the event time is rejected with the id") {
  TempFile f("id,time,T,status,z,age\n"
             "a,0,2,1,1.0,50\n"
             "a,3,2,1,1.2,50\n");
  try {
    rk::load_long_csv(f.path, basic_schema());
    FAIL("expected DataError");
  } catch (const rk::DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("s_i exceeds event time") != std::string::npos);
    CHECK(msg.find("a") != std::string::npos);
  }
}

TEST_CASE("duplicate observation times, bad numbers and bad columns") {
  TempFile dup("id,time,T,status,z,age\n"
               "a,0,2,1,1.0,50\n"
               "a,0,2,1,1.2,50\n");
  CHECK_THROWS_AS(rk::load_long_csv(dup.path, basic_schema()), rk::DataError);

  TempFile nonnum("id,time,T,status,z,age\n"
                  "a,0,2,1,oops,50\n");
  try {
    rk::load_long_csv(nonnum.path, basic_schema());
    FAIL("expected DataError");
  } catch (const rk::DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("oops") != std::string::npos);
  }

  TempFile ok("id,time,T,status,z,age\na,0,2,1,1,50\n");
  CsvSchema bad = basic_schema();
  bad.longitudinal = {"bilirubin"};
  try {
    rk::load_long_csv(ok.path, bad);
    FAIL("expected DataError");
  } catch (const rk::DataError& e) {
    CHECK(std::string(e.what()).find("bilirubin") != std::string::npos);
  }
}

TEST_CASE("non-constant fixed covariate within an id") {
  TempFile f("id,time,T,status,z,age\n"
             "a,0,2,1,1.0,50\n"
             "a,1,2,1,1.1,51\n");
  try {
    rk::load_long_csv(f.path, basic_schema());
    FAIL("expected DataError");
  } catch (const rk::DataError& e) {
    CHECK(std::string(e.what()).find("age") != std::string::npos);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("first observation must sit at 0 unless rebase is set") {
  TempFile f("id,time,T,status,z,age\n"
             "a,1,3,1,1.0,50\n"
             "a,2,3,1,1.1,50\n");
  CHECK_THROWS_AS(rk::load_long_csv(f.path, basic_schema()), rk::DataError);

  CsvSchema schema = basic_schema();
  schema.rebase = true;
  const Dataset d = rk::load_long_csv(f.path, schema);
  CHECK(d.subjects[0].obs_times == std::vector<double>{0.0, 1.0});
}

TEST_CASE("round trip: save then load gives field-by-field equality") {
  const Dataset d = rk::synth::longitudinal(60, 2, 5, 2);
  CsvSchema schema;
  schema.id = "id";
  schema.time = "obstime";
  schema.event_time = "T";
  schema.event = "event";
  schema.longitudinal = d.long_names;
  schema.fixed = d.fixed_names;

  const std::string path = "rk_test_roundtrip.csv";
  rk::save_long_csv(d, path, schema);
  const Dataset back = rk::load_long_csv(path, schema, d.time_unit);
  std::remove(path.c_str());

  REQUIRE(back.subjects.size() == d.subjects.size());
  CHECK(rk::dataset_digest(back) == rk::dataset_digest(d));
  for (std::size_t i = 0; i < d.subjects.size(); ++i) {
    CHECK(back.subjects[i].id == d.subjects[i].id);
    CHECK(back.subjects[i].event_time == d.subjects[i].event_time);
    CHECK(back.subjects[i].event == d.subjects[i].event);
    CHECK(back.subjects[i].obs_times == d.subjects[i].obs_times);
    CHECK(back.subjects[i].obs_values == d.subjects[i].obs_values);
    CHECK(back.subjects[i].fixed_covariates == d.subjects[i].fixed_covariates);
  }
}

TEST_CASE("split cardinality, disjointness and determinism") {
  const Dataset d = rk::synth::longitudinal(10, 1, 3);
  SplitSpec spec;
  spec.seed = 7;
  spec.fraction = 0.5;
  spec.n_splits = 4;

  const auto [train, test] = rk::split(d, spec, 0);
  CHECK(train.subjects.size() == 5);
  CHECK(test.subjects.size() == 5);

  std::set<std::string> ids;
  for (const auto& s : train.subjects) ids.insert(s.id);
  for (const auto& s : test.subjects) ids.insert(s.id);
  CHECK(ids.size() == 10);

  const auto [train2, test2] = rk::split(d, spec, 0);
  CHECK(rk::dataset_digest(train2) == rk::dataset_digest(train));
  CHECK(rk::dataset_digest(test2) == rk::dataset_digest(test));

  const auto [train3, test3] = rk::split(d, spec, 1);
  CHECK(rk::dataset_digest(train3) != rk::dataset_digest(train));
}

TEST_CASE("twenty splits of N=312 are pairwise distinct") {
  const Dataset d = rk::synth::longitudinal(312, 1, 11);
  SplitSpec spec;
  spec.seed = 20210521;
  spec.fraction = 0.5;
  spec.n_splits = 20;

  std::set<std::vector<bool>> masks;
  for (int k = 0; k < spec.n_splits; ++k) {
    const auto [train, test] = rk::split(d, spec, k);
    CHECK(train.subjects.size() == 156);
    std::set<std::string> train_ids;
    for (const auto& s : train.subjects) train_ids.insert(s.id);
    std::vector<bool> mask;
    for (const auto& s : d.subjects) mask.push_back(train_ids.count(s.id) > 0);
    masks.insert(mask);
  }
  CHECK(masks.size() == 20);
}

TEST_CASE("degenerate splits are rejected") {
  const Dataset d = rk::synth::longitudinal(1, 1, 3);
  SplitSpec spec;
  spec.fraction = 0.5;
  spec.n_splits = 2;
  CHECK_THROWS_AS(rk::split(d, spec, 0), std::invalid_argument);
  CHECK_THROWS_AS(rk::split(rk::synth::longitudinal(10, 1, 3), spec, 5),
                  std::invalid_argument);
}

TEST_CASE("validate catches structural problems") {
  Dataset d = rk::synth::longitudinal(5, 1, 3);
  rk::validate(d);  // generator output is well formed
  d.subjects[2].obs_times[0] = 0.5;
  CHECK_THROWS_AS(rk::validate(d), rk::DataError);
}
