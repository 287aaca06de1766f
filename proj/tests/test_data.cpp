#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <string>

#include "rdtu/data.hpp"
#include "scratch.hpp"

using namespace rdtu;

namespace {

Dataset toy(std::size_t n) {
  Dataset ds;
  ds.name = "toy";
  ds.features.push_back({"x", NumericFeature{}});
  for (std::size_t i = 0; i < n; ++i)
    ds.instances.push_back({{static_cast<double>(i)}, i % 2 ? Label::Positive : Label::Negative});
  return ds;
}

std::size_t data_rows(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  return rows;
}

}  // namespace

TEST_CASE("mixed nominal and numeric columns") {
  ScratchDir dir;
  const auto p = dir.write("mix.csv",
                           "color,size,label\n"
                           "red,1.5,yes\n"
                           "blue,?,no\n"
                           "green,3,yes\n"
                           "red,,no\n");
  const auto ds = load_csv(p);
  CHECK(ds.name == "mix");
  REQUIRE(ds.features.size() == 2);
  CHECK(ds.features[0].is_nominal());
  CHECK(ds.features[0].category_count() == 3);
  CHECK_FALSE(ds.features[1].is_nominal());
  // categories sorted: blue, green, red
  CHECK(ds.instances[0].values[0] == 2.0);
  CHECK(ds.instances[1].values[0] == 0.0);
  CHECK(is_missing(ds.instances[1].values[1]));
  CHECK(is_missing(ds.instances[3].values[1]));
  CHECK(ds.instances[0].values[1] == 1.5);
  // "yes" > "no", so yes is positive by default
  CHECK(ds.instances[0].label == Label::Positive);
  CHECK(ds.class_counts().pos == 2);
  CHECK(ds.class_ratio() == doctest::Approx(0.5));
}

TEST_CASE("label selection and positive override") {
  ScratchDir dir;
  const auto p = dir.write("lab.csv", "y,a,b\nx,1,2\nz,3,4\nx,5,6\n");
  LoadOptions opt;
  opt.label_name = "y";
  opt.positive_label = "x";
  const auto ds = load_csv(p, opt);
  CHECK(ds.features.size() == 2);
  CHECK(ds.features[0].name == "a");
  CHECK(ds.class_counts().pos == 2);

  LoadOptions by_index;
  by_index.label_index = 0;
  CHECK(load_csv(p, by_index).class_counts().pos == 1);

  LoadOptions forced;
  forced.label_name = "y";
  forced.nominal_columns = {"a"};
  CHECK(load_csv(p, forced).features[0].is_nominal());
}

TEST_CASE("malformed files are rejected") {
  ScratchDir dir;
  CHECK_THROWS(load_csv(dir.path() / "absent.csv"));
  CHECK_THROWS(load_csv(dir.write("empty.csv", "")));
  CHECK_THROWS_WITH(load_csv(dir.write("ragged.csv", "a,b\n1,x\n2\n")),
                    doctest::Contains("row 3"));
  CHECK_THROWS(load_csv(dir.write("three.csv", "a,b\n1,x\n2,y\n3,z\n")));
  LoadOptions opt;
  opt.positive_label = "q";
  CHECK_THROWS(load_csv(dir.write("pos.csv", "a,b\n1,x\n2,y\n"), opt));
  opt.label_name = "nope";
  CHECK_THROWS(load_csv(dir.write("name.csv", "a,b\n1,x\n2,y\n"), opt));
}

TEST_CASE("quoted fields keep their commas") {
  ScratchDir dir;
  const auto ds = load_csv(dir.write("q.csv", "a,b\n\"x, y\",p\nz,n\n"));
  const auto& cats = std::get<NominalFeature>(ds.features[0].kind).categories;
  CHECK(cats == std::vector<std::string>{"x, y", "z"});
}

TEST_CASE("bundled datasets load completely") {
  for (const char* name : {"tic-tac-toe", "breast-cancer"}) {
    const std::filesystem::path p = std::filesystem::path(RDTU_DATA_DIR) / (std::string(name) + ".csv");
    const auto ds = load_csv(p);
    CHECK(ds.instances.size() == data_rows(p));
    CHECK_NOTHROW(ds.validate());
  }
  const auto ttt = load_csv(std::filesystem::path(RDTU_DATA_DIR) / "tic-tac-toe.csv");
  CHECK(ttt.instances.size() == 958);
  CHECK(ttt.features.size() == 9);
  CHECK(ttt.class_counts().pos == 626);
}

TEST_CASE("schema validation") {
  Dataset ds = toy(4);
  CHECK_NOTHROW(ds.validate());
  ds.features.push_back({"x", NumericFeature{}});
  CHECK_THROWS(ds.validate());

  std::vector<FeatureSpec> feats{{"c", NominalFeature{{"a", "b"}}}};
  CHECK_NOTHROW(validate_instance(feats, {{1.0}, Label::Positive}));
  CHECK_NOTHROW(validate_instance(feats, {{kMissing}, Label::Positive}));
  CHECK_THROWS(validate_instance(feats, {{2.0}, Label::Positive}));
  CHECK_THROWS(validate_instance(feats, {{0.5}, Label::Positive}));
  CHECK_THROWS(validate_instance(feats, {{0.0, 1.0}, Label::Positive}));
}

TEST_CASE("5x2 split sizes") {
  const auto even = make_5x2(toy(10), 42);
  CHECK(even.assignments.size() == 5);
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(even.rows_in(r, 0).size() == 5);
    CHECK(even.rows_in(r, 1).size() == 5);
  }
  const auto odd = make_5x2(toy(11), 42);
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(odd.rows_in(r, 0).size() == 6);
    CHECK(odd.rows_in(r, 1).size() == 5);
  }
}

TEST_CASE("5x2 folds partition every repetition") {
  const auto ds = toy(37);
  const auto plan = make_5x2(ds, 7);
  for (std::size_t r = 0; r < plan.repetitions; ++r) {
    auto all = plan.rows_in(r, 0);
    const auto other = plan.rows_in(r, 1);
    all.insert(all.end(), other.begin(), other.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
  }
  CHECK(plan.assignments != make_5x2(ds, 8).assignments);
  CHECK(plan.assignments[0] != plan.assignments[1]);
}

TEST_CASE("loading and splitting are deterministic") {
  const auto p = std::filesystem::path(RDTU_DATA_DIR) / "breast-cancer.csv";
  const auto a = load_csv(p);
  const auto b = load_csv(p);
  REQUIRE(a.instances.size() == b.instances.size());
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    CHECK(a.instances[i].values == b.instances[i].values);
    CHECK(a.instances[i].label == b.instances[i].label);
  }
  CHECK(make_5x2(a, 42).assignments == make_5x2(b, 42).assignments);
}

TEST_CASE("splitting needs both classes twice") {
  Dataset ds = toy(10);
  for (auto& inst : ds.instances) inst.label = Label::Positive;
  ds.instances[0].label = Label::Negative;
  CHECK_THROWS(make_5x2(ds, 1));
}
