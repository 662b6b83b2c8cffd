#include <doctest.h>

#include "unicorn/core/error.hpp"
#include "unicorn/core/grid_io.hpp"
#include "unicorn/core/registry.hpp"
#include "unicorn/core/serialization.hpp"
#include "unicorn/core/validation.hpp"

using namespace unicorn;

TEST_CASE("registry has twenty ordered tasks") {
  const auto& reg = load_task_registry();
  REQUIRE(reg.size() == 20);
  for (int id = 1; id <= 20; ++id) CHECK(reg.at(id).task_id == id);
  CHECK_THROWS_AS(reg.at(21), Error);
  CHECK(reg.at(12).delivery() == DeliveryMode::batched);
  CHECK(reg.at(20).delivery() == DeliveryMode::per_case);
  CHECK(reg.at(9).dense());
  CHECK_FALSE(reg.at(1).dense());
}

TEST_CASE("registry round trip") {
  const auto& reg = load_task_registry();
  const auto again = parse_registry(serialize_registry(reg));
  REQUIRE(again.size() == reg.size());
  for (const auto& t : reg.all()) CHECK(again.at(t.task_id) == t);
}

TEST_CASE("task config document hides evaluation details") {
  const auto doc = emit_task_config(load_task_registry().at(5));
  const auto text = doc.to_text();
  CHECK(TaskConfigDocument::parse(text) == doc);
  CHECK(text.find("s_ref") == std::string::npos);
  CHECK(text.find("few_shot") == std::string::npos);
  CHECK(text.find("hit_radius") == std::string::npos);
}

TEST_CASE("duplicate task ids are rejected") {
  auto tasks = load_task_registry().all();
  tasks.push_back(tasks.front());
  CHECK_THROWS_AS(TaskRegistry{tasks}, Error);
}

TEST_CASE("grid text round trip") {
  Grid<double> g({2, 3}, {0.5, 2.0});
  for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = 0.1 * double(i) - 0.3;
  CHECK(parse_grid(format_grid(g)) == g);
  Grid<int> m({2, 2, 2}, {3.0, 1.0, 1.0}, 4);
  CHECK(parse_int_grid(format_grid(m)) == m);
  CHECK_THROWS_AS(parse_grid("2 2 2\n1 1\n1 2 3\n"), Error);
}

TEST_CASE("prediction and reference json round trip") {
  const std::vector<Prediction> preds{ClassLabel{3},
                                      Probability{0.25},
                                      ProbabilityVector{{0.1, 0.9}},
                                      Continuous{-1.5},
                                      PointSet{{{{1, 2}, 0.5}}, 0.75},
                                      Mask{Grid<int>({1, 2}, {1, 1}, 1)},
                                      EntitySpans{{{0, 3, "date"}}},
                                      Caption{"benign"},
                                      MultiLabel{{{"psa", 4.2}}},
                                      PairedLabels{1, 5}};
  for (const auto& p : preds) CHECK(prediction_from_json(to_json(p)) == p);
  const std::vector<ReferenceLabel> refs{SurvivalLabel{true, 2.5}, LesionRefs{{{{1, 2, 3}, 6.0}}}, ClassLabel{1}};
  for (const auto& r : refs) CHECK(reference_from_json(to_json(r)) == r);
  CHECK_THROWS_AS(prediction_from_json(json{{"type", "nope"}}), Error);
}

TEST_CASE("stable dump sorts keys") {
  const json j = {{"b", 1}, {"a", {{"d", 2}, {"c", 3}}}};
  const auto s = dump_stable(j);
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("\"c\"") < s.find("\"d\""));
  CHECK(s.back() == '\n');
}

TEST_CASE("format_number round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-12, 123456.789, -0.0})
    CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("prediction validation") {
  const auto& reg = load_task_registry();
  ArchiveItem item;
  item.case_id = "c1";
  item.task_id = 1;
  item.reference = ClassLabel{0};
  const auto bad = validate_prediction(reg.at(1), ClassLabel{9}, item);
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.summary().find("label out of range") != std::string::npos);
  CHECK(validate_prediction(reg.at(1), ClassLabel{5}, item).ok());
  CHECK_FALSE(validate_prediction(reg.at(1), Probability{0.5}, item).ok());
  item.task_id = 2;
  CHECK_FALSE(validate_prediction(reg.at(2), Probability{1.5}, item).ok());
  CHECK_FALSE(validate_prediction(reg.at(2), Probability{std::nan("")}, item).ok());
}

TEST_CASE("representation invariants") {
  Representation r;
  r.case_id = "c1";
  r.case_features = {1, 2, 3};
  CHECK_NOTHROW(check_representation(r));
  r.case_features.push_back(std::nan(""));
  CHECK_THROWS_AS(check_representation(r), Error);
  Representation a, b;
  a.case_id = "a";
  b.case_id = "b";
  a.case_features = {1, 2};
  b.case_features = {1};
  CHECK_THROWS_AS(check_representation_set({a, b}), Error);
}
