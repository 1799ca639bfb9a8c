#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "geoflow/error.hpp"
#include "geoflow/flows.hpp"
#include "geoflow/text_io.hpp"
#include "helpers.hpp"

using namespace geoflow;
using namespace testing_util;

namespace {

std::vector<Region> populations(std::vector<std::pair<std::string, std::int64_t>> pops) {
  std::vector<Region> out;
  double w = 0;
  for (auto& [id, p] : pops) {
    out.push_back(box_region(id, 0, w, 1, w + 1, p));
    w += 1;
  }
  return out;
}

double share_sum(const FlowTable& t) {
  double s = 0;
  for (const auto& r : t.rows) s += r.share;
  return s;
}

}  // namespace

TEST_CASE("per-capita shares") {
  const auto pops = populations({{"A", 1000}, {"B", 100}});
  const auto t = flow_table_from_counts("D", {{"A", 100}, {"B", 50}}, pops);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].origin == "B");
  CHECK(std::abs(t.rows[0].share - 5.0 / 6.0) < 1e-15);
  CHECK(std::abs(t.find("A")->share - 1.0 / 6.0) < 1e-15);
  CHECK(t.find("A")->weight == doctest::Approx(0.1));
  CHECK(std::abs(share_sum(t) - 1.0) < 1e-9);
  CHECK(t.rows[0].rank == 1);
  CHECK(t.rows[1].rank == 2);

  const auto single = flow_table_from_counts("D", {{"A", 3}}, pops);
  CHECK(single.rows[0].share == 1.0);

  const auto equal = flow_table_from_counts("D", {{"A", 100}, {"B", 10}}, pops);
  CHECK(equal.rows[0].share == doctest::Approx(0.5));
  CHECK(equal.rows[0].rank == equal.rows[1].rank);
  CHECK(equal.rows[0].origin == "A");
}

TEST_CASE("scaling populations or counts keeps shares and the leader") {
  const auto pops = populations({{"A", 1000}, {"B", 300}, {"C", 50}});
  const auto scaled = populations({{"A", 7000}, {"B", 2100}, {"C", 350}});
  const std::map<std::string, std::size_t> counts{{"A", 40}, {"B", 30}, {"C", 2}};
  const auto a = flow_table_from_counts("D", counts, pops);
  const auto b = flow_table_from_counts("D", counts, scaled);
  for (const auto& r : a.rows) CHECK(b.find(r.origin)->share == doctest::Approx(r.share).epsilon(1e-12));
  const auto c = flow_table_from_counts("D", {{"A", 400}, {"B", 300}, {"C", 20}}, pops);
  CHECK(c.rows[0].origin == a.rows[0].origin);
}

TEST_CASE("excluded origins and empty tables") {
  const auto pops = populations({{"A", 1000}, {"Z", 0}});
  const auto t = flow_table_from_counts("D", {{"A", 5}, {"Z", 3}, {"Q", 1}}, pops);
  CHECK(t.excluded_origins == std::vector<std::string>{"Q", "Z"});
  CHECK(t.excluded_users == 4);
  CHECK_THROWS_AS(flow_table_from_counts("D", {{"Z", 3}}, pops), Error);
  try {
    flow_table_from_counts("D", {}, pops);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_table);
  }
}

TEST_CASE("build_flow_table counts undetermined users") {
  const auto pops = populations({{"A", 1000}, {"B", 100}});
  std::vector<HomeEstimate> est(4);
  est[0].region_id = "A";
  est[1].region_id = "B";
  est[2].region_id = "B";
  const auto t = build_flow_table(est, "D", pops);
  CHECK(t.undetermined == 1);
  CHECK(t.total_users == 4);
  CHECK(t.coverage() == doctest::Approx(0.75));
}

TEST_CASE("comparison of flow tables") {
  const auto pops = populations({{"A", 1000}, {"B", 1000}, {"C", 1000}});
  const auto base = flow_table_from_counts("D", {{"A", 50}, {"B", 30}, {"C", 20}}, pops);
  const auto same = compare_flows(base, base, 10);
  for (const auto& r : same.rows) {
    CHECK(r.share_delta == 0.0);
    CHECK(r.rank_baseline == r.rank_event);
  }
  const auto event = flow_table_from_counts("D", {{"A", 50}, {"N", 30}}, populations({{"A", 1000}, {"N", 1000}}));
  const auto cmp = compare_flows(base, event, 10);
  const auto it = std::find_if(cmp.rows.begin(), cmp.rows.end(), [](auto& r) { return r.origin == "N"; });
  REQUIRE(it != cmp.rows.end());
  CHECK(it->share_baseline == 0.0);
  CHECK(it->share_delta > 0.0);
  const auto top1 = compare_flows(base, event, 1);
  CHECK(top1.rows.size() == 1);  // A leads both tables
  auto other = event;
  other.destination = "E";
  CHECK_THROWS_AS(compare_flows(base, other, 3), Error);
}

TEST_CASE("flow csv round trip") {
  const auto pops = populations({{"A", 1000}, {"B", 100}});
  const std::vector<FlowTable> tables{flow_table_from_counts("D", {{"A", 100}, {"B", 50}}, pops),
                                      flow_table_from_counts("E", {{"A", 1}}, pops)};
  const auto path = std::filesystem::temp_directory_path() / "geoflow_flows.csv";
  write_file(path, flows_to_csv(tables));
  const auto back = flows_from_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].rows[0].share == tables[0].rows[0].share);
  CHECK(back[1].destination == "E");
  std::filesystem::remove(path);
  const auto csv = comparison_to_csv(std::vector<FlowComparison>{compare_flows(tables[0], tables[0], 5)});
  CHECK(csv.rfind("destination,origin,share_baseline", 0) == 0);
}
