#include <doctest.h>

#include <json.hpp>

#include "prefkit/report.hpp"

using namespace prefkit;
using nlohmann::json;

TEST_CASE("numbers format to six significant digits") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333");
  CHECK(format_number(123456789.0) == "1.23457e+08");
  CHECK(format_number(0.000123456789) == "0.000123457");
}

TEST_CASE("config hashes are stable and sensitive") {
  auto a = fnv1a_hex("seed=1\n");
  auto b = fnv1a_hex("seed=1\n");
  auto c = fnv1a_hex("seed=2\n");
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.size() == 16);
}

TEST_CASE("score csv carries the meta comment, ranks, and undefined rows") {
  ScoreTable table;
  table.function = "win";
  table.rows = {{1, 0.75, 0.7, 0.8, 12, true},
                {2, 0.0, 0.0, 0.0, 0, false},
                {3, 0.25, 0.2, 0.3, 12, true}};
  auto ranking = rank_from_scores(table);
  auto meta = make_meta("config text");
  auto csv = score_table_csv(table, &ranking, meta);
  CHECK(csv.rfind("# prefkit/", 0) == 0);
  CHECK(csv.find("config=" + meta.config_hash) != std::string::npos);
  CHECK(csv.find("1,0.75,0.7,0.8,12,1") != std::string::npos);
  CHECK(csv.find("3,0.25,0.2,0.3,12,2") != std::string::npos);
  CHECK(csv.find("2,,,,0,") != std::string::npos);  // undefined row
}

TEST_CASE("score json embeds meta and parses back") {
  ScoreTable table;
  table.function = "win";
  table.rows = {{1, 0.123456789123, 0.1, 0.2, 5, true}};
  auto meta = make_meta("cfg");
  auto text = score_table_json(table, nullptr, meta);
  auto doc = json::parse(text);
  CHECK(doc["meta"]["tool"] == "prefkit");
  CHECK(doc["meta"]["config_hash"] == meta.config_hash);
  CHECK(doc["function"] == "win");
  // full precision survives the round trip
  CHECK(doc["scores"][0]["mean"].get<double>() == 0.123456789123);
}

TEST_CASE("divisiveness csv flags undefined proposals") {
  DivisivenessTable table;
  table.metric = "pairwise";
  table.rows = {{1, 0.5, 0.4, 0.6, 3, true}, {2, 0.0, 0.0, 0.0, 0, false}};
  std::vector<DivisivenessTable> tables = {table};
  auto csv = divisiveness_csv(tables, make_meta("cfg"));
  CHECK(csv.find("1,pairwise,0.5,0.4,0.6,3,") != std::string::npos);
  CHECK(csv.find("2,pairwise,,,,0,undefined") != std::string::npos);
}

TEST_CASE("suspicion report serializes users with criteria") {
  SuspicionReport report;
  report.users["bot"] = {{1, 4}, true};
  report.users["ok"] = {{}, false};
  report.disabled_criteria = {2, 5};
  auto text = suspicion_report_json(report, make_meta("cfg"));
  auto doc = json::parse(text);
  CHECK(doc["flagged_count"] == 1);
  CHECK(doc["disabled_criteria"] == json::array({2, 5}));
  REQUIRE(doc["users"].size() == 2);
  CHECK(doc["users"][0]["user_id"] == "bot");
  CHECK(doc["users"][0]["criteria"] == json::array({1, 4}));
  CHECK(doc["users"][0]["flagged"] == true);
}

TEST_CASE("audit report json includes every section") {
  AuditBundle bundle;
  bundle.efficiency = 0.8125;
  IiaReport iia;
  iia.threshold = 4;
  iia.robustness = 0.9;
  iia.top_robustness = 1.0;
  iia.cells = 10;
  iia.violations = 1;
  IiaRemoval removal;
  removal.removed_id = 2;
  removal.distances = {{1, 0}, {3, 1}};
  iia.removals.push_back(removal);
  bundle.iia = iia;
  ConvergenceReport convergence;
  convergence.points.push_back({100, 0.8, 0.7, 0.9, {0.7, 0.8, 0.9}});
  convergence.converged_size = 100;
  bundle.convergence = convergence;
  SpectralReport spectral;
  spectral.n = 2;
  spectral.k = 1;
  spectral.singular_values = {2.0, 1.0};
  spectral.variance_share = {0.8, 0.2};
  spectral.left_vectors = {{0.9, 0.1}};
  spectral.right_vectors = {{0.5, 0.5}};
  spectral.factors = {{0.9, 0.9, 0.1, 0.1}};
  bundle.spectral = spectral;

  auto text = audit_report_json(bundle, make_meta("cfg"));
  auto doc = json::parse(text);
  CHECK(doc["efficiency"].get<double>() == 0.8125);
  CHECK(doc["iia"]["robustness"].get<double>() == 0.9);
  CHECK(doc["iia"]["removals"][0]["distances"]["3"] == 1);
  CHECK(doc["convergence"]["points"][0]["median"].get<double>() == 0.8);
  CHECK(doc["convergence"]["converged_size"] == 100);
  CHECK(doc["spectral"]["factors"][0]["variance_share"].get<double>() == 0.8);
}
