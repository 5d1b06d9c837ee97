#include <doctest.h>

#include "prefkit/csv.hpp"
#include "prefkit/errors.hpp"
#include "prefkit/instant.hpp"

using namespace prefkit;

TEST_CASE("instant parses RFC-3339 forms") {
  auto t = parse_instant("2022-04-01T12:30:45Z");
  REQUIRE(t.has_value());
  CHECK(format_instant(*t) == "2022-04-01T12:30:45Z");

  auto space = parse_instant("2022-04-01 12:30:45");
  REQUIRE(space.has_value());
  CHECK(space->micros == t->micros);

  auto frac = parse_instant("2022-04-01T12:30:45.250000Z");
  REQUIRE(frac.has_value());
  CHECK(frac->micros == t->micros + 250000);
  CHECK(format_instant(*frac) == "2022-04-01T12:30:45.250000Z");

  auto offset = parse_instant("2022-04-01T14:30:45+02:00");
  REQUIRE(offset.has_value());
  CHECK(offset->micros == t->micros);

  auto negative = parse_instant("2022-04-01T10:30:45-02:00");
  REQUIRE(negative.has_value());
  CHECK(negative->micros == t->micros);
}

TEST_CASE("instant rejects malformed input") {
  CHECK_FALSE(parse_instant("").has_value());
  CHECK_FALSE(parse_instant("2022-04-01").has_value());
  CHECK_FALSE(parse_instant("2022-13-01T00:00:00Z").has_value());
  CHECK_FALSE(parse_instant("2022-04-01T25:00:00Z").has_value());
  CHECK_FALSE(parse_instant("not a date").has_value());
  CHECK_FALSE(parse_instant("2022-04-01T12:30:45ZX").has_value());
}

TEST_CASE("instant round-trips across epochs") {
  for (std::int64_t micros : {0LL, -1LL, 1'650'000'000'123'456LL,
                              -86'400'000'000LL, 4'102'444'800'000'000LL}) {
    Instant t{micros};
    auto back = parse_instant(format_instant(t));
    REQUIRE(back.has_value());
    CHECK(back->micros == micros);
  }
}

TEST_CASE("csv parses quoted fields and preserves line numbers") {
  auto table = CsvTable::read_string(
      "a,b,c\n"
      "1,\"x,y\",plain\n"
      "2,\"with \"\"quotes\"\"\",\"multi\nline\"\n"
      "3,,end\n",
      "test.csv");
  REQUIRE(table.rows().size() == 3);
  CHECK(CsvTable::field(table.rows()[0], 1) == "x,y");
  CHECK(CsvTable::field(table.rows()[1], 1) == "with \"quotes\"");
  CHECK(CsvTable::field(table.rows()[1], 2) == "multi\nline");
  CHECK(CsvTable::field(table.rows()[2], 1) == "");
  CHECK(table.rows()[0].line == 2);
  CHECK(table.rows()[1].line == 3);
  CHECK(table.rows()[2].line == 5);  // the quoted newline shifted it
}

TEST_CASE("csv requires named columns") {
  auto table = CsvTable::read_string("a,b\n1,2\n", "test.csv");
  CHECK(table.require_column("b") == 1);
  CHECK_THROWS_WITH_AS(static_cast<void>(table.require_column("missing")),
                       "test.csv: missing required column 'missing'",
                       SchemaError);
}

TEST_CASE("csv escaping round-trips") {
  std::vector<std::string> fields = {"plain", "with,comma", "with\"quote",
                                     "multi\nline", ""};
  auto line = csv_line(fields);
  auto table = CsvTable::read_string("h1,h2,h3,h4,h5\n" + line + "\n", "t");
  REQUIRE(table.rows().size() == 1);
  for (size_t i = 0; i < fields.size(); ++i) {
    CHECK(CsvTable::field(table.rows()[0], i) == fields[i]);
  }
}
