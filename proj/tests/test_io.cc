#include <doctest.h>

#include <filesystem>

#include "scissortruss/io.hpp"

using namespace scissortruss;

namespace {

const std::filesystem::path kData = SCISSORTRUSS_TEST_DATA_DIR;

}  // namespace

TEST_CASE("csv parsing") {
  const CsvTable t = parse_csv("a,b,c\n1,\"x, y\",\"say \"\"hi\"\"\"\n\n2,\"multi\nline\",\r\n");
  REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x, y");
  CHECK(t.rows[0][2] == "say \"hi\"");
  CHECK(t.rows[1][1] == "multi\nline");
  CHECK(t.rows[1][2] == "");
  CHECK(t.column("c") == 2);
  CHECK_THROWS_AS(t.column("d"), IoError);

  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), IoError);
  CHECK_THROWS_AS(parse_csv("a,b\n\"open,2\n"), IoError);
}

TEST_CASE("csv round trip") {
  CsvTable t;
  t.header = {"name", "value", "note"};
  t.rows = {{"plain", csv_number(0.1414), ""},
            {"comma,name", csv_number(-2400.584), "quote \" inside"},
            {"line\nbreak", csv_number(1e-12), "x"}};
  const CsvTable back = parse_csv(to_csv(t));
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);

  const auto dir = std::filesystem::temp_directory_path() / "scissortruss_io_test";
  std::filesystem::create_directories(dir);
  write_csv(dir / "t.csv", t);
  CHECK(read_csv(dir / "t.csv").rows == t.rows);
  std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting and parsing") {
  CHECK(csv_number(6.4704761) == "6.47048");
  CHECK(csv_number(2400.937) == "2400.94");
  CHECK(csv_number(0.0) == "0");
  CHECK(parse_number("0.1182").value() == 0.1182);
  CHECK(parse_number("-3e2").value() == -300.0);
  CHECK_FALSE(parse_number("1.2 Hz").has_value());
  CHECK_FALSE(parse_number("").has_value());
  CHECK_FALSE(parse_number("6m").has_value());

  for (double v : {0.123456, 98765.4, -1.5e-7, 3.0}) {
    const double back = parse_number(csv_number(v)).value();
    CHECK(csv_number(back) == csv_number(v));
  }
}

TEST_CASE("missing files raise io errors") {
  CHECK_THROWS_AS(read_csv(kData / "no_such_file.csv"), IoError);
  CHECK_THROWS_AS(read_text(kData / "no_such_file.txt"), IoError);
  CHECK_THROWS_AS(load_materials(kData / "no_such_file.csv"), IoError);
  CHECK_THROWS_AS(load_frequency_references(kData / "no_such_file.csv"), IoError);
}

TEST_CASE("frequency references keep their source text") {
  const auto refs = load_frequency_references(kData / "frequency_reference.csv");
  REQUIRE(refs.size() == 7);
  CHECK(refs[1].natural_text == "1.0 Hz");
  CHECK(refs[2].natural_text == "0.14 Hz (14 units) 0.25 Hz (7 units)");
  CHECK_FALSE(refs[2].natural_hz.has_value());
  CHECK(refs[3].natural_text == "0.85 - 1 Hz");
  CHECK_FALSE(refs[3].natural_hz.has_value());
  CHECK(refs[4].aperture.value() == 25.0);
  CHECK(refs[4].natural_hz.value() == 0.0652);
  CHECK(refs[4].sim_with_links_hz.value() == 0.1182);
  CHECK_FALSE(refs[5].sim_with_links_hz.has_value());

  const auto antennas = load_antenna_references(kData / "existing_antennas.csv");
  REQUIRE(antennas.size() == 6);
  for (const auto& a : antennas) CHECK(a.is_antenna_row);
}

TEST_CASE("deployment time references") {
  const auto rows = load_deployment_times(kData / "deployment_times.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].complete_deployed_s.value() == 53.0);
  CHECK(rows[0].complete_cycle_s.value() == 102.0);
  CHECK_FALSE(rows[1].complete_cycle_s.has_value());
}

TEST_CASE("material table validation") {
  const auto dir = std::filesystem::temp_directory_path() / "scissortruss_io_materials";
  std::filesystem::create_directories(dir);
  const std::string header =
      "material,youngs_modulus_gpa,density_g_cm3,poissons_ratio,cte_um_m_c,yield_strength_mpa,"
      "tensile_strength_mpa,ultimate_strength_mpa,elastic_limit_mpa,breaking_strength_mpa,"
      "failure_mode,max_temperature_c,min_temperature_c\n";
  write_text(dir / "bad.csv", header + "X,-1,1,0.3,1,1,2,3,1,2,B,200,\n");
  CHECK_THROWS(load_materials(dir / "bad.csv"));
  write_text(dir / "mode.csv", header + "X,1,1,0.3,1,1,2,3,1,2,Q,200,\n");
  CHECK_THROWS(load_materials(dir / "mode.csv"));
  write_text(dir / "ok.csv", header + "X,1,1,0.3,1,1,2,3,1,2,D.,200,-150\n");
  const auto ok = load_materials(dir / "ok.csv");
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].failure_mode == FailureMode::kDuctile);
  CHECK(ok[0].min_temperature.value() == -150.0);
  std::filesystem::remove_all(dir);
}
