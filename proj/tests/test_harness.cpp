#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bbh/harness.hpp"

using namespace bbh;

namespace {

Config make(std::initializer_list<std::pair<const char*, const char*>> kv) {
  Config c;
  for (auto [k, v] : kv) c.set(k, v);
  return c;
}

const OutputFile* find_file(const RunOutput& out, const std::string& suffix) {
  for (const auto& f : out.files)
    if (f.name.size() >= suffix.size() && f.name.compare(f.name.size() - suffix.size(), suffix.size(), suffix) == 0)
      return &f;
  return nullptr;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in("# comment\np = 3\nq = 5, 7\nN = 1e5\n\nseed=4\n");
  const Config c = Config::parse(in, "t.cfg");
  CHECK(c.integer("p") == 3);
  CHECK(c.integers("q") == std::vector<long long>{5, 7});
  CHECK(c.integer("N") == 100000);
  CHECK(c.integer("seed") == 4);
  CHECK(c.integer("g", 9) == 9);

  std::istringstream unknown("p = 3\nbogus = 1\n");
  try {
    Config::parse(unknown, "t.cfg");
    FAIL("unknown key accepted");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("t.cfg:2") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  std::istringstream malformed("p 3\n");
  CHECK_THROWS_AS(Config::parse(malformed), ArgumentError);
  Config d;
  CHECK_THROWS_AS(d.set("nope", "1"), ArgumentError);
}

TEST_CASE("flags override file values and the hash ignores output settings") {
  std::istringstream in("p = 3\nc = 1\n");
  Config c = Config::parse(in);
  c.set("c", "2");
  CHECK(c.integer("c") == 2);
  Config a = make({{"p", "3"}, {"c", "2"}});
  CHECK(a.hash() == c.hash());
  a.set("out", "/tmp/x");
  a.set("workers", "4");
  CHECK(a.hash() == c.hash());
  a.set("seed", "1");
  CHECK(a.hash() != c.hash());
}

TEST_CASE("caps must be positive") {
  CHECK_THROWS_AS(caps_from_config(make({{"cap-pc-order", "0"}})), ArgumentError);
  CHECK(caps_from_config(make({{"cap-tuples", "12"}})).enumeration_tuples == 12);
}

TEST_CASE("moment experiment") {
  const RunOutput out = run_experiment("moment", make({{"group", "Z3"}, {"c", "1"}, {"D", "8"}, {"check", "1"}}));
  CHECK(std::abs(out.summary["value"].get<double>() - 1) < 1e-6);
  CHECK(out.check_passed);
  CHECK_THROWS_AS(run_experiment("moment", make({{"group", "Z3"}, {"mode", "empirical"}, {"N", "10"}})),
                  ArgumentError);
  CHECK_THROWS_AS(run_experiment("moment", make({{"group", "Z4"}})), ArgumentError);
  CHECK_THROWS_AS(run_experiment("nonsense", Config{}), ArgumentError);
}

TEST_CASE("enumeration experiment") {
  const RunOutput out = run_experiment("enumerate-bbh", make({{"g", "2"}, {"c", "2"}, {"check", "1"}}));
  CHECK(out.check_passed);
  const OutputFile* csv = find_file(out, ".csv");
  REQUIRE(csv);
  CHECK(csv->content.find("16/27") != std::string::npos);
  CHECK(csv->content.find("1/81") != std::string::npos);
}

TEST_CASE("function-field scan experiment") {
  const RunOutput out = run_experiment("ff-scan", make({{"q", "5"}, {"m", "1"}, {"group", "Z3"}}));
  CHECK(out.summary["scans"][0]["field_count"].get<std::uint64_t>() == 100);
}

TEST_CASE("identical configurations give identical outputs") {
  const Config c = make({{"g", "2"}, {"c", "2"}, {"N", "500"}, {"seed", "8"}});
  const RunOutput a = run_experiment("sample-bbh", c);
  Config c3 = c;
  c3.set("workers", "3");
  const RunOutput b = run_experiment("sample-bbh", c3);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i].content == b.files[i].content);
  CHECK(a.summary.dump() == b.summary.dump());

  const auto dir = std::filesystem::temp_directory_path() / "bbh_harness_test";
  std::filesystem::remove_all(dir);
  Config w = c;
  w.set("out", dir.string());
  write_outputs("sample-bbh", w, a);
  CHECK(std::filesystem::exists(dir / "sample-bbh_summary.json"));
  CHECK(std::filesystem::exists(dir / "sample-bbh_meta.json"));
  std::ifstream meta(dir / "sample-bbh_meta.json");
  const auto j = nlohmann::json::parse(meta);
  CHECK(j["config_hash"] == c.hash());
  std::filesystem::remove_all(dir);
}

TEST_CASE("presentation cache round trip through qfree") {
  const auto dir = std::filesystem::temp_directory_path() / "bbh_qfree_test";
  std::filesystem::remove_all(dir);
  Config c = make({{"g", "2"}, {"c", "2"}});
  c.set("out", dir.string());
  const RunOutput out = run_experiment("qfree", c);
  write_outputs("qfree", c, out);
  const auto pc = dir / "qfree_p3_g2_c2.pc";
  REQUIRE(std::filesystem::exists(pc));
  const RunOutput m = run_experiment("moment", make({{"group", ("@" + pc.string()).c_str()}, {"c", "2"}, {"D", "2"}}));
  CHECK(m.summary["value"].get<double>() > 0);
  std::filesystem::remove_all(dir);
}
