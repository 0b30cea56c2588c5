#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "groundwave/errors.hpp"
#include "groundwave_cli/commands.hpp"
#include "groundwave_cli/config.hpp"

using namespace groundwave;
using namespace groundwave::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kBundled = fs::path(GROUNDWAVE_CONFIG_DIR) / "reference.json";

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "groundwave");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("groundwave-cli-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path operator/(const std::string& name) const { return path / name; }
};

// Bundled config with a few fields patched.
fs::path patched_config(const TempDir& dir, const std::string& name,
                        const std::function<void(nlohmann::json&)>& patch) {
  nlohmann::json j = nlohmann::json::parse(slurp(kBundled));
  patch(j);
  const fs::path p = dir / name;
  spit(p, j.dump(2));
  return p;
}

}  // namespace

TEST_CASE("bundled config parses to the built-in defaults") {
  const Config cfg = load_config(kBundled);
  Config defaults;
  CHECK(cfg == defaults);
  CHECK(cfg.scenario.geom.tilt_tx_deg == 20.0);
  CHECK(cfg.targets.gr.size() == 18);
}

TEST_CASE("config round trip is lossless") {
  Config c;
  c.scenario.geom.d_tr_m = 7.25;
  c.scenario.surface = Surface::OutdoorGravel;
  c.scenario.rx_codebook.elevation_rows_deg = {-20.0, 0.0};
  c.scenario.nlos.enabled = false;
  c.scenario.policy = PolicyKind::ScanPlusModel;
  c.scenario.seed = 1234567890123ULL;
  c.scenario.blockage.rate_per_s = 0.125;
  c.scenario.protocol.hysteresis_db = 1.5;
  c.max_residual_db = 2.0;
  c.targets.gr.resize(3);
  const Config back = parse_config(serialize_config(c));
  CHECK(back == c);
  CHECK(serialize_config(back) == serialize_config(c));
}

TEST_CASE("missing keys keep their defaults") {
  const Config c = parse_config(R"({"site": {"tilt_deg": 10}})");
  CHECK(c.scenario.geom.tilt_tx_deg == 10.0);
  CHECK(c.scenario.geom.h_tx_m == 2.5);
  CHECK(c.targets == reference_targets());
  CHECK(parse_config("{}") == Config{});
}

TEST_CASE("unknown keys and wrong types are rejected") {
  CHECK_THROWS_AS(parse_config(R"({"site": {"tilt": 10}})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"sight": {}})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"site": {"tilt_deg": "ten"}})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"site": {"surface": "marble"}})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"simulation": {"policy": "magic"}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"calibration": {"gr_targets": [{"surfce": 1}]}})"),
                  FormatError);
  CHECK_THROWS_AS(parse_config("[1, 2"), FormatError);
}

TEST_CASE("sweep axis parsing") {
  const SweepAxis a = parse_axis("tilt_deg=0,10,20");
  CHECK(a.parameter == "tilt_deg");
  CHECK(a.values == std::vector<double>{0.0, 10.0, 20.0});
  CHECK_THROWS_AS(parse_axis("tilt_deg"), InvalidArgument);
  CHECK_THROWS_AS(parse_axis("=1,2"), InvalidArgument);
  CHECK_THROWS_AS(parse_axis("tilt_deg=1,x"), InvalidArgument);
  CHECK_THROWS_AS(parse_axis("tilt_deg=1.5abc"), InvalidArgument);
}

TEST_CASE("calibrate writes a deterministic report within 1 dB") {
  TempDir dir;
  const Result a = invoke({"calibrate", kBundled.string(), "--out", (dir / "a.json").string()});
  REQUIRE(a.code == kExitOk);
  const Result b = invoke({"calibrate", kBundled.string(), "--out", (dir / "b.json").string()});
  REQUIRE(b.code == kExitOk);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  const Calibration cal = calibration_from_json(slurp(dir / "a.json"));
  CHECK(cal.max_abs_residual_db() <= 1.0);
  CHECK(cal.rows.size() == 18);
}

TEST_CASE("contradictory targets fail calibration with a report") {
  TempDir dir;
  const fs::path cfg = patched_config(dir, "bad.json", [](nlohmann::json& j) {
    auto& rows = j["calibration"]["gr_targets"];
    rows[0]["rss_dbm"] = rows[1]["rss_dbm"].get<double>() - 10.0;
  });
  const Result r = invoke({"calibrate", cfg.string(), "--out", (dir / "cal.json").string()});
  CHECK(r.code == kExitCalibration);
  CHECK(r.err.find("calibration failed") != std::string::npos);
  CHECK(fs::exists(dir / "cal.json"));
}

TEST_CASE("usage errors exit with 2") {
  TempDir dir;
  CHECK(invoke({}).code == kExitUsage);
  CHECK(invoke({"fly"}).code == kExitUsage);
  CHECK(invoke({"run", (dir / "missing.json").string()}).code == kExitUsage);
  CHECK(invoke({"run", kBundled.string(), "--policy", "teleport"}).code == kExitUsage);
  CHECK(invoke({"run", kBundled.string(), "--horizon-s", "-3"}).code == kExitUsage);
  spit(dir / "broken.json", "{\"site\": ");
  CHECK(invoke({"calibrate", (dir / "broken.json").string()}).code == kExitUsage);
  CHECK(invoke({"--help"}).code == kExitOk);
}

TEST_CASE("run without any calibration names the calibrate command") {
  TempDir dir;
  const fs::path cfg = patched_config(
      dir, "nocal.json", [](nlohmann::json& j) { j["calibration"]["gr_targets"] = nlohmann::json::array(); });
  const Result r = invoke({"run", cfg.string(), "--out", dir.path.string()});
  CHECK(r.code == kExitCalibration);
  CHECK(r.err.find("groundwave calibrate") != std::string::npos);
}

TEST_CASE("run with a stored calibration and repeated seeds is reproducible") {
  TempDir dir;
  REQUIRE(invoke({"calibrate", kBundled.string(), "--out", (dir / "cal.json").string()}).code == 0);
  const auto run_into = [&](const std::string& sub) {
    return invoke({"run", kBundled.string(), "--calibration", (dir / "cal.json").string(),
                   "--seed", "7", "--horizon-s", "20", "--out", (dir / sub).string()});
  };
  const Result a = run_into("a");
  const Result b = run_into("b");
  REQUIRE(a.code == kExitOk);
  REQUIRE(b.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("gr: outage ", 0) == 0);
  for (const char* f : {"metrics.csv", "trace.csv", "outcomes.csv"}) {
    CAPTURE(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK_FALSE(slurp(dir / "a" / f).empty());
  }
}

TEST_CASE("reference run survives every event") {
  TempDir dir;
  const Result r = invoke({"run", kBundled.string(), "--out", dir.path.string()});
  REQUIRE(r.code == kExitOk);
  const auto pos = r.out.find("survived ");
  REQUIRE(pos != std::string::npos);
  int survived = 0;
  int total = -1;
  char slash = 0;
  std::istringstream(r.out.substr(pos + 9)) >> survived >> slash >> total;
  CHECK(total > 0);
  CHECK(survived == total);
}

TEST_CASE("compare reports 3 and 25 measurements") {
  TempDir dir;
  const Result r = invoke({"compare", kBundled.string(), "--out", dir.path.string()});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(dir / "comparison.csv");
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "policy,measurements,outage_ms,mean_rss_during_blockage_dbm,note");
  std::map<std::string, std::string> measurements;
  while (std::getline(is, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    measurements[line.substr(0, c1)] = line.substr(c1 + 1, c2 - c1 - 1);
  }
  CHECK(measurements.size() == 4);
  CHECK(measurements["gr"] == "3.00");
  CHECK(measurements["exhaustive"] == "25.00");
  CHECK(measurements["scan-model"] == "25.00");
}

TEST_CASE("zero blockage rate gives zero outage everywhere") {
  TempDir dir;
  const fs::path cfg = patched_config(
      dir, "calm.json", [](nlohmann::json& j) { j["blockage"]["rate_per_s"] = 0.0; });
  REQUIRE(invoke({"compare", cfg.string(), "--horizon-s", "10", "--out", dir.path.string()}).code ==
          0);
  std::istringstream is(slurp(dir / "comparison.csv"));
  std::string line;
  std::getline(is, line);
  int rows = 0;
  while (std::getline(is, line)) {
    const auto c2 = line.find(',', line.find(',') + 1);
    const auto c3 = line.find(',', c2 + 1);
    CHECK(line.substr(c2 + 1, c3 - c2 - 1) == "0.000");
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("single-row receive codebook flags GRD as impossible") {
  TempDir dir;
  const fs::path cfg = patched_config(dir, "flat.json", [](nlohmann::json& j) {
    j["rx_codebook"]["elevation_rows_deg"] = nlohmann::json::array({0.0});
    j["rx_codebook"]["el_beamwidth_deg"] = 60.0;
  });
  // Refitting against a flat codebook cannot explain the table rows; reuse
  // the reference calibration instead.
  REQUIRE(invoke({"calibrate", kBundled.string(), "--out", (dir / "cal.json").string()}).code == 0);
  CHECK(invoke({"calibrate", cfg.string(), "--out", (dir / "flat_cal.json").string()}).code ==
        kExitCalibration);
  const Result r = invoke({"compare", cfg.string(), "--calibration", (dir / "cal.json").string(),
                           "--horizon-s", "10", "--out", dir.path.string()});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(dir / "comparison.csv");
  const auto gr_line = csv.substr(csv.find("\ngr,") + 1);
  CHECK(gr_line.substr(0, gr_line.find('\n')).find("GRD impossible") != std::string::npos);
}

TEST_CASE("trace, sweep, codebook and events commands") {
  TempDir dir;
  const std::string out = dir.path.string();
  REQUIRE(invoke({"trace", kBundled.string(), "--horizon-s", "5", "--out", out}).code == 0);
  const std::string transitions = slurp(dir / "transitions.csv");
  CHECK(transitions.rfind("time_ms,mode_before,event,mode_after,actions\n", 0) == 0);
  CHECK(transitions.find(",IA,RssSample,NOp,SwitchRxBeam(") != std::string::npos);

  REQUIRE(invoke({"sweep", kBundled.string(), "--horizon-s", "5", "--vary", "tilt_deg=0,10,20",
                  "--out", out})
              .code == 0);
  const std::string sweep_csv = slurp(dir / "sweep.csv");
  CHECK(std::count(sweep_csv.begin(), sweep_csv.end(), '\n') == 4);
  CHECK(invoke({"sweep", kBundled.string(), "--vary", "bogus=1", "--out", out}).code == kExitUsage);

  const Result cb = invoke({"codebook", kBundled.string(), "--side", "rx"});
  REQUIRE(cb.code == 0);
  CHECK(codebook_from_json(cb.out).size() == 75);
  REQUIRE(invoke({"codebook", kBundled.string(), "--side", "tx", "--out",
                  (dir / "tx.json").string()})
              .code == 0);
  CHECK(codebook_from_json(slurp(dir / "tx.json")).size() == 25);

  REQUIRE(invoke({"events", kBundled.string(), "--out", (dir / "ev.csv").string()}).code == 0);
  const auto events = events_from_csv(slurp(dir / "ev.csv"));
  CHECK_FALSE(events.empty());
  // Replaying the exported events reproduces the generated run.
  REQUIRE(invoke({"run", kBundled.string(), "--out", (dir / "gen").string()}).code == 0);
  REQUIRE(invoke({"run", kBundled.string(), "--events", (dir / "ev.csv").string(), "--out",
                  (dir / "replay").string()})
              .code == 0);
  CHECK(slurp(dir / "gen" / "metrics.csv") == slurp(dir / "replay" / "metrics.csv"));
}
