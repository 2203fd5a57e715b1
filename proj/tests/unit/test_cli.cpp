#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <json.hpp>
#include <string>

#include "test_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string err;
};

// Runs the CLI with stderr captured to a file.
Outcome cli(const test_util::TempDir& dir, const std::string& args) {
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + FRUGAL_SNN_CLI + "\" " + args + " >/dev/null 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, test_util::read_file(err)};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::vector<std::string> files_under(const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).generic_string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("synth writes data, truth and manifest; same seed twice is identical") {
    test_util::TempDir dir;
    const std::string args = "synth disjoint --patterns 4 --trains 240 --repeats 50 --seed 7 --out ";
    REQUIRE(cli(dir, args + q(dir / "a")).code == 0);
    REQUIRE(cli(dir, args + q(dir / "b")).code == 0);
    for (const auto* f : {"raster.csv", "truth.csv", "manifest.json", "run.ini"}) {
      CAPTURE(f);
      REQUIRE(fs::exists(dir / "a" / f));
      CHECK(test_util::read_file(dir / "a" / f) == test_util::read_file(dir / "b" / f));
    }
    const auto m = json::parse(test_util::read_file(dir / "a/manifest.json"));
    CHECK(m["seed"] == 7);
    CHECK(m["generator"] == "disjoint");
  }

  TEST_CASE("missing output directory parent is reported with its path") {
    test_util::TempDir dir;
    const auto target = dir / "no/such/dir";
    const auto r = cli(dir, "synth disjoint --out " + q(target));
    CHECK(r.code != 0);
    CHECK(r.err.find((dir / "no").string()) != std::string::npos);
    CHECK(cli(dir, "synth disjoint --repeats 1 --out " + q(dir / "slash/")).code == 0);
    CHECK(fs::is_directory(dir / "slash"));
  }

  TEST_CASE("unknown generator and invalid preset are usage errors") {
    test_util::TempDir dir;
    const auto gen = cli(dir, "synth spirals --out " + q(dir / "x"));
    CHECK(gen.code == 2);
    CHECK(gen.err.find("spirals") != std::string::npos);
    const auto preset = cli(dir, "run --preset speech --config " + q(dir / "none.ini"));
    CHECK(preset.code == 2);
  }

  TEST_CASE("config errors and runtime errors have distinct exit codes") {
    test_util::TempDir dir;
    test_util::write_file(dir / "bad.ini", "[lts]\ntau_mm = 3\n");
    const auto cfg_err = cli(dir, "run --config " + q(dir / "bad.ini") + " --out " + q(dir / "o1"));
    CHECK(cfg_err.code == 2);
    CHECK(cfg_err.err.find("lts.tau_mm") != std::string::npos);

    test_util::write_file(dir / "missing.ini", "[input]\npath = absent.csv\n");
    const auto rt_err = cli(dir, "run --config " + q(dir / "missing.ini") + " --out " + q(dir / "o2"));
    CHECK(rt_err.code == 3);
    CHECK(rt_err.err.find("absent.csv") != std::string::npos);
    CHECK(rt_err.err.find("load") != std::string::npos);  // stage name
  }

  TEST_CASE("artificial run reaches F = 1 and reruns byte-for-byte from its manifest") {
    test_util::TempDir dir;
    REQUIRE(cli(dir, "synth disjoint --repeats 10 --seed 3 --out " + q(dir / "data")).code == 0);
    REQUIRE(cli(dir, "run --config " + q(dir / "data/run.ini") + " --out " + q(dir / "r1")).code == 0);
    const auto metrics = json::parse(test_util::read_file(dir / "r1/metrics.json"));
    CHECK(metrics["final"]["f_global"] == 1.0);

    REQUIRE(cli(dir, "run --manifest " + q(dir / "r1/manifest.json") + " --out " + q(dir / "r2")).code == 0);
    const auto files = files_under(dir / "r1");
    CHECK(files == files_under(dir / "r2"));
    for (const auto& f : files) {
      if (f == "manifest.json") continue;  // records wall-clock time
      CAPTURE(f);
      CHECK(test_util::read_file(dir / "r1" / f) == test_util::read_file(dir / "r2" / f));
    }
    const auto m1 = json::parse(test_util::read_file(dir / "r1/manifest.json"));
    const auto m2 = json::parse(test_util::read_file(dir / "r2/manifest.json"));
    CHECK(m1["artifacts"] == m2["artifacts"]);
    CHECK(m1["inputs"] == m2["inputs"]);
    CHECK(m1["config"] == m2["config"]);
  }

  TEST_CASE("vowel preset with STP disabled warns that STP was skipped") {
    test_util::TempDir dir;
    REQUIRE(cli(dir, "synth vowel --repeats 1 --seed 1 --out " + q(dir / "v")).code == 0);
    auto text = test_util::read_file(dir / "v/run.ini");
    const auto at = text.find("[stp]\nenabled = true");
    REQUIRE(at != std::string::npos);
    text.replace(at, 20, "[stp]\nenabled = false");
    test_util::write_file(dir / "v/nostp.ini", text);

    const auto with = cli(dir, "run --config " + q(dir / "v/run.ini") + " --out " + q(dir / "o1"));
    CHECK(with.code == 0);
    CHECK(with.err.find("STP skipped") == std::string::npos);
    const auto without = cli(dir, "run --config " + q(dir / "v/nostp.ini") + " --out " + q(dir / "o2"));
    CHECK(without.code == 0);
    CHECK(without.err.find("STP skipped") != std::string::npos);
  }

  TEST_CASE("subcommands compose: stp, train, eval, inspect, encode") {
    test_util::TempDir dir;
    REQUIRE(cli(dir, "synth disjoint --repeats 3 --seed 1 --out " + q(dir / "d")).code == 0);
    CHECK(cli(dir, "stp --input " + q(dir / "d/raster.csv") + " --out " + q(dir / "s")).code == 0);
    CHECK(fs::exists(dir / "s/stp_mask.csv"));
    CHECK(fs::exists(dir / "s/masked_raster.csv"));
    REQUIRE(cli(dir, "train --input " + q(dir / "d/raster.csv") + " --epochs 3 --out " + q(dir / "t")).code == 0);
    CHECK(fs::exists(dir / "t/weights_final.csv"));
    CHECK(cli(dir, "inspect --weights " + q(dir / "t/weights_final.csv") + " --thresholds " +
                       q(dir / "t/thresholds.csv")).code == 0);
    CHECK(cli(dir, "eval --truth " + q(dir / "d/truth.csv") + " --output " +
                       q(dir / "t/output_raster.csv") + " --out " + q(dir / "m.json")).code == 0);
    CHECK(fs::exists(dir / "m.json"));
    REQUIRE(cli(dir, "synth propagating --seed 2 --out " + q(dir / "p")).code == 0);
    CHECK(cli(dir, "encode --preset neural --input " + q(dir / "p/signal.csv") + " --output " +
                       q(dir / "enc.csv")).code == 0);
    CHECK(fs::exists(dir / "enc.csv"));
  }
}
