#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "spxtrack/errors.hpp"
#include "spxtrack/runner.hpp"
#include "support/synthetic.hpp"

using namespace spxtrack;
using spxtest::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

// Three drifting textured frames plus ground truth, small enough for
// fast end-to-end runs.
struct Fixture {
  TempDir dir{"runner"};
  std::filesystem::path seq = dir.path / "seq";
  std::filesystem::path gt = dir.path / "gt";
  std::filesystem::path out = dir.path / "out";

  Fixture() {
    std::filesystem::create_directories(seq);
    std::filesystem::create_directories(gt);
    spxtest::DriftScene scene;
    scene.width = 48;
    scene.height = 36;
    scene.square = 14;
    scene.start_x = 4;
    scene.start_y = 10;
    scene.background = spxtest::textured_frame(48, 36, 1, 8, 0, 110);
    scene.square_tex = spxtest::textured_frame(14, 14, 2, 5, 150, 255);
    for (int t = 0; t < 3; ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%04d.ppm", t);
      write_frame(scene.frame(t), seq / name);
      std::snprintf(name, sizeof(name), "frame_%04d.png", t);
      write_mask(scene.gt(t), gt / name);
    }
  }

  std::string base_config() const {
    return "sequence_dir = " + seq.string() + "\n" +
           "gt_dir = " + gt.string() + "\n" +
           "output_dir = " + out.string() + "\n" +
           "ref_index = 0\n"
           "integration = DIR\n"
           "superpixels = 8\n"
           "slic_iterations = 4\n"
           "features = 12\n"
           "radius = 5\n"
           "box_sizes = 3\n"
           "trees = 4\n"
           "max_depth = 8\n"
           "min_leaf = 2\n"
           "steps = 1,2\n"
           "budget = 8\n"
           "jobs = 2\n"
           "seed = 5\n";
  }
};

}  // namespace

TEST_CASE("config parsing validates keys and requirements") {
  TempDir dir("config");
  const auto p = dir.path / "run.cfg";

  SUBCASE("a complete config parses") {
    write_text(p,
               "# comment line\n"
               "sequence_dir = /data/seq\n"
               "output_dir = /data/out\n"
               "seed = 7\n"
               "matcher = vote\n"
               "steps = 1, 2, 5\n");
    const RunConfig cfg = parse_run_config(p);
    CHECK(cfg.sequence_dir == "/data/seq");
    CHECK(cfg.tracker.master_seed == 7);
    CHECK(cfg.tracker.matcher == MatcherKind::vote);
    CHECK(cfg.tracker.plan.step_set == std::vector<int>{1, 2, 5});
  }
  SUBCASE("unknown keys are named") {
    write_text(p, "sequence_dir = a\noutput_dir = b\nseed = 1\nbogus_key = 3\n");
    CHECK_THROWS_WITH_AS(parse_run_config(p), doctest::Contains("bogus_key"), ConfigError);
  }
  SUBCASE("seed is mandatory") {
    write_text(p, "sequence_dir = a\noutput_dir = b\n");
    CHECK_THROWS_WITH_AS(parse_run_config(p), doctest::Contains("seed"), ConfigError);
  }
  SUBCASE("bad values name the key") {
    write_text(p, "sequence_dir = a\noutput_dir = b\nseed = 1\ntrees = many\n");
    CHECK_THROWS_WITH_AS(parse_run_config(p), doctest::Contains("trees"), ConfigError);
  }
}

TEST_CASE("a full track stage writes masks, matches, and the manifest") {
  Fixture fx;
  const auto cfg_path = fx.dir.path / "run.cfg";
  write_text(cfg_path, fx.base_config());
  CHECK(run_track(cfg_path, {}, "track") == 0);

  CHECK(std::filesystem::exists(fx.out / "masks" / "frame_0001.png"));
  CHECK(std::filesystem::exists(fx.out / "masks" / "frame_0002.png"));
  CHECK(std::filesystem::exists(fx.out / "matches" / "from_ref_frame_0001.csv"));
  CHECK(std::filesystem::exists(fx.out / "matches" / "to_ref_frame_0002.csv"));
  CHECK(std::filesystem::exists(fx.out / "labels_ref.png"));
  CHECK(std::filesystem::exists(fx.out / "run_manifest.txt"));
  CHECK(std::filesystem::exists(fx.out / "fields" / "field_0001_0000.csv"));
}

TEST_CASE("the manifest is a runnable config that reproduces the run") {
  Fixture fx;
  const auto cfg_path = fx.dir.path / "run.cfg";
  write_text(cfg_path, fx.base_config());
  REQUIRE(run_track(cfg_path, {}, "track") == 0);

  const RunConfig original = parse_run_config(cfg_path);
  const RunConfig echoed = parse_run_config(fx.out / "run_manifest.txt");
  CHECK(echoed.tracker.master_seed == original.tracker.master_seed);
  CHECK(echoed.tracker.plan.step_set == original.tracker.plan.step_set);
  CHECK(echoed.tracker.slic.target_count == original.tracker.slic.target_count);
  CHECK(echoed.integration == original.integration);
  CHECK(std::filesystem::equivalent(echoed.sequence_dir, original.sequence_dir));

  // rerun from the manifest into a fresh output directory
  std::ifstream in(fx.out / "run_manifest.txt");
  std::string manifest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto out2 = fx.dir.path / "out2";
  const auto cache2 = fx.dir.path / "cache2";
  std::string rewritten;
  for (std::size_t pos = 0; pos < manifest.size();) {
    const std::size_t eol = manifest.find('\n', pos);
    std::string line = manifest.substr(pos, eol - pos);
    if (line.rfind("output_dir", 0) == 0) line = "output_dir = " + out2.string();
    if (line.rfind("cache_dir", 0) == 0) line = "cache_dir = " + cache2.string();
    rewritten += line + "\n";
    pos = eol + 1;
  }
  const auto manifest_cfg = fx.dir.path / "manifest.cfg";
  write_text(manifest_cfg, rewritten);
  REQUIRE(run_track(manifest_cfg, {}, "track") == 0);

  for (const char* rel : {"masks/frame_0001.png", "masks/frame_0002.png",
                          "matches/from_ref_frame_0001.csv", "matches/to_ref_frame_0001.csv"}) {
    std::ifstream a(fx.out / rel, std::ios::binary);
    std::ifstream b(out2 / rel, std::ios::binary);
    const std::string da((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string db((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(da == db);
  }
}

TEST_CASE("stage and data errors map to exit codes") {
  Fixture fx;
  const auto cfg_path = fx.dir.path / "run.cfg";

  SUBCASE("missing sequence directory is a data error") {
    write_text(cfg_path, "sequence_dir = " + (fx.dir.path / "nope").string() +
                             "\noutput_dir = " + fx.out.string() + "\nseed = 1\n");
    CHECK(run_track(cfg_path, {}, "track") == 3);
  }
  SUBCASE("unknown config keys are config errors") {
    write_text(cfg_path, fx.base_config() + "mystery = 1\n");
    CHECK(run_track(cfg_path, {}, "track") == 2);
  }
  SUBCASE("unknown stages are config errors") {
    write_text(cfg_path, fx.base_config());
    CHECK(run_track(cfg_path, {}, "fly") == 2);
  }
  SUBCASE("unreadable configs are config errors") {
    CHECK(run_track(fx.dir.path / "absent.cfg", {}, "track") == 2);
  }
}

TEST_CASE("segment stage emits per-frame label maps") {
  Fixture fx;
  const auto cfg_path = fx.dir.path / "run.cfg";
  write_text(cfg_path, fx.base_config());
  REQUIRE(run_track(cfg_path, {}, "segment") == 0);
  for (int t = 0; t < 3; ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "labels_%04d.png", t);
    CHECK(std::filesystem::exists(fx.out / "segmentation" / name));
  }
}

TEST_CASE("eval scores identical masks at dice 1.0") {
  Fixture fx;
  TempDir masks("masks");
  // compare the ground truth against itself, skipping the reference frame
  for (int t = 1; t < 3; ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04d.png", t);
    std::filesystem::copy_file(fx.gt / name, masks.path / name);
  }
  const auto report = fx.dir.path / "report.csv";
  CHECK(run_eval(masks.path, fx.gt, std::nullopt, report) == 0);

  std::ifstream in(report);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("aggregate,1.000000,1.000000,1.000000,1.000000,") != std::string::npos);
}

TEST_CASE("eval validates alignment and content") {
  Fixture fx;
  TempDir masks("masks");
  TempDir empty_gt("gt");
  const auto report = fx.dir.path / "report.csv";

  SUBCASE("empty mask directory") {
    CHECK(run_eval(masks.path, fx.gt, std::nullopt, report) == 3);
  }
  SUBCASE("missing ground-truth frame is named") {
    std::filesystem::copy_file(fx.gt / "frame_0001.png", masks.path / "frame_0001.png");
    CHECK(run_eval(masks.path, empty_gt.path, std::nullopt, report) == 3);
  }
}

TEST_CASE("the all stage runs track plus eval with consistency") {
  Fixture fx;
  const auto cfg_path = fx.dir.path / "run.cfg";
  write_text(cfg_path, fx.base_config());
  REQUIRE(run_track(cfg_path, {}, "all") == 0);
  CHECK(std::filesystem::exists(fx.out / "report.csv"));

  std::ifstream in(fx.out / "report.csv");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // consistency column filled: aggregate row ends with a number, not a comma
  CHECK(text.find("aggregate,") != std::string::npos);
  CHECK(text.rfind(",\n") == std::string::npos);
}

TEST_CASE("pattern-driven sequence listing") {
  Fixture fx;
  const auto files = list_sequence_files(fx.seq, "frame_%04d.ppm");
  REQUIRE(files.size() == 3);
  CHECK(files[0].filename() == "frame_0000.ppm");
  CHECK(files[2].filename() == "frame_0002.ppm");
  CHECK_THROWS_AS(list_sequence_files(fx.seq, "other_%04d.ppm"), DataError);
  CHECK_THROWS_AS(list_sequence_files(fx.dir.path / "missing", ""), DataError);
}

TEST_CASE("SPXTRACK_CACHE overrides the cache directory") {
  Fixture fx;
  const auto cfg_path = fx.dir.path / "run.cfg";
  write_text(cfg_path, fx.base_config());
  const auto env_cache = fx.dir.path / "env_cache";
  setenv("SPXTRACK_CACHE", env_cache.string().c_str(), 1);
  const int rc = run_track(cfg_path, {}, "fields");
  unsetenv("SPXTRACK_CACHE");
  REQUIRE(rc == 0);
  CHECK(std::filesystem::exists(env_cache / "field_0000_0001.csv"));
  CHECK_FALSE(std::filesystem::exists(fx.out / "fields" / "field_0000_0001.csv"));
}

TEST_CASE("cli overrides replace seed and jobs") {
  Fixture fx;
  const auto cfg_path = fx.dir.path / "run.cfg";
  write_text(cfg_path, fx.base_config());
  CliOverrides ov;
  ov.seed = 1234;
  ov.jobs = 1;
  REQUIRE(run_track(cfg_path, ov, "track") == 0);
  std::ifstream in(fx.out / "run_manifest.txt");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("seed = 1234") != std::string::npos);
  CHECK(text.find("jobs = 1") != std::string::npos);
}
