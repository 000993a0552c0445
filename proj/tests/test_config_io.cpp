#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "migsim/config.hpp"
#include "migsim/errors.hpp"
#include "migsim/io.hpp"
#include "migsim/presets.hpp"
#include "migsim/toml.hpp"

using namespace migsim;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static int counter = 0;
  fs::path p = fs::temp_directory_path() /
               ("migsim_io_test_" + std::to_string(counter++));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimalConfig =
    "[run]\n"
    "seed = 42\n";

}  // namespace

TEST_CASE("document parsing covers the supported subset") {
  const std::string text =
      "# leading comment\n"
      "title = \"experiment\"  # trailing comment\n"
      "[model]\n"
      "dimension = 2\n"
      "side = 12.5\n"
      "flag = true\n"
      "times = [0.5, 1.0, 2.0]\n"
      "names = [\"a\", \"b\"]\n"
      "\n"
      "[model.a_plus]\n"
      "amplitude = 0.3\n";
  const auto doc = TomlDocument::parse(text);

  CHECK(doc.get_string("title") == "experiment");
  CHECK(doc.get_int("model.dimension") == 2);
  CHECK(doc.get_double("model.side") == 12.5);
  CHECK(doc.get_double("model.dimension") == 2.0);  // ints widen on demand
  CHECK(doc.get_bool("model.flag"));
  CHECK(doc.get_double_array("model.times") == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(doc.get_double("model.a_plus.amplitude") == 0.3);
  CHECK(doc.has("model.side"));
  CHECK(!doc.has("model.nope"));

  CHECK(doc.get_int("missing", 7) == 7);
  CHECK(doc.get_string("missing", "dflt") == "dflt");
  CHECK(doc.get_double("missing", 1.5) == 1.5);

  CHECK_THROWS_AS(doc.get_int("title"), std::runtime_error);
  CHECK_THROWS_AS(doc.get_double_array("title"), std::runtime_error);
  CHECK_THROWS_AS((void)doc.get_bool("model.side"), std::runtime_error);
}

TEST_CASE("parse errors carry the origin and line") {
  CHECK_THROWS_WITH_AS(TomlDocument::parse("side 12\n", "conf.toml"),
                       doctest::Contains("conf.toml"), std::runtime_error);
  CHECK_THROWS_AS(TomlDocument::parse("x = \"unterminated\n"),
                  std::runtime_error);
  CHECK_THROWS_AS(TomlDocument::parse("[sec\nx = 1\n"), std::runtime_error);
  CHECK_THROWS_AS(TomlDocument::parse("x = [1, \"mix\"]\n"),
                  std::runtime_error);
}

TEST_CASE("canonical form is order independent and drives the hash") {
  const auto a = TomlDocument::parse("b = 2\na = 1\n[s]\nz = 3.5\n");
  const auto b = TomlDocument::parse("[s]\nz = 3.5\n");
  auto c = b;
  c.set("a", static_cast<long long>(1));
  c.set("b", static_cast<long long>(2));
  CHECK(a.canonical() == c.canonical());
  CHECK(fnv1a64(a.canonical()) == fnv1a64(c.canonical()));

  // Round trip through the canonical text reproduces itself.
  const auto again = TomlDocument::parse(a.canonical());
  CHECK(again.canonical() == a.canonical());

  // Reference vectors for the hash primitive.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("override strings parse like file values with bare-word leniency") {
  auto doc = TomlDocument::parse("x = 1\n");
  doc.set_from_string("x", "42");
  CHECK(doc.get_int("x") == 42);
  doc.set_from_string("y", "2.5");
  CHECK(doc.get_double("y") == 2.5);
  doc.set_from_string("z", "true");
  CHECK(doc.get_bool("z"));
  doc.set_from_string("s", "\"quoted\"");
  CHECK(doc.get_string("s") == "quoted");
  doc.set_from_string("bare", "hello");
  CHECK(doc.get_string("bare") == "hello");
  doc.set_from_string("path", "/tmp/some/file.csv");
  CHECK(doc.get_string("path") == "/tmp/some/file.csv");
  doc.set_from_string("arr", "[1.5, 2.5]");
  CHECK(doc.get_double_array("arr") == std::vector<double>{1.5, 2.5});
}

TEST_CASE("experiment config resolution and validation") {
  SUBCASE("defaults resolve from a minimal document") {
    const auto cfg = ExperimentConfig::from_text(kMinimalConfig, "<test>", {});
    CHECK(cfg.dimension == 2);
    CHECK(cfg.side == 20.0);
    CHECK(cfg.seed == 42);
    CHECK(cfg.seed_set);
    CHECK(cfg.replicates == 100);
    CHECK(cfg.init == "empty");
    CHECK(cfg.effective_r_max() == doctest::Approx(5.0));
    CHECK(cfg.effective_kinetic_t_end() == doctest::Approx(10.0));
    cfg.validate();
  }

  SUBCASE("a missing seed is refused by name") {
    const auto cfg = ExperimentConfig::from_text("[run]\nt_end = 1.0\n", "<test>", {});
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("run.seed"),
                         config_error);
  }

  SUBCASE("unknown keys are rejected at load") {
    CHECK_THROWS_WITH_AS(
        ExperimentConfig::from_text("[model]\nsidee = 3\n[run]\nseed = 1\n",
                                    "<test>", {}),
        doctest::Contains("sidee"), config_error);
    CHECK_THROWS_AS(
        ExperimentConfig::from_text("[run]\nseed = 1\n", "<test>",
                                    {"run.sneed=5"}),
        config_error);
  }

  SUBCASE("overrides win over file values") {
    const auto cfg = ExperimentConfig::from_text(
        "[model]\nside = 10.0\n[run]\nseed = 1\n", "<test>",
        {"model.side=14.0", "run.replicates=7"});
    CHECK(cfg.side == 14.0);
    CHECK(cfg.replicates == 7);
    CHECK_THROWS_AS(
        ExperimentConfig::from_text(kMinimalConfig, "<test>", {"oops"}),
        config_error);
  }

  SUBCASE("validation names the offending key") {
    auto bad = [](const std::string& body, const char* needle) {
      const auto cfg = ExperimentConfig::from_text(
          body + "\n[run]\nseed = 1\n", "<test>", {});
      CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains(needle),
                           config_error);
    };
    bad("[model]\ndimension = 3", "model.dimension");
    bad("[model]\nside = -2.0", "model.side");
    bad("[analysis]\nn_max = 9", "analysis.n_max");
    bad("[analysis]\nconfidence = 1.5", "analysis.confidence");
    bad("[kinetic]\nnodes = 2", "kinetic.nodes");
    bad("[kinetic]\ndt = 0.0", "kinetic.dt");

    const auto cfg = ExperimentConfig::from_text(
        "[run]\nseed = 1\ninit = \"nope\"\n", "<test>", {});
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("run.init"),
                         config_error);
  }

  SUBCASE("snapshot schedule must fit the horizon") {
    const auto cfg = ExperimentConfig::from_text(
        "[run]\nseed = 1\nt_end = 2.0\nsnapshot_times = [1.0, 3.0]\n",
        "<test>", {});
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("snapshot_times"),
                         config_error);
  }
}

TEST_CASE("config builds the model and initial condition it names") {
  const std::string text =
      "[model]\n"
      "dimension = 2\n"
      "side = 16.0\n"
      "[model.a_plus]\n"
      "family = \"gaussian\"\n"
      "amplitude = 0.6\n"
      "scale = 0.4\n"
      "[model.a_minus]\n"
      "family = \"tophat\"\n"
      "amplitude = 0.8\n"
      "radius = 0.7\n"
      "[model.b_plus]\n"
      "level = 0.5\n"
      "cosine_amplitude = 0.2\n"
      "cosine_mode = 2\n"
      "[model.b_minus]\n"
      "level = 1.0\n"
      "[run]\n"
      "seed = 9\n"
      "init = \"poisson\"\n"
      "init_kappa = 0.3\n";
  const auto cfg = ExperimentConfig::from_text(text, "<test>", {});
  cfg.validate();

  const ModelParams p = cfg.model();
  CHECK(p.window.side == 16.0);
  CHECK(p.window.dim == 2);
  CHECK(p.a_plus.value(0.0) == doctest::Approx(0.6));
  CHECK(p.a_minus.value(0.5) == doctest::Approx(0.8));
  CHECK(p.a_minus.value(0.8) == 0.0);
  CHECK(p.b_plus.value(Position{0.0, 0.0}, p.window) == doctest::Approx(0.7));
  CHECK(p.b_minus.value(Position{3.0, 5.0}, p.window) == doctest::Approx(1.0));

  const auto init = cfg.initial_condition();
  REQUIRE(std::holds_alternative<PoissonInit>(init));
  CHECK(std::get<PoissonInit>(init).kappa == 0.3);

  SUBCASE("explicit points unflatten pairwise") {
    const auto cfg2 = ExperimentConfig::from_text(
        "[run]\nseed = 1\ninit = \"points\"\ninit_points = [1.0, 2.0, 3.0, 4.0]\n",
        "<test>", {});
    const auto init2 = cfg2.initial_condition();
    REQUIRE(std::holds_alternative<ExplicitInit>(init2));
    const auto& pts = std::get<ExplicitInit>(init2).points;
    REQUIRE(pts.size() == 2);
    CHECK(pts[0][0] == 1.0);
    CHECK(pts[0][1] == 2.0);
    CHECK(pts[1][0] == 3.0);

    const auto odd = ExperimentConfig::from_text(
        "[run]\nseed = 1\ninit = \"points\"\ninit_points = [1.0, 2.0, 3.0]\n",
        "<test>", {});
    CHECK_THROWS_AS(odd.validate(), config_error);
  }

  SUBCASE("probe boxes unflatten as lo/hi groups") {
    const auto cfg3 = ExperimentConfig::from_text(
        "[run]\nseed = 1\n[analysis]\nprobe_boxes = [1.0, 1.0, 3.0, 4.0]\n",
        "<test>", {});
    const auto boxes = cfg3.probe_box_list();
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0].lo[0] == 1.0);
    CHECK(boxes[0].hi[1] == 4.0);

    const auto torn = ExperimentConfig::from_text(
        "[run]\nseed = 1\n[analysis]\nprobe_boxes = [1.0, 1.0, 3.0]\n",
        "<test>", {});
    CHECK_THROWS_AS(torn.validate(), config_error);
  }
}

TEST_CASE("config hashing is stable and sensitive") {
  const auto a = ExperimentConfig::from_text(kMinimalConfig, "<test>", {});
  const auto b = ExperimentConfig::from_text(kMinimalConfig, "<test>", {});
  CHECK(a.config_hash() == b.config_hash());

  const auto c = ExperimentConfig::from_text(kMinimalConfig, "<test>",
                                             {"run.replicates=5"});
  CHECK(a.config_hash() != c.config_hash());

  // Resolution is idempotent: a resolved document resolves to itself.
  const auto doc = a.to_document();
  const auto again = ExperimentConfig::from_document(doc);
  CHECK(again.config_hash() == a.config_hash());

  CHECK(hash_hex(a.config_hash()).size() == 16);
}

TEST_CASE("every preset parses, validates, and builds its model") {
  const auto names = preset_names();
  CHECK(names.size() >= 6);
  for (const auto& name : names) {
    CAPTURE(name);
    CHECK(is_preset(name));
    const auto cfg =
        ExperimentConfig::from_text(preset_toml(name), "preset:" + name, {});
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.seed_set);  // presets pin their seed for reproducibility
    CHECK_NOTHROW(cfg.model().validate());
  }
  CHECK(!is_preset("definitely-not-a-preset"));
  CHECK_THROWS_AS(preset_toml("definitely-not-a-preset"), std::exception);
}

TEST_CASE("snapshot tables round-trip exactly") {
  const fs::path dir = temp_dir();
  const fs::path csv = dir / "snap.csv";

  ReplicateRecord r0;
  r0.replicate_id = 0;
  r0.seed = 11;
  r0.snapshots = {
      Snapshot{0.0, {{3, Position{0.12345678901234567, 5.5}},
                     {9, Position{19.999999999999996, 0.0}}}},
      Snapshot{2.5, {}}};  // empty snapshot needs the sentinel row
  ReplicateRecord r1;
  r1.replicate_id = 1;
  r1.seed = 12;
  r1.status = ReplicateStatus::AbsorbedEmpty;
  r1.snapshots = {Snapshot{0.0, {{4, Position{1.0 / 3.0, 2.0 / 3.0}}}},
                  Snapshot{2.5, {{7, Position{0.1 + 0.2, 4.0}}}}};
  const std::vector<ReplicateRecord> recs{r0, r1};

  write_snapshots_csv(csv, recs, 2, 0xabcdef12u);
  const auto back = read_snapshots_csv(csv, 2);

  REQUIRE(back.size() == 2);
  REQUIRE(back[0].snapshots.size() == 2);
  CHECK(back[0].snapshots[0].time == 0.0);
  CHECK(back[0].snapshots[1].time == 2.5);
  REQUIRE(back[0].snapshots[0].points.size() == 2);
  CHECK(back[0].snapshots[0].points[0].first == 3);
  // Full-precision round trip: values come back bit for bit.
  CHECK(back[0].snapshots[0].points[0].second[0] == 0.12345678901234567);
  CHECK(back[0].snapshots[0].points[1].second[0] == 19.999999999999996);
  CHECK(back[0].snapshots[1].points.empty());
  CHECK(back[1].snapshots[0].points[0].second[0] == 1.0 / 3.0);
  CHECK(back[1].snapshots[1].points[0].second[0] == 0.1 + 0.2);

  // Rewriting the same records is byte-identical.
  const fs::path csv2 = dir / "snap2.csv";
  write_snapshots_csv(csv2, recs, 2, 0xabcdef12u);
  CHECK(slurp(csv) == slurp(csv2));

  const std::string head = slurp(csv).substr(0, 64);
  CHECK(head.find("# config_hash=") == 0);

  CHECK_THROWS_AS(read_snapshots_csv(dir / "missing.csv", 2),
                  std::runtime_error);

  // One-dimensional tables carry a single coordinate column.
  const fs::path csv1 = dir / "snap1d.csv";
  ReplicateRecord s;
  s.snapshots = {Snapshot{1.0, {{0, Position{4.25, 0.0}}}}};
  write_snapshots_csv(csv1, std::vector<ReplicateRecord>{s}, 1, 1);
  const auto back1 = read_snapshots_csv(csv1, 1);
  CHECK(back1[0].snapshots[0].points[0].second[0] == 4.25);

  fs::remove_all(dir);
}

TEST_CASE("replicate summaries and certificates are valid JSON") {
  const fs::path dir = temp_dir();

  ReplicateRecord rec;
  rec.replicate_id = 2;
  rec.seed = 77;
  rec.events = 123;
  rec.final_population = 9;
  rec.final_time = 4.0;
  rec.snapshots = {Snapshot{4.0, {{1, Position{1.0, 1.0}}}}};

  const fs::path rj = dir / "replicates.json";
  write_replicates_json(rj, std::vector<ReplicateRecord>{rec}, 0x1234u);
  const auto parsed = nlohmann::json::parse(slurp(rj));
  CHECK(parsed["config_hash"] == hash_hex(0x1234u));
  REQUIRE(parsed["replicates"].size() == 1);
  CHECK(parsed["replicates"][0]["events"] == 123);
  CHECK(parsed["replicates"][0]["final_population"] == 9);

  CertificateReport rep;
  rep.replicates = 300;
  rep.kappa_hat = 0.5;
  rep.n_max = 2;
  rep.pass = true;
  rep.note = "check";
  rep.rows = {CertificateRow{1, 0.1, 0.05, 0.2, false, 1.0, 0.9, 1.1, false}};
  const fs::path cj = dir / "cert.json";
  write_certificate_json(cj, rep, 2.5, 0, 0x9999u);
  const auto cert = nlohmann::json::parse(slurp(cj));
  CHECK(cert["pass"] == true);
  CHECK(cert["time"] == 2.5);
  CHECK(cert["rows"].size() == 1);
  CHECK(cert["rows"][0]["order"] == 1);

  fs::remove_all(dir);
}

TEST_CASE("trajectory and shell tables write their rows") {
  const fs::path dir = temp_dir();

  const std::vector<std::array<double, 4>> rows{{0.0, 1.0, 0.9, 1.1},
                                                {0.5, 1.2, 1.0, 1.4}};
  const fs::path tc = dir / "traj.csv";
  write_trajectory_csv(tc, rows, 0x1u);
  const std::string text = slurp(tc);
  CHECK(text.find("time,mean_density,min_density,max_density") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // comment+header+2

  const std::vector<PairCorrelationBin> bins{
      {0.0, 0.5, 0.25, 1.02, 0.9, 1.1}};
  const fs::path pc = dir / "gpair.csv";
  write_pair_correlation_csv(pc, bins, 1.0, 0x2u);
  const std::string gtext = slurp(pc);
  CHECK(gtext.find("r_mid") != std::string::npos);
  CHECK(std::count(gtext.begin(), gtext.end(), '\n') == 3);

  ReplicateRecord rec;
  rec.event_log = {Event{EventKind::Birth, 0.5, Position{1.0, 2.0}, 4},
                   Event{EventKind::Death, 0.9, Position{1.0, 2.0}, 4}};
  const fs::path ec = dir / "events.csv";
  write_event_log_csv(ec, rec, 2);
  const std::string etext = slurp(ec);
  CHECK(etext.find("time,kind,point_id,x1,x2") != std::string::npos);
  CHECK(etext.find("birth") != std::string::npos);
  CHECK(etext.find("death") != std::string::npos);

  fs::remove_all(dir);
}

TEST_CASE("field dumps round-trip bit for bit") {
  const fs::path dir = temp_dir();
  const fs::path fp = dir / "field.bin";

  DensityField f = DensityField::constant(2, 8, 4.0, 0.0);
  f.time = 2.5;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    f.values[i] = std::sin(static_cast<double>(i) * 0.7) * 1e-3 + 1.0 / 3.0;
  }
  write_field(fp, f);
  const DensityField back = read_field(fp);

  CHECK(back.dim == 2);
  CHECK(back.nodes == 8);
  CHECK(back.side == 4.0);
  CHECK(back.time == 2.5);
  REQUIRE(back.values.size() == f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    CHECK(back.values[i] == f.values[i]);
  }

  // Corrupted magic is refused.
  std::ofstream bad(dir / "bad.bin", std::ios::binary);
  bad << "NOTMAGIC" << std::string(64, '\0');
  bad.close();
  CHECK_THROWS_AS(read_field(dir / "bad.bin"), std::runtime_error);

  fs::remove_all(dir);
}

TEST_CASE("text files land on disk verbatim") {
  const fs::path dir = temp_dir();
  const fs::path p = dir / "note.txt";
  write_text_file(p, "line one\nline two\n");
  CHECK(slurp(p) == "line one\nline two\n");
  fs::remove_all(dir);
}
