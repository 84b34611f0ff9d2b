#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "spsdgeo/cli.hpp"
#include "spsdgeo/dataset.hpp"
#include "spsdgeo/errors.hpp"
#include "spsdgeo/rng.hpp"

using namespace spsdgeo;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = 0;
  json report;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = run_command(args, out, err);
  r.err = err.str();
  if (!out.str().empty()) r.report = json::parse(out.str());
  return r;
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "spsdgeo_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

std::string p(const fs::path& path) { return path.string(); }

}  // namespace

TEST_CASE("synth-adapt-embed-eval pipeline runs and reproduces bytes") {
  const fs::path dir = work_dir();
  const RunResult synth = run({"synth", "--d", "10", "--r", "2", "--classes",
                               "3", "--per-class", "8", "--seed", "42",
                               "--distort", "subspace_rotation,core_congruence",
                               "--noise", "0.1", "--out-dir", p(dir)});
  REQUIRE(synth.code == 0);
  REQUIRE(fs::exists(dir / "source.json"));
  REQUIRE(fs::exists(dir / "target.json"));
  REQUIRE(fs::exists(dir / "ground_truth.json"));

  const RunResult adapt = run({"adapt", "--source", p(dir / "source.json"),
                               "--target", p(dir / "target.json"), "--rank",
                               "2", "--output", p(dir / "adapted.json"),
                               "--transport-out", p(dir / "transport.json")});
  REQUIRE(adapt.code == 0);
  CHECK(adapt.report["convergence"]["source"]["grassmann_mean"]["iterations"]
            .get<int>() > 0);

  const RunResult embed = run({"embed", "--input", p(dir / "adapted.json"),
                               p(dir / "target.json"), "--rank", "2",
                               "--components", "4", "--output",
                               p(dir / "emb.csv")});
  REQUIRE(embed.code == 0);
  CHECK(embed.report["metrics"]["rows"].get<int>() == 48);

  const RunResult eval = run({"eval", "--train", p(dir / "emb.csv"),
                              "--train-set", "0", "--test", p(dir / "emb.csv"),
                              "--test-set", "1", "--metric", "kappa,accuracy"});
  REQUIRE(eval.code == 0);
  CHECK(eval.report["metrics"].contains("kappa"));
  CHECK(eval.report["metrics"].contains("accuracy"));
  CHECK(eval.report["metrics"]["accuracy"].get<double>() >= 0.0);

  // Re-running the whole chain into a second directory gives identical
  // dataset and CSV bytes.
  const fs::path dir2 = work_dir() / "again";
  fs::create_directories(dir2);
  run({"synth", "--d", "10", "--r", "2", "--classes", "3", "--per-class", "8",
       "--seed", "42", "--distort", "subspace_rotation,core_congruence",
       "--noise", "0.1", "--out-dir", p(dir2)});
  run({"adapt", "--source", p(dir2 / "source.json"), "--target",
       p(dir2 / "target.json"), "--rank", "2", "--output",
       p(dir2 / "adapted.json")});
  run({"embed", "--input", p(dir2 / "adapted.json"), p(dir2 / "target.json"),
       "--rank", "2", "--components", "4", "--output", p(dir2 / "emb.csv")});
  CHECK(slurp(dir / "source.json") == slurp(dir2 / "source.json"));
  CHECK(slurp(dir / "adapted.json") == slurp(dir2 / "adapted.json"));
  CHECK(slurp(dir / "emb.csv") == slurp(dir2 / "emb.csv"));
}

TEST_CASE("adapt onto itself returns the source and adapted data ignores labels") {
  const fs::path dir = work_dir() / "self";
  fs::create_directories(dir);
  run({"synth", "--d", "8", "--r", "2", "--classes", "2", "--per-class", "5",
       "--seed", "7", "--noise", "0.15", "--out-dir", p(dir)});

  const RunResult adapt = run({"adapt", "--source", p(dir / "source.json"),
                               "--target", p(dir / "source.json"), "--rank",
                               "2", "--output", p(dir / "self.json")});
  REQUIRE(adapt.code == 0);
  const MatrixSet source = read_dataset(dir / "source.json");
  const MatrixSet adapted = read_dataset(dir / "self.json");
  REQUIRE(adapted.size() == source.size());
  for (std::size_t i = 0; i < source.size(); ++i)
    CHECK((adapted.compose(i) - source.compose(i)).norm() <=
          1e-8 * source.compose(i).norm());

  // Stripping labels must not change the adapted matrices.
  MatrixSet unlabelled = source;
  unlabelled.labels.reset();
  write_dataset(unlabelled, dir / "unlabelled.json");
  const RunResult adapt2 = run({"adapt", "--source", p(dir / "unlabelled.json"),
                                "--target", p(dir / "source.json"), "--rank",
                                "2", "--output", p(dir / "self2.json")});
  REQUIRE(adapt2.code == 0);
  const json with = json::parse(slurp(dir / "self.json"));
  const json without = json::parse(slurp(dir / "self2.json"));
  CHECK(with["data"].dump() == without["data"].dump());
  CHECK(with.contains("labels"));
  CHECK_FALSE(without.contains("labels"));
}

TEST_CASE("oos through a stored transport matches the batch output") {
  const fs::path dir = work_dir() / "oos";
  fs::create_directories(dir);
  run({"synth", "--d", "9", "--r", "2", "--classes", "2", "--per-class", "6",
       "--seed", "11", "--distort", "subspace_rotation", "--noise", "0.1",
       "--out-dir", p(dir)});
  run({"adapt", "--source", p(dir / "source.json"), "--target",
       p(dir / "target.json"), "--rank", "2", "--output",
       p(dir / "adapted.json"), "--transport-out", p(dir / "transport.json")});

  const RunResult oos = run({"oos", "--transport", p(dir / "transport.json"),
                             "--input", p(dir / "source.json"), "--output",
                             p(dir / "oos.json")});
  REQUIRE(oos.code == 0);
  const MatrixSet batch_out = read_dataset(dir / "adapted.json");
  const MatrixSet oos_out = read_dataset(dir / "oos.json");
  REQUIRE(oos_out.size() == batch_out.size());
  for (std::size_t i = 0; i < oos_out.size(); ++i)
    CHECK((oos_out.compose(i) - batch_out.compose(i)).norm() <=
          1e-10 * batch_out.compose(i).norm());

  // Determinism of the oos path itself.
  run({"oos", "--transport", p(dir / "transport.json"), "--input",
       p(dir / "source.json"), "--output", p(dir / "oos2.json")});
  CHECK(slurp(dir / "oos.json") == slurp(dir / "oos2.json"));
}

TEST_CASE("mean command writes a one-item dataset") {
  const fs::path dir = work_dir() / "mean";
  fs::create_directories(dir);
  run({"synth", "--d", "8", "--r", "2", "--classes", "2", "--per-class", "4",
       "--seed", "3", "--noise", "0.1", "--out-dir", p(dir)});
  const RunResult mean = run({"mean", "--input", p(dir / "source.json"),
                              "--rank", "2", "--output", p(dir / "mean.json")});
  REQUIRE(mean.code == 0);
  const MatrixSet out = read_dataset(dir / "mean.json");
  CHECK(out.size() == 1);
  CHECK(out.storage == MatrixSet::Storage::Factored);
  CHECK(mean.report["convergence"]["spd_mean"]["final_residual"].get<double>() <=
        1e-10);
}

TEST_CASE("dist command writes a symmetric matrix with a zero diagonal") {
  const fs::path dir = work_dir() / "dist";
  fs::create_directories(dir);
  run({"synth", "--d", "8", "--r", "2", "--classes", "2", "--per-class", "3",
       "--seed", "5", "--noise", "0.1", "--out-dir", p(dir)});
  const RunResult dist = run({"dist", "--input", p(dir / "source.json"),
                              "--rank", "2", "--k", "1.0", "--pairwise",
                              "--output", p(dir / "dist.csv")});
  REQUIRE(dist.code == 0);
  const FeatureTable table = read_feature_csv(dir / "dist.csv");
  REQUIRE(table.features.rows() == 6);
  REQUIRE(table.features.cols() == 6);
  CHECK((table.features - table.features.transpose()).norm() == 0.0);
  CHECK(table.features.diagonal().norm() == 0.0);
}

TEST_CASE("features command builds descriptors from a pixel table") {
  const fs::path dir = work_dir() / "features";
  fs::create_directories(dir);

  Rng rng(27);
  const int nx = 5, ny = 4;
  Matrix pixels(nx * ny, 3);
  for (int i = 0; i < pixels.rows(); ++i)
    for (int j = 0; j < 3; ++j) pixels(i, j) = 1.0 + 0.4 * rng.normal();
  std::vector<int> labels(static_cast<std::size_t>(nx * ny));
  for (std::size_t i = 0; i < labels.size(); ++i)
    labels[i] = static_cast<int>(i) % 2;
  write_pixel_csv(dir / "pixels.csv", labels, pixels);

  const RunResult features =
      run({"features", "--input", p(dir / "pixels.csv"), "--grid", "5,4",
           "--window", "3", "--neighbors", "5", "--rank", "2", "--output",
           p(dir / "descriptors.json")});
  REQUIRE(features.code == 0);
  const MatrixSet out = read_dataset(dir / "descriptors.json");
  CHECK(out.storage == MatrixSet::Storage::Factored);
  CHECK(out.size() > 0);
  CHECK(out.r == 2);
  REQUIRE(out.labels.has_value());
  CHECK(out.labels->size() == out.size());
}

TEST_CASE("exit codes distinguish validation from numerical failures") {
  const fs::path dir = work_dir() / "codes";
  fs::create_directories(dir);

  // Unknown flag and missing file are validation problems.
  CHECK(run({"mean", "--bogus"}).code == 2);
  CHECK(run({"mean", "--input", p(dir / "nope.json"), "--rank", "2",
             "--output", p(dir / "out.json")})
            .code == 2);

  // A full-rank input cannot factor at the requested rank.
  run({"synth", "--d", "6", "--r", "2", "--classes", "2", "--per-class", "3",
       "--seed", "9", "--noise", "0.1", "--out-dir", p(dir)});
  MatrixSet set = read_dataset(dir / "source.json");
  std::vector<Matrix> dense = set.compose_all();
  for (Matrix& m : dense) m += Matrix::Identity(6, 6);
  MatrixSet full = MatrixSet::from_dense(dense);
  write_dataset(full, dir / "full.json");
  const RunResult bad = run({"mean", "--input", p(dir / "full.json"), "--rank",
                             "2", "--output", p(dir / "out.json")});
  CHECK(bad.code == 3);
  CHECK(bad.report["error"]["type"] == "RankMismatch");

  // The same input passes with --force-rank.
  const RunResult forced = run({"mean", "--input", p(dir / "full.json"),
                                "--rank", "2", "--force-rank", "--output",
                                p(dir / "out.json")});
  CHECK(forced.code == 0);

  // A convergence failure carries diagnostics and exits 3.
  const RunResult stuck = run({"mean", "--input", p(dir / "source.json"),
                               "--rank", "2", "--eps", "1e-30", "--max-iter",
                               "2", "--output", p(dir / "out.json")});
  CHECK(stuck.code == 3);
  CHECK(stuck.report["error"]["type"] == "NoConvergence");
  CHECK(stuck.report["error"]["iterations"].get<int>() == 2);
}

TEST_CASE("help exits cleanly") {
  std::ostringstream out, err;
  CHECK(run_command({"--help"}, out, err) == 0);
  CHECK(out.str().find("mean") != std::string::npos);
}
