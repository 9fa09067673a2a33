#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "jpec/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run jpec_run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + JPEC_CLI_PATH + "\" " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

const fs::path kRoot = fs::temp_directory_path() / ("jpec_cli_test_" + std::to_string(::getpid()));

struct Cleanup {
  ~Cleanup() {
    std::error_code ec;
    fs::remove_all(kRoot, ec);
  }
} cleanup;

fs::path scratch(const std::string& name) {
  const fs::path dir = kRoot / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool any_partial(const fs::path& dir) {
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().string().find(".partial") != std::string::npos) return true;
  return false;
}

std::string graph_args(const fs::path& data, const std::string& competitors = "competitors.tsv") {
  return "--nodes " + (data / "nodes.tsv").string() + " --supply " + (data / "supply.tsv").string() +
         " --competitors " + (data / competitors).string();
}

// Small synthetic set shared by the cases below.
const fs::path& dataset() {
  static const fs::path dir = [] {
    const fs::path d = scratch("data");
    const auto r = jpec_run("generate --n 120 --industries 4 --attr-dim 16 --intra-prob 1.0 --seed 3 --out " +
                            d.string());
    REQUIRE_MESSAGE(r.code == 0, r.output);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("generate writes the dataset and a manifest") {
  const auto& d = dataset();
  for (const char* f : {"nodes.tsv", "supply.tsv", "competitors.tsv", "industries.tsv", "oracle_embeddings.bin"})
    CHECK(fs::exists(d / f));
  const auto m = manifest(d);
  CHECK(m["status"] == "ok");
  CHECK(m["command"] == "generate");
  CHECK_FALSE(any_partial(d));
}

TEST_CASE("generate and split are byte-identical on rerun") {
  const auto a = scratch("gen_a");
  const auto b = scratch("gen_b");
  const std::string gen = "generate --n 60 --industries 3 --attr-dim 9 --seed 5 --out ";
  REQUIRE(jpec_run(gen + a.string()).code == 0);
  REQUIRE(jpec_run(gen + b.string()).code == 0);
  for (const char* f : {"nodes.tsv", "supply.tsv", "competitors.tsv", "industries.tsv", "oracle_embeddings.bin"})
    CHECK(slurp(a / f) == slurp(b / f));

  const auto sa = scratch("split_a");
  const auto sb = scratch("split_b");
  const std::string split = "split " + graph_args(a) + " --kind zero_shot --fraction 0.2 --seed 2 --out ";
  REQUIRE(jpec_run(split + sa.string()).code == 0);
  REQUIRE(jpec_run(split + sb.string()).code == 0);
  for (const char* f : {"train_competitors.tsv", "removed_competitors.tsv", "queries.tsv"})
    CHECK(slurp(sa / f) == slurp(sb / f));
}

TEST_CASE("oracle embeddings reach perfect Hits@10 through the CLI") {
  const auto& d = dataset();
  for (const std::string kind : {"regular", "zero_shot"}) {
    CAPTURE(kind);
    const auto s = scratch("split_" + kind);
    auto r = jpec_run("split " + graph_args(d) + " --kind " + kind + " --fraction 0.2 --seed 1 --out " + s.string());
    REQUIRE_MESSAGE(r.code == 0, r.output);
    const auto e = scratch("eval_" + kind);
    r = jpec_run("evaluate --embeddings " + (d / "oracle_embeddings.bin").string() + " --queries " +
                 (s / "queries.tsv").string() + " --train-competitors " + (s / "train_competitors.tsv").string() +
                 " --ks 1,10 --out " + e.string());
    REQUIRE_MESSAGE(r.code == 0, r.output);
    CHECK(r.output.find("Hits@10: 1.0000") != std::string::npos);
    CHECK(slurp(e / "summary.txt") == r.output);
    CHECK(fs::exists(e / "metrics.tsv"));
    CHECK(fs::exists(e / "per_query.tsv"));
  }
}

TEST_CASE("gradcheck passes") {
  const auto out = scratch("gradcheck");
  const auto r = jpec_run("gradcheck --out " + out.string());
  CHECK_MESSAGE(r.code == 0, r.output);
  CHECK(slurp(out / "gradcheck.txt").find("PASS") != std::string::npos);
}

TEST_CASE("zero epochs still writes a model") {
  const auto out = scratch("train0");
  const auto r = jpec_run("train " + graph_args(dataset()) + " --epochs 0 --out " + out.string());
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto model = jpec::io::load_model(out / "model.bin");
  CHECK_FALSE(model.encoder_weights.empty());
  std::istringstream report(slurp(out / "train_report.tsv"));
  std::string line;
  int lines = 0;
  while (std::getline(report, line)) ++lines;
  CHECK(lines <= 1);
  CHECK(fs::exists(out / "embeddings.bin"));
}

TEST_CASE("training is byte-identical across reruns and thread counts") {
  const std::string args = "train " + graph_args(dataset()) + " --epochs 15 --seed 4 --out ";
  const auto a = scratch("train_a");
  const auto b = scratch("train_b");
  const auto c = scratch("train_c");
  REQUIRE(jpec_run(args + a.string(), "JPEC_THREADS=4").code == 0);
  REQUIRE(jpec_run(args + b.string(), "JPEC_THREADS=4").code == 0);
  REQUIRE(jpec_run(args + c.string(), "JPEC_THREADS=0").code == 0);
  for (const char* f : {"model.bin", "train_report.tsv", "embeddings.bin"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(c / f));
  }
  CHECK(manifest(a)["threads"] == 4);
  CHECK(manifest(c)["threads"] == 1);
}

TEST_CASE("failed run leaves no outputs and records the error") {
  const auto& d = dataset();
  const auto bad = scratch("bad_input");
  std::ofstream(bad / "supply.tsv") << "c0\tnobody\n";
  const auto out = scratch("train_bad");
  const auto r = jpec_run("train --nodes " + (d / "nodes.tsv").string() + " --supply " + (bad / "supply.tsv").string() +
                          " --competitors " + (d / "competitors.tsv").string() + " --out " + out.string());
  CHECK(r.code != 0);
  CHECK(r.output.find("nobody") != std::string::npos);
  CHECK_FALSE(fs::exists(out / "model.bin"));
  CHECK_FALSE(fs::exists(out / "embeddings.bin"));
  CHECK_FALSE(any_partial(out));
  const auto m = manifest(out);
  CHECK(m["status"] == "error");
  CHECK(m["error"].get<std::string>().find("nobody") != std::string::npos);
}

TEST_CASE("bad arguments are rejected") {
  CHECK(jpec_run("train --no-such-flag --out " + scratch("flag").string()).code != 0);
  CHECK(jpec_run("frobnicate").code != 0);
  CHECK(jpec_run("split " + graph_args(dataset()) + " --kind sideways --out " + scratch("kind").string()).code != 0);
}

TEST_CASE("rank lists the top candidates") {
  const auto& d = dataset();
  const auto out = scratch("rank");
  const auto r = jpec_run("rank --embeddings " + (d / "oracle_embeddings.bin").string() +
                          " --query c0 --query c1 --top-k 5 --out " + out.string());
  REQUIRE_MESSAGE(r.code == 0, r.output);
  std::istringstream in(slurp(out / "ranked.tsv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "query\trank\tcandidate\tscore");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK((line.rfind("c0\t", 0) == 0 || line.rfind("c1\t", 0) == 0));
  }
  CHECK(rows == 10);
}

TEST_CASE("newer embedding minor version is loaded with a warning") {
  const auto& d = dataset();
  const auto emb = jpec::io::load_embeddings(d / "oracle_embeddings.bin");
  const auto dir = scratch("minor");
  jpec::io::save_embeddings(emb.embeddings, emb.ids, emb.seed, dir / "newer.bin", jpec::io::kEmbeddingMinor + 1);
  const auto out = scratch("rank_minor");
  const auto r = jpec_run("rank --embeddings " + (dir / "newer.bin").string() + " --query c0 --out " + out.string());
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto m = manifest(out);
  REQUIRE(m["warnings"].size() >= 1);
  CHECK(m["warnings"][0].get<std::string>().find("minor") != std::string::npos);
}
