#include "jpec/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "jpec/error.hpp"

namespace jpec {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

void RunManifest::add_input(const std::filesystem::path& path) { inputs[path.string()] = sha256_file(path); }

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["argv"] = argv;
  j["config"] = config;
  j["seeds"] = seeds;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["warnings"] = warnings;
  j["flags"] = flags;
  j["wall_clock_seconds"] = wall_clock_seconds;
  j["engine_version"] = engine_version;
  return j;
}

StagedOutputs::~StagedOutputs() {
  for (const auto& [tmp, final_path] : staged_) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
  }
}

std::filesystem::path StagedOutputs::stage(const std::filesystem::path& final_path) {
  auto tmp = final_path;
  tmp += ".partial";
  staged_.emplace_back(tmp, final_path);
  return tmp;
}

void StagedOutputs::commit(RunManifest& manifest) {
  for (const auto& [tmp, final_path] : staged_) {
    std::filesystem::rename(tmp, final_path);
    manifest.outputs[final_path.string()] = sha256_file(final_path);
  }
  staged_.clear();
}

}  // namespace jpec
