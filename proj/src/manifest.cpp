#include "specbench/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>

#include "specbench/errors.hpp"

namespace specbench {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Default: return "default";
    case Provenance::User: return "user";
    case Provenance::Derived: return "derived";
  }
  return "?";
}

Provenance parse_provenance(std::string_view text) {
  if (text == "default") return Provenance::Default;
  if (text == "user") return Provenance::User;
  if (text == "derived") return Provenance::Derived;
  throw ParseError("unknown provenance '" + std::string(text) + "'");
}

void ParameterManifest::record(std::string name, nlohmann::json value, Provenance provenance,
                               std::string unit) {
  if (find(name)) throw InvalidParams("manifest already records '" + name + "'");
  entries.push_back({std::move(name), std::move(value), provenance, std::move(unit)});
}

const ManifestEntry* ParameterManifest::find(std::string_view name) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const ManifestEntry& e) { return e.name == name; });
  return it == entries.end() ? nullptr : &*it;
}

const nlohmann::json& ParameterManifest::value(std::string_view name) const {
  const ManifestEntry* e = find(name);
  if (!e) throw InvalidParams("manifest has no entry '" + std::string(name) + "'");
  return e->value;
}

std::string sha256_hex(std::span<const double> samples) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(samples.size() * 8);
  for (double x : samples) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace specbench
