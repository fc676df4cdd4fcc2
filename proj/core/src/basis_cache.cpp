// Copyright 2026 The cfmaps Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfmaps/basis_cache.hpp"

#include "cfmaps/hash.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>

namespace cfmaps {

namespace {

constexpr char kMagic[8] = {'C', 'F', 'M', 'B', 'A', 'S', 'I', 'S'};

class Writer {
 public:
  template <typename T>
  void put(const T& value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes.insert(bytes.end(), p, p + sizeof(T));
  }
  void put_doubles(const double* data, std::size_t count) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(data);
    bytes.insert(bytes.end(), p, p + count * sizeof(double));
  }
  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
  template <typename T>
  T get() {
    T value;
    take(&value, sizeof(T));
    return value;
  }
  void get_doubles(double* out, std::size_t count) { take(out, count * sizeof(double)); }

 private:
  void take(void* out, std::size_t n) {
    if (pos_ + n > size_) throw Error("truncated basis cache");
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::array<std::uint8_t, 32> digest(const std::uint8_t* data, std::size_t size) {
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  EVP_Digest(data, size, out.data(), &len, EVP_sha256(), nullptr);
  return out;
}

}  // namespace

std::string mesh_content_hash(const TriMesh& mesh) {
  Writer w;
  w.put(static_cast<std::uint64_t>(mesh.num_vertices()));
  w.put(static_cast<std::uint64_t>(mesh.num_faces()));
  w.put_doubles(mesh.vertices().data(), static_cast<std::size_t>(mesh.vertices().size()));
  const auto* f = reinterpret_cast<const std::uint8_t*>(mesh.faces().data());
  w.bytes.insert(w.bytes.end(), f, f + mesh.faces().size() * sizeof(int));
  return sha256_hex(w.bytes);
}

void write_basis_bundle(const std::filesystem::path& path, const std::string& mesh_hash,
                        const BasisBundle& bundle) {
  if (mesh_hash.size() != 64) throw InvalidArgument("mesh hash must be 64 hex characters");
  const auto& re = bundle.real;
  const auto& cx = bundle.complex;
  Writer w;
  w.bytes.insert(w.bytes.end(), std::begin(kMagic), std::end(kMagic));
  w.put(kBasisCacheVersion);
  w.bytes.insert(w.bytes.end(), mesh_hash.begin(), mesh_hash.end());
  w.put(static_cast<std::uint32_t>(re.num_vertices()));
  w.put(static_cast<std::uint32_t>(re.size()));
  w.put(static_cast<std::uint32_t>(cx.size()));
  w.put_doubles(re.mass.data(), re.mass.size());
  w.put_doubles(re.lambda.data(), re.lambda.size());
  w.put_doubles(re.phi.data(), re.phi.size());
  w.put_doubles(cx.lambda.data(), cx.lambda.size());
  w.put_doubles(reinterpret_cast<const double*>(cx.psi.data()), 2 * cx.psi.size());
  const auto sum = digest(w.bytes.data(), w.bytes.size());
  w.bytes.insert(w.bytes.end(), sum.begin(), sum.end());

  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write basis cache " + tmp);
    out.write(reinterpret_cast<const char*>(w.bytes.data()),
              static_cast<std::streamsize>(w.bytes.size()));
    if (!out) throw Error("cannot write basis cache " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<BasisBundle> read_basis_bundle(const std::filesystem::path& path,
                                             const std::string& mesh_hash, int k) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  auto corrupt = [&](const std::string& why) {
    warn("corrupt_cache", path.string() + ": " + why + "; recomputing");
    return std::nullopt;
  };
  if (bytes.size() < sizeof(kMagic) + 4 + 64 + 12 + 32) return corrupt("file too short");
  const std::size_t body = bytes.size() - 32;
  const auto sum = digest(bytes.data(), body);
  if (std::memcmp(sum.data(), bytes.data() + body, 32) != 0) return corrupt("checksum mismatch");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) return corrupt("bad magic");
  try {
    Reader r(bytes.data() + sizeof(kMagic), body - sizeof(kMagic));
    if (r.get<std::uint32_t>() != kBasisCacheVersion) return corrupt("unsupported version");
    std::string stored(64, '\0');
    for (char& c : stored) c = r.get<char>();
    if (stored != mesh_hash) return std::nullopt;
    const int n = static_cast<int>(r.get<std::uint32_t>());
    const int kr = static_cast<int>(r.get<std::uint32_t>());
    const int kc = static_cast<int>(r.get<std::uint32_t>());
    if (kr < k || kc < k) return std::nullopt;
    BasisBundle b;
    b.real.mass.resize(n);
    r.get_doubles(b.real.mass.data(), n);
    b.real.lambda.resize(kr);
    r.get_doubles(b.real.lambda.data(), kr);
    b.real.phi.resize(n, kr);
    r.get_doubles(b.real.phi.data(), static_cast<std::size_t>(n) * kr);
    b.complex.mass = b.real.mass;
    b.complex.lambda.resize(kc);
    r.get_doubles(b.complex.lambda.data(), kc);
    b.complex.psi.resize(n, kc);
    r.get_doubles(reinterpret_cast<double*>(b.complex.psi.data()),
                  2 * static_cast<std::size_t>(n) * kc);
    b.real = b.real.truncated(k);
    b.complex = b.complex.truncated(k);
    return b;
  } catch (const Error& e) {
    return corrupt(e.what());
  }
}

BasisBundle compute_basis_bundle(const TriMesh& mesh, int k, const EigenOptions& options) {
  const MassMatrix A = mass_matrix(mesh);
  const TangentFrames frames = build_frames(mesh);
  return {eig_real(cotan_laplacian(mesh), A, k, options),
          eig_complex(connection_laplacian(mesh, frames), A, k, options)};
}

BasisCache::BasisCache(std::filesystem::path directory) : directory_(std::move(directory)) {}

std::filesystem::path BasisCache::default_directory() {
  if (const char* env = std::getenv("CFMAPS_CACHE_DIR"); env && *env) return env;
  return std::filesystem::temp_directory_path() / "cfmaps-cache";
}

std::filesystem::path BasisCache::path_for(const std::string& mesh_hash) const {
  return directory_ / (mesh_hash + ".cfb");
}

BasisBundle BasisCache::get(const TriMesh& mesh, int k, bool* hit,
                            const EigenOptions& options) const {
  const std::string hash = mesh_content_hash(mesh);
  const auto path = path_for(hash);
  if (auto cached = read_basis_bundle(path, hash, k)) {
    if (hit) *hit = true;
    return std::move(*cached);
  }
  if (hit) *hit = false;
  BasisBundle bundle = compute_basis_bundle(mesh, k, options);
  write_basis_bundle(path, hash, bundle);
  return bundle;
}

}  // namespace cfmaps
