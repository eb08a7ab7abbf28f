#include "susacer/checkpoint.hpp"

#include <cstdio>
#include <memory>

namespace susacer {

namespace {
constexpr std::uint64_t kMagic = 0x31504b43415355ULL;  // "SUSACKP1" truncated to 7+1 bytes

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  auto put_u64 = [&f](std::uint64_t v) { std::fwrite(&v, sizeof v, 1, f.get()); };
  put_u64(kMagic);
  put_u64(ckpt.layer_sizes.size());
  put_u64(ckpt.sigma.size());
  put_u64(ckpt.step);
  put_u64(ckpt.params.size());
  for (int s : ckpt.layer_sizes) put_u64(std::uint64_t(s));
  std::fwrite(ckpt.sigma.data(), sizeof(double), ckpt.sigma.size(), f.get());
  std::fwrite(ckpt.params.data(), sizeof(double), ckpt.params.size(), f.get());
}

Checkpoint load_checkpoint(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open " + path);
  auto get_u64 = [&f, &path]() {
    std::uint64_t v = 0;
    if (std::fread(&v, sizeof v, 1, f.get()) != 1)
      throw std::runtime_error("truncated checkpoint: " + path);
    return v;
  };
  if (get_u64() != kMagic) throw std::runtime_error("not a checkpoint file: " + path);
  Checkpoint ckpt;
  const std::uint64_t n_layers = get_u64();
  const std::uint64_t n_sigma = get_u64();
  ckpt.step = get_u64();
  const std::uint64_t n_params = get_u64();
  ckpt.layer_sizes.resize(n_layers);
  for (auto& s : ckpt.layer_sizes) s = int(get_u64());
  ckpt.sigma.resize(n_sigma);
  if (n_sigma &&
      std::fread(ckpt.sigma.data(), sizeof(double), n_sigma, f.get()) != n_sigma)
    throw std::runtime_error("truncated checkpoint: " + path);
  ckpt.params.resize(n_params);
  if (n_params &&
      std::fread(ckpt.params.data(), sizeof(double), n_params, f.get()) != n_params)
    throw std::runtime_error("truncated checkpoint: " + path);
  return ckpt;
}

}  // namespace susacer
