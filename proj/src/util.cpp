#include "cosplade/util.hpp"

#include <cstdio>
#include <stdexcept>

namespace cosplade {

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t x = base ^ h;
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

AtomicFile::AtomicFile(std::string path, bool binary)
    : path_(std::move(path)), tmp_path_(path_ + ".tmp") {
  auto mode = std::ios::trunc | (binary ? std::ios::binary : std::ios::out);
  out_.open(tmp_path_, mode);
  if (!out_) throw std::runtime_error("cannot write file: " + path_);
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::remove(tmp_path_.c_str());
  }
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failure on file: " + path_);
  out_.close();
  if (std::rename(tmp_path_.c_str(), path_.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp_path_ + " into place as " + path_);
  }
  committed_ = true;
}

}  // namespace cosplade
