#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

namespace cosplade {

/// Derives an independent per-component seed from one base seed and a fixed
/// derivation label (splitmix-style finalizer over an FNV label hash).
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

/// Writes to "<path>.tmp" and renames into place on commit; the temporary
/// is removed if the writer is destroyed uncommitted, so failed commands
/// leave no partial outputs behind.
class AtomicFile {
 public:
  explicit AtomicFile(std::string path, bool binary = false);
  ~AtomicFile();

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ofstream& stream() { return out_; }
  void commit();

 private:
  std::string path_;
  std::string tmp_path_;
  std::ofstream out_;
  bool committed_ = false;
};

}  // namespace cosplade
