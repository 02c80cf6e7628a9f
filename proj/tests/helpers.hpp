// Shared test scaffolding: bundled-data paths and throwaway files.
#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace testutil {

inline std::string data_dir() { return KNOWHUNT_DATA_DIR; }

inline std::string data_path(const std::string& rel) { return data_dir() + "/" + rel; }

// A file deleted when the guard leaves scope. Names are unique per process.
class TempFile {
 public:
  explicit TempFile(const std::string& contents, const std::string& suffix = ".tmp") {
    static std::atomic<unsigned> counter{0};
    auto dir = std::filesystem::temp_directory_path();
    path_ = (dir / ("knowhunt-test-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter.fetch_add(1)) + suffix))
                .string();
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create temp file " + path_);
    out << contents;
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() { std::filesystem::remove(path_); }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace testutil
