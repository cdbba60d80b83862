#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <unistd.h>

#include "attnrank/random.hpp"
#include "attnrank/tabular.hpp"

namespace attnrank::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("attnrank_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Two Gaussian blobs per class, centred at +-separation along every feature.
inline Dataset blobs(std::size_t n_per_class, std::size_t n_features, double separation, std::uint64_t seed,
                     std::size_t n_classes = 2) {
  Rng rng(seed);
  Dataset d;
  const std::size_t n = n_per_class * n_classes;
  d.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_features));
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % n_classes);
    d.labels.push_back(y);
    for (std::size_t j = 0; j < n_features; ++j) {
      // Class c is offset along feature (c + j) % n_classes pattern.
      const double centre = ((static_cast<std::size_t>(y) + j) % n_classes == 0 ? 1.0 : -1.0) * separation;
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = centre + 0.3 * rng.normal();
    }
  }
  for (std::size_t j = 0; j < n_features; ++j) d.feature_names.push_back("x" + std::to_string(j));
  for (std::size_t c = 0; c < n_classes; ++c) d.class_names.push_back("c" + std::to_string(c));
  return d;
}

// Binary dataset where feature 0 equals the label and the rest are noise.
inline Dataset label_copy_dataset(std::size_t n, std::size_t n_noise, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(1 + n_noise));
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    d.labels.push_back(y);
    d.features(static_cast<Eigen::Index>(i), 0) = y;
    for (std::size_t j = 0; j < n_noise; ++j) {
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = rng.normal();
    }
  }
  d.feature_names.push_back("label_copy");
  for (std::size_t j = 0; j < n_noise; ++j) d.feature_names.push_back("noise" + std::to_string(j));
  d.class_names = {"neg", "pos"};
  return d;
}

}  // namespace attnrank::testing
