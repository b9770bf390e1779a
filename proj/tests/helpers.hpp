#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "curesem/simulation.hpp"

namespace testutil {

// two-group scenario small enough for unit-test budgets
inline curesem::Scenario small_scenario(int n = 120, uint64_t seed = 7) {
  curesem::Scenario s;
  s.n = n;
  s.groups = 2;
  s.p0_first = 0.6;
  s.p0_last = 0.3;
  s.censor_targets = {0.75, 0.5};
  s.phi = 1.0;
  s.gamma1 = 0.5;
  s.alpha = {-0.5, 0.2};
  s.replicates = 2;
  s.seed = seed;
  return s;
}

inline std::vector<double> solve_xi(const curesem::Scenario& s) {
  std::vector<double> xi;
  for (int j = 1; j <= s.groups; ++j)
    xi.push_back(curesem::solve_censoring_rate(
        s, j, curesem::RngStream(s.seed, (uint64_t{1} << 32) + j)));
  return xi;
}

inline curesem::Dataset small_dataset(int n = 120, uint64_t seed = 7) {
  const curesem::Scenario s = small_scenario(n, seed);
  curesem::RngStream rng(s.seed, 0);
  return curesem::generate_dataset(s, solve_xi(s), rng);
}

// scratch directory removed on destruction
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("curesem_test_" + std::to_string(rd()) + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testutil
