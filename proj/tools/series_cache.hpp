#pragma once

// On-disk memo of series expansions, enabled by TAUTSIG_CACHE=<directory>.

#include "tautsig/descriptor.hpp"
#include "tautsig/mult_seq.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

namespace tautsig::cli {

struct CacheStats {
  int hits = 0;
  int misses = 0;
};

inline CacheStats& cache_stats() {
  static CacheStats s;
  return s;
}

inline std::optional<std::filesystem::path> cache_dir() {
  const char* env = std::getenv("TAUTSIG_CACHE");
  if (!env || !*env) return std::nullopt;
  return std::filesystem::path(env);
}

inline mult::FormalSeries cached_series(const std::string& name, int order) {
  auto dir = cache_dir();
  if (!dir) return mult::expand_series(name, order);
  auto file = *dir / ("series-" + name + "-" + std::to_string(order) + ".json");
  if (std::ifstream in(file); in) {
    try {
      auto j = io::Json::parse(in);
      std::vector<Rational> c;
      for (const auto& v : j.at("coefficients")) c.push_back(parse_rational(v.get<std::string>()));
      if (static_cast<int>(c.size()) == order + 1) {
        ++cache_stats().hits;
        return mult::FormalSeries(std::move(c));
      }
    } catch (const std::exception&) {
      // stale or foreign file: recompute below
    }
  }
  ++cache_stats().misses;
  auto s = mult::expand_series(name, order);
  std::error_code ec;
  std::filesystem::create_directories(*dir, ec);
  io::Json j;
  j["series"] = name;
  j["order"] = order;
  j["coefficients"] = io::Json::array();
  for (const auto& c : s.coefficients()) j["coefficients"].push_back(c.get_str());
  std::ofstream out(file);
  if (out) out << j.dump(2) << "\n";
  return s;
}

}  // namespace tautsig::cli
