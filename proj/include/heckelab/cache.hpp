#pragma once
// Disk cache for computed q-series, keyed by (kind, l, k, eps, n, N, mode).
// The cache root comes from the HECKELAB_CACHE environment variable; when it
// is unset every operation is a no-op and callers recompute. Files are JSON
// with 17-significant-digit decimal strings (round-trip safe for double) and
// are written atomically: temp file in the same directory, then rename.

#include "heckelab/series.hpp"
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>

namespace heckelab {

struct SeriesCacheKey {
  std::string kind; // e.g. "phi", "f", "fm1"
  int l = 0;
  int k = 0;
  int eps = 0;
  int n = 0;
  int N = 0;
  std::string mode; // "double" or "dd"
};

inline std::optional<std::filesystem::path> cache_directory() {
  const char* env = std::getenv("HECKELAB_CACHE");
  if (!env || !*env) return std::nullopt;
  std::filesystem::path p(env);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) return std::nullopt;
  return p;
}

inline std::string cache_file_name(const SeriesCacheKey& key) {
  std::ostringstream os;
  os << key.kind << "_l" << key.l << "_k" << key.k << "_eps"
     << (key.eps >= 0 ? "p" : "m") << std::abs(key.eps) << "_n" << key.n
     << "_N" << key.N << "_" << key.mode << ".json";
  return os.str();
}

inline std::optional<LaurentSeries<double>>
cache_load_series(const SeriesCacheKey& key) {
  auto dir = cache_directory();
  if (!dir) return std::nullopt;
  std::ifstream in(*dir / cache_file_name(key));
  if (!in) return std::nullopt;
  try {
    nlohmann::json j;
    in >> j;
    if (j.at("l").get<int>() != key.l || j.at("k").get<int>() != key.k ||
        j.at("eps").get<int>() != key.eps || j.at("n").get<int>() != key.n ||
        j.at("N").get<int>() != key.N)
      return std::nullopt;
    LaurentSeries<double> s;
    s.lead = j.at("lead").get<int>();
    s.group_order = key.l;
    s.lambda = 2 * std::cos(const_pi<double>() / key.l);
    for (const auto& pair : j.at("coeffs")) {
      double re = std::stod(pair.at(0).get<std::string>());
      double im = std::stod(pair.at(1).get<std::string>());
      s.coeffs.emplace_back(re, im);
    }
    return s;
  } catch (...) {
    return std::nullopt; // unreadable entries are treated as cache misses
  }
}

inline void cache_store_series(const SeriesCacheKey& key,
                               const LaurentSeries<double>& s) {
  auto dir = cache_directory();
  if (!dir) return;
  nlohmann::json j;
  j["l"] = key.l;
  j["k"] = key.k;
  j["eps"] = key.eps;
  j["n"] = key.n;
  j["N"] = key.N;
  j["lead"] = s.lead;
  auto coeffs = nlohmann::json::array();
  for (const auto& c : s.coeffs)
    coeffs.push_back({fmt17(c.real()), fmt17(c.imag())});
  j["coeffs"] = std::move(coeffs);

  auto final_path = *dir / cache_file_name(key);
  auto tmp_path = final_path;
  tmp_path += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp_path);
    if (!out) return;
    out << j.dump(1) << "\n";
  }
  std::error_code ec;
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) std::filesystem::remove(tmp_path, ec);
}

} // namespace heckelab
