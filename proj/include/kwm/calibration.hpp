/*
 *   Copyright 2026 The kwmoments Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
 */

#pragma once

#include <kwm/exact_moments.hpp>
#include <kwm/sharp_bounds.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace kwm {

/// n values, even d values and sigma2 = 2^e exponents of a bound grid.
struct BoundGrid {
  std::vector<long> ns;
  std::vector<long> ds;
  std::vector<int> log2_sigma2;

  std::string describe() const {
    std::ostringstream os;
    auto list = [&os](const char* name, const auto& v) {
      os << name << '=';
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
      os << ';';
    };
    list("n", ns);
    list("d", ds);
    list("log2_sigma2", log2_sigma2);
    return os.str();
  }

  /// FNV-1a over describe(), hex.
  std::string hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : describe()) {
      h ^= c;
      h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

/// n = 2^0..2^10, even d <= 16, sigma2 = 2^-20..2^0.
inline BoundGrid acceptance_grid() {
  BoundGrid g;
  for (int e = 0; e <= 10; ++e) g.ns.push_back(1L << e);
  for (long d = 2; d <= 16; d += 2) g.ds.push_back(d);
  for (int e = -20; e <= 0; ++e) g.log2_sigma2.push_back(e);
  return g;
}

/// sigma2 = 2^e as an exact rational (e <= 0).
inline Rational dyadic(int e) {
  BigInt den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(-e));
  return Rational(BigInt(1), den);
}

/// exact_moment^{1/d} / M(unit) for n iid three-point summands.
inline double exact_to_bound_ratio(long n, long d, const Rational& sigma2) {
  const Rational m = exact_moment_iid_threepoint({n, d, sigma2});
  const double m_unit = sharp_bound_M(make_query(n, sigma2.to_double(), d)).value;
  return std::exp(m.log() / static_cast<double>(d) - std::log(m_unit));
}

/// The d > 2n corner, where the SubGaussian branch of M stops tracking the
/// exact moment.
inline bool in_corner(long n, long d) { return d > 2 * n; }

struct RegimeRatioStats {
  double min = INFINITY;
  double max = 0.0;
  long count = 0;

  void add(double r) {
    min = std::min(min, r);
    max = std::max(max, r);
    ++count;
  }
  double midpoint() const { return count ? std::sqrt(min * max) : 1.0; }
  double spread() const { return count ? max / min : 1.0; }
};

struct CalibrationFit {
  CalibrationConstants constants;
  std::array<RegimeRatioStats, 3> stats;  // indexed by Regime
  long corner_points_skipped = 0;
};

/// Fits each regime's constant as the geometric midpoint of the exact/M ratio
/// range, which minimizes the worst multiplicative error. Corner points
/// (d > 2n) are skipped unless `include_corner`.
inline CalibrationFit fit_calibration(const BoundGrid& grid, bool include_corner = false) {
  CalibrationFit fit;
  for (long n : grid.ns) {
    for (long d : grid.ds) {
      if (!include_corner && in_corner(n, d)) {
        fit.corner_points_skipped += static_cast<long>(grid.log2_sigma2.size());
        continue;
      }
      for (int e : grid.log2_sigma2) {
        const Rational s2 = dyadic(e);
        const Regime r = classify_regime(make_query(n, s2.to_double(), d));
        fit.stats[static_cast<std::size_t>(r)].add(exact_to_bound_ratio(n, d, s2));
      }
    }
  }
  for (Regime r : all_regimes) fit.constants[r] = fit.stats[static_cast<std::size_t>(r)].midpoint();
  return fit;
}

struct CalibrationFile {
  int version = 1;
  CalibrationConstants constants;
  std::string grid;
  std::string grid_hash;
  std::string date;
  bool corner_excluded = true;
};

inline nlohmann::json to_json(const CalibrationFile& f) {
  nlohmann::json j;
  j["version"] = f.version;
  for (Regime r : all_regimes) j[std::string(to_string(r))] = f.constants[r];
  j["provenance"] = {{"grid", f.grid},
                     {"grid_hash", f.grid_hash},
                     {"date", f.date},
                     {"fit", "geometric midpoint of exact^(1/d)/M per regime"},
                     {"corner_excluded", f.corner_excluded}};
  return j;
}

inline CalibrationFile calibration_from_json(const nlohmann::json& j) {
  CalibrationFile f;
  if (!j.is_object()) throw std::invalid_argument("calibration file must hold a JSON object");
  f.version = j.value("version", 1);
  for (Regime r : all_regimes) {
    const std::string key(to_string(r));
    if (!j.contains(key) || !j[key].is_number()) throw std::invalid_argument("calibration file lacks '" + key + "'");
    const double c = j[key].get<double>();
    if (!(c > 0.0)) throw std::invalid_argument("calibration constant for " + key + " must be positive");
    f.constants[r] = c;
  }
  if (j.contains("provenance") && j["provenance"].is_object()) {
    const auto& p = j["provenance"];
    f.grid = p.value("grid", "");
    f.grid_hash = p.value("grid_hash", "");
    f.date = p.value("date", "");
    f.corner_excluded = p.value("corner_excluded", true);
  }
  return f;
}

inline CalibrationFile load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration file " + path);
  return calibration_from_json(nlohmann::json::parse(in));
}

inline void save_calibration(const CalibrationFile& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write calibration file " + path);
  out << to_json(f).dump(2) << '\n';
}

/// Path from KWM_CALIBRATION, else `fallback`.
inline std::string calibration_path(const std::string& fallback) {
  if (const char* env = std::getenv("KWM_CALIBRATION"); env != nullptr && *env != '\0') return env;
  return fallback;
}

/// Loads the calibration; on any failure warns on `diag` and returns nullopt,
/// which callers treat as unit mode.
inline std::optional<CalibrationFile> try_load_calibration(const std::string& path, std::ostream& diag = std::cerr) {
  try {
    return load_calibration(path);
  } catch (const std::exception& e) {
    diag << "warning: " << e.what() << "; falling back to unit constants\n";
    return std::nullopt;
  }
}

}  // namespace kwm
