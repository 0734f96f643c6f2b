#pragma once

#include <cmath>
#include <limits>

// All powers inside the library are linear milliwatts.
namespace hris::units {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double value) {
  if (value <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(value);
}

inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

/// Amplitude bound for an amplifier whose power gain is `db`.
inline double amplitude_from_power_db(double db) { return std::pow(10.0, db / 20.0); }

}  // namespace hris::units
