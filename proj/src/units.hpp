#pragma once

#include <cmath>

namespace hstn {

// All internal math runs in linear milliwatts / amplitude gains.
// dB conversions happen only at I/O boundaries (JSON config, CSV).

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

inline constexpr double kLog2E = 1.4426950408889634074;  // log2(e)

}  // namespace hstn
