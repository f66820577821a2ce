#pragma once

namespace mdlgbc {

/// Numerical constants shared by ball statistics, coding and prediction.
/// All lengths are in nats.
struct CodingConstants {
  double eps_r = 1e-10;    ///< radius floor
  double eps_v = 1e-10;    ///< variance floor
  double eps_num = 1e-12;  ///< clip floor inside -ln(1 - rho)
  double eps_mdl = 1e-6;   ///< absolute margin a split must beat the single ball by

  bool valid() const noexcept { return eps_r > 0 && eps_v > 0 && eps_num > 0 && eps_mdl > 0; }

  friend bool operator==(const CodingConstants&, const CodingConstants&) = default;
};

}  // namespace mdlgbc
