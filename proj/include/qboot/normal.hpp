#pragma once

namespace qboot {

/// Inverse standard normal CDF (Wichura's rational approximations).
/// Absolute error is below 1e-9 across (0, 1), comfortably inside the
/// tolerance needed for coverage truth values.
double inverse_normal_cdf(double p);

}  // namespace qboot
