#pragma once

namespace backflow {

/// Bessel function of the first kind, order zero. Absolute error below 1e-10
/// for |x| <= 50 (and well beyond). Throws std::domain_error on non-finite x.
double bessel_j0(double x);

/// Airy function Ai. Absolute error below 1e-9 on [-30, 10]; the asymptotic
/// branches keep it usable far outside that range.
double airy_ai(double x);

} // namespace backflow
