#pragma once

// Closed-form rate expressions for the uniform cube, the difference of two
// uniform cubes and the standard normal law. Used as fast paths by the rate
// engine and as oracles for its numerical route.

#include <cstdint>

#include "lpconc/distributions.hpp"

namespace lpconc::closed_form {

enum class Family { UniformCube, DiffUniform, StandardNormal };

const char* to_string(Family f);

/// Small-p rate for |x| uniform on [0, b]: -log[(1 +- d)(1 - log(1 +- d))].
double uniform_f(double delta, Sign sign);

/// h(d) = 25 - 12 log(1 +- d) + 4 log^2(1 +- d).
double diff_uniform_h(double delta, Sign sign);

/// Small-p rate for x = y - z, y, z uniform on [-1,1].
double diff_uniform_f(double delta, Sign sign);

/// Maximizer y* of the small-p objective for the difference law.
double diff_uniform_ystar(double delta, Sign sign);

/// The small-p objective g(y) for the difference law; g(y*) must equal diff_uniform_f.
double diff_uniform_objective(double y, double delta, Sign sign);

/// phi(p) = (p^2/2) E[|x|^p]^2 / Var[|x|^p].
double phi_closed(Family family, double p);

/// lim_{p -> 0+} phi(p) = 1 / (2 Var[log|x|]).
double phi_limit_at_zero(Family family);

/// [(1 + d)(1 - log(1 + d))]^n.
double cube_upper_bound(double delta, std::int64_t n);

}  // namespace lpconc::closed_form
