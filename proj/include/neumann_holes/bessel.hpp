#pragma once

#include <vector>

#include "neumann_holes/errors.hpp"

namespace nh {
namespace bessel {

// First-kind Bessel functions, ~1e-13 absolute accuracy on [0, inf).
double j0(double z);
double j1(double z);
// J_n for 0 <= n <= n_max at a single argument (Miller downward recurrence).
std::vector<double> jn_table(double z, int n_max);

// k-th positive root of J0'(z) = -J1(z), i.e. of J1 (k >= 1).
double j0_prime_zero(int k);
// k-th positive zero of J0.
double j0_zero(int k);

} // namespace bessel
} // namespace nh
