#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "crnf/rational.hpp"

namespace crnf {

// Exact n-th root of a rational if one exists (q may be negative when n is odd).
std::optional<Rat> rational_root(const Rat& q, unsigned n);

// |v| when it is rational, i.e. when norm2(v) is a perfect rational square.
std::optional<Rat> gauss_abs(const GaussRat& v);

bool is_unimodular(const GaussRat& v);

// A unimodular w with w^m = u, within the Gaussian rationals, when one exists.
// Roots of unity inside Q(i) are only {1, i, -1, -i}; everything else goes
// through the splitting of the numerator into Gaussian primes.
std::optional<GaussRat> unimodular_root(const GaussRat& u, unsigned m);

// i^k for k mod 4
GaussRat unit_i_power(long k);

// Compare arg(v) (in [0, 2*pi), v exact nonzero) against pi*num/den with
// num/den in [0, 2). Exact on the eight half-axes arg = k*pi/4; elsewhere the
// argument is irrational as a multiple of pi and escalating-precision interval
// evaluation decides. Returns -1, 0, +1.
int compare_arg_with_angle(const GaussRat& v, long num, long den);

// Compare arg(a) with arg(b) for exact nonzero a, b whose ratio a/b has an
// argument that is a rational multiple of pi (callers guarantee this); exact.
int compare_args(const GaussRat& a, const GaussRat& b);

}  // namespace crnf
