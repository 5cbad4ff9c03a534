#pragma once

#include <cstddef>

// Wigner 3j/6j symbols and Clebsch-Gordan coefficients for integer angular
// momenta. Values are computed exactly (prime-factorised Racah sums with
// big-integer accumulation) and rounded once to double. Results are memoised
// in a process-wide table keyed by the canonical member of each symmetry
// class; the table is safe for concurrent use.
//
// Arguments outside the selection rules (triangle violations, |m| > j,
// m1 + m2 + m3 != 0, negative j) give exactly 0.

namespace coldcc::angmom {

/// Largest angular momentum accepted by the exact evaluators.
inline constexpr int kMaxAngularMomentum = 48;

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3);
double wigner6j(int j1, int j2, int j3, int j4, int j5, int j6);

/// <j1 m1; j2 m2 | J M> in the Condon-Shortley convention.
double clebsch(int j1, int m1, int j2, int m2, int J, int M);

/// Uncached evaluations, exposed for benchmarks and cache-transparency tests.
double wigner3j_uncached(int j1, int j2, int j3, int m1, int m2, int m3);
double wigner6j_uncached(int j1, int j2, int j3, int j4, int j5, int j6);

bool triangle(int a, int b, int c);

/// <l || C^k || l'> with C^k the renormalised spherical harmonic.
double reduced_spherical_harmonic(int l, int k, int lp);

/// Number of memoised symbols (both kinds).
std::size_t cache_size();
void clear_cache();

}  // namespace coldcc::angmom
