/* oracles.hpp -- independent reference computations for the test suites.
 *
 * Everything here recomputes a quantity by a route different from the
 * library implementation: literal recursive merging, per-row likelihood
 * sums, chi-square tails by series and by quadrature, and brute-force
 * enumeration of joint distributions.
 */

#pragma once

#include <random>
#include <vector>

#include "apfa/counting.hpp"
#include "apfa/estimation.hpp"

namespace apfa::testing {

/// Literal redirect-and-deduplicate state merging: returns the partition of
/// states into merge groups (groups of size >= 2, sorted by smallest member).
std::vector<std::vector<StateId>> recursive_merge_groups(const Apfa& a,
                                                         std::vector<StateId> seed);

/// Sum over rows of log probability_of(row) under the fitted model.
double per_row_log_lik(const FittedApfa& f, const Dataset& d);

/// Upper-tail chi-square by the exact series recurrence
/// Q(x, k+2) = Q(x, k) + term(k); seeds Q(., 1) = erfc(sqrt(x/2)),
/// Q(., 2) = exp(-x/2).
double chi2_tail_series(double x, int df);

/// Upper-tail chi-square by adaptive Simpson quadrature of the density.
double chi2_tail_quadrature(double x, int df);

/// Enumerates the full outcome space of a complete valid automaton.
std::vector<Outcome> enumerate_outcomes(const std::vector<int>& alphabet_sizes);

/// Random dataset: p columns with alphabet sizes in [2, max_alphabet], N rows
/// drawn from a random dependent distribution (rejection-free).
Dataset random_dataset(std::mt19937_64& rng, int max_p, int max_alphabet, int max_rows);

/// Random valid counted automaton: binary alphabets, `p` levels, at most
/// `max_width` states per level, positive flow counts. May be incomplete
/// and need not be a tree.
CountedApfa random_counted_apfa(std::mt19937_64& rng, int p, int max_width);

/// A random same-level pair of distinct states (level in 1..p-1), or empty
/// when no level has two states.
std::vector<StateId> random_pair(std::mt19937_64& rng, const Apfa& a);

}  // namespace apfa::testing
