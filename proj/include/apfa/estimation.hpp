/* estimation.hpp -- maximum likelihood fitting and model dimension. */

#pragma once

#include <vector>

#include "apfa/counting.hpp"

namespace apfa {

/// A counted automaton with fitted edge probabilities. States with zero
/// count (synthetic completion states) receive uniform probabilities and are
/// flagged inestimable.
struct FittedApfa {
    CountedApfa counted;  // edges carry the fitted probabilities
    double log_lik = 0.0;
    int dim = 0;
    std::vector<bool> inestimable;  // per state
};

/// Relative-frequency estimates pi(e) = n(e)/n(source), maximizing the
/// likelihood; log_lik with the 0 log 0 = 0 convention.
FittedApfa fit_mle(const CountedApfa& c);

double log_likelihood(const FittedApfa& f);

struct Marginals {
    std::vector<double> node_probs;  // n(v)/N
    std::vector<double> edge_probs;  // n(e)/N
};
Marginals marginals(const FittedApfa& f);

/// Free parameters of the graph as given: sum over non-sink states of
/// (outdegree - 1). Absent edges contribute nothing.
int dimension(const Apfa& a);

/// -2 log_lik + alpha * dim. alpha = 2 gives AIC, alpha = log N gives BIC.
/// Throws ModelError for alpha < 0.
double information_criterion(const FittedApfa& f, double alpha);

/// Dimension of the completion of `a`, computed by a per-level state-count
/// recursion without materializing it. Completions grow geometrically, so the
/// value is returned as long double (exact while it fits the mantissa) and
/// may be astronomically large.
long double completed_dimension(const Apfa& a);

}  // namespace apfa
