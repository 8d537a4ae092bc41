#include "apfa/estimation.hpp"

#include <cmath>

#include "apfa/errors.hpp"

namespace apfa {

FittedApfa fit_mle(const CountedApfa& c) {
    FittedApfa f;
    f.counted = c;
    Apfa& g = f.counted.graph;
    f.inestimable.assign(g.num_states(), false);

    double ll = 0.0;
    for (StateId v = 0; v < g.num_states(); ++v) {
        if (g.state_level[v] >= g.num_levels) continue;
        const Count nv = f.counted.node_counts[v];
        const int deg = g.out_degree(v);
        for (EdgeId ei = g.out_offset[v]; ei < g.out_offset[v + 1]; ++ei) {
            Edge& e = g.edges[ei];
            if (nv > 0) {
                e.prob = static_cast<double>(e.count) / static_cast<double>(nv);
                if (e.count > 0) ll += static_cast<double>(e.count) * std::log(e.prob);
            } else {
                e.prob = 1.0 / static_cast<double>(deg);
            }
        }
        if (nv == 0) f.inestimable[v] = true;
    }
    f.log_lik = ll;
    f.dim = dimension(g);
    return f;
}

double log_likelihood(const FittedApfa& f) { return f.log_lik; }

Marginals marginals(const FittedApfa& f) {
    Marginals m;
    const double n = static_cast<double>(f.counted.total);
    if (n < 1) throw ModelError("marginals: empty sample");
    m.node_probs.reserve(f.counted.node_counts.size());
    for (Count nv : f.counted.node_counts) m.node_probs.push_back(static_cast<double>(nv) / n);
    m.edge_probs.reserve(f.counted.graph.edges.size());
    for (const Edge& e : f.counted.graph.edges)
        m.edge_probs.push_back(static_cast<double>(e.count) / n);
    return m;
}

int dimension(const Apfa& a) {
    int dim = 0;
    for (StateId v = 0; v < a.num_states(); ++v)
        if (a.state_level[v] < a.num_levels) dim += a.out_degree(v) - 1;
    return dim;
}

double information_criterion(const FittedApfa& f, double alpha) {
    if (alpha < 0) throw ModelError("information_criterion: alpha must be nonnegative");
    return -2.0 * f.log_lik + alpha * static_cast<double>(f.dim);
}

long double completed_dimension(const Apfa& a) {
    const int p = a.num_levels;
    // Synthetic states per level: every missing edge of a real state spawns a
    // fresh subtree root, and synthetic states expand with full alphabets.
    std::vector<long double> synthetic(p + 1, 0.0L);
    std::vector<long long> real(p + 1, 0);
    std::vector<long long> missing(p + 1, 0);
    for (StateId v = 0; v < a.num_states(); ++v) {
        const int l = a.state_level[v];
        ++real[l];
        if (l < p) missing[l] += a.alphabet_sizes[l] - a.out_degree(v);
    }
    for (int l = 1; l < p; ++l)
        synthetic[l] = static_cast<long double>(missing[l - 1]) +
                       synthetic[l - 1] * a.alphabet_sizes[l - 1];
    long double dim = 0.0L;
    for (int l = 0; l < p; ++l)
        dim += (static_cast<long double>(real[l]) + synthetic[l]) *
               static_cast<long double>(a.alphabet_sizes[l] - 1);
    return dim;
}

}  // namespace apfa
