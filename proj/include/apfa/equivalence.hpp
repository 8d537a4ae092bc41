/* equivalence.hpp -- relating automata to directed/undirected graphical models.
 *
 * A level-i state w conditions the future on the event "the prefix lies in
 * C(w)". When, at every level, those events coincide with the value classes
 * of some index set A(i) (property Q), the automaton expresses ordinary
 * conditional independences and corresponds to a Bayesian network with
 * pa(i) = A(i-1), and to the decomposable undirected model with the same
 * skeleton.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apfa/automaton.hpp"

namespace apfa {

struct IndependenceStatement {
    enum class Kind {
        context_specific,  // X_{>i} indep X_{<=i} given X_{<=i} in C(w)
        marginal,          // X_{<=i} indep X_{>i} (single state at level i)
    };
    Kind kind = Kind::context_specific;
    int level = 0;                 // the past/future split point i
    int total_levels = 0;          // p
    StateId state = kNoState;      // the conditioning state (context_specific)
    std::vector<Outcome> context;  // C(w), each prefix of length `level`

    std::string to_string() const;
};

/// One context-specific statement per internal state with at least two
/// root paths; a marginal statement for levels with a single state;
/// single-path states are omitted as content-free.
std::vector<IndependenceStatement> extract_statements(const Apfa& a);

/// All root-to-w symbol sequences, indexed by state. Guarded against
/// exponential blowup. Test- and equivalence-support; desk scale.
std::vector<std::vector<Outcome>> contexts_by_state(const Apfa& a,
                                                    std::size_t max_total = 1u << 22);

/// For each level i = 1..p-1, the maximal A(i) within {1..i} whose value
/// classes are exactly the state contexts; nullopt when no such set exists
/// at some level. The returned sets satisfy A(i) within A(i-1) + {i}.
std::optional<std::vector<std::vector<int>>> property_q(const Apfa& a);

/// Directed graphical model over variables 1..n with edges respecting the
/// variable order: parents[i] lie in {1..i-1}. Index 0 unused.
struct Dag {
    int n = 0;
    std::vector<std::vector<int>> parents;  // size n+1, sorted sets

    static Dag empty(int n);
};

struct UndirectedGraph {
    int n = 0;
    std::vector<std::vector<int>> adj;  // size n+1, sorted, symmetric

    static UndirectedGraph empty(int n);
    void add_edge(int a, int b);
};

/// pa(i) = A(i-1); requires property Q. The result has no immoralities.
Dag apfa_to_dag(const Apfa& a);

/// Inverse construction: requires pa(i) within pa(i-1) + {i-1} for
/// i = 2..p; level-i states are the value classes of x_{pa(i+1)}. Throws
/// ModelError naming the first offending i. Round-trips with apfa_to_dag
/// (alphabets of size >= 2).
Apfa dag_to_apfa(const Dag& g, const std::vector<int>& alphabet_sizes);

/// Orients the undirected model by the variable order and applies
/// dag_to_apfa; the admissibility condition transfers.
Apfa ug_to_apfa(const UndirectedGraph& u, const std::vector<int>& alphabet_sizes);

}  // namespace apfa
