#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hostree/op_dag.hpp"

namespace hostree {

// Finite automaton over compound operations. Lin transitions carry a level
// <= n-1 stack operation (including tests and Id) or the copy^1/barcopy^1
// labels, encoded as Dir(1)/Codir(1). Branch matches a vertex with 1,2
// out-edges, Merge a vertex with 1bar,2bar in-edges.
struct OperationAutomaton {
    int order = 2;
    std::string alphabet;
    int nstates = 0;
    std::vector<int> initial;
    std::vector<int> final_;
    struct Lin {
        int from;
        EdgeLabel label;
        int to;
    };
    struct Branch {
        int from, to1, to2;
    };
    struct Merge {
        int from1, from2, to;
    };
    std::vector<Lin> lin;
    std::vector<Branch> branch;
    std::vector<Merge> merge;

    void validate() const;
    bool is_initial(int q) const;
    bool is_final(int q) const;
    std::vector<EdgeLabel> lin_label_pool() const;  // deduped lin labels
};

using Labelling = std::vector<int>;  // vertex -> state

// Consistent labelling witnessing acceptance, if one exists.
// Pre: d is a compound operation.
std::optional<Labelling> accepts(const OperationAutomaton& a, const OpDag& d);

// All accepted compound DAGs with at most max_vertices vertices, in canonical
// block-ordered vertex numbering, built over the automaton's own label pool.
std::vector<OpDag> enumerate_accepted(const OperationAutomaton& a, int max_vertices);

OperationAutomaton union_auto(const OperationAutomaton& a1, const OperationAutomaton& a2);
OperationAutomaton intersect_auto(const OperationAutomaton& a1, const OperationAutomaton& a2);
OperationAutomaton star_auto(const OperationAutomaton& a);
OperationAutomaton singleton_auto(const OpDag& d, int order, const std::string& alphabet);

struct Gstrs;  // rewriting.hpp
OperationAutomaton from_system(const Gstrs& r);

struct RelatesBudget {
    int max_dag_vertices = 6;
    int max_tuple = 2;
    int max_total_vertices = 12;
};

struct RelatesWitness {
    std::vector<OpDag> dags;
    std::vector<int> indices;
};

enum class RelatesStatus { Found, NotFoundWithinBudget };

struct RelatesResult {
    RelatesStatus status = RelatesStatus::NotFoundWithinBudget;
    std::optional<RelatesWitness> witness;
};

// Searches for a tuple of accepted operations applied in parallel turning s
// into t; witnesses are replayed through apply_parallel before being returned.
// Exhausting the budget without a witness is reported as NotFoundWithinBudget
// ("unknown"), never as a definite no.
RelatesResult relates(const OperationAutomaton& a, const StackTree& s, const StackTree& t,
                      const RelatesBudget& budget);
RelatesResult relates(const OperationAutomaton& a, const StackTree& s, const StackTree& t,
                      const RelatesBudget& budget, const std::vector<OpDag>& candidates);

// Every tree reachable from s by one accepted parallel tuple within budget.
std::set<StackTree> relation_image(const OperationAutomaton& a, const StackTree& s,
                                   const RelatesBudget& budget);
std::set<StackTree> relation_image(const OperationAutomaton& a, const StackTree& s,
                                   const RelatesBudget& budget,
                                   const std::vector<OpDag>& candidates);

}  // namespace hostree
