#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "hostree/stack_tree.hpp"

namespace hostree {

struct DirLabel {
    int d = 1;  // 1 or 2
    auto operator<=>(const DirLabel&) const = default;
};
struct CodirLabel {
    int d = 1;
    auto operator<=>(const CodirLabel&) const = default;
};
using EdgeLabel = std::variant<StackOp, DirLabel, CodirLabel>;

std::string edge_label_key(const EdgeLabel& l);
std::string edge_label_text(const EdgeLabel& l);
bool edge_label_equal(const EdgeLabel& a, const EdgeLabel& b);

// Compound rewrite operation: an ordered DAG whose edges carry stack
// operations, tests, and the direction labels 1, 2, 1bar, 2bar. Vertex ids
// 0..nv-1 are the total order; inputs/outputs are ordered by id.
struct OpDag {
    int nv = 1;
    struct Edge {
        int from;
        EdgeLabel label;
        int to;
    };
    std::vector<Edge> edges;

    std::vector<int> inputs() const;
    std::vector<int> outputs() const;
    int in_degree() const { return static_cast<int>(inputs().size()); }
    int out_degree() const { return static_cast<int>(outputs().size()); }
    bool acyclic() const;
    bool connected() const;
    void validate() const;
};

std::string dag_key(const OpDag& d);
bool dag_equal(const OpDag& a, const OpDag& b);
bool dag_isomorphic(const OpDag& a, const OpDag& b);

OpDag emptydag();
// Fig. 3 basic operation DAGs.
OpDag basic_dag(const StackOp& op);
OpDag basic_copy(int k);     // D_{copy^k}: k in {1,2}
OpDag basic_barcopy(int k);  // D_{barcopy^k}

// (i,j)-concatenation: glue outputs i,i+1,... of d onto inputs j,j+1,... of dp
// while both exist; the left operand's vertex numbering is kept.
OpDag concat(const OpDag& d, int i, const OpDag& dp, int j);

// Decomposition per the inductive definition of compound operations.
struct Decomp {
    int kind = 1;  // 1..5
    EdgeLabel theta;  // kind 2 only
    std::vector<std::unique_ptr<Decomp>> subs;
};
using DecompPtr = std::unique_ptr<Decomp>;

bool is_compound(const OpDag& d);
DecompPtr find_decomposition(const OpDag& d);
// Distinct decompositions (different case/edge choices anywhere in the tree),
// up to `limit`. Used to exercise local confluence.
std::vector<DecompPtr> enumerate_decompositions(const OpDag& d, size_t limit);

// Localised application at the i-th leaf (1-based). Undefined basic steps,
// including applications that run off the frontier, yield an empty result.
std::optional<StackTree> apply_at(const OpDag& d, int i, const StackTree& t);
std::optional<StackTree> apply_with(const Decomp& dec, int i, const StackTree& t);
std::set<StackTree> apply_all(const OpDag& d, const StackTree& t);
std::optional<StackTree> apply_parallel(const std::vector<OpDag>& ds, const std::vector<int>& is,
                                        const StackTree& t);

// All directed path label words between all vertex pairs (epsilon omitted).
std::vector<std::vector<EdgeLabel>> path_words(const OpDag& d);
// Membership of every path word in Red_n for the given order.
bool is_reduced(const OpDag& d, int order);
Dfa red_word_dfa(int order);
Tok red_class(const EdgeLabel& l);  // -1 when the label has no Red class (Id)

// Bounded iteration enumerators (testing surface; star lives in op_automaton).
std::vector<OpDag> concat_all(const OpDag& d, const OpDag& dp, int max_vertices);
std::vector<OpDag> dag_power(const OpDag& d, int n, int max_vertices);

// Compose per the five inductive cases with block-ordered vertex numbering;
// the basic-operation vertices merge into the neighbouring blocks.
OpDag compose_case2(const OpDag& d1, const EdgeLabel& lbl, const OpDag& d2);
OpDag compose_case3(const OpDag& d1, const OpDag& d2, const OpDag& d3);
OpDag compose_case4(const OpDag& d1, const OpDag& d2, const OpDag& d3);
OpDag compose_case5(const OpDag& d1, const OpDag& d2, const OpDag& d3, const OpDag& d4);

// Order-1 ground tree rewrite rule (l, r) compiled to a compound operation
// whose induced relation is the rule's rewrite relation.
OpDag compile_gtrs_rule(const StackTree& lhs, const StackTree& rhs);

std::string dag_to_text(const OpDag& d);
OpDag dag_from_text(const std::string& text);
std::string dag_to_dot(const OpDag& d, const std::string& name = "opdag");

}  // namespace hostree
