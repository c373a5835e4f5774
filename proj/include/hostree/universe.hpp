#pragma once

#include <string>
#include <vector>

#include "hostree/op_automaton.hpp"
#include "hostree/rewriting.hpp"

namespace hostree {

// Bounded enumerators backing the brute-force oracles.

// All 1-stacks over the alphabet with 1..max_len symbols.
std::vector<Stack> enumerate_1stacks(const std::string& alphabet, int max_len);

// All stacks of the given level with every sequence length <= max_width.
std::vector<Stack> enumerate_stacks(const std::string& alphabet, int level, int max_width);

// All trees with <= max_nodes nodes labelled from the pool.
std::vector<StackTree> enumerate_trees(const std::vector<Stack>& labels, int max_nodes);

// All ordered tree shapes (arity <= 2) with exactly n nodes, as unlabelled
// child-structure skeletons encoded in trees with a dummy label.
int count_tree_shapes(int n);

// Seed from HOSTREE_SEED when set, else the given default.
uint64_t corpus_seed(uint64_t fallback);

Stack random_1stack(Rng& rng, const std::string& alphabet, int max_len);
StackTree random_tree(Rng& rng, const std::vector<Stack>& labels, int max_nodes);

struct RandomAutomatonParams {
    int order = 2;
    std::string alphabet = "ab";
    int nstates = 4;
    int nlin = 5;
    int nbranch = 1;
    int nmerge = 1;
    bool with_tests = false;
    bool with_copy1 = true;
};

OperationAutomaton random_automaton(Rng& rng, const RandomAutomatonParams& p);

// Random order-1 ground tree rewriting system; rule sides have <= max_side
// nodes each.
struct Gtrs1Rule {
    StackTree lhs, rhs;
    std::string label;
};
std::vector<Gtrs1Rule> random_gtrs(Rng& rng, const std::string& alphabet, int nrules,
                                   int max_side);

// Random compound DAG built by a random constructor derivation.
OpDag random_compound(Rng& rng, const std::vector<EdgeLabel>& labels, int max_vertices,
                      int depth = 3);

}  // namespace hostree
