#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "hostree/stack.hpp"

namespace hostree {

// Node position: word over {'1','2'}, root is "".
using Position = std::string;

// Ordered tree of arity <= 2 whose nodes carry stacks of a common level
// (n-1 for an order-n tree). Leaf indices are 1-based throughout, in the
// lexicographic order of positions.
struct StackTree {
    Stack label;
    std::vector<StackTree> children;

    static StackTree leaf(Stack s) { return StackTree{std::move(s), {}}; }

    int node_count() const;
    int order() const { return label.level + 1; }
    bool well_formed() const;

    int compare(const StackTree& o) const;
    bool operator==(const StackTree& o) const { return compare(o) == 0; }
    bool operator<(const StackTree& o) const { return compare(o) < 0; }
};

std::vector<Position> leaves(const StackTree& t);
int leaf_count(const StackTree& t);

bool position_in_domain(const StackTree& t, const Position& u);
const StackTree& subtree(const StackTree& t, const Position& u);
StackTree replace_subtree(const StackTree& t, const Position& u, const StackTree& s);

// theta_(i): apply a basic stack operation to the label of the i-th leaf.
std::optional<StackTree> apply_basic_at(const StackOp& op, int i, const StackTree& t);

// copy_n^k_(i): the i-th leaf gains k children carrying the parent's label.
StackTree duplicate_leaf(int k, int i, const StackTree& t);

// bar-copy_n^k_(i): inverse of duplicate_leaf; defined iff leaves i..i+k-1 are
// exactly all children of one node and all k+1 labels are equal.
std::optional<StackTree> merge_leaves(int k, int i, const StackTree& t);

std::string serialize_tree(const StackTree& t);
StackTree parse_tree(const std::string& text);
std::string tree_to_dot(const StackTree& t, const std::string& name = "stacktree");

// Degree <= 1 trees are isomorphic to stacks one level up.
Stack chain_to_stack(const StackTree& t);
StackTree stack_to_chain(const Stack& s);

}  // namespace hostree
