#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hostree/stack_tree.hpp"

namespace hostree {

// A tree node encoded as the stack of its ancestor labels, each non-final one
// extended by its (arity, next-direction) pair of reserved symbols.
Stack encode_node(const StackTree& t, const Position& u);

// X_t: the encodings of all leaves, canonically ordered. Injective on trees.
std::vector<Stack> encode_tree(const StackTree& t);

enum class DecodeTag { Ok, OnlyLeaves, TreeDom, UniqueLabel };
std::string decode_tag_name(DecodeTag tag);

struct DecodeResult {
    DecodeTag tag = DecodeTag::Ok;
    std::optional<StackTree> tree;
    std::string detail;
};

// Reconstructs the unique tree t with X = X_t, or reports which of the three
// validity conditions fails (checked in the order OnlyLeaves, TreeDom,
// UniqueLabel).
DecodeResult decode(const std::vector<Stack>& x);

}  // namespace hostree
