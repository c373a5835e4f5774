#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hostree/dfa.hpp"

namespace hostree {

// Higher-order stack. A level-0 stack is a single symbol; a level-k stack is a
// non-empty sequence of level-(k-1) stacks whose last element is the top.
struct Stack {
    int level = 0;
    char sym = 0;
    std::vector<Stack> items;

    static Stack symbol(char c) {
        Stack s;
        s.level = 0;
        s.sym = c;
        return s;
    }
    static Stack seq(int level, std::vector<Stack> items);

    const Stack& top() const {
        require(level >= 1 && !items.empty(), "top() on level-0 stack");
        return items.back();
    }
    bool well_formed() const;
    int size() const { return level == 0 ? 1 : static_cast<int>(items.size()); }

    int compare(const Stack& o) const;
    bool operator==(const Stack& o) const { return compare(o) == 0; }
    bool operator<(const Stack& o) const { return compare(o) < 0; }
};

std::vector<Tok> stack_tokens(const Stack& s);
std::string serialize_stack(const Stack& s);
Stack parse_stack(const std::string& text);

// Regular set of level-`level` stacks, as a DFA over the bracketed
// serialization. Immutable; shared by value through shared_ptr.
struct TestLanguage {
    int level = 1;
    Dfa dfa;
    std::string key;  // canonical DFA key, used for label identity

    static std::shared_ptr<const TestLanguage> make(int level, Dfa dfa);
};
using TestRef = std::shared_ptr<const TestLanguage>;

bool test_membership(const TestLanguage& lang, const Stack& s);

TestRef tl_full(const std::string& alphabet, int level);
TestRef tl_empty(const std::string& alphabet, int level);
TestRef tl_exact(const Stack& s, const std::string& alphabet);
// Level-1 helpers.
TestRef tl_top_symbol(const std::string& alphabet, char c);
TestRef tl_contains(const std::string& alphabet, char c);
TestRef tl_top_two_equal(const std::string& alphabet);
TestRef tl_finite(const std::vector<Stack>& stacks, const std::string& alphabet, int level);

TestRef tl_intersect(const TestRef& a, const TestRef& b);
TestRef tl_union(const TestRef& a, const TestRef& b);
TestRef tl_complement(const TestRef& a);

// Basic stack operations. Rew and Id act at level 0, Cop/Ncop at their stated
// level, Test at the level of its language; all extend to higher-level stacks
// through the chain of topmost components.
struct RewOp {
    char from = 0, to = 0;
    auto operator<=>(const RewOp&) const = default;
};
struct IdOp {
    auto operator<=>(const IdOp&) const = default;
};
struct CopOp {
    int level = 1;
    auto operator<=>(const CopOp&) const = default;
};
struct NcopOp {
    int level = 1;
    auto operator<=>(const NcopOp&) const = default;
};
struct TestOp {
    TestRef lang;
};
using StackOp = std::variant<RewOp, IdOp, CopOp, NcopOp, TestOp>;

int op_level(const StackOp& op);
std::string op_key(const StackOp& op);
std::string op_text(const StackOp& op);
bool op_equal(const StackOp& a, const StackOp& b);

// Applies `op` to `s`; empty result means the partial function is undefined
// there. Level mismatch (op level above the stack's) is a usage error.
std::optional<Stack> apply_stack_op(const StackOp& op, const Stack& s);

Stack push_word(const std::string& word, const Stack& s);
std::optional<Stack> pop_word(const std::string& word, const Stack& s);

}  // namespace hostree
