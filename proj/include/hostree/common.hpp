#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace hostree {

// Caller error: bad index, level mismatch, malformed input. Distinct from an
// operation being undefined on its argument, which is reported via optional.
struct usage_error : std::invalid_argument {
    explicit usage_error(const std::string& msg) : std::invalid_argument(msg) {}
};

struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw usage_error(msg);
}

using Rng = std::mt19937_64;

// Direction symbols reserved for the tree-node encoding; they never occur in
// user-facing stacks of a loaded system.
inline constexpr char kDir1 = '1';
inline constexpr char kDir2 = '2';

inline bool symbol_char_ok(char c) {
    if (c == '[' || c == ']' || c == '_' || c == '(' || c == ')' || c == ',' ||
        c == '{' || c == '}' || c == '"' || c == '\\')
        return false;
    return c > ' ' && c <= '~';
}

// Ordered, duplicate-free set of symbol characters.
inline void validate_alphabet(const std::string& syms) {
    require(!syms.empty(), "alphabet must be non-empty");
    for (size_t i = 0; i < syms.size(); ++i) {
        require(symbol_char_ok(syms[i]), std::string("bad alphabet symbol: ") + syms[i]);
        for (size_t j = i + 1; j < syms.size(); ++j)
            require(syms[i] != syms[j], std::string("duplicate alphabet symbol: ") + syms[i]);
    }
}

}  // namespace hostree
