#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hostree/common.hpp"

namespace hostree {

// Tokens of the bracketed stack serialization: symbol characters plus one
// open/close bracket pair per level. Also reused as a generic small integer
// alphabet (e.g. the Red_n label classes).
using Tok = int;

inline Tok tok_sym(char c) { return static_cast<unsigned char>(c); }
inline Tok tok_open(int level) { return 256 + 2 * (level - 1); }
inline Tok tok_close(int level) { return 257 + 2 * (level - 1); }
inline bool tok_is_sym(Tok t) { return t >= 0 && t < 256; }
std::string tok_name(Tok t);

std::vector<Tok> token_universe(const std::string& alphabet, int level);

// Deterministic automaton over Tok. Transitions absent from `trans` go to an
// implicit dead (rejecting) state, so the function is total on `tokens`.
struct Dfa {
    int nstates = 1;
    int start = 0;
    std::vector<char> accepting;  // size nstates
    std::map<std::pair<int, Tok>, int> trans;
    std::vector<Tok> tokens;  // declared universe, sorted

    int step(int q, Tok t) const {
        if (q < 0) return -1;
        auto it = trans.find({q, t});
        return it == trans.end() ? -1 : it->second;
    }
    bool accepts(const std::vector<Tok>& word) const {
        int q = start;
        for (Tok t : word) {
            q = step(q, t);
            if (q < 0) return false;
        }
        return q >= 0 && accepting[q];
    }

    bool empty_language() const;
    Dfa completed() const;
    Dfa complemented() const;
    static Dfa product(const Dfa& a, const Dfa& b, bool conjunction);
    Dfa minimized() const;
    std::string canonical_key() const;

    static Dfa reject_all(std::vector<Tok> tokens);
    static Dfa accept_all(std::vector<Tok> tokens);
};

// Nondeterministic helper used by the builders; `tok == nullopt` is epsilon.
struct Nfa {
    struct Tr {
        int from;
        std::optional<Tok> tok;
        int to;
    };
    int nstates = 0;
    std::vector<int> starts;
    std::vector<int> finals;
    std::vector<Tr> trans;

    int add_state() { return nstates++; }
    void add(int from, std::optional<Tok> tok, int to) { trans.push_back({from, tok, to}); }
    Dfa determinize(const std::vector<Tok>& universe) const;
    Nfa reversed() const;
};

}  // namespace hostree
