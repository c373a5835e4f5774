#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hostree/op_automaton.hpp"
#include "hostree/op_dag.hpp"

namespace hostree {

// Label alphabet entry "" is the silent label: silent rule firings contribute
// no letter to path words.
struct Rule {
    std::string name;
    OpDag dag;
    std::string label;
};

struct Gstrs {
    int order = 2;
    std::string alphabet;
    std::vector<Rule> rules;
    std::vector<std::string> labels;  // the label alphabet Gamma

    void validate() const;
};

// Final-tree patterns: per node an exact stack, a test-language constraint,
// or a wildcard; the pattern's shape must match exactly.
struct TreePattern {
    enum class Kind { Exact, Test, Any };
    Kind kind = Kind::Any;
    std::optional<Stack> stack;
    TestRef test;
    std::vector<TreePattern> children;

    static TreePattern exact(Stack s) {
        TreePattern p;
        p.kind = Kind::Exact;
        p.stack = std::move(s);
        return p;
    }
    static TreePattern any() { return TreePattern{}; }
    static TreePattern with_test(TestRef t) {
        TreePattern p;
        p.kind = Kind::Test;
        p.test = std::move(t);
        return p;
    }
};

bool pattern_matches(const TreePattern& p, const StackTree& t);
bool matches_any(const std::vector<TreePattern>& pats, const StackTree& t);

// One-step labelled successors, deduplicated and canonically ordered.
std::vector<std::pair<std::string, StackTree>> successors(const Gstrs& r, const StackTree& t);

std::set<StackTree> reachable(const Gstrs& r, const StackTree& t0, int depth);

enum class WordResult { Accepted, Rejected, Unknown };

// Path acceptance with silent rules: budget caps the silent steps per path;
// Unknown reports that the budget truncated the search before a witness.
WordResult accepts_word(const Gstrs& r, const StackTree& t0,
                        const std::vector<TreePattern>& finals, const std::string& w,
                        int silent_budget = -1);

struct TraceResult {
    std::set<std::string> words;
    bool budget_hit = false;
};

TraceResult trace_language(const Gstrs& r, const StackTree& t0,
                           const std::vector<TreePattern>& finals, int maxlen,
                           int silent_budget = -1);

std::string rewriting_graph_dot(const Gstrs& r, const StackTree& t0, int depth);

}  // namespace hostree
