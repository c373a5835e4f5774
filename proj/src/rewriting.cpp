#include "hostree/rewriting.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace hostree {

void Gstrs::validate() const {
    validate_alphabet(alphabet);
    require(order >= 1 && order <= 3, "supported orders are 1..3");
    for (const Rule& r : rules) {
        r.dag.validate();
        require(is_compound(r.dag), "rule '" + r.name + "' is not a compound operation");
        for (const auto& e : r.dag.edges)
            if (const auto* op = std::get_if<StackOp>(&e.label))
                require(op_level(*op) <= order - 1,
                        "rule '" + r.name + "' uses an operation above order-1 level");
        if (!r.label.empty())
            require(std::find(labels.begin(), labels.end(), r.label) != labels.end(),
                    "rule label '" + r.label + "' not in the label alphabet");
    }
}

bool pattern_matches(const TreePattern& p, const StackTree& t) {
    if (p.children.size() != t.children.size()) return false;
    switch (p.kind) {
        case TreePattern::Kind::Exact:
            if (!(t.label == *p.stack)) return false;
            break;
        case TreePattern::Kind::Test:
            if (!test_membership(*p.test, t.label)) return false;
            break;
        case TreePattern::Kind::Any:
            break;
    }
    for (size_t i = 0; i < p.children.size(); ++i)
        if (!pattern_matches(p.children[i], t.children[i])) return false;
    return true;
}

bool matches_any(const std::vector<TreePattern>& pats, const StackTree& t) {
    for (const TreePattern& p : pats)
        if (pattern_matches(p, t)) return true;
    return false;
}

namespace {

struct CompiledRules {
    std::vector<DecompPtr> decomps;
};

CompiledRules compile(const Gstrs& r) {
    CompiledRules c;
    for (const Rule& rule : r.rules) {
        c.decomps.push_back(find_decomposition(rule.dag));
        require(c.decomps.back() != nullptr, "rule '" + rule.name + "' is not compound");
    }
    return c;
}

void rule_successors(const Gstrs& r, const CompiledRules& c, const StackTree& t,
                     std::set<std::pair<std::string, StackTree>>& out) {
    int n = leaf_count(t);
    for (size_t k = 0; k < r.rules.size(); ++k)
        for (int i = 1; i <= n; ++i) {
            auto res = apply_with(*c.decomps[k], i, t);
            if (res) out.insert({r.rules[k].label, std::move(*res)});
        }
}

}  // namespace

std::vector<std::pair<std::string, StackTree>> successors(const Gstrs& r, const StackTree& t) {
    CompiledRules c = compile(r);
    std::set<std::pair<std::string, StackTree>> set;
    rule_successors(r, c, t, set);
    return {set.begin(), set.end()};
}

std::set<StackTree> reachable(const Gstrs& r, const StackTree& t0, int depth) {
    require(depth >= 0, "reachable: depth must be >= 0");
    CompiledRules c = compile(r);
    std::set<StackTree> seen = {t0};
    std::vector<StackTree> frontier = {t0};
    for (int d = 0; d < depth && !frontier.empty(); ++d) {
        std::vector<StackTree> next;
        for (const StackTree& t : frontier) {
            std::set<std::pair<std::string, StackTree>> succ;
            rule_successors(r, c, t, succ);
            for (auto& [lbl, u] : succ)
                if (seen.insert(u).second) next.push_back(u);
        }
        frontier = std::move(next);
    }
    return seen;
}

namespace {

int default_silent_budget(int word_len) { return 4 * word_len + 8; }

}  // namespace

WordResult accepts_word(const Gstrs& r, const StackTree& t0,
                        const std::vector<TreePattern>& finals, const std::string& w,
                        int silent_budget) {
    if (silent_budget < 0) silent_budget = default_silent_budget(static_cast<int>(w.size()));
    CompiledRules c = compile(r);
    // States: (tree, matched prefix length); silent steps bounded per path.
    std::map<std::pair<StackTree, int>, int> best_eps;  // minimal silent count
    std::deque<std::tuple<StackTree, int, int>> q;
    bool truncated = false;
    q.push_back({t0, 0, 0});
    best_eps[{t0, 0}] = 0;
    while (!q.empty()) {
        auto [t, pos, eps] = q.front();
        q.pop_front();
        if (pos == static_cast<int>(w.size()) && matches_any(finals, t)) return WordResult::Accepted;
        std::set<std::pair<std::string, StackTree>> succ;
        rule_successors(r, c, t, succ);
        for (auto& [lbl, u] : succ) {
            int npos = pos, neps = eps;
            if (lbl.empty()) {
                ++neps;
                if (neps > silent_budget) {
                    truncated = true;
                    continue;
                }
            } else {
                if (pos >= static_cast<int>(w.size()) || w.substr(pos, lbl.size()) != lbl) continue;
                npos = pos + static_cast<int>(lbl.size());
            }
            auto key = std::make_pair(u, npos);
            auto it = best_eps.find(key);
            if (it != best_eps.end() && it->second <= neps) continue;
            best_eps[key] = neps;
            q.push_back({u, npos, neps});
        }
    }
    return truncated ? WordResult::Unknown : WordResult::Rejected;
}

TraceResult trace_language(const Gstrs& r, const StackTree& t0,
                           const std::vector<TreePattern>& finals, int maxlen,
                           int silent_budget) {
    require(maxlen >= 0, "trace_language: maxlen must be >= 0");
    if (silent_budget < 0) silent_budget = default_silent_budget(maxlen);
    CompiledRules c = compile(r);
    TraceResult out;
    std::map<std::pair<StackTree, std::string>, int> best_eps;
    std::deque<std::tuple<StackTree, std::string, int>> q;
    q.push_back({t0, "", 0});
    best_eps[{t0, ""}] = 0;
    while (!q.empty()) {
        auto [t, word, eps] = q.front();
        q.pop_front();
        if (matches_any(finals, t)) out.words.insert(word);
        std::set<std::pair<std::string, StackTree>> succ;
        rule_successors(r, c, t, succ);
        for (auto& [lbl, u] : succ) {
            std::string nword = word + lbl;
            if (static_cast<int>(nword.size()) > maxlen) continue;
            int neps = eps + (lbl.empty() ? 1 : 0);
            if (neps > silent_budget) {
                out.budget_hit = true;
                continue;
            }
            auto key = std::make_pair(u, nword);
            auto it = best_eps.find(key);
            if (it != best_eps.end() && it->second <= neps) continue;
            best_eps[key] = neps;
            q.push_back({u, nword, neps});
        }
    }
    return out;
}

std::string rewriting_graph_dot(const Gstrs& r, const StackTree& t0, int depth) {
    CompiledRules c = compile(r);
    std::map<StackTree, int> id;
    std::vector<StackTree> order;
    auto intern = [&](const StackTree& t) {
        auto it = id.find(t);
        if (it != id.end()) return it->second;
        int i = static_cast<int>(order.size());
        id[t] = i;
        order.push_back(t);
        return i;
    };
    std::ostringstream os;
    os << "digraph rewriting {\n  node [shape=box];\n";
    std::set<std::tuple<int, std::string, int>> edges;
    std::vector<StackTree> frontier = {t0};
    intern(t0);
    for (int d = 0; d < depth; ++d) {
        std::vector<StackTree> next;
        for (const StackTree& t : frontier) {
            std::set<std::pair<std::string, StackTree>> succ;
            rule_successors(r, c, t, succ);
            for (auto& [lbl, u] : succ) {
                bool fresh = !id.count(u);
                int a = intern(t), b = intern(u);
                edges.insert({a, lbl, b});
                if (fresh) next.push_back(u);
            }
        }
        frontier = std::move(next);
    }
    for (size_t i = 0; i < order.size(); ++i)
        os << "  n" << i << " [label=\"" << serialize_tree(order[i]) << "\"];\n";
    for (auto& [a, lbl, b] : edges)
        os << "  n" << a << " -> n" << b << " [label=\"" << (lbl.empty() ? "~" : lbl) << "\"];\n";
    os << "}\n";
    return os.str();
}

OperationAutomaton from_system(const Gstrs& r) {
    r.validate();
    OperationAutomaton out;
    out.order = r.order;
    out.alphabet = r.alphabet;
    bool first = true;
    for (const Rule& rule : r.rules) {
        OperationAutomaton s = singleton_auto(rule.dag, r.order, r.alphabet);
        out = first ? s : union_auto(out, s);
        first = false;
    }
    return out;
}

}  // namespace hostree
