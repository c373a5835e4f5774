#include "hostree/universe.hpp"

#include <cstdlib>

namespace hostree {

std::vector<Stack> enumerate_1stacks(const std::string& alphabet, int max_len) {
    std::vector<Stack> out;
    std::vector<std::vector<Stack>> words(static_cast<size_t>(max_len) + 1);
    for (char c : alphabet) words[1].push_back(Stack::seq(1, {Stack::symbol(c)}));
    for (int len = 2; len <= max_len; ++len)
        for (const Stack& w : words[len - 1])
            for (char c : alphabet) {
                Stack e = w;
                e.items.push_back(Stack::symbol(c));
                words[len].push_back(std::move(e));
            }
    for (int len = 1; len <= max_len; ++len)
        for (Stack& w : words[len]) out.push_back(std::move(w));
    return out;
}

std::vector<Stack> enumerate_stacks(const std::string& alphabet, int level, int max_width) {
    if (level == 0) {
        std::vector<Stack> out;
        for (char c : alphabet) out.push_back(Stack::symbol(c));
        return out;
    }
    std::vector<Stack> below = enumerate_stacks(alphabet, level - 1, max_width);
    std::vector<Stack> out;
    std::vector<std::vector<Stack>> seqs(static_cast<size_t>(max_width) + 1);
    for (const Stack& b : below) seqs[1].push_back(Stack::seq(level, {b}));
    for (int w = 2; w <= max_width; ++w)
        for (const Stack& s : seqs[w - 1])
            for (const Stack& b : below) {
                Stack e = s;
                e.items.push_back(b);
                seqs[w].push_back(std::move(e));
            }
    for (int w = 1; w <= max_width; ++w)
        for (Stack& s : seqs[w]) out.push_back(std::move(s));
    return out;
}

namespace {

// Shapes with exactly n nodes: child lists of size 0..2.
std::vector<std::vector<int>> shape_partitions(int n) {
    // returns child-size splits: {} | {n-1} | {i, n-1-i}
    std::vector<std::vector<int>> out;
    if (n == 1) {
        out.push_back({});
        return out;
    }
    out.push_back({n - 1});
    for (int i = 1; i < n - 1; ++i) out.push_back({i, n - 1 - i});
    return out;
}

void build_labelled(int n, const std::vector<Stack>& labels, std::vector<StackTree>& out) {
    // all trees with exactly n nodes
    if (n <= 0) return;
    std::vector<std::vector<StackTree>> memo(static_cast<size_t>(n) + 1);
    auto rec = [&](auto&& self, int m) -> const std::vector<StackTree>& {
        auto& slot = memo[m];
        if (!slot.empty() || m == 0) return slot;
        for (const auto& split : shape_partitions(m)) {
            if (split.empty()) {
                for (const Stack& l : labels) slot.push_back(StackTree::leaf(l));
            } else if (split.size() == 1) {
                for (const StackTree& c : self(self, split[0]))
                    for (const Stack& l : labels) {
                        StackTree t = StackTree::leaf(l);
                        t.children.push_back(c);
                        slot.push_back(std::move(t));
                    }
            } else {
                for (const StackTree& c1 : self(self, split[0]))
                    for (const StackTree& c2 : self(self, split[1]))
                        for (const Stack& l : labels) {
                            StackTree t = StackTree::leaf(l);
                            t.children.push_back(c1);
                            t.children.push_back(c2);
                            slot.push_back(std::move(t));
                        }
            }
        }
        return slot;
    };
    const auto& v = rec(rec, n);
    out.insert(out.end(), v.begin(), v.end());
}

}  // namespace

std::vector<StackTree> enumerate_trees(const std::vector<Stack>& labels, int max_nodes) {
    std::vector<StackTree> out;
    for (int n = 1; n <= max_nodes; ++n) build_labelled(n, labels, out);
    return out;
}

int count_tree_shapes(int n) {
    std::vector<int> memo(static_cast<size_t>(n) + 1, 0);
    memo[1] = 1;
    for (int m = 2; m <= n; ++m) {
        memo[m] = memo[m - 1];
        for (int i = 1; i < m - 1; ++i) memo[m] += memo[i] * memo[m - 1 - i];
    }
    return memo[n];
}

uint64_t corpus_seed(uint64_t fallback) {
    const char* env = std::getenv("HOSTREE_SEED");
    if (!env || !*env) return fallback;
    return std::strtoull(env, nullptr, 0);
}

Stack random_1stack(Rng& rng, const std::string& alphabet, int max_len) {
    std::uniform_int_distribution<int> len(1, max_len);
    std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
    std::vector<Stack> items;
    int n = len(rng);
    for (int i = 0; i < n; ++i) items.push_back(Stack::symbol(alphabet[pick(rng)]));
    return Stack::seq(1, std::move(items));
}

StackTree random_tree(Rng& rng, const std::vector<Stack>& labels, int max_nodes) {
    std::uniform_int_distribution<size_t> pick(0, labels.size() - 1);
    StackTree t = StackTree::leaf(labels[pick(rng)]);
    int nodes = 1;
    std::uniform_int_distribution<int> budget(1, max_nodes);
    int target = budget(rng);
    while (nodes < target) {
        // attach a child to a random node with arity < 2
        std::vector<StackTree*> open;
        auto walk = [&](auto&& self, StackTree& x) -> void {
            if (x.children.size() < 2) open.push_back(&x);
            for (StackTree& c : x.children) self(self, c);
        };
        walk(walk, t);
        std::uniform_int_distribution<size_t> which(0, open.size() - 1);
        open[which(rng)]->children.push_back(StackTree::leaf(labels[pick(rng)]));
        ++nodes;
    }
    return t;
}

OperationAutomaton random_automaton(Rng& rng, const RandomAutomatonParams& p) {
    OperationAutomaton a;
    a.order = p.order;
    a.alphabet = p.alphabet;
    a.nstates = p.nstates;
    std::uniform_int_distribution<int> q(0, p.nstates - 1);
    std::uniform_int_distribution<size_t> sym(0, p.alphabet.size() - 1);
    a.initial = {q(rng)};
    a.final_ = {q(rng)};
    std::vector<EdgeLabel> pool;
    for (char c : p.alphabet)
        for (char d : p.alphabet) pool.push_back(StackOp{RewOp{c, d}});
    if (p.order >= 2) {
        pool.push_back(StackOp{CopOp{1}});
        pool.push_back(StackOp{NcopOp{1}});
    }
    if (p.with_copy1) {
        pool.push_back(DirLabel{1});
        pool.push_back(CodirLabel{1});
    }
    if (p.with_tests && p.order == 2) {
        pool.push_back(StackOp{TestOp{tl_top_symbol(p.alphabet, p.alphabet[0])}});
    }
    std::uniform_int_distribution<size_t> pl(0, pool.size() - 1);
    for (int i = 0; i < p.nlin; ++i) a.lin.push_back({q(rng), pool[pl(rng)], q(rng)});
    for (int i = 0; i < p.nbranch; ++i) a.branch.push_back({q(rng), q(rng), q(rng)});
    for (int i = 0; i < p.nmerge; ++i) a.merge.push_back({q(rng), q(rng), q(rng)});
    return a;
}

std::vector<Gtrs1Rule> random_gtrs(Rng& rng, const std::string& alphabet, int nrules,
                                   int max_side) {
    std::vector<Stack> labels;
    for (char c : alphabet) labels.push_back(Stack::symbol(c));
    std::vector<Gtrs1Rule> out;
    for (int i = 0; i < nrules; ++i) {
        Gtrs1Rule r;
        r.lhs = random_tree(rng, labels, max_side);
        r.rhs = random_tree(rng, labels, max_side);
        r.label = std::string(1, static_cast<char>('a' + i));
        out.push_back(std::move(r));
    }
    return out;
}

OpDag random_compound(Rng& rng, const std::vector<EdgeLabel>& labels, int max_vertices,
                      int depth) {
    std::uniform_int_distribution<int> kind(1, 5);
    std::uniform_int_distribution<size_t> pick(0, labels.size() - 1);
    auto rec = [&](auto&& self, int d, int budget) -> OpDag {
        if (d <= 0 || budget <= 1) return emptydag();
        switch (kind(rng)) {
            case 1:
                return emptydag();
            case 2: {
                OpDag d1 = self(self, d - 1, budget / 2);
                OpDag d2 = self(self, d - 1, budget - d1.nv);
                if (d1.out_degree() != 1 || d2.in_degree() != 1) return emptydag();
                return compose_case2(d1, labels[pick(rng)], d2);
            }
            case 3: {
                OpDag d1 = self(self, d - 1, budget / 3);
                OpDag d2 = self(self, d - 1, budget / 3);
                OpDag d3 = self(self, d - 1, budget / 3);
                if (d1.out_degree() != 1 || d2.in_degree() != 1 || d3.in_degree() != 1)
                    return emptydag();
                return compose_case3(d1, d2, d3);
            }
            case 4: {
                OpDag d1 = self(self, d - 1, budget / 3);
                OpDag d2 = self(self, d - 1, budget / 3);
                OpDag d3 = self(self, d - 1, budget / 3);
                if (d1.out_degree() != 1 || d2.out_degree() != 1 || d3.in_degree() != 1)
                    return emptydag();
                return compose_case4(d1, d2, d3);
            }
            default: {
                OpDag d1 = self(self, d - 1, budget / 4);
                OpDag d2 = self(self, d - 1, budget / 4);
                OpDag d3 = self(self, d - 1, budget / 4);
                OpDag d4 = self(self, d - 1, budget / 4);
                if (d1.out_degree() != 1 || d2.in_degree() != 1 || d2.out_degree() != 1 ||
                    d3.in_degree() != 1 || d3.out_degree() != 1 || d4.in_degree() != 1)
                    return emptydag();
                return compose_case5(d1, d2, d3, d4);
            }
        }
    };
    for (int attempt = 0; attempt < 50; ++attempt) {
        OpDag d = rec(rec, depth, max_vertices);
        if (d.nv > 1 && d.nv <= max_vertices) return d;
    }
    return compose_case2(emptydag(), labels[pick(rng)], emptydag());
}

}  // namespace hostree
