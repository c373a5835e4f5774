#include "hostree/op_automaton.hpp"

#include <algorithm>
#include <map>

namespace hostree {

void OperationAutomaton::validate() const {
    auto in_range = [&](int q) { return q >= 0 && q < nstates; };
    for (int q : initial) require(in_range(q), "initial state out of range");
    for (int q : final_) require(in_range(q), "final state out of range");
    for (const Lin& t : lin) {
        require(in_range(t.from) && in_range(t.to), "lin transition state out of range");
        if (const auto* op = std::get_if<StackOp>(&t.label))
            require(op_level(*op) <= order - 1, "lin operation level exceeds order-1");
        if (const auto* d = std::get_if<DirLabel>(&t.label))
            require(d->d == 1, "lin direction label must be dir(1)");
        if (const auto* c = std::get_if<CodirLabel>(&t.label))
            require(c->d == 1, "lin codirection label must be codir(1)");
    }
    for (const Branch& t : branch)
        require(in_range(t.from) && in_range(t.to1) && in_range(t.to2),
                "branch transition state out of range");
    for (const Merge& t : merge)
        require(in_range(t.from1) && in_range(t.from2) && in_range(t.to),
                "merge transition state out of range");
}

bool OperationAutomaton::is_initial(int q) const {
    return std::find(initial.begin(), initial.end(), q) != initial.end();
}
bool OperationAutomaton::is_final(int q) const {
    return std::find(final_.begin(), final_.end(), q) != final_.end();
}

std::vector<EdgeLabel> OperationAutomaton::lin_label_pool() const {
    std::map<std::string, EdgeLabel> pool;
    for (const Lin& t : lin) pool.emplace(edge_label_key(t.label), t.label);
    std::vector<EdgeLabel> out;
    for (auto& [k, l] : pool) out.push_back(l);
    return out;
}

// ---------------------------------------------------------------------------
// Acceptance by consistent labelling.

namespace {

struct Patterns {
    std::vector<std::tuple<int, std::string, int>> lin;  // (x, label key, y)
    std::vector<std::tuple<int, int, int>> branch;       // (x, y1, y2)
    std::vector<std::tuple<int, int, int>> merge;        // (x1, x2, z)
};

Patterns classify(const OpDag& d) {
    Patterns p;
    std::vector<int> dir2_out(d.nv, -1), dir1_out(d.nv, -1);
    std::vector<int> codir2_in(d.nv, -1), codir1_in(d.nv, -1);
    for (const auto& e : d.edges) {
        if (const auto* dl = std::get_if<DirLabel>(&e.label))
            (dl->d == 1 ? dir1_out : dir2_out)[e.from] = e.to;
        if (const auto* cl = std::get_if<CodirLabel>(&e.label))
            (cl->d == 1 ? codir1_in : codir2_in)[e.to] = e.from;
    }
    for (int v = 0; v < d.nv; ++v) {
        if (dir2_out[v] >= 0) {
            require(dir1_out[v] >= 0, "dangling dir(2) edge");
            p.branch.push_back({v, dir1_out[v], dir2_out[v]});
        }
        if (codir2_in[v] >= 0) {
            require(codir1_in[v] >= 0, "dangling codir(2) edge");
            p.merge.push_back({codir1_in[v], codir2_in[v], v});
        }
    }
    for (const auto& e : d.edges) {
        if (const auto* op = std::get_if<StackOp>(&e.label)) {
            p.lin.push_back({e.from, "o:" + op_key(*op), e.to});
        } else if (const auto* dl = std::get_if<DirLabel>(&e.label)) {
            if (dl->d == 1 && dir2_out[e.from] < 0) p.lin.push_back({e.from, "d:1", e.to});
        } else {
            const auto& cl = std::get<CodirLabel>(e.label);
            if (cl.d == 1 && codir2_in[e.to] < 0) p.lin.push_back({e.from, "c:1", e.to});
        }
    }
    return p;
}

}  // namespace

std::optional<Labelling> accepts(const OperationAutomaton& a, const OpDag& d) {
    a.validate();
    Patterns pats = classify(d);

    std::set<std::tuple<int, std::string, int>> lin_set;
    for (const auto& t : a.lin) lin_set.insert({t.from, edge_label_key(t.label), t.to});
    std::set<std::tuple<int, int, int>> branch_set;
    for (const auto& t : a.branch) branch_set.insert({t.from, t.to1, t.to2});
    std::set<std::tuple<int, int, int>> merge_set;
    for (const auto& t : a.merge) merge_set.insert({t.from1, t.from2, t.to});

    std::vector<char> is_in(d.nv, 0), is_out(d.nv, 0);
    for (int v : d.inputs()) is_in[v] = 1;
    for (int v : d.outputs()) is_out[v] = 1;

    std::vector<std::vector<int>> cand(d.nv);
    for (int v = 0; v < d.nv; ++v)
        for (int q = 0; q < a.nstates; ++q) {
            if (is_in[v] && !a.is_initial(q)) continue;
            if (is_out[v] && !a.is_final(q)) continue;
            cand[v].push_back(q);
        }

    // Constraints indexed by the highest vertex they mention; each is checked
    // once all of its vertices are assigned.
    struct Con {
        int kind;  // 0 lin, 1 branch, 2 merge
        int idx;
    };
    std::vector<std::vector<Con>> at(d.nv);
    for (size_t i = 0; i < pats.lin.size(); ++i) {
        auto [x, k, y] = pats.lin[i];
        (void)k;
        at[std::max(x, y)].push_back({0, static_cast<int>(i)});
    }
    for (size_t i = 0; i < pats.branch.size(); ++i) {
        auto [x, y1, y2] = pats.branch[i];
        at[std::max({x, y1, y2})].push_back({1, static_cast<int>(i)});
    }
    for (size_t i = 0; i < pats.merge.size(); ++i) {
        auto [x1, x2, z] = pats.merge[i];
        at[std::max({x1, x2, z})].push_back({2, static_cast<int>(i)});
    }

    Labelling lbl(d.nv, -1);
    auto ok_at = [&](int v) {
        for (const Con& c : at[v]) {
            if (c.kind == 0) {
                auto [x, k, y] = pats.lin[c.idx];
                if (!lin_set.count({lbl[x], k, lbl[y]})) return false;
            } else if (c.kind == 1) {
                auto [x, y1, y2] = pats.branch[c.idx];
                if (!branch_set.count({lbl[x], lbl[y1], lbl[y2]})) return false;
            } else {
                auto [x1, x2, z] = pats.merge[c.idx];
                if (!merge_set.count({lbl[x1], lbl[x2], lbl[z]})) return false;
            }
        }
        return true;
    };
    auto rec = [&](auto&& self, int v) -> bool {
        if (v == d.nv) return true;
        for (int q : cand[v]) {
            lbl[v] = q;
            if (ok_at(v) && self(self, v + 1)) return true;
        }
        lbl[v] = -1;
        return false;
    };
    if (!rec(rec, 0)) return std::nullopt;
    return lbl;
}

// ---------------------------------------------------------------------------
// Enumeration of accepted DAGs, guided by the transitions: items carry the
// states assigned to input and output vertices so pieces only combine along
// existing transitions.

namespace {

struct GenItem {
    OpDag dag;
    std::vector<int> ins;
    std::vector<int> outs;
};

std::string item_key(const GenItem& it) {
    std::string k = dag_key(it.dag) + "|i";
    for (int q : it.ins) k += ":" + std::to_string(q);
    k += "|o";
    for (int q : it.outs) k += ":" + std::to_string(q);
    return k;
}

std::vector<int> concat_vec(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

std::vector<OpDag> enumerate_accepted(const OperationAutomaton& a, int max_vertices) {
    a.validate();
    require(max_vertices >= 1, "enumerate_accepted: bound must be >= 1");
    std::vector<std::map<std::string, GenItem>> gen(static_cast<size_t>(max_vertices) + 1);
    for (int q = 0; q < a.nstates; ++q) {
        GenItem it{emptydag(), {q}, {q}};
        gen[1].emplace(item_key(it), std::move(it));
    }

    for (int s = 2; s <= max_vertices; ++s) {
        for (int s1 = 1; s1 < s; ++s1) {
            int s2 = s - s1;
            for (const auto& [ka, ia] : gen[s1]) {
                if (ia.outs.size() != 1) continue;
                for (const auto& [kb, ib] : gen[s2]) {
                    if (ib.ins.size() != 1) continue;
                    for (const auto& t : a.lin) {
                        if (t.from != ia.outs[0] || t.to != ib.ins[0]) continue;
                        GenItem it{compose_case2(ia.dag, t.label, ib.dag), ia.ins, ib.outs};
                        gen[s].emplace(item_key(it), std::move(it));
                    }
                }
            }
        }
        if (!a.branch.empty())
            for (int s1 = 1; s1 + 2 <= s; ++s1)
                for (int s2 = 1; s1 + s2 + 1 <= s; ++s2) {
                    int s3 = s - s1 - s2;
                    for (const auto& [ka, ia] : gen[s1]) {
                        if (ia.outs.size() != 1) continue;
                        for (const auto& [kb, ib] : gen[s2]) {
                            if (ib.ins.size() != 1) continue;
                            for (const auto& [kc, ic] : gen[s3]) {
                                if (ic.ins.size() != 1) continue;
                                for (const auto& t : a.branch) {
                                    if (t.from != ia.outs[0] || t.to1 != ib.ins[0] ||
                                        t.to2 != ic.ins[0])
                                        continue;
                                    GenItem it{compose_case3(ia.dag, ib.dag, ic.dag), ia.ins,
                                               concat_vec(ib.outs, ic.outs)};
                                    gen[s].emplace(item_key(it), std::move(it));
                                }
                            }
                        }
                    }
                }
        if (!a.merge.empty())
            for (int s1 = 1; s1 + 2 <= s; ++s1)
                for (int s2 = 1; s1 + s2 + 1 <= s; ++s2) {
                    int s3 = s - s1 - s2;
                    for (const auto& [ka, ia] : gen[s1]) {
                        if (ia.outs.size() != 1) continue;
                        for (const auto& [kb, ib] : gen[s2]) {
                            if (ib.outs.size() != 1) continue;
                            for (const auto& [kc, ic] : gen[s3]) {
                                if (ic.ins.size() != 1) continue;
                                for (const auto& t : a.merge) {
                                    if (t.from1 != ia.outs[0] || t.from2 != ib.outs[0] ||
                                        t.to != ic.ins[0])
                                        continue;
                                    GenItem it{compose_case4(ia.dag, ib.dag, ic.dag),
                                               concat_vec(ia.ins, ib.ins), ic.outs};
                                    gen[s].emplace(item_key(it), std::move(it));
                                }
                            }
                        }
                    }
                }
        if (!a.branch.empty() && !a.merge.empty())
            for (int s1 = 1; s1 + 3 <= s; ++s1)
                for (int s2 = 1; s1 + s2 + 2 <= s; ++s2)
                    for (int s3 = 1; s1 + s2 + s3 + 1 <= s; ++s3) {
                        int s4 = s - s1 - s2 - s3;
                        for (const auto& [ka, ia] : gen[s1]) {
                            if (ia.outs.size() != 1) continue;
                            for (const auto& [kb, ib] : gen[s2]) {
                                if (ib.ins.size() != 1 || ib.outs.size() != 1) continue;
                                for (const auto& [kc, ic] : gen[s3]) {
                                    if (ic.ins.size() != 1 || ic.outs.size() != 1) continue;
                                    for (const auto& [kd, id] : gen[s4]) {
                                        if (id.ins.size() != 1) continue;
                                        for (const auto& tb : a.branch) {
                                            if (tb.from != ia.outs[0] || tb.to1 != ib.ins[0] ||
                                                tb.to2 != ic.ins[0])
                                                continue;
                                            for (const auto& tm : a.merge) {
                                                if (tm.from1 != ib.outs[0] ||
                                                    tm.from2 != ic.outs[0] || tm.to != id.ins[0])
                                                    continue;
                                                GenItem it{
                                                    compose_case5(ia.dag, ib.dag, ic.dag, id.dag),
                                                    ia.ins, id.outs};
                                                gen[s].emplace(item_key(it), std::move(it));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
    }

    std::map<std::string, OpDag> out;
    for (int s = 1; s <= max_vertices; ++s)
        for (const auto& [k, it] : gen[s]) {
            bool ok = true;
            for (int q : it.ins)
                if (!a.is_initial(q)) ok = false;
            for (int q : it.outs)
                if (!a.is_final(q)) ok = false;
            if (ok) out.emplace(dag_key(it.dag), it.dag);
        }
    std::vector<OpDag> res;
    for (auto& [k, d] : out) res.push_back(std::move(d));
    std::sort(res.begin(), res.end(), [](const OpDag& x, const OpDag& y) {
        if (x.nv != y.nv) return x.nv < y.nv;
        return dag_key(x) < dag_key(y);
    });
    return res;
}

// ---------------------------------------------------------------------------
// Closure constructions.

OperationAutomaton union_auto(const OperationAutomaton& a1, const OperationAutomaton& a2) {
    require(a1.order == a2.order, "union: order mismatch");
    require(a1.alphabet == a2.alphabet, "union: alphabet mismatch");
    OperationAutomaton out;
    out.order = a1.order;
    out.alphabet = a1.alphabet;
    out.nstates = a1.nstates + a2.nstates;
    int off = a1.nstates;
    out.initial = a1.initial;
    for (int q : a2.initial) out.initial.push_back(q + off);
    out.final_ = a1.final_;
    for (int q : a2.final_) out.final_.push_back(q + off);
    out.lin = a1.lin;
    for (const auto& t : a2.lin) out.lin.push_back({t.from + off, t.label, t.to + off});
    out.branch = a1.branch;
    for (const auto& t : a2.branch) out.branch.push_back({t.from + off, t.to1 + off, t.to2 + off});
    out.merge = a1.merge;
    for (const auto& t : a2.merge)
        out.merge.push_back({t.from1 + off, t.from2 + off, t.to + off});
    return out;
}

namespace {

// Adds a sink state when any transition over the shared label pool is missing.
OperationAutomaton complete_over(const OperationAutomaton& a,
                                 const std::vector<EdgeLabel>& labels, bool has_branch,
                                 bool has_merge) {
    std::set<std::pair<int, std::string>> lin_have;
    for (const auto& t : a.lin) lin_have.insert({t.from, edge_label_key(t.label)});
    std::set<int> branch_have;
    for (const auto& t : a.branch) branch_have.insert(t.from);
    std::set<std::pair<int, int>> merge_have;
    for (const auto& t : a.merge) merge_have.insert({t.from1, t.from2});

    bool missing = false;
    for (int q = 0; q < a.nstates && !missing; ++q) {
        for (const auto& l : labels)
            if (!lin_have.count({q, edge_label_key(l)})) missing = true;
        if (has_branch && !branch_have.count(q)) missing = true;
        if (has_merge)
            for (int q2 = 0; q2 < a.nstates; ++q2)
                if (!merge_have.count({q, q2})) missing = true;
    }
    if (!missing) return a;

    OperationAutomaton out = a;
    int sink = out.nstates++;
    for (int q = 0; q < out.nstates; ++q) {
        for (const auto& l : labels)
            if (q == sink || !lin_have.count({q, edge_label_key(l)})) out.lin.push_back({q, l, sink});
        if (has_branch && (q == sink || !branch_have.count(q)))
            out.branch.push_back({q, sink, sink});
        if (has_merge)
            for (int q2 = 0; q2 < out.nstates; ++q2)
                if (q == sink || q2 == sink || !merge_have.count({q, q2}))
                    out.merge.push_back({q, q2, sink});
    }
    return out;
}

}  // namespace

OperationAutomaton intersect_auto(const OperationAutomaton& a1, const OperationAutomaton& a2) {
    require(a1.order == a2.order, "intersect: order mismatch");
    require(a1.alphabet == a2.alphabet, "intersect: alphabet mismatch");
    std::map<std::string, EdgeLabel> pool;
    for (const auto& l : a1.lin_label_pool()) pool.emplace(edge_label_key(l), l);
    for (const auto& l : a2.lin_label_pool()) pool.emplace(edge_label_key(l), l);
    std::vector<EdgeLabel> labels;
    for (auto& [k, l] : pool) labels.push_back(l);
    bool has_branch = !a1.branch.empty() || !a2.branch.empty();
    bool has_merge = !a1.merge.empty() || !a2.merge.empty();
    OperationAutomaton c1 = complete_over(a1, labels, has_branch, has_merge);
    OperationAutomaton c2 = complete_over(a2, labels, has_branch, has_merge);

    OperationAutomaton out;
    out.order = a1.order;
    out.alphabet = a1.alphabet;
    out.nstates = c1.nstates * c2.nstates;
    auto pair_id = [&](int q1, int q2) { return q1 * c2.nstates + q2; };
    for (int q1 : c1.initial)
        for (int q2 : c2.initial) out.initial.push_back(pair_id(q1, q2));
    for (int q1 : c1.final_)
        for (int q2 : c2.final_) out.final_.push_back(pair_id(q1, q2));
    for (const auto& t1 : c1.lin)
        for (const auto& t2 : c2.lin)
            if (edge_label_equal(t1.label, t2.label))
                out.lin.push_back({pair_id(t1.from, t2.from), t1.label, pair_id(t1.to, t2.to)});
    for (const auto& t1 : c1.branch)
        for (const auto& t2 : c2.branch)
            out.branch.push_back(
                {pair_id(t1.from, t2.from), pair_id(t1.to1, t2.to1), pair_id(t1.to2, t2.to2)});
    for (const auto& t1 : c1.merge)
        for (const auto& t2 : c2.merge)
            out.merge.push_back({pair_id(t1.from1, t2.from1), pair_id(t1.from2, t2.from2),
                                 pair_id(t1.to, t2.to)});
    return out;
}

OperationAutomaton star_auto(const OperationAutomaton& a) {
    OperationAutomaton out = a;
    int q = out.nstates++;
    out.initial.push_back(q);
    out.final_.push_back(q);
    // Every transition ending in a final state is duplicated to end in each
    // initial state instead; the fresh state joins I and F.
    for (const auto& t : a.lin)
        if (a.is_final(t.to))
            for (int qi : a.initial) out.lin.push_back({t.from, t.label, qi});
    for (const auto& t : a.merge)
        if (a.is_final(t.to))
            for (int qi : a.initial) out.merge.push_back({t.from1, t.from2, qi});
    for (const auto& t : a.branch) {
        if (a.is_final(t.to2))
            for (int qi : a.initial) out.branch.push_back({t.from, t.to1, qi});
        if (a.is_final(t.to1))
            for (int qi : a.initial) out.branch.push_back({t.from, qi, t.to2});
        if (a.is_final(t.to1) && a.is_final(t.to2))
            for (int qi : a.initial)
                for (int qj : a.initial) out.branch.push_back({t.from, qi, qj});
    }
    return out;
}

OperationAutomaton singleton_auto(const OpDag& d, int order, const std::string& alphabet) {
    require(is_compound(d), "singleton: dag is not a compound operation");
    Patterns pats = classify(d);
    OperationAutomaton a;
    a.order = order;
    a.alphabet = alphabet;
    a.nstates = d.nv;
    a.initial = d.inputs();
    a.final_ = d.outputs();
    std::map<std::string, EdgeLabel> by_key;
    for (const auto& e : d.edges) by_key.emplace(edge_label_key(e.label), e.label);
    for (const auto& [x, key, y] : pats.lin) a.lin.push_back({x, by_key.at(key), y});
    for (const auto& [x, y1, y2] : pats.branch) a.branch.push_back({x, y1, y2});
    for (const auto& [x1, x2, z] : pats.merge) a.merge.push_back({x1, x2, z});
    return a;
}

// ---------------------------------------------------------------------------
// Relation on stack trees via parallel application of accepted tuples.

namespace {

struct TupleSearch {
    const std::vector<OpDag>* cands;
    std::vector<DecompPtr> decomps;
    std::vector<int> indegs;

    explicit TupleSearch(const std::vector<OpDag>& c) : cands(&c) {
        for (const OpDag& d : c) {
            decomps.push_back(find_decomposition(d));
            require(decomps.back() != nullptr, "relates: candidate is not compound");
            indegs.push_back(d.in_degree());
        }
    }

    std::optional<StackTree> apply(const std::vector<int>& picks, const std::vector<int>& idx,
                                   const StackTree& s) const {
        std::optional<StackTree> cur = s;
        for (size_t j = picks.size(); j-- > 0;) {
            if (idx[j] < 1 || idx[j] > leaf_count(*cur)) return std::nullopt;
            cur = apply_with(*decomps[picks[j]], idx[j], *cur);
            if (!cur) return std::nullopt;
        }
        return cur;
    }
};

}  // namespace

RelatesResult relates(const OperationAutomaton& a, const StackTree& s, const StackTree& t,
                      const RelatesBudget& budget, const std::vector<OpDag>& candidates) {
    (void)a;
    TupleSearch ts(candidates);
    int nleaves = leaf_count(s);
    RelatesResult res;

    std::vector<std::vector<int>> tuples;
    std::vector<int> cur;
    auto gen_tuples = [&](auto&& self, int total) -> void {
        if (!cur.empty()) tuples.push_back(cur);
        if (static_cast<int>(cur.size()) >= budget.max_tuple) return;
        for (size_t c = 0; c < candidates.size(); ++c) {
            int nv = candidates[c].nv;
            if (total + nv > budget.max_total_vertices) continue;
            cur.push_back(static_cast<int>(c));
            self(self, total + nv);
            cur.pop_back();
        }
    };
    gen_tuples(gen_tuples, 0);
    // Increasing total DAG size, then lexicographic; index vectors explored
    // leftmost-first, so the first witness is deterministic.
    std::stable_sort(tuples.begin(), tuples.end(),
                     [&](const std::vector<int>& x, const std::vector<int>& y) {
                         int tx = 0, ty = 0;
                         for (int c : x) tx += candidates[c].nv;
                         for (int c : y) ty += candidates[c].nv;
                         if (tx != ty) return tx < ty;
                         return x < y;
                     });

    for (const auto& picks : tuples) {
        std::vector<int> idx(picks.size());
        auto run = [&](auto&& self, size_t j, int lo) -> bool {
            if (j == picks.size()) {
                auto r = ts.apply(picks, idx, s);
                return r && *r == t;
            }
            for (int i = lo; i <= nleaves; ++i) {
                idx[j] = i;
                if (self(self, j + 1, i + ts.indegs[picks[j]])) return true;
            }
            return false;
        };
        if (run(run, 0, 1)) {
            RelatesWitness w;
            for (int c : picks) w.dags.push_back(candidates[c]);
            w.indices = idx;
            auto replay = apply_parallel(w.dags, w.indices, s);
            require(replay.has_value() && *replay == t, "relates: witness replay failed");
            res.status = RelatesStatus::Found;
            res.witness = std::move(w);
            return res;
        }
    }
    return res;
}

RelatesResult relates(const OperationAutomaton& a, const StackTree& s, const StackTree& t,
                      const RelatesBudget& budget) {
    return relates(a, s, t, budget, enumerate_accepted(a, budget.max_dag_vertices));
}

std::set<StackTree> relation_image(const OperationAutomaton& a, const StackTree& s,
                                   const RelatesBudget& budget,
                                   const std::vector<OpDag>& candidates) {
    (void)a;
    TupleSearch ts(candidates);
    int nleaves = leaf_count(s);
    std::set<StackTree> out;
    std::vector<int> picks;
    std::vector<int> idx;
    auto go_idx = [&](auto&& self, size_t j, int lo) -> void {
        if (j == picks.size()) {
            auto r = ts.apply(picks, idx, s);
            if (r) out.insert(std::move(*r));
            return;
        }
        for (int i = lo; i <= nleaves; ++i) {
            idx.push_back(i);
            self(self, j + 1, i + ts.indegs[picks[j]]);
            idx.pop_back();
        }
    };
    auto go_tuple = [&](auto&& self, int total) -> void {
        if (!picks.empty()) {
            idx.clear();
            go_idx(go_idx, 0, 1);
        }
        if (static_cast<int>(picks.size()) >= budget.max_tuple) return;
        for (size_t c = 0; c < candidates.size(); ++c) {
            if (total + candidates[c].nv > budget.max_total_vertices) continue;
            picks.push_back(static_cast<int>(c));
            self(self, total + candidates[c].nv);
            picks.pop_back();
        }
    };
    go_tuple(go_tuple, 0);
    return out;
}

std::set<StackTree> relation_image(const OperationAutomaton& a, const StackTree& s,
                                   const RelatesBudget& budget) {
    return relation_image(a, s, budget, enumerate_accepted(a, budget.max_dag_vertices));
}

}  // namespace hostree
