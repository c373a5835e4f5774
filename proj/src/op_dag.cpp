#include "hostree/op_dag.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

namespace hostree {

std::string edge_label_key(const EdgeLabel& l) {
    if (const auto* op = std::get_if<StackOp>(&l)) return "o:" + op_key(*op);
    if (const auto* d = std::get_if<DirLabel>(&l)) return "d:" + std::to_string(d->d);
    return "c:" + std::to_string(std::get<CodirLabel>(l).d);
}

std::string edge_label_text(const EdgeLabel& l) {
    if (const auto* op = std::get_if<StackOp>(&l)) return op_text(*op);
    if (const auto* d = std::get_if<DirLabel>(&l)) return "dir(" + std::to_string(d->d) + ")";
    return "codir(" + std::to_string(std::get<CodirLabel>(l).d) + ")";
}

bool edge_label_equal(const EdgeLabel& a, const EdgeLabel& b) {
    return edge_label_key(a) == edge_label_key(b);
}

std::vector<int> OpDag::inputs() const {
    std::vector<char> has_in(nv, 0);
    for (const Edge& e : edges) has_in[e.to] = 1;
    std::vector<int> out;
    for (int v = 0; v < nv; ++v)
        if (!has_in[v]) out.push_back(v);
    return out;
}

std::vector<int> OpDag::outputs() const {
    std::vector<char> has_out(nv, 0);
    for (const Edge& e : edges) has_out[e.from] = 1;
    std::vector<int> out;
    for (int v = 0; v < nv; ++v)
        if (!has_out[v]) out.push_back(v);
    return out;
}

bool OpDag::acyclic() const {
    std::vector<int> indeg(nv, 0);
    for (const Edge& e : edges) ++indeg[e.to];
    std::queue<int> q;
    for (int v = 0; v < nv; ++v)
        if (!indeg[v]) q.push(v);
    int seen = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        ++seen;
        for (const Edge& e : edges)
            if (e.from == v && --indeg[e.to] == 0) q.push(e.to);
    }
    return seen == nv;
}

bool OpDag::connected() const {
    std::vector<char> seen(nv, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int cnt = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const Edge& e : edges) {
            int o = -1;
            if (e.from == v) o = e.to;
            if (e.to == v) o = e.from;
            if (o >= 0 && !seen[o]) {
                seen[o] = 1;
                ++cnt;
                q.push(o);
            }
        }
    }
    return cnt == nv;
}

void OpDag::validate() const {
    require(nv >= 1, "dag needs at least one vertex");
    for (const Edge& e : edges) {
        require(e.from >= 0 && e.from < nv && e.to >= 0 && e.to < nv, "edge endpoint out of range");
        require(e.from != e.to, "self-loop in dag");
        if (const auto* d = std::get_if<DirLabel>(&e.label))
            require(d->d == 1 || d->d == 2, "bad direction label");
        if (const auto* c = std::get_if<CodirLabel>(&e.label))
            require(c->d == 1 || c->d == 2, "bad codirection label");
    }
    require(acyclic(), "dag has a cycle");
}

std::string dag_key(const OpDag& d) {
    std::vector<std::string> es;
    for (const auto& e : d.edges)
        es.push_back(std::to_string(e.from) + ">" + std::to_string(e.to) + ":" +
                     edge_label_key(e.label));
    std::sort(es.begin(), es.end());
    std::string out = "v" + std::to_string(d.nv);
    for (const auto& s : es) out += ";" + s;
    return out;
}

bool dag_equal(const OpDag& a, const OpDag& b) { return dag_key(a) == dag_key(b); }

bool dag_isomorphic(const OpDag& a, const OpDag& b) {
    if (a.nv != b.nv || a.edges.size() != b.edges.size()) return false;
    auto edge_map = [](const OpDag& d) {
        std::map<std::pair<int, int>, std::vector<std::string>> m;
        for (const auto& e : d.edges) m[{e.from, e.to}].push_back(edge_label_key(e.label));
        for (auto& [k, v] : m) std::sort(v.begin(), v.end());
        return m;
    };
    auto ma = edge_map(a), mb = edge_map(b);
    std::vector<int> perm(a.nv, -1), used(a.nv, 0);
    auto consistent = [&](int va, int vb) {
        for (int ua = 0; ua < a.nv; ++ua) {
            if (perm[ua] < 0) continue;
            int ub = perm[ua];
            auto eq = [&](std::pair<int, int> ka, std::pair<int, int> kb) {
                auto ia = ma.find(ka);
                auto ib = mb.find(kb);
                bool ha = ia != ma.end(), hb = ib != mb.end();
                if (ha != hb) return false;
                return !ha || ia->second == ib->second;
            };
            if (!eq({va, ua}, {vb, ub}) || !eq({ua, va}, {ub, vb})) return false;
        }
        return true;
    };
    auto rec = [&](auto&& self, int va) -> bool {
        if (va == a.nv) return true;
        for (int vb = 0; vb < a.nv; ++vb) {
            if (used[vb] || !consistent(va, vb)) continue;
            perm[va] = vb;
            used[vb] = 1;
            if (self(self, va + 1)) return true;
            perm[va] = -1;
            used[vb] = 0;
        }
        return false;
    };
    return rec(rec, 0);
}

OpDag emptydag() { return OpDag{}; }

OpDag basic_dag(const StackOp& op) {
    OpDag d;
    d.nv = 2;
    d.edges.push_back({0, op, 1});
    return d;
}

OpDag basic_copy(int k) {
    require(k == 1 || k == 2, "copy arity must be 1 or 2");
    OpDag d;
    if (k == 1) {
        d.nv = 2;
        d.edges.push_back({0, DirLabel{1}, 1});
    } else {
        d.nv = 3;
        d.edges.push_back({0, DirLabel{1}, 1});
        d.edges.push_back({0, DirLabel{2}, 2});
    }
    return d;
}

OpDag basic_barcopy(int k) {
    require(k == 1 || k == 2, "barcopy arity must be 1 or 2");
    OpDag d;
    if (k == 1) {
        d.nv = 2;
        d.edges.push_back({0, CodirLabel{1}, 1});
    } else {
        d.nv = 3;
        d.edges.push_back({0, CodirLabel{1}, 2});
        d.edges.push_back({1, CodirLabel{2}, 2});
    }
    return d;
}

OpDag concat(const OpDag& d, int i, const OpDag& dp, int j) {
    std::vector<int> outs = d.outputs();
    std::vector<int> ins = dp.inputs();
    require(i >= 1 && i <= static_cast<int>(outs.size()), "concat: output index out of range");
    require(j >= 1 && j <= static_cast<int>(ins.size()), "concat: input index out of range");
    int merged = std::min(static_cast<int>(outs.size()) - i, static_cast<int>(ins.size()) - j) + 1;
    std::vector<int> remap(dp.nv, -1);
    for (int m = 0; m < merged; ++m) remap[ins[j - 1 + m]] = outs[i - 1 + m];
    int next = d.nv;
    for (int v = 0; v < dp.nv; ++v)
        if (remap[v] < 0) remap[v] = next++;
    OpDag out;
    out.nv = next;
    out.edges = d.edges;
    for (const auto& e : dp.edges) out.edges.push_back({remap[e.from], e.label, remap[e.to]});
    return out;
}

// ---------------------------------------------------------------------------
// Decomposition search. Sub-operations of a compound decomposition are
// connected, so each case splits the vertex set into the connected components
// left after removing the case's basic-operation edges.

namespace {

struct CaseChoice {
    int kind = 1;
    EdgeLabel theta = DirLabel{1};
    uint64_t m1 = 0, m2 = 0, m3 = 0, m4 = 0;
};

struct SearchCtx {
    const OpDag* dag = nullptr;
    std::map<uint64_t, char> verdict;  // 1 yes, 2 no
    std::map<uint64_t, CaseChoice> first;
};

bool in_mask(uint64_t m, int v) { return (m >> v) & 1; }

std::vector<int> mask_vertices(uint64_t m, int nv) {
    std::vector<int> out;
    for (int v = 0; v < nv; ++v)
        if (in_mask(m, v)) out.push_back(v);
    return out;
}

std::vector<int> induced_edges(const OpDag& d, uint64_t m) {
    std::vector<int> out;
    for (size_t i = 0; i < d.edges.size(); ++i)
        if (in_mask(m, d.edges[i].from) && in_mask(m, d.edges[i].to)) out.push_back(static_cast<int>(i));
    return out;
}

// Connected components of the induced subgraph after dropping `removed`
// (sorted edge-index list); returns per-vertex root or -1 outside the mask.
std::vector<int> components(const OpDag& d, uint64_t m, const std::vector<int>& eidx,
                            const std::vector<int>& removed) {
    std::vector<int> parent(d.nv);
    for (int v = 0; v < d.nv; ++v) parent[v] = v;
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (int i : eidx) {
        if (std::binary_search(removed.begin(), removed.end(), i)) continue;
        int a = find(d.edges[i].from), b = find(d.edges[i].to);
        if (a != b) parent[a] = b;
    }
    std::vector<int> root(d.nv, -1);
    for (int v = 0; v < d.nv; ++v)
        if (in_mask(m, v)) root[v] = find(v);
    return root;
}

uint64_t comp_mask(const std::vector<int>& root, int nv, int of) {
    uint64_t m = 0;
    int r = root[of];
    for (int v = 0; v < nv; ++v)
        if (root[v] == r) m |= uint64_t(1) << v;
    return m;
}

// Unique sink (out-degree 0) of the induced subgraph, or -1.
int unique_sink(const OpDag& d, uint64_t m, const std::vector<int>& eidx) {
    uint64_t has_out = 0;
    for (int i : eidx) has_out |= uint64_t(1) << d.edges[i].from;
    int found = -1;
    for (int v = 0; v < d.nv; ++v) {
        if (!in_mask(m, v) || in_mask(has_out, v)) continue;
        if (found >= 0) return -1;
        found = v;
    }
    return found;
}

int unique_source(const OpDag& d, uint64_t m, const std::vector<int>& eidx) {
    uint64_t has_in = 0;
    for (int i : eidx) has_in |= uint64_t(1) << d.edges[i].to;
    int found = -1;
    for (int v = 0; v < d.nv; ++v) {
        if (!in_mask(m, v) || in_mask(has_in, v)) continue;
        if (found >= 0) return -1;
        found = v;
    }
    return found;
}

bool is_case2_connector(const EdgeLabel& l) {
    if (std::get_if<StackOp>(&l)) return true;
    if (const auto* d = std::get_if<DirLabel>(&l)) return d->d == 1;
    return std::get<CodirLabel>(l).d == 1;
}

bool search(SearchCtx& ctx, uint64_t mask);

// Structure-valid case choices at this mask; sub-masks unvalidated.
std::vector<CaseChoice> candidates(SearchCtx& ctx, uint64_t mask) {
    const OpDag& d = *ctx.dag;
    std::vector<CaseChoice> out;
    std::vector<int> eidx = induced_edges(d, mask);
    int count = static_cast<int>(mask_vertices(mask, d.nv).size());
    if (count == 1 && eidx.empty()) {
        CaseChoice c;
        c.kind = 1;
        out.push_back(c);
        return out;
    }

    auto sub_eidx = [&](uint64_t m) { return induced_edges(d, m); };
    auto covered = [&](const std::vector<int>& root, std::vector<uint64_t> parts) {
        uint64_t u = 0;
        for (uint64_t p : parts) u |= p;
        (void)root;
        return u == mask;
    };

    // case 2
    for (int i : eidx) {
        const auto& e = d.edges[i];
        if (!is_case2_connector(e.label)) continue;
        std::vector<int> removed = {i};
        auto root = components(d, mask, eidx, removed);
        if (root[e.from] == root[e.to]) continue;
        uint64_t v1 = comp_mask(root, d.nv, e.from);
        uint64_t v2 = comp_mask(root, d.nv, e.to);
        if (!covered(root, {v1, v2})) continue;
        if (unique_sink(d, v1, sub_eidx(v1)) != e.from) continue;
        if (unique_source(d, v2, sub_eidx(v2)) != e.to) continue;
        CaseChoice c;
        c.kind = 2;
        c.theta = e.label;
        c.m1 = v1;
        c.m2 = v2;
        out.push_back(c);
    }

    // branch / merge edge pairs
    std::vector<std::pair<int, int>> branches;  // (dir1 edge, dir2 edge), same source
    std::vector<std::pair<int, int>> merges;    // (codir1 edge, codir2 edge), same target
    for (int i : eidx)
        for (int j : eidx) {
            const auto& a = d.edges[i];
            const auto& b = d.edges[j];
            const auto* da = std::get_if<DirLabel>(&a.label);
            const auto* db = std::get_if<DirLabel>(&b.label);
            if (da && db && da->d == 1 && db->d == 2 && a.from == b.from)
                branches.push_back({i, j});
            const auto* ca = std::get_if<CodirLabel>(&a.label);
            const auto* cb = std::get_if<CodirLabel>(&b.label);
            if (ca && cb && ca->d == 1 && cb->d == 2 && a.to == b.to) merges.push_back({i, j});
        }

    // case 3
    for (auto [i1, i2] : branches) {
        const auto& e1 = d.edges[i1];
        const auto& e2 = d.edges[i2];
        std::vector<int> removed = {i1, i2};
        std::sort(removed.begin(), removed.end());
        auto root = components(d, mask, eidx, removed);
        uint64_t v1 = comp_mask(root, d.nv, e1.from);
        uint64_t v2 = comp_mask(root, d.nv, e1.to);
        uint64_t v3 = comp_mask(root, d.nv, e2.to);
        if (v1 == v2 || v1 == v3 || v2 == v3) continue;
        if (!covered(root, {v1, v2, v3})) continue;
        if (unique_sink(d, v1, sub_eidx(v1)) != e1.from) continue;
        if (unique_source(d, v2, sub_eidx(v2)) != e1.to) continue;
        if (unique_source(d, v3, sub_eidx(v3)) != e2.to) continue;
        CaseChoice c;
        c.kind = 3;
        c.m1 = v1;
        c.m2 = v2;
        c.m3 = v3;
        out.push_back(c);
    }

    // case 4
    for (auto [i1, i2] : merges) {
        const auto& e1 = d.edges[i1];
        const auto& e2 = d.edges[i2];
        std::vector<int> removed = {i1, i2};
        std::sort(removed.begin(), removed.end());
        auto root = components(d, mask, eidx, removed);
        uint64_t v1 = comp_mask(root, d.nv, e1.from);
        uint64_t v2 = comp_mask(root, d.nv, e2.from);
        uint64_t v3 = comp_mask(root, d.nv, e1.to);
        if (v1 == v2 || v1 == v3 || v2 == v3) continue;
        if (!covered(root, {v1, v2, v3})) continue;
        if (unique_sink(d, v1, sub_eidx(v1)) != e1.from) continue;
        if (unique_sink(d, v2, sub_eidx(v2)) != e2.from) continue;
        if (unique_source(d, v3, sub_eidx(v3)) != e1.to) continue;
        CaseChoice c;
        c.kind = 4;
        c.m1 = v1;
        c.m2 = v2;
        c.m3 = v3;
        out.push_back(c);
    }

    // case 5
    for (auto [i1, i2] : branches)
        for (auto [i3, i4] : merges) {
            if (i1 == i3 || i1 == i4 || i2 == i3 || i2 == i4) continue;
            const auto& e1 = d.edges[i1];
            const auto& e2 = d.edges[i2];
            const auto& e3 = d.edges[i3];
            const auto& e4 = d.edges[i4];
            std::vector<int> removed = {i1, i2, i3, i4};
            std::sort(removed.begin(), removed.end());
            auto root = components(d, mask, eidx, removed);
            uint64_t v1 = comp_mask(root, d.nv, e1.from);
            uint64_t v2 = comp_mask(root, d.nv, e1.to);
            uint64_t v3 = comp_mask(root, d.nv, e2.to);
            uint64_t v4 = comp_mask(root, d.nv, e3.to);
            if (v1 == v2 || v1 == v3 || v1 == v4 || v2 == v3 || v2 == v4 || v3 == v4) continue;
            if (!covered(root, {v1, v2, v3, v4})) continue;
            if (!in_mask(v2, e3.from) || !in_mask(v3, e4.from)) continue;
            if (unique_sink(d, v1, sub_eidx(v1)) != e1.from) continue;
            if (unique_source(d, v2, sub_eidx(v2)) != e1.to) continue;
            if (unique_sink(d, v2, sub_eidx(v2)) != e3.from) continue;
            if (unique_source(d, v3, sub_eidx(v3)) != e2.to) continue;
            if (unique_sink(d, v3, sub_eidx(v3)) != e4.from) continue;
            if (unique_source(d, v4, sub_eidx(v4)) != e3.to) continue;
            CaseChoice c;
            c.kind = 5;
            c.m1 = v1;
            c.m2 = v2;
            c.m3 = v3;
            c.m4 = v4;
            out.push_back(c);
        }

    return out;
}

bool search(SearchCtx& ctx, uint64_t mask) {
    auto it = ctx.verdict.find(mask);
    if (it != ctx.verdict.end()) return it->second == 1;
    ctx.verdict[mask] = 2;  // guards against re-entry; overwritten on success
    for (const CaseChoice& c : candidates(ctx, mask)) {
        bool ok = true;
        for (uint64_t m : {c.m1, c.m2, c.m3, c.m4}) {
            if (m == 0) continue;
            if (!search(ctx, m)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            ctx.verdict[mask] = 1;
            ctx.first[mask] = c;
            return true;
        }
    }
    return false;
}

DecompPtr build_decomp(SearchCtx& ctx, uint64_t mask) {
    const CaseChoice& c = ctx.first.at(mask);
    auto node = std::make_unique<Decomp>();
    node->kind = c.kind;
    node->theta = c.theta;
    for (uint64_t m : {c.m1, c.m2, c.m3, c.m4}) {
        if (m == 0) continue;
        node->subs.push_back(build_decomp(ctx, m));
    }
    return node;
}

uint64_t full_mask(const OpDag& d) {
    require(d.nv <= 60, "dag too large for decomposition search");
    return d.nv == 60 ? ~uint64_t(0) >> 4 : (uint64_t(1) << d.nv) - 1;
}

void enumerate_rec(SearchCtx& ctx, uint64_t mask, size_t limit, std::vector<DecompPtr>& out) {
    if (out.size() >= limit) return;
    for (const CaseChoice& c : candidates(ctx, mask)) {
        std::vector<uint64_t> subs;
        for (uint64_t m : {c.m1, c.m2, c.m3, c.m4})
            if (m != 0) subs.push_back(m);
        bool viable = true;
        for (uint64_t m : subs)
            if (!search(ctx, m)) viable = false;
        if (!viable) continue;
        // Cartesian product of sub-decompositions, capped at limit.
        std::vector<std::vector<DecompPtr>> options;
        bool empty_option = false;
        for (uint64_t m : subs) {
            std::vector<DecompPtr> o;
            enumerate_rec(ctx, m, limit, o);
            if (o.empty()) empty_option = true;
            options.push_back(std::move(o));
        }
        if (empty_option) continue;
        std::vector<size_t> pick(options.size(), 0);
        for (;;) {
            if (out.size() >= limit) return;
            auto node = std::make_unique<Decomp>();
            node->kind = c.kind;
            node->theta = c.theta;
            for (size_t k = 0; k < options.size(); ++k) {
                const Decomp& src = *options[k][pick[k]];
                // deep copy
                auto copy = [&](auto&& self, const Decomp& x) -> DecompPtr {
                    auto n = std::make_unique<Decomp>();
                    n->kind = x.kind;
                    n->theta = x.theta;
                    for (const auto& s : x.subs) n->subs.push_back(self(self, *s));
                    return n;
                };
                node->subs.push_back(copy(copy, src));
            }
            out.push_back(std::move(node));
            size_t k = 0;
            while (k < pick.size()) {
                if (++pick[k] < options[k].size()) break;
                pick[k] = 0;
                ++k;
            }
            if (k == pick.size()) break;
        }
    }
}

}  // namespace

bool is_compound(const OpDag& d) {
    d.validate();
    SearchCtx ctx;
    ctx.dag = &d;
    return search(ctx, full_mask(d));
}

DecompPtr find_decomposition(const OpDag& d) {
    d.validate();
    SearchCtx ctx;
    ctx.dag = &d;
    if (!search(ctx, full_mask(d))) return nullptr;
    return build_decomp(ctx, full_mask(d));
}

std::vector<DecompPtr> enumerate_decompositions(const OpDag& d, size_t limit) {
    d.validate();
    SearchCtx ctx;
    ctx.dag = &d;
    std::vector<DecompPtr> out;
    enumerate_rec(ctx, full_mask(d), limit, out);
    return out;
}

// ---------------------------------------------------------------------------
// Localised application, following the inductive definition case by case.

namespace {

std::optional<StackTree> guard_basic(const StackOp& op, int i, const StackTree& t) {
    if (i < 1 || i > leaf_count(t)) return std::nullopt;
    return apply_basic_at(op, i, t);
}

std::optional<StackTree> guard_dup(int k, int i, const StackTree& t) {
    if (i < 1 || i > leaf_count(t)) return std::nullopt;
    return duplicate_leaf(k, i, t);
}

std::optional<StackTree> guard_merge(int k, int i, const StackTree& t) {
    if (i < 1 || i > leaf_count(t)) return std::nullopt;
    return merge_leaves(k, i, t);
}

}  // namespace

std::optional<StackTree> apply_with(const Decomp& dec, int i, const StackTree& t) {
    switch (dec.kind) {
        case 1:
            return t;
        case 2: {
            auto t1 = apply_with(*dec.subs[0], i, t);
            if (!t1) return std::nullopt;
            std::optional<StackTree> t2;
            if (const auto* op = std::get_if<StackOp>(&dec.theta))
                t2 = guard_basic(*op, i, *t1);
            else if (std::get_if<DirLabel>(&dec.theta))
                t2 = guard_dup(1, i, *t1);
            else
                t2 = guard_merge(1, i, *t1);
            if (!t2) return std::nullopt;
            return apply_with(*dec.subs[1], i, *t2);
        }
        case 3: {
            auto t1 = apply_with(*dec.subs[0], i, t);
            if (!t1) return std::nullopt;
            auto t2 = guard_dup(2, i, *t1);
            if (!t2) return std::nullopt;
            auto t3 = apply_with(*dec.subs[2], i + 1, *t2);
            if (!t3) return std::nullopt;
            return apply_with(*dec.subs[1], i, *t3);
        }
        case 4: {
            auto t1 = apply_with(*dec.subs[0], i, t);
            if (!t1) return std::nullopt;
            auto t2 = apply_with(*dec.subs[1], i + 1, *t1);
            if (!t2) return std::nullopt;
            auto t3 = guard_merge(2, i, *t2);
            if (!t3) return std::nullopt;
            return apply_with(*dec.subs[2], i, *t3);
        }
        case 5: {
            auto t1 = apply_with(*dec.subs[0], i, t);
            if (!t1) return std::nullopt;
            auto t2 = guard_dup(2, i, *t1);
            if (!t2) return std::nullopt;
            auto t3 = apply_with(*dec.subs[1], i, *t2);
            if (!t3) return std::nullopt;
            auto t4 = apply_with(*dec.subs[2], i + 1, *t3);
            if (!t4) return std::nullopt;
            auto t5 = guard_merge(2, i, *t4);
            if (!t5) return std::nullopt;
            return apply_with(*dec.subs[3], i, *t5);
        }
        default:
            throw usage_error("bad decomposition node");
    }
}

std::optional<StackTree> apply_at(const OpDag& d, int i, const StackTree& t) {
    DecompPtr dec = find_decomposition(d);
    require(dec != nullptr, "apply_at: dag is not a compound operation");
    require(i >= 1 && i <= leaf_count(t), "apply_at: leaf index out of range");
    return apply_with(*dec, i, t);
}

std::set<StackTree> apply_all(const OpDag& d, const StackTree& t) {
    DecompPtr dec = find_decomposition(d);
    require(dec != nullptr, "apply_all: dag is not a compound operation");
    std::set<StackTree> out;
    int n = leaf_count(t);
    for (int i = 1; i <= n; ++i) {
        auto r = apply_with(*dec, i, t);
        if (r) out.insert(std::move(*r));
    }
    return out;
}

std::optional<StackTree> apply_parallel(const std::vector<OpDag>& ds, const std::vector<int>& is,
                                        const StackTree& t) {
    require(ds.size() == is.size() && !ds.empty(), "apply_parallel: size mismatch");
    for (size_t j = 0; j + 1 < ds.size(); ++j)
        require(is[j + 1] >= is[j] + ds[j].in_degree(),
                "apply_parallel: indices violate the spacing constraint");
    std::optional<StackTree> cur = t;
    for (size_t j = ds.size(); j-- > 0;) {
        DecompPtr dec = find_decomposition(ds[j]);
        require(dec != nullptr, "apply_parallel: dag is not a compound operation");
        if (is[j] < 1 || is[j] > leaf_count(*cur)) return std::nullopt;
        cur = apply_with(*dec, is[j], *cur);
        if (!cur) return std::nullopt;
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Reducedness.

namespace {
constexpr Tok kClassRew = 1;
constexpr Tok kClassTest = 2;
constexpr Tok kClassDir = 3;
constexpr Tok kClassCodir = 4;

void red_fragment(Nfa& n, int level, int order, int in, int out) {
    if (level == 0) {
        n.add(in, std::nullopt, out);
        n.add(in, kClassTest, out);
        n.add(in, kClassRew, out);
        int a = n.add_state();
        n.add(in, kClassRew, a);
        n.add(a, kClassTest, out);
        int b = n.add_state();
        n.add(in, kClassTest, b);
        n.add(b, kClassRew, out);
        int c = n.add_state(), e = n.add_state();
        n.add(in, kClassRew, c);
        n.add(c, kClassTest, e);
        n.add(e, kClassRew, out);
        return;
    }
    Tok down = (level == order) ? kClassCodir : Tok(30 + level);
    Tok up = (level == order) ? kClassDir : Tok(10 + level);
    int a = n.add_state();
    red_fragment(n, level - 1, order, in, a);
    n.add(a, down, in);
    int mid = n.add_state();
    red_fragment(n, level - 1, order, in, mid);
    int b = n.add_state();
    n.add(mid, up, b);
    red_fragment(n, level - 1, order, b, mid);
    n.add(mid, std::nullopt, out);
}
}  // namespace

Tok red_class(const EdgeLabel& l) {
    if (const auto* op = std::get_if<StackOp>(&l)) {
        if (std::get_if<RewOp>(op)) return kClassRew;
        if (std::get_if<IdOp>(op)) return -1;
        if (const auto* c = std::get_if<CopOp>(op)) return 10 + c->level;
        if (const auto* nc = std::get_if<NcopOp>(op)) return 30 + nc->level;
        return kClassTest;
    }
    if (std::get_if<DirLabel>(&l)) return kClassDir;
    return kClassCodir;
}

Dfa red_word_dfa(int order) {
    Nfa n;
    int s = n.add_state();
    int t = n.add_state();
    n.starts = {s};
    n.finals = {t};
    red_fragment(n, order, order, s, t);
    std::vector<Tok> universe = {kClassRew, kClassTest, kClassDir, kClassCodir};
    for (int k = 1; k < order; ++k) {
        universe.push_back(10 + k);
        universe.push_back(30 + k);
    }
    std::sort(universe.begin(), universe.end());
    return n.determinize(universe).minimized();
}

bool is_reduced(const OpDag& d, int order) {
    static std::map<int, Dfa> cache;
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.insert({order, red_word_dfa(order)}).first;
    const Dfa& red = it->second;

    std::vector<std::vector<std::pair<int, Tok>>> adj(d.nv);
    for (const auto& e : d.edges) adj[e.from].push_back({e.to, red_class(e.label)});
    std::set<std::pair<int, int>> seen;
    for (int v = 0; v < d.nv; ++v) {
        std::vector<std::pair<int, int>> work;
        if (!red.accepting[red.start]) return false;
        work.push_back({v, red.start});
        while (!work.empty()) {
            auto [x, q] = work.back();
            work.pop_back();
            if (!seen.insert({x, q}).second) continue;
            for (auto [y, cls] : adj[x]) {
                if (cls < 0) return false;
                int nq = red.step(q, cls);
                if (nq < 0 || !red.accepting[nq]) return false;
                work.push_back({y, nq});
            }
        }
    }
    return true;
}

std::vector<std::vector<EdgeLabel>> path_words(const OpDag& d) {
    std::vector<std::vector<std::pair<int, const EdgeLabel*>>> adj(d.nv);
    for (const auto& e : d.edges) adj[e.from].push_back({e.to, &e.label});
    std::vector<std::vector<EdgeLabel>> out;
    std::set<std::string> seen;
    std::vector<EdgeLabel> cur;
    auto dfs = [&](auto&& self, int v) -> void {
        for (auto [w, lbl] : adj[v]) {
            cur.push_back(*lbl);
            std::string key;
            for (const auto& l : cur) key += edge_label_key(l) + "|";
            if (seen.insert(key).second) out.push_back(cur);
            self(self, w);
            cur.pop_back();
        }
    };
    for (int v = 0; v < d.nv; ++v) dfs(dfs, v);
    return out;
}

std::vector<OpDag> concat_all(const OpDag& d, const OpDag& dp, int max_vertices) {
    std::vector<OpDag> out;
    std::set<std::string> seen;
    int no = d.out_degree(), ni = dp.in_degree();
    for (int i = 1; i <= no; ++i)
        for (int j = 1; j <= ni; ++j) {
            OpDag c = concat(d, i, dp, j);
            if (c.nv > max_vertices) continue;
            if (!is_compound(c)) continue;
            if (seen.insert(dag_key(c)).second) out.push_back(std::move(c));
        }
    return out;
}

std::vector<OpDag> dag_power(const OpDag& d, int n, int max_vertices) {
    require(n >= 1, "dag_power: n must be >= 1");
    std::vector<std::map<std::string, OpDag>> levels(static_cast<size_t>(n) + 1);
    levels[1][dag_key(d)] = d;
    for (int m = 2; m <= n; ++m)
        for (int i = 1; i < m; ++i)
            for (const auto& [ka, a] : levels[i])
                for (const auto& [kb, b] : levels[m - i])
                    for (OpDag& c : concat_all(a, b, max_vertices))
                        levels[m].emplace(dag_key(c), std::move(c));
    std::vector<OpDag> out;
    for (auto& [k, v] : levels[n]) out.push_back(std::move(v));
    return out;
}

// ---------------------------------------------------------------------------
// Canonical-layout composition helpers and the order-1 rule compiler.

namespace {

std::vector<OpDag::Edge> shifted(const std::vector<OpDag::Edge>& es, int off) {
    std::vector<OpDag::Edge> out;
    for (const auto& e : es) out.push_back({e.from + off, e.label, e.to + off});
    return out;
}

int only_output(const OpDag& d) {
    auto o = d.outputs();
    require(o.size() == 1, "operand must have a single output");
    return o[0];
}

int only_input(const OpDag& d) {
    auto i = d.inputs();
    require(i.size() == 1, "operand must have a single input");
    return i[0];
}

}  // namespace

OpDag compose_case2(const OpDag& d1, const EdgeLabel& lbl, const OpDag& d2) {
    OpDag out;
    out.nv = d1.nv + d2.nv;
    out.edges = d1.edges;
    out.edges.push_back({only_output(d1), lbl, d1.nv + only_input(d2)});
    for (auto& e : shifted(d2.edges, d1.nv)) out.edges.push_back(e);
    return out;
}

OpDag compose_case3(const OpDag& d1, const OpDag& d2, const OpDag& d3) {
    OpDag out;
    out.nv = d1.nv + d2.nv + d3.nv;
    out.edges = d1.edges;
    int x = only_output(d1);
    out.edges.push_back({x, DirLabel{1}, d1.nv + only_input(d2)});
    out.edges.push_back({x, DirLabel{2}, d1.nv + d2.nv + only_input(d3)});
    for (auto& e : shifted(d2.edges, d1.nv)) out.edges.push_back(e);
    for (auto& e : shifted(d3.edges, d1.nv + d2.nv)) out.edges.push_back(e);
    return out;
}

OpDag compose_case4(const OpDag& d1, const OpDag& d2, const OpDag& d3) {
    OpDag out;
    out.nv = d1.nv + d2.nv + d3.nv;
    out.edges = d1.edges;
    int z = d1.nv + d2.nv + only_input(d3);
    out.edges.push_back({only_output(d1), CodirLabel{1}, z});
    out.edges.push_back({d1.nv + only_output(d2), CodirLabel{2}, z});
    for (auto& e : shifted(d2.edges, d1.nv)) out.edges.push_back(e);
    for (auto& e : shifted(d3.edges, d1.nv + d2.nv)) out.edges.push_back(e);
    return out;
}

OpDag compose_case5(const OpDag& d1, const OpDag& d2, const OpDag& d3, const OpDag& d4) {
    OpDag out;
    out.nv = d1.nv + d2.nv + d3.nv + d4.nv;
    out.edges = d1.edges;
    int x = only_output(d1);
    int y1 = d1.nv + only_input(d2);
    int w1 = d1.nv + only_output(d2);
    int y2 = d1.nv + d2.nv + only_input(d3);
    int w2 = d1.nv + d2.nv + only_output(d3);
    int z = d1.nv + d2.nv + d3.nv + only_input(d4);
    out.edges.push_back({x, DirLabel{1}, y1});
    out.edges.push_back({x, DirLabel{2}, y2});
    out.edges.push_back({w1, CodirLabel{1}, z});
    out.edges.push_back({w2, CodirLabel{2}, z});
    for (auto& e : shifted(d2.edges, d1.nv)) out.edges.push_back(e);
    for (auto& e : shifted(d3.edges, d1.nv + d2.nv)) out.edges.push_back(e);
    for (auto& e : shifted(d4.edges, d1.nv + d2.nv + d3.nv)) out.edges.push_back(e);
    return out;
}

namespace {

OpDag chain(std::vector<EdgeLabel> labels) {
    OpDag out;
    out.nv = static_cast<int>(labels.size()) + 1;
    for (size_t i = 0; i < labels.size(); ++i)
        out.edges.push_back({static_cast<int>(i), labels[i], static_cast<int>(i) + 1});
    return out;
}

OpDag append_chain(OpDag d, const std::vector<EdgeLabel>& labels) {
    for (const EdgeLabel& l : labels) d = compose_case2(d, l, emptydag());
    return d;
}

// Consumes an lhs-shaped subtree down to one leaf carrying the root symbol.
OpDag destr_tree(const StackTree& l) {
    char root = l.label.sym;
    if (l.children.empty()) return basic_dag(RewOp{root, root});
    if (l.children.size() == 1) {
        const StackTree& c = l.children[0];
        OpDag d = append_chain(destr_tree(c), {StackOp{RewOp{c.label.sym, root}}, CodirLabel{1}});
        return d;
    }
    const StackTree& c1 = l.children[0];
    const StackTree& c2 = l.children[1];
    OpDag d1 = append_chain(destr_tree(c1), {StackOp{RewOp{c1.label.sym, root}}});
    OpDag d2 = append_chain(destr_tree(c2), {StackOp{RewOp{c2.label.sym, root}}});
    return compose_case4(d1, d2, emptydag());
}

// Grows an rhs-shaped subtree from one leaf carrying the root symbol.
OpDag constr_tree(const StackTree& r) {
    char root = r.label.sym;
    if (r.children.empty()) return emptydag();
    if (r.children.size() == 1) {
        const StackTree& c = r.children[0];
        return compose_case2(chain({DirLabel{1}}), StackOp{RewOp{root, c.label.sym}}, constr_tree(c));
    }
    const StackTree& c1 = r.children[0];
    const StackTree& c2 = r.children[1];
    OpDag left = compose_case2(emptydag(), StackOp{RewOp{root, c1.label.sym}}, constr_tree(c1));
    OpDag right = compose_case2(emptydag(), StackOp{RewOp{root, c2.label.sym}}, constr_tree(c2));
    return compose_case3(emptydag(), left, right);
}

}  // namespace

OpDag compile_gtrs_rule(const StackTree& lhs, const StackTree& rhs) {
    require(lhs.label.level == 0 && rhs.label.level == 0,
            "compile_gtrs_rule expects order-1 trees");
    OpDag d = compose_case2(destr_tree(lhs), StackOp{RewOp{lhs.label.sym, rhs.label.sym}},
                         constr_tree(rhs));
    return d;
}

std::string dag_to_text(const OpDag& d) {
    std::ostringstream os;
    os << "dag {\n  v: 1.." << d.nv << ";\n";
    for (const auto& e : d.edges)
        os << "  e: (" << e.from + 1 << ", " << edge_label_text(e.label) << ", " << e.to + 1
           << ");\n";
    os << "  inputs: [";
    auto ins = d.inputs();
    for (size_t i = 0; i < ins.size(); ++i) os << (i ? ", " : "") << ins[i] + 1;
    os << "];\n  outputs: [";
    auto outs = d.outputs();
    for (size_t i = 0; i < outs.size(); ++i) os << (i ? ", " : "") << outs[i] + 1;
    os << "];\n}\n";
    return os.str();
}

namespace {

struct DagTextParser {
    const std::string& text;
    size_t pos = 0;
    explicit DagTextParser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw parse_error("dag parse error at offset " + std::to_string(pos) + ": " + msg);
    }
    bool try_kw(const std::string& kw) {
        skip_ws();
        if (text.compare(pos, kw.size(), kw) == 0) {
            pos += kw.size();
            return true;
        }
        return false;
    }
    void expect(const std::string& kw) {
        if (!try_kw(kw)) fail("expected '" + kw + "'");
    }
    int number() {
        skip_ws();
        size_t s = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (s == pos) fail("expected number");
        return std::stoi(text.substr(s, pos - s));
    }
    char symbol() {
        skip_ws();
        if (pos >= text.size() || !symbol_char_ok(text[pos])) fail("expected symbol");
        return text[pos++];
    }
    EdgeLabel label() {
        skip_ws();
        if (try_kw("rew")) {
            expect("(");
            char a = symbol();
            expect(",");
            char b = symbol();
            expect(")");
            return StackOp{RewOp{a, b}};
        }
        if (try_kw("id")) return StackOp{IdOp{}};
        if (try_kw("ncop")) {
            expect("(");
            int k = number();
            expect(")");
            return StackOp{NcopOp{k}};
        }
        if (try_kw("cop")) {
            expect("(");
            int k = number();
            expect(")");
            return StackOp{CopOp{k}};
        }
        if (try_kw("codir")) {
            expect("(");
            int k = number();
            expect(")");
            return CodirLabel{k};
        }
        if (try_kw("dir")) {
            expect("(");
            int k = number();
            expect(")");
            return DirLabel{k};
        }
        if (try_kw("test")) fail("test labels are only supported in the JSON dag format");
        fail("unknown edge label");
    }
};

}  // namespace

OpDag dag_from_text(const std::string& text) {
    DagTextParser p(text);
    p.expect("dag");
    p.expect("{");
    p.expect("v");
    p.expect(":");
    int lo = p.number();
    p.expect("..");
    int hi = p.number();
    if (lo != 1 || hi < 1) p.fail("vertex range must be 1..m");
    p.expect(";");
    OpDag d;
    d.nv = hi;
    for (;;) {
        if (p.try_kw("e")) {
            p.expect(":");
            p.expect("(");
            int from = p.number();
            p.expect(",");
            EdgeLabel lbl = p.label();
            p.expect(",");
            int to = p.number();
            p.expect(")");
            p.expect(";");
            if (from < 1 || from > hi || to < 1 || to > hi) p.fail("edge endpoint out of range");
            d.edges.push_back({from - 1, lbl, to - 1});
            continue;
        }
        break;
    }
    auto id_list = [&]() {
        p.expect("[");
        std::vector<int> out;
        p.skip_ws();
        if (!p.try_kw("]")) {
            for (;;) {
                out.push_back(p.number() - 1);
                if (p.try_kw("]")) break;
                p.expect(",");
            }
        }
        p.expect(";");
        return out;
    };
    if (p.try_kw("inputs")) {
        p.expect(":");
        std::vector<int> ins = id_list();
        if (ins != d.inputs()) p.fail("declared inputs do not match the dag");
    }
    if (p.try_kw("outputs")) {
        p.expect(":");
        std::vector<int> outs = id_list();
        if (outs != d.outputs()) p.fail("declared outputs do not match the dag");
    }
    p.expect("}");
    d.validate();
    return d;
}

std::string dag_to_dot(const OpDag& d, const std::string& name) {
    std::ostringstream os;
    os << "digraph " << name << " {\n  node [shape=circle, width=0.25, label=\"\"];\n";
    for (int v = 0; v < d.nv; ++v) os << "  n" << v << " [xlabel=\"" << v + 1 << "\"];\n";
    for (const auto& e : d.edges) {
        bool directional = !std::holds_alternative<StackOp>(e.label);
        os << "  n" << e.from << " -> n" << e.to << " [label=\"" << edge_label_text(e.label)
           << "\"" << (directional ? ", style=dashed, color=blue" : "") << "];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace hostree
