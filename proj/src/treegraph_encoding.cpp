#include "hostree/treegraph_encoding.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hostree {

std::string decode_tag_name(DecodeTag tag) {
    switch (tag) {
        case DecodeTag::Ok: return "ok";
        case DecodeTag::OnlyLeaves: return "OnlyLeaves";
        case DecodeTag::TreeDom: return "TreeDom";
        case DecodeTag::UniqueLabel: return "UniqueLabel";
    }
    return "?";
}

Stack encode_node(const StackTree& t, const Position& u) {
    require(t.label.level >= 1, "node encoding requires order >= 2");
    require(position_in_domain(t, u), "encode_node: position outside tree domain");
    std::vector<Stack> items;
    const StackTree* cur = &t;
    for (size_t i = 0; i < u.size(); ++i) {
        std::string w;
        w.push_back(static_cast<char>('0' + cur->children.size()));
        w.push_back(u[i]);
        items.push_back(push_word(w, cur->label));
        cur = &cur->children[static_cast<size_t>(u[i] - '1')];
    }
    items.push_back(cur->label);
    return Stack::seq(t.label.level + 1, std::move(items));
}

std::vector<Stack> encode_tree(const StackTree& t) {
    std::vector<Stack> out;
    for (const Position& u : leaves(t)) out.push_back(encode_node(t, u));
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct Chain {
    // labels[i] is the label at depth i, dirs/aritys annotate depths 0..m-1.
    std::vector<Stack> labels;
    std::string dirs;
    std::string aritys;
    Position pos() const { return dirs; }
};

bool direction_free(const Stack& s) {
    if (s.level == 0) return s.sym != kDir1 && s.sym != kDir2;
    for (const Stack& it : s.items)
        if (!direction_free(it)) return false;
    return true;
}

// Parses one element of X as a root-to-leaf chain; empty result on failure.
std::optional<Chain> parse_chain(const Stack& e) {
    if (e.level < 1) return std::nullopt;
    Chain c;
    for (size_t i = 0; i < e.items.size(); ++i) {
        const Stack& comp = e.items[i];
        if (i + 1 == e.items.size()) {
            if (!direction_free(comp)) return std::nullopt;
            c.labels.push_back(comp);
            break;
        }
        // An annotated component's topmost 1-stack ends with arity then
        // direction; after stripping, the remainder must be non-empty.
        if (comp.level < 1) return std::nullopt;
        std::string suffix;
        {
            const Stack* cur = &comp;
            while (cur->level > 1) {
                if (cur->items.empty()) return std::nullopt;
                cur = &cur->items.back();
            }
            if (cur->items.size() < 3) return std::nullopt;
            char a = cur->items[cur->items.size() - 2].sym;
            char d = cur->items[cur->items.size() - 1].sym;
            if ((a != '1' && a != '2') || (d != kDir1 && d != kDir2)) return std::nullopt;
            if (d > a) return std::nullopt;  // direction exceeds arity
            suffix.push_back(a);
            suffix.push_back(d);
            c.aritys.push_back(a);
            c.dirs.push_back(d);
        }
        auto stripped = pop_word(suffix, comp);
        if (!stripped || !direction_free(*stripped)) return std::nullopt;
        c.labels.push_back(std::move(*stripped));
    }
    return c;
}

}  // namespace

DecodeResult decode(const std::vector<Stack>& x) {
    DecodeResult res;

    // OnlyLeaves: every element codes a root-to-leaf chain.
    std::vector<Chain> chains;
    for (size_t i = 0; i < x.size(); ++i) {
        auto c = parse_chain(x[i]);
        if (!c) {
            res.tag = DecodeTag::OnlyLeaves;
            res.detail = "element " + std::to_string(i) + " does not code a leaf";
            return res;
        }
        chains.push_back(std::move(*c));
    }
    if (chains.empty()) {
        res.tag = DecodeTag::TreeDom;
        res.detail = "empty set cannot code a tree";
        return res;
    }

    // TreeDom: induced domain is prefix- and left-closed with consistent,
    // realized arities.
    std::set<Position> domain;
    std::map<Position, char> arity;
    for (const Chain& c : chains) {
        Position p;
        domain.insert(p);
        for (size_t i = 0; i < c.dirs.size(); ++i) {
            auto it = arity.find(p);
            if (it != arity.end() && it->second != c.aritys[i]) {
                res.tag = DecodeTag::TreeDom;
                res.detail = "conflicting arities declared at position '" + p + "'";
                return res;
            }
            arity[p] = c.aritys[i];
            p.push_back(c.dirs[i]);
            domain.insert(p);
        }
    }
    for (const Position& p : domain) {
        if (!p.empty() && p.back() == '2') {
            Position sib = p;
            sib.back() = '1';
            if (!domain.count(sib)) {
                res.tag = DecodeTag::TreeDom;
                res.detail = "domain not left-closed at '" + p + "'";
                return res;
            }
        }
    }
    for (const Position& p : domain) {
        auto it = arity.find(p);
        int declared = it == arity.end() ? 0 : it->second - '0';
        for (int j = 1; j <= 2; ++j) {
            bool present = domain.count(p + static_cast<char>('0' + j)) > 0;
            if (present != (j <= declared)) {
                res.tag = DecodeTag::TreeDom;
                res.detail = "declared arity " + std::to_string(declared) + " at '" + p +
                             "' not matched by the domain";
                return res;
            }
        }
    }

    // UniqueLabel: shared-prefix labels agree; no element codes an ancestor of
    // another.
    std::map<Position, const Stack*> label_at;
    for (const Chain& c : chains) {
        Position p;
        for (size_t i = 0; i < c.labels.size(); ++i) {
            auto it = label_at.find(p);
            if (it != label_at.end() && !(*it->second == c.labels[i])) {
                res.tag = DecodeTag::UniqueLabel;
                res.detail = "conflicting labels at position '" + p + "'";
                return res;
            }
            label_at[p] = &c.labels[i];
            if (i < c.dirs.size()) p.push_back(c.dirs[i]);
        }
    }
    std::set<Position> leaf_positions;
    for (const Chain& c : chains) {
        if (!leaf_positions.insert(c.pos()).second) {
            res.tag = DecodeTag::UniqueLabel;
            res.detail = "two elements code the leaf '" + c.pos() + "'";
            return res;
        }
    }
    for (const Chain& c : chains) {
        if (arity.count(c.pos())) {
            res.tag = DecodeTag::UniqueLabel;
            res.detail = "element codes internal position '" + c.pos() + "'";
            return res;
        }
    }

    // Reconstruction.
    auto build = [&](auto&& self, const Position& p) -> StackTree {
        StackTree node = StackTree::leaf(*label_at.at(p));
        auto it = arity.find(p);
        int declared = it == arity.end() ? 0 : it->second - '0';
        for (int j = 1; j <= declared; ++j)
            node.children.push_back(self(self, p + static_cast<char>('0' + j)));
        return node;
    };
    res.tree = build(build, Position{});
    res.tag = DecodeTag::Ok;
    return res;
}

}  // namespace hostree
