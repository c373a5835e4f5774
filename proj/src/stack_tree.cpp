#include "hostree/stack_tree.hpp"

#include <sstream>

namespace hostree {

int StackTree::compare(const StackTree& o) const {
    int c = label.compare(o.label);
    if (c != 0) return c;
    size_t n = std::min(children.size(), o.children.size());
    for (size_t i = 0; i < n; ++i) {
        c = children[i].compare(o.children[i]);
        if (c != 0) return c;
    }
    if (children.size() != o.children.size()) return children.size() < o.children.size() ? -1 : 1;
    return 0;
}

int StackTree::node_count() const {
    int n = 1;
    for (const StackTree& c : children) n += c.node_count();
    return n;
}

bool StackTree::well_formed() const {
    if (children.size() > 2) return false;
    if (!label.well_formed()) return false;
    for (const StackTree& c : children)
        if (c.label.level != label.level || !c.well_formed()) return false;
    return true;
}

static void collect_leaves(const StackTree& t, Position& cur, std::vector<Position>& out) {
    if (t.children.empty()) {
        out.push_back(cur);
        return;
    }
    for (size_t j = 0; j < t.children.size(); ++j) {
        cur.push_back(static_cast<char>('1' + j));
        collect_leaves(t.children[j], cur, out);
        cur.pop_back();
    }
}

std::vector<Position> leaves(const StackTree& t) {
    std::vector<Position> out;
    Position cur;
    collect_leaves(t, cur, out);
    return out;
}

int leaf_count(const StackTree& t) {
    if (t.children.empty()) return 1;
    int n = 0;
    for (const StackTree& c : t.children) n += leaf_count(c);
    return n;
}

bool position_in_domain(const StackTree& t, const Position& u) {
    const StackTree* cur = &t;
    for (char c : u) {
        size_t j = static_cast<size_t>(c - '1');
        if (c != '1' && c != '2') return false;
        if (j >= cur->children.size()) return false;
        cur = &cur->children[j];
    }
    return true;
}

const StackTree& subtree(const StackTree& t, const Position& u) {
    const StackTree* cur = &t;
    for (char c : u) {
        size_t j = static_cast<size_t>(c - '1');
        require((c == '1' || c == '2') && j < cur->children.size(),
                "position outside tree domain");
        cur = &cur->children[j];
    }
    return *cur;
}

StackTree replace_subtree(const StackTree& t, const Position& u, const StackTree& s) {
    require(position_in_domain(t, u), "position outside tree domain");
    if (u.empty()) return s;
    StackTree out = t;
    StackTree* cur = &out;
    for (size_t i = 0; i + 1 < u.size(); ++i) cur = &cur->children[static_cast<size_t>(u[i] - '1')];
    cur->children[static_cast<size_t>(u.back() - '1')] = s;
    return out;
}

static Position nth_leaf(const StackTree& t, int i) {
    std::vector<Position> ls = leaves(t);
    require(i >= 1 && i <= static_cast<int>(ls.size()), "leaf index out of range");
    return ls[static_cast<size_t>(i - 1)];
}

std::optional<StackTree> apply_basic_at(const StackOp& op, int i, const StackTree& t) {
    Position u = nth_leaf(t, i);
    const StackTree& lf = subtree(t, u);
    std::optional<Stack> s = apply_stack_op(op, lf.label);
    if (!s) return std::nullopt;
    return replace_subtree(t, u, StackTree::leaf(std::move(*s)));
}

StackTree duplicate_leaf(int k, int i, const StackTree& t) {
    require(k == 1 || k == 2, "duplication arity must be 1 or 2");
    Position u = nth_leaf(t, i);
    const StackTree& lf = subtree(t, u);
    StackTree node = lf;
    for (int j = 0; j < k; ++j) node.children.push_back(StackTree::leaf(lf.label));
    return replace_subtree(t, u, node);
}

std::optional<StackTree> merge_leaves(int k, int i, const StackTree& t) {
    require(k == 1 || k == 2, "merge arity must be 1 or 2");
    Position u = nth_leaf(t, i);
    if (u.empty() || u.back() != '1') return std::nullopt;  // must be a first child
    Position pu = u.substr(0, u.size() - 1);
    const StackTree& parent = subtree(t, pu);
    if (static_cast<int>(parent.children.size()) != k) return std::nullopt;
    for (const StackTree& c : parent.children)
        if (!c.children.empty() || !(c.label == parent.label)) return std::nullopt;
    StackTree merged = StackTree::leaf(parent.label);
    return replace_subtree(t, pu, merged);
}

std::string serialize_tree(const StackTree& t) {
    std::ostringstream os;
    auto walk = [&](auto&& self, const StackTree& x) -> void {
        os << "node(" << serialize_stack(x.label);
        for (const StackTree& c : x.children) {
            os << ", ";
            self(self, c);
        }
        os << ")";
    };
    walk(walk, t);
    return os.str();
}

namespace {

struct TreeParser {
    const std::string& text;
    size_t pos = 0;

    explicit TreeParser(const std::string& t) : text(t) {}
    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw parse_error("tree parse error at offset " + std::to_string(pos) + ": " + msg);
    }
    void expect(const std::string& kw) {
        skip_ws();
        if (text.compare(pos, kw.size(), kw) != 0) fail("expected '" + kw + "'");
        pos += kw.size();
    }
    StackTree parse() {
        expect("node");
        expect("(");
        // The label runs until a ',' or the matching ')' at depth 0.
        skip_ws();
        size_t start = pos;
        int depth = 0;
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '(') ++depth;
            if ((c == ',' || c == ')') && depth == 0) break;
            if (c == ')') --depth;
            ++pos;
        }
        if (pos >= text.size()) fail("unterminated node");
        StackTree out = StackTree::leaf(parse_stack(text.substr(start, pos - start)));
        while (text[pos] == ',') {
            ++pos;
            out.children.push_back(parse());
            skip_ws();
            if (pos >= text.size()) fail("unterminated node");
        }
        if (text[pos] != ')') fail("expected ')'");
        ++pos;
        if (out.children.size() > 2) fail("arity > 2");
        return out;
    }
};

}  // namespace

StackTree parse_tree(const std::string& text) {
    TreeParser p(text);
    StackTree t = p.parse();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    require(t.well_formed(), "parsed tree is not well-formed");
    return t;
}

std::string tree_to_dot(const StackTree& t, const std::string& name) {
    std::ostringstream os;
    os << "digraph " << name << " {\n  node [shape=box];\n";
    int next = 0;
    auto walk = [&](auto&& self, const StackTree& x) -> int {
        int id = next++;
        os << "  n" << id << " [label=\"" << serialize_stack(x.label) << "\"];\n";
        for (const StackTree& c : x.children) {
            int cid = self(self, c);
            os << "  n" << id << " -> n" << cid << ";\n";
        }
        return id;
    };
    walk(walk, t);
    os << "}\n";
    return os.str();
}

Stack chain_to_stack(const StackTree& t) {
    std::vector<Stack> items;
    const StackTree* cur = &t;
    for (;;) {
        items.push_back(cur->label);
        require(cur->children.size() <= 1, "chain_to_stack requires arity <= 1");
        if (cur->children.empty()) break;
        cur = &cur->children[0];
    }
    return Stack::seq(t.label.level + 1, std::move(items));
}

StackTree stack_to_chain(const Stack& s) {
    require(s.level >= 1, "stack_to_chain requires level >= 1");
    StackTree out = StackTree::leaf(s.items.back());
    for (size_t i = s.items.size() - 1; i-- > 0;) {
        StackTree node = StackTree::leaf(s.items[i]);
        node.children.push_back(std::move(out));
        out = std::move(node);
    }
    return out;
}

}  // namespace hostree
