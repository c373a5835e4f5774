#include "hostree/stack.hpp"

#include <algorithm>
#include <sstream>

namespace hostree {

Stack Stack::seq(int level, std::vector<Stack> items) {
    require(level >= 1, "seq level must be >= 1");
    require(!items.empty(), "stack sequences are non-empty");
    for (const Stack& it : items)
        require(it.level == level - 1, "stack item level mismatch");
    Stack s;
    s.level = level;
    s.items = std::move(items);
    return s;
}

int Stack::compare(const Stack& o) const {
    if (level != o.level) return level < o.level ? -1 : 1;
    if (level == 0) return sym == o.sym ? 0 : (sym < o.sym ? -1 : 1);
    size_t n = std::min(items.size(), o.items.size());
    for (size_t i = 0; i < n; ++i) {
        int c = items[i].compare(o.items[i]);
        if (c != 0) return c;
    }
    if (items.size() != o.items.size()) return items.size() < o.items.size() ? -1 : 1;
    return 0;
}

bool Stack::well_formed() const {
    if (level == 0) return items.empty();
    if (items.empty()) return false;
    for (const Stack& it : items)
        if (it.level != level - 1 || !it.well_formed()) return false;
    return true;
}

std::vector<Tok> stack_tokens(const Stack& s) {
    std::vector<Tok> out;
    auto walk = [&](auto&& self, const Stack& x) -> void {
        if (x.level == 0) {
            out.push_back(tok_sym(x.sym));
            return;
        }
        out.push_back(tok_open(x.level));
        for (const Stack& it : x.items) self(self, it);
        out.push_back(tok_close(x.level));
    };
    walk(walk, s);
    return out;
}

std::string serialize_stack(const Stack& s) {
    std::ostringstream os;
    auto walk = [&](auto&& self, const Stack& x, bool first) -> void {
        if (!first) os << ' ';
        if (x.level == 0) {
            os << x.sym;
            return;
        }
        os << "[_" << x.level;
        for (const Stack& it : x.items) self(self, it, false);
        os << " ]_" << x.level;
    };
    walk(walk, s, true);
    return os.str();
}

namespace {

struct StackParser {
    const std::string& text;
    size_t pos = 0;

    explicit StackParser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw parse_error("stack parse error at offset " + std::to_string(pos) + ": " + msg);
    }
    int parse_level_suffix() {
        if (pos >= text.size() || text[pos] != '_') fail("expected '_<level>'");
        ++pos;
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) fail("expected level digits");
        return std::stoi(text.substr(start, pos - start));
    }
    Stack parse() {
        skip_ws();
        if (pos >= text.size()) fail("empty input");
        if (text[pos] == '[') {
            ++pos;
            int level = parse_level_suffix();
            std::vector<Stack> items;
            for (;;) {
                skip_ws();
                if (pos >= text.size()) fail("unterminated stack");
                if (text[pos] == ']') {
                    ++pos;
                    int close = parse_level_suffix();
                    if (close != level) fail("bracket level mismatch");
                    break;
                }
                items.push_back(parse());
            }
            if (items.empty()) fail("empty stack sequence");
            for (const Stack& it : items)
                if (it.level != level - 1) fail("item level mismatch");
            return Stack::seq(level, std::move(items));
        }
        char c = text[pos];
        if (!symbol_char_ok(c)) fail(std::string("bad symbol '") + c + "'");
        ++pos;
        return Stack::symbol(c);
    }
};

}  // namespace

Stack parse_stack(const std::string& text) {
    StackParser p(text);
    Stack s = p.parse();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return s;
}

std::shared_ptr<const TestLanguage> TestLanguage::make(int level, Dfa dfa) {
    auto t = std::make_shared<TestLanguage>();
    t->level = level;
    t->dfa = std::move(dfa);
    t->key = "L" + std::to_string(level) + ":" + t->dfa.canonical_key();
    return t;
}

bool test_membership(const TestLanguage& lang, const Stack& s) {
    require(s.level == lang.level, "test_membership: stack level mismatch");
    return lang.dfa.accepts(stack_tokens(s));
}

TestRef tl_full(const std::string& alphabet, int level) {
    return TestLanguage::make(level, Dfa::accept_all(token_universe(alphabet, level)));
}

TestRef tl_empty(const std::string& alphabet, int level) {
    return TestLanguage::make(level, Dfa::reject_all(token_universe(alphabet, level)));
}

TestRef tl_exact(const Stack& s, const std::string& alphabet) {
    std::vector<Tok> word = stack_tokens(s);
    Nfa n;
    for (size_t i = 0; i + 1 <= word.size(); ++i) n.add_state();
    n.add_state();
    n.starts = {0};
    n.finals = {static_cast<int>(word.size())};
    for (size_t i = 0; i < word.size(); ++i) n.add(static_cast<int>(i), word[i], static_cast<int>(i) + 1);
    return TestLanguage::make(s.level, n.determinize(token_universe(alphabet, s.level)));
}

TestRef tl_top_symbol(const std::string& alphabet, char c) {
    // [1 w c ]1  -- last symbol before the close bracket is c.
    Nfa n;
    int q0 = n.add_state();  // expecting [1
    int qo = n.add_state();  // inside, last symbol != c (or none)
    int qc = n.add_state();  // inside, last symbol == c
    int qf = n.add_state();
    n.starts = {q0};
    n.finals = {qf};
    n.add(q0, tok_open(1), qo);
    for (char a : alphabet) {
        n.add(qo, tok_sym(a), a == c ? qc : qo);
        n.add(qc, tok_sym(a), a == c ? qc : qo);
    }
    n.add(qc, tok_close(1), qf);
    return TestLanguage::make(1, n.determinize(token_universe(alphabet, 1)));
}

TestRef tl_contains(const std::string& alphabet, char c) {
    Nfa n;
    int q0 = n.add_state();
    int qa = n.add_state();  // not seen yet
    int qb = n.add_state();  // seen
    int qf = n.add_state();
    n.starts = {q0};
    n.finals = {qf};
    n.add(q0, tok_open(1), qa);
    for (char a : alphabet) {
        n.add(qa, tok_sym(a), a == c ? qb : qa);
        n.add(qb, tok_sym(a), qb);
    }
    n.add(qb, tok_close(1), qf);
    return TestLanguage::make(1, n.determinize(token_universe(alphabet, 1)));
}

TestRef tl_top_two_equal(const std::string& alphabet) {
    // Accepts 1-stacks of size >= 2 whose last two symbols are equal.
    Nfa n;
    int q0 = n.add_state();
    int qin = n.add_state();
    int qf = n.add_state();
    n.starts = {q0};
    n.finals = {qf};
    n.add(q0, tok_open(1), qin);
    std::vector<int> one(alphabet.size()), two(alphabet.size());
    for (size_t i = 0; i < alphabet.size(); ++i) {
        one[i] = n.add_state();  // last symbol is alphabet[i], run of 1
        two[i] = n.add_state();  // last two symbols both alphabet[i]
    }
    for (size_t i = 0; i < alphabet.size(); ++i) {
        n.add(qin, tok_sym(alphabet[i]), one[i]);
        for (size_t j = 0; j < alphabet.size(); ++j) {
            n.add(one[i], tok_sym(alphabet[j]), i == j ? two[i] : one[j]);
            n.add(two[i], tok_sym(alphabet[j]), i == j ? two[i] : one[j]);
        }
        n.add(two[i], tok_close(1), qf);
    }
    return TestLanguage::make(1, n.determinize(token_universe(alphabet, 1)));
}

TestRef tl_finite(const std::vector<Stack>& stacks, const std::string& alphabet, int level) {
    Nfa n;
    int q0 = n.add_state();
    n.starts = {q0};
    for (const Stack& s : stacks) {
        require(s.level == level, "tl_finite: stack level mismatch");
        std::vector<Tok> word = stack_tokens(s);
        int cur = q0;
        for (Tok t : word) {
            int nxt = n.add_state();
            n.add(cur, t, nxt);
            cur = nxt;
        }
        n.finals.push_back(cur);
    }
    return TestLanguage::make(level, n.determinize(token_universe(alphabet, level)).minimized());
}

TestRef tl_intersect(const TestRef& a, const TestRef& b) {
    require(a->level == b->level, "test language level mismatch");
    return TestLanguage::make(a->level, Dfa::product(a->dfa, b->dfa, true));
}

TestRef tl_union(const TestRef& a, const TestRef& b) {
    require(a->level == b->level, "test language level mismatch");
    return TestLanguage::make(a->level, Dfa::product(a->dfa, b->dfa, false));
}

TestRef tl_complement(const TestRef& a) {
    return TestLanguage::make(a->level, a->dfa.complemented());
}

int op_level(const StackOp& op) {
    return std::visit(
        [](auto&& o) -> int {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, RewOp> || std::is_same_v<T, IdOp>)
                return 0;
            else if constexpr (std::is_same_v<T, CopOp> || std::is_same_v<T, NcopOp>)
                return o.level;
            else
                return o.lang->level;
        },
        op);
}

std::string op_key(const StackOp& op) {
    return std::visit(
        [](auto&& o) -> std::string {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, RewOp>)
                return std::string("rew:") + o.from + o.to;
            else if constexpr (std::is_same_v<T, IdOp>)
                return "id";
            else if constexpr (std::is_same_v<T, CopOp>)
                return "cop:" + std::to_string(o.level);
            else if constexpr (std::is_same_v<T, NcopOp>)
                return "ncop:" + std::to_string(o.level);
            else
                return "test:" + o.lang->key;
        },
        op);
}

std::string op_text(const StackOp& op) {
    return std::visit(
        [](auto&& o) -> std::string {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, RewOp>)
                return std::string("rew(") + o.from + "," + o.to + ")";
            else if constexpr (std::is_same_v<T, IdOp>)
                return "id";
            else if constexpr (std::is_same_v<T, CopOp>)
                return "cop(" + std::to_string(o.level) + ")";
            else if constexpr (std::is_same_v<T, NcopOp>)
                return "ncop(" + std::to_string(o.level) + ")";
            else
                return "test(level " + std::to_string(o.lang->level) + ")";
        },
        op);
}

bool op_equal(const StackOp& a, const StackOp& b) { return op_key(a) == op_key(b); }

std::optional<Stack> apply_stack_op(const StackOp& op, const Stack& s) {
    int lvl = op_level(op);
    require(lvl <= s.level, "operation level exceeds stack level");
    if (s.level > lvl) {
        // theta([s1..sk]) = [s1..,theta(sk)]
        auto sub = apply_stack_op(op, s.items.back());
        if (!sub) return std::nullopt;
        Stack out = s;
        out.items.back() = std::move(*sub);
        return out;
    }
    if (const auto* r = std::get_if<RewOp>(&op)) {
        if (s.sym != r->from) return std::nullopt;
        return Stack::symbol(r->to);
    }
    if (std::get_if<IdOp>(&op)) return s;
    if (std::get_if<CopOp>(&op)) {
        Stack out = s;
        out.items.push_back(out.items.back());
        return out;
    }
    if (std::get_if<NcopOp>(&op)) {
        if (s.items.size() < 2 || !(s.items[s.items.size() - 1] == s.items[s.items.size() - 2]))
            return std::nullopt;
        Stack out = s;
        out.items.pop_back();
        return out;
    }
    const auto& t = std::get<TestOp>(op);
    if (!test_membership(*t.lang, s)) return std::nullopt;
    return s;
}

namespace {

Stack* topmost_1stack(Stack& s) {
    require(s.level >= 1, "push/pop_word requires level >= 1");
    Stack* cur = &s;
    while (cur->level > 1) cur = &cur->items.back();
    return cur;
}

}  // namespace

Stack push_word(const std::string& word, const Stack& s) {
    Stack out = s;
    Stack* one = topmost_1stack(out);
    for (char c : word) one->items.push_back(Stack::symbol(c));
    return out;
}

std::optional<Stack> pop_word(const std::string& word, const Stack& s) {
    Stack out = s;
    Stack* one = topmost_1stack(out);
    if (one->items.size() < word.size() + 1) return std::nullopt;
    for (size_t i = 0; i < word.size(); ++i) {
        if (one->items[one->items.size() - word.size() + i].sym != word[i]) return std::nullopt;
    }
    one->items.resize(one->items.size() - word.size());
    return out;
}

}  // namespace hostree
