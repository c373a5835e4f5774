#include "hostree/dfa.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace hostree {

std::string tok_name(Tok t) {
    if (tok_is_sym(t)) return std::string(1, static_cast<char>(t));
    int level = (t - 256) / 2 + 1;
    return ((t - 256) % 2 == 0 ? "[" : "]") + std::to_string(level);
}

std::vector<Tok> token_universe(const std::string& alphabet, int level) {
    std::vector<Tok> toks;
    for (char c : alphabet) toks.push_back(tok_sym(c));
    for (int k = 1; k <= level; ++k) {
        toks.push_back(tok_open(k));
        toks.push_back(tok_close(k));
    }
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    return toks;
}

Dfa Dfa::reject_all(std::vector<Tok> tokens) {
    Dfa d;
    d.nstates = 1;
    d.start = 0;
    d.accepting = {0};
    d.tokens = std::move(tokens);
    return d;
}

Dfa Dfa::accept_all(std::vector<Tok> tokens) {
    Dfa d;
    d.nstates = 1;
    d.start = 0;
    d.accepting = {1};
    for (Tok t : tokens) d.trans[{0, t}] = 0;
    d.tokens = std::move(tokens);
    return d;
}

bool Dfa::empty_language() const {
    std::vector<char> seen(nstates, 0);
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
        int s = q.front();
        q.pop();
        if (accepting[s]) return false;
        for (Tok t : tokens) {
            int n = step(s, t);
            if (n >= 0 && !seen[n]) {
                seen[n] = 1;
                q.push(n);
            }
        }
    }
    return true;
}

Dfa Dfa::completed() const {
    Dfa d = *this;
    bool need_dead = false;
    for (int s = 0; s < nstates; ++s)
        for (Tok t : tokens)
            if (step(s, t) < 0) need_dead = true;
    if (!need_dead) return d;
    int dead = d.nstates++;
    d.accepting.push_back(0);
    for (int s = 0; s < d.nstates; ++s)
        for (Tok t : d.tokens)
            if (d.trans.find({s, t}) == d.trans.end()) d.trans[{s, t}] = dead;
    return d;
}

Dfa Dfa::complemented() const {
    Dfa d = completed();
    for (auto& a : d.accepting) a = !a;
    return d;
}

Dfa Dfa::product(const Dfa& a, const Dfa& b, bool conjunction) {
    std::vector<Tok> toks = a.tokens;
    for (Tok t : b.tokens) toks.push_back(t);
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());

    Dfa ac = a;
    ac.tokens = toks;
    ac = ac.completed();
    Dfa bc = b;
    bc.tokens = toks;
    bc = bc.completed();

    Dfa out;
    out.tokens = toks;
    std::map<std::pair<int, int>, int> id;
    std::vector<std::pair<int, int>> order;
    auto intern = [&](int x, int y) {
        auto it = id.find({x, y});
        if (it != id.end()) return it->second;
        int i = static_cast<int>(order.size());
        id[{x, y}] = i;
        order.push_back({x, y});
        return i;
    };
    out.start = intern(ac.start, bc.start);
    for (size_t i = 0; i < order.size(); ++i) {
        auto [x, y] = order[i];
        for (Tok t : toks) {
            int nx = ac.step(x, t), ny = bc.step(y, t);
            if (nx < 0 || ny < 0) continue;
            int j = intern(nx, ny);
            out.trans[{static_cast<int>(i), t}] = j;
        }
    }
    out.nstates = static_cast<int>(order.size());
    out.accepting.resize(out.nstates, 0);
    for (int i = 0; i < out.nstates; ++i) {
        auto [x, y] = order[i];
        bool acc = conjunction ? (ac.accepting[x] && bc.accepting[y])
                               : (ac.accepting[x] || bc.accepting[y]);
        out.accepting[i] = acc;
    }
    return out;
}

namespace {

// Trim to reachable states, then Moore partition refinement on the completed
// transition table.
Dfa minimize_impl(const Dfa& in) {
    Dfa d = in.completed();
    std::vector<int> reach;
    std::vector<int> idx(d.nstates, -1);
    reach.push_back(d.start);
    idx[d.start] = 0;
    for (size_t i = 0; i < reach.size(); ++i)
        for (Tok t : d.tokens) {
            int n = d.step(reach[i], t);
            if (n >= 0 && idx[n] < 0) {
                idx[n] = static_cast<int>(reach.size());
                reach.push_back(n);
            }
        }
    int m = static_cast<int>(reach.size());
    std::vector<int> cls(m);
    for (int i = 0; i < m; ++i) cls[i] = d.accepting[reach[i]] ? 1 : 0;
    for (;;) {
        std::map<std::vector<int>, int> sig_id;
        std::vector<int> next(m);
        for (int i = 0; i < m; ++i) {
            std::vector<int> sig;
            sig.push_back(cls[i]);
            for (Tok t : d.tokens) {
                int n = d.step(reach[i], t);
                sig.push_back(n < 0 ? -1 : cls[idx[n]]);
            }
            auto it = sig_id.find(sig);
            if (it == sig_id.end()) it = sig_id.insert({sig, static_cast<int>(sig_id.size())}).first;
            next[i] = it->second;
        }
        if (next == cls) break;
        cls = next;
    }
    int nc = *std::max_element(cls.begin(), cls.end()) + 1;
    Dfa out;
    out.tokens = d.tokens;
    out.nstates = nc;
    out.start = cls[0];
    out.accepting.resize(nc, 0);
    for (int i = 0; i < m; ++i) {
        if (d.accepting[reach[i]]) out.accepting[cls[i]] = 1;
        for (Tok t : d.tokens) {
            int n = d.step(reach[i], t);
            if (n >= 0) out.trans[{cls[i], t}] = cls[idx[n]];
        }
    }
    return out;
}

}  // namespace

Dfa Dfa::minimized() const { return minimize_impl(*this); }

std::string Dfa::canonical_key() const {
    Dfa m = minimized();
    // BFS renumbering from the start over sorted tokens gives a canonical form.
    std::vector<int> order(m.nstates, -1);
    std::vector<int> bfs;
    bfs.push_back(m.start);
    order[m.start] = 0;
    for (size_t i = 0; i < bfs.size(); ++i)
        for (Tok t : m.tokens) {
            int n = m.step(bfs[i], t);
            if (n >= 0 && order[n] < 0) {
                order[n] = static_cast<int>(bfs.size());
                bfs.push_back(n);
            }
        }
    std::ostringstream os;
    os << bfs.size() << ";";
    for (size_t i = 0; i < bfs.size(); ++i) {
        os << (m.accepting[bfs[i]] ? 'F' : '.');
        for (Tok t : m.tokens) {
            int n = m.step(bfs[i], t);
            if (n >= 0 && order[n] >= 0) os << " " << t << ">" << order[n];
        }
        os << ";";
    }
    return os.str();
}

Dfa Nfa::determinize(const std::vector<Tok>& universe) const {
    std::vector<std::vector<std::pair<std::optional<Tok>, int>>> out(nstates);
    for (const Tr& t : trans) out[t.from].push_back({t.tok, t.to});
    auto eclose = [&](std::set<int> s) {
        std::vector<int> work(s.begin(), s.end());
        while (!work.empty()) {
            int x = work.back();
            work.pop_back();
            for (auto& [tok, to] : out[x])
                if (!tok && !s.count(to)) {
                    s.insert(to);
                    work.push_back(to);
                }
        }
        return s;
    };
    std::map<std::set<int>, int> id;
    std::vector<std::set<int>> order;
    auto intern = [&](const std::set<int>& s) {
        auto it = id.find(s);
        if (it != id.end()) return it->second;
        int i = static_cast<int>(order.size());
        id[s] = i;
        order.push_back(s);
        return i;
    };
    Dfa d;
    d.tokens = universe;
    std::set<int> s0(starts.begin(), starts.end());
    d.start = intern(eclose(s0));
    for (size_t i = 0; i < order.size(); ++i) {
        for (Tok t : universe) {
            std::set<int> nxt;
            for (int x : order[i])
                for (auto& [tok, to] : out[x])
                    if (tok && *tok == t) nxt.insert(to);
            if (nxt.empty()) continue;
            d.trans[{static_cast<int>(i), t}] = intern(eclose(nxt));
        }
    }
    d.nstates = static_cast<int>(order.size());
    d.accepting.resize(d.nstates, 0);
    std::set<int> fin(finals.begin(), finals.end());
    for (int i = 0; i < d.nstates; ++i)
        for (int x : order[i])
            if (fin.count(x)) d.accepting[i] = 1;
    return d;
}

Nfa Nfa::reversed() const {
    Nfa r;
    r.nstates = nstates;
    r.starts = finals;
    r.finals = starts;
    for (const Tr& t : trans) r.trans.push_back({t.to, t.tok, t.from});
    return r;
}

}  // namespace hostree
