#include "uag/canonical.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "uag/error.hpp"

namespace uag::canon {

RootedTree RootedTree::from_parents(std::vector<int> parent) {
    RootedTree t;
    t.parent_ = std::move(parent);
    t.finish();
    return t;
}

void RootedTree::finish() {
    const int k = static_cast<int>(parent_.size());
    if (k == 0) throw DomainError("rooted tree needs at least one vertex");
    children_.assign(k, {});
    root_ = -1;
    for (int v = 0; v < k; ++v) {
        int p = parent_[v];
        if (p == -1) {
            if (root_ != -1) throw DomainError("rooted tree has two roots");
            root_ = v;
        } else if (p < 0 || p >= k || p == v) {
            throw DomainError("rooted tree: bad parent link");
        } else {
            children_[p].push_back(v);
        }
    }
    if (root_ == -1) throw DomainError("rooted tree has no root");
    level_.assign(k, 0);
    std::vector<int> order{root_};
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int c : children_[order[i]]) {
            level_[c] = level_[order[i]] + 1;
            order.push_back(c);
        }
    if (static_cast<int>(order.size()) != k) throw DomainError("rooted tree is not connected");
    depth_ = *std::max_element(level_.begin(), level_.end());
}

RootedTree RootedTree::from_graph(const Graph& g, Vertex root) {
    g.check_vertex(root);
    if (g.size() + 1 != g.order()) throw DomainError("graph is not a tree");
    std::vector<int> parent(g.order(), -2);
    parent[root - 1] = -1;
    std::vector<Vertex> queue{root};
    for (std::size_t i = 0; i < queue.size(); ++i)
        for (Vertex w : g.neighbors(queue[i]))
            if (parent[w - 1] == -2) {
                parent[w - 1] = static_cast<int>(queue[i]) - 1;
                queue.push_back(w);
            }
    if (queue.size() != g.order()) throw DomainError("graph is not a tree");
    return from_parents(std::move(parent));
}

RootedTree RootedTree::perfect(std::size_t arity, std::size_t depth) {
    std::vector<int> parent{-1};
    std::size_t begin = 0, end = 1;
    for (std::size_t d = 0; d < depth; ++d) {
        for (std::size_t v = begin; v < end; ++v)
            for (std::size_t j = 0; j < arity; ++j) parent.push_back(static_cast<int>(v));
        begin = end;
        end = parent.size();
    }
    return from_parents(std::move(parent));
}

namespace {

// Vertices in BFS order from the root (parents before children).
std::vector<int> bfs_order(const RootedTree& t, int from) {
    std::vector<int> order{from};
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int c : t.children(order[i])) order.push_back(c);
    return order;
}

RootedTree relabel(const RootedTree& t, const std::vector<int>& order) {
    std::vector<int> local(t.size(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) local[order[i]] = static_cast<int>(i);
    std::vector<int> parent(order.size(), -1);
    for (std::size_t i = 1; i < order.size(); ++i) parent[i] = local[t.parent(order[i])];
    return RootedTree::from_parents(std::move(parent));
}

void check(const RootedTree& t, int v) {
    if (v < 0 || static_cast<std::size_t>(v) >= t.size()) throw DomainError("vertex not in tree");
}

std::string wrap(std::vector<std::string>& parts, std::size_t cap) {
    std::sort(parts.begin(), parts.end());
    std::string out = "(";
    for (std::size_t i = 0; i < parts.size();) {
        std::size_t j = i;
        while (j < parts.size() && parts[j] == parts[i]) ++j;
        for (std::size_t c = 0; c < std::min(j - i, cap); ++c) out += parts[i];
        i = j;
    }
    out += ')';
    return out;
}

// Bottom-up codes with child classes capped at `cap` (no cap: SIZE_MAX).
std::vector<std::string> codes(const RootedTree& t, std::size_t cap) {
    std::vector<int> order = bfs_order(t, t.root());
    std::vector<std::string> code(t.size());
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        std::vector<std::string> parts;
        for (int c : t.children(*it)) parts.push_back(std::move(code[c]));
        code[*it] = wrap(parts, cap);
    }
    return code;
}

// Keep mask of the trimming procedure, run level by level from the bottom.
std::vector<char> trim_mask(const RootedTree& t, std::size_t a) {
    if (a == 0) throw DomainError("trim needs a >= 1");
    std::vector<char> keep(t.size(), 1);
    std::vector<std::string> code(t.size());
    std::vector<std::vector<int>> by_level(t.depth() + 1);
    for (std::size_t v = 0; v < t.size(); ++v) by_level[t.level(static_cast<int>(v))].push_back(static_cast<int>(v));
    for (std::size_t lv = t.depth() + 1; lv-- > 0;) {
        for (int v : by_level[lv]) {
            // Children are already trimmed; group them by class, ids ascending.
            std::vector<std::pair<std::string, int>> kids;
            for (int c : t.children(v)) kids.emplace_back(code[c], c);
            std::sort(kids.begin(), kids.end());
            std::vector<std::string> parts;
            for (std::size_t i = 0; i < kids.size();) {
                std::size_t j = i;
                while (j < kids.size() && kids[j].first == kids[i].first) ++j;
                for (std::size_t c = i; c < j; ++c) {
                    if (c - i < a) parts.push_back(kids[c].first);
                    else keep[kids[c].second] = 0;
                }
                i = j;
            }
            code[v] = wrap(parts, static_cast<std::size_t>(-1));
        }
    }
    // Drop descendants of removed vertices.
    for (int v : bfs_order(t, t.root()))
        if (v != t.root() && !keep[t.parent(v)]) keep[v] = 0;
    return keep;
}

RootedTree restrict(const RootedTree& t, const std::vector<char>& keep) {
    std::vector<int> order;
    for (int v : bfs_order(t, t.root()))
        if (keep[v]) order.push_back(v);
    return relabel(t, order);
}

} // namespace

RootedTree subtree(const RootedTree& t, int v) {
    check(t, v);
    return relabel(t, bfs_order(t, v));
}

RootedTree trim(const RootedTree& t, std::size_t a) { return restrict(t, trim_mask(t, a)); }

CanonCode tree_code(const RootedTree& t) { return {codes(t, static_cast<std::size_t>(-1))[t.root()]}; }

CanonCode canon_code(const RootedTree& t, std::size_t a) {
    if (a == 0) throw DomainError("canon_code needs a >= 1");
    return {codes(t, a)[t.root()]};
}

bool a_isomorphic(const RootedTree& t1, const RootedTree& t2, std::size_t a) {
    return t1.depth() == t2.depth() && canon_code(t1, a) == canon_code(t2, a);
}

bool a_trivial_at(const RootedTree& t, int v, std::size_t a, std::size_t depth) {
    check(t, v);
    const auto& kids = t.children(v);
    if (depth == 0) return kids.empty();
    if (kids.size() < a) return false;
    for (int c : kids)
        if (!a_trivial_at(t, c, a, depth - 1)) return false;
    return true;
}

bool a_trivial(const RootedTree& t, std::size_t a) {
    if (a == 0) throw DomainError("a_trivial needs a >= 1");
    return a_trivial_at(t, t.root(), a, t.depth());
}

RootedUnicyclic::RootedUnicyclic(Graph g, Vertex root) : g_(std::move(g)), root_(root) {
    g_.check_vertex(root_);
    const std::size_t n = g_.order();
    dist_ = bfs_distances(g_, std::span<const Vertex>(&root_, 1));
    for (Vertex v = 1; v <= n; ++v)
        if (dist_[v] == kInfinity) throw DomainError("unicyclic graph is not connected");
    if (g_.size() != n) throw DomainError("graph does not have exactly one cycle");
    depth_ = *std::max_element(dist_.begin() + 1, dist_.end());

    // Peel leaves; what remains is the cycle.
    std::vector<std::size_t> deg(n + 1);
    std::vector<Vertex> stack;
    std::vector<char> on_cycle(n + 1, 1);
    on_cycle[0] = 0;
    for (Vertex v = 1; v <= n; ++v)
        if ((deg[v] = g_.degree(v)) <= 1) stack.push_back(v);
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        on_cycle[v] = 0;
        for (Vertex w : g_.neighbors(v))
            if (on_cycle[w] && --deg[w] == 1) stack.push_back(w);
    }

    // Root-to-cycle path: walk back from the nearest cycle vertex.
    Vertex attach = 0;
    for (Vertex v = 1; v <= n; ++v)
        if (on_cycle[v] && (attach == 0 || dist_[v] < dist_[attach])) attach = v;
    for (Vertex v = attach; v != root_;) {
        path_.push_back(v);
        for (Vertex w : g_.neighbors(v))
            if (dist_[w] + 1 == dist_[v]) {
                v = w;
                break;
            }
    }
    path_.push_back(root_);
    std::reverse(path_.begin(), path_.end());

    cycle_.push_back(attach);
    Vertex prev = 0, cur = attach;
    for (;;) {
        Vertex next = 0;
        for (Vertex w : g_.neighbors(cur))
            if (on_cycle[w] && w != prev) {
                next = w;
                break;
            }
        if (next == attach) break;
        cycle_.push_back(next);
        prev = cur;
        cur = next;
    }
    if (cycle_.size() > 2 && cycle_.back() < cycle_[1]) std::reverse(cycle_.begin() + 1, cycle_.end());

    spine_.assign(n + 1, 0);
    for (Vertex v : path_) spine_[v] = 1;
    for (Vertex v : cycle_) spine_[v] = 1;
}

RootedTree RootedUnicyclic::hanging(Vertex v, std::vector<Vertex>* labels) const {
    g_.check_vertex(v);
    if (!spine_[v]) throw DomainError("vertex is not on the cycle or the root path");
    std::vector<Vertex> order{v};
    std::vector<int> parent{-1};
    std::vector<int> local(g_.order() + 1, -1);
    local[v] = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (Vertex w : g_.neighbors(order[i]))
            if (!spine_[w] && local[w] == -1) {
                local[w] = static_cast<int>(order.size());
                order.push_back(w);
                parent.push_back(static_cast<int>(i));
            }
    if (labels) *labels = order;
    return RootedTree::from_parents(std::move(parent));
}

namespace {

std::vector<Vertex> spine(const RootedUnicyclic& c) {
    std::vector<Vertex> s(c.path().begin(), c.path().end() - 1);
    s.insert(s.end(), c.cycle().begin(), c.cycle().end());
    return s;
}

CanonCode unicyclic_code_capped(const RootedUnicyclic& c, std::size_t cap) {
    auto code_of = [&](Vertex v) { return codes(c.hanging(v), cap)[0]; };
    std::string out = "[";
    for (std::size_t i = 0; i + 1 < c.path().size(); ++i) out += code_of(c.path()[i]);
    out += "][";
    std::vector<std::string> cyc;
    for (Vertex v : c.cycle()) cyc.push_back(code_of(v));
    std::string fwd, bwd = cyc[0];
    for (const auto& s : cyc) fwd += s;
    for (std::size_t i = cyc.size(); i-- > 1;) bwd += cyc[i];
    out += std::min(fwd, bwd);
    out += ']';
    return {out};
}

} // namespace

RootedUnicyclic trim_unicyclic(const RootedUnicyclic& c, std::size_t a) {
    std::vector<Vertex> kept;
    for (Vertex v : spine(c)) {
        std::vector<Vertex> labels;
        RootedTree t = c.hanging(v, &labels);
        std::vector<char> keep = trim_mask(t, a);
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (keep[i]) kept.push_back(labels[i]);
    }
    Subgraph sub = induced_subgraph(c.graph(), std::move(kept));
    Vertex root = sub.local(c.root());
    return RootedUnicyclic(std::move(sub.graph), root);
}

CanonCode unicyclic_code(const RootedUnicyclic& c, std::size_t a) {
    if (a == 0) throw DomainError("unicyclic_code needs a >= 1");
    return unicyclic_code_capped(c, a);
}

CanonCode unicyclic_plain_code(const RootedUnicyclic& c) {
    return unicyclic_code_capped(c, static_cast<std::size_t>(-1));
}

bool unicyclic_a_isomorphic(const RootedUnicyclic& c1, const RootedUnicyclic& c2, std::size_t a) {
    return c1.depth() == c2.depth() && unicyclic_code(c1, a) == unicyclic_code(c2, a);
}

bool unicyclic_a_trivial(const RootedUnicyclic& c, std::size_t a) {
    if (a == 0) throw DomainError("unicyclic_a_trivial needs a >= 1");
    for (Vertex v : spine(c)) {
        RootedTree t = c.hanging(v);
        if (!a_trivial_at(t, 0, a, c.depth() - c.dist_from_root(v))) return false;
    }
    return true;
}

bool is_pendant(const Graph& g, const std::vector<Vertex>& s) {
    std::vector<char> in(g.order() + 1, 0);
    for (Vertex v : s) {
        g.check_vertex(v);
        in[v] = 1;
    }
    for (Vertex v : s) {
        std::size_t inside = 0, outside = 0;
        for (Vertex w : g.neighbors(v)) (in[w] ? inside : outside)++;
        if (inside >= 2 && outside > 0) return false;
    }
    return true;
}

RootedTree read_tree(std::istream& in) {
    std::string line;
    std::size_t k = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        if (ls >> k) break;
    }
    if (k == 0) throw DomainError("tree file: missing vertex count");
    std::vector<int> parent(k, -2);
    parent[0] = -1;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        long long child = 0, par = 0;
        if (!(in >> child >> par)) throw DomainError("tree file: expected k-1 'child parent' lines");
        if (child < 2 || par < 1 || child > static_cast<long long>(k) || par > static_cast<long long>(k))
            throw DomainError("tree file: vertex out of range");
        if (parent[child - 1] != -2) throw DomainError("tree file: vertex has two parents");
        parent[child - 1] = static_cast<int>(par - 1);
    }
    return RootedTree::from_parents(std::move(parent));
}

void write_tree(std::ostream& out, const RootedTree& t) {
    RootedTree r = relabel(t, bfs_order(t, t.root()));
    out << r.size() << '\n';
    for (std::size_t v = 1; v < r.size(); ++v) out << v + 1 << ' ' << r.parent(static_cast<int>(v)) + 1 << '\n';
}

} // namespace uag::canon
