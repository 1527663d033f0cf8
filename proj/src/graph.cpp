#include "uag/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "uag/error.hpp"

namespace uag {

Graph::Graph(std::size_t n, std::size_t m_hint) : n_(n), m_hint_(m_hint), adj_(n + 1) {}

Graph Graph::from_edges(std::size_t n, const std::vector<Edge>& edges, std::size_t m_hint) {
    Graph g(n, m_hint);
    for (auto [u, v] : edges) g.add_edge(u, v);
    return g;
}

std::span<const Vertex> Graph::neighbors(Vertex v) const {
    check_vertex(v);
    return adj_[v];
}

std::size_t Graph::degree(Vertex v) const {
    check_vertex(v);
    return adj_[v].size();
}

bool Graph::adjacent(Vertex u, Vertex v) const {
    check_vertex(u);
    check_vertex(v);
    const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
    Vertex other = adj_[u].size() <= adj_[v].size() ? v : u;
    return std::binary_search(a.begin(), a.end(), other);
}

void Graph::check_vertex(Vertex v) const {
    if (v < 1 || v > n_)
        throw DomainError("vertex " + std::to_string(v) + " out of range 1.." + std::to_string(n_));
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (Vertex u = 1; u <= n_; ++u)
        for (Vertex v : adj_[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

Vertex Graph::append_vertex(std::span<const Vertex> targets) {
    Vertex nv = static_cast<Vertex>(n_ + 1);
    adj_.emplace_back();
    ++n_;
    auto& mine = adj_[nv];
    mine.assign(targets.begin(), targets.end());
    std::sort(mine.begin(), mine.end());
    if (std::adjacent_find(mine.begin(), mine.end()) != mine.end())
        throw DomainError("append_vertex: repeated target");
    for (Vertex t : mine) {
        if (t < 1 || t >= nv) throw DomainError("append_vertex: target out of range");
        adj_[t].push_back(nv);  // nv is the largest label, order preserved
    }
    edge_count_ += mine.size();
    return nv;
}

void Graph::add_edge(Vertex u, Vertex v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw DomainError("self-loop at " + std::to_string(u));
    auto& a = adj_[u];
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it != a.end() && *it == v)
        throw DomainError("duplicate edge " + std::to_string(u) + " " + std::to_string(v));
    a.insert(it, v);
    auto& b = adj_[v];
    b.insert(std::lower_bound(b.begin(), b.end(), u), u);
    ++edge_count_;
}

Cycle canonical_cycle(std::vector<Vertex> seq) {
    auto k = seq.size();
    auto mn = std::min_element(seq.begin(), seq.end()) - seq.begin();
    std::rotate(seq.begin(), seq.begin() + mn, seq.end());
    if (k > 2 && seq[k - 1] < seq[1]) std::reverse(seq.begin() + 1, seq.end());
    return Cycle{std::move(seq)};
}

Graph complete_graph(std::size_t m) {
    if (m == 0) throw DomainError("complete_graph: m must be positive");
    Graph g(0, m);
    std::vector<Vertex> prev;
    for (std::size_t i = 0; i < m; ++i) {
        g.append_vertex(prev);
        prev.push_back(static_cast<Vertex>(i + 1));
    }
    return g;
}

std::vector<Vertex> sample_subset(std::size_t n, std::size_t m, Rng& rng) {
    if (m > n) throw DomainError("sample_subset: m > n");
    std::vector<Vertex> s;
    s.reserve(m);
    for (std::size_t j = n - m + 1; j <= n; ++j) {
        auto t = static_cast<Vertex>(rng.between(1, j));
        if (std::find(s.begin(), s.end(), t) != s.end())
            s.push_back(static_cast<Vertex>(j));
        else
            s.push_back(t);
    }
    std::sort(s.begin(), s.end());
    return s;
}

Graph attach_step(const Graph& g, std::size_t m, Rng& rng) {
    if (m == 0) throw DomainError("attach_step: m must be positive");
    if (g.order() < m) throw DomainError("attach_step: graph has fewer than m vertices");
    Graph out = g;
    out.append_vertex(sample_subset(g.order(), m, rng));
    return out;
}

GrowthProcess::GrowthProcess(std::size_t m, std::uint64_t seed) : GrowthProcess(m, Rng(seed)) {}

GrowthProcess::GrowthProcess(std::size_t m, Rng rng)
    : GrowthProcess(complete_graph(m), m, rng) {}

GrowthProcess::GrowthProcess(Graph start, std::size_t m, Rng rng)
    : m_(m), rng_(rng), g_(std::move(start)) {
    if (m_ == 0) throw DomainError("GrowthProcess: m must be positive");
    if (g_.order() < m_) throw DomainError("GrowthProcess: start graph smaller than m");
}

std::span<const Vertex> GrowthProcess::step() {
    last_ = sample_subset(g_.order(), m_, rng_);
    g_.append_vertex(last_);
    return last_;
}

void GrowthProcess::grow_to(std::size_t n) {
    while (g_.order() < n) step();
}

Graph generate(const GenParams& p) {
    if (p.m == 0) throw DomainError("generate: m must be positive");
    if (p.n < p.m) throw DomainError("generate: n must be at least m");
    GrowthProcess proc(p.m, p.seed);
    proc.grow_to(p.n);
    return std::move(proc).take();
}

std::size_t degree(const Graph& g, Vertex v) { return g.degree(v); }

std::vector<std::size_t> bfs_distances(const Graph& g, std::span<const Vertex> sources,
                                       std::size_t max_depth) {
    std::vector<std::size_t> dist(g.order() + 1, kInfinity);
    std::vector<Vertex> queue;
    for (Vertex s : sources) {
        g.check_vertex(s);
        if (dist[s] == kInfinity) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        Vertex v = queue[head];
        if (dist[v] >= max_depth) continue;
        for (Vertex w : g.neighbors(v))
            if (dist[w] == kInfinity) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
    }
    return dist;
}

std::size_t distance(const Graph& g, Vertex u, Vertex v) {
    g.check_vertex(u);
    g.check_vertex(v);
    if (u == v) return 0;
    LocalBfs bfs(g);
    bfs.run(u, kInfinity);
    return bfs.dist(v);
}

std::size_t set_distance(const Graph& g, const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
    if (a.empty() || b.empty()) throw DomainError("set_distance: empty vertex set");
    for (Vertex v : b) g.check_vertex(v);
    auto dist = bfs_distances(g, a);
    std::size_t best = kInfinity;
    for (Vertex v : b) best = std::min(best, dist[v]);
    return best;
}

Vertex Subgraph::local(Vertex host) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), host);
    if (it == labels.end() || *it != host) return 0;
    return static_cast<Vertex>(it - labels.begin() + 1);
}

Subgraph induced_subgraph(const Graph& g, std::vector<Vertex> vertices) {
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    Subgraph s;
    s.labels = std::move(vertices);
    s.graph = Graph(s.labels.size(), g.m_hint());
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
        Vertex u = s.labels[i];
        g.check_vertex(u);
        for (Vertex w : g.neighbors(u)) {
            if (w <= u) continue;
            Vertex lw = s.local(w);
            if (lw) s.graph.add_edge(static_cast<Vertex>(i + 1), lw);
        }
    }
    return s;
}

Subgraph ball(const Graph& g, Vertex center, std::size_t radius) {
    g.check_vertex(center);
    LocalBfs bfs(g);
    auto reached = bfs.run(center, radius);
    return induced_subgraph(g, reached);
}

std::vector<Cycle> cycles_up_to(const Graph& g, std::size_t a, std::size_t max_cycles) {
    if (a < 3) throw DomainError("cycles_up_to: a must be at least 3");
    std::vector<Cycle> out;
    std::size_t n = g.order();
    std::size_t half = a / 2;
    LocalBfs bfs(g);
    std::vector<Vertex> path;
    std::vector<char> on_path(n + 1, 0);
    for (Vertex s = 1; s <= n; ++s) {
        // every vertex of a cycle through s of length <= a is within a/2 of s
        bfs.run(s, half, [s](Vertex v) { return v >= s; });
        path.assign(1, s);
        on_path[s] = 1;
        auto dfs = [&](auto&& self) -> void {
            Vertex v = path.back();
            std::size_t len = path.size() - 1;
            for (Vertex w : g.neighbors(v)) {
                if (w < s) continue;
                if (w == s) {
                    if (len + 1 >= 3 && path[1] < path.back()) {
                        if (out.size() >= max_cycles)
                            throw ResourceLimit("more than " + std::to_string(max_cycles) + " cycles of length <= " +
                                                std::to_string(a));
                        out.push_back(Cycle{path});
                    }
                    continue;
                }
                if (on_path[w] || !bfs.reached(w)) continue;
                if (len + 1 + bfs.dist(w) > a) continue;
                path.push_back(w);
                on_path[w] = 1;
                self(self);
                on_path[w] = 0;
                path.pop_back();
            }
        };
        dfs(dfs);
        on_path[s] = 0;
    }
    std::sort(out.begin(), out.end());
    return out;
}

void write_graph(std::ostream& out, const Graph& g) {
    out << g.order() << ' ' << g.m_hint() << '\n';
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

Graph read_graph(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&](std::string& l) {
        while (std::getline(in, l)) {
            ++lineno;
            if (l.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line(line)) throw DomainError("graph file: missing header");
    std::istringstream hs(line);
    long long n = -1, mh = -1;
    if (!(hs >> n >> mh) || n < 0 || mh < 0) throw DomainError("graph file: bad header on line 1");
    Graph g(static_cast<std::size_t>(n), static_cast<std::size_t>(mh));
    while (next_line(line)) {
        std::istringstream ls(line);
        long long u = 0, v = 0;
        std::string extra;
        if (!(ls >> u >> v) || (ls >> extra))
            throw DomainError("graph file: malformed edge on line " + std::to_string(lineno));
        if (u < 1 || v > n || u >= v)
            throw DomainError("graph file: edge must satisfy 1 <= u < v <= n on line " +
                              std::to_string(lineno));
        g.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    return g;
}

void save_graph(const std::string& path, const Graph& g) {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot open " + path + " for writing");
    write_graph(f, g);
    if (!f) throw DomainError("write failed: " + path);
}

Graph load_graph(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot open " + path);
    return read_graph(f);
}

LocalBfs::LocalBfs(const Graph& g)
    : g_(&g), stamp_(g.order() + 1, 0), dist_(g.order() + 1, 0) {}

} // namespace uag
