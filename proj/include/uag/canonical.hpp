#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "uag/graph.hpp"

namespace uag::canon {

// Rooted tree on local vertices 0..k-1.
class RootedTree {
public:
    RootedTree() = default;
    // parent[root] == -1, exactly one root.
    static RootedTree from_parents(std::vector<int> parent);
    // g must be a tree; local vertex i is host vertex i+1.
    static RootedTree from_graph(const Graph& g, Vertex root);
    static RootedTree perfect(std::size_t arity, std::size_t depth);

    std::size_t size() const { return parent_.size(); }
    int root() const { return root_; }
    int parent(int v) const { return parent_[v]; }
    const std::vector<int>& children(int v) const { return children_[v]; }
    std::size_t depth() const { return depth_; }
    std::size_t level(int v) const { return level_[v]; }
    const std::vector<int>& parents() const { return parent_; }

private:
    void finish();

    std::vector<int> parent_;
    std::vector<std::vector<int>> children_;
    std::vector<std::size_t> level_;
    int root_ = -1;
    std::size_t depth_ = 0;
};

struct CanonCode {
    std::string bytes;
    auto operator<=>(const CanonCode&) const = default;
};

RootedTree subtree(const RootedTree& t, int v);
// The level-by-level trimming: at each vertex keep at most `a` child
// subtrees per isomorphism class, keeping the smallest vertex ids.
RootedTree trim(const RootedTree& t, std::size_t a);
// Plain rooted canonical code (no trimming).
CanonCode tree_code(const RootedTree& t);
// Fused trim + canonization: child classes capped at multiplicity `a`.
CanonCode canon_code(const RootedTree& t, std::size_t a);
bool a_isomorphic(const RootedTree& t1, const RootedTree& t2, std::size_t a);
bool a_trivial(const RootedTree& t, std::size_t a);
// Whether the subtree at v trims to a perfect a-ary tree of the given depth.
bool a_trivial_at(const RootedTree& t, int v, std::size_t a, std::size_t depth);

// Connected graph with exactly one cycle and a root.
class RootedUnicyclic {
public:
    RootedUnicyclic() = default;
    RootedUnicyclic(Graph g, Vertex root);

    const Graph& graph() const { return g_; }
    Vertex root() const { return root_; }
    std::size_t depth() const { return depth_; }
    // Root-to-cycle shortest path, root first, ending at the attachment vertex.
    const std::vector<Vertex>& path() const { return path_; }
    // Cycle starting at the attachment vertex (orientation: smaller second label).
    const std::vector<Vertex>& cycle() const { return cycle_; }
    // Hanging tree T_v for v on the path or the cycle, rooted at v.
    // `labels` maps local ids to host vertices.
    RootedTree hanging(Vertex v, std::vector<Vertex>* labels = nullptr) const;
    std::size_t dist_from_root(Vertex v) const { return dist_[v]; }

private:
    Graph g_;
    Vertex root_ = 0;
    std::size_t depth_ = 0;
    std::vector<Vertex> path_;
    std::vector<Vertex> cycle_;
    std::vector<std::size_t> dist_;
    std::vector<char> spine_;  // on path or cycle
};

RootedUnicyclic trim_unicyclic(const RootedUnicyclic& c, std::size_t a);
CanonCode unicyclic_code(const RootedUnicyclic& c, std::size_t a);
// Root-preserving isomorphism class without trimming.
CanonCode unicyclic_plain_code(const RootedUnicyclic& c);
bool unicyclic_a_isomorphic(const RootedUnicyclic& c1, const RootedUnicyclic& c2, std::size_t a);
bool unicyclic_a_trivial(const RootedUnicyclic& c, std::size_t a);

// Every vertex of S with at least two neighbours inside S has all its
// neighbours in S.
bool is_pendant(const Graph& g, const std::vector<Vertex>& s);

// Tree file: line `k`, then k-1 lines `child parent`; root is vertex 1.
RootedTree read_tree(std::istream& in);
void write_tree(std::ostream& out, const RootedTree& t);

} // namespace uag::canon
