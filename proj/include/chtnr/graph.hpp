#pragma once

// Directed graph with non-negative 32-bit arc weights, stored as forward and
// reverse CSR adjacency. Parallel arcs are collapsed to the minimum weight and
// self-loops are dropped when the graph is built.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "chtnr/io.hpp"
#include "chtnr/types.hpp"

namespace chtnr {

struct InputArc {
    NodeId from = 0;
    NodeId to = 0;
    Weight weight = 0;
};

// Node renumbering: node v of the old graph becomes to_new[v] in the new one.
struct Permutation {
    std::vector<NodeId> to_new;

    size_t size() const { return to_new.size(); }

    static Permutation identity(size_t n) {
        Permutation p;
        p.to_new.resize(n);
        for (size_t v = 0; v < n; ++v) p.to_new[v] = static_cast<NodeId>(v);
        return p;
    }

    void validate(size_t n) const {
        require(to_new.size() == n, "permutation has wrong length");
        std::vector<bool> seen(n, false);
        for (NodeId image : to_new) {
            require(image < n, "permutation image out of range");
            require(!seen[image], "permutation is not a bijection");
            seen[image] = true;
        }
    }

    Permutation inverse() const {
        Permutation inv;
        inv.to_new.assign(to_new.size(), NO_NODE);
        for (size_t v = 0; v < to_new.size(); ++v) inv.to_new[to_new[v]] = static_cast<NodeId>(v);
        return inv;
    }
};

class Graph {
  public:
    Graph() = default;

    // Builds the canonical representation from an arc list: drops self-loops,
    // collapses parallel arcs to the minimum weight, sorts adjacency by head.
    static Graph from_arcs(NodeId node_count, std::vector<InputArc> arcs) {
        for (const InputArc& a : arcs) {
            require(a.from < node_count && a.to < node_count, "arc endpoint out of range");
            require(a.weight < INF_WEIGHT, "arc weight too large");
        }
        std::erase_if(arcs, [](const InputArc& a) { return a.from == a.to; });
        std::sort(arcs.begin(), arcs.end(), [](const InputArc& a, const InputArc& b) {
            if (a.from != b.from) return a.from < b.from;
            if (a.to != b.to) return a.to < b.to;
            return a.weight < b.weight;
        });
        std::vector<InputArc> unique;
        unique.reserve(arcs.size());
        for (const InputArc& a : arcs) {
            if (!unique.empty() && unique.back().from == a.from && unique.back().to == a.to) continue;
            unique.push_back(a);
        }

        Graph g;
        g.n_ = node_count;
        g.build_csr(unique);
        return g;
    }

    NodeId node_count() const { return n_; }
    uint64_t arc_count() const { return head_.size(); }

    // Forward arcs of v: indices [out_begin(v), out_end(v)) into head()/weight().
    uint64_t out_begin(NodeId v) const { return first_out_[v]; }
    uint64_t out_end(NodeId v) const { return first_out_[v + 1]; }
    NodeId head(uint64_t arc) const { return head_[arc]; }
    Weight weight(uint64_t arc) const { return weight_[arc]; }

    // Reverse arcs of v: indices [in_begin(v), in_end(v)) into tail()/in_weight().
    uint64_t in_begin(NodeId v) const { return first_in_[v]; }
    uint64_t in_end(NodeId v) const { return first_in_[v + 1]; }
    NodeId tail(uint64_t arc) const { return tail_[arc]; }
    Weight in_weight(uint64_t arc) const { return in_weight_[arc]; }

    std::vector<InputArc> arcs() const {
        std::vector<InputArc> out;
        out.reserve(head_.size());
        for (NodeId v = 0; v < n_; ++v)
            for (uint64_t a = out_begin(v); a < out_end(v); ++a)
                out.push_back({v, head_[a], weight_[a]});
        return out;
    }

    bool operator==(const Graph& other) const {
        return n_ == other.n_ && first_out_ == other.first_out_ && head_ == other.head_ &&
               weight_ == other.weight_;
    }

    void serialize(std::ostream& out) const {
        BinaryWriter w(out);
        w.magic(kMagic);
        w.u32(kVersion);
        w.u32(n_);
        w.u64(head_.size());
        w.u64_array(first_out_);
        w.u32_array(head_);
        w.u32_array(weight_);
        w.check("graph dump");
    }

    static Graph deserialize(std::istream& in) {
        BinaryReader r(in);
        r.expect_magic(kMagic, "graph");
        r.expect_version(kVersion, "graph");
        Graph g;
        g.n_ = r.u32();
        uint64_t m = r.u64();
        g.first_out_ = r.u64_array();
        g.head_ = r.u32_array();
        g.weight_ = r.u32_array();
        require(g.first_out_.size() == static_cast<size_t>(g.n_) + 1, "graph dump: bad offset array");
        require(g.head_.size() == m && g.weight_.size() == m, "graph dump: bad arc arrays");
        require(g.first_out_.front() == 0 && g.first_out_.back() == m, "graph dump: offsets corrupt");
        for (NodeId v = 0; v < g.n_; ++v)
            require(g.first_out_[v] <= g.first_out_[v + 1], "graph dump: offsets not monotone");
        for (NodeId h : g.head_) require(h < g.n_, "graph dump: head out of range");
        g.build_reverse();
        return g;
    }

  private:
    static constexpr char kMagic[5] = "CTG1";
    static constexpr uint32_t kVersion = 1;

    void build_csr(const std::vector<InputArc>& sorted_arcs) {
        first_out_.assign(static_cast<size_t>(n_) + 1, 0);
        head_.reserve(sorted_arcs.size());
        weight_.reserve(sorted_arcs.size());
        for (const InputArc& a : sorted_arcs) {
            ++first_out_[a.from + 1];
            head_.push_back(a.to);
            weight_.push_back(a.weight);
        }
        for (size_t v = 0; v < n_; ++v) first_out_[v + 1] += first_out_[v];
        build_reverse();
    }

    void build_reverse() {
        first_in_.assign(static_cast<size_t>(n_) + 1, 0);
        tail_.assign(head_.size(), 0);
        in_weight_.assign(head_.size(), 0);
        for (NodeId h : head_) ++first_in_[h + 1];
        for (size_t v = 0; v < n_; ++v) first_in_[v + 1] += first_in_[v];
        std::vector<uint64_t> next(first_in_.begin(), first_in_.end() - 1);
        for (NodeId v = 0; v < n_; ++v) {
            for (uint64_t a = out_begin(v); a < out_end(v); ++a) {
                uint64_t slot = next[head_[a]]++;
                tail_[slot] = v;
                in_weight_[slot] = weight_[a];
            }
        }
    }

    NodeId n_ = 0;
    std::vector<uint64_t> first_out_;
    std::vector<NodeId> head_;
    std::vector<Weight> weight_;
    std::vector<uint64_t> first_in_;
    std::vector<NodeId> tail_;
    std::vector<Weight> in_weight_;
};

// Parses the DIMACS shortest-path format: comment lines `c ...`, one header
// `p sp <n> <m>`, and m arc lines `a <u> <v> <w>` with 1-based endpoints.
inline Graph parse_dimacs(std::istream& in) {
    std::string line;
    uint64_t line_no = 0;
    bool have_header = false;
    uint64_t n = 0, m = 0;
    std::vector<InputArc> arcs;

    auto fail = [&](const std::string& msg) {
        throw Error("dimacs line " + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == 'c' || line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream ls(line);
        char kind = 0;
        ls >> kind;
        if (kind == 'p') {
            if (have_header) fail("duplicate header");
            std::string sp;
            ls >> sp >> n >> m;
            if (!ls || sp != "sp") fail("malformed header (expected 'p sp <n> <m>')");
            if (n == 0 || n >= NO_NODE) fail("node count out of range");
            have_header = true;
            arcs.reserve(m);
        } else if (kind == 'a') {
            if (!have_header) fail("arc line before 'p sp' header");
            int64_t u = 0, v = 0, w = 0;
            ls >> u >> v >> w;
            if (!ls) fail("malformed arc line (expected 'a <u> <v> <w>')");
            if (u < 1 || static_cast<uint64_t>(u) > n || v < 1 || static_cast<uint64_t>(v) > n)
                fail("arc endpoint out of range [1, n]");
            if (w < 0) fail("negative arc weight");
            if (static_cast<uint64_t>(w) >= INF_WEIGHT) fail("arc weight too large");
            if (arcs.size() == m) fail("more arc lines than the header announced");
            arcs.push_back({static_cast<NodeId>(u - 1), static_cast<NodeId>(v - 1),
                            static_cast<Weight>(w)});
        } else {
            fail(std::string("unknown line kind '") + kind + "'");
        }
    }
    require(have_header, "dimacs: missing 'p sp' header");
    require(arcs.size() == m,
            "dimacs: header announced " + std::to_string(m) + " arcs but file has " +
                std::to_string(arcs.size()));
    return Graph::from_arcs(static_cast<NodeId>(n), std::move(arcs));
}

// Renumbers all nodes: node v becomes p.to_new[v]. Shortest-path distances are
// preserved up to the renaming.
inline Graph apply_permutation(const Graph& g, const Permutation& p) {
    p.validate(g.node_count());
    std::vector<InputArc> arcs = g.arcs();
    for (InputArc& a : arcs) {
        a.from = p.to_new[a.from];
        a.to = p.to_new[a.to];
    }
    return Graph::from_arcs(g.node_count(), std::move(arcs));
}

// Strongly connected components via iterative Tarjan. Returns one component id
// per node; ids are dense in [0, component_count).
struct SccResult {
    std::vector<uint32_t> component;
    uint32_t component_count = 0;

    bool strongly_connected() const { return component_count <= 1; }
};

inline SccResult check_strong_connectivity(const Graph& g) {
    const NodeId n = g.node_count();
    constexpr uint32_t UNSET = UINT32_MAX;
    std::vector<uint32_t> index(n, UNSET), lowlink(n, 0), comp(n, UNSET);
    std::vector<bool> on_stack(n, false);
    std::vector<NodeId> stack;
    uint32_t next_index = 0, comp_count = 0;

    struct Frame {
        NodeId v;
        uint64_t arc;
    };
    std::vector<Frame> frames;

    for (NodeId root = 0; root < n; ++root) {
        if (index[root] != UNSET) continue;
        frames.push_back({root, g.out_begin(root)});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.arc < g.out_end(f.v)) {
                NodeId w = g.head(f.arc++);
                if (index[w] == UNSET) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, g.out_begin(w)});
                } else if (on_stack[w]) {
                    lowlink[f.v] = std::min(lowlink[f.v], index[w]);
                }
            } else {
                NodeId v = f.v;
                frames.pop_back();
                if (!frames.empty())
                    lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
                if (lowlink[v] == index[v]) {
                    while (true) {
                        NodeId w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if (w == v) break;
                    }
                    ++comp_count;
                }
            }
        }
    }
    return {std::move(comp), comp_count};
}

} // namespace chtnr
