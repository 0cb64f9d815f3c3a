#include "convarb/treeoracle.hpp"

#include "convarb/error.hpp"

#include <algorithm>
#include <unordered_map>

namespace convarb {

MarketTree::MarketTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    const std::size_t n = nodes_.size();
    if (n == 0) throw DomainError("tree has no nodes");
    std::unordered_map<std::int64_t, std::size_t> pos;
    for (std::size_t k = 0; k < n; ++k) {
        nodes_[k].prob.canonicalize();
        nodes_[k].X.canonicalize();
        nodes_[k].Y.canonicalize();
        if (!pos.emplace(nodes_[k].id, k).second) throw DomainError("duplicate node id " + std::to_string(nodes_[k].id));
    }
    children_.assign(n, {});
    parent_pos_.assign(n, std::nullopt);
    std::optional<std::size_t> root;
    for (std::size_t k = 0; k < n; ++k) {
        const TreeNode& nd = nodes_[k];
        const std::string where = "node " + std::to_string(nd.id);
        if (nd.X < 0 || nd.Y < 0) throw DomainError(where + ": negative price");
        if (!nd.parent) {
            if (root) throw DomainError("tree has more than one root");
            if (nd.t != 0) throw DomainError(where + ": root must have t = 0");
            root = k;
            continue;
        }
        auto it = pos.find(*nd.parent);
        if (it == pos.end()) throw DomainError(where + ": unknown parent " + std::to_string(*nd.parent));
        if (nd.t != nodes_[it->second].t + 1) throw DomainError(where + ": t must be the parent's t + 1");
        if (!(nd.prob > 0) || nd.prob > 1) throw DomainError(where + ": branch probability must lie in (0, 1]");
        children_[it->second].push_back(k);
        parent_pos_[k] = it->second;
    }
    if (!root) throw DomainError("tree has no root");
    root_ = *root;
    for (std::size_t k = 0; k < n; ++k) {
        if (children_[k].empty()) {
            atoms_.push_back(k);
            continue;
        }
        mpq_class total = 0;
        for (std::size_t c : children_[k]) total += nodes_[c].prob;
        if (total != 1) {
            throw DomainError("node " + std::to_string(nodes_[k].id) + ": children probabilities sum to " +
                              total.get_str());
        }
    }
    for (const auto& nd : nodes_) depth_ = std::max(depth_, nd.t);
    // Every node reaches the root because t strictly decreases along parents.
}

std::vector<std::size_t> MarketTree::path_to(std::size_t k) const {
    std::vector<std::size_t> out{k};
    while (parent_pos_[out.back()]) out.push_back(*parent_pos_[out.back()]);
    std::reverse(out.begin(), out.end());
    return out;
}

namespace {

// Dense tableau for max c^T x, A x <= b, x >= 0 with b >= 0, started from the
// slack basis; Bland's rule.
struct Simplex {
    std::size_t rows, cols;  // cols counts structural + slack variables
    std::vector<std::vector<mpq_class>> a;
    std::vector<mpq_class> rhs;
    std::vector<mpq_class> obj;  // reduced costs z_j - c_j
    mpq_class value = 0;
    std::vector<std::size_t> basis;

    Simplex(const std::vector<std::vector<mpq_class>>& A, const std::vector<mpq_class>& b,
            const std::vector<mpq_class>& c)
        : rows(A.size()), cols(c.size() + A.size()), a(rows, std::vector<mpq_class>(cols)), rhs(b), obj(cols),
          basis(rows) {
        const std::size_t nx = c.size();
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < nx; ++j) a[i][j] = A[i][j];
            a[i][nx + i] = 1;
            basis[i] = nx + i;
        }
        for (std::size_t j = 0; j < nx; ++j) obj[j] = -c[j];
    }

    void run() {
        for (;;) {
            std::size_t enter = cols;
            for (std::size_t j = 0; j < cols; ++j) {
                if (sgn(obj[j]) < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols) return;
            std::size_t leave = rows;
            mpq_class best;
            for (std::size_t i = 0; i < rows; ++i) {
                if (sgn(a[i][enter]) <= 0) continue;
                mpq_class ratio = rhs[i] / a[i][enter];
                if (leave == rows || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == rows) throw InvariantViolation("oracle LP unbounded");
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        const mpq_class inv = 1 / a[r][c];
        std::vector<std::size_t> nz;
        for (std::size_t j = 0; j < cols; ++j) {
            if (sgn(a[r][j]) != 0) {
                a[r][j] *= inv;
                nz.push_back(j);
            }
        }
        rhs[r] *= inv;
        auto eliminate = [&](std::vector<mpq_class>& row, mpq_class& b) {
            const mpq_class f = row[c];
            if (sgn(f) == 0) return;
            for (std::size_t j : nz) row[j] -= f * a[r][j];
            b -= f * rhs[r];
        };
        for (std::size_t i = 0; i < rows; ++i) {
            if (i != r) eliminate(a[i], rhs[i]);
        }
        eliminate(obj, value);
        basis[r] = c;
    }
};

}  // namespace

OracleResult solve(const MarketTree& tree) {
    const auto& atoms = tree.atoms();
    const std::size_t na = atoms.size();
    const std::size_t nx = na + 1;  // q per atom, then m
    std::vector<std::size_t> inner;
    for (std::size_t k = 0; k < tree.size(); ++k) {
        if (!tree.children(k).empty()) inner.push_back(k);
    }

    std::vector<std::vector<mpq_class>> A;
    std::vector<mpq_class> b;
    for (std::size_t w = 0; w < na; ++w) {
        std::vector<mpq_class> row(nx);
        row[na] = 1;
        row[w] = -1;
        A.push_back(std::move(row));
        b.push_back(0);
    }
    {
        std::vector<mpq_class> row(nx);
        for (std::size_t w = 0; w < na; ++w) row[w] = 1;
        A.push_back(std::move(row));
        b.push_back(1);
    }
    // Row of the (node, asset) supermartingale constraint, by position in `inner`.
    std::vector<std::vector<std::size_t>> atom_paths(na);
    for (std::size_t w = 0; w < na; ++w) atom_paths[w] = tree.path_to(atoms[w]);
    const std::size_t first_super = A.size();
    std::unordered_map<std::size_t, std::size_t> inner_pos;
    for (std::size_t k = 0; k < inner.size(); ++k) inner_pos[inner[k]] = k;
    for (std::size_t k = 0; k < inner.size(); ++k) {
        for (int asset = 0; asset < 2; ++asset) {
            A.emplace_back(nx);
            b.push_back(0);
        }
    }
    for (std::size_t w = 0; w < na; ++w) {
        const auto& path = atom_paths[w];
        for (std::size_t s = 0; s + 1 < path.size(); ++s) {
            const TreeNode& from = tree.node(path[s]);
            const TreeNode& to = tree.node(path[s + 1]);
            const std::size_t r = first_super + 2 * inner_pos[path[s]];
            A[r][w] = to.X - from.X;
            A[r + 1][w] = to.Y - from.Y;
        }
    }
    std::vector<mpq_class> c(nx);
    c[na] = 1;

    Simplex lp(A, b, c);
    lp.run();

    OracleResult res;
    res.optimum = lp.value;
    std::vector<mpq_class> x(nx);
    for (std::size_t i = 0; i < lp.rows; ++i) {
        if (lp.basis[i] < nx) x[lp.basis[i]] = lp.rhs[i];
    }
    if (sgn(res.optimum) > 0) {
        res.feasible = true;
        mpq_class total = 0;
        for (std::size_t w = 0; w < na; ++w) total += x[w];
        std::vector<mpq_class> q(na);
        for (std::size_t w = 0; w < na; ++w) q[w] = x[w] / total;
        res.measure = std::move(q);
        return res;
    }

    Certificate cert;
    cert.value.assign(tree.size(), 0);
    for (std::size_t k = 0; k < inner.size(); ++k) {
        const std::size_t r = first_super + 2 * k;
        cert.piX[inner[k]] = lp.obj[nx + r];
        cert.piY[inner[k]] = lp.obj[nx + r + 1];
    }
    mpq_class largest = 0;
    for (const auto& [k, v] : cert.piX) largest = std::max(largest, v);
    for (const auto& [k, v] : cert.piY) largest = std::max(largest, v);
    if (sgn(largest) > 0) {
        for (auto& [k, v] : cert.piX) v /= largest;
        for (auto& [k, v] : cert.piY) v /= largest;
    }
    // Breadth-first so every parent is valued before its children.
    std::vector<std::size_t> order{tree.root()};
    for (std::size_t h = 0; h < order.size(); ++h) {
        for (std::size_t ch : tree.children(order[h])) order.push_back(ch);
    }
    for (std::size_t k : order) {
        if (tree.children(k).empty()) continue;
        const TreeNode& nd = tree.node(k);
        cert.cash[k] = cert.value[k] - cert.piX[k] * nd.X - cert.piY[k] * nd.Y;
        for (std::size_t ch : tree.children(k)) {
            const TreeNode& cn = tree.node(ch);
            cert.value[ch] = cert.cash[k] + cert.piX[k] * cn.X + cert.piY[k] * cn.Y;
        }
    }
    res.certificate = std::move(cert);
    return res;
}

bool verify(const MarketTree& tree, const OracleResult& res) {
    if (res.measure.has_value() == res.certificate.has_value()) return false;
    if (res.feasible != res.measure.has_value()) return false;
    const auto& atoms = tree.atoms();
    if (res.measure) {
        const auto& q = *res.measure;
        if (q.size() != atoms.size()) return false;
        mpq_class total = 0;
        for (const auto& v : q) {
            if (sgn(v) <= 0) return false;
            total += v;
        }
        if (total != 1) return false;
        // Node masses under Q, accumulated from the atoms.
        std::vector<mpq_class> mass(tree.size(), 0);
        for (std::size_t w = 0; w < atoms.size(); ++w) {
            for (std::size_t k : tree.path_to(atoms[w])) mass[k] += q[w];
        }
        for (std::size_t k = 0; k < tree.size(); ++k) {
            if (tree.children(k).empty()) continue;
            const TreeNode& nd = tree.node(k);
            mpq_class ex = 0, ey = 0;
            for (std::size_t ch : tree.children(k)) {
                ex += mass[ch] * (tree.node(ch).X - nd.X);
                ey += mass[ch] * (tree.node(ch).Y - nd.Y);
            }
            if (sgn(ex) > 0 || sgn(ey) > 0) return false;
        }
        return true;
    }
    const Certificate& c = *res.certificate;
    if (c.value.size() != tree.size() || sgn(c.value[tree.root()]) != 0) return false;
    for (std::size_t k = 0; k < tree.size(); ++k) {
        if (tree.children(k).empty()) continue;
        auto px = c.piX.find(k), py = c.piY.find(k), pc = c.cash.find(k);
        if (px == c.piX.end() || py == c.piY.end() || pc == c.cash.end()) return false;
        if (sgn(px->second) < 0 || sgn(py->second) < 0) return false;
        const TreeNode& nd = tree.node(k);
        if (c.value[k] != pc->second + px->second * nd.X + py->second * nd.Y) return false;
        for (std::size_t ch : tree.children(k)) {
            const TreeNode& cn = tree.node(ch);
            if (c.value[ch] != pc->second + px->second * cn.X + py->second * cn.Y) return false;
        }
    }
    bool strict = false;
    for (std::size_t w : atoms) {
        if (sgn(c.value[w]) < 0) return false;
        strict = strict || sgn(c.value[w]) > 0;
    }
    return strict;
}

}  // namespace convarb
