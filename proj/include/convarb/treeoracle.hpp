#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace convarb {

struct TreeNode {
    std::int64_t id = 0;
    int t = 0;
    std::optional<std::int64_t> parent;
    mpq_class prob = 1;  // branch probability from the parent
    mpq_class X = 0, Y = 0;
};

/// Event tree; nodes without children are the atoms.
class MarketTree {
public:
    MarketTree() = default;
    /// Validates and indexes; throws DomainError on a malformed tree.
    explicit MarketTree(std::vector<TreeNode> nodes);

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeNode& node(std::size_t k) const { return nodes_[k]; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t root() const { return root_; }
    const std::vector<std::size_t>& children(std::size_t k) const { return children_[k]; }
    const std::vector<std::size_t>& atoms() const { return atoms_; }
    /// Node positions from the root to atom (inclusive).
    std::vector<std::size_t> path_to(std::size_t k) const;
    int depth() const { return depth_; }
    std::optional<std::size_t> parent_of(std::size_t k) const { return parent_pos_[k]; }

private:
    std::vector<TreeNode> nodes_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::optional<std::size_t>> parent_pos_;
    std::vector<std::size_t> atoms_;
    std::size_t root_ = 0;
    int depth_ = 0;
};

/// Long-only strategy read from the dual: holdings over the period after each
/// non-terminal node, cash, and the value process at every node.
struct Certificate {
    std::map<std::size_t, mpq_class> piX, piY, cash;  // keyed by node position
    std::vector<mpq_class> value;                      // per node position
};

struct OracleResult {
    bool feasible = false;
    mpq_class optimum = 0;                           // max-min atom mass
    std::optional<std::vector<mpq_class>> measure;   // per atom, in MarketTree::atoms() order
    std::optional<Certificate> certificate;
};

OracleResult solve(const MarketTree& tree);
bool verify(const MarketTree& tree, const OracleResult& result);

/// Parses "n/d", "n" or an exact decimal such as "0.25".
mpq_class parse_rational(const std::string& s);
std::string to_string(const mpq_class& q);

MarketTree load_tree(const std::string& path);
MarketTree parse_tree(const std::string& json_text);
std::string tree_to_json(const MarketTree& tree);
std::string result_to_json(const MarketTree& tree, const OracleResult& result, bool verified);

inline constexpr int kMaxPeriods = 6;
inline constexpr int kMaxBranching = 3;
inline constexpr std::size_t kMaxAtoms = 729;

/// Quantized event tree of survival_claim, predictable_default_variant or
/// two_defaults; prices are the closed forms at each node. Throws DomainError
/// when the size guard is exceeded.
MarketTree discretize_model(const std::string& model, const std::map<std::string, double>& params, int periods,
                            int branching, double horizon = 1.0);

}  // namespace convarb
