#pragma once

// Expression trees for tree-based genetic programming.
//
// A ProgramTree stores its nodes in prefix order: an operator is followed by
// its left subtree and then its right subtree. The subtree rooted at node i
// therefore occupies a contiguous range [i, subtree_end(i)), which keeps
// crossover and mutation down to a single splice.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fpgp {

using Rng = std::mt19937_64;

enum class NodeKind : std::uint8_t { Add, Sub, Mul, Div, Variable, Constant };

constexpr bool is_operator(NodeKind k) noexcept { return k <= NodeKind::Div; }

struct Node {
    NodeKind kind = NodeKind::Constant;
    std::uint16_t variable = 0; // index into the input vector, Variable only
    std::int32_t constant = 0;  // Constant only

    static constexpr Node op(NodeKind k) noexcept { return {k, 0, 0}; }
    static constexpr Node var(std::uint16_t index) noexcept { return {NodeKind::Variable, index, 0}; }
    static constexpr Node lit(std::int32_t value) noexcept { return {NodeKind::Constant, 0, value}; }

    friend bool operator==(const Node&, const Node&) = default;
};

// Variables (by name, in input-vector order) plus the inclusive range that
// ephemeral integer constants are drawn from.
class TerminalSet {
public:
    TerminalSet(std::vector<std::string> variable_names, std::int32_t const_min = -10,
                std::int32_t const_max = 10);

    const std::vector<std::string>& variable_names() const noexcept { return names_; }
    std::size_t arity() const noexcept { return names_.size(); }
    std::int32_t const_min() const noexcept { return const_min_; }
    std::int32_t const_max() const noexcept { return const_max_; }

    // Index of `name`, or -1.
    int find(std::string_view name) const noexcept;

    friend bool operator==(const TerminalSet&, const TerminalSet&) = default;

private:
    std::vector<std::string> names_;
    std::int32_t const_min_;
    std::int32_t const_max_;
};

// Input values parallel to TerminalSet::variable_names().
struct InputBinding {
    std::vector<double> values;
};

struct TreeMetrics {
    std::size_t depth = 0;
    std::size_t node_count = 0;
    friend bool operator==(const TreeMetrics&, const TreeMetrics&) = default;
};

// Position of a node within a tree, as its prefix-order index.
struct NodeLocator {
    std::size_t index = 0;
    friend bool operator==(const NodeLocator&, const NodeLocator&) = default;
};

enum class Branch : std::uint8_t { Left, Right };

class ProgramTree {
public:
    // Throws std::invalid_argument unless `prefix` is exactly one complete tree.
    explicit ProgramTree(std::vector<Node> prefix);

    static ProgramTree leaf(Node terminal);
    static ProgramTree apply(NodeKind op, const ProgramTree& left, const ProgramTree& right);

    std::span<const Node> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const Node& root() const noexcept { return nodes_.front(); }

    // One past the last node of the subtree rooted at `index`.
    std::size_t subtree_end(std::size_t index) const;
    ProgramTree subtree(std::size_t index) const;
    // Copy of this tree with the subtree at `index` swapped for `replacement`.
    ProgramTree replace_subtree(std::size_t index, const ProgramTree& replacement) const;

    std::size_t depth() const;
    // Number of edges from the root to `index`, plus one.
    std::size_t depth_of(std::size_t index) const;
    // Largest variable index referenced, or -1 when the tree has none.
    int max_variable() const noexcept;

    friend bool operator==(const ProgramTree&, const ProgramTree&) = default;

private:
    ProgramTree() = default;
    std::vector<Node> nodes_;
};

constexpr double kProtectedDivisionEpsilon = 1e-9;
constexpr double kValueGuard = 1e12;

// Arithmetic value of `tree` with protected division and every intermediate
// clamped to +-kValueGuard. Throws ArityError when the tree references a
// variable beyond `inputs`.
double evaluate(const ProgramTree& tree, std::span<const double> inputs);
double evaluate(const ProgramTree& tree, const InputBinding& binding);

// Evaluates `tree` on `case_count` input rows stored column-major
// (columns[v * case_count + i] is variable v of row i). Produces the same
// bits as calling evaluate() per row.
void evaluate_columns(const ProgramTree& tree, std::span<const double> columns,
                      std::size_t case_count, std::span<double> out);

enum class InitMethod : std::uint8_t { Grow, Full };

ProgramTree random_tree(std::size_t max_depth, InitMethod method, const TerminalSet& terminals,
                        Rng& rng);

// Canonical parenthesized prefix text, e.g. "(+ x 1)", using the names of
// `terminals` for variables.
std::string serialize_prefix(const ProgramTree& tree, const TerminalSet& terminals);
// Throws ParseError carrying the byte offset of the offending token.
ProgramTree parse_prefix(std::string_view text, const TerminalSet& terminals);

TreeMetrics metrics(const ProgramTree& tree);

NodeLocator select_random_node(const ProgramTree& tree, Rng& rng);
std::vector<Branch> path_to(const ProgramTree& tree, NodeLocator locator);

} // namespace fpgp
