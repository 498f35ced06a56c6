#include "fpgp/expr.hpp"

#include "fpgp/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace fpgp {

namespace {

constexpr int kOperatorCount = 4;

inline double clamp_value(double v) noexcept {
    if (v > kValueGuard) return kValueGuard;
    if (v < -kValueGuard) return -kValueGuard;
    return v;
}

inline double apply_op(NodeKind k, double a, double b) noexcept {
    double r = 0.0;
    switch (k) {
    case NodeKind::Add: r = a + b; break;
    case NodeKind::Sub: r = a - b; break;
    case NodeKind::Mul: r = a * b; break;
    case NodeKind::Div: r = std::fabs(b) < kProtectedDivisionEpsilon ? 1.0 : a / b; break;
    default: break;
    }
    return clamp_value(r);
}

inline char op_symbol(NodeKind k) {
    switch (k) {
    case NodeKind::Add: return '+';
    case NodeKind::Sub: return '-';
    case NodeKind::Mul: return '*';
    case NodeKind::Div: return '/';
    default: return '?';
    }
}

void check_arity(const ProgramTree& tree, std::size_t available) {
    const int max_var = tree.max_variable();
    if (max_var >= 0 && static_cast<std::size_t>(max_var) >= available) {
        throw ArityError("tree references variable " + std::to_string(max_var) +
                         " but only " + std::to_string(available) + " inputs are bound");
    }
}

} // namespace

// --- TerminalSet -----------------------------------------------------------

TerminalSet::TerminalSet(std::vector<std::string> variable_names, std::int32_t const_min,
                         std::int32_t const_max)
    : names_(std::move(variable_names)), const_min_(const_min), const_max_(const_max) {
    if (const_min_ > const_max_) {
        throw std::invalid_argument("terminal set: const_min exceeds const_max");
    }
    if (names_.size() > 0xFFFF) {
        throw std::invalid_argument("terminal set: too many variables");
    }
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty()) throw std::invalid_argument("terminal set: empty variable name");
        if (!seen.insert(n).second) {
            throw std::invalid_argument("terminal set: duplicate variable name '" + n + "'");
        }
    }
}

int TerminalSet::find(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return static_cast<int>(i);
    }
    return -1;
}

// --- ProgramTree -----------------------------------------------------------

ProgramTree::ProgramTree(std::vector<Node> prefix) : nodes_(std::move(prefix)) {
    if (nodes_.empty()) throw std::invalid_argument("program tree: no nodes");
    std::size_t open = 1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (open == 0) throw std::invalid_argument("program tree: trailing nodes after complete tree");
        if (nodes_[i].kind > NodeKind::Constant) throw std::invalid_argument("program tree: bad node kind");
        open = is_operator(nodes_[i].kind) ? open + 1 : open - 1;
    }
    if (open != 0) throw std::invalid_argument("program tree: operator missing operands");
}

ProgramTree ProgramTree::leaf(Node terminal) {
    if (is_operator(terminal.kind)) throw std::invalid_argument("leaf must be a terminal");
    return ProgramTree(std::vector<Node>{terminal});
}

ProgramTree ProgramTree::apply(NodeKind op, const ProgramTree& left, const ProgramTree& right) {
    if (!is_operator(op)) throw std::invalid_argument("apply needs an operator");
    std::vector<Node> nodes;
    nodes.reserve(1 + left.size() + right.size());
    nodes.push_back(Node::op(op));
    nodes.insert(nodes.end(), left.nodes_.begin(), left.nodes_.end());
    nodes.insert(nodes.end(), right.nodes_.begin(), right.nodes_.end());
    return ProgramTree(std::move(nodes));
}

std::size_t ProgramTree::subtree_end(std::size_t index) const {
    if (index >= nodes_.size()) throw std::out_of_range("node index out of range");
    std::size_t open = 1;
    std::size_t j = index;
    while (open > 0) {
        open = is_operator(nodes_[j].kind) ? open + 1 : open - 1;
        ++j;
    }
    return j;
}

ProgramTree ProgramTree::subtree(std::size_t index) const {
    const auto end = subtree_end(index);
    return ProgramTree(std::vector<Node>(nodes_.begin() + static_cast<std::ptrdiff_t>(index),
                                         nodes_.begin() + static_cast<std::ptrdiff_t>(end)));
}

ProgramTree ProgramTree::replace_subtree(std::size_t index, const ProgramTree& replacement) const {
    const auto end = subtree_end(index);
    std::vector<Node> out;
    out.reserve(nodes_.size() - (end - index) + replacement.size());
    out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(index));
    out.insert(out.end(), replacement.nodes_.begin(), replacement.nodes_.end());
    out.insert(out.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
    ProgramTree t;
    t.nodes_ = std::move(out);
    return t;
}

std::size_t ProgramTree::depth() const {
    std::vector<std::size_t> pending{1};
    std::size_t deepest = 0;
    for (const auto& n : nodes_) {
        const auto d = pending.back();
        pending.pop_back();
        deepest = std::max(deepest, d);
        if (is_operator(n.kind)) {
            pending.push_back(d + 1);
            pending.push_back(d + 1);
        }
    }
    return deepest;
}

std::size_t ProgramTree::depth_of(std::size_t index) const {
    if (index >= nodes_.size()) throw std::out_of_range("node index out of range");
    std::vector<std::size_t> pending{1};
    for (std::size_t i = 0;; ++i) {
        const auto d = pending.back();
        pending.pop_back();
        if (i == index) return d;
        if (is_operator(nodes_[i].kind)) {
            pending.push_back(d + 1);
            pending.push_back(d + 1);
        }
    }
}

int ProgramTree::max_variable() const noexcept {
    int m = -1;
    for (const auto& n : nodes_) {
        if (n.kind == NodeKind::Variable) m = std::max(m, static_cast<int>(n.variable));
    }
    return m;
}

// --- evaluation ------------------------------------------------------------

double evaluate(const ProgramTree& tree, std::span<const double> inputs) {
    check_arity(tree, inputs.size());
    thread_local std::vector<double> stack;
    stack.clear();
    const auto nodes = tree.nodes();
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
        switch (it->kind) {
        case NodeKind::Variable: stack.push_back(clamp_value(inputs[it->variable])); break;
        case NodeKind::Constant: stack.push_back(clamp_value(static_cast<double>(it->constant))); break;
        default: {
            const double left = stack.back();
            stack.pop_back();
            const double right = stack.back();
            stack.back() = apply_op(it->kind, left, right);
        }
        }
    }
    return stack.back();
}

double evaluate(const ProgramTree& tree, const InputBinding& binding) {
    return evaluate(tree, std::span<const double>(binding.values));
}

void evaluate_columns(const ProgramTree& tree, std::span<const double> columns,
                      std::size_t case_count, std::span<double> out) {
    if (out.size() < case_count) throw std::invalid_argument("evaluate_columns: output too small");
    if (case_count == 0) return;
    check_arity(tree, columns.size() / case_count);

    thread_local std::vector<double> stack;
    const auto nodes = tree.nodes();
    // Prefix order evaluated back to front never needs more slots than nodes.
    if (stack.size() < nodes.size() * case_count) stack.resize(nodes.size() * case_count);
    std::size_t top = 0; // number of occupied slots
    const auto n = case_count;

    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
        double* dst = stack.data() + top * n;
        switch (it->kind) {
        case NodeKind::Variable: {
            const double* src = columns.data() + static_cast<std::size_t>(it->variable) * n;
            for (std::size_t i = 0; i < n; ++i) dst[i] = clamp_value(src[i]);
            ++top;
            break;
        }
        case NodeKind::Constant: {
            const double c = clamp_value(static_cast<double>(it->constant));
            std::fill(dst, dst + n, c);
            ++top;
            break;
        }
        default: {
            double* left = stack.data() + (top - 1) * n;
            const double* right = stack.data() + (top - 2) * n;
            double* res = stack.data() + (top - 2) * n;
            for (std::size_t i = 0; i < n; ++i) res[i] = apply_op(it->kind, left[i], right[i]);
            --top;
        }
        }
    }
    std::copy(stack.data(), stack.data() + n, out.begin());
}

// --- generation ------------------------------------------------------------

namespace {

Node random_terminal(const TerminalSet& terminals, Rng& rng) {
    const auto options = static_cast<int>(terminals.arity()); // last option is "constant"
    std::uniform_int_distribution<int> pick(0, options);
    const int choice = pick(rng);
    if (choice < options) return Node::var(static_cast<std::uint16_t>(choice));
    std::uniform_int_distribution<std::int32_t> value(terminals.const_min(), terminals.const_max());
    return Node::lit(value(rng));
}

Node random_operator(Rng& rng) {
    std::uniform_int_distribution<int> pick(0, kOperatorCount - 1);
    return Node::op(static_cast<NodeKind>(pick(rng)));
}

void grow_into(std::vector<Node>& out, std::size_t depth, std::size_t max_depth, InitMethod method,
               const TerminalSet& terminals, Rng& rng) {
    bool leaf = depth >= max_depth;
    if (!leaf && method == InitMethod::Grow) {
        const auto terminal_options = static_cast<int>(terminals.arity()) + 1;
        std::uniform_int_distribution<int> pick(0, kOperatorCount + terminal_options - 1);
        leaf = pick(rng) >= kOperatorCount;
    }
    if (leaf) {
        out.push_back(random_terminal(terminals, rng));
        return;
    }
    out.push_back(random_operator(rng));
    grow_into(out, depth + 1, max_depth, method, terminals, rng);
    grow_into(out, depth + 1, max_depth, method, terminals, rng);
}

} // namespace

ProgramTree random_tree(std::size_t max_depth, InitMethod method, const TerminalSet& terminals,
                        Rng& rng) {
    if (max_depth == 0) throw std::invalid_argument("random_tree: max_depth must be at least 1");
    std::vector<Node> nodes;
    grow_into(nodes, 1, max_depth, method, terminals, rng);
    return ProgramTree(std::move(nodes));
}

// --- prefix text -----------------------------------------------------------

std::string serialize_prefix(const ProgramTree& tree, const TerminalSet& terminals) {
    const int max_var = tree.max_variable();
    if (max_var >= 0 && static_cast<std::size_t>(max_var) >= terminals.arity()) {
        throw ArityError("tree references variable " + std::to_string(max_var) +
                         " outside the terminal set");
    }
    std::string out;
    // Closing parens owed once each pending operand count drops to zero.
    std::vector<int> remaining;
    const auto nodes = tree.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0) out.push_back(' ');
        const auto& n = nodes[i];
        if (is_operator(n.kind)) {
            out.push_back('(');
            out.push_back(op_symbol(n.kind));
            remaining.push_back(2);
            continue;
        }
        out += n.kind == NodeKind::Variable ? terminals.variable_names()[n.variable]
                                            : std::to_string(n.constant);
        while (!remaining.empty() && --remaining.back() == 0) {
            remaining.pop_back();
            out.push_back(')');
        }
    }
    return out;
}

namespace {

struct Token {
    enum class Kind { Open, Close, Atom, End } kind;
    std::string_view text;
    std::size_t pos;
};

class PrefixParser {
public:
    PrefixParser(std::string_view text, const TerminalSet& terminals)
        : text_(text), terminals_(terminals) {}

    ProgramTree parse() {
        advance();
        parse_expr();
        if (tok_.kind != Token::Kind::End) fail("unexpected trailing token '" + std::string(tok_.text) + "'");
        return ProgramTree(std::move(nodes_));
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("prefix formula, offset " + std::to_string(tok_.pos) + ": " + msg, tok_.pos,
                         ParseError::Unit::Byte);
    }

    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ >= text_.size()) {
            tok_ = {Token::Kind::End, {}, pos_};
            return;
        }
        const char c = text_[pos_];
        if (c == '(' || c == ')') {
            tok_ = {c == '(' ? Token::Kind::Open : Token::Kind::Close, text_.substr(pos_, 1), pos_};
            ++pos_;
            return;
        }
        const auto start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')') {
            ++pos_;
        }
        tok_ = {Token::Kind::Atom, text_.substr(start, pos_ - start), start};
    }

    static bool is_integer(std::string_view s) {
        std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        if (i >= s.size()) return false;
        for (; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        }
        return true;
    }

    void parse_expr() {
        switch (tok_.kind) {
        case Token::Kind::End: fail("unexpected end of input (unbalanced parentheses)");
        case Token::Kind::Close: fail("unexpected ')'");
        case Token::Kind::Atom: parse_terminal(); return;
        case Token::Kind::Open: break;
        }
        advance();
        if (tok_.kind != Token::Kind::Atom || tok_.text.size() != 1) fail("expected an operator after '('");
        NodeKind op;
        switch (tok_.text[0]) {
        case '+': op = NodeKind::Add; break;
        case '-': op = NodeKind::Sub; break;
        case '*': op = NodeKind::Mul; break;
        case '/': op = NodeKind::Div; break;
        default: fail("unknown operator '" + std::string(tok_.text) + "'");
        }
        nodes_.push_back(Node::op(op));
        advance();
        for (int operand = 0; operand < 2; ++operand) {
            if (tok_.kind == Token::Kind::Close) fail("operator expects 2 operands");
            parse_expr();
        }
        if (tok_.kind == Token::Kind::End) fail("unexpected end of input (unbalanced parentheses)");
        if (tok_.kind != Token::Kind::Close) fail("operator expects 2 operands, found extra '" + std::string(tok_.text) + "'");
        advance();
    }

    void parse_terminal() {
        const auto text = tok_.text;
        if (is_integer(text)) {
            std::int32_t value = 0;
            const char* first = text.data() + (text[0] == '+' ? 1 : 0);
            const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
            if (ec != std::errc{} || ptr != text.data() + text.size()) fail("integer literal out of range");
            nodes_.push_back(Node::lit(value));
        } else {
            const int index = terminals_.find(text);
            if (index < 0) fail("unknown symbol '" + std::string(text) + "'");
            nodes_.push_back(Node::var(static_cast<std::uint16_t>(index)));
        }
        advance();
    }

    std::string_view text_;
    const TerminalSet& terminals_;
    std::size_t pos_ = 0;
    Token tok_{Token::Kind::End, {}, 0};
    std::vector<Node> nodes_;
};

} // namespace

ProgramTree parse_prefix(std::string_view text, const TerminalSet& terminals) {
    return PrefixParser(text, terminals).parse();
}

// --- inspection ------------------------------------------------------------

TreeMetrics metrics(const ProgramTree& tree) { return {tree.depth(), tree.size()}; }

NodeLocator select_random_node(const ProgramTree& tree, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, tree.size() - 1);
    return {pick(rng)};
}

std::vector<Branch> path_to(const ProgramTree& tree, NodeLocator locator) {
    if (locator.index >= tree.size()) throw std::out_of_range("locator outside tree");
    std::vector<Branch> path;
    std::size_t at = 0;
    while (at != locator.index) {
        const auto left = at + 1;
        const auto right = tree.subtree_end(left);
        if (locator.index < right) {
            path.push_back(Branch::Left);
            at = left;
        } else {
            path.push_back(Branch::Right);
            at = right;
        }
    }
    return path;
}

} // namespace fpgp
