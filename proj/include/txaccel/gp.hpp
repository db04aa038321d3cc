#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "txaccel/accelerators.hpp"
#include "txaccel/rng.hpp"
#include "txaccel/sequence.hpp"

namespace txaccel::gp {

enum class Op : std::uint8_t {
    // leaves
    Sn,
    Snm1,
    Snm2,
    Snm3,
    Param,
    Constant,
    SecondDiff,  ///< S_n - 2 S_{n-1} + S_{n-2}, read straight from the window
    // functions
    Add,
    Sub,
    Mul,
    Div,  ///< protected
    Square,
};

int arity(Op op) noexcept;
inline bool is_leaf(Op op) noexcept { return arity(op) == 0; }

struct Node {
    Op op = Op::Sn;
    double value = 0.0;  ///< only meaningful for Op::Constant

    bool operator==(const Node&) const = default;
};

/// Expression tree stored in prefix order. A single node has depth 1.
class Tree {
public:
    Tree() = default;
    explicit Tree(std::vector<Node> nodes);

    std::span<const Node> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    int depth() const;
    /// One past the last node of the subtree rooted at `index`.
    std::size_t subtree_end(std::size_t index) const;
    /// Depth of every node (root = 1), in prefix order.
    std::vector<int> node_depths() const;
    bool uses_param() const;
    /// True when every function node has exactly its arity in children.
    bool well_formed() const;

    bool operator==(const Tree&) const = default;

private:
    std::vector<Node> nodes_;
};

/// Rational candidate: numerator / denominator with a learnable scalar p.
struct Formula {
    Tree numerator;
    Tree denominator;
    double p = 0.0;

    std::size_t node_count() const { return numerator.size() + denominator.size(); }
    bool uses_param() const { return numerator.uses_param() || denominator.uses_param(); }
    bool operator==(const Formula&) const = default;
};

inline constexpr int kMaxDepth = 4;
inline constexpr double kProtectedThreshold = 1e-10;
inline constexpr double kProtectedValue = 1e6;
inline constexpr double kClamp = 1e150;

/// Evaluation with closure guarantees: protected division yields 1e6 for |den| < 1e-10 and
/// every function result is clamped to +/-1e150. `guarded` is set when either fallback fires.
double eval_tree(const Tree& tree, const Window& window, double p, bool& guarded) noexcept;
double eval_tree(const Tree& tree, const Window& window, double p) noexcept;

struct FormulaValue {
    double value = 0.0;
    bool guarded = false;  ///< a protection or clamp fallback fired somewhere
};

FormulaValue evaluate(const Formula& f, const Window& window) noexcept;
double eval_formula(const Formula& f, const Window& window) noexcept;

/// Accelerator view of a formula; outputs that needed a closure fallback are reported invalid.
Accelerator formula_accelerator(Formula f, std::string name = "evolved");

struct GenerationOptions {
    int max_depth = kMaxDepth;
    bool use_constants = true;
    double constant_min = -2.0;
    double constant_max = 2.0;
};

enum class Method { Grow, Full };

/// Throws InvalidArgument unless 1 <= max_depth <= 4.
Tree random_tree(int max_depth, Method method, Rng& rng, const GenerationOptions& options = {});

/// Random leaf: S_n, S_{n-1}, S_{n-2}, S_{n-3}, p, second difference, or (if enabled) a constant.
Node random_leaf(Rng& rng, const GenerationOptions& options = {});

/// Replaces every function node sitting at max_depth by a random leaf.
Tree enforce_depth(const Tree& tree, int max_depth, Rng& rng, const GenerationOptions& options = {});

/// Subtree exchange on the same side (numerator or denominator) of both parents.
/// When that side is identical in both, the same node is used in each.
std::pair<Formula, Formula> crossover(const Formula& a, const Formula& b, Rng& rng,
                                      const GenerationOptions& options = {});

/// Replaces a random subtree of the numerator or denominator by a freshly grown one.
Formula mutate(const Formula& f, Rng& rng, const GenerationOptions& options = {});

/// Aitken delta-squared as a formula: (S_n d2 - (S_n - S_{n-1})^2) / d2.
Formula aitken_formula();
/// The built-in evolved accelerator expressed as a formula.
Formula evolved_builtin_formula();

/// `(formula :p <num> :num <expr> :den <expr>)` with prefix expressions such as
/// `(sub (mul Sn Snm2) (sq Snm1))`; numbers use 17 significant digits.
std::string serialize(const Formula& f);
std::string serialize(const Tree& t);

/// Throws SyntaxError (with byte offset) on malformed text or trees deeper than 4.
Formula parse(std::string_view text);

}  // namespace txaccel::gp
