#include "txaccel/gp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "txaccel/error.hpp"

namespace txaccel::gp {

int arity(Op op) noexcept {
    switch (op) {
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
            return 2;
        case Op::Square:
            return 1;
        default:
            return 0;
    }
}

Tree::Tree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

std::size_t Tree::subtree_end(std::size_t index) const {
    std::size_t pending = 1;
    while (pending > 0) {
        pending = pending - 1 + static_cast<std::size_t>(arity(nodes_.at(index).op));
        ++index;
    }
    return index;
}

std::vector<int> Tree::node_depths() const {
    std::vector<int> depths(nodes_.size());
    // Stack of depths awaiting a child.
    std::vector<int> open;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        int d = 1;
        if (!open.empty()) {
            d = open.back();
            open.pop_back();
        }
        depths[i] = d;
        for (int c = 0; c < arity(nodes_[i].op); ++c) open.push_back(d + 1);
    }
    return depths;
}

int Tree::depth() const {
    const auto d = node_depths();
    return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

bool Tree::uses_param() const {
    return std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.op == Op::Param; });
}

bool Tree::well_formed() const {
    if (nodes_.empty()) return false;
    std::size_t pending = 1;
    for (const Node& n : nodes_) {
        if (pending == 0) return false;
        pending = pending - 1 + static_cast<std::size_t>(arity(n.op));
    }
    return pending == 0;
}

namespace {

double clamp_result(double v, bool& guarded) noexcept {
    if (v > kClamp) {
        guarded = true;
        return kClamp;
    }
    if (v < -kClamp) {
        guarded = true;
        return -kClamp;
    }
    return v;
}

double protected_divide(double num, double den, bool& guarded) noexcept {
    if (!(std::abs(den) >= kProtectedThreshold)) {
        guarded = true;
        return kProtectedValue;
    }
    return num / den;
}

double eval_at(std::span<const Node> nodes, std::size_t& i, const Window& w, double p, bool& guarded) noexcept {
    const Node& n = nodes[i++];
    switch (n.op) {
        case Op::Sn: return w.s_n;
        case Op::Snm1: return w.s_nm1;
        case Op::Snm2: return w.s_nm2;
        case Op::Snm3: return w.s_nm3;
        case Op::Param: return p;
        case Op::Constant: return n.value;
        case Op::SecondDiff: return clamp_result(w.s_n - 2.0 * w.s_nm1 + w.s_nm2, guarded);
        case Op::Square: {
            const double a = eval_at(nodes, i, w, p, guarded);
            return clamp_result(a * a, guarded);
        }
        default: break;
    }
    const double a = eval_at(nodes, i, w, p, guarded);
    const double b = eval_at(nodes, i, w, p, guarded);
    switch (n.op) {
        case Op::Add: return clamp_result(a + b, guarded);
        case Op::Sub: return clamp_result(a - b, guarded);
        case Op::Mul: return clamp_result(a * b, guarded);
        case Op::Div: return clamp_result(protected_divide(a, b, guarded), guarded);
        default: return 0.0;  // unreachable for well-formed trees
    }
}

}  // namespace

double eval_tree(const Tree& tree, const Window& window, double p, bool& guarded) noexcept {
    std::size_t i = 0;
    return eval_at(tree.nodes(), i, window, p, guarded);
}

double eval_tree(const Tree& tree, const Window& window, double p) noexcept {
    bool guarded = false;
    return eval_tree(tree, window, p, guarded);
}

FormulaValue evaluate(const Formula& f, const Window& window) noexcept {
    FormulaValue out;
    const double num = eval_tree(f.numerator, window, f.p, out.guarded);
    const double den = eval_tree(f.denominator, window, f.p, out.guarded);
    out.value = clamp_result(protected_divide(num, den, out.guarded), out.guarded);
    return out;
}

double eval_formula(const Formula& f, const Window& window) noexcept { return evaluate(f, window).value; }

Accelerator formula_accelerator(Formula f, std::string name) {
    return {std::move(name), kWindowSize, [f = std::move(f)](const Window& w) {
                const FormulaValue v = evaluate(f, w);
                return v.guarded ? kUndefined : v.value;
            }};
}

// ---------------------------------------------------------------------------
// Generation and variation

namespace {

constexpr Op kLeaves[] = {Op::Sn, Op::Snm1, Op::Snm2, Op::Snm3, Op::Param, Op::SecondDiff, Op::Constant};
constexpr Op kFunctions[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Square};

std::size_t leaf_choices(const GenerationOptions& options) {
    return std::size(kLeaves) - (options.use_constants ? 0 : 1);
}

void check_depth(int max_depth) {
    if (max_depth < 1 || max_depth > kMaxDepth) {
        throw InvalidArgument(fmt::format("tree depth limit must be in [1, {}], got {}", kMaxDepth, max_depth));
    }
}

void grow_into(std::vector<Node>& out, int depth, int max_depth, Method method, Rng& rng,
               const GenerationOptions& options) {
    if (depth >= max_depth) {
        out.push_back(random_leaf(rng, options));
        return;
    }
    Op op;
    if (method == Method::Full) {
        op = kFunctions[rng.below(std::size(kFunctions))];
    } else {
        const std::size_t leaves = leaf_choices(options);
        const std::size_t pick = rng.below(std::size(kFunctions) + leaves);
        if (pick >= std::size(kFunctions)) {
            out.push_back(random_leaf(rng, options));
            return;
        }
        op = kFunctions[pick];
    }
    out.push_back({op, 0.0});
    for (int c = 0; c < arity(op); ++c) grow_into(out, depth + 1, max_depth, method, rng, options);
}

}  // namespace

Node random_leaf(Rng& rng, const GenerationOptions& options) {
    const Op op = kLeaves[rng.below(leaf_choices(options))];
    if (op == Op::Constant) return {op, rng.uniform(options.constant_min, options.constant_max)};
    return {op, 0.0};
}

Tree random_tree(int max_depth, Method method, Rng& rng, const GenerationOptions& options) {
    check_depth(max_depth);
    std::vector<Node> nodes;
    grow_into(nodes, 1, max_depth, method, rng, options);
    return Tree(std::move(nodes));
}

Tree enforce_depth(const Tree& tree, int max_depth, Rng& rng, const GenerationOptions& options) {
    check_depth(max_depth);
    const auto nodes = tree.nodes();
    const auto depths = tree.node_depths();
    std::vector<Node> out;
    out.reserve(nodes.size());
    std::size_t i = 0;
    while (i < nodes.size()) {
        if (depths[i] >= max_depth && !is_leaf(nodes[i].op)) {
            out.push_back(random_leaf(rng, options));
            i = tree.subtree_end(i);
        } else {
            out.push_back(nodes[i]);
            ++i;
        }
    }
    return Tree(std::move(out));
}

namespace {

Tree splice(const Tree& host, std::size_t at, const Tree& donor, std::size_t from) {
    const auto h = host.nodes();
    const auto d = donor.nodes();
    const std::size_t host_end = host.subtree_end(at);
    const std::size_t donor_end = donor.subtree_end(from);
    std::vector<Node> out;
    out.reserve(h.size() - (host_end - at) + (donor_end - from));
    out.insert(out.end(), h.begin(), h.begin() + at);
    out.insert(out.end(), d.begin() + from, d.begin() + donor_end);
    out.insert(out.end(), h.begin() + host_end, h.end());
    return Tree(std::move(out));
}

}  // namespace

std::pair<Formula, Formula> crossover(const Formula& a, const Formula& b, Rng& rng,
                                      const GenerationOptions& options) {
    const bool numerator = rng.below(2) == 0;
    const Tree& ta = numerator ? a.numerator : a.denominator;
    const Tree& tb = numerator ? b.numerator : b.denominator;
    const std::size_t i = rng.below(ta.size());
    // Identical trees exchange the same subtree, so cloned parents breed clones.
    const std::size_t j = ta == tb ? i : rng.below(tb.size());
    Tree child_a = enforce_depth(splice(ta, i, tb, j), options.max_depth, rng, options);
    Tree child_b = enforce_depth(splice(tb, j, ta, i), options.max_depth, rng, options);

    std::pair<Formula, Formula> out{a, b};
    (numerator ? out.first.numerator : out.first.denominator) = std::move(child_a);
    (numerator ? out.second.numerator : out.second.denominator) = std::move(child_b);
    return out;
}

Formula mutate(const Formula& f, Rng& rng, const GenerationOptions& options) {
    const bool numerator = rng.below(2) == 0;
    const Tree& target = numerator ? f.numerator : f.denominator;
    const std::size_t i = rng.below(target.size());
    const int node_depth = target.node_depths()[i];
    const int budget = std::max(1, options.max_depth - node_depth + 1);
    const Tree fresh = random_tree(budget, Method::Grow, rng, options);

    Formula out = f;
    (numerator ? out.numerator : out.denominator) = splice(target, i, fresh, 0);
    return out;
}

Formula aitken_formula() {
    // num = S_n * d2 - (S_n - S_{n-1})^2, den = d2
    Tree num({{Op::Sub}, {Op::Mul}, {Op::Sn}, {Op::SecondDiff}, {Op::Square}, {Op::Sub}, {Op::Sn}, {Op::Snm1}});
    Tree den({{Op::SecondDiff}});
    return {std::move(num), std::move(den), 0.0};
}

Formula evolved_builtin_formula() {
    // num = S_n S_{n-2} - (S_n^2 + S_{n-1}^2)
    Tree num({{Op::Sub}, {Op::Mul}, {Op::Sn}, {Op::Snm2}, {Op::Add}, {Op::Square}, {Op::Sn}, {Op::Square},
              {Op::Snm1}});
    // den = ((d2 + d2) - S_{n-2}) * (S_n / S_{n-1}); 2 d2 - S_{n-2} = 2 S_n - 4 S_{n-1} + S_{n-2}
    Tree den({{Op::Mul}, {Op::Sub}, {Op::Add}, {Op::SecondDiff}, {Op::SecondDiff}, {Op::Snm2}, {Op::Div},
              {Op::Sn}, {Op::Snm1}});
    return {std::move(num), std::move(den), 0.0};
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string_view symbol_of(Op op) {
    switch (op) {
        case Op::Sn: return "Sn";
        case Op::Snm1: return "Snm1";
        case Op::Snm2: return "Snm2";
        case Op::Snm3: return "Snm3";
        case Op::Param: return "p";
        case Op::SecondDiff: return "d2";
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Mul: return "mul";
        case Op::Div: return "div";
        case Op::Square: return "sq";
        case Op::Constant: return "";
    }
    return "";
}

void serialize_at(std::span<const Node> nodes, std::size_t& i, std::string& out) {
    const Node& n = nodes[i++];
    if (n.op == Op::Constant) {
        out += fmt::format("{:.17g}", n.value);
        return;
    }
    if (n.op == Op::SecondDiff) {
        out += "(d2)";
        return;
    }
    if (is_leaf(n.op)) {
        out += symbol_of(n.op);
        return;
    }
    out += '(';
    out += symbol_of(n.op);
    for (int c = 0; c < arity(n.op); ++c) {
        out += ' ';
        serialize_at(nodes, i, out);
    }
    out += ')';
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Formula formula() {
        expect('(');
        const std::size_t head_at = skip_ws();
        if (word() != "formula") throw SyntaxError("expected 'formula'", head_at);
        std::optional<Tree> num;
        std::optional<Tree> den;
        double p = 0.0;
        for (;;) {
            const std::size_t at = skip_ws();
            if (peek() == ')') {
                ++pos_;
                break;
            }
            const std::string_view key = word();
            if (key == ":p") {
                p = number();
            } else if (key == ":num") {
                num = tree();
            } else if (key == ":den") {
                den = tree();
            } else if (key.empty()) {
                throw SyntaxError(at >= text_.size() ? "unbalanced parenthesis: missing ')'" : "expected a key",
                                  at);
            } else {
                throw SyntaxError(fmt::format("unknown key '{}'", key), at);
            }
        }
        const std::size_t end_at = skip_ws();
        if (end_at != text_.size()) throw SyntaxError("trailing characters after formula", end_at);
        if (!num) throw SyntaxError("missing :num", end_at);
        if (!den) throw SyntaxError("missing :den", end_at);
        return {std::move(*num), std::move(*den), p};
    }

private:
    Tree tree() {
        const std::size_t at = skip_ws();
        std::vector<Node> nodes;
        expr(nodes);
        Tree t(std::move(nodes));
        if (t.depth() > kMaxDepth) {
            throw SyntaxError(fmt::format("tree depth {} exceeds limit {}", t.depth(), kMaxDepth), at);
        }
        return t;
    }

    void expr(std::vector<Node>& out) {
        const std::size_t at = skip_ws();
        if (at >= text_.size()) throw SyntaxError("unexpected end of input", at);
        if (peek() == ')') throw SyntaxError("unexpected ')'", at);
        if (peek() == '(') {
            ++pos_;
            const std::size_t op_at = skip_ws();
            const std::string_view name = word();
            std::optional<Op> op;
            for (Op candidate : {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Square, Op::SecondDiff}) {
                if (symbol_of(candidate) == name) op = candidate;
            }
            if (!op) throw SyntaxError(fmt::format("unknown operator '{}'", name), op_at);
            out.push_back({*op, 0.0});
            for (int c = 0; c < arity(*op); ++c) expr(out);
            expect(')');
            return;
        }
        const std::string_view token = word();
        for (Op leaf : {Op::Sn, Op::Snm1, Op::Snm2, Op::Snm3, Op::Param, Op::SecondDiff}) {
            if (symbol_of(leaf) == token) {
                out.push_back({leaf, 0.0});
                return;
            }
        }
        out.push_back({Op::Constant, to_number(token, at)});
    }

    double number() {
        const std::size_t at = skip_ws();
        return to_number(word(), at);
    }

    static double to_number(std::string_view token, std::size_t at) {
        double v = 0.0;
        if (!token.empty() && token.front() == '+') token.remove_prefix(1);
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v)) {
            throw SyntaxError(fmt::format("expected a finite number or symbol, got '{}'", token), at);
        }
        return v;
    }

    std::size_t skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void expect(char c) {
        const std::size_t at = skip_ws();
        if (peek() != c) {
            if (c == ')' && at >= text_.size()) throw SyntaxError("unbalanced parenthesis: missing ')'", at);
            throw SyntaxError(fmt::format("expected '{}'", c), at);
        }
        ++pos_;
    }

    std::string_view word() {
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') break;
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string serialize(const Tree& t) {
    std::string out;
    std::size_t i = 0;
    if (t.size() > 0) serialize_at(t.nodes(), i, out);
    return out;
}

std::string serialize(const Formula& f) {
    return fmt::format("(formula :p {:.17g} :num {} :den {})", f.p, serialize(f.numerator), serialize(f.denominator));
}

Formula parse(std::string_view text) { return Parser(text).formula(); }

}  // namespace txaccel::gp
