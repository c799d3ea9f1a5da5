#include "collage/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <system_error>

namespace collage {

namespace {

struct Dual {
    double v;
    double d;
};

bool is_integral(double b) { return std::isfinite(b) && std::trunc(b) == b; }

double checked_pow(double a, double b, std::size_t offset) {
    if (is_integral(b)) {
        if (a == 0.0 && b < 0.0) throw EvalError("division by zero in power", offset);
        return std::pow(a, b);
    }
    if (a <= 0.0) throw EvalError("non-integer power of non-positive base", offset);
    return std::exp(b * std::log(a));
}

template <class T>
T apply(const ExprNode& node, double x);

template <>
double apply<double>(const ExprNode& node, double x) {
    struct Visitor {
        double x;
        std::size_t offset;
        double operator()(const NumberNode& n) const { return n.value; }
        double operator()(const VariableNode&) const { return x; }
        double operator()(const NegateNode& n) const { return -apply<double>(*n.operand, x); }
        double operator()(const BinaryNode& n) const {
            const double a = apply<double>(*n.lhs, x);
            const double b = apply<double>(*n.rhs, x);
            switch (n.op) {
                case BinaryOp::add: return a + b;
                case BinaryOp::sub: return a - b;
                case BinaryOp::mul: return a * b;
                case BinaryOp::div:
                    if (b == 0.0) throw EvalError("division by zero", offset);
                    return a / b;
                case BinaryOp::pow: return checked_pow(a, b, offset);
            }
            return 0.0;
        }
        double operator()(const CallNode& n) const {
            const double a = apply<double>(*n.arg, x);
            switch (n.fn) {
                case UnaryFn::sin: return std::sin(a);
                case UnaryFn::cos: return std::cos(a);
                case UnaryFn::exp: return std::exp(a);
                case UnaryFn::sqrt:
                    if (a < 0.0) throw EvalError("sqrt of negative value", offset);
                    return std::sqrt(a);
                case UnaryFn::log:
                    if (a <= 0.0) throw EvalError("log of non-positive value", offset);
                    return std::log(a);
                case UnaryFn::abs: return std::fabs(a);
            }
            return 0.0;
        }
    };
    return std::visit(Visitor{x, node.offset}, node.data);
}

template <>
Dual apply<Dual>(const ExprNode& node, double x) {
    struct Visitor {
        double x;
        std::size_t offset;
        Dual operator()(const NumberNode& n) const { return {n.value, 0.0}; }
        Dual operator()(const VariableNode&) const { return {x, 1.0}; }
        Dual operator()(const NegateNode& n) const {
            const Dual a = apply<Dual>(*n.operand, x);
            return {-a.v, -a.d};
        }
        Dual operator()(const BinaryNode& n) const {
            const Dual a = apply<Dual>(*n.lhs, x);
            const Dual b = apply<Dual>(*n.rhs, x);
            switch (n.op) {
                case BinaryOp::add: return {a.v + b.v, a.d + b.d};
                case BinaryOp::sub: return {a.v - b.v, a.d - b.d};
                case BinaryOp::mul: return {a.v * b.v, a.d * b.v + a.v * b.d};
                case BinaryOp::div: {
                    if (b.v == 0.0) throw EvalError("division by zero", offset);
                    const double q = a.v / b.v;
                    return {q, (a.d - q * b.d) / b.v};
                }
                case BinaryOp::pow: {
                    const double p = checked_pow(a.v, b.v, offset);
                    double d = 0.0;
                    if (a.d != 0.0) {
                        d += (b.v == 0.0) ? 0.0 : b.v * checked_pow(a.v, b.v - 1.0, offset) * a.d;
                    }
                    if (b.d != 0.0) {
                        if (a.v <= 0.0) throw EvalError("variable exponent of non-positive base", offset);
                        d += p * std::log(a.v) * b.d;
                    }
                    return {p, d};
                }
            }
            return {0.0, 0.0};
        }
        Dual operator()(const CallNode& n) const {
            const Dual a = apply<Dual>(*n.arg, x);
            switch (n.fn) {
                case UnaryFn::sin: return {std::sin(a.v), std::cos(a.v) * a.d};
                case UnaryFn::cos: return {std::cos(a.v), -std::sin(a.v) * a.d};
                case UnaryFn::exp: {
                    const double ev = std::exp(a.v);
                    return {ev, ev * a.d};
                }
                case UnaryFn::sqrt: {
                    if (a.v < 0.0) throw EvalError("sqrt of negative value", offset);
                    const double s = std::sqrt(a.v);
                    if (s == 0.0) {
                        if (a.d != 0.0) throw EvalError("derivative of sqrt at zero", offset);
                        return {0.0, 0.0};
                    }
                    return {s, a.d / (2.0 * s)};
                }
                case UnaryFn::log:
                    if (a.v <= 0.0) throw EvalError("log of non-positive value", offset);
                    return {std::log(a.v), a.d / a.v};
                case UnaryFn::abs:
                    return {std::fabs(a.v), a.v < 0.0 ? -a.d : a.d};
            }
            return {0.0, 0.0};
        }
    };
    return std::visit(Visitor{x, node.offset}, node.data);
}

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const double mag = std::fabs(v);
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), mag);
    std::string digits(buf.data(), res.ptr);
    if (std::signbit(v)) return "(-" + digits + ")";
    return digits;
}

constexpr std::string_view fn_name(UnaryFn fn) {
    switch (fn) {
        case UnaryFn::sin: return "sin";
        case UnaryFn::cos: return "cos";
        case UnaryFn::exp: return "exp";
        case UnaryFn::sqrt: return "sqrt";
        case UnaryFn::log: return "log";
        case UnaryFn::abs: return "abs";
    }
    return "?";
}

constexpr char op_char(BinaryOp op) {
    switch (op) {
        case BinaryOp::add: return '+';
        case BinaryOp::sub: return '-';
        case BinaryOp::mul: return '*';
        case BinaryOp::div: return '/';
        case BinaryOp::pow: return '^';
    }
    return '?';
}

void print(const ExprNode& node, std::string& out) {
    std::visit(
        [&out](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, NumberNode>) {
                out += format_number(n.value);
            } else if constexpr (std::is_same_v<N, VariableNode>) {
                out += 'x';
            } else if constexpr (std::is_same_v<N, NegateNode>) {
                out += "(-";
                print(*n.operand, out);
                out += ')';
            } else if constexpr (std::is_same_v<N, BinaryNode>) {
                out += '(';
                print(*n.lhs, out);
                out += op_char(n.op);
                print(*n.rhs, out);
                out += ')';
            } else {
                out += fn_name(n.fn);
                out += '(';
                print(*n.arg, out);
                out += ')';
            }
        },
        node.data);
}

// ---------------------------------------------------------------------------
// Parsing

ExprPtr node_at(std::size_t offset, auto&& payload) {
    auto n = std::make_shared<ExprNode>();
    n->data = std::forward<decltype(payload)>(payload);
    n->offset = offset;
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprPtr parse_all() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) {
            if (src_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
            throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        }
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr parse_sum() {
        ExprPtr lhs = parse_product();
        for (;;) {
            skip_ws();
            const std::size_t at = pos_;
            if (accept('+')) {
                lhs = node_at(at, BinaryNode{BinaryOp::add, lhs, parse_product()});
            } else if (accept('-')) {
                lhs = node_at(at, BinaryNode{BinaryOp::sub, lhs, parse_product()});
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_product() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            skip_ws();
            const std::size_t at = pos_;
            if (accept('*')) {
                lhs = node_at(at, BinaryNode{BinaryOp::mul, lhs, parse_unary()});
            } else if (accept('/')) {
                lhs = node_at(at, BinaryNode{BinaryOp::div, lhs, parse_unary()});
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_unary() {
        skip_ws();
        const std::size_t at = pos_;
        if (accept('-')) return node_at(at, NegateNode{parse_unary()});
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        skip_ws();
        const std::size_t at = pos_;
        if (accept('^')) return node_at(at, BinaryNode{BinaryOp::pow, base, parse_unary()});
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        const std::size_t at = pos_;
        if (pos_ == src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr inner = parse_sum();
            if (!accept(')')) throw ParseError("unbalanced '(' (missing ')')", at);
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return parse_identifier();
        if (c == ')') throw ParseError("unbalanced ')'", pos_);
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        auto digit = [&](std::size_t i) { return i < src_.size() && src_[i] >= '0' && src_[i] <= '9'; };
        std::size_t i = pos_;
        bool any = false;
        while (digit(i)) { ++i; any = true; }
        if (i < src_.size() && src_[i] == '.') {
            ++i;
            while (digit(i)) { ++i; any = true; }
        }
        if (!any) throw ParseError("malformed number", start);
        // Exponent only if followed by digits; otherwise 'e' is the constant.
        if (i < src_.size() && (src_[i] == 'e' || src_[i] == 'E')) {
            std::size_t j = i + 1;
            if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
            if (digit(j)) {
                while (digit(j)) ++j;
                i = j;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + i, v);
        if (ec != std::errc() || ptr != src_.data() + i) throw ParseError("malformed number", start);
        pos_ = i;
        return node_at(start, NumberNode{v});
    }

    ExprPtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && ((src_[pos_] >= 'a' && src_[pos_] <= 'z') ||
                                      (src_[pos_] >= 'A' && src_[pos_] <= 'Z') ||
                                      (src_[pos_] >= '0' && src_[pos_] <= '9') || src_[pos_] == '_'))
            ++pos_;
        const std::string_view id = src_.substr(start, pos_ - start);
        if (id == "x") return node_at(start, VariableNode{});
        if (id == "e") return node_at(start, NumberNode{std::numbers::e});
        if (id == "pi") return node_at(start, NumberNode{std::numbers::pi});

        static constexpr std::array<std::pair<std::string_view, UnaryFn>, 6> fns{{
            {"sin", UnaryFn::sin},
            {"cos", UnaryFn::cos},
            {"exp", UnaryFn::exp},
            {"sqrt", UnaryFn::sqrt},
            {"log", UnaryFn::log},
            {"abs", UnaryFn::abs},
        }};
        for (const auto& [name, fn] : fns) {
            if (id != name) continue;
            if (!accept('(')) throw ParseError("expected '(' after " + std::string(id), pos_);
            ExprPtr arg = parse_sum();
            if (!accept(')')) throw ParseError("unbalanced '(' in call to " + std::string(id), start);
            return node_at(start, CallNode{fn, arg});
        }
        throw ParseError("unknown identifier '" + std::string(id) + "'", start);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(ExprPtr root) : root_(std::move(root)) {
    if (!root_) throw std::invalid_argument("Expression: null root");
}

double Expression::evaluate(double x) const { return apply<double>(*root_, x); }

ValueAndSlope Expression::evaluate_with_slope(double x) const {
    const Dual r = apply<Dual>(*root_, x);
    return {r.v, r.d};
}

std::string Expression::to_string() const {
    std::string out;
    print(*root_, out);
    return out;
}

Expression parse(std::string_view source) { return Expression(Parser(source).parse_all()); }

ExprPtr make_number(double v) { return node_at(0, NumberNode{v}); }
ExprPtr make_variable() { return node_at(0, VariableNode{}); }
ExprPtr make_negate(ExprPtr operand) { return node_at(0, NegateNode{std::move(operand)}); }
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    return node_at(0, BinaryNode{op, std::move(lhs), std::move(rhs)});
}
ExprPtr make_call(UnaryFn fn, ExprPtr arg) { return node_at(0, CallNode{fn, std::move(arg)}); }

}  // namespace collage
