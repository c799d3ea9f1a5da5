#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace collage {

/// Raised by parse() for malformed input. offset() is the byte position in
/// the source where the problem was detected.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Raised when an expression is evaluated outside the domain of one of its
/// operations (division by zero, log of a non-positive value, ...).
class EvalError : public std::domain_error {
public:
    EvalError(const std::string& what, std::size_t offset)
        : std::domain_error(what + " (node at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

enum class UnaryFn { sin, cos, exp, sqrt, log, abs };
enum class BinaryOp { add, sub, mul, div, pow };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct NumberNode { double value; };
struct VariableNode {};
struct NegateNode { ExprPtr operand; };
struct BinaryNode { BinaryOp op; ExprPtr lhs; ExprPtr rhs; };
struct CallNode { UnaryFn fn; ExprPtr arg; };

struct ExprNode {
    std::variant<NumberNode, VariableNode, NegateNode, BinaryNode, CallNode> data;
    std::size_t offset = 0;
};

/// Value and first derivative of an expression at a point (forward-mode AD).
struct ValueAndSlope {
    double value;
    double slope;
};

/// Immutable univariate expression in the variable `x`.
///
/// Grammar, loosest to tightest binding:
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := atom ('^' unary)?            (right associative)
///   atom    := number | 'x' | 'e' | 'pi' | fn '(' sum ')' | '(' sum ')'
///
/// Copies share the tree; evaluation never mutates, so an Expression may be
/// evaluated from several threads at once.
class Expression {
public:
    explicit Expression(ExprPtr root);

    double operator()(double x) const { return evaluate(x); }
    double evaluate(double x) const;
    ValueAndSlope evaluate_with_slope(double x) const;

    /// Fully parenthesised source text; parse(to_string()) rebuilds the same tree.
    std::string to_string() const;

    const ExprNode& root() const noexcept { return *root_; }

private:
    ExprPtr root_;
};

Expression parse(std::string_view source);

// AST builders, mainly for generated expressions in tests.
ExprPtr make_number(double v);
ExprPtr make_variable();
ExprPtr make_negate(ExprPtr operand);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_call(UnaryFn fn, ExprPtr arg);

}  // namespace collage
