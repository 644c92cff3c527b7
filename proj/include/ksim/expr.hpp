#pragma once

#include "ksim/errors.hpp"
#include "ksim/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace ksim {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// AST for coefficient expressions: literals, variables x1..xd, binary
/// + - * /, integer powers ^, unary minus, and the fixed function set
/// exp log sqrt sin cos abs min max.
struct Expr {
    struct Literal {
        Scalar value;
    };
    struct Var {
        int index; // 1-based: x1..xd
    };
    struct Neg {
        ExprPtr arg;
    };
    struct Binary {
        char op; // '+', '-', '*', '/'
        ExprPtr lhs, rhs;
    };
    struct Pow {
        ExprPtr base;
        long exponent;
    };
    struct Call {
        std::string name;
        std::vector<ExprPtr> args;
    };

    std::variant<Literal, Var, Neg, Binary, Pow, Call> node;
    std::size_t begin = 0, end = 0; // byte span in the source text
};

/// Parse error with the byte offset into the source string and the set of
/// tokens that would have been accepted there.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& msg, std::size_t offset, std::string expected)
        : ConfigError(msg + " at byte " + std::to_string(offset) +
                      (expected.empty() ? "" : " (expected " + expected + ")")),
          offset_(offset),
          expected_(std::move(expected)) {}

    std::size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

/// Domain error during evaluation (division by zero, log of a nonpositive
/// value, ...), carrying the offending subexpression's text.
class EvalError : public NumericalError {
public:
    EvalError(const std::string& what, std::string subexpr)
        : NumericalError(what + " in subexpression `" + subexpr + "`"),
          subexpr_(std::move(subexpr)) {}

    const std::string& subexpr() const { return subexpr_; }

private:
    std::string subexpr_;
};

ExprPtr parse_expr(const std::string& text, int d);

/// Minimal-parenthesis rendering; parse(pretty_print(e), d) is structurally
/// equal to e (property-tested).
std::string pretty_print(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Reference tree-walking evaluation (the oracle for the compiled tape).
Scalar eval_expr(const Expr& e, const Vec& x);

/// Flat postfix tape for inner-loop evaluation: parse once, evaluate 1e8
/// times. Immutable and shareable; evaluation uses a caller-owned scratch
/// stack (see EvalScratch) so parallel workers never contend.
class CompiledExpr {
public:
    CompiledExpr() = default;
    CompiledExpr(ExprPtr root, int dim);

    int dim() const { return dim_; }
    std::size_t stack_need() const { return max_stack_; }
    const Expr& root() const { return *root_; }

    Scalar eval(const Vec& x, std::vector<Scalar>& stack) const;
    Scalar eval(const Vec& x) const; // allocates its own scratch

private:
    enum class Op : std::uint8_t {
        PushConst, PushVar, Add, Sub, Mul, Div, Neg, PowInt,
        Exp, Log, Sqrt, Sin, Cos, Abs, Min, Max,
    };
    struct Instr {
        Op op;
        Scalar value = 0.0; // PushConst
        std::int32_t arg = 0; // PushVar index (0-based) or PowInt exponent
        const Expr* node = nullptr; // for domain-error reporting
    };

    void emit(const Expr& e);

    ExprPtr root_;
    int dim_ = 0;
    std::vector<Instr> tape_;
    std::size_t max_stack_ = 0;
};

/// Convenience: parse + compile.
CompiledExpr compile_expr(const std::string& text, int d);

/// Sampling report for the a(x) >= 0 requirement (a check, not a proof).
struct NonnegativityReport {
    Scalar min_value = kInf;
    Vec min_point;
    std::vector<std::pair<Vec, Scalar>> violations;
    std::vector<std::pair<Vec, std::string>> errors;
    bool pass() const { return violations.empty() && errors.empty(); }
};

NonnegativityReport check_nonnegative(const CompiledExpr& e, const std::vector<Vec>& grid);

} // namespace ksim
