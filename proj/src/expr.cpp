#include "ksim/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

namespace ksim {
namespace {

int arity_of(const std::string& name) {
    static const std::map<std::string, int> table = {
        {"exp", 1}, {"log", 1}, {"sqrt", 1}, {"sin", 1},
        {"cos", 1}, {"abs", 1}, {"min", 2},  {"max", 2},
    };
    auto it = table.find(name);
    return it == table.end() ? -1 : it->second;
}

class Parser {
public:
    Parser(const std::string& text, int d) : text_(text), d_(d) {}

    ExprPtr run() {
        skip_ws();
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input", "end of input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg, const std::string& expected) const {
        throw ParseError(msg, pos_, expected);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    ExprPtr make(std::size_t begin, Expr e) const {
        e.begin = begin;
        e.end = pos_;
        return std::make_shared<Expr>(std::move(e));
    }

    ExprPtr parse_sum() {
        std::size_t begin = pos_;
        ExprPtr lhs = parse_product();
        for (;;) {
            const char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            ExprPtr rhs = parse_product();
            lhs = make(begin, Expr{Expr::Binary{c, lhs, rhs}});
        }
    }

    ExprPtr parse_product() {
        std::size_t begin = pos_;
        ExprPtr lhs = parse_unary();
        for (;;) {
            const char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            ExprPtr rhs = parse_unary();
            lhs = make(begin, Expr{Expr::Binary{c, lhs, rhs}});
        }
    }

    ExprPtr parse_unary() {
        std::size_t begin = pos_;
        if (eat('-')) {
            ExprPtr arg = parse_unary();
            return make(begin, Expr{Expr::Neg{arg}});
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        std::size_t begin = pos_;
        ExprPtr base = parse_atom();
        if (peek() == '^') {
            ++pos_;
            const long n = parse_int_exponent();
            return make(begin, Expr{Expr::Pow{base, n}});
        }
        return base;
    }

    long parse_int_exponent() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
        std::size_t digits_start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == digits_start) fail("malformed exponent", "integer literal");
        long n = 0;
        auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, n);
        if (ec != std::errc() || p != text_.data() + pos_) fail("malformed exponent", "integer literal");
        return n;
    }

    ExprPtr parse_atom() {
        skip_ws();
        std::size_t begin = pos_;
        if (pos_ >= text_.size()) fail("unexpected end of input", "number, variable, function, or '('");
        const char c = text_[pos_];

        if (c == '(') {
            ++pos_;
            ExprPtr inner = parse_sum();
            if (!eat(')')) fail("unbalanced parenthesis", "')'");
            // keep the inner node; the span widening is irrelevant to structure
            return inner;
        }

        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();

        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t id_start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name = text_.substr(id_start, pos_ - id_start);

            if (name.size() >= 2 && name[0] == 'x' &&
                std::all_of(name.begin() + 1, name.end(),
                            [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
                int idx = 0;
                std::from_chars(name.data() + 1, name.data() + name.size(), idx);
                if (idx < 1 || idx > d_) {
                    pos_ = id_start;
                    fail("variable index out of range for dimension " + std::to_string(d_),
                         d_ == 1 ? "x1" : "x1..x" + std::to_string(d_));
                }
                return make(id_start, Expr{Expr::Var{idx}});
            }

            const int arity = arity_of(name);
            if (arity < 0) {
                pos_ = id_start;
                fail("unknown identifier `" + name + "`", "exp log sqrt sin cos abs min max or a variable");
            }
            if (!eat('(')) fail("function `" + name + "` requires arguments", "'('");
            std::vector<ExprPtr> args;
            args.push_back(parse_sum());
            while (eat(',')) args.push_back(parse_sum());
            if (!eat(')')) fail("unbalanced call parenthesis", "')' or ','");
            if (static_cast<int>(args.size()) != arity)
                throw ParseError("function `" + name + "` takes " + std::to_string(arity) +
                                     " argument(s), got " + std::to_string(args.size()),
                                 id_start, "");
            return make(id_start, Expr{Expr::Call{name, std::move(args)}});
        }

        fail(std::string("unexpected character `") + c + "`", "number, variable, function, or '('");
    }

    ExprPtr parse_number() {
        std::size_t begin = pos_;
        Scalar v = 0;
        auto [p, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
        if (ec != std::errc()) fail("malformed number", "numeric literal");
        pos_ = static_cast<std::size_t>(p - text_.data());
        return make(begin, Expr{Expr::Literal{v}});
    }

    const std::string& text_;
    int d_;
    std::size_t pos_ = 0;
};

int precedence_of(const Expr& e) {
    // larger binds tighter; mirrors the grammar: ^ > unary- > * / > + -
    struct V {
        int operator()(const Expr::Literal&) const { return 100; }
        int operator()(const Expr::Var&) const { return 100; }
        int operator()(const Expr::Call&) const { return 100; }
        int operator()(const Expr::Pow&) const { return 30; }
        int operator()(const Expr::Neg&) const { return 20; }
        int operator()(const Expr::Binary& b) const { return (b.op == '*' || b.op == '/') ? 10 : 5; }
    };
    return std::visit(V{}, e.node);
}

void print_rec(const Expr& e, std::string& out);

void print_child(const Expr& child, int parent_prec, bool needs_tighter, std::string& out) {
    const bool parens = needs_tighter ? precedence_of(child) <= parent_prec
                                      : precedence_of(child) < parent_prec;
    if (parens) out += '(';
    print_rec(child, out);
    if (parens) out += ')';
}

void print_rec(const Expr& e, std::string& out) {
    struct V {
        std::string& out;
        const Expr& e;
        void operator()(const Expr::Literal& l) const {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", l.value);
            // a negative literal renders via unary minus on the positive part
            out += buf;
        }
        void operator()(const Expr::Var& v) const { out += "x" + std::to_string(v.index); }
        void operator()(const Expr::Neg& n) const {
            out += '-';
            print_child(*n.arg, precedence_of(e), true, out);
        }
        void operator()(const Expr::Binary& b) const {
            const int prec = precedence_of(e);
            // left-assoc: left child may tie, right child must bind tighter
            print_child(*b.lhs, prec, false, out);
            out += b.op;
            const bool rhs_tight = b.op == '-' || b.op == '/' ||
                                   b.op == '+' || b.op == '*';
            print_child(*b.rhs, prec, rhs_tight, out);
        }
        void operator()(const Expr::Pow& p) const {
            print_child(*p.base, precedence_of(e), true, out);
            out += '^';
            out += std::to_string(p.exponent);
        }
        void operator()(const Expr::Call& c) const {
            out += c.name;
            out += '(';
            for (std::size_t i = 0; i < c.args.size(); ++i) {
                if (i) out += ',';
                print_rec(*c.args[i], out);
            }
            out += ')';
        }
    };
    std::visit(V{out, e}, e.node);
}

Scalar apply_call(const std::string& name, Scalar a, Scalar b, const Expr& node) {
    if (name == "exp") return std::exp(a);
    if (name == "log") {
        if (!(a > 0)) throw EvalError("log of nonpositive value", pretty_print(node));
        return std::log(a);
    }
    if (name == "sqrt") {
        if (a < 0) throw EvalError("sqrt of negative value", pretty_print(node));
        return std::sqrt(a);
    }
    if (name == "sin") return std::sin(a);
    if (name == "cos") return std::cos(a);
    if (name == "abs") return std::abs(a);
    if (name == "min") return std::min(a, b);
    if (name == "max") return std::max(a, b);
    throw StructuralError("unknown function: " + name);
}

Scalar pow_int(Scalar base, long n, const Expr& node) {
    if (n < 0) {
        if (base == 0.0) throw EvalError("zero raised to a negative power", pretty_print(node));
        return 1.0 / pow_int(base, -n, node);
    }
    Scalar r = 1.0, b = base;
    for (long k = n; k > 0; k >>= 1) {
        if (k & 1) r *= b;
        b *= b;
    }
    return r;
}

} // namespace

ExprPtr parse_expr(const std::string& text, int d) {
    if (d < 1) throw ConfigError("expression dimension must be >= 1");
    return Parser(text, d).run();
}

std::string pretty_print(const Expr& e) {
    std::string out;
    print_rec(e, out);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    struct V {
        const Expr& b;
        bool operator()(const Expr::Literal& l) const {
            return l.value == std::get<Expr::Literal>(b.node).value;
        }
        bool operator()(const Expr::Var& v) const {
            return v.index == std::get<Expr::Var>(b.node).index;
        }
        bool operator()(const Expr::Neg& n) const {
            return structurally_equal(*n.arg, *std::get<Expr::Neg>(b.node).arg);
        }
        bool operator()(const Expr::Binary& x) const {
            const auto& y = std::get<Expr::Binary>(b.node);
            return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                   structurally_equal(*x.rhs, *y.rhs);
        }
        bool operator()(const Expr::Pow& p) const {
            const auto& q = std::get<Expr::Pow>(b.node);
            return p.exponent == q.exponent && structurally_equal(*p.base, *q.base);
        }
        bool operator()(const Expr::Call& c) const {
            const auto& d = std::get<Expr::Call>(b.node);
            if (c.name != d.name || c.args.size() != d.args.size()) return false;
            for (std::size_t i = 0; i < c.args.size(); ++i)
                if (!structurally_equal(*c.args[i], *d.args[i])) return false;
            return true;
        }
    };
    return std::visit(V{b}, a.node);
}

Scalar eval_expr(const Expr& e, const Vec& x) {
    struct V {
        const Vec& x;
        const Expr& e;
        Scalar operator()(const Expr::Literal& l) const { return l.value; }
        Scalar operator()(const Expr::Var& v) const {
            if (v.index > x.size()) throw StructuralError("eval_expr: variable beyond input dimension");
            return x[v.index - 1];
        }
        Scalar operator()(const Expr::Neg& n) const { return -eval_expr(*n.arg, x); }
        Scalar operator()(const Expr::Binary& b) const {
            const Scalar l = eval_expr(*b.lhs, x);
            const Scalar r = eval_expr(*b.rhs, x);
            switch (b.op) {
                case '+': return l + r;
                case '-': return l - r;
                case '*': return l * r;
                default:
                    if (r == 0.0) throw EvalError("division by zero", pretty_print(e));
                    return l / r;
            }
        }
        Scalar operator()(const Expr::Pow& p) const {
            return pow_int(eval_expr(*p.base, x), p.exponent, e);
        }
        Scalar operator()(const Expr::Call& c) const {
            const Scalar a = eval_expr(*c.args[0], x);
            const Scalar b = c.args.size() > 1 ? eval_expr(*c.args[1], x) : 0.0;
            return apply_call(c.name, a, b, e);
        }
    };
    return std::visit(V{x, e}, e.node);
}

CompiledExpr::CompiledExpr(ExprPtr root, int dim) : root_(std::move(root)), dim_(dim) {
    emit(*root_);
    // stack depth: walk the tape once
    std::size_t depth = 0;
    for (const Instr& ins : tape_) {
        switch (ins.op) {
            case Op::PushConst:
            case Op::PushVar:
                ++depth;
                break;
            case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
            case Op::Min: case Op::Max:
                --depth;
                break;
            default:
                break; // unary ops keep depth
        }
        max_stack_ = std::max(max_stack_, depth);
    }
}

void CompiledExpr::emit(const Expr& e) {
    struct V {
        CompiledExpr& c;
        const Expr& e;
        void operator()(const Expr::Literal& l) const {
            c.tape_.push_back({Op::PushConst, l.value, 0, &e});
        }
        void operator()(const Expr::Var& v) const {
            c.tape_.push_back({Op::PushVar, 0.0, v.index - 1, &e});
        }
        void operator()(const Expr::Neg& n) const {
            c.emit(*n.arg);
            c.tape_.push_back({Op::Neg, 0.0, 0, &e});
        }
        void operator()(const Expr::Binary& b) const {
            c.emit(*b.lhs);
            c.emit(*b.rhs);
            Op op = Op::Add;
            if (b.op == '-') op = Op::Sub;
            else if (b.op == '*') op = Op::Mul;
            else if (b.op == '/') op = Op::Div;
            c.tape_.push_back({op, 0.0, 0, &e});
        }
        void operator()(const Expr::Pow& p) const {
            c.emit(*p.base);
            c.tape_.push_back({Op::PowInt, 0.0, static_cast<std::int32_t>(p.exponent), &e});
        }
        void operator()(const Expr::Call& call) const {
            for (const ExprPtr& a : call.args) c.emit(*a);
            Op op = Op::Exp;
            if (call.name == "log") op = Op::Log;
            else if (call.name == "sqrt") op = Op::Sqrt;
            else if (call.name == "sin") op = Op::Sin;
            else if (call.name == "cos") op = Op::Cos;
            else if (call.name == "abs") op = Op::Abs;
            else if (call.name == "min") op = Op::Min;
            else if (call.name == "max") op = Op::Max;
            c.tape_.push_back({op, 0.0, 0, &e});
        }
    };
    std::visit(V{*this, e}, e.node);
}

Scalar CompiledExpr::eval(const Vec& x, std::vector<Scalar>& stack) const {
    if (x.size() < dim_) throw StructuralError("compiled expr: input dimension too small");
    stack.resize(max_stack_);
    std::size_t top = 0; // next free slot
    for (const Instr& ins : tape_) {
        switch (ins.op) {
            case Op::PushConst: stack[top++] = ins.value; break;
            case Op::PushVar: stack[top++] = x[ins.arg]; break;
            case Op::Add: --top; stack[top - 1] += stack[top]; break;
            case Op::Sub: --top; stack[top - 1] -= stack[top]; break;
            case Op::Mul: --top; stack[top - 1] *= stack[top]; break;
            case Op::Div:
                --top;
                if (stack[top] == 0.0) throw EvalError("division by zero", pretty_print(*ins.node));
                stack[top - 1] /= stack[top];
                break;
            case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
            case Op::PowInt: stack[top - 1] = pow_int(stack[top - 1], ins.arg, *ins.node); break;
            case Op::Exp: stack[top - 1] = std::exp(stack[top - 1]); break;
            case Op::Log:
                if (!(stack[top - 1] > 0))
                    throw EvalError("log of nonpositive value", pretty_print(*ins.node));
                stack[top - 1] = std::log(stack[top - 1]);
                break;
            case Op::Sqrt:
                if (stack[top - 1] < 0)
                    throw EvalError("sqrt of negative value", pretty_print(*ins.node));
                stack[top - 1] = std::sqrt(stack[top - 1]);
                break;
            case Op::Sin: stack[top - 1] = std::sin(stack[top - 1]); break;
            case Op::Cos: stack[top - 1] = std::cos(stack[top - 1]); break;
            case Op::Abs: stack[top - 1] = std::abs(stack[top - 1]); break;
            case Op::Min: --top; stack[top - 1] = std::min(stack[top - 1], stack[top]); break;
            case Op::Max: --top; stack[top - 1] = std::max(stack[top - 1], stack[top]); break;
        }
    }
    return stack[0];
}

Scalar CompiledExpr::eval(const Vec& x) const {
    std::vector<Scalar> stack;
    return eval(x, stack);
}

CompiledExpr compile_expr(const std::string& text, int d) {
    return CompiledExpr(parse_expr(text, d), d);
}

NonnegativityReport check_nonnegative(const CompiledExpr& e, const std::vector<Vec>& grid) {
    if (grid.empty()) throw ConfigError("check_nonnegative: empty grid");
    NonnegativityReport rep;
    std::vector<Scalar> stack;
    for (const Vec& x : grid) {
        Scalar v;
        try {
            v = e.eval(x, stack);
        } catch (const EvalError& err) {
            rep.errors.emplace_back(x, err.what());
            continue;
        }
        if (v < rep.min_value) {
            rep.min_value = v;
            rep.min_point = x;
        }
        if (v < 0) rep.violations.emplace_back(x, v);
    }
    return rep;
}

} // namespace ksim
