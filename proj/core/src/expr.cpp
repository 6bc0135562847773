#include "clk/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "clk/errors.hpp"
#include "clk/multi_index.hpp"

namespace clk {

struct Expr::Node {
    enum class Kind { Number, ImagUnit, Var, Unary, Binary, Call } kind;
    double number = 0.0;
    char var_kind = 'z';  // 'x', 'y', 'z'
    int var_index = 0;    // zero-based
    char op = '+';
    std::string fn;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct Parser {
    const std::string& text;
    std::size_t pos = 0;
    int n;

    explicit Parser(const std::string& t, int n_) : text(t), n(n_) {}

    void skip() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return pos < text.size() ? text[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("expression parse error at position " + std::to_string(pos) + ": " + why +
                          " in \"" + text + "\"");
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (eat('+'))
                lhs = binary('+', lhs, parse_term());
            else if (eat('-'))
                lhs = binary('-', lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_power();
        for (;;) {
            if (eat('*'))
                lhs = binary('*', lhs, parse_power());
            else if (eat('/'))
                lhs = binary('/', lhs, parse_power());
            else
                return lhs;
        }
    }

    NodePtr parse_power() {
        NodePtr base = parse_unary();
        if (eat('^')) return binary('^', base, parse_power());  // right associative
        return base;
    }

    NodePtr parse_unary() {
        if (eat('-')) {
            auto node = std::make_shared<Expr::Node>();
            node->kind = Expr::Node::Kind::Unary;
            node->op = '-';
            node->lhs = parse_unary();
            return node;
        }
        if (eat('+')) return parse_unary();
        return parse_primary();
    }

    NodePtr parse_primary() {
        skip();
        if (pos >= text.size()) fail("unexpected end of input");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            NodePtr e = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        fail("unexpected character");
    }

    NodePtr parse_number() {
        const char* start = text.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(start, &end);
        if (end == start) fail("malformed number");
        pos += static_cast<std::size_t>(end - start);
        auto node = std::make_shared<Expr::Node>();
        node->kind = Expr::Node::Kind::Number;
        node->number = v;
        return node;
    }

    NodePtr parse_ident() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (name == "i") {
            auto node = std::make_shared<Expr::Node>();
            node->kind = Expr::Node::Kind::ImagUnit;
            return node;
        }
        if (name == "conj" || name == "abs2" || name == "re" || name == "im") {
            if (!eat('(')) fail("expected '(' after " + name);
            NodePtr arg = parse_expr();
            if (!eat(')')) fail("expected ')'");
            auto node = std::make_shared<Expr::Node>();
            node->kind = Expr::Node::Kind::Call;
            node->fn = name;
            node->lhs = arg;
            return node;
        }
        // variables x<k>, y<k>, z<k>
        if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'y' || name[0] == 'z')) {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                int idx = std::atoi(name.c_str() + 1);
                if (idx < 1 || idx > n) fail("variable index out of range: " + name);
                auto node = std::make_shared<Expr::Node>();
                node->kind = Expr::Node::Kind::Var;
                node->var_kind = name[0];
                node->var_index = idx - 1;
                return node;
            }
        }
        fail("unknown identifier '" + name + "'");
    }

    NodePtr binary(char op, NodePtr lhs, NodePtr rhs) {
        auto node = std::make_shared<Expr::Node>();
        node->kind = Expr::Node::Kind::Binary;
        node->op = op;
        node->lhs = std::move(lhs);
        node->rhs = std::move(rhs);
        return node;
    }
};

Complex eval_node(const Expr::Node& node, const CPoint& z) {
    using Kind = Expr::Node::Kind;
    switch (node.kind) {
        case Kind::Number: return node.number;
        case Kind::ImagUnit: return Complex(0.0, 1.0);
        case Kind::Var:
            switch (node.var_kind) {
                case 'x': return z.x(node.var_index);
                case 'y': return z.y(node.var_index);
                default: return z[node.var_index];
            }
        case Kind::Unary: return -eval_node(*node.lhs, z);
        case Kind::Call: {
            Complex a = eval_node(*node.lhs, z);
            if (node.fn == "conj") return std::conj(a);
            if (node.fn == "abs2") return abs2(a);
            if (node.fn == "re") return a.real();
            return a.imag();
        }
        case Kind::Binary: {
            Complex a = eval_node(*node.lhs, z);
            Complex b = eval_node(*node.rhs, z);
            switch (node.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                default: break;
            }
            // power with real constant exponent
            if (std::abs(b.imag()) > 1e-14)
                throw ConfigError("expression: exponent must be real");
            return std::pow(a, b.real());
        }
    }
    return 0.0;
}

bool is_constant(const Expr::Node& node) {
    using Kind = Expr::Node::Kind;
    switch (node.kind) {
        case Kind::Number:
        case Kind::ImagUnit: return true;
        case Kind::Var: return false;
        case Kind::Unary: return is_constant(*node.lhs);
        case Kind::Call: return is_constant(*node.lhs);
        case Kind::Binary: return is_constant(*node.lhs) && is_constant(*node.rhs);
    }
    return false;
}

void validate_powers(const Expr::Node& node, int n) {
    using Kind = Expr::Node::Kind;
    if (node.kind == Kind::Binary) {
        if (node.op == '^') {
            if (!is_constant(*node.rhs)) throw ConfigError("expression: exponent must be a constant");
            Complex e = eval_node(*node.rhs, CPoint(n));
            if (std::abs(e.imag()) > 1e-14) throw ConfigError("expression: exponent must be real");
        }
        validate_powers(*node.lhs, n);
        validate_powers(*node.rhs, n);
    } else if (node.lhs) {
        validate_powers(*node.lhs, n);
    }
}

}  // namespace

Expr Expr::parse(const std::string& text, int n) {
    Parser p(text, n);
    NodePtr root = p.parse_expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    validate_powers(*root, n);
    Expr e;
    e.root_ = root;
    e.source_ = text;
    return e;
}

Complex Expr::eval(const CPoint& z) const { return eval_node(*root_, z); }

namespace {

MultiIndex parse_multi_index(const std::string& key, int n, int q) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < key.size(); ++i) {
        char c = key[i];
        if (c == ',' || c == ' ') continue;
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ConfigError("bad multi-index key '" + key + "'");
        idx.push_back(c - '0');
    }
    if (static_cast<int>(idx.size()) != q)
        throw ConfigError("multi-index '" + key + "' has wrong length for q");
    std::uint32_t mask = 0;
    for (int i : idx) {
        if (i < 1 || i > n) throw ConfigError("multi-index '" + key + "' out of range");
        if (mask & (1u << (i - 1))) throw ConfigError("multi-index '" + key + "' repeats an index");
        mask |= 1u << (i - 1);
    }
    return MultiIndex(mask);
}

}  // namespace

FormField expression_form_field(int n, int q, const std::map<std::string, std::string>& coefficients) {
    if (q < 0 || q > n) throw DegreeError("expression_form_field: q out of range");
    MultiIndexSet set(n, q);
    std::vector<std::shared_ptr<Expr>> exprs(static_cast<std::size_t>(set.count()));
    if (q == 0) {
        auto it = coefficients.begin();
        if (coefficients.size() != 1)
            throw ConfigError("scalar data expects exactly one coefficient expression");
        exprs[0] = std::make_shared<Expr>(Expr::parse(it->second, n));
    } else {
        for (const auto& [key, text] : coefficients) {
            MultiIndex m = parse_multi_index(key, n, q);
            exprs[static_cast<std::size_t>(set.ordinal(m.mask()))] = std::make_shared<Expr>(Expr::parse(text, n));
        }
    }
    FormField f;
    f.n = n;
    f.q = q;
    f.eval = [n, q, exprs](const CPoint& z) {
        FormValue v(n, q);
        for (std::size_t i = 0; i < exprs.size(); ++i)
            if (exprs[i]) v[static_cast<int>(i)] = exprs[i]->eval(z);
        return v;
    };
    return f;
}

}  // namespace clk
