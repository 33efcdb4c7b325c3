#include "fminlab/expression.hpp"

#include "fminlab/errors.hpp"

#include <cctype>
#include <cmath>
#include <set>

namespace fminlab {

struct Expression::Node {
    enum Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
    double number = 0.0;
    std::string name; // variable or function
    std::shared_ptr<const Node> lhs, rhs;

    bool constant() const {
        switch (kind) {
        case Number: return true;
        case Variable: return false;
        default: return (!lhs || lhs->constant()) && (!rhs || rhs->constant());
        }
    }
};

namespace {

typedef std::shared_ptr<const Expression::Node> NodePtr;
typedef Expression::Node Node;

const std::set<std::string> kFunctions = {"sin", "cos", "exp", "log", "sqrt"};

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (p_ != s_.size()) fail("unexpected character");
        return e;
    }

private:
    std::string_view s_;
    std::size_t p_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ArgumentError("expression: " + what + " at position " + std::to_string(p_) + " in '" +
                            std::string(s_) + "'");
    }

    void skip() {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
    }

    bool accept(char c) {
        skip();
        if (p_ < s_.size() && s_[p_] == c) {
            ++p_;
            return true;
        }
        return false;
    }

    static NodePtr make(Node::Kind k, NodePtr l, NodePtr r = nullptr) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    NodePtr expr() {
        NodePtr l = term();
        while (true) {
            if (accept('+'))
                l = make(Node::Add, l, term());
            else if (accept('-'))
                l = make(Node::Sub, l, term());
            else
                return l;
        }
    }

    NodePtr term() {
        NodePtr l = unary();
        while (true) {
            if (accept('*'))
                l = make(Node::Mul, l, unary());
            else if (accept('/'))
                l = make(Node::Div, l, unary());
            else
                return l;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Node::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip();
        if (p_ >= s_.size()) fail("unexpected end");
        char c = s_[p_];
        if (accept('(')) {
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::string tail(s_.substr(p_));
            std::size_t used = 0;
            double v = std::stod(tail, &used);
            p_ += used;
            auto n = std::make_shared<Node>();
            n->kind = Node::Number;
            n->number = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t b = p_;
            while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_')) ++p_;
            std::string id(s_.substr(b, p_ - b));
            if (id == "pi") {
                auto n = std::make_shared<Node>();
                n->kind = Node::Number;
                n->number = M_PI;
                return n;
            }
            if (accept('(')) {
                if (!kFunctions.count(id)) fail("unknown function '" + id + "'");
                NodePtr arg = expr();
                if (!accept(')')) fail("expected ')'");
                auto n = std::make_shared<Node>();
                n->kind = Node::Call;
                n->name = id;
                n->lhs = arg;
                return n;
            }
            auto n = std::make_shared<Node>();
            n->kind = Node::Variable;
            n->name = id;
            return n;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

double eval_double(const Node& n, const std::function<double(const std::string&)>& lookup) {
    switch (n.kind) {
    case Node::Number: return n.number;
    case Node::Variable: return lookup(n.name);
    case Node::Neg: return -eval_double(*n.lhs, lookup);
    case Node::Add: return eval_double(*n.lhs, lookup) + eval_double(*n.rhs, lookup);
    case Node::Sub: return eval_double(*n.lhs, lookup) - eval_double(*n.rhs, lookup);
    case Node::Mul: return eval_double(*n.lhs, lookup) * eval_double(*n.rhs, lookup);
    case Node::Div: return eval_double(*n.lhs, lookup) / eval_double(*n.rhs, lookup);
    case Node::Pow: return std::pow(eval_double(*n.lhs, lookup), eval_double(*n.rhs, lookup));
    case Node::Call: {
        double x = eval_double(*n.lhs, lookup);
        if (n.name == "sin") return std::sin(x);
        if (n.name == "cos") return std::cos(x);
        if (n.name == "exp") return std::exp(x);
        if (n.name == "log") return std::log(x);
        return std::sqrt(x);
    }
    }
    return 0.0;
}

Jet eval_jet(const Node& n, const JetLayout& L, const std::function<Jet(const std::string&)>& lookup) {
    switch (n.kind) {
    case Node::Number: {
        Jet c(L);
        c[0] = n.number;
        return c;
    }
    case Node::Variable: {
        Jet v = lookup(n.name);
        if (&v.layout() != &L) throw ArgumentError("expression variable '" + n.name + "' has wrong jet shape");
        return v;
    }
    case Node::Neg: return -eval_jet(*n.lhs, L, lookup);
    case Node::Add: return eval_jet(*n.lhs, L, lookup) + eval_jet(*n.rhs, L, lookup);
    case Node::Sub: return eval_jet(*n.lhs, L, lookup) - eval_jet(*n.rhs, L, lookup);
    case Node::Mul: return eval_jet(*n.lhs, L, lookup) * eval_jet(*n.rhs, L, lookup);
    case Node::Div: return eval_jet(*n.lhs, L, lookup) / eval_jet(*n.rhs, L, lookup);
    case Node::Pow: {
        Jet b = eval_jet(*n.lhs, L, lookup);
        if (n.rhs->constant()) return pow(b, eval_double(*n.rhs, [](const std::string&) { return 0.0; }));
        return exp(eval_jet(*n.rhs, L, lookup) * log(b));
    }
    case Node::Call: {
        Jet x = eval_jet(*n.lhs, L, lookup);
        if (n.name == "sin") return sin(x);
        if (n.name == "cos") return cos(x);
        if (n.name == "exp") return exp(x);
        if (n.name == "log") return log(x);
        return sqrt(x);
    }
    }
    return Jet(L);
}

void collect(const Node& n, std::set<std::string>& out) {
    if (n.kind == Node::Variable) out.insert(n.name);
    if (n.lhs) collect(*n.lhs, out);
    if (n.rhs) collect(*n.rhs, out);
}

} // namespace

Expression Expression::parse(std::string_view source) {
    Expression e;
    e.source_ = std::string(source);
    e.root_ = Parser(source).parse();
    return e;
}

Jet Expression::eval(const JetLayout& layout, const std::function<Jet(const std::string&)>& lookup) const {
    return eval_jet(*root_, layout, lookup);
}

double Expression::eval(const std::function<double(const std::string&)>& lookup) const {
    return eval_double(*root_, lookup);
}

std::vector<std::string> Expression::variables() const {
    std::set<std::string> s;
    collect(*root_, s);
    return {s.begin(), s.end()};
}

} // namespace fminlab
