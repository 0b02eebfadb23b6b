#include "spdlm_cli/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>

namespace spdlm::cli {

namespace {

struct Node {
    virtual ~Node() = default;
    [[nodiscard]] virtual double eval(double z) const = 0;
};

using NodePtr = std::shared_ptr<const Node>;

struct Constant final : Node {
    explicit Constant(double v) : value(v) {}
    double eval(double) const override { return value; }
    double value;
};

struct Variable final : Node {
    double eval(double z) const override { return z; }
};

struct Negate final : Node {
    explicit Negate(NodePtr a) : arg(std::move(a)) {}
    double eval(double z) const override { return -arg->eval(z); }
    NodePtr arg;
};

struct Binary final : Node {
    Binary(char o, NodePtr a, NodePtr b) : op(o), lhs(std::move(a)), rhs(std::move(b)) {}
    double eval(double z) const override {
        const double a = lhs->eval(z);
        const double b = rhs->eval(z);
        switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            default: return std::pow(a, b);
        }
    }
    char op;
    NodePtr lhs;
    NodePtr rhs;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        NodePtr root = sum();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ExpressionError("expression \"" + std::string(text_) + "\": " + what + " at column " +
                              std::to_string(pos_ + 1));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr sum() {
        NodePtr left = product();
        for (;;) {
            if (accept('+')) {
                left = std::make_shared<Binary>('+', left, product());
            } else if (accept('-')) {
                left = std::make_shared<Binary>('-', left, product());
            } else {
                return left;
            }
        }
    }

    NodePtr product() {
        NodePtr left = unary();
        for (;;) {
            if (accept('*')) {
                left = std::make_shared<Binary>('*', left, unary());
            } else if (accept('/')) {
                left = std::make_shared<Binary>('/', left, unary());
            } else {
                return left;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            return std::make_shared<Negate>(unary());
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) {
            return std::make_shared<Binary>('^', base, unary());
        }
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("unexpected end");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = sum();
            if (!accept(')')) {
                fail("missing ')'");
            }
            return inner;
        }
        if (c == 'z' || c == 'Z') {
            ++pos_;
            return std::make_shared<Variable>();
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double value = 0.0;
            const char* begin = text_.data() + pos_;
            const auto [end, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
            if (ec != std::errc()) {
                fail("bad number");
            }
            pos_ += static_cast<std::size_t>(end - begin);
            return std::make_shared<Constant>(value);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text) {
    NodePtr root = Parser(text).parse();
    return [root](double z) { return root->eval(z); };
}

}  // namespace spdlm::cli
