#include "superkoszul/detail/expr.hpp"

#include <cctype>
#include <vector>

namespace skz::detail {
namespace {

struct Token {
  enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Kind kind;
  std::size_t offset;
  std::string text;  // Number digits / Ident name
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back({Token::Kind::Number, start, text.substr(start, i - start)});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
      std::size_t digits = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (digits == i) throw ParseError("symbol needs an index", start);
      out.push_back({Token::Kind::Ident, start, text.substr(start, i - start)});
      continue;
    }
    Token::Kind k;
    switch (c) {
      case '+': k = Token::Kind::Plus; break;
      case '-': k = Token::Kind::Minus; break;
      case '*': k = Token::Kind::Star; break;
      case '/': k = Token::Kind::Slash; break;
      case '^': k = Token::Kind::Caret; break;
      case '(': k = Token::Kind::LParen; break;
      case ')': k = Token::Kind::RParen; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({k, i, std::string(1, c)});
    ++i;
  }
  out.push_back({Token::Kind::End, text.size(), ""});
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : tokens_(tokenize(text)) {}

  ExprPtr run() {
    ExprPtr e = parse_sum();
    expect(Token::Kind::End, "trailing input");
    return e;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;

  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_++]; }
  bool accept(Token::Kind k) {
    if (peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(Token::Kind k, const char* what) {
    if (!accept(k)) throw ParseError(std::string("expected ") + what, peek().offset);
  }

  static ExprPtr make(ExprNode::Kind k, std::size_t off) {
    auto n = std::make_unique<ExprNode>();
    n->kind = k;
    n->offset = off;
    return n;
  }

  ExprPtr parse_sum() {
    ExprPtr lhs = parse_product();
    while (peek().kind == Token::Kind::Plus || peek().kind == Token::Kind::Minus) {
      Token op = next();
      ExprPtr node = make(op.kind == Token::Kind::Plus ? ExprNode::Kind::Add : ExprNode::Kind::Sub,
                          op.offset);
      node->lhs = std::move(lhs);
      node->rhs = parse_product();
      lhs = std::move(node);
    }
    return lhs;
  }

  ExprPtr parse_product() {
    ExprPtr lhs = parse_unary();
    while (peek().kind == Token::Kind::Star || peek().kind == Token::Kind::Slash) {
      Token op = next();
      ExprPtr node = make(op.kind == Token::Kind::Star ? ExprNode::Kind::Mul : ExprNode::Kind::Div,
                          op.offset);
      node->lhs = std::move(lhs);
      node->rhs = parse_unary();
      if (node->kind == ExprNode::Kind::Div && node->rhs->kind != ExprNode::Kind::Number)
        throw ParseError("'/' requires an integer denominator", op.offset);
      lhs = std::move(node);
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (peek().kind == Token::Kind::Minus) {
      Token op = next();
      ExprPtr node = make(ExprNode::Kind::Neg, op.offset);
      node->lhs = parse_unary();
      return node;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (peek().kind == Token::Kind::Caret) {
      Token op = next();
      bool neg = accept(Token::Kind::Minus);
      if (peek().kind != Token::Kind::Number)
        throw ParseError("expected integer exponent", peek().offset);
      Token e = next();
      ExprPtr node = make(ExprNode::Kind::Pow, op.offset);
      long val;
      try {
        val = std::stol(e.text);
      } catch (const std::exception&) {
        throw ParseError("exponent out of range", e.offset);
      }
      node->exponent = static_cast<int>(neg ? -val : val);
      node->lhs = std::move(base);
      return node;
    }
    return base;
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Number: {
        Token tok = next();
        ExprPtr node = make(ExprNode::Kind::Number, tok.offset);
        node->number = Rational(Integer(tok.text));
        return node;
      }
      case Token::Kind::Ident: {
        Token tok = next();
        std::size_t d = 0;
        while (d < tok.text.size() && std::isalpha(static_cast<unsigned char>(tok.text[d]))) ++d;
        std::string name = tok.text.substr(0, d);
        int index = std::stoi(tok.text.substr(d));
        ExprNode::Kind kind;
        VarKind vk;
        if (name == "z") {
          kind = ExprNode::Kind::Var;
          vk = VarKind::Z;
        } else if (name == "w") {
          kind = ExprNode::Kind::Var;
          vk = VarKind::W;
        } else if (name == "dz") {
          kind = ExprNode::Kind::FormAtom;
          vk = VarKind::Z;
        } else if (name == "dw") {
          kind = ExprNode::Kind::FormAtom;
          vk = VarKind::W;
        } else {
          throw ParseError("unknown symbol '" + name + "'", tok.offset);
        }
        ExprPtr node = make(kind, tok.offset);
        node->var_kind = vk;
        node->var_index = index;
        return node;
      }
      case Token::Kind::LParen: {
        next();
        ExprPtr inner = parse_sum();
        expect(Token::Kind::RParen, "')'");
        return inner;
      }
      default:
        throw ParseError("expected a value", t.offset);
    }
  }
};

}  // namespace

ExprPtr parse_expression(const std::string& text) { return Parser(text).run(); }

}  // namespace skz::detail
