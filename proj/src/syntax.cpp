#include "stitkit/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace stitkit {

ParseError::ParseError(const std::string& message, std::size_t position)
    : Error("position " + std::to_string(position) + ": " + message), position_(position) {}

FormatError::FormatError(const std::string& message, std::size_t line)
    : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

struct Formula::Node {
  Op op;
  Agent agent = 0;
  std::string name;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
  std::size_t hash = 0;
  std::size_t length = 0;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t sat_add(std::size_t x, std::size_t y) {
  return x > std::numeric_limits<std::size_t>::max() - y ? std::numeric_limits<std::size_t>::max()
                                                         : x + y;
}

}  // namespace

Formula Formula::atom(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Atom;
  n->hash = mix(1, std::hash<std::string>{}(name));
  n->name = std::move(name);
  n->length = 1;
  return Formula(std::move(n));
}

Formula Formula::negation(Formula body) {
  auto n = std::make_shared<Node>();
  n->op = Op::Not;
  n->hash = mix(2, body.hash());
  n->length = sat_add(1, body.length());
  n->a = std::move(body.node_);
  return Formula(std::move(n));
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  auto n = std::make_shared<Node>();
  n->op = Op::And;
  n->hash = mix(mix(3, lhs.hash()), rhs.hash());
  n->length = sat_add(3, sat_add(lhs.length(), rhs.length()));
  n->a = std::move(lhs.node_);
  n->b = std::move(rhs.node_);
  return Formula(std::move(n));
}

Formula Formula::cstit(Agent agent, Formula body) {
  auto n = std::make_shared<Node>();
  n->op = Op::Cstit;
  n->agent = agent;
  n->hash = mix(mix(4, agent), body.hash());
  n->length = sat_add(3, body.length());
  n->a = std::move(body.node_);
  return Formula(std::move(n));
}

Formula Formula::dstit(Agent agent, Formula body) {
  auto n = std::make_shared<Node>();
  n->op = Op::Dstit;
  n->agent = agent;
  n->hash = mix(mix(5, agent), body.hash());
  n->length = sat_add(5, body.length());
  n->a = std::move(body.node_);
  return Formula(std::move(n));
}

Formula Formula::box(Formula body) {
  auto n = std::make_shared<Node>();
  n->op = Op::Box;
  n->hash = mix(6, body.hash());
  n->length = sat_add(1, body.length());
  n->a = std::move(body.node_);
  return Formula(std::move(n));
}

Op Formula::op() const noexcept { return node_->op; }

const std::string& Formula::name() const {
  if (node_->op != Op::Atom) throw std::logic_error("name() on a non-atomic formula");
  return node_->name;
}

Agent Formula::agent() const {
  if (node_->op != Op::Cstit && node_->op != Op::Dstit)
    throw std::logic_error("agent() on a formula without an agent");
  return node_->agent;
}

Formula Formula::body() const {
  if (node_->op == Op::Atom || node_->op == Op::And)
    throw std::logic_error("body() on a formula without a single child");
  return Formula(node_->a);
}

Formula Formula::lhs() const {
  if (node_->op != Op::And) throw std::logic_error("lhs() on a non-conjunction");
  return Formula(node_->a);
}

Formula Formula::rhs() const {
  if (node_->op != Op::And) throw std::logic_error("rhs() on a non-conjunction");
  return Formula(node_->b);
}

std::size_t Formula::hash() const noexcept { return node_->hash; }
std::size_t Formula::length() const noexcept { return node_->length; }

bool operator==(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.length() != b.length()) return false;
  return (a <=> b) == 0;
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) noexcept {
  // Iterative to survive deep right spines such as long conjunction chains.
  std::vector<std::pair<const Formula::Node*, const Formula::Node*>> todo{{a.node_.get(), b.node_.get()}};
  while (!todo.empty()) {
    auto [x, y] = todo.back();
    todo.pop_back();
    if (x == y) continue;
    if (x->op != y->op) return x->op <=> y->op;
    switch (x->op) {
      case Op::Atom:
        if (auto c = x->name.compare(y->name); c != 0) return c < 0 ? std::strong_ordering::less
                                                                   : std::strong_ordering::greater;
        break;
      case Op::And:
        todo.emplace_back(x->b.get(), y->b.get());
        todo.emplace_back(x->a.get(), y->a.get());
        break;
      case Op::Cstit:
      case Op::Dstit:
        if (x->agent != y->agent) return x->agent <=> y->agent;
        todo.emplace_back(x->a.get(), y->a.get());
        break;
      default:
        todo.emplace_back(x->a.get(), y->a.get());
    }
  }
  return std::strong_ordering::equal;
}

Formula atom(std::string name) { return Formula::atom(std::move(name)); }
Formula neg(Formula f) { return Formula::negation(std::move(f)); }
Formula conj(Formula a, Formula b) { return Formula::conjunction(std::move(a), std::move(b)); }
Formula cstit(Agent i, Formula f) { return Formula::cstit(i, std::move(f)); }
Formula dstit(Agent i, Formula f) { return Formula::dstit(i, std::move(f)); }
Formula box(Formula f) { return Formula::box(std::move(f)); }

Formula disj(Formula a, Formula b) { return neg(conj(neg(std::move(a)), neg(std::move(b)))); }
Formula implies(Formula a, Formula b) { return neg(conj(std::move(a), neg(std::move(b)))); }
Formula iff(Formula a, Formula b) { return conj(implies(a, b), implies(b, a)); }
Formula diamond(Formula f) { return neg(box(neg(std::move(f)))); }
Formula poss(Agent i, Formula f) { return neg(cstit(i, neg(std::move(f)))); }

Formula top(const std::string& filler) {
  auto p = atom(filler);
  return neg(conj(p, neg(p)));
}

Formula conj_all(const std::vector<Formula>& parts, const std::string& filler) {
  if (parts.empty()) return top(filler);
  Formula acc = parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) acc = conj(acc, parts[k]);
  return acc;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class BinOp { And, Or, Implies, Iff };

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Formula parse_top() {
    skip_ws();
    if (at_end()) fail("empty formula");
    Formula lhs = parse_unit();
    skip_ws();
    if (at_end()) return lhs;
    // Outermost parentheses may be dropped around a single binary connective.
    auto op = read_binop();
    if (!op) fail("unexpected character '" + std::string(1, peek()) + "'");
    Formula rhs = parse_unit();
    skip_ws();
    if (!at_end()) {
      if (read_binop()) fail("ambiguous chain of binary connectives; add parentheses");
      fail("trailing input");
    }
    return combine(*op, std::move(lhs), std::move(rhs));
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static Formula combine(BinOp op, Formula a, Formula b) {
    switch (op) {
      case BinOp::And: return conj(std::move(a), std::move(b));
      case BinOp::Or: return disj(std::move(a), std::move(b));
      case BinOp::Implies: return implies(std::move(a), std::move(b));
      case BinOp::Iff: return iff(std::move(a), std::move(b));
    }
    return a;
  }

  std::optional<BinOp> read_binop() {
    skip_ws();
    if (peek() == '&') { ++pos_; return BinOp::And; }
    if (peek() == '|') { ++pos_; return BinOp::Or; }
    if (peek() == '-' && peek(1) == '>') { pos_ += 2; return BinOp::Implies; }
    if (peek() == '<' && peek(1) == '-' && peek(2) == '>') { pos_ += 3; return BinOp::Iff; }
    return std::nullopt;
  }

  Agent read_agent(char close) {
    skip_ws();
    std::size_t start = pos_;
    if (peek() == '-') fail("agent index must be a natural number");
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected an agent index");
    std::uint64_t value = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      value = value * 10 + static_cast<std::uint64_t>(peek() - '0');
      if (value > std::numeric_limits<Agent>::max()) {
        pos_ = start;
        fail("agent index out of range");
      }
      ++pos_;
    }
    expect(close);
    return static_cast<Agent>(value);
  }

  Formula parse_unit() {
    if (++depth_ > 100000) fail("formula nested too deeply");
    struct Guard { std::size_t& d; ~Guard() { --d; } } guard{depth_};
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    char c = peek();
    if (c == '~') {
      ++pos_;
      return neg(parse_unit());
    }
    if (c == '(') {
      ++pos_;
      Formula lhs = parse_unit();
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return lhs;
      }
      auto op = read_binop();
      if (!op) fail("expected a binary connective or ')'");
      Formula rhs = parse_unit();
      skip_ws();
      if (peek() != ')') {
        if (read_binop()) fail("ambiguous chain of binary connectives; add parentheses");
        fail("expected ')'");
      }
      ++pos_;
      return combine(*op, std::move(lhs), std::move(rhs));
    }
    if (c == '[') {
      ++pos_;
      skip_ws();
      if (peek() == ']') {
        ++pos_;
        return box(parse_unit());
      }
      Agent i = read_agent(']');
      return cstit(i, parse_unit());
    }
    if (c == '<') {
      if (peek(1) == '-') fail("'<->' needs a left operand");
      ++pos_;
      skip_ws();
      if (peek() == '>') {
        ++pos_;
        return diamond(parse_unit());
      }
      Agent i = read_agent('>');
      return poss(i, parse_unit());
    }
    if (c == '{') {
      ++pos_;
      Agent i = read_agent('}');
      return dstit(i, parse_unit());
    }
    if (std::islower(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
      return atom(std::string(text_.substr(start, pos_ - start)));
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }
};

// ---------------------------------------------------------------------------
// Printer

void print_canonical(const Formula& f, std::string& out, bool bare_and) {
  switch (f.op()) {
    case Op::Atom:
      out += f.name();
      return;
    case Op::Not:
      out += '~';
      print_canonical(f.body(), out, false);
      return;
    case Op::And:
      if (!bare_and) out += '(';
      print_canonical(f.lhs(), out, false);
      out += " & ";
      print_canonical(f.rhs(), out, false);
      if (!bare_and) out += ')';
      return;
    case Op::Cstit:
      out += '[' + std::to_string(f.agent()) + "](";
      break;
    case Op::Dstit:
      out += '{' + std::to_string(f.agent()) + "}(";
      break;
    case Op::Box:
      out += "[](";
      break;
  }
  print_canonical(f.body(), out, true);
  out += ')';
}

bool is_neg(const Formula& f) { return f.op() == Op::Not; }
bool is_and(const Formula& f) { return f.op() == Op::And; }

void print_sugared(const Formula& f, std::string& out, bool bare);

// Negations that already print as a diamond or an implication read better as an antecedent.
bool is_dual_form(const Formula& f) {
  if (!is_neg(f)) return false;
  auto b = f.body();
  if ((b.op() == Op::Box || b.op() == Op::Cstit) && is_neg(b.body())) return true;
  return is_and(b) && is_neg(b.rhs());
}

void print_prefix_body(const Formula& f, std::string& out) {
  // Atoms and prefix-headed bodies need no parentheses; conjunctions carry their own.
  print_sugared(f, out, false);
}

void print_sugared(const Formula& f, std::string& out, bool bare) {
  auto open = [&] { if (!bare) out += '('; };
  auto close = [&] { if (!bare) out += ')'; };
  switch (f.op()) {
    case Op::Atom:
      out += f.name();
      return;
    case Op::And: {
      auto l = f.lhs();
      auto r = f.rhs();
      if (is_neg(l) && is_neg(r) && is_and(l.body()) && is_and(r.body())) {
        auto lb = l.body();
        auto rb = r.body();
        if (is_neg(lb.rhs()) && is_neg(rb.rhs()) && lb.lhs() == rb.rhs().body() &&
            rb.lhs() == lb.rhs().body()) {
          open();
          print_sugared(lb.lhs(), out, false);
          out += " <-> ";
          print_sugared(rb.lhs(), out, false);
          close();
          return;
        }
      }
      open();
      print_sugared(l, out, false);
      out += " & ";
      print_sugared(r, out, false);
      close();
      return;
    }
    case Op::Not: {
      auto b = f.body();
      if (is_and(b)) {
        auto l = b.lhs();
        auto r = b.rhs();
        if (is_neg(l) && is_neg(r) && !is_dual_form(l)) {
          open();
          print_sugared(l.body(), out, false);
          out += " | ";
          print_sugared(r.body(), out, false);
          close();
          return;
        }
        if (is_neg(r)) {
          open();
          print_sugared(l, out, false);
          out += " -> ";
          print_sugared(r.body(), out, false);
          close();
          return;
        }
      }
      if (b.op() == Op::Box && is_neg(b.body())) {
        out += "<>";
        print_prefix_body(b.body().body(), out);
        return;
      }
      if (b.op() == Op::Cstit && is_neg(b.body())) {
        out += '<' + std::to_string(b.agent()) + '>';
        print_prefix_body(b.body().body(), out);
        return;
      }
      out += '~';
      print_prefix_body(b, out);
      return;
    }
    case Op::Cstit:
      out += '[' + std::to_string(f.agent()) + ']';
      break;
    case Op::Dstit:
      out += '{' + std::to_string(f.agent()) + '}';
      break;
    case Op::Box:
      out += "[]";
      break;
  }
  print_prefix_body(f.body(), out);
}

}  // namespace

Formula parse(std::string_view text) { return Parser(text).parse_top(); }

std::string print(const Formula& f, PrintStyle style) {
  std::string out;
  if (style == PrintStyle::Canonical)
    print_canonical(f, out, false);
  else
    print_sugared(f, out, false);
  return out;
}

std::size_t length(const Formula& f) { return f.length(); }

std::vector<Formula> subformulas(const Formula& f) {
  std::vector<Formula> out;
  std::unordered_set<Formula> seen;
  // Explicit stack: (node, children_done).
  std::vector<std::pair<Formula, bool>> stack{{f, false}};
  while (!stack.empty()) {
    auto [g, done] = stack.back();
    stack.pop_back();
    if (seen.count(g)) continue;
    if (done || g.op() == Op::Atom) {
      seen.insert(g);
      out.push_back(g);
      continue;
    }
    stack.emplace_back(g, true);
    if (g.op() == Op::And) {
      stack.emplace_back(g.rhs(), false);
      stack.emplace_back(g.lhs(), false);
    } else {
      stack.emplace_back(g.body(), false);
    }
  }
  return out;
}

std::set<Agent> agents(const Formula& f) {
  std::set<Agent> out;
  for (const auto& g : subformulas(f))
    if (g.op() == Op::Cstit || g.op() == Op::Dstit) out.insert(g.agent());
  return out;
}

std::set<std::string> atoms(const Formula& f) {
  std::set<std::string> out;
  for (const auto& g : subformulas(f))
    if (g.op() == Op::Atom) out.insert(g.name());
  return out;
}

bool contains_op(const Formula& f, Op op) {
  for (const auto& g : subformulas(f))
    if (g.op() == op) return true;
  return false;
}

bool in_language(const Formula& f, LanguageTag tag) {
  switch (tag) {
    case LanguageTag::Cstit: return !contains_op(f, Op::Dstit);
    case LanguageTag::Dstit: return !contains_op(f, Op::Cstit);
    case LanguageTag::Mixed: return true;
  }
  return false;
}

std::string to_string(LanguageTag tag) {
  switch (tag) {
    case LanguageTag::Cstit: return "cstit";
    case LanguageTag::Dstit: return "dstit";
    case LanguageTag::Mixed: return "mixed";
  }
  return "?";
}

namespace {

// Bottom-up rebuild over the subformula order, memoised so shared subterms stay shared.
template <typename Fn>
Formula rebuild(const Formula& f, Fn&& at_node) {
  std::unordered_map<Formula, Formula> done;
  for (const auto& g : subformulas(f)) {
    auto get = [&](const Formula& h) -> const Formula& { return done.at(h); };
    done.emplace(g, at_node(g, get));
  }
  return done.at(f);
}

template <typename Get>
Formula copy_node(const Formula& g, Get&& get) {
  switch (g.op()) {
    case Op::Atom: return g;
    case Op::Not: return neg(get(g.body()));
    case Op::And: return conj(get(g.lhs()), get(g.rhs()));
    case Op::Cstit: return cstit(g.agent(), get(g.body()));
    case Op::Dstit: return dstit(g.agent(), get(g.body()));
    case Op::Box: return box(get(g.body()));
  }
  return g;
}

}  // namespace

Formula expand_dstit(const Formula& f) {
  return rebuild(f, [](const Formula& g, auto&& get) {
    if (g.op() == Op::Dstit) {
      const Formula& b = get(g.body());
      return conj(cstit(g.agent(), b), neg(box(b)));
    }
    return copy_node(g, get);
  });
}

Formula substitute(const Formula& f, const std::map<std::string, Formula>& bindings) {
  return rebuild(f, [&](const Formula& g, auto&& get) {
    if (g.op() == Op::Atom) {
      auto it = bindings.find(g.name());
      return it == bindings.end() ? g : it->second;
    }
    return copy_node(g, get);
  });
}

Formula strip_double_negations(const Formula& f) {
  return rebuild(f, [](const Formula& g, auto&& get) {
    if (g.op() == Op::Not) {
      const Formula& b = get(g.body());
      if (b.op() == Op::Not) return b.body();
      return neg(b);
    }
    return copy_node(g, get);
  });
}

std::size_t modal_depth(const Formula& f) {
  std::unordered_map<Formula, std::size_t> depth;
  for (const auto& g : subformulas(f)) {
    std::size_t d = 0;
    switch (g.op()) {
      case Op::Atom: break;
      case Op::Not: d = depth.at(g.body()); break;
      case Op::And: d = std::max(depth.at(g.lhs()), depth.at(g.rhs())); break;
      default: d = depth.at(g.body()) + 1;
    }
    depth.emplace(g, d);
  }
  return depth.at(f);
}

}  // namespace stitkit
