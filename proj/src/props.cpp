#include "gaitrm/props.hpp"

#include <algorithm>
#include <cctype>

namespace gaitrm {

std::string_view to_string(Prop p) {
  switch (p) {
    case Prop::FL: return "FL";
    case Prop::FR: return "FR";
    case Prop::BL: return "BL";
    case Prop::BR: return "BR";
  }
  return "?";
}

std::optional<Prop> prop_from_string(std::string_view name) {
  for (Prop p : kAllProps) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

LabelSet LabelSet::from_code(unsigned code) {
  if (code >= kCount) throw std::out_of_range("label code out of range: " + std::to_string(code));
  LabelSet l;
  l.bits_ = static_cast<std::uint8_t>(code);
  return l;
}

std::array<LabelSet, LabelSet::kCount> LabelSet::all() {
  std::array<LabelSet, kCount> out;
  for (unsigned c = 0; c < kCount; ++c) out[c] = from_code(c);
  return out;
}

LabelSet LabelSet::with(Prop p) const {
  LabelSet l = *this;
  l.bits_ |= bit(p);
  return l;
}

LabelSet LabelSet::without(Prop p) const {
  LabelSet l = *this;
  l.bits_ &= static_cast<std::uint8_t>(~bit(p));
  return l;
}

std::string LabelSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (Prop p : kAllProps) {
    if (!contains(p)) continue;
    if (!first) out += ", ";
    out += gaitrm::to_string(p);
    first = false;
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Guard

Guard Guard::literal(Prop p) {
  return Guard(std::make_shared<const Node>(Node{Kind::Literal, p, nullptr, nullptr}));
}

Guard Guard::negation(Guard g) {
  return Guard(std::make_shared<const Node>(Node{Kind::Not, Prop::FL, std::move(g.node_), nullptr}));
}

Guard Guard::conjunction(Guard lhs, Guard rhs) {
  return Guard(std::make_shared<const Node>(
      Node{Kind::And, Prop::FL, std::move(lhs.node_), std::move(rhs.node_)}));
}

Guard Guard::disjunction(Guard lhs, Guard rhs) {
  return Guard(std::make_shared<const Node>(
      Node{Kind::Or, Prop::FL, std::move(lhs.node_), std::move(rhs.node_)}));
}

Guard Guard::exact_pose(LabelSet pose) {
  auto term = [&](Prop p) { return pose.contains(p) ? literal(p) : !literal(p); };
  Guard g = term(Prop::FL);
  for (Prop p : {Prop::FR, Prop::BL, Prop::BR}) g = g & term(p);
  return g;
}

bool Guard::eval(LabelSet l) const {
  switch (node_->kind) {
    case Kind::Literal: return l.contains(node_->prop);
    case Kind::Not: return !lhs().eval(l);
    case Kind::And: return lhs().eval(l) && rhs().eval(l);
    case Kind::Or: return lhs().eval(l) || rhs().eval(l);
  }
  return false;
}

std::size_t Guard::depth() const {
  switch (node_->kind) {
    case Kind::Literal: return 1;
    case Kind::Not: return 1 + lhs().depth();
    case Kind::And:
    case Kind::Or: return 1 + std::max(lhs().depth(), rhs().depth());
  }
  return 0;
}

std::uint16_t Guard::truth_table() const {
  std::uint16_t table = 0;
  for (LabelSet l : LabelSet::all()) {
    if (eval(l)) table = static_cast<std::uint16_t>(table | (1u << l.code()));
  }
  return table;
}

bool operator==(const Guard& a, const Guard& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Guard::Kind::Literal: return a.prop() == b.prop();
    case Guard::Kind::Not: return a.lhs() == b.lhs();
    case Guard::Kind::And:
    case Guard::Kind::Or: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

GuardParseError::GuardParseError(Reason reason, std::size_t position, const std::string& message)
    : std::runtime_error("guard parse error at position " + std::to_string(position) + ": " +
                         message),
      reason_(reason),
      position_(position) {}

// ---------------------------------------------------------------------------
// Parser

namespace {

class GuardParser {
 public:
  explicit GuardParser(std::string_view text) : text_(text) {}

  Guard parse() {
    skip_space();
    if (pos_ == text_.size()) syntax_error("empty guard expression");
    Guard g = parse_or();
    skip_space();
    if (pos_ != text_.size()) syntax_error(std::string("unexpected '") + text_[pos_] + "'");
    return g;
  }

 private:
  Guard parse_or() {
    Guard g = parse_and();
    while (accept('|')) g = g | parse_and();
    return g;
  }

  Guard parse_and() {
    Guard g = parse_unary();
    while (accept('&')) g = g & parse_unary();
    return g;
  }

  Guard parse_unary() {
    skip_space();
    if (pos_ == text_.size()) syntax_error("unexpected end of input");
    const char c = text_[pos_];
    if (c == '!') {
      ++pos_;
      return !parse_unary();
    }
    if (c == '(') {
      ++pos_;
      Guard g = parse_or();
      if (!accept(')')) {
        skip_space();
        syntax_error(pos_ == text_.size() ? "missing ')'" : std::string("expected ')' before '") +
                                                                text_[pos_] + "'");
      }
      return g;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view ident = text_.substr(start, pos_ - start);
      if (auto p = prop_from_string(ident)) return Guard::literal(*p);
      throw GuardParseError(GuardParseError::Reason::UnknownIdentifier, start,
                            "unknown identifier '" + std::string(ident) +
                                "' (expected FL, FR, BL or BR)");
    }
    syntax_error(std::string("unexpected '") + c + "'");
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void syntax_error(const std::string& message) const {
    throw GuardParseError(GuardParseError::Reason::Syntax, pos_, message);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Binding strength used to decide where parentheses are needed.
int precedence(Guard::Kind k) {
  switch (k) {
    case Guard::Kind::Or: return 1;
    case Guard::Kind::And: return 2;
    case Guard::Kind::Not: return 3;
    case Guard::Kind::Literal: return 4;
  }
  return 0;
}

void render_into(const Guard& g, int min_precedence, std::string& out) {
  const bool parens = precedence(g.kind()) < min_precedence;
  if (parens) out += '(';
  switch (g.kind()) {
    case Guard::Kind::Literal:
      out += to_string(g.prop());
      break;
    case Guard::Kind::Not:
      out += '!';
      render_into(g.lhs(), precedence(Guard::Kind::Not), out);
      break;
    case Guard::Kind::And:
    case Guard::Kind::Or: {
      // Both operators are associative, so same-precedence children need no
      // parentheses on either side.
      const int p = precedence(g.kind());
      render_into(g.lhs(), p, out);
      out += g.kind() == Guard::Kind::And ? " & " : " | ";
      render_into(g.rhs(), p, out);
      break;
    }
  }
  if (parens) out += ')';
}

}  // namespace

Guard parse_guard(std::string_view text) { return GuardParser(text).parse(); }

bool eval_guard(const Guard& g, LabelSet l) { return g.eval(l); }

std::string render_guard(const Guard& g) {
  std::string out;
  render_into(g, 0, out);
  return out;
}

std::vector<LabelSet> satisfying_sets(const Guard& g) {
  std::vector<LabelSet> out;
  for (LabelSet l : LabelSet::all()) {
    if (g.eval(l)) out.push_back(l);
  }
  return out;
}

bool semantically_equal(const Guard& a, const Guard& b) {
  return a.truth_table() == b.truth_table();
}

}  // namespace gaitrm
