#pragma once

// Foot-contact propositions and the propositional guard language used on
// reward-machine transitions.
//
// Grammar (whitespace is insignificant):
//
//   expr  := or
//   or    := and ("|" and)*
//   and   := unary ("&" unary)*
//   unary := "!" unary | "(" expr ")" | ident
//   ident := "FL" | "FR" | "BL" | "BR"

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gaitrm {

/// A foot-in-the-air proposition. The enumerator value is the bit index used
/// by LabelSet and by every 4-bit contact code in the toolkit.
enum class Prop : std::uint8_t { FL = 0, FR = 1, BL = 2, BR = 3 };

inline constexpr std::array<Prop, 4> kAllProps{Prop::FL, Prop::FR, Prop::BL, Prop::BR};

std::string_view to_string(Prop p);
std::optional<Prop> prop_from_string(std::string_view name);

/// Truth assignment over the four propositions, stored as a 4-bit code
/// (FL = bit 0, FR = bit 1, BL = bit 2, BR = bit 3).
class LabelSet {
 public:
  static constexpr std::size_t kCount = 16;

  constexpr LabelSet() = default;
  constexpr LabelSet(std::initializer_list<Prop> props) {
    for (Prop p : props) bits_ |= bit(p);
  }

  /// Throws std::out_of_range for codes above 15.
  static LabelSet from_code(unsigned code);
  static std::array<LabelSet, kCount> all();

  constexpr std::uint8_t code() const { return bits_; }
  constexpr bool contains(Prop p) const { return (bits_ & bit(p)) != 0; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>(((bits_ >> 0) & 1) + ((bits_ >> 1) & 1) +
                                    ((bits_ >> 2) & 1) + ((bits_ >> 3) & 1));
  }
  constexpr bool empty() const { return bits_ == 0; }

  LabelSet with(Prop p) const;
  LabelSet without(Prop p) const;

  /// "{FL, BR}" style rendering; "{}" for the empty set.
  std::string to_string() const;

  friend constexpr bool operator==(LabelSet, LabelSet) = default;
  friend constexpr auto operator<=>(LabelSet a, LabelSet b) { return a.bits_ <=> b.bits_; }

 private:
  static constexpr std::uint8_t bit(Prop p) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(p));
  }
  std::uint8_t bits_ = 0;
};

/// Immutable propositional formula over Prop. Copies share structure.
class Guard {
 public:
  enum class Kind : std::uint8_t { Literal, Not, And, Or };

  static Guard literal(Prop p);
  static Guard negation(Guard g);
  static Guard conjunction(Guard lhs, Guard rhs);
  static Guard disjunction(Guard lhs, Guard rhs);

  /// Conjunction of all four literals, positive for members of `pose` and
  /// negated otherwise, in FL, FR, BL, BR order.
  static Guard exact_pose(LabelSet pose);

  Kind kind() const { return node_->kind; }
  /// Only meaningful for Kind::Literal.
  Prop prop() const { return node_->prop; }
  /// Operand of Not, left operand of And/Or.
  Guard lhs() const { return Guard(node_->lhs); }
  /// Right operand of And/Or.
  Guard rhs() const { return Guard(node_->rhs); }

  bool eval(LabelSet l) const;
  std::size_t depth() const;

  /// Bit i set iff the guard holds for LabelSet::from_code(i).
  std::uint16_t truth_table() const;

  friend Guard operator!(Guard g) { return negation(std::move(g)); }
  friend Guard operator&(Guard a, Guard b) { return conjunction(std::move(a), std::move(b)); }
  friend Guard operator|(Guard a, Guard b) { return disjunction(std::move(a), std::move(b)); }

  /// Structural equality (same AST shape and literals).
  friend bool operator==(const Guard& a, const Guard& b);

 private:
  struct Node {
    Kind kind;
    Prop prop;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };
  explicit Guard(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Raised by parse_guard. position() is a 0-based character offset into the
/// parsed text.
class GuardParseError : public std::runtime_error {
 public:
  enum class Reason { Syntax, UnknownIdentifier };

  GuardParseError(Reason reason, std::size_t position, const std::string& message);

  Reason reason() const { return reason_; }
  std::size_t position() const { return position_; }

 private:
  Reason reason_;
  std::size_t position_;
};

Guard parse_guard(std::string_view text);
bool eval_guard(const Guard& g, LabelSet l);
std::string render_guard(const Guard& g);

/// Every LabelSet satisfying g, in ascending code order.
std::vector<LabelSet> satisfying_sets(const Guard& g);

/// Same truth value on all 16 label sets.
bool semantically_equal(const Guard& a, const Guard& b);

}  // namespace gaitrm
