#include "stitkit/translate.hpp"

#include <optional>
#include <stdexcept>

namespace stitkit::translate {

std::string to_string(Direction d) { return d == Direction::ToCstit ? "cstit" : "dstit"; }

namespace {

Sugared s_atom(const std::string& name) { return {atom(name), 1}; }
Sugared s_not(const Sugared& a) { return {neg(a.formula), 1 + a.length}; }
Sugared s_and(const Sugared& a, const Sugared& b) { return {conj(a.formula, b.formula), 3 + a.length + b.length}; }
Sugared s_or(const Sugared& a, const Sugared& b) { return {disj(a.formula, b.formula), 3 + a.length + b.length}; }
Sugared s_iff(const Sugared& a, const Sugared& b) { return {iff(a.formula, b.formula), 3 + a.length + b.length}; }
Sugared s_box(const Sugared& a) { return {box(a.formula), 1 + a.length}; }
Sugared s_cstit(Agent i, const Sugared& a) { return {cstit(i, a.formula), 3 + a.length}; }
Sugared s_dstit(Agent i, const Sugared& a) { return {dstit(i, a.formula), 5 + a.length}; }

}  // namespace

TranslationTable TranslationTable::build(const Formula& source, Direction direction) {
  TranslationTable t;
  t.direction_ = direction;
  const auto used = atoms(source);
  t.prefix_ = "_b";
  auto clashes = [&](const std::string& prefix) {
    for (const auto& a : used)
      if (a.compare(0, prefix.size(), prefix) == 0) return true;
    return false;
  };
  while (clashes(t.prefix_)) t.prefix_ += "b";
  for (const auto& s : subformulas(source)) {
    t.index_.emplace(s, t.entries_.size());
    t.entries_.emplace_back(s, t.prefix_ + std::to_string(t.entries_.size()));
  }
  return t;
}

const std::string& TranslationTable::atom_for(const Formula& f) const {
  auto it = index_.find(f);
  if (it == index_.end()) throw TranslateError("not a subformula of the translated formula: " + print(f));
  return entries_[it->second].second;
}

Sugared biimp(const Formula& psi, const TranslationTable& table) {
  auto p = [&](const Formula& f) { return s_atom(table.atom_for(f)); };
  const Sugared lhs = p(psi);
  switch (psi.op()) {
    case Op::Atom: return s_iff(lhs, s_atom(psi.name()));
    case Op::Not: return s_iff(lhs, s_not(p(psi.body())));
    case Op::And: return s_iff(lhs, s_and(p(psi.lhs()), p(psi.rhs())));
    case Op::Box: return s_iff(lhs, s_box(p(psi.body())));
    case Op::Dstit: {
      if (table.direction() != Direction::ToCstit) throw TranslateError("dstit subformula in a CSTIT source");
      auto body = p(psi.body());
      return s_iff(lhs, s_and(s_cstit(psi.agent(), body), s_not(s_box(body))));
    }
    case Op::Cstit: {
      if (table.direction() != Direction::ToDstit) throw TranslateError("cstit subformula in a DSTIT source");
      auto body = p(psi.body());
      return s_iff(lhs, s_or(s_dstit(psi.agent(), body), s_box(body)));
    }
  }
  throw std::logic_error("unreachable");
}

Translation translate(const Formula& f, Direction direction) {
  const LanguageTag need = direction == Direction::ToCstit ? LanguageTag::Dstit : LanguageTag::Cstit;
  if (!in_language(f, need))
    throw TranslateError("translation to " + to_string(direction) + " needs a " + stitkit::to_string(need) +
                         " formula");
  Translation out{f, TranslationTable::build(f, direction), 0, 0};
  const auto& entries = out.table.entries();
  std::optional<Sugared> rest;
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    Sugared clause = s_box(biimp(it->first, out.table));
    rest = rest ? s_and(clause, *rest) : clause;
  }
  Sugared whole = s_and(s_atom(out.table.atom_for(f)), *rest);
  out.formula = whole.formula;
  out.surface_length = whole.length;
  out.primitive_length = length(whole.formula);
  if (out.surface_length > 1 + kLengthFactor * length(f))
    throw std::logic_error("translation exceeded its linear length bound");
  if (!in_language(out.formula, direction == Direction::ToCstit ? LanguageTag::Cstit : LanguageTag::Dstit))
    throw std::logic_error("translation left the target language");
  return out;
}

Translation tr(const Formula& f) { return translate(f, Direction::ToCstit); }
Translation tr_prime(const Formula& f) { return translate(f, Direction::ToDstit); }

}  // namespace stitkit::translate
