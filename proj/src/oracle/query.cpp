#include "va/oracle/query.hpp"

namespace va::oracle {

ComparisonQuery::ComparisonQuery(const Criteria& criteria, const Item& x, const Item& y)
    : criteria_(criteria), x_(x), y_(y) {
  if (x.id == y.id) throw DomainError("comparison query needs distinct items, got '" + x.id + "' twice");
}

TripletQuery::TripletQuery(const Criteria& criteria, const Item& anchor, const Item& cand_y,
                           const Item& cand_z)
    : criteria_(criteria), anchor_(anchor), cand_y_(cand_y), cand_z_(cand_z) {
  if (anchor.id == cand_y.id || anchor.id == cand_z.id || cand_y.id == cand_z.id)
    throw DomainError("triplet query needs three distinct items (" + anchor.id + ", " + cand_y.id +
                      ", " + cand_z.id + ")");
}

std::uint64_t QueryKey::stable_hash() const noexcept {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(kind) + 1);
  h = hash_combine(h, criteria_digest);
  h = hash_combine(h, fnv1a(first));
  h = hash_combine(h, fnv1a(second));
  h = hash_combine(h, fnv1a(third));
  return hash_combine(h, sample);
}

std::string QueryKey::describe() const {
  std::string s = kind == QueryKind::comparison ? "comparison(" : "triplet(";
  s += first + ", " + second;
  if (kind == QueryKind::triplet) s += ", " + third;
  s += ")#" + std::to_string(sample);
  return s;
}

QueryKind kind_of(const Query& q) noexcept {
  return std::holds_alternative<ComparisonQuery>(q) ? QueryKind::comparison : QueryKind::triplet;
}

QueryKey make_key(const Query& q, std::uint32_t sample) {
  QueryKey k;
  k.sample = sample;
  if (const auto* c = std::get_if<ComparisonQuery>(&q)) {
    k.kind = QueryKind::comparison;
    k.criteria_digest = c->criteria().digest();
    k.first = c->x().id;
    k.second = c->y().id;
  } else {
    const auto& t = std::get<TripletQuery>(q);
    k.kind = QueryKind::triplet;
    k.criteria_digest = t.criteria().digest();
    k.first = t.anchor().id;
    k.second = t.cand_y().id;
    k.third = t.cand_z().id;
  }
  return k;
}

}  // namespace va::oracle
