#include "va/core.hpp"

#include <cstdio>

namespace va {

Item::Item(std::string id_, std::string text_) : id(std::move(id_)), text(std::move(text_)) {
  if (id.empty()) throw DomainError("item id must be non-empty");
  if (text.empty()) throw DomainError("item '" + id + "' has empty text");
}

Criteria::Criteria(std::string text) : text_(std::move(text)) {
  if (text_.empty()) throw DomainError("criteria text must be non-empty");
  digest_ = fnv1a(text_);
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace va
